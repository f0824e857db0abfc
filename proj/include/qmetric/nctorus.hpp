#pragma once

// Symbolic noncommutative p-torus. Elements are finitely supported twisted
// polynomials sum_k c_k u^k in the ordered monomials u^k = u_1^k1 ... u_p^kp,
// with the generators subject to u_j u_i = rho_ij u_i u_j, rho_ij = exp(2 pi i theta_ij).

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "qmetric/caps.hpp"
#include "qmetric/linalg.hpp"

namespace qmetric::nctorus {

using linalg::CMatrix;
using linalg::Complex;
using Exponent = std::vector<int>;

// Coefficients with modulus below this are dropped from supports.
inline constexpr double kPruneThreshold = 1e-15;

class PhaseMatrix {
 public:
  // theta = 0 (the commutative torus).
  explicit PhaseMatrix(int p);
  // Full p x p matrix; must be antisymmetric mod 1 with zero diagonal (tolerance 1e-12).
  static PhaseMatrix from_matrix(const std::vector<std::vector<double>>& theta);
  static PhaseMatrix two_torus(double theta12);

  int p() const { return p_; }
  // Representative in [0, 1); theta(j, i) = -theta(i, j) mod 1.
  double theta(int i, int j) const;
  Complex rho(int i, int j) const;
  std::vector<std::vector<double>> matrix() const;
  // Smallest N <= max_denominator with every theta_ij * N an integer (to 1e-9).
  std::optional<int> common_denominator(int max_denominator) const;

  friend bool operator==(const PhaseMatrix&, const PhaseMatrix&) = default;

 private:
  int p_;
  std::vector<double> upper_;  // theta_ij for i < j, row-major over the strict upper triangle
};

// Scalar with u^k u^l = reorder_phase(k, l) u^(k+l): prod_{i<j} rho_ij^(k_j l_i).
Complex reorder_phase(const Exponent& k, const Exponent& l, const PhaseMatrix& phase);

class TwistedPolynomial {
 public:
  using Terms = std::map<Exponent, Complex>;

  explicit TwistedPolynomial(PhaseMatrix phase);
  TwistedPolynomial(PhaseMatrix phase, const Terms& terms);

  static TwistedPolynomial one(const PhaseMatrix& phase);
  static TwistedPolynomial monomial(const PhaseMatrix& phase, const Exponent& k, Complex c = 1.0);
  // Generator u_j, j in [1, p].
  static TwistedPolynomial generator(const PhaseMatrix& phase, int j);

  const PhaseMatrix& phase() const { return phase_; }
  const Terms& terms() const { return terms_; }
  std::size_t support_size() const { return terms_.size(); }
  Complex coefficient(const Exponent& k) const;
  bool is_monomial() const { return terms_.size() == 1; }

  // Accumulates c into the coefficient at k, pruning it if it becomes negligible.
  void add_term(const Exponent& k, Complex c);

  friend TwistedPolynomial operator+(const TwistedPolynomial& a, const TwistedPolynomial& b);
  friend TwistedPolynomial operator-(const TwistedPolynomial& a, const TwistedPolynomial& b);
  friend TwistedPolynomial operator*(Complex s, const TwistedPolynomial& a);
  friend TwistedPolynomial operator*(const TwistedPolynomial& a, const TwistedPolynomial& b);

 private:
  PhaseMatrix phase_;
  Terms terms_;
};

TwistedPolynomial twisted_product(const TwistedPolynomial& a, const TwistedPolynomial& b);
TwistedPolynomial involution(const TwistedPolynomial& a);
// tau(b^* a), the GNS inner product <a, b> for the trace tau.
Complex trace_pairing(const TwistedPolynomial& a, const TwistedPolynomial& b);
// tau(a): the coefficient at the zero exponent.
Complex trace(const TwistedPolynomial& a);
// ||a xi_tau||, the l2 norm of the coefficients.
double gns_norm(const TwistedPolynomial& a);
// sum |c_k|, an upper bound for the C*-norm.
double l1_norm(const TwistedPolynomial& a);

// gamma_t(u_j) = exp(2 pi i t_j) u_j.
TwistedPolynomial torus_action(const TwistedPolynomial& a, std::span<const double> t);
// 2 pi times the Euclidean distance from t to 0 in R^p / Z^p.
double torus_length(std::span<const double> t);

struct LipBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Bracket for the Lip-norm from the torus action. For a scalar multiple of a
// monomial both ends equal |c| |k|_2.
LipBounds lip_bounds(const TwistedPolynomial& a);
// max over a fixed t-sample of ||(gamma_t(a) - a) xi_tau|| / ell(t).
double lip_lower_sampled(const TwistedPolynomial& a);
// sum |c_k| |k|_2.
double lip_upper(const TwistedPolynomial& a);

// s_(n_1..n_p): keeps the coefficients with |k_i| <= n_i.
TwistedPolynomial partial_fourier_sum(const TwistedPolynomial& a, std::span<const int> n);
// sigma_n: coefficient at k scaled by prod_i max(0, 1 - |k_i| / (n + 1)).
TwistedPolynomial cesaro_mean(const TwistedPolynomial& a, int n);

// Fejer kernel on t in [-1/2, 1/2): closed form (1/(n+1)) (sin(pi(n+1)t) / sin(pi t))^2.
double fejer_eval(int n, double t);
// Same kernel summed as sum_{|k|<=n} (1 - |k|/(n+1)) exp(2 pi i k t).
double fejer_series(int n, double t);
// Integral of |t| K_n(t) over [-1/2, 1/2), summed exactly from the Fourier coefficients of |t|.
double fejer_abs_moment(int n);

// Finite-dimensional clock/shift representation of a rational phase matrix
// theta_ij = q_ij / N. One C^N factor per pair i < j: u_i acts there by
// clock^q_ij and u_j by the shift. Throws ResourceLimitError when no common
// denominator <= caps.denominator exists or the dimension exceeds caps.matrix_dim.
CMatrix rational_representation(const TwistedPolynomial& a, const Caps& caps = default_caps());

// alpha_T composed with gamma_t: u^k -> exp(2 pi i k.t) alpha_T(u^k), alpha_T(u_j) = u^(T e_j).
struct ToralMap {
  std::vector<std::vector<long long>> matrix;  // integer p x p, |det| = 1
  std::vector<double> shift;                   // t in R^p / Z^p

  int p() const { return static_cast<int>(matrix.size()); }
  // Throws PreconditionError unless square integer with |det| = 1 and shift of length p.
  void validate() const;
  // True when u^(T e_j) u^(T e_i) = rho_ij u^(T e_i) u^(T e_j) for all i < j.
  bool preserves(const PhaseMatrix& phase) const;
};

long long integer_determinant(const std::vector<std::vector<long long>>& m);

TwistedPolynomial toral_map_apply(const ToralMap& map, const TwistedPolynomial& a);

// Image of a single ordered monomial: alpha(u^k) = phase * u^(Tk).
std::pair<Exponent, Complex> toral_map_monomial(const ToralMap& map, const PhaseMatrix& phase, const Exponent& k);

}  // namespace qmetric::nctorus
