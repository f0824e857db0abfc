#pragma once

// Finite Weyl (clock-and-shift) matrix algebras over a window of sites,
// the product Weyl action of (Z_p x Z_p)^window, the weighted length
// function on the group, conditional expectations onto sub-windows and
// Lip-norms obtained as an exhaustive supremum over the finite group.
//
// Site k of a window [lo, hi] is the (k - lo)-th Kronecker factor, so the
// lowest site is the most significant index of the matrix.

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "qmetric/caps.hpp"
#include "qmetric/linalg.hpp"

namespace qmetric::weyl {

using linalg::CMatrix;
using linalg::Complex;

// (i, j): the power of the clock u and of the shift v at one site.
using SiteExponent = std::pair<int, int>;

struct WeylWindow {
  int p = 2;
  int lo = 0;
  int hi = 0;

  int length() const { return hi - lo + 1; }
  bool contains(int site) const { return lo <= site && site <= hi; }
  // Matrix side p^length.
  std::size_t dim() const;
  // Throws PreconditionError for p < 2 or lo > hi, ResourceLimitError above the matrix cap.
  void validate(const Caps& caps = default_caps()) const;

  friend bool operator==(const WeylWindow&, const WeylWindow&) = default;
};

// Dense Weyl-basis coefficients c_m = tau(m^* a) indexed by the multi-exponent.
// Index layout: sum_k (i_k p + j_k) (p^2)^(L-1-k) with k = site - lo.
class WeylCoefficients {
 public:
  WeylCoefficients(WeylWindow window, std::vector<Complex> values);

  const WeylWindow& window() const { return window_; }
  std::span<const Complex> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  Complex at(std::span<const SiteExponent> exponents) const;
  std::size_t index_of(std::span<const SiteExponent> exponents) const;
  std::vector<SiteExponent> exponents_of(std::size_t index) const;

  // Sum |c|^2, equal to tau(a^* a).
  double squared_norm() const;

 private:
  WeylWindow window_;
  std::vector<Complex> values_;
};

class WeylElement {
 public:
  // Throws PreconditionError unless the matrix is square of side window.dim().
  WeylElement(WeylWindow window, CMatrix matrix);

  static WeylElement identity(const WeylWindow& window);
  static WeylElement from_coefficients(const WeylCoefficients& coeffs);

  const WeylWindow& window() const { return window_; }
  const CMatrix& matrix() const { return matrix_; }
  // Computed on first use and cached; thread-safe.
  const WeylCoefficients& coefficients() const;

  WeylElement adjoint() const;
  friend WeylElement operator*(const WeylElement& a, const WeylElement& b);
  friend WeylElement operator+(const WeylElement& a, const WeylElement& b);
  friend WeylElement operator-(const WeylElement& a, const WeylElement& b);
  friend WeylElement operator*(Complex s, const WeylElement& a);

 private:
  struct Cache;
  WeylWindow window_;
  CMatrix matrix_;
  std::shared_ptr<Cache> cache_;
};

struct ClockShift {
  CMatrix u;  // diag(1, rho, ..., rho^(p-1))
  CMatrix v;  // ones on the superdiagonal and in the bottom-left corner
};

// rho = exp(2 pi i / p).
Complex root_of_unity(int p, long long power = 1);

ClockShift clock_shift(int p);

// Tensor product of u^i v^j over the window (one exponent pair per site).
WeylElement weyl_monomial(const WeylWindow& window, std::span<const SiteExponent> exponents,
                          const Caps& caps = default_caps());

WeylCoefficients weyl_expand(const WeylElement& a);

// Kills every Weyl coefficient that is nontrivial at a site outside [-n, n].
WeylElement conditional_expectation(const WeylElement& a, int n);

// (r_k, s_k) per site, aligned with the window starting at `lo`.
struct GroupElement {
  int p = 2;
  int lo = 0;
  std::vector<SiteExponent> shifts;

  bool is_identity() const;
};

// Distance from (r/p, s/p) to 0 in R^2/Z^2.
double site_length(int p, int r, int s);

// sum_k lambda^|k| * site_length at site k.
double group_length(const GroupElement& g, double lambda);

// Multiplies the coefficient at ((i_k, j_k)) by prod_k rho^(r_k i_k + s_k j_k).
WeylElement weyl_action(const GroupElement& g, const WeylElement& a);

// sup of ell_lambda(T g) / ell_lambda(g) over nonidentity g supported on
// [-n, n], where T moves site k to k + by (by = +1 or -1), by exhaustive
// enumeration. The value is 1 / lambda for every n >= 1.
double shift_lipschitz_number(int p, double lambda, int by, int n, const Caps& caps = default_caps());

// sup over nonidentity g of ||gamma_g(a) - a|| / ell_lambda(g), by exhaustive
// enumeration. Sites where a has only trivial coefficients are dropped first;
// they cannot raise the supremum. Throws ResourceLimitError when the
// enumerated group exceeds caps.group_elements.
double weyl_lip_norm(const WeylElement& a, double lambda, const Caps& caps = default_caps());

// Symbolic scalar multiple of a Weyl monomial: phase * (tensor over listed
// sites of u^i v^j); absent sites carry the identity.
struct WeylWord {
  int p = 2;
  std::map<int, SiteExponent> sites;
  Complex phase = 1.0;
};

WeylWord multiply(const WeylWord& a, const WeylWord& b);
// Moves every site k to k + by (the shift automorphism applied `by` times).
WeylWord shift(const WeylWord& w, int by);
WeylElement to_element(const WeylWord& w, const WeylWindow& window, const Caps& caps = default_caps());

}  // namespace qmetric::weyl
