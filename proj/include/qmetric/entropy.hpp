#pragma once

// Product-entropy estimators: orbit product sets, the shift-entropy bracket
// on tensor powers of M_p, lattice sum-set growth for toral automorphisms,
// the eigenvalue closed form and a box bound on sum-set growth.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qmetric/caps.hpp"
#include "qmetric/nctorus.hpp"
#include "qmetric/weyl.hpp"

namespace qmetric::entropy {

using linalg::Complex;
using IntMatrix = std::vector<std::vector<long long>>;
using Point = std::vector<long long>;

// Set of integer points in Z^p, p <= 4, stored in an open-addressing hash
// table of packed keys. Each coordinate gets 64/p bits (32 when p = 1);
// coordinates outside the packable range throw ResourceLimitError.
class LatticeSet {
 public:
  explicit LatticeSet(int p, const Caps& caps = default_caps());
  // K_m = {-m..m}^p.
  static LatticeSet cube(int p, int m, const Caps& caps = default_caps());

  int p() const { return p_; }
  std::size_t size() const { return size_; }
  // Returns true when x was not present.
  bool insert(std::span<const long long> x);
  bool contains(std::span<const long long> x) const;
  // Points in increasing lexicographic order.
  std::vector<Point> points() const;
  void for_each(const std::function<void(std::span<const long long>)>& f) const;
  long long max_abs_coordinate() const;

 private:
  std::uint64_t pack(std::span<const long long> x) const;
  void unpack(std::uint64_t key, std::span<long long> out) const;
  std::size_t slot(std::uint64_t key) const;
  void grow();

  int p_;
  int bits_;
  long long limit_;
  Caps caps_;
  std::vector<std::uint64_t> table_;
  std::size_t size_ = 0;
};

// {x + y : x in a, y in b}
LatticeSet minkowski_sum(const LatticeSet& a, const LatticeSet& b, const Caps& caps = default_caps());
// {T x : x in a}
LatticeSet linear_image(const IntMatrix& T, const LatticeSet& a, const Caps& caps = default_caps());

struct GrowthSeries {
  std::vector<std::size_t> counts;  // counts[j - 1] = card(K + T K + ... + T^(j-1) K)
};

// Cardinalities for j = 1..n via S_1 = K_m, S_(j+1) = T S_j + K_m.
GrowthSeries lattice_orbit_card(const IntMatrix& T, int m, int n, const Caps& caps = default_caps());
// Same counts from the literal sum K + T K + ... + T^(j-1) K; n <= 6.
GrowthSeries lattice_orbit_card_literal(const IntMatrix& T, int m, int n, const Caps& caps = default_caps());

// Characteristic polynomial det(x I - T), coefficients from x^0 up to the leading 1.
std::vector<long long> characteristic_polynomial(const IntMatrix& T);
// Eigenvalues with multiplicity: quadratic formula for p <= 2, Durand-Kerner
// iteration beyond with near-coincident roots replaced by their mean.
std::vector<Complex> eigenvalues(const IntMatrix& T);
// sum over eigenvalues with |lambda| >= 1 of log |lambda|.
double eigen_entropy(const IntMatrix& T);

IntMatrix matrix_power(const IntMatrix& T, int k);

struct BoxBound {
  std::vector<double> bounds;       // bounds[j - 1] >= card(S_j)
  std::vector<double> moduli;       // max(|lambda|, 1) per coordinate of the real invariant basis
  double det_basis = 0.0;           // |det P|
  bool defective = false;
};

// Upper bounds for card(S_j), j = 1..n. Coordinates are taken in a real basis P
// of generalized eigenspaces; each coordinate of S_j is bounded by
// Q m sum_(i<j) (i+1) g^i, g = (1+pad)^(1/p) max(|lambda|,1), with Q fitted over i < j, and
// the lattice points in the box are counted by volume after padding by a unit cell.
// Defective spectra need pad > 0.
BoxBound box_bound_card(const IntMatrix& T, int m, int n, double pad);

struct EntropyEstimate {
  double slope = 0.0;
  std::vector<double> diffs;  // log(c_(j+1) / c_j)
};

// Least-squares slope of log c_j against j over the last `tail` entries.
EntropyEstimate entropy_slope(const GrowthSeries& series, int tail);

// All ordered products a_0 alpha(a_1) ... alpha^(n-1)(a_(n-1)) with a_i in omega.
// Throws ResourceLimitError when |omega|^n exceeds caps.product_set.
std::vector<weyl::WeylElement> product_set(const std::vector<weyl::WeylElement>& omega,
                                           const std::function<weyl::WeylElement(const weyl::WeylElement&)>& alpha,
                                           int n, const Caps& caps = default_caps());

// Symbolic product set for the shift by one site, deduplicated by exponents
// (the first phase met is kept). Sorted by exponent map.
std::vector<weyl::WeylWord> shift_product_set(const std::vector<weyl::WeylWord>& omega, int n,
                                              const Caps& caps = default_caps());

// Exponent image of the product set of twisted monomials under alpha_T o gamma_t.
std::vector<nctorus::Exponent> toral_product_exponents(const std::vector<nctorus::Exponent>& omega,
                                                      const nctorus::ToralMap& map,
                                                      const nctorus::PhaseMatrix& phase, int n,
                                                      const Caps& caps = default_caps());

// The p^2 single-site Weyl unitaries u^i v^j at site 0.
std::vector<weyl::WeylWord> site_zero_unitaries(int p);

struct ShiftBracket {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t dim_lower = 0;    // dim_exact_orthonormal(p^(2n), delta)
  double log_dim_upper = 0.0;   // log p^(2(2 ceil(sqrt n) + n))
};

// lower = (1/n) log dim_exact_orthonormal(p^(2n), delta), upper = 2(2 ceil(sqrt n) + n) log p / n.
ShiftBracket shift_entropy_bracket(int p, int n, double delta);

}  // namespace qmetric::entropy
