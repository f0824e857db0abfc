#pragma once

// Subspace-approximation dimension of a finite family of vectors: the least
// dim X such that every vector lies within delta of X.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qmetric/caps.hpp"
#include "qmetric/linalg.hpp"

namespace qmetric::approx {

using linalg::CMatrix;
using linalg::Complex;

// "within delta" means residual < delta (Strict, the default) or <= delta.
// Values within 1e-12 relative of the threshold count as equal to it.
enum class Convention { Strict, NonStrict };

inline constexpr double kBoundarySnap = 1e-12;

// True when x is below bound under the convention.
bool within(double x, double bound, Convention conv);

class VectorFamily {
 public:
  // Columns of `vectors` are the family members.
  explicit VectorFamily(CMatrix vectors, const Caps& caps = default_caps());
  static VectorFamily from_columns(const std::vector<std::vector<Complex>>& columns,
                                   const Caps& caps = default_caps());

  std::size_t ambient_dim() const { return vectors_.rows(); }
  std::size_t size() const { return vectors_.cols(); }
  const CMatrix& matrix() const { return vectors_; }
  VectorFamily scaled(double c) const;

 private:
  CMatrix vectors_;
};

enum class NormTag { Gns, CStarBracket };
std::string to_string(NormTag tag);

struct DimBracket {
  double delta = 0.0;
  std::size_t lower = 0;
  std::size_t upper = 0;
  NormTag norm_tag = NormTag::Gns;
};

// min{r : sum_{k>r} sigma_k^2 < m delta^2}. Any subspace of dimension r with
// every residual below delta forces this tail inequality, so this is a lower bound.
std::size_t dim_lower_spectral(const VectorFamily& fam, double delta, Convention conv = Convention::Strict);

struct DimWitness {
  std::size_t dim = 0;
  CMatrix basis;              // ambient x dim, orthonormal columns
  double max_residual = 0.0;  // max_i ||v_i - P v_i||
};

// Smallest r for which a constructed r-dimensional subspace leaves every
// residual within delta. Candidates are the top-r left singular vectors and,
// when the r-th singular value is degenerate, the same space with the tail of
// the cluster replaced by a DFT-equalized combination of the family.
DimWitness dim_upper_svd(const VectorFamily& fam, double delta, Convention conv = Convention::Strict);

// Residual norms ||v_i - Q Q^* v_i|| for an orthonormal basis Q.
std::vector<double> residuals(const VectorFamily& fam, const CMatrix& basis);

// Exact D for m orthonormal vectors: min{r : (m - r) / m < delta^2}.
std::size_t dim_exact_orthonormal(std::size_t m, double delta, Convention conv = Convention::Strict);

DimBracket dim_bracket(const VectorFamily& fam, double delta, Convention conv = Convention::Strict);

struct MdimSlopes {
  double slope_lower = 0.0;
  double slope_upper = 0.0;
};

// Least-squares slopes of log D against log(1/delta) for both bracket ends.
// Needs at least 3 samples with strictly decreasing delta and D >= 1.
MdimSlopes mdim_regression(std::span<const DimBracket> samples);

}  // namespace qmetric::approx
