#include "qmetric/approxdim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "qmetric/errors.hpp"
#include "qmetric/metricspace.hpp"

namespace qmetric::approx {

namespace {

using EMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EMatrix> view(const CMatrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

CMatrix from_eigen(const Eigen::MatrixXcd& m) {
  CMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

void require_delta(double delta) {
  QMETRIC_REQUIRE(std::isfinite(delta) && delta > 0.0, "delta must be a positive finite number");
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

}  // namespace

bool within(double x, double bound, Convention conv) {
  if (std::abs(x - bound) <= kBoundarySnap * std::max(std::abs(bound), std::abs(x))) return conv == Convention::NonStrict;
  return x < bound;
}

VectorFamily::VectorFamily(CMatrix vectors, const Caps& caps) : vectors_(std::move(vectors)) {
  QMETRIC_REQUIRE(vectors_.rows() >= 1 && vectors_.cols() >= 1, "vector family must be nonempty");
  QMETRIC_REQUIRE(vectors_.all_finite(), "vector family entries must be finite");
  if (vectors_.rows() > caps.matrix_dim || vectors_.cols() > caps.matrix_dim)
    throw ResourceLimitError("vector family of shape " + std::to_string(vectors_.rows()) + "x" +
                             std::to_string(vectors_.cols()) + " exceeds matrix cap");
}

VectorFamily VectorFamily::from_columns(const std::vector<std::vector<Complex>>& columns, const Caps& caps) {
  QMETRIC_REQUIRE(!columns.empty(), "vector family must be nonempty");
  const std::size_t d = columns.front().size();
  CMatrix m(d, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    QMETRIC_REQUIRE(columns[j].size() == d, "all vectors must share the ambient dimension");
    for (std::size_t i = 0; i < d; ++i) m(i, j) = columns[j][i];
  }
  return VectorFamily(std::move(m), caps);
}

VectorFamily VectorFamily::scaled(double c) const { return VectorFamily(c * vectors_); }

std::string to_string(NormTag tag) { return tag == NormTag::Gns ? "gns" : "cstar-bracket"; }

std::size_t dim_lower_spectral(const VectorFamily& fam, double delta, Convention conv) {
  require_delta(delta);
  const auto sigma = linalg::singular_values(fam.matrix()).values;
  const double budget = static_cast<double>(fam.size()) * delta * delta;
  // tail[r] = sum_{k >= r} sigma_k^2 (zero-based), summed from the small end.
  std::vector<double> tail(sigma.size() + 1, 0.0);
  for (std::size_t k = sigma.size(); k-- > 0;) tail[k] = tail[k + 1] + sigma[k] * sigma[k];
  for (std::size_t r = 0; r < tail.size(); ++r)
    if (within(tail[r], budget, conv)) return r;
  return sigma.size();
}

std::vector<double> residuals(const VectorFamily& fam, const CMatrix& basis) {
  QMETRIC_REQUIRE(basis.rows() == fam.ambient_dim(), "residuals: basis has the wrong ambient dimension");
  const auto a = view(fam.matrix());
  Eigen::MatrixXcd r = a;
  if (basis.cols() > 0) {
    const auto q = view(basis);
    r -= q * (q.adjoint() * a);
  }
  std::vector<double> out(fam.size());
  for (Eigen::Index j = 0; j < r.cols(); ++j) out[j] = r.col(j).norm();
  return out;
}

DimWitness dim_upper_svd(const VectorFamily& fam, double delta, Convention conv) {
  require_delta(delta);
  const std::size_t d = fam.ambient_dim(), m = fam.size();
  const linalg::Svd s = linalg::svd(fam.matrix());
  const auto& sigma = s.sigma.values;
  const auto u = view(s.u);
  const auto a = view(fam.matrix());

  auto try_basis = [&](const Eigen::MatrixXcd& q) -> std::optional<DimWitness> {
    CMatrix basis = from_eigen(q);
    const double worst = max_of(residuals(fam, basis));
    if (!within(worst, delta, conv)) return std::nullopt;
    return DimWitness{static_cast<std::size_t>(q.cols()), std::move(basis), worst};
  };

  const double top = sigma.empty() ? 0.0 : sigma.front();
  for (std::size_t r = dim_lower_spectral(fam, delta, conv); r <= sigma.size(); ++r) {
    if (auto w = try_basis(u.leftCols(static_cast<Eigen::Index>(r)))) return *w;
    if (r == 0 || r == sigma.size()) continue;

    // Degenerate cluster around sigma_{r-1}: indices [c0, c1).
    const double tol = 1e-9 * top;
    std::size_t c0 = r - 1, c1 = r;
    while (c0 > 0 && std::abs(sigma[c0 - 1] - sigma[r - 1]) <= tol) --c0;
    while (c1 < sigma.size() && std::abs(sigma[c1] - sigma[r - 1]) <= tol) ++c1;
    if (c1 - c0 < 2) continue;
    const std::size_t t = r - c0;
    const Eigen::MatrixXcd y = u.middleCols(static_cast<Eigen::Index>(c0), static_cast<Eigen::Index>(c1 - c0));
    // Cluster component of the family, mixed over the samples with t DFT columns.
    Eigen::MatrixXcd f(m, t);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < t; ++k)
        f(i, k) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((i * k) % m) / static_cast<double>(m));
    const Eigen::MatrixXcd block = y * (y.adjoint() * (a * f));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(block);
    const Eigen::MatrixXcd rdiag = qr.matrixQR().topLeftCorner(t, t).triangularView<Eigen::Upper>();
    if (rdiag.diagonal().cwiseAbs().minCoeff() <= 1e-10 * rdiag.diagonal().cwiseAbs().maxCoeff()) continue;
    Eigen::MatrixXcd q(d, r);
    q.leftCols(static_cast<Eigen::Index>(c0)) = u.leftCols(static_cast<Eigen::Index>(c0));
    q.rightCols(static_cast<Eigen::Index>(t)) = qr.householderQ() * Eigen::MatrixXcd::Identity(d, t);
    if (auto w = try_basis(q)) return *w;
  }
  // The full left singular space reproduces every vector.
  auto w = try_basis(u);
  if (!w) throw NumericalError("dim_upper_svd: full singular space fails to reproduce the family");
  return *w;
}

std::size_t dim_exact_orthonormal(std::size_t m, double delta, Convention conv) {
  QMETRIC_REQUIRE(m >= 1, "dim_exact_orthonormal: m must be >= 1");
  require_delta(delta);
  const double md = static_cast<double>(m) * delta * delta;
  // Start just below the real root m - m delta^2 and step up.
  const double guess = std::floor(static_cast<double>(m) - md) - 2.0;
  const std::size_t start = guess > 0.0 ? static_cast<std::size_t>(guess) : 0;
  for (std::size_t r = start; r <= m; ++r)
    if (within(static_cast<double>(m - r), md, conv)) return r;
  return m;
}

DimBracket dim_bracket(const VectorFamily& fam, double delta, Convention conv) {
  DimBracket b;
  b.delta = delta;
  b.lower = dim_lower_spectral(fam, delta, conv);
  b.upper = dim_upper_svd(fam, delta, conv).dim;
  b.norm_tag = NormTag::Gns;
  return b;
}

MdimSlopes mdim_regression(std::span<const DimBracket> samples) {
  QMETRIC_REQUIRE(samples.size() >= 3, "mdim_regression: need at least 3 samples");
  std::vector<double> x, lo, hi;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    require_delta(s.delta);
    QMETRIC_REQUIRE(i == 0 || s.delta < samples[i - 1].delta, "mdim_regression: delta must be decreasing");
    QMETRIC_REQUIRE(s.lower >= 1 && s.upper >= s.lower, "mdim_regression: need 1 <= lower <= upper");
    x.push_back(-std::log(s.delta));
    lo.push_back(std::log(static_cast<double>(s.lower)));
    hi.push_back(std::log(static_cast<double>(s.upper)));
  }
  return {metric::regression_slope(x, lo), metric::regression_slope(x, hi)};
}

}  // namespace qmetric::approx
