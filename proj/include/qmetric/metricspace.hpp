#pragma once

// Finite metric spaces: separated and spanning sets, covers, box dimension,
// Lipschitz seminorms and the unitary family built from a separated set.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "qmetric/caps.hpp"
#include "qmetric/linalg.hpp"

namespace qmetric::metric {

using linalg::CMatrix;
using linalg::Complex;

class FiniteMetricSpace {
 public:
  // Explicit distance matrix. Checks symmetry, zero diagonal, positivity off
  // the diagonal and the triangle inequality with 1e-9 slack.
  static FiniteMetricSpace from_matrix(const std::vector<std::vector<double>>& dist,
                                       const Caps& caps = default_caps());
  // Euclidean distances between the rows of `points`; points must be distinct.
  static FiniteMetricSpace from_points(const std::vector<std::vector<double>>& points,
                                       const Caps& caps = default_caps());

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return dist_[i * n_ + j]; }
  double diameter() const;

 private:
  FiniteMetricSpace(std::size_t n, std::vector<double> dist) : n_(n), dist_(std::move(dist)) {}
  std::size_t n_;
  std::vector<double> dist_;
};

// Rows of comma-separated reals. Blank lines and lines starting with '#' are skipped.
std::vector<std::vector<double>> read_csv_rows(std::istream& in);

// Exhaustive searches run up to this many points.
inline constexpr std::size_t kExactLimit = 20;

// sep: largest set with pairwise d > delta. spn: smallest set with every point
// within d <= delta of it. cover: fewest closed delta-balls centred in X covering X.
// Each value is exact when the matching flag is set, otherwise it is the
// greedy value (a lower bound for sep, upper bounds for spn and cover).
struct NetStatistics {
  double delta = 0.0;
  std::size_t sep = 0;
  std::size_t spn = 0;
  std::size_t cover = 0;
  std::size_t sep_greedy = 0;
  std::size_t spn_greedy = 0;
  std::size_t cover_greedy = 0;
  bool sep_exact = false;
  bool spn_exact = false;
  bool cover_exact = false;
};

NetStatistics net_statistics(const FiniteMetricSpace& space, double delta);

// Farthest-point greedy: starts at index 0, adds the point farthest from the
// chosen set (lowest index on ties) while that distance exceeds delta.
std::vector<std::size_t> greedy_separated(const FiniteMetricSpace& space, double delta);
// Scans points in order, adding each one not yet within delta of the chosen set.
std::vector<std::size_t> greedy_spanning(const FiniteMetricSpace& space, double delta);
// Greedy set cover by closed delta-balls (largest uncovered gain, lowest index on ties).
std::size_t greedy_cover(const FiniteMetricSpace& space, double delta);
std::size_t exact_separated(const FiniteMetricSpace& space, double delta);
std::size_t exact_spanning(const FiniteMetricSpace& space, double delta);

enum class NetEstimator { Separated, Spanning, Cover };

struct BoxDimension {
  double slope_sep = 0.0;
  double slope_spn = 0.0;
  double slope_cover = 0.0;
  std::vector<NetStatistics> stats;

  double slope(NetEstimator e) const;
};

// Least-squares slopes of log N(delta) against log(1/delta) over the grid.
BoxDimension box_dimension(const FiniteMetricSpace& space, std::span<const double> delta_grid);

// Slope of the least-squares line through (x_i, y_i).
double regression_slope(std::span<const double> x, std::span<const double> y);

// max_{x != y} |f(x) - f(y)| / d(x, y)
double lipschitz_seminorm(std::span<const Complex> f, const FiniteMetricSpace& space);
double lipschitz_seminorm(std::span<const double> f, const FiniteMetricSpace& space);

struct KolmBundle {
  double delta = 0.0;
  std::vector<std::size_t> E;               // greedy separated set, construction order
  std::vector<std::vector<double>> f;       // f_j(x) = max(0, 1 - d(x, x_j) / delta)
  std::vector<std::vector<double>> g;       // g_k = sum_j frac(j k / r) f_j, k = 0..r-1
  std::vector<std::vector<Complex>> u;      // u_k = exp(2 pi i g_k)
  std::vector<double> lip_f;
  std::vector<double> lip_g;
  CMatrix gram;                             // <u_k, u_l> in L^2(E, uniform)
  double orthonormality_defect = 0.0;       // max |gram - I|
  double lip_u_factor = 0.0;                // 2 pi e^{2 pi}: L(u_k) <= factor * L(g_k)

  std::size_t r() const { return E.size(); }
};

KolmBundle kolm_unitaries(const FiniteMetricSpace& space, double delta);

}  // namespace qmetric::metric
