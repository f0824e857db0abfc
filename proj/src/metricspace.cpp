#include "qmetric/metricspace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <string>

#include "qmetric/errors.hpp"

namespace qmetric::metric {

namespace {

void check_size(std::size_t n, const Caps& caps) {
  QMETRIC_REQUIRE(n >= 1, "metric space needs at least one point");
  if (n > caps.matrix_dim)
    throw ResourceLimitError("metric space with " + std::to_string(n) + " points exceeds matrix cap " +
                             std::to_string(caps.matrix_dim));
}

void require_delta(double delta) {
  QMETRIC_REQUIRE(std::isfinite(delta) && delta > 0.0, "delta must be a positive finite number");
}

// Bit i of close[j] is set when d(i, j) <= delta.
std::vector<std::uint32_t> closed_ball_masks(const FiniteMetricSpace& space, double delta) {
  const std::size_t n = space.size();
  std::vector<std::uint32_t> close(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (space(i, j) <= delta) close[i] |= std::uint32_t{1} << j;
  return close;
}

}  // namespace

FiniteMetricSpace FiniteMetricSpace::from_matrix(const std::vector<std::vector<double>>& dist, const Caps& caps) {
  const std::size_t n = dist.size();
  check_size(n, caps);
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    QMETRIC_REQUIRE(dist[i].size() == n, "distance matrix must be square");
    for (std::size_t j = 0; j < n; ++j) {
      const double x = dist[i][j];
      QMETRIC_REQUIRE(std::isfinite(x) && x >= 0.0, "distances must be finite and nonnegative");
      QMETRIC_REQUIRE(i != j || x == 0.0, "distance matrix must have zero diagonal");
      QMETRIC_REQUIRE(i == j || x > 0.0, "distinct points must have positive distance");
      d[i * n + j] = x;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      QMETRIC_REQUIRE(d[i * n + j] == d[j * n + i], "distance matrix must be symmetric");
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        QMETRIC_REQUIRE(d[i * n + j] <= d[i * n + k] + d[k * n + j] + 1e-9,
                        "triangle inequality fails at (" + std::to_string(i) + ", " + std::to_string(j) + ", " +
                            std::to_string(k) + ")");
  return FiniteMetricSpace(n, std::move(d));
}

FiniteMetricSpace FiniteMetricSpace::from_points(const std::vector<std::vector<double>>& points, const Caps& caps) {
  const std::size_t n = points.size();
  check_size(n, caps);
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    QMETRIC_REQUIRE(p.size() == dim, "all points must have the same dimension");
    for (double x : p) QMETRIC_REQUIRE(std::isfinite(x), "point coordinates must be finite");
  }
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t q = 0; q < dim; ++q) s += (points[i][q] - points[j][q]) * (points[i][q] - points[j][q]);
      QMETRIC_REQUIRE(s > 0.0, "duplicate points " + std::to_string(i) + " and " + std::to_string(j));
      d[i * n + j] = d[j * n + i] = std::sqrt(s);
    }
  return FiniteMetricSpace(n, std::move(d));
}

double FiniteMetricSpace::diameter() const { return *std::max_element(dist_.begin(), dist_.end()); }

std::vector<std::vector<double>> read_csv_rows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        QMETRIC_REQUIRE(cell.find_first_not_of(" \t\r", used) == std::string::npos, "trailing characters");
      } catch (const std::logic_error&) {
        throw PreconditionError("csv line " + std::to_string(line_no) + ": cannot parse '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::size_t> greedy_separated(const FiniteMetricSpace& space, double delta) {
  require_delta(delta);
  const std::size_t n = space.size();
  std::vector<std::size_t> chosen{0};
  std::vector<double> gap(n);
  for (std::size_t i = 0; i < n; ++i) gap[i] = space(0, i);
  while (true) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (gap[i] > gap[best]) best = i;
    if (!(gap[best] > delta)) break;
    chosen.push_back(best);
    for (std::size_t i = 0; i < n; ++i) gap[i] = std::min(gap[i], space(best, i));
  }
  return chosen;
}

std::vector<std::size_t> greedy_spanning(const FiniteMetricSpace& space, double delta) {
  require_delta(delta);
  const std::size_t n = space.size();
  std::vector<char> covered(n, 0);
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < n; ++i) {
    if (covered[i]) continue;
    chosen.push_back(i);
    for (std::size_t j = 0; j < n; ++j)
      if (space(i, j) <= delta) covered[j] = 1;
  }
  return chosen;
}

std::size_t greedy_cover(const FiniteMetricSpace& space, double delta) {
  require_delta(delta);
  const std::size_t n = space.size();
  std::vector<std::vector<std::size_t>> ball(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (space(i, j) <= delta) ball[i].push_back(j);

  // Lazy greedy: gains only decrease, so a stale heap entry is an upper bound.
  using Entry = std::pair<std::size_t, std::size_t>;  // (gain, n - 1 - index)
  std::priority_queue<Entry> heap;
  for (std::size_t i = 0; i < n; ++i) heap.emplace(ball[i].size(), n - 1 - i);
  std::vector<char> covered(n, 0);
  std::size_t remaining = n, count = 0;
  while (remaining > 0) {
    auto [stale, key] = heap.top();
    heap.pop();
    const std::size_t i = n - 1 - key;
    std::size_t gain = 0;
    for (std::size_t j : ball[i]) gain += !covered[j];
    if (!heap.empty() && Entry{gain, key} < heap.top()) {
      heap.emplace(gain, key);
      continue;
    }
    for (std::size_t j : ball[i])
      if (!covered[j]) {
        covered[j] = 1;
        --remaining;
      }
    ++count;
  }
  return count;
}

std::size_t exact_separated(const FiniteMetricSpace& space, double delta) {
  require_delta(delta);
  const std::size_t n = space.size();
  QMETRIC_REQUIRE(n <= kExactLimit, "exact_separated: too many points for exhaustive search");
  const auto close = closed_ball_masks(space, delta);
  const std::uint32_t full = std::uint32_t{1} << n;
  std::vector<char> independent(full, 0);
  independent[0] = 1;
  std::size_t best = 0;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    const int low = std::countr_zero(mask);
    const std::uint32_t rest = mask & (mask - 1);
    // d(low, low) = 0 <= delta, so exclude the point itself from its ball.
    independent[mask] = independent[rest] && !(close[low] & rest);
    if (independent[mask]) best = std::max<std::size_t>(best, std::popcount(mask));
  }
  return best;
}

std::size_t exact_spanning(const FiniteMetricSpace& space, double delta) {
  require_delta(delta);
  const std::size_t n = space.size();
  QMETRIC_REQUIRE(n <= kExactLimit, "exact_spanning: too many points for exhaustive search");
  const auto close = closed_ball_masks(space, delta);
  const std::uint32_t full = std::uint32_t{1} << n;
  std::vector<std::uint32_t> reach(full, 0);
  std::size_t best = n;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    const int low = std::countr_zero(mask);
    reach[mask] = reach[mask & (mask - 1)] | close[low];
    if (reach[mask] == full - 1) best = std::min<std::size_t>(best, std::popcount(mask));
  }
  return best;
}

NetStatistics net_statistics(const FiniteMetricSpace& space, double delta) {
  require_delta(delta);
  NetStatistics s;
  s.delta = delta;
  s.sep_greedy = greedy_separated(space, delta).size();
  s.spn_greedy = greedy_spanning(space, delta).size();
  s.cover_greedy = greedy_cover(space, delta);
  s.sep = s.sep_greedy;
  s.spn = s.spn_greedy;
  s.cover = s.cover_greedy;
  if (space.size() <= kExactLimit) {
    s.sep = exact_separated(space, delta);
    // With centres restricted to X a cover by closed balls is a spanning set.
    s.spn = s.cover = exact_spanning(space, delta);
    s.sep_exact = s.spn_exact = s.cover_exact = true;
  }
  return s;
}

double regression_slope(std::span<const double> x, std::span<const double> y) {
  QMETRIC_REQUIRE(x.size() == y.size(), "regression_slope: size mismatch");
  QMETRIC_REQUIRE(x.size() >= 2, "regression_slope: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  QMETRIC_REQUIRE(sxx > 0.0, "regression_slope: abscissae must not all coincide");
  return sxy / sxx;
}

double BoxDimension::slope(NetEstimator e) const {
  switch (e) {
    case NetEstimator::Separated: return slope_sep;
    case NetEstimator::Spanning: return slope_spn;
    case NetEstimator::Cover: return slope_cover;
  }
  return slope_sep;
}

BoxDimension box_dimension(const FiniteMetricSpace& space, std::span<const double> delta_grid) {
  QMETRIC_REQUIRE(delta_grid.size() >= 3, "box_dimension: need at least 3 grid points");
  BoxDimension out;
  std::vector<double> x, ys, yp, yc;
  for (double delta : delta_grid) {
    const NetStatistics s = net_statistics(space, delta);
    out.stats.push_back(s);
    x.push_back(-std::log(delta));
    ys.push_back(std::log(static_cast<double>(s.sep)));
    yp.push_back(std::log(static_cast<double>(s.spn)));
    yc.push_back(std::log(static_cast<double>(s.cover)));
  }
  out.slope_sep = regression_slope(x, ys);
  out.slope_spn = regression_slope(x, yp);
  out.slope_cover = regression_slope(x, yc);
  return out;
}

double lipschitz_seminorm(std::span<const Complex> f, const FiniteMetricSpace& space) {
  QMETRIC_REQUIRE(f.size() == space.size(), "lipschitz_seminorm: one value per point required");
  double best = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = i + 1; j < f.size(); ++j) best = std::max(best, std::abs(f[i] - f[j]) / space(i, j));
  return best;
}

double lipschitz_seminorm(std::span<const double> f, const FiniteMetricSpace& space) {
  std::vector<Complex> z(f.begin(), f.end());
  return lipschitz_seminorm(std::span<const Complex>(z), space);
}

KolmBundle kolm_unitaries(const FiniteMetricSpace& space, double delta) {
  require_delta(delta);
  const std::size_t n = space.size();
  KolmBundle b;
  b.delta = delta;
  b.E = greedy_separated(space, delta);
  const std::size_t r = b.E.size();
  b.lip_u_factor = 2.0 * std::numbers::pi * std::exp(2.0 * std::numbers::pi);

  b.f.assign(r, std::vector<double>(n));
  for (std::size_t j = 0; j < r; ++j) {
    for (std::size_t x = 0; x < n; ++x) b.f[j][x] = std::max(0.0, 1.0 - space(x, b.E[j]) / delta);
    b.lip_f.push_back(lipschitz_seminorm(std::span<const double>(b.f[j]), space));
  }
  b.g.assign(r, std::vector<double>(n, 0.0));
  b.u.assign(r, std::vector<Complex>(n));
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t j = 0; j < r; ++j) {
      const double w = static_cast<double>((j * k) % r) / static_cast<double>(r);  // frac(jk/r)
      if (w == 0.0) continue;
      for (std::size_t x = 0; x < n; ++x) b.g[k][x] += w * b.f[j][x];
    }
    for (std::size_t x = 0; x < n; ++x) b.u[k][x] = std::polar(1.0, 2.0 * std::numbers::pi * b.g[k][x]);
    b.lip_g.push_back(lipschitz_seminorm(std::span<const double>(b.g[k]), space));
  }
  b.gram = CMatrix(r, r);
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t l = 0; l < r; ++l) {
      Complex s = 0.0;
      for (std::size_t i = 0; i < r; ++i) s += std::conj(b.u[l][b.E[i]]) * b.u[k][b.E[i]];
      b.gram(k, l) = s / static_cast<double>(r);
    }
  b.orthonormality_defect = b.gram.max_abs_diff(CMatrix::identity(r));
  return b;
}

}  // namespace qmetric::metric
