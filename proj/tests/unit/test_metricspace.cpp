#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qmetric/errors.hpp"
#include "qmetric/experiments.hpp"
#include "qmetric/metricspace.hpp"

using namespace qmetric;
using namespace qmetric::metric;

namespace {

std::vector<std::vector<double>> line(std::initializer_list<double> xs) {
  std::vector<std::vector<double>> pts;
  for (double x : xs) pts.push_back({x});
  return pts;
}

std::vector<std::vector<double>> random_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& p : pts)
    for (double& x : p) x = u(rng);
  return pts;
}

// Brute force over all subsets.
struct Oracle {
  std::size_t sep = 0, spn = 0;
};

Oracle subset_oracle(const FiniteMetricSpace& s, double delta) {
  const std::size_t n = s.size();
  Oracle o;
  o.spn = n;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const auto card = static_cast<std::size_t>(std::popcount(mask));
    bool separated = true, spanning = true;
    for (std::size_t i = 0; i < n && separated; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if ((mask >> i & 1) && (mask >> j & 1) && !(s(i, j) > delta)) {
          separated = false;
          break;
        }
    for (std::size_t x = 0; x < n && spanning; ++x) {
      bool hit = false;
      for (std::size_t c = 0; c < n; ++c)
        if ((mask >> c & 1) && s(x, c) <= delta) hit = true;
      spanning = hit;
    }
    if (separated) o.sep = std::max(o.sep, card);
    if (spanning) o.spn = std::min(o.spn, card);
  }
  return o;
}

}  // namespace

TEST_CASE("metric space construction") {
  CHECK_THROWS_AS(FiniteMetricSpace::from_matrix({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}), PreconditionError);
  CHECK_THROWS_AS(FiniteMetricSpace::from_matrix({{0, 1}, {2, 0}}), PreconditionError);
  CHECK_THROWS_AS(FiniteMetricSpace::from_matrix({{0, 0}, {0, 0}}), PreconditionError);
  CHECK_THROWS_AS(FiniteMetricSpace::from_points(line({0.0, 0.0})), PreconditionError);
  const auto s = FiniteMetricSpace::from_points({{0, 0}, {3, 4}});
  CHECK(s(0, 1) == doctest::Approx(5.0));
  CHECK(s.diameter() == doctest::Approx(5.0));
  std::istringstream in("# header\n0,1\n\n2.5,3\n");
  const auto rows = read_csv_rows(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == 2.5);
}

TEST_CASE("net statistics examples") {
  const auto l = FiniteMetricSpace::from_points(line({0, .25, .5, .75, 1}));
  const auto big = net_statistics(l, 2.0);
  CHECK(big.sep == 1);
  CHECK(big.spn == 1);
  CHECK(big.cover == 1);
  const auto st = net_statistics(l, 0.3);
  CHECK(st.sep == 3);
  CHECK(st.sep_exact);
  CHECK(subset_oracle(l, 0.3).sep == 3);

  std::vector<std::vector<double>> grid;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) grid.push_back({i / 3.0, j / 3.0});
  const auto g = FiniteMetricSpace::from_points(grid);
  const auto gs = net_statistics(g, 0.26);
  CHECK(gs.sep_greedy <= gs.sep);
  CHECK(gs.sep_exact);
  CHECK(gs.sep == subset_oracle(g, 0.26).sep);
  CHECK_THROWS_AS(net_statistics(g, 0.0), PreconditionError);
}

TEST_CASE("exact nets against exhaustive subsets") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto s = FiniteMetricSpace::from_points(random_points(11, 2, seed));
    for (double delta : {0.1, 0.2, 0.35, 0.6}) {
      const auto o = subset_oracle(s, delta);
      const auto st = net_statistics(s, delta);
      CHECK(st.sep == o.sep);
      CHECK(st.spn == o.spn);
      CHECK(st.cover == o.spn);
      CHECK(st.cover <= st.spn);
      CHECK(st.spn <= st.sep);
      CHECK(st.sep_greedy <= st.sep);
      CHECK(st.spn_greedy >= st.spn);
      CHECK(st.cover_greedy >= st.cover);
    }
  }
}

TEST_CASE("greedy sets are separated and spanning") {
  const auto s = FiniteMetricSpace::from_points(random_points(200, 2, 9));
  for (double delta : {0.05, 0.1, 0.3}) {
    const auto e = greedy_separated(s, delta);
    CHECK(e.front() == 0);
    for (std::size_t i = 0; i < e.size(); ++i)
      for (std::size_t j = i + 1; j < e.size(); ++j) CHECK(s(e[i], e[j]) > delta);
    const auto sp = greedy_spanning(s, delta);
    for (std::size_t x = 0; x < s.size(); ++x) {
      double best = 1e9;
      for (auto c : sp) best = std::min(best, s(x, c));
      CHECK(best <= delta);
    }
    // A maximal separated set also spans.
    for (std::size_t x = 0; x < s.size(); ++x) {
      double best = 1e9;
      for (auto c : e) best = std::min(best, s(x, c));
      CHECK(best <= delta);
    }
  }
}

TEST_CASE("net counts are nonincreasing in delta") {
  const auto s = FiniteMetricSpace::from_points(random_points(300, 2, 4));
  NetStatistics prev = net_statistics(s, 0.02);
  for (double delta = 0.03; delta < 1.5; delta *= 1.3) {
    const auto cur = net_statistics(s, delta);
    CHECK(cur.sep <= prev.sep);
    CHECK(cur.spn_greedy <= s.size());
    prev = cur;
  }
  const auto small = FiniteMetricSpace::from_points(random_points(14, 2, 4));
  NetStatistics p = net_statistics(small, 0.05);
  for (double delta = 0.07; delta < 1.5; delta *= 1.2) {
    const auto c = net_statistics(small, delta);
    CHECK(c.sep <= p.sep);
    CHECK(c.spn <= p.spn);
    CHECK(c.cover <= p.cover);
    p = c;
  }
}

TEST_CASE("box dimension") {
  const auto single = FiniteMetricSpace::from_points({{0.3, 0.3}});
  const std::vector<double> grid{0.5, 0.25, 0.125};
  const auto b0 = box_dimension(single, grid);
  CHECK(b0.slope_sep == 0.0);
  CHECK(b0.slope_spn == 0.0);
  CHECK(b0.slope_cover == 0.0);

  std::vector<std::vector<double>> seg;
  for (int i = 0; i < 1024; ++i) seg.push_back({i / 1023.0});
  std::vector<double> deltas;
  for (int k = 2; k <= 7; ++k) deltas.push_back(std::ldexp(1.0, -k));
  const auto b1 = box_dimension(FiniteMetricSpace::from_points(seg), deltas);
  CHECK(b1.slope_sep >= 0.9);
  CHECK(b1.slope_sep <= 1.05);
  CHECK(b1.stats.size() == deltas.size());
  CHECK(b1.slope(NetEstimator::Spanning) == b1.slope_spn);

  CHECK_THROWS_AS(box_dimension(single, std::vector<double>{0.5, 0.25}), PreconditionError);
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  CHECK(regression_slope(x, y) == doctest::Approx(2.0));
}

TEST_CASE("Lipschitz seminorm") {
  const auto s = FiniteMetricSpace::from_points(random_points(40, 2, 5));
  const std::vector<double> c(40, 2.5);
  CHECK(lipschitz_seminorm(std::span<const double>(c), s) == 0.0);
  for (std::size_t x0 : {0u, 17u}) {
    std::vector<double> d(40);
    for (std::size_t i = 0; i < 40; ++i) d[i] = s(i, x0);
    CHECK(lipschitz_seminorm(std::span<const double>(d), s) == doctest::Approx(1.0));
  }
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> f(40), h(40), j(40), prod(40);
    for (std::size_t i = 0; i < 40; ++i) {
      f[i] = g(rng);
      h[i] = g(rng);
      j[i] = std::max(f[i], h[i]);
      prod[i] = f[i] * h[i];
    }
    const double lf = lipschitz_seminorm(std::span<const double>(f), s);
    const double lh = lipschitz_seminorm(std::span<const double>(h), s);
    CHECK(lipschitz_seminorm(std::span<const double>(j), s) <= std::max(lf, lh) * (1 + 1e-12));
    double nf = 0, nh = 0;
    for (std::size_t i = 0; i < 40; ++i) {
      nf = std::max(nf, std::abs(f[i]));
      nh = std::max(nh, std::abs(h[i]));
    }
    CHECK(lipschitz_seminorm(std::span<const double>(prod), s) <= (lf * nh + nf * lh) * (1 + 1e-12));
  }
  std::vector<linalg::Complex> z(40);
  for (std::size_t i = 0; i < 40; ++i) z[i] = std::polar(1.0, s(i, 0));
  CHECK(lipschitz_seminorm(std::span<const linalg::Complex>(z), s) <= 1.0 + 1e-12);
}

TEST_CASE("unitaries built from a separated set") {
  SUBCASE("single point") {
    const auto b = kolm_unitaries(FiniteMetricSpace::from_points(line({0.0, 0.01})), 0.5);
    CHECK(b.r() == 1);
    CHECK(b.gram(0, 0) == linalg::Complex(1.0));
  }
  SUBCASE("points on a line give the DFT characters") {
    const std::size_t r = 7;
    std::vector<std::vector<double>> pts;
    for (std::size_t i = 0; i < r; ++i) pts.push_back({static_cast<double>(i)});
    const auto b = kolm_unitaries(FiniteMetricSpace::from_points(pts), 0.5);
    REQUIRE(b.r() == r);
    for (std::size_t k = 0; k < r; ++k)
      for (std::size_t j = 0; j < r; ++j)
        CHECK(std::abs(b.u[k][b.E[j]] - std::polar(1.0, 2 * std::numbers::pi * double(j * k) / r)) < 1e-12);
    CHECK(b.orthonormality_defect < 1e-12);
    CHECK(b.lip_u_factor == doctest::Approx(2 * std::numbers::pi * std::exp(2 * std::numbers::pi)));
  }
  SUBCASE("64 random points in the square") {
    const double delta = 0.1;
    const auto b = kolm_unitaries(FiniteMetricSpace::from_points(experiments::generate_points("random:64:3")), delta);
    CHECK(b.orthonormality_defect < 1e-10);
    for (double l : b.lip_f) CHECK(l <= (1 + 1e-9) / delta);
    for (double l : b.lip_g) CHECK(l <= (1 + 1e-9) / delta);
    // Independent Gram evaluation.
    for (std::size_t k = 0; k < b.r(); ++k)
      for (std::size_t l = 0; l < b.r(); ++l) {
        linalg::Complex s = 0.0;
        for (auto e : b.E) s += std::conj(b.u[l][e]) * b.u[k][e];
        CHECK(std::abs(s / double(b.r()) - (k == l ? 1.0 : 0.0)) < 1e-10);
      }
  }
}
