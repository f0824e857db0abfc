#include <cmath>
#include <random>

#include "doctest.h"
#include "qmetric/errors.hpp"
#include "qmetric/weyl.hpp"

using namespace qmetric;
using namespace qmetric::weyl;
using linalg::CMatrix;
using linalg::Complex;

namespace {

CMatrix mpow(const CMatrix& m, int k) {
  CMatrix out = CMatrix::identity(m.rows());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

double normalized_trace_re(const CMatrix& m) { return (m.trace() / static_cast<double>(m.rows())).real(); }

WeylElement random_element(const WeylWindow& w, std::mt19937_64& rng) {
  return WeylElement(w, linalg::random_gaussian(w.dim(), w.dim(), rng));
}

// Group enumeration over the full window with the matrix action Ad(v^r u^-s).
double brute_force_lip(const WeylElement& a, double lambda) {
  const auto& w = a.window();
  const auto cs = clock_shift(w.p);
  const std::size_t pp = static_cast<std::size_t>(w.p) * w.p;
  std::size_t total = 1;
  for (int k = 0; k < w.length(); ++k) total *= pp;
  double best = 0.0;
  for (std::size_t code = 1; code < total; ++code) {
    GroupElement g{w.p, w.lo, {}};
    CMatrix W = CMatrix::identity(1);
    std::size_t c = code;
    std::vector<SiteExponent> shifts(w.length());
    for (int k = w.length() - 1; k >= 0; --k) {
      shifts[k] = {static_cast<int>((c % pp) / w.p), static_cast<int>(c % w.p)};
      c /= pp;
    }
    for (int k = 0; k < w.length(); ++k) {
      const auto [r, s] = shifts[k];
      W = linalg::kron(W, mpow(cs.v, r) * mpow(cs.u.adjoint(), s));
    }
    g.shifts = shifts;
    const CMatrix moved = W * a.matrix() * W.adjoint();
    best = std::max(best, linalg::operator_norm(moved - a.matrix()) / group_length(g, lambda));
  }
  return best;
}

}  // namespace

TEST_CASE("clock and shift satisfy vu = rho uv") {
  for (int p : {2, 3, 5}) {
    const auto cs = clock_shift(p);
    CHECK((cs.v * cs.u).max_abs_diff(root_of_unity(p) * (cs.u * cs.v)) < 1e-12);
    CHECK(mpow(cs.u, p).max_abs_diff(CMatrix::identity(p)) < 1e-12);
    CHECK(mpow(cs.v, p).max_abs_diff(CMatrix::identity(p)) < 1e-12);
  }
}

TEST_CASE("Weyl monomials are trace-orthonormal") {
  for (int p : {2, 3}) {
    const WeylWindow w{p, 0, 1};
    const std::size_t m = static_cast<std::size_t>(std::pow(p, 4));
    const WeylCoefficients probe(w, std::vector<Complex>(m));
    std::vector<WeylElement> monos;
    for (std::size_t i = 0; i < m; ++i) monos.push_back(weyl_monomial(w, probe.exponents_of(i)));
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const Complex t = (monos[i].matrix().adjoint() * monos[j].matrix()).trace() / static_cast<double>(w.dim());
        worst = std::max(worst, std::abs(t - Complex(i == j ? 1.0 : 0.0)));
      }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("coefficients equal normalized traces and reconstruct the element") {
  std::mt19937_64 rng(5);
  for (int p : {2, 3}) {
    const WeylWindow w{p, -1, 0};
    const auto a = random_element(w, rng);
    const auto& c = a.coefficients();
    for (std::size_t idx = 0; idx < c.size(); idx += 3) {
      const auto m = weyl_monomial(w, c.exponents_of(idx));
      const Complex oracle = (m.matrix().adjoint() * a.matrix()).trace() / static_cast<double>(w.dim());
      CHECK(std::abs(c.values()[idx] - oracle) < 1e-12);
    }
    CHECK(c.squared_norm() == doctest::Approx(normalized_trace_re(a.matrix().adjoint() * a.matrix())).epsilon(1e-12));
    CHECK(WeylElement::from_coefficients(c).matrix().max_abs_diff(a.matrix()) < 1e-12);
  }
}

TEST_CASE("Weyl action equals conjugation by v^r u^-s") {
  std::mt19937_64 rng(9);
  const WeylWindow w{3, 2, 3};
  const auto a = random_element(w, rng);
  const auto cs = clock_shift(3);
  const GroupElement g{3, 2, {{1, 2}, {2, 0}}};
  CMatrix W = linalg::kron(mpow(cs.v, 1) * mpow(cs.u.adjoint(), 2), mpow(cs.v, 2));
  CHECK(weyl_action(g, a).matrix().max_abs_diff(W * a.matrix() * W.adjoint()) < 1e-12);
}

TEST_CASE("site and group lengths") {
  CHECK(site_length(2, 1, 0) == doctest::Approx(0.5));
  CHECK(site_length(2, 1, 1) == doctest::Approx(std::sqrt(0.5)));
  CHECK(site_length(5, 4, 0) == doctest::Approx(0.2));
  const GroupElement g{2, -1, {{1, 0}, {0, 0}, {0, 1}}};
  CHECK(group_length(g, 0.5) == doctest::Approx(0.5 * 0.5 + 0.5 * 0.5));
  CHECK_THROWS_AS(group_length(g, 1.0), PreconditionError);
}

TEST_CASE("Lip-norm: exhaustive group enumeration oracle") {
  std::mt19937_64 rng(2);
  SUBCASE("single-site clock, p = 2, lambda = 1/2") {
    const WeylWindow w{2, 0, 0};
    const std::vector<SiteExponent> ex{{1, 0}};
    CHECK(weyl_lip_norm(weyl_monomial(w, ex), 0.5) == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("monomial at site k scales like lambda^-|k|") {
    const WeylWindow w{2, -2, 2};
    for (int k = -2; k <= 2; ++k) {
      std::vector<SiteExponent> ex(5, {0, 0});
      ex[k + 2] = {0, 1};
      CHECK(weyl_lip_norm(weyl_monomial(w, ex), 0.5) ==
            doctest::Approx(4.0 * std::pow(2.0, std::abs(k))).epsilon(1e-12));
    }
  }
  SUBCASE("random elements, p = 2 on two sites and p = 3 on one site") {
    for (const WeylWindow w : {WeylWindow{2, 0, 1}, WeylWindow{3, -1, -1}, WeylWindow{2, -1, 0}}) {
      const auto a = random_element(w, rng);
      CHECK(weyl_lip_norm(a, 0.5) == doctest::Approx(brute_force_lip(a, 0.5)).epsilon(1e-10));
    }
  }
  SUBCASE("inactive sites are dropped without changing the value") {
    const WeylWindow w{2, 0, 2};
    const auto small = random_element(WeylWindow{2, 0, 0}, rng);
    // small (x) 1 (x) 1 on three sites.
    const WeylElement a(w, linalg::kron(small.matrix(), CMatrix::identity(4)));
    CHECK(weyl_lip_norm(a, 0.5) == doctest::Approx(brute_force_lip(a, 0.5)).epsilon(1e-10));
  }
  SUBCASE("scalars have zero Lip-norm") { CHECK(weyl_lip_norm(WeylElement::identity({2, 0, 1}), 0.5) == 0.0); }
  SUBCASE("group cap") {
    Caps caps;
    caps.group_elements = 8;
    CHECK_THROWS_AS(weyl_lip_norm(random_element({2, 0, 1}, rng), 0.5, caps), ResourceLimitError);
  }
}

TEST_CASE("conditional expectation") {
  std::mt19937_64 rng(4);
  const WeylWindow w{2, -2, 2};
  const auto a = random_element(w, rng);
  const auto e = conditional_expectation(a, 1);
  CHECK(conditional_expectation(e, 1).matrix().max_abs_diff(e.matrix()) < 1e-12);
  CHECK(conditional_expectation(a, 2).matrix().max_abs_diff(a.matrix()) < 1e-12);
  // E_n is the average of the Weyl action over the outer sites.
  CMatrix avg(w.dim(), w.dim());
  int count = 0;
  for (int a0 = 0; a0 < 4; ++a0)
    for (int a4 = 0; a4 < 4; ++a4) {
      const GroupElement g{2, -2, {{a0 / 2, a0 % 2}, {0, 0}, {0, 0}, {0, 0}, {a4 / 2, a4 % 2}}};
      avg += weyl_action(g, a).matrix();
      ++count;
    }
  CHECK((1.0 / count * avg).max_abs_diff(e.matrix()) < 1e-12);
}

TEST_CASE("symbolic Weyl words match matrix products") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> ex(0, 2), site(0, 2);
  const WeylWindow w{3, 0, 3};
  for (int t = 0; t < 50; ++t) {
    WeylWord a{3, {}, 1.0}, b{3, {}, Complex(0.0, 1.0)};
    for (int k = 0; k < 2; ++k) {
      a.sites[site(rng)] = {ex(rng), ex(rng)};
      b.sites[site(rng)] = {ex(rng), ex(rng)};
    }
    const auto ab = multiply(a, b);
    CHECK((to_element(a, w) * to_element(b, w)).matrix().max_abs_diff(to_element(ab, w).matrix()) < 1e-12);
    const auto shifted = shift(a, 1);
    for (const auto& [s, e] : a.sites) CHECK(shifted.sites.at(s + 1) == e);
  }
}

TEST_CASE("preconditions") {
  CHECK_THROWS_AS(WeylWindow({1, 0, 0}).validate(), PreconditionError);
  CHECK_THROWS_AS(WeylWindow({2, 1, 0}).validate(), PreconditionError);
  Caps caps;
  caps.matrix_dim = 8;
  CHECK_THROWS_AS(WeylWindow({2, 0, 3}).validate(caps), ResourceLimitError);
  CHECK_THROWS_AS(WeylElement({2, 0, 0}, CMatrix(3, 3)), PreconditionError);
}

TEST_CASE("shift Lipschitz number is 1 / lambda") {
  for (double lambda : {0.3, 0.5, 0.8})
    for (int by : {1, -1})
      for (int n : {1, 2}) CHECK(weyl::shift_lipschitz_number(2, lambda, by, n) == doctest::Approx(1.0 / lambda));
  CHECK(weyl::shift_lipschitz_number(3, 0.5, 1, 1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(weyl::shift_lipschitz_number(2, 0.5, 2, 1), PreconditionError);
}
