#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qmetric/errors.hpp"
#include "qmetric/nctorus.hpp"

using namespace qmetric;
using namespace qmetric::nctorus;
using linalg::CMatrix;
using linalg::Complex;
namespace bq = boost::math::quadrature;

namespace {

TwistedPolynomial random_poly(const PhaseMatrix& phase, int support, int range, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ex(-range, range);
  std::normal_distribution<double> g;
  TwistedPolynomial a(phase);
  for (int s = 0; s < support; ++s) {
    Exponent k(phase.p());
    for (int& x : k) x = ex(rng);
    a.add_term(k, {g(rng), g(rng)});
  }
  return a;
}

bool same(const TwistedPolynomial& a, const TwistedPolynomial& b, double tol) {
  return gns_norm(a - b) <= tol;
}

double gk(const std::function<double(double)>& f, double a, double b) {
  return bq::gauss_kronrod<double, 61>::integrate(f, a, b, 6, 1e-11);
}

}  // namespace

TEST_CASE("phase matrix validation") {
  CHECK_THROWS_AS(PhaseMatrix::from_matrix({{0.0, 0.2}, {0.3, 0.0}}), PreconditionError);
  CHECK_THROWS_AS(PhaseMatrix::from_matrix({{0.5, 0.2}, {-0.2, 0.0}}), PreconditionError);
  const auto ph = PhaseMatrix::from_matrix({{0.0, 0.2}, {0.8, 0.0}});
  CHECK(ph.theta(0, 1) == doctest::Approx(0.2));
  CHECK(ph.theta(1, 0) == doctest::Approx(0.8));
  CHECK(*PhaseMatrix::two_torus(0.25).common_denominator(64) == 4);
  CHECK(!PhaseMatrix::two_torus(std::numbers::sqrt2 - 1).common_denominator(64));
}

TEST_CASE("reorder phase: identities and cocycle") {
  const auto ph = PhaseMatrix::from_matrix({{0, 0.1, 0.37}, {-0.1, 0, 0.25}, {-0.37, -0.25, 0}});
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> ex(-4, 4);
  auto rnd = [&] { return Exponent{ex(rng), ex(rng), ex(rng)}; };
  for (int t = 0; t < 100; ++t) {
    const auto k = rnd(), l = rnd(), m = rnd();
    CHECK(std::abs(reorder_phase(k, Exponent(3, 0), ph) - 1.0) < 1e-15);
    CHECK(std::abs(reorder_phase(Exponent(3, 0), l, ph) - 1.0) < 1e-15);
    CHECK(std::abs(std::abs(reorder_phase(k, l, ph)) - 1.0) < 1e-14);
    Exponent kl(3), lm(3);
    for (int i = 0; i < 3; ++i) {
      kl[i] = k[i] + l[i];
      lm[i] = l[i] + m[i];
    }
    CHECK(std::abs(reorder_phase(k, l, ph) * reorder_phase(kl, m, ph) - reorder_phase(l, m, ph) * reorder_phase(k, lm, ph)) <
          1e-12);
  }
}

TEST_CASE("u_2 u_1 = rho_12 u_1 u_2") {
  const auto ph = PhaseMatrix::two_torus(0.3);
  const auto u1 = TwistedPolynomial::generator(ph, 1), u2 = TwistedPolynomial::generator(ph, 2);
  CHECK(same(u2 * u1, ph.rho(0, 1) * (u1 * u2), 1e-15));
  CHECK(same(u1 * u2, TwistedPolynomial::monomial(ph, {1, 1}), 1e-15));
}

TEST_CASE("reorder phase against clock/shift matrices at theta = 1/3") {
  const auto ph = PhaseMatrix::two_torus(1.0 / 3.0);
  const Exponent k{2, 1}, l{1, 2}, kl{3, 3};
  const CMatrix A = rational_representation(TwistedPolynomial::monomial(ph, k));
  const CMatrix B = rational_representation(TwistedPolynomial::monomial(ph, l));
  const CMatrix C = rational_representation(TwistedPolynomial::monomial(ph, kl));
  CHECK((A * B).max_abs_diff(reorder_phase(k, l, ph) * C) < 1e-12);
}

TEST_CASE("twisted products match the matrix representation") {
  std::mt19937_64 rng(3);
  for (const auto& ph : {PhaseMatrix::two_torus(0.25), PhaseMatrix::from_matrix({{0, 0.5, 0.25}, {-0.5, 0, 0.75}, {-0.25, -0.75, 0}})}) {
    for (int t = 0; t < 30; ++t) {
      const auto a = random_poly(ph, 5, 3, rng), b = random_poly(ph, 5, 3, rng);
      CHECK(rational_representation(a * b).max_abs_diff(rational_representation(a) * rational_representation(b)) < 1e-12);
      CHECK(rational_representation(involution(a)).max_abs_diff(rational_representation(a).adjoint()) < 1e-12);
    }
  }
}

TEST_CASE("product is associative and unital; involution is an antilinear anti-automorphism") {
  std::mt19937_64 rng(4);
  const auto ph = PhaseMatrix::two_torus(std::numbers::sqrt2 - 1);
  const auto a = random_poly(ph, 4, 2, rng), b = random_poly(ph, 4, 2, rng), c = random_poly(ph, 4, 2, rng);
  CHECK(same((a * b) * c, a * (b * c), 1e-12));
  CHECK(same(a * TwistedPolynomial::one(ph), a, 1e-15));
  CHECK(same(involution(involution(a)), a, 1e-14));
  CHECK(same(involution(a * b), involution(b) * involution(a), 1e-12));
  CHECK(same(involution(Complex(0, 2) * a), Complex(0, -2) * involution(a), 1e-14));
}

TEST_CASE("trace pairing") {
  const auto ph = PhaseMatrix::two_torus(0.17);
  const auto one = TwistedPolynomial::one(ph);
  CHECK(trace_pairing(one, one) == Complex(1.0));
  const auto m1 = TwistedPolynomial::monomial(ph, {3, -2}), m2 = TwistedPolynomial::monomial(ph, {1, 0});
  CHECK(trace_pairing(m1, m1) == Complex(1.0));
  CHECK(trace_pairing(m1, m2) == Complex(0.0));
  const auto w = TwistedPolynomial::monomial(ph, {1, 1});
  CHECK(same(involution(w) * w, one, 1e-15));
  std::mt19937_64 rng(6);
  const auto a = random_poly(ph, 6, 3, rng), b = random_poly(ph, 6, 3, rng);
  // tau(b^* a) computed through the product.
  CHECK(std::abs(trace_pairing(a, b) - trace(involution(b) * a)) < 1e-12);
  CHECK(trace_pairing(a, a).real() >= 0.0);
}

TEST_CASE("norm dominance: l2 <= representation norm <= l1") {
  // With all exponent differences below N the normalized matrix trace equals tau on a^* a.
  std::mt19937_64 rng(12);
  for (auto [denominator, range] : {std::pair{4, 1}, std::pair{5, 2}, std::pair{7, 3}}) {
    const auto ph = PhaseMatrix::two_torus(1.0 / denominator);
    for (int t = 0; t < 10; ++t) {
      const auto a = random_poly(ph, 6, range, rng);
      const double op = linalg::operator_norm(rational_representation(a));
      CHECK(gns_norm(a) <= op * (1 + 1e-12));
      CHECK(op <= l1_norm(a) * (1 + 1e-12));
    }
  }
}

TEST_CASE("rational representation") {
  const auto ph = PhaseMatrix::two_torus(1.0 / 5.0);
  CHECK(rational_representation(TwistedPolynomial::one(ph)).max_abs_diff(CMatrix::identity(5)) < 1e-15);
  const CMatrix U = rational_representation(TwistedPolynomial::generator(ph, 1));
  const CMatrix V = rational_representation(TwistedPolynomial::generator(ph, 2));
  CHECK((V * U).max_abs_diff(std::polar(1.0, 2 * std::numbers::pi / 5) * (U * V)) < 1e-12);
  // The matrix trace agrees with tau only for exponents inside the window |k| < N.
  const auto ph3 = PhaseMatrix::two_torus(1.0 / 3.0);
  for (int k = 1; k < 3; ++k) {
    const CMatrix m = rational_representation(TwistedPolynomial::monomial(ph3, {k, 0}));
    CHECK(std::abs(m.trace()) < 1e-12);
  }
  CHECK_THROWS_AS(rational_representation(TwistedPolynomial::one(PhaseMatrix::two_torus(std::numbers::sqrt2 - 1))),
                  ResourceLimitError);
}

TEST_CASE("torus Lip-norm bounds") {
  const auto ph = PhaseMatrix::two_torus(0.3);
  const auto b1 = lip_bounds(TwistedPolynomial::one(ph));
  CHECK(b1.lower == 0.0);
  CHECK(b1.upper == 0.0);
  const auto bu = lip_bounds(TwistedPolynomial::generator(ph, 2));
  CHECK(bu.lower == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bu.upper == doctest::Approx(1.0).epsilon(1e-15));
  const auto w = TwistedPolynomial::monomial(ph, {1, 1});
  CHECK(lip_bounds(w).upper == doctest::Approx(std::numbers::sqrt2).epsilon(1e-15));
  // Dense sampling approaches sqrt 2 from below.
  CHECK(lip_lower_sampled(w) <= std::numbers::sqrt2 * (1 + 1e-12));
  CHECK(lip_lower_sampled(w) >= std::numbers::sqrt2 * (1 - 1e-6));
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const auto a = random_poly(ph, 4, 3, rng);
    const auto b = lip_bounds(a);
    CHECK(b.lower <= b.upper);
    // Direct check of the lower bound at a random t.
    const std::vector<double> tt{0.013 * t + 0.001, -0.007 * t};
    CHECK(gns_norm(torus_action(a, tt) - a) / torus_length(tt) <= b.upper * (1 + 1e-12));
  }
}

TEST_CASE("torus action") {
  const auto ph = PhaseMatrix::two_torus(0.1);
  const std::vector<double> t{0.25, 0.1};
  const auto g = torus_action(TwistedPolynomial::generator(ph, 1), t);
  CHECK(std::abs(g.coefficient({1, 0}) - Complex(0.0, 1.0)) < 1e-15);
  CHECK(torus_length(std::vector<double>{0.9, 0.0}) == doctest::Approx(2 * std::numbers::pi * 0.1));
}

TEST_CASE("Cesaro means") {
  const auto ph = PhaseMatrix::two_torus(0.2);
  for (int n : {0, 1, 5}) CHECK(same(cesaro_mean(TwistedPolynomial::one(ph), n), TwistedPolynomial::one(ph), 0.0));
  const PhaseMatrix p1(1);
  CHECK(same(cesaro_mean(TwistedPolynomial::generator(p1, 1), 1), 0.5 * TwistedPolynomial::generator(p1, 1), 1e-15));
  std::mt19937_64 rng(2);
  const auto a = random_poly(ph, 12, 4, rng);
  for (int n = 0; n <= 4; ++n) {
    // Average of the partial sums s_(n1, n2) over {0..n}^2.
    TwistedPolynomial avg(ph);
    for (int n1 = 0; n1 <= n; ++n1)
      for (int n2 = 0; n2 <= n; ++n2) {
        const std::vector<int> orders{n1, n2};
        avg = avg + partial_fourier_sum(a, orders);
      }
    avg = (1.0 / ((n + 1.0) * (n + 1.0))) * avg;
    CHECK(same(avg, cesaro_mean(a, n), 1e-12));
    CHECK(gns_norm(cesaro_mean(a, n)) <= gns_norm(a));
    CHECK(l1_norm(cesaro_mean(a, n)) <= l1_norm(a));
  }
}

TEST_CASE("Fejer kernel") {
  for (int n : {0, 1, 7, 64}) {
    CHECK(fejer_eval(n, 0.0) == doctest::Approx(n + 1.0));
    CHECK(fejer_series(n, 0.0) == doctest::Approx(n + 1.0));
    for (double t = -0.5; t < 0.5; t += 0.0137) {
      CHECK(std::abs(fejer_eval(n, t) - fejer_series(n, t)) < 1e-10);
      CHECK(fejer_eval(n, t) >= 0.0);
      if (t != 0.0) CHECK(fejer_eval(n, t) <= std::min(n + 1.0, 1.0 / (4.0 * (n + 1.0) * t * t)) * (1 + 1e-12));
    }
  }
  for (int n : {16, 256}) {
    // Split at the zeros of the kernel; t = 0 is among the cuts.
    double integral = 0.0, moment = 0.0;
    std::vector<double> cuts{-0.5};
    for (int k = -n; k <= n; ++k)
      if (std::abs(k / (n + 1.0)) < 0.5) cuts.push_back(k / (n + 1.0));
    cuts.push_back(0.5);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i], b = cuts[i + 1];
      integral += gk([n](double t) { return fejer_eval(n, t); }, a, b);
      moment += gk([n](double t) { return std::abs(t) * fejer_eval(n, t); }, a, b);
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(fejer_abs_moment(n) == doctest::Approx(moment).epsilon(1e-8));
  }
}

TEST_CASE("Fejer telescoping in the commutative two-torus") {
  // a - sigma_n a = int K(t)(a - g_(t e1) a) dt + int int K(s)K(t) g_(s e1)(a - g_(t e2) a) ds dt
  const PhaseMatrix ph(2);
  std::mt19937_64 rng(5);
  const auto a = random_poly(ph, 8, 3, rng);
  const int n = 4;
  const auto lhs = a - cesaro_mean(a, n);
  auto eval = [](const TwistedPolynomial& f, double x, double y) {
    Complex s = 0.0;
    for (const auto& [k, c] : f.terms()) s += c * std::polar(1.0, 2 * std::numbers::pi * (k[0] * x + k[1] * y));
    return s;
  };
  for (const auto& [x, y] : {std::pair{0.1, 0.7}, std::pair{0.33, -0.2}}) {
    auto first = [&](bool imag) {
      return gk([&](double t) {
        const Complex d = eval(a, x, y) - eval(a, x + t, y);
        return fejer_eval(n, t) * (imag ? d.imag() : d.real());
      }, -0.5, 0.5);
    };
    auto second = [&](bool imag) {
      return gk([&](double s) {
        return fejer_eval(n, s) * gk([&](double t) {
          const Complex d = eval(a, x + s, y) - eval(a, x + s, y + t);
          return fejer_eval(n, t) * (imag ? d.imag() : d.real());
        }, -0.5, 0.5);
      }, -0.5, 0.5);
    };
    const Complex rhs(first(false) + second(false), first(true) + second(true));
    CHECK(std::abs(eval(lhs, x, y) - rhs) < 1e-6);
  }
}

TEST_CASE("toral maps") {
  const auto ph = PhaseMatrix::two_torus(0.25);
  std::mt19937_64 rng(8);
  const auto a = random_poly(ph, 5, 2, rng), b = random_poly(ph, 5, 2, rng);
  SUBCASE("identity with t = 0") {
    const ToralMap id{{{1, 0}, {0, 1}}, {0.0, 0.0}};
    CHECK(same(toral_map_apply(id, a), a, 0.0));
  }
  SUBCASE("pure rotation") {
    const ToralMap rot{{{1, 0}, {0, 1}}, {0.1, 0.3}};
    const auto g = toral_map_apply(rot, TwistedPolynomial::generator(ph, 2));
    CHECK(std::abs(g.coefficient({0, 1}) - std::polar(1.0, 2 * std::numbers::pi * 0.3)) < 1e-15);
  }
  SUBCASE("cat map is a trace-preserving *-automorphism matching the matrix oracle") {
    const ToralMap cat{{{2, 1}, {1, 1}}, {0.2, 0.05}};
    CHECK(cat.preserves(ph));
    CHECK(same(toral_map_apply(cat, a * b), toral_map_apply(cat, a) * toral_map_apply(cat, b), 1e-12));
    CHECK(same(toral_map_apply(cat, involution(a)), involution(toral_map_apply(cat, a)), 1e-12));
    CHECK(std::abs(trace(toral_map_apply(cat, a)) - trace(a)) < 1e-15);
    const ToralMap cat0{{{2, 1}, {1, 1}}, {0.0, 0.0}};
    const auto u1 = TwistedPolynomial::generator(ph, 1), u2 = TwistedPolynomial::generator(ph, 2);
    const CMatrix lhs = rational_representation(toral_map_apply(cat0, u1)) * rational_representation(toral_map_apply(cat0, u2));
    const CMatrix rhs = rational_representation(toral_map_apply(cat0, u1 * u2));
    // alpha(u1) alpha(u2) = alpha(u1 u2): the normal-ordering phase is absorbed consistently.
    CHECK(lhs.max_abs_diff(rhs) < 1e-12);
    for (const auto& [k, c] : a.terms()) {
      const auto img = toral_map_monomial(cat0, ph, k).first;
      CHECK(img == Exponent{2 * k[0] + k[1], k[0] + k[1]});
    }
  }
  SUBCASE("preconditions") {
    const ToralMap bad{{{2, 0}, {0, 1}}, {0.0, 0.0}};
    CHECK_THROWS_AS(toral_map_apply(bad, a), PreconditionError);
    const ToralMap swap{{{0, 1}, {1, 0}}, {0.0, 0.0}};
    // det -1 flips theta, so it only preserves theta = 1/2-type phases.
    CHECK_THROWS_AS(toral_map_apply(swap, a), PreconditionError);
    CHECK(integer_determinant({{2, 1, 0}, {1, 1, 0}, {0, 0, -1}}) == -1);
  }
}
