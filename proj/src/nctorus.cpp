#include "qmetric/nctorus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qmetric/errors.hpp"

namespace qmetric::nctorus {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0 - 1e-15) f = 0.0;
  return f;
}

// exp(2 pi i x), exact at multiples of a quarter turn.
Complex turns(double x) {
  const double f = frac(x);
  if (f == 0.0) return 1.0;
  if (f == 0.5) return -1.0;
  if (f == 0.25) return {0.0, 1.0};
  if (f == 0.75) return {0.0, -1.0};
  return {std::cos(kTwoPi * f), std::sin(kTwoPi * f)};
}

double near_int_gap(double x) { return std::abs(x - std::round(x)); }

void require_same_phase(const TwistedPolynomial& a, const TwistedPolynomial& b, const char* op) {
  if (!(a.phase() == b.phase())) throw PreconditionError(std::string(op) + ": phase matrices differ");
}

double exponent_norm(const Exponent& k) {
  double s = 0.0;
  for (int x : k) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

Exponent add(const Exponent& a, const Exponent& b) {
  Exponent out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Exponent negate(const Exponent& a) {
  Exponent out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
  return out;
}

// Symbolic product of scaled ordered monomials.
std::pair<Exponent, Complex> mono_mul(const std::pair<Exponent, Complex>& a, const std::pair<Exponent, Complex>& b,
                                      const PhaseMatrix& phase) {
  return {add(a.first, b.first), a.second * b.second * reorder_phase(a.first, b.first, phase)};
}

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

PhaseMatrix::PhaseMatrix(int p) : p_(p) {
  QMETRIC_REQUIRE(p >= 1, "PhaseMatrix: p must be >= 1");
  upper_.assign(static_cast<std::size_t>(p) * (p - 1) / 2, 0.0);
}

PhaseMatrix PhaseMatrix::from_matrix(const std::vector<std::vector<double>>& theta) {
  const int p = static_cast<int>(theta.size());
  PhaseMatrix out(p);
  for (const auto& row : theta) QMETRIC_REQUIRE(static_cast<int>(row.size()) == p, "PhaseMatrix: theta must be square");
  std::size_t idx = 0;
  for (int i = 0; i < p; ++i) {
    QMETRIC_REQUIRE(std::isfinite(theta[i][i]) && near_int_gap(theta[i][i]) < 1e-12,
                    "PhaseMatrix: diagonal must vanish mod 1");
    for (int j = i + 1; j < p; ++j) {
      QMETRIC_REQUIRE(std::isfinite(theta[i][j]) && std::isfinite(theta[j][i]), "PhaseMatrix: non-finite entry");
      QMETRIC_REQUIRE(near_int_gap(theta[i][j] + theta[j][i]) < 1e-12, "PhaseMatrix: theta must be antisymmetric mod 1");
      out.upper_[idx++] = frac(theta[i][j]);
    }
  }
  return out;
}

PhaseMatrix PhaseMatrix::two_torus(double theta12) { return from_matrix({{0.0, theta12}, {-theta12, 0.0}}); }

double PhaseMatrix::theta(int i, int j) const {
  QMETRIC_REQUIRE(i >= 0 && j >= 0 && i < p_ && j < p_, "PhaseMatrix: index out of range");
  if (i == j) return 0.0;
  if (i > j) return frac(-theta(j, i));
  // Offset of row i in the packed strict upper triangle.
  const std::size_t row = static_cast<std::size_t>(i) * (2 * p_ - i - 1) / 2;
  return upper_[row + (j - i - 1)];
}

Complex PhaseMatrix::rho(int i, int j) const { return turns(theta(i, j)); }

std::vector<std::vector<double>> PhaseMatrix::matrix() const {
  std::vector<std::vector<double>> out(p_, std::vector<double>(p_, 0.0));
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < p_; ++j) out[i][j] = theta(i, j);
  return out;
}

std::optional<int> PhaseMatrix::common_denominator(int max_denominator) const {
  for (int n = 1; n <= max_denominator; ++n) {
    if (std::all_of(upper_.begin(), upper_.end(), [n](double t) { return near_int_gap(t * n) < 1e-9; })) return n;
  }
  return std::nullopt;
}

Complex reorder_phase(const Exponent& k, const Exponent& l, const PhaseMatrix& phase) {
  const int p = phase.p();
  QMETRIC_REQUIRE(static_cast<int>(k.size()) == p && static_cast<int>(l.size()) == p,
                  "reorder_phase: exponent length must equal p");
  double acc = 0.0;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      const long long e = static_cast<long long>(k[j]) * l[i];
      if (e != 0) acc += frac(phase.theta(i, j) * static_cast<double>(e));
    }
  return turns(acc);
}

TwistedPolynomial::TwistedPolynomial(PhaseMatrix phase) : phase_(std::move(phase)) {}

TwistedPolynomial::TwistedPolynomial(PhaseMatrix phase, const Terms& terms) : phase_(std::move(phase)) {
  for (const auto& [k, c] : terms) add_term(k, c);
}

TwistedPolynomial TwistedPolynomial::one(const PhaseMatrix& phase) {
  return monomial(phase, Exponent(phase.p(), 0));
}

TwistedPolynomial TwistedPolynomial::monomial(const PhaseMatrix& phase, const Exponent& k, Complex c) {
  TwistedPolynomial out(phase);
  out.add_term(k, c);
  return out;
}

TwistedPolynomial TwistedPolynomial::generator(const PhaseMatrix& phase, int j) {
  QMETRIC_REQUIRE(j >= 1 && j <= phase.p(), "generator: index must lie in [1, p]");
  Exponent k(phase.p(), 0);
  k[j - 1] = 1;
  return monomial(phase, k);
}

Complex TwistedPolynomial::coefficient(const Exponent& k) const {
  const auto it = terms_.find(k);
  return it == terms_.end() ? Complex{} : it->second;
}

void TwistedPolynomial::add_term(const Exponent& k, Complex c) {
  QMETRIC_REQUIRE(static_cast<int>(k.size()) == phase_.p(), "add_term: exponent length must equal p");
  QMETRIC_REQUIRE(std::isfinite(c.real()) && std::isfinite(c.imag()), "add_term: non-finite coefficient");
  auto [it, inserted] = terms_.try_emplace(k, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < kPruneThreshold) terms_.erase(it);
}

TwistedPolynomial operator+(const TwistedPolynomial& a, const TwistedPolynomial& b) {
  require_same_phase(a, b, "sum");
  TwistedPolynomial out = a;
  for (const auto& [k, c] : b.terms_) out.add_term(k, c);
  return out;
}

TwistedPolynomial operator-(const TwistedPolynomial& a, const TwistedPolynomial& b) {
  require_same_phase(a, b, "difference");
  TwistedPolynomial out = a;
  for (const auto& [k, c] : b.terms_) out.add_term(k, -c);
  return out;
}

TwistedPolynomial operator*(Complex s, const TwistedPolynomial& a) {
  TwistedPolynomial out(a.phase_);
  for (const auto& [k, c] : a.terms_) out.add_term(k, s * c);
  return out;
}

TwistedPolynomial operator*(const TwistedPolynomial& a, const TwistedPolynomial& b) { return twisted_product(a, b); }

TwistedPolynomial twisted_product(const TwistedPolynomial& a, const TwistedPolynomial& b) {
  require_same_phase(a, b, "twisted_product");
  TwistedPolynomial out(a.phase());
  for (const auto& [k, ck] : a.terms())
    for (const auto& [l, cl] : b.terms()) out.add_term(add(k, l), ck * cl * reorder_phase(k, l, a.phase()));
  return out;
}

TwistedPolynomial involution(const TwistedPolynomial& a) {
  // (u^k)^* = (u^k)^{-1} = conj(reorder_phase(k, -k)) u^{-k}
  TwistedPolynomial out(a.phase());
  for (const auto& [k, c] : a.terms()) {
    const Exponent minus = negate(k);
    out.add_term(minus, std::conj(c) * std::conj(reorder_phase(k, minus, a.phase())));
  }
  return out;
}

Complex trace_pairing(const TwistedPolynomial& a, const TwistedPolynomial& b) {
  require_same_phase(a, b, "trace_pairing");
  Complex s = 0.0;
  for (const auto& [k, c] : a.terms()) s += c * std::conj(b.coefficient(k));
  return s;
}

Complex trace(const TwistedPolynomial& a) { return a.coefficient(Exponent(a.phase().p(), 0)); }

double gns_norm(const TwistedPolynomial& a) {
  double s = 0.0;
  for (const auto& [k, c] : a.terms()) s += std::norm(c);
  return std::sqrt(s);
}

double l1_norm(const TwistedPolynomial& a) {
  double s = 0.0;
  for (const auto& [k, c] : a.terms()) s += std::abs(c);
  return s;
}

TwistedPolynomial torus_action(const TwistedPolynomial& a, std::span<const double> t) {
  QMETRIC_REQUIRE(static_cast<int>(t.size()) == a.phase().p(), "torus_action: t must have length p");
  TwistedPolynomial out(a.phase());
  for (const auto& [k, c] : a.terms()) {
    double dot = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) dot += frac(k[i] * t[i]);
    out.add_term(k, c * turns(dot));
  }
  return out;
}

double torus_length(std::span<const double> t) {
  double s = 0.0;
  for (double x : t) {
    const double f = frac(x);
    const double d = std::min(f, 1.0 - f);
    s += d * d;
  }
  return kTwoPi * std::sqrt(s);
}

double lip_upper(const TwistedPolynomial& a) {
  double s = 0.0;
  for (const auto& [k, c] : a.terms()) s += std::abs(c) * exponent_norm(k);
  return s;
}

double lip_lower_sampled(const TwistedPolynomial& a) {
  const int p = a.phase().p();
  std::vector<std::vector<double>> directions;
  for (const auto& [k, c] : a.terms()) {
    const double nk = exponent_norm(k);
    if (nk == 0.0) continue;
    std::vector<double> d(p);
    for (int i = 0; i < p; ++i) d[i] = k[i] / nk;
    directions.push_back(std::move(d));
  }
  if (directions.empty()) return 0.0;  // only the constant term: gamma_t(a) = a
  QMETRIC_REQUIRE(p <= static_cast<int>(std::size(kPrimes)), "lip_lower_sampled: p too large for the Halton sample");
  for (std::uint64_t i = 1; directions.size() < 1000 + a.support_size(); ++i) {
    std::vector<double> d(p);
    double n2 = 0.0;
    for (int q = 0; q < p; ++q) {
      d[q] = 2.0 * radical_inverse(i, kPrimes[q]) - 1.0;
      n2 += d[q] * d[q];
    }
    if (n2 < 1e-6) continue;
    for (double& x : d) x /= std::sqrt(n2);
    directions.push_back(std::move(d));
  }

  constexpr int kRadii = 25;
  const double r0 = 1e-4, r1 = 0.25;
  double best = 0.0;
  std::vector<double> t(p);
  for (const auto& d : directions)
    for (int s = 0; s < kRadii; ++s) {
      const double r = r0 * std::pow(r1 / r0, static_cast<double>(s) / (kRadii - 1));
      for (int q = 0; q < p; ++q) t[q] = r * d[q];
      double num = 0.0;
      for (const auto& [k, c] : a.terms()) {
        double dot = 0.0;
        for (int q = 0; q < p; ++q) dot += k[q] * t[q];
        // |exp(2 pi i x) - 1| = 2 |sin(pi x)|
        const double m = 2.0 * std::abs(std::sin(std::numbers::pi * dot));
        num += std::norm(c) * m * m;
      }
      best = std::max(best, std::sqrt(num) / torus_length(t));
    }
  return best;
}

LipBounds lip_bounds(const TwistedPolynomial& a) {
  const double upper = lip_upper(a);
  if (a.support_size() <= 1) return {upper, upper};  // sup attained as t -> 0 along k
  return {std::min(lip_lower_sampled(a), upper), upper};
}

TwistedPolynomial partial_fourier_sum(const TwistedPolynomial& a, std::span<const int> n) {
  QMETRIC_REQUIRE(static_cast<int>(n.size()) == a.phase().p(), "partial_fourier_sum: need one order per generator");
  TwistedPolynomial out(a.phase());
  for (const auto& [k, c] : a.terms()) {
    bool keep = true;
    for (std::size_t i = 0; i < k.size(); ++i) keep = keep && std::abs(k[i]) <= n[i];
    if (keep) out.add_term(k, c);
  }
  return out;
}

TwistedPolynomial cesaro_mean(const TwistedPolynomial& a, int n) {
  QMETRIC_REQUIRE(n >= 0, "cesaro_mean: n must be >= 0");
  TwistedPolynomial out(a.phase());
  for (const auto& [k, c] : a.terms()) {
    double w = 1.0;
    for (int x : k) w *= std::max(0.0, 1.0 - std::abs(x) / static_cast<double>(n + 1));
    if (w > 0.0) out.add_term(k, w * c);
  }
  return out;
}

double fejer_eval(int n, double t) {
  QMETRIC_REQUIRE(n >= 0, "fejer_eval: n must be >= 0");
  const double s = std::sin(std::numbers::pi * t);
  if (s == 0.0) return n + 1.0;
  const double q = std::sin(std::numbers::pi * (n + 1) * t) / s;
  return q * q / (n + 1);
}

double fejer_series(int n, double t) {
  QMETRIC_REQUIRE(n >= 0, "fejer_series: n must be >= 0");
  double s = 1.0;
  for (int k = 1; k <= n; ++k) s += 2.0 * (1.0 - k / (n + 1.0)) * std::cos(kTwoPi * k * t);
  return s;
}

double fejer_abs_moment(int n) {
  QMETRIC_REQUIRE(n >= 0, "fejer_abs_moment: n must be >= 0");
  // |t| has Fourier coefficients 1/4 at 0 and -1/(pi^2 k^2) at odd k.
  double s = 0.0;
  for (int k = 1; k <= n; k += 2) s += (1.0 - k / (n + 1.0)) / (static_cast<double>(k) * k);
  return 0.25 - 2.0 / (std::numbers::pi * std::numbers::pi) * s;
}

CMatrix rational_representation(const TwistedPolynomial& a, const Caps& caps) {
  const PhaseMatrix& phase = a.phase();
  const int p = phase.p();
  const int max_den = static_cast<int>(std::min<std::size_t>(caps.denominator, 1u << 20));
  const auto den = phase.common_denominator(max_den);
  if (!den) throw ResourceLimitError("rational_representation: no common denominator <= " + std::to_string(max_den));
  const int N = *den;
  const int pairs = p * (p - 1) / 2;
  if (std::pow(static_cast<double>(N), pairs) > static_cast<double>(caps.matrix_dim))
    throw ResourceLimitError("rational_representation: dimension " + std::to_string(N) + "^" + std::to_string(pairs) +
                             " exceeds matrix cap");

  auto clock_power = [&](long long q) {
    std::vector<Complex> d(N);
    for (int r = 0; r < N; ++r) d[r] = turns(static_cast<double>(((q * r) % N + N) % N) / N);
    return CMatrix::diagonal(d);
  };
  CMatrix shift(N, N);
  for (int r = 0; r < N; ++r) shift(r, (r + 1) % N) = 1.0;

  std::vector<CMatrix> gens;
  for (int g = 0; g < p; ++g) {
    CMatrix m = CMatrix::identity(1);
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j) {
        CMatrix factor = CMatrix::identity(N);
        if (g == i) factor = clock_power(std::llround(phase.theta(i, j) * N));
        if (g == j) factor = shift;
        m = linalg::kron(m, factor, caps);
      }
    gens.push_back(std::move(m));
  }
  const std::size_t dim = gens.front().rows();

  CMatrix out(dim, dim);
  for (const auto& [k, c] : a.terms()) {
    CMatrix term = CMatrix::identity(dim);
    for (int g = 0; g < p; ++g) {
      const CMatrix step = k[g] >= 0 ? gens[g] : gens[g].adjoint();
      for (int e = 0; e < std::abs(k[g]); ++e) term = term * step;
    }
    out += c * term;
  }
  return out;
}

long long integer_determinant(const std::vector<std::vector<long long>>& m) {
  const std::size_t n = m.size();
  for (const auto& row : m) QMETRIC_REQUIRE(row.size() == n, "integer_determinant: matrix must be square");
  if (n == 0) return 1;
  // Fraction-free Bareiss elimination.
  std::vector<std::vector<__int128>> a(n, std::vector<__int128>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
  __int128 prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < n && a[swap][k] == 0) ++swap;
      if (swap == n) return 0;
      std::swap(a[k], a[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign * static_cast<long long>(a[n - 1][n - 1]);
}

void ToralMap::validate() const {
  const int n = p();
  QMETRIC_REQUIRE(n >= 1, "ToralMap: empty matrix");
  for (const auto& row : matrix) QMETRIC_REQUIRE(static_cast<int>(row.size()) == n, "ToralMap: matrix must be square");
  QMETRIC_REQUIRE(static_cast<int>(shift.size()) == n, "ToralMap: shift must have length p");
  for (double x : shift) QMETRIC_REQUIRE(std::isfinite(x), "ToralMap: non-finite shift");
  const long long det = integer_determinant(matrix);
  QMETRIC_REQUIRE(det == 1 || det == -1, "ToralMap: |det T| must be 1, got det " + std::to_string(det));
}

namespace {

Exponent column(const ToralMap& map, int j) {
  Exponent c(map.p());
  for (int i = 0; i < map.p(); ++i) c[i] = static_cast<int>(map.matrix[i][j]);
  return c;
}

}  // namespace

bool ToralMap::preserves(const PhaseMatrix& phase) const {
  if (phase.p() != p()) return false;
  for (int i = 0; i < p(); ++i)
    for (int j = i + 1; j < p(); ++j) {
      const Exponent ci = column(*this, i), cj = column(*this, j);
      // u^cj u^ci = (phase(cj, ci) / phase(ci, cj)) u^ci u^cj
      const Complex commutator = reorder_phase(cj, ci, phase) * std::conj(reorder_phase(ci, cj, phase));
      if (std::abs(commutator - phase.rho(i, j)) > 1e-9) return false;
    }
  return true;
}

std::pair<Exponent, Complex> toral_map_monomial(const ToralMap& map, const PhaseMatrix& phase, const Exponent& k) {
  const int p = phase.p();
  std::pair<Exponent, Complex> acc{Exponent(p, 0), 1.0};
  for (int j = 0; j < p; ++j) {
    if (k[j] == 0) continue;
    const Exponent c = column(map, j);
    // (u^c)^{-1} = conj(reorder_phase(c, -c)) u^{-c}
    const std::pair<Exponent, Complex> step =
        k[j] > 0 ? std::pair<Exponent, Complex>{c, 1.0}
                 : std::pair<Exponent, Complex>{negate(c), std::conj(reorder_phase(c, negate(c), phase))};
    for (int e = 0; e < std::abs(k[j]); ++e) acc = mono_mul(acc, step, phase);
  }
  double dot = 0.0;
  for (int i = 0; i < p; ++i) dot += frac(k[i] * map.shift[i]);
  acc.second *= turns(dot);
  return acc;
}

TwistedPolynomial toral_map_apply(const ToralMap& map, const TwistedPolynomial& a) {
  map.validate();
  QMETRIC_REQUIRE(map.p() == a.phase().p(), "toral_map_apply: dimension mismatch");
  QMETRIC_REQUIRE(map.preserves(a.phase()), "toral_map_apply: T does not preserve the commutation relations of theta");
  TwistedPolynomial out(a.phase());
  for (const auto& [k, c] : a.terms()) {
    const auto [image, phase] = toral_map_monomial(map, a.phase(), k);
    out.add_term(image, c * phase);
  }
  return out;
}

}  // namespace qmetric::nctorus
