#include "qmetric/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>

#include "qmetric/errors.hpp"

namespace qmetric::weyl {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

int mod(long long a, int p) {
  const long long r = a % p;
  return static_cast<int>(r < 0 ? r + p : r);
}

// Matrix entry (R, C) lands at sum_k (r_k p + c_k) (p^2)^(L-1-k).
std::vector<std::size_t> interleave_map(int p, int sites) {
  const std::size_t d = ipow(p, sites);
  std::vector<std::size_t> spread(d);  // digits of R moved to even base-p positions
  for (std::size_t r = 0; r < d; ++r) {
    std::size_t x = r, out = 0, w = 1;
    for (int k = 0; k < sites; ++k) {
      out += (x % p) * w;
      x /= p;
      w *= static_cast<std::size_t>(p) * p;
    }
    spread[r] = out;
  }
  return spread;
}

std::vector<Complex> to_interleaved(const CMatrix& m, int p, int sites) {
  const std::size_t d = m.rows();
  const auto spread = interleave_map(p, sites);
  std::vector<Complex> out(d * d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) out[spread[r] * p + spread[c]] = m(r, c);
  return out;
}

CMatrix from_interleaved(const std::vector<Complex>& x, int p, int sites) {
  const std::size_t d = ipow(p, sites);
  const auto spread = interleave_map(p, sites);
  CMatrix m(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) m(r, c) = x[spread[r] * p + spread[c]];
  return m;
}

// Per-site change of basis between matrix units (r, c) and Weyl monomials (i, j):
//   forward: C[i][j] = (1/p) sum_r rho^(-i r) B[r][r + j]
//   inverse: B[r][c] = sum_i rho^(i r) C[i][c - r]
void site_transforms(std::vector<Complex>& x, int p, int sites, bool forward) {
  const std::size_t pp = static_cast<std::size_t>(p) * p;
  std::vector<Complex> roots(p);
  for (int k = 0; k < p; ++k) roots[k] = root_of_unity(p, k);
  std::vector<Complex> in(pp), out(pp);
  for (int site = 0; site < sites; ++site) {
    const std::size_t stride = ipow(pp, sites - 1 - site);
    for (std::size_t base = 0; base < x.size(); ++base) {
      if ((base / stride) % pp != 0) continue;
      for (std::size_t q = 0; q < pp; ++q) in[q] = x[base + q * stride];
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) {
          Complex s = 0.0;
          if (forward) {  // a = i, b = j
            for (int r = 0; r < p; ++r) s += std::conj(roots[mod(static_cast<long long>(a) * r, p)]) * in[r * p + mod(r + b, p)];
            s /= static_cast<double>(p);
          } else {  // a = r, b = c
            for (int i = 0; i < p; ++i) s += roots[mod(static_cast<long long>(i) * a, p)] * in[i * p + mod(b - a, p)];
          }
          out[a * p + b] = s;
        }
      for (std::size_t q = 0; q < pp; ++q) x[base + q * stride] = out[q];
    }
  }
}

std::vector<Complex> expand_matrix(const CMatrix& m, int p, int sites) {
  auto x = to_interleaved(m, p, sites);
  site_transforms(x, p, sites, true);
  return x;
}

CMatrix reconstruct(std::vector<Complex> coeffs, int p, int sites) {
  site_transforms(coeffs, p, sites, false);
  return from_interleaved(coeffs, p, sites);
}

// gamma_g on a matrix over `sites` sites: a'(R, C) = conj(chi(R)) chi(C) a(R + r, C + r),
// chi(X) = prod_k rho^(s_k X_k).
CMatrix act_on_matrix(const CMatrix& a, int p, std::span<const SiteExponent> shifts) {
  const int sites = static_cast<int>(shifts.size());
  const std::size_t d = a.rows();
  std::vector<std::size_t> perm(d);
  std::vector<Complex> chi(d);
  for (std::size_t x = 0; x < d; ++x) {
    std::size_t rest = x, moved = 0, w = 1;
    long long phase = 0;
    for (int k = sites - 1; k >= 0; --k) {
      const int digit = static_cast<int>(rest % p);
      rest /= p;
      moved += static_cast<std::size_t>(mod(digit + shifts[k].first, p)) * w;
      phase += static_cast<long long>(shifts[k].second) * digit;
      w *= p;
    }
    perm[x] = moved;
    chi[x] = root_of_unity(p, phase);
  }
  CMatrix out(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) out(r, c) = std::conj(chi[r]) * chi[c] * a(perm[r], perm[c]);
  return out;
}

void require_same_window(const WeylElement& a, const WeylElement& b, const char* op) {
  if (!(a.window() == b.window())) throw PreconditionError(std::string(op) + ": window mismatch");
}

}  // namespace

std::size_t WeylWindow::dim() const { return ipow(static_cast<std::size_t>(p), length()); }

void WeylWindow::validate(const Caps& caps) const {
  QMETRIC_REQUIRE(p >= 2, "WeylWindow: p must be >= 2");
  QMETRIC_REQUIRE(lo <= hi, "WeylWindow: lo must not exceed hi");
  // Compare in floating point first so huge windows cannot overflow dim().
  if (std::pow(static_cast<double>(p), length()) > static_cast<double>(caps.matrix_dim))
    throw ResourceLimitError("WeylWindow: p^" + std::to_string(length()) + " exceeds matrix cap " +
                             std::to_string(caps.matrix_dim));
}

WeylCoefficients::WeylCoefficients(WeylWindow window, std::vector<Complex> values)
    : window_(window), values_(std::move(values)) {
  const std::size_t expect = ipow(static_cast<std::size_t>(window_.p) * window_.p, window_.length());
  QMETRIC_REQUIRE(values_.size() == expect, "WeylCoefficients: expected p^(2L) values");
}

std::size_t WeylCoefficients::index_of(std::span<const SiteExponent> exponents) const {
  const int p = window_.p;
  QMETRIC_REQUIRE(static_cast<int>(exponents.size()) == window_.length(), "WeylCoefficients: exponent length mismatch");
  std::size_t idx = 0;
  for (const auto& [i, j] : exponents) idx = idx * p * p + static_cast<std::size_t>(mod(i, p) * p + mod(j, p));
  return idx;
}

Complex WeylCoefficients::at(std::span<const SiteExponent> exponents) const { return values_[index_of(exponents)]; }

std::vector<SiteExponent> WeylCoefficients::exponents_of(std::size_t index) const {
  const int p = window_.p;
  std::vector<SiteExponent> out(window_.length());
  for (int k = window_.length() - 1; k >= 0; --k) {
    const int pair = static_cast<int>(index % (p * p));
    index /= p * p;
    out[k] = {pair / p, pair % p};
  }
  return out;
}

double WeylCoefficients::squared_norm() const {
  double s = 0.0;
  for (const auto& c : values_) s += std::norm(c);
  return s;
}

struct WeylElement::Cache {
  std::once_flag once;
  std::optional<WeylCoefficients> coeffs;
};

WeylElement::WeylElement(WeylWindow window, CMatrix matrix)
    : window_(window), matrix_(std::move(matrix)), cache_(std::make_shared<Cache>()) {
  QMETRIC_REQUIRE(window_.p >= 2 && window_.lo <= window_.hi, "WeylElement: invalid window");
  QMETRIC_REQUIRE(matrix_.is_square() && matrix_.rows() == window_.dim(),
                  "WeylElement: matrix side must be p^(window length)");
}

WeylElement WeylElement::identity(const WeylWindow& window) {
  window.validate();
  return {window, CMatrix::identity(window.dim())};
}

WeylElement WeylElement::from_coefficients(const WeylCoefficients& coeffs) {
  const auto& w = coeffs.window();
  w.validate();
  std::vector<Complex> values(coeffs.values().begin(), coeffs.values().end());
  WeylElement out(w, reconstruct(std::move(values), w.p, w.length()));
  std::call_once(out.cache_->once, [&] { out.cache_->coeffs.emplace(coeffs); });
  return out;
}

const WeylCoefficients& WeylElement::coefficients() const {
  std::call_once(cache_->once, [this] {
    cache_->coeffs.emplace(window_, expand_matrix(matrix_, window_.p, window_.length()));
  });
  return *cache_->coeffs;
}

WeylElement WeylElement::adjoint() const { return {window_, matrix_.adjoint()}; }

WeylElement operator*(const WeylElement& a, const WeylElement& b) {
  require_same_window(a, b, "WeylElement product");
  return {a.window_, a.matrix_ * b.matrix_};
}

WeylElement operator+(const WeylElement& a, const WeylElement& b) {
  require_same_window(a, b, "WeylElement sum");
  return {a.window_, a.matrix_ + b.matrix_};
}

WeylElement operator-(const WeylElement& a, const WeylElement& b) {
  require_same_window(a, b, "WeylElement difference");
  return {a.window_, a.matrix_ - b.matrix_};
}

WeylElement operator*(Complex s, const WeylElement& a) { return {a.window_, s * a.matrix_}; }

Complex root_of_unity(int p, long long power) {
  const int k = mod(power, p);
  if (k == 0) return 1.0;
  if (2 * k == p) return -1.0;
  if (4 * k == p) return {0.0, 1.0};
  if (4 * k == 3 * p) return {0.0, -1.0};
  const double angle = 2.0 * std::numbers::pi * k / p;
  return {std::cos(angle), std::sin(angle)};
}

ClockShift clock_shift(int p) {
  QMETRIC_REQUIRE(p >= 2, "clock_shift: p must be >= 2");
  ClockShift cs{CMatrix(p, p), CMatrix(p, p)};
  for (int r = 0; r < p; ++r) {
    cs.u(r, r) = root_of_unity(p, r);
    cs.v(r, (r + 1) % p) = 1.0;
  }
  return cs;
}

WeylElement weyl_monomial(const WeylWindow& window, std::span<const SiteExponent> exponents, const Caps& caps) {
  window.validate(caps);
  QMETRIC_REQUIRE(static_cast<int>(exponents.size()) == window.length(),
                  "weyl_monomial: need one exponent pair per site");
  const int p = window.p;
  CMatrix m = CMatrix::identity(1);
  for (const auto& [i, j] : exponents) {
    // (u^i v^j)(r, r + j) = rho^(i r)
    CMatrix factor(p, p);
    for (int r = 0; r < p; ++r) factor(r, mod(r + j, p)) = root_of_unity(p, static_cast<long long>(i) * r);
    m = linalg::kron(m, factor, caps);
  }
  return {window, std::move(m)};
}

WeylCoefficients weyl_expand(const WeylElement& a) { return a.coefficients(); }

WeylElement conditional_expectation(const WeylElement& a, int n) {
  const auto& w = a.window();
  QMETRIC_REQUIRE(n >= 0 && w.lo <= n && -n <= w.hi, "conditional_expectation: [-n, n] must meet the window");
  const auto& coeffs = a.coefficients();
  std::vector<Complex> kept(coeffs.values().begin(), coeffs.values().end());
  for (std::size_t idx = 0; idx < kept.size(); ++idx) {
    const auto ex = coeffs.exponents_of(idx);
    for (int k = 0; k < w.length(); ++k) {
      const int site = w.lo + k;
      if ((site < -n || site > n) && ex[k] != SiteExponent{0, 0}) {
        kept[idx] = 0.0;
        break;
      }
    }
  }
  return WeylElement::from_coefficients(WeylCoefficients(w, std::move(kept)));
}

bool GroupElement::is_identity() const {
  return std::all_of(shifts.begin(), shifts.end(),
                     [this](const SiteExponent& rs) { return mod(rs.first, p) == 0 && mod(rs.second, p) == 0; });
}

double site_length(int p, int r, int s) {
  const int rr = mod(r, p), ss = mod(s, p);
  const double x = std::min(rr, p - rr), y = std::min(ss, p - ss);
  return std::hypot(x, y) / p;
}

double group_length(const GroupElement& g, double lambda) {
  QMETRIC_REQUIRE(lambda > 0.0 && lambda < 1.0, "group_length: lambda must lie in (0, 1)");
  double total = 0.0;
  for (std::size_t k = 0; k < g.shifts.size(); ++k) {
    const int site = g.lo + static_cast<int>(k);
    total += std::pow(lambda, std::abs(site)) * site_length(g.p, g.shifts[k].first, g.shifts[k].second);
  }
  return total;
}

double shift_lipschitz_number(int p, double lambda, int by, int n, const Caps& caps) {
  QMETRIC_REQUIRE(p >= 2, "shift_lipschitz_number: p must be >= 2");
  QMETRIC_REQUIRE(lambda > 0.0 && lambda < 1.0, "shift_lipschitz_number: lambda must lie in (0, 1)");
  QMETRIC_REQUIRE(by == 1 || by == -1, "shift_lipschitz_number: by must be +1 or -1");
  QMETRIC_REQUIRE(n >= 1, "shift_lipschitz_number: n must be >= 1");
  const int len = 2 * n + 1;
  const double count = std::pow(static_cast<double>(p), 2.0 * len);
  if (count > static_cast<double>(caps.group_elements))
    throw ResourceLimitError("shift_lipschitz_number: group of size " + std::to_string(count) + " exceeds cap");
  GroupElement g{p, -n, std::vector<SiteExponent>(len, {0, 0})};
  double best = 0.0;
  for (std::size_t code = 1; code < static_cast<std::size_t>(count); ++code) {
    std::size_t c = code;
    for (auto& [r, s] : g.shifts) {
      r = static_cast<int>(c % p);
      s = static_cast<int>((c / p) % p);
      c /= static_cast<std::size_t>(p) * p;
    }
    const GroupElement moved{p, -n + by, g.shifts};
    best = std::max(best, group_length(moved, lambda) / group_length(g, lambda));
  }
  return best;
}

WeylElement weyl_action(const GroupElement& g, const WeylElement& a) {
  const auto& w = a.window();
  QMETRIC_REQUIRE(g.p == w.p && g.lo == w.lo && static_cast<int>(g.shifts.size()) == w.length(),
                  "weyl_action: group element does not match the window");
  return {w, act_on_matrix(a.matrix(), w.p, g.shifts)};
}

double weyl_lip_norm(const WeylElement& a, double lambda, const Caps& caps) {
  QMETRIC_REQUIRE(lambda > 0.0 && lambda < 1.0, "weyl_lip_norm: lambda must lie in (0, 1)");
  const auto& w = a.window();
  const int p = w.p;
  const auto& coeffs = a.coefficients();
  const auto values = coeffs.values();

  double scale = 0.0;
  for (const auto& c : values) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return 0.0;
  const double negligible = 1e-14 * scale;

  // Sites carrying a nontrivial coefficient, and the count of nontrivial monomials.
  std::vector<bool> active(w.length(), false);
  std::size_t nonzero = 0, last_nonzero = 0;
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    if (std::abs(values[idx]) <= negligible) continue;
    const auto ex = coeffs.exponents_of(idx);
    bool trivial = true;
    for (int k = 0; k < w.length(); ++k)
      if (ex[k] != SiteExponent{0, 0}) {
        active[k] = true;
        trivial = false;
      }
    if (!trivial) {
      ++nonzero;
      last_nonzero = idx;
    }
  }
  std::vector<int> sites;
  for (int k = 0; k < w.length(); ++k)
    if (active[k]) sites.push_back(k);
  if (sites.empty()) return 0.0;

  const std::size_t pp = static_cast<std::size_t>(p) * p;
  const int s = static_cast<int>(sites.size());
  if (std::pow(static_cast<double>(pp), s) > static_cast<double>(caps.group_elements))
    throw ResourceLimitError("weyl_lip_norm: " + std::to_string(p) + "^" + std::to_string(2 * s) +
                             " group elements exceed enumeration cap " + std::to_string(caps.group_elements));
  const std::size_t group_size = ipow(pp, s);

  std::vector<double> weight(s);
  for (int q = 0; q < s; ++q) weight[q] = std::pow(lambda, std::abs(w.lo + sites[q]));
  std::vector<SiteExponent> g(s);
  auto decode = [&](std::size_t code) {
    for (int q = s - 1; q >= 0; --q) {
      const int pair = static_cast<int>(code % pp);
      code /= pp;
      g[q] = {pair / p, pair % p};
    }
  };
  auto length_of = [&] {
    double len = 0.0;
    for (int q = 0; q < s; ++q) len += weight[q] * site_length(p, g[q].first, g[q].second);
    return len;
  };

  double best = 0.0;
  if (nonzero == 1) {
    // Scalar multiple of a single monomial m: gamma_g(c m) - c m = c (chi_g - 1) m, and m is unitary.
    const auto ex = coeffs.exponents_of(last_nonzero);
    const double c = std::abs(values[last_nonzero]);
    for (std::size_t code = 1; code < group_size; ++code) {
      decode(code);
      long long phase = 0;
      for (int q = 0; q < s; ++q)
        phase += static_cast<long long>(g[q].first) * ex[sites[q]].first +
                 static_cast<long long>(g[q].second) * ex[sites[q]].second;
      best = std::max(best, c * std::abs(root_of_unity(p, phase) - 1.0) / length_of());
    }
    return best;
  }

  // Compress a to the active sites; the remaining tensor factors are identities.
  std::vector<Complex> reduced(group_size, 0.0);
  for (std::size_t code = 0; code < group_size; ++code) {
    decode(code);
    std::vector<SiteExponent> full(w.length(), {0, 0});
    for (int q = 0; q < s; ++q) full[sites[q]] = g[q];
    reduced[code] = coeffs.at(full);
  }
  const CMatrix compact = reconstruct(std::move(reduced), p, s);

  for (std::size_t code = 1; code < group_size; ++code) {
    decode(code);
    const CMatrix diff = act_on_matrix(compact, p, g) - compact;
    best = std::max(best, linalg::operator_norm(diff) / length_of());
  }
  return best;
}

WeylWord multiply(const WeylWord& a, const WeylWord& b) {
  QMETRIC_REQUIRE(a.p == b.p, "WeylWord product: p mismatch");
  const int p = a.p;
  WeylWord out{p, {}, a.phase * b.phase};
  for (const auto& [site, ij] : a.sites) {
    const SiteExponent e{mod(ij.first, p), mod(ij.second, p)};
    if (e != SiteExponent{0, 0}) out.sites.emplace(site, e);
  }
  long long phase = 0;
  for (const auto& [site, ij] : b.sites) {
    auto it = out.sites.find(site);
    if (it == out.sites.end()) {
      const SiteExponent e{mod(ij.first, p), mod(ij.second, p)};
      if (e != SiteExponent{0, 0}) out.sites.emplace(site, e);
      continue;
    }
    // (u^i v^j)(u^i' v^j') = rho^(j i') u^(i+i') v^(j+j')
    phase += static_cast<long long>(it->second.second) * ij.first;
    it->second = {mod(it->second.first + ij.first, p), mod(it->second.second + ij.second, p)};
    if (it->second == SiteExponent{0, 0}) out.sites.erase(it);
  }
  out.phase *= root_of_unity(p, phase);
  return out;
}

WeylWord shift(const WeylWord& w, int by) {
  WeylWord out{w.p, {}, w.phase};
  for (const auto& [site, ij] : w.sites) out.sites.emplace(site + by, ij);
  return out;
}

WeylElement to_element(const WeylWord& w, const WeylWindow& window, const Caps& caps) {
  QMETRIC_REQUIRE(w.p == window.p, "to_element: p mismatch");
  std::vector<SiteExponent> ex(window.length(), {0, 0});
  for (const auto& [site, ij] : w.sites) {
    QMETRIC_REQUIRE(window.contains(site), "to_element: word extends beyond the window");
    ex[site - window.lo] = ij;
  }
  auto m = weyl_monomial(window, ex, caps);
  return w.phase * m;
}

}  // namespace qmetric::weyl
