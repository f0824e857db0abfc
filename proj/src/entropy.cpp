#include "qmetric/entropy.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "qmetric/approxdim.hpp"
#include "qmetric/errors.hpp"
#include "qmetric/metricspace.hpp"

namespace qmetric::entropy {

namespace {

constexpr std::uint64_t kEmpty = ~std::uint64_t{0};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_square(const IntMatrix& T) {
  QMETRIC_REQUIRE(!T.empty(), "matrix must be nonempty");
  for (const auto& row : T) QMETRIC_REQUIRE(row.size() == T.size(), "matrix must be square");
}

void require_unimodular(const IntMatrix& T) {
  require_square(T);
  const long long det = nctorus::integer_determinant(T);
  QMETRIC_REQUIRE(det == 1 || det == -1, "|det T| must be 1, got det " + std::to_string(det));
}

long long checked(__int128 v) {
  if (v > static_cast<__int128>(1) << 62 || v < -(static_cast<__int128>(1) << 62))
    throw ResourceLimitError("integer overflow in lattice arithmetic");
  return static_cast<long long>(v);
}

}  // namespace

LatticeSet::LatticeSet(int p, const Caps& caps) : p_(p), caps_(caps) {
  QMETRIC_REQUIRE(p >= 1 && p <= 4, "LatticeSet: dimension must be in [1, 4]");
  bits_ = p == 1 ? 32 : 64 / p;
  // The all-ones key is reserved for empty slots, so the top value stays unused.
  limit_ = (1LL << (bits_ - 1)) - 2;
  table_.assign(64, kEmpty);
}

LatticeSet LatticeSet::cube(int p, int m, const Caps& caps) {
  QMETRIC_REQUIRE(m >= 0, "cube: m must be >= 0");
  LatticeSet out(p, caps);
  std::vector<long long> x(p, -m);
  while (true) {
    out.insert(x);
    int i = 0;
    while (i < p && x[i] == m) x[i++] = -m;
    if (i == p) break;
    ++x[i];
  }
  return out;
}

std::uint64_t LatticeSet::pack(std::span<const long long> x) const {
  QMETRIC_REQUIRE(static_cast<int>(x.size()) == p_, "LatticeSet: point has the wrong dimension");
  std::uint64_t key = 0;
  for (int i = 0; i < p_; ++i) {
    if (x[i] > limit_ || x[i] < -limit_)
      throw ResourceLimitError("LatticeSet: coordinate " + std::to_string(x[i]) + " exceeds packable range " +
                               std::to_string(limit_));
    const std::uint64_t field = static_cast<std::uint64_t>(x[i] + (1LL << (bits_ - 1)));
    key |= field << (bits_ * i);
  }
  return key;
}

void LatticeSet::unpack(std::uint64_t key, std::span<long long> out) const {
  const std::uint64_t mask = bits_ == 64 ? kEmpty : ((std::uint64_t{1} << bits_) - 1);
  for (int i = 0; i < p_; ++i)
    out[i] = static_cast<long long>((key >> (bits_ * i)) & mask) - (1LL << (bits_ - 1));
}

std::size_t LatticeSet::slot(std::uint64_t key) const {
  const std::size_t mask = table_.size() - 1;
  std::size_t i = mix(key) & mask;
  while (table_[i] != kEmpty && table_[i] != key) i = (i + 1) & mask;
  return i;
}

void LatticeSet::grow() {
  std::vector<std::uint64_t> old(table_.size() * 2, kEmpty);
  old.swap(table_);
  for (std::uint64_t key : old)
    if (key != kEmpty) table_[slot(key)] = key;
}

bool LatticeSet::insert(std::span<const long long> x) {
  const std::uint64_t key = pack(x);
  std::size_t i = slot(key);
  if (table_[i] == key) return false;
  if (size_ + 1 > caps_.lattice_points)
    throw ResourceLimitError("LatticeSet: cardinality exceeds lattice cap " + std::to_string(caps_.lattice_points));
  if (2 * (size_ + 1) > table_.size()) {
    grow();
    i = slot(key);
  }
  table_[i] = key;
  ++size_;
  return true;
}

bool LatticeSet::contains(std::span<const long long> x) const {
  for (long long c : x)
    if (c > limit_ || c < -limit_) return false;
  const std::uint64_t key = pack(x);
  return table_[slot(key)] == key;
}

void LatticeSet::for_each(const std::function<void(std::span<const long long>)>& f) const {
  std::vector<long long> x(p_);
  for (std::uint64_t key : table_)
    if (key != kEmpty) {
      unpack(key, x);
      f(x);
    }
}

std::vector<Point> LatticeSet::points() const {
  std::vector<Point> out;
  out.reserve(size_);
  for_each([&](std::span<const long long> x) { out.emplace_back(x.begin(), x.end()); });
  std::sort(out.begin(), out.end());
  return out;
}

long long LatticeSet::max_abs_coordinate() const {
  long long best = 0;
  for_each([&](std::span<const long long> x) {
    for (long long c : x) best = std::max(best, c < 0 ? -c : c);
  });
  return best;
}

LatticeSet minkowski_sum(const LatticeSet& a, const LatticeSet& b, const Caps& caps) {
  QMETRIC_REQUIRE(a.p() == b.p(), "minkowski_sum: dimension mismatch");
  const int p = a.p();
  const auto bp = b.points();
  LatticeSet out(p, caps);
  std::vector<long long> z(p);
  a.for_each([&](std::span<const long long> x) {
    for (const auto& y : bp) {
      for (int i = 0; i < p; ++i) z[i] = x[i] + y[i];
      out.insert(z);
    }
  });
  return out;
}

LatticeSet linear_image(const IntMatrix& T, const LatticeSet& a, const Caps& caps) {
  require_square(T);
  QMETRIC_REQUIRE(static_cast<int>(T.size()) == a.p(), "linear_image: dimension mismatch");
  const int p = a.p();
  LatticeSet out(p, caps);
  std::vector<long long> z(p);
  a.for_each([&](std::span<const long long> x) {
    for (int i = 0; i < p; ++i) {
      __int128 s = 0;
      for (int j = 0; j < p; ++j) s += static_cast<__int128>(T[i][j]) * x[j];
      z[i] = checked(s);
    }
    out.insert(z);
  });
  return out;
}

GrowthSeries lattice_orbit_card(const IntMatrix& T, int m, int n, const Caps& caps) {
  require_unimodular(T);
  QMETRIC_REQUIRE(m >= 0 && n >= 1, "lattice_orbit_card: need m >= 0 and n >= 1");
  const int p = static_cast<int>(T.size());
  const LatticeSet cube = LatticeSet::cube(p, m, caps);
  const auto offsets = cube.points();
  GrowthSeries out;
  LatticeSet s = cube;
  out.counts.push_back(s.size());
  std::vector<long long> tx(p), z(p);
  for (int j = 2; j <= n; ++j) {
    LatticeSet next(p, caps);
    s.for_each([&](std::span<const long long> x) {
      for (int i = 0; i < p; ++i) {
        __int128 acc = 0;
        for (int k = 0; k < p; ++k) acc += static_cast<__int128>(T[i][k]) * x[k];
        tx[i] = checked(acc);
      }
      for (const auto& k : offsets) {
        for (int i = 0; i < p; ++i) z[i] = tx[i] + k[i];
        next.insert(z);
      }
    });
    s = std::move(next);
    out.counts.push_back(s.size());
  }
  return out;
}

GrowthSeries lattice_orbit_card_literal(const IntMatrix& T, int m, int n, const Caps& caps) {
  require_unimodular(T);
  QMETRIC_REQUIRE(m >= 0 && n >= 1 && n <= 6, "lattice_orbit_card_literal: need m >= 0 and 1 <= n <= 6");
  const int p = static_cast<int>(T.size());
  LatticeSet term = LatticeSet::cube(p, m, caps);  // T^j K
  LatticeSet sum = term;
  GrowthSeries out;
  out.counts.push_back(sum.size());
  for (int j = 1; j < n; ++j) {
    term = linear_image(T, term, caps);
    sum = minkowski_sum(sum, term, caps);
    out.counts.push_back(sum.size());
  }
  return out;
}

std::vector<long long> characteristic_polynomial(const IntMatrix& T) {
  require_square(T);
  const std::size_t n = T.size();
  // Faddeev-LeVerrier: M_k = T M_(k-1) + c_(n-k+1) I, c_(n-k) = -tr(T M_k) / k.
  std::vector<__int128> c(n + 1, 0);
  c[n] = 1;
  std::vector<std::vector<__int128>> M(n, std::vector<__int128>(n, 0)), TM = M;
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        __int128 s = 0;
        for (std::size_t l = 0; l < n; ++l) s += static_cast<__int128>(T[i][l]) * M[l][j];
        TM[i][j] = s;
      }
    for (std::size_t i = 0; i < n; ++i) TM[i][i] += c[n - k + 1];
    M = TM;
    __int128 tr = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) tr += static_cast<__int128>(T[i][l]) * M[l][i];
    c[n - k] = -tr / static_cast<__int128>(k);
  }
  std::vector<long long> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = checked(c[i]);
  return out;
}

std::vector<Complex> eigenvalues(const IntMatrix& T) {
  const auto c = characteristic_polynomial(T);
  const std::size_t n = T.size();
  if (n == 1) return {Complex(static_cast<double>(-c[0]), 0.0)};
  if (n == 2) {
    // x^2 + b x + d with an exact integer discriminant.
    const long long b = c[1], d = c[0];
    const long long disc = b * b - 4 * d;
    if (disc >= 0) {
      const double sq = std::sqrt(static_cast<double>(disc));
      const double q = -0.5 * (static_cast<double>(b) + (b >= 0 ? sq : -sq));
      if (q == 0.0) return {0.0, 0.0};
      return {Complex(q, 0.0), Complex(static_cast<double>(d) / q, 0.0)};
    }
    const double im = 0.5 * std::sqrt(static_cast<double>(-disc));
    return {Complex(-0.5 * b, im), Complex(-0.5 * b, -im)};
  }

  auto eval = [&](Complex z) {
    std::complex<long double> acc = 0.0L, zz(z.real(), z.imag());
    for (std::size_t k = n + 1; k-- > 0;) acc = acc * zz + static_cast<long double>(c[k]);
    return Complex(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
  };
  double bound = 0.0;
  for (std::size_t k = 0; k < n; ++k) bound = std::max(bound, std::abs(static_cast<double>(c[k])));
  bound += 1.0;
  std::vector<Complex> z(n);
  const Complex seed(0.4, 0.9);
  for (std::size_t k = 0; k < n; ++k) z[k] = std::pow(seed, static_cast<double>(k)) * (0.5 * bound);
  bool converged = false;
  for (int iter = 0; iter < 20000 && !converged; ++iter) {
    double change = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      Complex denom = 1.0;
      for (std::size_t l = 0; l < n; ++l)
        if (l != k) denom *= z[k] - z[l];
      if (denom == Complex(0.0)) denom = 1e-300;
      const Complex step = eval(z[k]) / denom;
      z[k] -= step;
      change = std::max(change, std::abs(step) / std::max(1.0, std::abs(z[k])));
    }
    converged = change < 1e-15;
  }
  // Multiple roots converge slowly; their cluster mean is accurate.
  std::vector<Complex> out;
  std::vector<char> used(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (used[k]) continue;
    std::vector<std::size_t> cluster{k};
    used[k] = 1;
    for (std::size_t l = k + 1; l < n; ++l)
      if (!used[l] && std::abs(z[l] - z[k]) < 1e-5 * std::max(1.0, std::abs(z[k]))) {
        cluster.push_back(l);
        used[l] = 1;
      }
    Complex mean = 0.0;
    for (std::size_t i : cluster) mean += z[i];
    mean /= static_cast<double>(cluster.size());
    for (std::size_t i = 0; i < cluster.size(); ++i) out.push_back(mean);
  }
  for (const Complex& x : out)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) throw NumericalError("eigenvalues: iteration diverged");
  if (!converged) {
    // Clusters explain slow convergence; anything else is a failure.
    for (const Complex& x : out)
      if (std::abs(eval(x)) > 1e-6 * std::pow(bound, static_cast<double>(n)))
        throw NumericalError("eigenvalues: Durand-Kerner iteration did not converge");
  }
  return out;
}

double eigen_entropy(const IntMatrix& T) {
  require_unimodular(T);
  double s = 0.0;
  for (const Complex& l : eigenvalues(T)) {
    const double g = std::log(std::abs(l));
    // Roundoff on the unit circle is not growth.
    if (g > 1e-12) s += g;
  }
  return s;
}

IntMatrix matrix_power(const IntMatrix& T, int k) {
  require_square(T);
  QMETRIC_REQUIRE(k >= 0, "matrix_power: k must be >= 0");
  const std::size_t n = T.size();
  IntMatrix out(n, std::vector<long long>(n, 0));
  for (std::size_t i = 0; i < n; ++i) out[i][i] = 1;
  for (int e = 0; e < k; ++e) {
    IntMatrix next(n, std::vector<long long>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        __int128 s = 0;
        for (std::size_t l = 0; l < n; ++l) s += static_cast<__int128>(out[i][l]) * T[l][j];
        next[i][j] = checked(s);
      }
    out = std::move(next);
  }
  return out;
}

BoxBound box_bound_card(const IntMatrix& T, int m, int n, double pad) {
  require_unimodular(T);
  QMETRIC_REQUIRE(m >= 1 && n >= 1, "box_bound_card: need m >= 1 and n >= 1");
  QMETRIC_REQUIRE(std::isfinite(pad) && pad >= 0.0, "box_bound_card: pad must be >= 0");
  const int p = static_cast<int>(T.size());
  Eigen::MatrixXd A(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) A(i, j) = static_cast<double>(T[i][j]);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(p, p);

  auto null_space = [&](const Eigen::MatrixXd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double tol = 1e-8 * std::max(1.0, s.size() ? s(0) : 0.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) rank += s(i) > tol;
    return Eigen::MatrixXd(svd.matrixV().rightCols(p - rank));
  };

  // Distinct eigenvalues (one per conjugate pair) with multiplicity.
  std::vector<std::pair<Complex, int>> groups;
  for (const Complex& l : eigenvalues(T)) {
    if (l.imag() < -1e-12) continue;
    const Complex key = std::abs(l.imag()) <= 1e-12 ? Complex(l.real(), 0.0) : l;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return std::abs(g.first - key) < 1e-9 * std::max(1.0, std::abs(key)); });
    if (it == groups.end())
      groups.emplace_back(key, 1);
    else
      ++it->second;
  }

  BoxBound out;
  Eigen::MatrixXd P(p, 0);
  std::vector<int> block_of;
  std::vector<double> block_modulus;
  for (const auto& [l, k] : groups) {
    Eigen::MatrixXd base, gen;
    int expected;
    if (l.imag() == 0.0) {
      base = A - l.real() * I;
      expected = k;
    } else {
      base = A * A - 2.0 * l.real() * A + std::norm(l) * I;
      expected = 2 * k;
    }
    gen = I;
    for (int e = 0; e < k; ++e) gen = gen * base;
    const Eigen::MatrixXd basis = null_space(gen);
    if (basis.cols() != expected) throw NumericalError("box_bound_card: generalized eigenspace has the wrong dimension");
    if (null_space(base).cols() < expected) out.defective = true;
    const int id = static_cast<int>(block_modulus.size());
    block_modulus.push_back(std::max(1.0, std::abs(l)));
    P.conservativeResize(p, P.cols() + basis.cols());
    P.rightCols(basis.cols()) = basis;
    for (Eigen::Index c = 0; c < basis.cols(); ++c) block_of.push_back(id);
  }
  if (P.cols() != p) throw NumericalError("box_bound_card: invariant subspaces do not span R^p");
  if (out.defective)
    QMETRIC_REQUIRE(pad > 0.0, "box_bound_card: defective spectrum requires pad > 0");
  out.det_basis = std::abs(P.determinant());
  if (out.det_basis < 1e-12) throw NumericalError("box_bound_card: invariant basis is singular");
  const Eigen::MatrixXd Pinv = P.inverse();
  for (int c = 0; c < p; ++c) out.moduli.push_back(block_modulus[block_of[c]]);

  // g[j][b] = max over coordinates in block b of the l1 norm of the row of P^-1 T^j.
  // P^-1 T^j = J^j P^-1 with J = P^-1 T P block diagonal; iterating with J keeps
  // contracting coordinates accurate where forming T^j first would cancel.
  Eigen::MatrixXd J = Pinv * A * P;
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < p; ++c)
      if (block_of[r] != block_of[c]) J(r, c) = 0.0;
  const std::size_t nb = block_modulus.size();
  std::vector<std::vector<double>> g(n, std::vector<double>(nb, 0.0));
  Eigen::MatrixXd B = Pinv;
  for (int j = 0; j < n; ++j) {
    for (int c = 0; c < p; ++c) g[j][block_of[c]] = std::max(g[j][block_of[c]], B.row(c).cwiseAbs().sum());
    B = J * B;
  }
  for (int N = 1; N <= n; ++N) {
    double vol = std::pow(2.0, p) * out.det_basis;
    for (int c = 0; c < p; ++c) {
      const std::size_t b = block_of[c];
      // The padding is split evenly so the total rate is (1+pad) prod max(|lambda|, 1).
      const double growth = std::pow(1.0 + pad, 1.0 / p) * block_modulus[b];
      double q = 0.0, sum = 0.0;
      for (int j = 0; j < N; ++j) {
        q = std::max(q, g[j][b] / std::pow(growth, j));
        sum += (j + 1) * std::pow(growth, j);
      }
      vol *= 2.0 * q * m * sum;
    }
    out.bounds.push_back(vol);
  }
  return out;
}

EntropyEstimate entropy_slope(const GrowthSeries& series, int tail) {
  const auto& c = series.counts;
  QMETRIC_REQUIRE(tail >= 3, "entropy_slope: tail must have at least 3 points");
  QMETRIC_REQUIRE(static_cast<std::size_t>(tail) <= c.size(), "entropy_slope: series shorter than the tail");
  EntropyEstimate out;
  for (std::size_t j = 0; j < c.size(); ++j) QMETRIC_REQUIRE(c[j] >= 1, "entropy_slope: counts must be positive");
  for (std::size_t j = 0; j + 1 < c.size(); ++j)
    out.diffs.push_back(std::log(static_cast<double>(c[j + 1])) - std::log(static_cast<double>(c[j])));
  std::vector<double> x, y;
  for (std::size_t j = c.size() - tail; j < c.size(); ++j) {
    x.push_back(static_cast<double>(j + 1));
    y.push_back(std::log(static_cast<double>(c[j])));
  }
  out.slope = metric::regression_slope(x, y);
  return out;
}

std::vector<weyl::WeylElement> product_set(const std::vector<weyl::WeylElement>& omega,
                                           const std::function<weyl::WeylElement(const weyl::WeylElement&)>& alpha,
                                           int n, const Caps& caps) {
  QMETRIC_REQUIRE(n >= 1, "product_set: n must be >= 1");
  QMETRIC_REQUIRE(!omega.empty(), "product_set: omega must be nonempty");
  if (std::pow(static_cast<double>(omega.size()), n) > static_cast<double>(caps.product_set))
    throw ResourceLimitError("product_set: |omega|^n exceeds product cap");
  // powers[j][a] = alpha^j(omega[a])
  std::vector<std::vector<weyl::WeylElement>> powers{omega};
  for (int j = 1; j < n; ++j) {
    std::vector<weyl::WeylElement> next;
    for (const auto& a : powers.back()) next.push_back(alpha(a));
    powers.push_back(std::move(next));
  }
  std::vector<weyl::WeylElement> level = omega;
  for (int j = 1; j < n; ++j) {
    std::vector<weyl::WeylElement> next;
    next.reserve(level.size() * omega.size());
    for (const auto& w : level)
      for (const auto& a : powers[j]) next.push_back(w * a);
    level = std::move(next);
  }
  return level;
}

std::vector<weyl::WeylWord> shift_product_set(const std::vector<weyl::WeylWord>& omega, int n, const Caps& caps) {
  QMETRIC_REQUIRE(n >= 1, "shift_product_set: n must be >= 1");
  QMETRIC_REQUIRE(!omega.empty(), "shift_product_set: omega must be nonempty");
  using Key = std::map<int, weyl::SiteExponent>;
  auto dedup = [&](const std::vector<weyl::WeylWord>& words) {
    std::map<Key, weyl::WeylWord> seen;
    for (const auto& w : words) {
      // Multiplying by the identity word normalizes the exponents.
      const weyl::WeylWord c = weyl::multiply(weyl::WeylWord{w.p, {}, 1.0}, w);
      seen.try_emplace(c.sites, c);
    }
    if (seen.size() > caps.product_set) throw ResourceLimitError("shift_product_set: product cap exceeded");
    std::vector<weyl::WeylWord> out;
    for (auto& [k, w] : seen) out.push_back(std::move(w));
    return out;
  };
  std::vector<weyl::WeylWord> level = dedup(omega);
  const std::vector<weyl::WeylWord> base = level;
  for (int j = 1; j < n; ++j) {
    std::vector<weyl::WeylWord> next;
    for (const auto& w : level)
      for (const auto& a : base) next.push_back(weyl::multiply(w, weyl::shift(a, j)));
    level = dedup(next);
  }
  return level;
}

std::vector<nctorus::Exponent> toral_product_exponents(const std::vector<nctorus::Exponent>& omega,
                                                      const nctorus::ToralMap& map,
                                                      const nctorus::PhaseMatrix& phase, int n, const Caps& caps) {
  QMETRIC_REQUIRE(n >= 1, "toral_product_exponents: n must be >= 1");
  QMETRIC_REQUIRE(!omega.empty(), "toral_product_exponents: omega must be nonempty");
  map.validate();
  QMETRIC_REQUIRE(map.p() == phase.p(), "toral_product_exponents: dimension mismatch");
  std::set<nctorus::Exponent> level(omega.begin(), omega.end());
  std::vector<nctorus::Exponent> image(omega.begin(), omega.end());  // exponents of alpha^j(omega)
  for (int j = 1; j < n; ++j) {
    for (auto& k : image) k = nctorus::toral_map_monomial(map, phase, k).first;
    std::set<nctorus::Exponent> next;
    for (const auto& x : level)
      for (const auto& y : image) {
        nctorus::Exponent z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
        next.insert(std::move(z));
        if (next.size() > caps.product_set) throw ResourceLimitError("toral_product_exponents: product cap exceeded");
      }
    level = std::move(next);
  }
  return {level.begin(), level.end()};
}

std::vector<weyl::WeylWord> site_zero_unitaries(int p) {
  QMETRIC_REQUIRE(p >= 2, "site_zero_unitaries: p must be >= 2");
  std::vector<weyl::WeylWord> out;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      weyl::WeylWord w{p, {}, 1.0};
      if (i != 0 || j != 0) w.sites.emplace(0, weyl::SiteExponent{i, j});
      out.push_back(std::move(w));
    }
  return out;
}

ShiftBracket shift_entropy_bracket(int p, int n, double delta) {
  QMETRIC_REQUIRE(p >= 2, "shift_entropy_bracket: p must be >= 2");
  QMETRIC_REQUIRE(n >= 1, "shift_entropy_bracket: n must be >= 1");
  QMETRIC_REQUIRE(delta > 0.0 && delta < 1.0, "shift_entropy_bracket: delta must lie in (0, 1)");
  const double m = std::pow(static_cast<double>(p), 2.0 * n);
  QMETRIC_REQUIRE(m < 9e15, "shift_entropy_bracket: p^(2n) too large");
  ShiftBracket b;
  b.dim_lower = approx::dim_exact_orthonormal(static_cast<std::size_t>(m), delta);
  b.lower = std::log(static_cast<double>(b.dim_lower)) / n;
  const int root = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-12));
  b.log_dim_upper = 2.0 * (2.0 * root + n) * std::log(static_cast<double>(p));
  b.upper = b.log_dim_upper / n;
  return b;
}

}  // namespace qmetric::entropy
