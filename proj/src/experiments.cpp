#include "qmetric/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "qmetric/approxdim.hpp"
#include "qmetric/entropy.hpp"
#include "qmetric/errors.hpp"
#include "qmetric/metricspace.hpp"
#include "qmetric/nctorus.hpp"
#include "qmetric/weyl.hpp"

namespace qmetric::experiments {

namespace {

using linalg::CMatrix;
using linalg::Complex;

const Json& defaults_table() {
  static const Json table = {
      {"weyl-dim", {{"p", 2}, {"lambda", 0.5}, {"n_max", 3}, {"delta", 0.5}, {"samples", 20}, {"seed", 1}}},
      {"torus-dim", {{"p", 2}, {"theta", 0.25}, {"n_max", 8}, {"delta", 0.5}}},
      {"shift-entropy", {{"p", 2}, {"n_max", 5}, {"delta", 0.5}, {"gns_max", 4}}},
      {"toral-entropy", {{"T", {{2, 1}, {1, 1}}}, {"m", 1}, {"n", 14}, {"pad", 0.05}, {"tail", 5}}},
      {"lattice-growth", {{"T", {{2, 1}, {1, 1}}}, {"m", 1}, {"n", 10}}},
      {"kolmogorov",
       {{"points", ""}, {"generate", "grid:32"}, {"metric", "euclidean"}, {"delta_grid", "0.5:0.0625:4"},
        {"kolm_delta", 0.0}}},
      {"cesaro-rate", {{"n_min", 16}, {"n_max", 4096}, {"steps", 9}, {"fit_max", 64}, {"grid", 2048}}},
      {"dim-bracket",
       {{"family", ""}, {"generate", "orthonormal:16:1"}, {"delta_grid", "0.9:0.3:3"}, {"convention", "strict"}}},
  };
  return table;
}

bool same_kind(const Json& a, const Json& b) {
  if (a.is_number() && b.is_number()) return !a.is_number_integer() || b.is_number_integer();
  return a.type() == b.type();
}

template <class T>
T get(const Json& cfg, const char* key) {
  return cfg.at(key).get<T>();
}

entropy::IntMatrix int_matrix(const Json& j) {
  entropy::IntMatrix T;
  QMETRIC_REQUIRE(j.is_array() && !j.empty(), "T must be a nonempty square integer matrix");
  for (const auto& row : j) {
    QMETRIC_REQUIRE(row.is_array() && row.size() == j.size(), "T must be square");
    std::vector<long long> r;
    for (const auto& x : row) {
      QMETRIC_REQUIRE(x.is_number_integer(), "T entries must be integers");
      r.push_back(x.get<long long>());
    }
    T.push_back(std::move(r));
  }
  return T;
}

void require_range(bool ok, const std::string& msg) { QMETRIC_REQUIRE(ok, msg); }

// Coefficient vectors of every Weyl monomial on the window, in index order.
CMatrix monomial_family(const weyl::WeylWindow& w) {
  const std::size_t m = static_cast<std::size_t>(std::pow(w.p, 2 * w.length()));
  const weyl::WeylCoefficients probe(w, std::vector<Complex>(m));
  CMatrix out(m, m);
  for (std::size_t idx = 0; idx < m; ++idx) {
    const auto mono = weyl::weyl_monomial(w, probe.exponents_of(idx));
    const auto c = mono.coefficients().values();
    for (std::size_t r = 0; r < m; ++r) out(r, idx) = c[r];
  }
  return out;
}

Result weyl_dim(const Json& cfg) {
  const int p = get<int>(cfg, "p"), n_max = get<int>(cfg, "n_max"), samples = get<int>(cfg, "samples");
  const double lambda = get<double>(cfg, "lambda"), delta = get<double>(cfg, "delta");
  require_range(p >= 2 && p <= 3, "weyl-dim: p must be 2 or 3");
  require_range(lambda > 0.0 && lambda < 1.0, "weyl-dim: lambda must lie in (0, 1)");
  require_range(n_max >= 1 && n_max <= 3, "weyl-dim: n_max must lie in [1, 3]");
  require_range(delta > 0.0 && delta < 1.0, "weyl-dim: delta must lie in (0, 1)");
  require_range(samples >= 0, "weyl-dim: samples must be >= 0");
  std::mt19937_64 rng(get<std::uint64_t>(cfg, "seed"));
  std::normal_distribution<double> gauss;

  Result r;
  r.table.columns = {"n", "sites", "m", "lmax", "delta_lower", "dim_lower", "gns_route", "delta_upper", "dim_upper",
                     "residual_ratio_max"};
  std::vector<approx::DimBracket> lower_series, upper_series;
  for (int n = 1; n <= n_max; ++n) {
    const int sites = 2 * n + 1;
    const double m = std::pow(p, 2.0 * sites);
    const double lmax = uhf_lmax(p, lambda, n);
    const double delta_lo = delta / lmax;
    const std::size_t d_closed = approx::dim_exact_orthonormal(static_cast<std::size_t>(m), delta);

    // GNS vectors of the monomials on [-n, n] are distinct coordinate vectors.
    std::string route;
    const weyl::WeylWindow w{p, -n, n};
    if (m <= 1024) {
      const approx::VectorFamily fam(monomial_family(w));
      const std::size_t lo = approx::dim_lower_spectral(fam, delta);
      if (lo != d_closed) throw NumericalError("weyl-dim: spectral bound disagrees with the orthonormal closed form");
      route = "svd";
    } else {
      const std::size_t mm = static_cast<std::size_t>(m);
      const weyl::WeylCoefficients probe(w, std::vector<Complex>(mm));
      std::uniform_int_distribution<std::size_t> pick(0, mm - 1);
      for (int s = 0; s < 64; ++s) {
        const std::size_t idx = pick(rng);
        const auto mono = weyl::weyl_monomial(w, probe.exponents_of(idx));
        const auto c = mono.coefficients().values();
        for (std::size_t k = 0; k < mm; ++k)
          if (std::abs(c[k] - Complex(k == idx ? 1.0 : 0.0)) > 1e-12)
            throw NumericalError("weyl-dim: monomial coefficient vector is not a coordinate vector");
      }
      route = "coordinate";
    }

    // Residual check on random elements supported on at most 3 sites of [-n-1, n+1].
    const double delta_up = 2.0 * std::pow(lambda, n + 1) / (1.0 - lambda);
    double worst = 0.0;
    const weyl::WeylWindow big{p, -n - 1, n + 1};
    for (int s = 0; s < samples; ++s) {
      std::vector<int> all;
      for (int k = big.lo; k <= big.hi; ++k) all.push_back(k);
      std::shuffle(all.begin(), all.end(), rng);
      const int count = 1 + static_cast<int>(rng() % 3);
      std::vector<int> support(all.begin(), all.begin() + count);
      // Make sure something lives outside [-n, n].
      if (std::none_of(support.begin(), support.end(), [&](int k) { return std::abs(k) > n; }))
        support[0] = (rng() % 2) ? n + 1 : -n - 1;
      std::sort(support.begin(), support.end());
      support.erase(std::unique(support.begin(), support.end()), support.end());

      const std::size_t total = static_cast<std::size_t>(std::pow(p, 2 * big.length()));
      std::vector<Complex> values(total, 0.0);
      const weyl::WeylCoefficients probe(big, values);
      const int local = static_cast<int>(std::pow(p * p, static_cast<int>(support.size())));
      for (int code = 0; code < local; ++code) {
        std::vector<weyl::SiteExponent> ex(big.length(), {0, 0});
        int c = code;
        for (int k : support) {
          ex[k - big.lo] = {(c % (p * p)) / p, c % p};
          c /= p * p;
        }
        values[probe.index_of(ex)] = Complex(gauss(rng), gauss(rng));
      }
      const auto a = weyl::WeylElement::from_coefficients(weyl::WeylCoefficients(big, values));
      const double L = weyl::weyl_lip_norm(a, lambda);
      const double res = linalg::singular_values((a - weyl::conditional_expectation(a, n)).matrix()).largest();
      worst = std::max(worst, res / (L * delta_up));
    }

    r.table.rows.push_back({n, sites, m, lmax, delta_lo, d_closed, route, delta_up, m, worst});
    lower_series.push_back({delta_lo, d_closed, d_closed, approx::NormTag::Gns});
    upper_series.push_back({delta_up, static_cast<std::size_t>(m), static_cast<std::size_t>(m), approx::NormTag::Gns});
  }
  const double target = 4.0 * std::log(p) / std::log(1.0 / lambda);
  r.summary = {{"target", target}};
  if (n_max >= 3) {
    const double lo = approx::mdim_regression(lower_series).slope_lower;
    const double hi = approx::mdim_regression(upper_series).slope_upper;
    r.summary["slope_lower"] = lo;
    r.summary["slope_upper"] = hi;
    r.summary["contains_target"] = lo <= target * (1 + 1e-9) && target <= hi * (1 + 1e-9);
  }
  return r;
}

Result torus_dim(const Json& cfg) {
  const int p = get<int>(cfg, "p"), n_max = get<int>(cfg, "n_max");
  const double theta = get<double>(cfg, "theta"), delta = get<double>(cfg, "delta");
  require_range(p >= 1 && p <= 6, "torus-dim: p must lie in [1, 6]");
  require_range(n_max >= 3 && n_max <= 1000, "torus-dim: n_max must lie in [3, 1000]");
  require_range(delta > 0.0 && delta < 1.0, "torus-dim: delta must lie in (0, 1)");
  require_range(std::isfinite(theta), "torus-dim: theta must be finite");
  std::vector<std::vector<double>> th(p, std::vector<double>(p, 0.0));
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      th[i][j] = theta;
      th[j][i] = -theta;
    }
  const auto phase = nctorus::PhaseMatrix::from_matrix(th);

  Result r;
  r.table.columns = {"n", "card", "lip_max", "delta_lower", "dim_lower", "delta_upper", "dim_upper"};
  std::vector<approx::DimBracket> lo, hi;
  for (int n = 1; n <= n_max; ++n) {
    const double card = std::pow(2.0 * n + 1.0, p);
    QMETRIC_REQUIRE(card < 9e15, "torus-dim: (2n+1)^p too large");
    // u^(n,...,n) has the largest Lip-norm among the monomials of the cube.
    const auto corner = nctorus::TwistedPolynomial::monomial(phase, nctorus::Exponent(p, n));
    const double lip_max = nctorus::lip_bounds(corner).upper;
    const double d_lo = delta / lip_max;
    const std::size_t dim_lo = approx::dim_exact_orthonormal(static_cast<std::size_t>(card), delta);
    const double d_up = 2.0 * std::numbers::pi * p * nctorus::fejer_abs_moment(n);
    r.table.rows.push_back({n, card, lip_max, d_lo, dim_lo, d_up, card});
    lo.push_back({d_lo, dim_lo, dim_lo, approx::NormTag::CStarBracket});
    hi.push_back({d_up, static_cast<std::size_t>(card), static_cast<std::size_t>(card), approx::NormTag::CStarBracket});
  }
  std::sort(hi.begin(), hi.end(), [](const auto& a, const auto& b) { return a.delta > b.delta; });
  r.summary = {{"target", p},
               {"slope_lower", approx::mdim_regression(lo).slope_lower},
               {"slope_upper", approx::mdim_regression(hi).slope_upper}};
  return r;
}

Result shift_entropy(const Json& cfg) {
  const int p = get<int>(cfg, "p"), n_max = get<int>(cfg, "n_max"), gns_max = get<int>(cfg, "gns_max");
  const double delta = get<double>(cfg, "delta");
  require_range(p >= 2 && p <= 16, "shift-entropy: p must lie in [2, 16]");
  require_range(n_max >= 1 && n_max <= 12, "shift-entropy: n_max must lie in [1, 12]");
  require_range(delta > 0.0 && delta < 1.0, "shift-entropy: delta must lie in (0, 1)");
  require_range(gns_max >= 0 && gns_max <= 6, "shift-entropy: gns_max must lie in [0, 6]");
  Result r;
  r.table.columns = {"n", "dim_lower", "lower", "upper", "target_inside", "gns_lower", "gns_upper"};
  const double target = 2.0 * std::log(p);
  bool all_inside = true;
  for (int n = 1; n <= n_max; ++n) {
    const auto b = entropy::shift_entropy_bracket(p, n, delta);
    const bool inside = b.lower <= target && target <= b.upper;
    all_inside = all_inside && inside;
    Json gl = "na", gu = "na";
    if (n <= gns_max && std::pow(p, 2.0 * n) <= 1024) {
      // D_tau from the GNS vectors of the actual product set.
      const auto words = entropy::shift_product_set(entropy::site_zero_unitaries(p), n);
      const weyl::WeylWindow w{p, 0, n - 1};
      CMatrix fam(static_cast<std::size_t>(std::pow(p, 2 * n)), words.size());
      for (std::size_t k = 0; k < words.size(); ++k) {
        const auto element = weyl::to_element(words[k], w);
        const auto c = element.coefficients().values();
        for (std::size_t i = 0; i < c.size(); ++i) fam(i, k) = c[i];
      }
      const approx::VectorFamily vf(fam);
      gl = approx::dim_lower_spectral(vf, delta);
      gu = approx::dim_upper_svd(vf, delta).dim;
    }
    r.table.rows.push_back({n, b.dim_lower, b.lower, b.upper, inside, gl, gu});
  }
  r.summary = {{"target", target}, {"all_inside", all_inside}};
  return r;
}

Result toral_entropy(const Json& cfg) {
  const auto T = int_matrix(cfg.at("T"));
  const int m = get<int>(cfg, "m"), n = get<int>(cfg, "n"), tail = get<int>(cfg, "tail");
  const double pad = get<double>(cfg, "pad");
  require_range(m >= 1, "toral-entropy: m must be >= 1");
  require_range(n >= 3, "toral-entropy: n must be >= 3");
  require_range(tail >= 3 && tail <= n, "toral-entropy: tail must lie in [3, n]");
  const auto series = entropy::lattice_orbit_card(T, m, n);
  const auto est = entropy::entropy_slope(series, tail);
  const auto box = entropy::box_bound_card(T, m, n, pad);
  const double h = entropy::eigen_entropy(T);
  Result r;
  r.table.columns = {"n", "card", "log_diff", "box_bound", "bound_ratio"};
  double min_ratio = INFINITY;
  for (int j = 1; j <= n; ++j) {
    const double c = static_cast<double>(series.counts[j - 1]);
    const double ratio = box.bounds[j - 1] / c;
    min_ratio = std::min(min_ratio, ratio);
    r.table.rows.push_back({j, series.counts[j - 1], j == 1 ? Json("na") : Json(est.diffs[j - 2]), box.bounds[j - 1], ratio});
  }
  r.summary = {{"eigen_entropy", h},
               {"slope", est.slope},
               {"relative_error", h > 0 ? std::abs(est.slope - h) / h : est.slope},
               {"min_bound_ratio", min_ratio},
               {"defective", box.defective}};
  return r;
}

Result lattice_growth(const Json& cfg) {
  const auto T = int_matrix(cfg.at("T"));
  const int m = get<int>(cfg, "m"), n = get<int>(cfg, "n");
  require_range(m >= 0 && n >= 1, "lattice-growth: need m >= 0 and n >= 1");
  const auto series = entropy::lattice_orbit_card(T, m, n);
  Result r;
  r.table.columns = {"n", "card", "log_diff"};
  for (int j = 1; j <= n; ++j) {
    const double d = j == 1 ? 0.0
                            : std::log(static_cast<double>(series.counts[j - 1])) -
                                  std::log(static_cast<double>(series.counts[j - 2]));
    r.table.rows.push_back({j, series.counts[j - 1], j == 1 ? Json("na") : Json(d)});
  }
  r.summary = {{"final_card", series.counts.back()}};
  if (n <= 6) r.summary["literal_agrees"] = entropy::lattice_orbit_card_literal(T, m, n).counts == series.counts;
  return r;
}

Result kolmogorov(const Json& cfg) {
  const auto path = get<std::string>(cfg, "points"), gen = get<std::string>(cfg, "generate");
  const auto metric_kind = get<std::string>(cfg, "metric");
  const auto grid = io::parse_delta_grid(get<std::string>(cfg, "delta_grid"));
  const double kd = get<double>(cfg, "kolm_delta");
  require_range(metric_kind == "euclidean" || metric_kind == "matrix", "kolmogorov: metric must be euclidean or matrix");
  require_range(kd >= 0.0, "kolmogorov: kolm_delta must be >= 0");
  std::vector<std::vector<double>> rows;
  if (!path.empty()) {
    std::ifstream in(path);
    QMETRIC_REQUIRE(in.good(), "kolmogorov: cannot open points file '" + path + "'");
    rows = metric::read_csv_rows(in);
  } else {
    require_range(metric_kind == "euclidean", "kolmogorov: generated clouds use the euclidean metric");
    rows = generate_points(gen);
  }
  const auto space = metric_kind == "matrix" ? metric::FiniteMetricSpace::from_matrix(rows)
                                             : metric::FiniteMetricSpace::from_points(rows);
  const auto box = metric::box_dimension(space, grid);
  Result r;
  r.table.columns = {"delta", "sep", "spn", "cover", "sep_exact", "spn_exact", "cover_exact"};
  for (const auto& s : box.stats)
    r.table.rows.push_back({s.delta, s.sep, s.spn, s.cover, s.sep_exact, s.spn_exact, s.cover_exact});
  r.summary = {{"points", space.size()},
               {"slope_sep", box.slope_sep},
               {"slope_spn", box.slope_spn},
               {"slope_cover", box.slope_cover}};
  if (kd > 0.0) {
    const auto b = metric::kolm_unitaries(space, kd);
    r.summary["kolm"] = {{"delta", kd},
                         {"r", b.r()},
                         {"gram_defect", b.orthonormality_defect},
                         {"max_lip_f_delta", *std::max_element(b.lip_f.begin(), b.lip_f.end()) * kd},
                         {"max_lip_g_delta", *std::max_element(b.lip_g.begin(), b.lip_g.end()) * kd},
                         {"lip_u_factor", b.lip_u_factor}};
  }
  return r;
}

// sup over a grid of |f - sigma_n f| for f(t) = |t| on [-1/2, 1/2).
double cesaro_sup_error(int n, int grid) {
  std::vector<double> w;  // coefficients of cos(2 pi k t), odd k
  for (int k = 1; k <= n; k += 2)
    w.push_back((1.0 - k / (n + 1.0)) * (-2.0 / (std::numbers::pi * std::numbers::pi * k * k)));
  double worst = 0.0;
  for (int g = 0; g < grid; ++g) {
    const double t = -0.5 + static_cast<double>(g) / grid;
    double s = 0.25;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::cos(2.0 * std::numbers::pi * (2 * i + 1) * t);
    worst = std::max(worst, std::abs(std::abs(t) - s));
  }
  return worst;
}

Result cesaro_rate(const Json& cfg) {
  const int n_min = get<int>(cfg, "n_min"), n_max = get<int>(cfg, "n_max"), steps = get<int>(cfg, "steps");
  const int fit_max = get<int>(cfg, "fit_max"), grid = get<int>(cfg, "grid");
  require_range(n_min >= 2 && n_max > n_min && n_max <= 1 << 16, "cesaro-rate: need 2 <= n_min < n_max <= 65536");
  require_range(steps >= 2 && steps <= 64, "cesaro-rate: steps must lie in [2, 64]");
  require_range(fit_max >= n_min && fit_max <= n_max, "cesaro-rate: fit_max must lie in [n_min, n_max]");
  require_range(grid >= 16 && grid <= 1 << 16, "cesaro-rate: grid must lie in [16, 65536]");
  std::vector<int> ns;
  for (int i = 0; i < steps; ++i) {
    const int n = static_cast<int>(std::lround(n_min * std::pow(static_cast<double>(n_max) / n_min, i / (steps - 1.0))));
    if (ns.empty() || n != ns.back()) ns.push_back(n);
  }
  struct Row {
    int n;
    double integral, moment, err;
  };
  std::vector<Row> data;
  double C = 0.0, moment_const = 0.0;
  for (int n : ns) {
    // Trapezoid rule on 2(n+1) nodes is exact for the kernel, a trigonometric polynomial of degree n.
    const int nodes = 2 * (n + 1);
    double integral = 0.0;
    for (int g = 0; g < nodes; ++g) integral += nctorus::fejer_eval(n, -0.5 + static_cast<double>(g) / nodes);
    integral /= nodes;
    const double moment = nctorus::fejer_abs_moment(n);
    const double err = std::max(cesaro_sup_error(n, grid), moment);
    data.push_back({n, integral, moment, err});
    const double scale = n / std::log(static_cast<double>(n));
    moment_const = std::max(moment_const, moment * scale);
    if (n <= fit_max) C = std::max(C, err * scale);
  }
  Result r;
  r.table.columns = {"n", "kernel_integral", "abs_moment", "moment_ratio", "sup_error", "error_ratio", "within_fit"};
  bool all_within = true;
  for (const auto& d : data) {
    const double scale = d.n / std::log(static_cast<double>(d.n));
    const bool ok = d.err <= C * std::log(static_cast<double>(d.n)) / d.n;
    all_within = all_within && ok;
    r.table.rows.push_back({d.n, d.integral, d.moment, d.moment * scale, d.err, d.err * scale, ok});
  }
  r.summary = {{"fitted_C", C}, {"moment_constant", moment_const}, {"all_within", all_within}};
  return r;
}

Result dim_bracket(const Json& cfg) {
  const auto path = get<std::string>(cfg, "family"), gen = get<std::string>(cfg, "generate");
  const auto grid = io::parse_delta_grid(get<std::string>(cfg, "delta_grid"));
  const auto conv_name = get<std::string>(cfg, "convention");
  require_range(conv_name == "strict" || conv_name == "nonstrict", "dim-bracket: convention must be strict or nonstrict");
  const auto conv = conv_name == "strict" ? approx::Convention::Strict : approx::Convention::NonStrict;
  std::optional<approx::VectorFamily> fam;
  bool orthonormal = false;
  if (!path.empty()) {
    std::ifstream in(path);
    QMETRIC_REQUIRE(in.good(), "dim-bracket: cannot open family file '" + path + "'");
    Json j;
    try {
      in >> j;
    } catch (const Json::exception& e) {
      throw PreconditionError(std::string("dim-bracket: malformed family JSON: ") + e.what());
    }
    fam = io::family_from_json(j);
  } else {
    std::stringstream ss(gen);
    std::string kind, a, b;
    std::getline(ss, kind, ':');
    std::getline(ss, a, ':');
    std::getline(ss, b, ':');
    QMETRIC_REQUIRE(kind == "orthonormal" && !a.empty() && !b.empty(),
                    "dim-bracket: generate must be orthonormal:m:seed");
    int m = 0;
    std::uint64_t seed = 0;
    try {
      m = std::stoi(a);
      seed = std::stoull(b);
    } catch (const std::logic_error&) {
      throw PreconditionError("dim-bracket: generate must be orthonormal:m:seed");
    }
    QMETRIC_REQUIRE(m >= 1 && m <= 1024, "dim-bracket: m must lie in [1, 1024]");
    std::mt19937_64 rng(seed);
    fam = approx::VectorFamily(linalg::random_unitary(static_cast<std::size_t>(m), rng));
    orthonormal = true;
  }
  Result r;
  r.table.columns = {"delta", "lower", "upper", "norm_tag", "exact_orthonormal"};
  for (double d : grid) {
    const auto b = approx::dim_bracket(*fam, d, conv);
    r.table.rows.push_back({d, b.lower, b.upper, approx::to_string(b.norm_tag),
                            orthonormal ? Json(approx::dim_exact_orthonormal(fam->size(), d, conv)) : Json("na")});
  }
  r.summary = {{"ambient_dim", fam->ambient_dim()}, {"size", fam->size()}};
  return r;
}

}  // namespace

std::vector<std::string> commands() {
  std::vector<std::string> out;
  for (const auto& [k, v] : defaults_table().items()) out.push_back(k);
  return out;
}

Json default_config(const std::string& command) {
  const auto& t = defaults_table();
  QMETRIC_REQUIRE(t.contains(command), "unknown command '" + command + "'");
  Json out = t.at(command);
  out["command"] = command;
  return out;
}

Json normalize(const Json& config) {
  QMETRIC_REQUIRE(config.is_object() && config.contains("command") && config["command"].is_string(),
                  "config must be an object with a command");
  Json out = default_config(config["command"].get<std::string>());
  for (const auto& [key, value] : config.items()) {
    if (key == "command") continue;
    QMETRIC_REQUIRE(out.contains(key), "unknown parameter '" + key + "' for " + out["command"].get<std::string>());
    QMETRIC_REQUIRE(same_kind(value, out[key]), "parameter '" + key + "' has the wrong type");
    out[key] = value;
  }
  if (out.contains("seed")) QMETRIC_REQUIRE(out["seed"].get<long long>() >= 0, "seed must be >= 0");
  return out;
}

Result run(const Json& config) {
  const Json cfg = normalize(config);
  const auto cmd = cfg["command"].get<std::string>();
  Result r;
  try {
    if (cmd == "weyl-dim") r = weyl_dim(cfg);
    else if (cmd == "torus-dim") r = torus_dim(cfg);
    else if (cmd == "shift-entropy") r = shift_entropy(cfg);
    else if (cmd == "toral-entropy") r = toral_entropy(cfg);
    else if (cmd == "lattice-growth") r = lattice_growth(cfg);
    else if (cmd == "kolmogorov") r = kolmogorov(cfg);
    else if (cmd == "cesaro-rate") r = cesaro_rate(cfg);
    else r = dim_bracket(cfg);
  } catch (const Json::exception& e) {
    throw PreconditionError(cmd + ": " + e.what());
  }
  r.command = cmd;
  r.config = cfg;
  return r;
}

std::string format_cell(const Json& c) {
  if (c.is_boolean()) return c.get<bool>() ? "true" : "false";
  if (c.is_number_integer()) return c.dump();
  if (c.is_number()) return io::format_number(c.get<double>());
  if (c.is_string()) return c.get<std::string>();
  return c.dump();
}

std::string csv_body(const Result& r) {
  std::string out;
  for (std::size_t i = 0; i < r.table.columns.size(); ++i) out += (i ? "," : "") + r.table.columns[i];
  out += "\n";
  for (const auto& row : r.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
    out += "\n";
  }
  return out;
}

std::string to_csv(const Result& r, const std::string& stamp) {
  std::string out = "# qmetric " + r.command + "\n# config: " + r.config.dump() + "\n";
  if (!stamp.empty()) out += "# stamp: " + stamp + "\n";
  return out + csv_body(r);
}

std::string to_json_text(const Result& r, const std::string& stamp) {
  Json rows = Json::array();
  for (const auto& row : r.table.rows) {
    Json jr = Json::array();
    for (const auto& c : row) jr.push_back(c);
    rows.push_back(jr);
  }
  Json out = {{"command", r.command}, {"config", r.config}, {"columns", r.table.columns}, {"rows", rows},
              {"summary", r.summary}};
  if (!stamp.empty()) out["stamp"] = stamp;
  return out.dump(2) + "\n";
}

Json config_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string tag = "# config: ";
    if (line.rfind(tag, 0) == 0) {
      try {
        return Json::parse(line.substr(tag.size()));
      } catch (const Json::exception& e) {
        throw PreconditionError(std::string("malformed config line: ") + e.what());
      }
    }
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception&) {
    throw PreconditionError("no '# config:' line and not valid JSON");
  }
  if (j.is_object() && j.contains("config")) return j["config"];
  return j;
}

double uhf_lmax(int p, double lambda, int n) {
  QMETRIC_REQUIRE(lambda > 0.0 && lambda < 1.0, "uhf_lmax: lambda must lie in (0, 1)");
  QMETRIC_REQUIRE(n >= 0, "uhf_lmax: n must be >= 0");
  // For a monomial w, |chi_g - 1| <= sum_k |chi_(g_k) - 1|, so L(w) is at most
  // the largest single-site value, which is lambda^-|k| times the site-0 value.
  const weyl::WeylWindow w{p, 0, 0};
  double best = 0.0;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      if (i == 0 && j == 0) continue;
      const std::vector<weyl::SiteExponent> ex{{i, j}};
      best = std::max(best, weyl::weyl_lip_norm(weyl::weyl_monomial(w, ex), lambda));
    }
  return best * std::pow(lambda, -n);
}

std::vector<std::vector<double>> generate_points(const std::string& text) {
  std::stringstream ss(text);
  std::vector<std::string> parts;
  for (std::string s; std::getline(ss, s, ':');) parts.push_back(s);
  QMETRIC_REQUIRE(parts.size() >= 2, "generator must look like grid:N, segment:N, jitter:N:seed or random:N:seed");
  long n = 0;
  std::uint64_t seed = 0;
  try {
    n = std::stol(parts[1]);
    if (parts.size() > 2) seed = std::stoull(parts[2]);
  } catch (const std::logic_error&) {
    throw PreconditionError("generator '" + text + "': bad number");
  }
  const auto& kind = parts[0];
  const bool seeded = kind == "jitter" || kind == "random";
  QMETRIC_REQUIRE(parts.size() == (seeded ? 3u : 2u), "generator '" + text + "': wrong number of fields");
  std::vector<std::vector<double>> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (kind == "grid") {
    QMETRIC_REQUIRE(n >= 2 && n <= 64, "grid side must lie in [2, 64]");
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) out.push_back({i / (n - 1.0), j / (n - 1.0)});
  } else if (kind == "segment") {
    QMETRIC_REQUIRE(n >= 2 && n <= 4096, "segment size must lie in [2, 4096]");
    for (long i = 0; i < n; ++i) out.push_back({i / (n - 1.0)});
  } else if (kind == "jitter") {
    // Cell centres moved by at most 0.08/N per coordinate: spacing stays above 0.84/N.
    QMETRIC_REQUIRE(n >= 1 && n <= 64, "jitter side must lie in [1, 64]");
    const double amp = 0.08 / n;
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j)
        out.push_back({(i + 0.5) / n + amp * (2 * unit(rng) - 1), (j + 0.5) / n + amp * (2 * unit(rng) - 1)});
  } else if (kind == "random") {
    QMETRIC_REQUIRE(n >= 1 && n <= 4096, "random count must lie in [1, 4096]");
    for (long i = 0; i < n; ++i) out.push_back({unit(rng), unit(rng)});
  } else {
    throw PreconditionError("unknown generator '" + kind + "'");
  }
  return out;
}

}  // namespace qmetric::experiments
