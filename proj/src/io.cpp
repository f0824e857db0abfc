#include "qmetric/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "qmetric/errors.hpp"

namespace qmetric::io {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_delta_grid(const std::string& text) {
  std::stringstream ss(text);
  std::string a, b, s;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, s) || s.find(':') != std::string::npos)
    throw PreconditionError("delta grid must have the form a:b:steps, got '" + text + "'");
  double lo = 0.0, hi = 0.0;
  long steps = 0;
  try {
    std::size_t used = 0;
    lo = std::stod(a, &used);
    QMETRIC_REQUIRE(used == a.size(), "trailing characters");
    hi = std::stod(b, &used);
    QMETRIC_REQUIRE(used == b.size(), "trailing characters");
    steps = std::stol(s, &used);
    QMETRIC_REQUIRE(used == s.size(), "trailing characters");
  } catch (const std::logic_error&) {
    throw PreconditionError("delta grid must have the form a:b:steps, got '" + text + "'");
  }
  QMETRIC_REQUIRE(std::isfinite(lo) && std::isfinite(hi) && lo > 0.0 && hi > 0.0, "delta grid endpoints must be positive");
  QMETRIC_REQUIRE(steps >= 1 && steps <= 100000, "delta grid needs between 1 and 100000 steps");
  QMETRIC_REQUIRE(steps > 1 || lo == hi, "a single-step delta grid needs a == b");
  std::vector<double> out;
  for (long i = 0; i < steps; ++i) {
    if (i == 0) out.push_back(lo);
    else if (i == steps - 1) out.push_back(hi);
    else out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(steps - 1)));
  }
  return out;
}

namespace {

linalg::Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  QMETRIC_REQUIRE(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
                  "complex entries must be numbers or [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Json to_json(const weyl::WeylElement& a) {
  const auto& w = a.window();
  const auto& c = a.coefficients();
  Json coeffs = Json::array();
  for (std::size_t idx = 0; idx < c.size(); ++idx) {
    const auto z = c.values()[idx];
    if (z == linalg::Complex(0.0)) continue;
    Json ex = Json::array();
    for (const auto& [i, jj] : c.exponents_of(idx)) ex.push_back({i, jj});
    coeffs.push_back({ex, z.real(), z.imag()});
  }
  return {{"p", w.p}, {"lo", w.lo}, {"hi", w.hi}, {"coefficients", coeffs}};
}

weyl::WeylElement weyl_from_json(const Json& j) {
  try {
    weyl::WeylWindow w{j.at("p").get<int>(), j.at("lo").get<int>(), j.at("hi").get<int>()};
    w.validate();
    std::vector<linalg::Complex> values(static_cast<std::size_t>(std::pow(w.p, 2 * w.length())), 0.0);
    weyl::WeylCoefficients probe(w, values);
    for (const auto& term : j.at("coefficients")) {
      QMETRIC_REQUIRE(term.is_array() && term.size() == 3, "coefficient entries must be [exponents, re, im]");
      std::vector<weyl::SiteExponent> ex;
      for (const auto& e : term[0]) ex.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      values[probe.index_of(ex)] += linalg::Complex(term[1].get<double>(), term[2].get<double>());
    }
    return weyl::WeylElement::from_coefficients(weyl::WeylCoefficients(w, std::move(values)));
  } catch (const Json::exception& e) {
    throw PreconditionError(std::string("malformed Weyl element JSON: ") + e.what());
  }
}

Json to_json(const nctorus::TwistedPolynomial& a) {
  Json terms = Json::array();
  for (const auto& [k, c] : a.terms()) terms.push_back({k, c.real(), c.imag()});
  return {{"p", a.phase().p()}, {"theta", a.phase().matrix()}, {"terms", terms}};
}

nctorus::TwistedPolynomial torus_from_json(const Json& j) {
  try {
    const int p = j.at("p").get<int>();
    const auto phase = j.contains("theta")
                           ? nctorus::PhaseMatrix::from_matrix(j.at("theta").get<std::vector<std::vector<double>>>())
                           : nctorus::PhaseMatrix(p);
    QMETRIC_REQUIRE(phase.p() == p, "theta must be p x p");
    nctorus::TwistedPolynomial out(phase);
    for (const auto& term : j.at("terms")) {
      QMETRIC_REQUIRE(term.is_array() && term.size() == 3, "terms must be [k, re, im]");
      out.add_term(term[0].get<nctorus::Exponent>(), {term[1].get<double>(), term[2].get<double>()});
    }
    return out;
  } catch (const Json::exception& e) {
    throw PreconditionError(std::string("malformed twisted polynomial JSON: ") + e.what());
  }
}

approx::VectorFamily family_from_json(const Json& j) {
  QMETRIC_REQUIRE(j.is_array() && !j.empty(), "vector family must be a nonempty array of vectors");
  std::vector<std::vector<linalg::Complex>> cols;
  for (const auto& v : j) {
    QMETRIC_REQUIRE(v.is_array(), "each family member must be an array");
    std::vector<linalg::Complex> col;
    for (const auto& x : v) col.push_back(complex_from_json(x));
    cols.push_back(std::move(col));
  }
  return approx::VectorFamily::from_columns(cols);
}

Json to_json(const approx::VectorFamily& fam) {
  Json out = Json::array();
  for (std::size_t j = 0; j < fam.size(); ++j) {
    Json col = Json::array();
    for (std::size_t i = 0; i < fam.ambient_dim(); ++i) col.push_back({fam.matrix()(i, j).real(), fam.matrix()(i, j).imag()});
    out.push_back(col);
  }
  return out;
}

}  // namespace qmetric::io
