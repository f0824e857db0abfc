#pragma once

// JSON forms of elements and families, number formatting and grid parsing.

#include "json.hpp"
#include <string>
#include <vector>

#include "qmetric/approxdim.hpp"
#include "qmetric/nctorus.hpp"
#include "qmetric/weyl.hpp"

namespace qmetric::io {

using Json = nlohmann::json;

// 12 significant digits, '.' decimal point, independent of the locale.
std::string format_number(double x);

// "a:b:steps": steps geometrically spaced values from a to b inclusive.
std::vector<double> parse_delta_grid(const std::string& text);

// {"p", "lo", "hi", "coefficients": [[[i, j], ...], re, im], ...]}; zero coefficients omitted.
Json to_json(const weyl::WeylElement& a);
weyl::WeylElement weyl_from_json(const Json& j);

// {"p", "theta": p x p, "terms": [[k, re, im], ...]}
Json to_json(const nctorus::TwistedPolynomial& a);
nctorus::TwistedPolynomial torus_from_json(const Json& j);

// Array of vectors; each entry a number or a [re, im] pair.
approx::VectorFamily family_from_json(const Json& j);
Json to_json(const approx::VectorFamily& fam);

}  // namespace qmetric::io
