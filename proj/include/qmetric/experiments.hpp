#pragma once

// Experiments behind the command-line subcommands. Each takes a JSON config,
// fills in defaults, validates it and returns a table plus a summary object.
// Results depend only on the normalized config.

#include <string>
#include <vector>

#include "qmetric/io.hpp"

namespace qmetric::experiments {

using Json = nlohmann::json;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;  // scalar cells
};

struct Result {
  std::string command;
  Json config;  // normalized, includes "command"
  Table table;
  Json summary;
};

std::vector<std::string> commands();
Json default_config(const std::string& command);
// Merges `config` over the defaults of config["command"]; unknown keys or
// wrongly typed values throw PreconditionError.
Json normalize(const Json& config);
Result run(const Json& config);

// Header lines "# qmetric <cmd>" and "# config: <json>" (plus "# stamp:" when
// given), then the body.
std::string to_csv(const Result& r, const std::string& stamp = "");
// Column line and data rows only; what replay compares.
std::string csv_body(const Result& r);
std::string to_json_text(const Result& r, const std::string& stamp = "");

// Recovers the config from emitted CSV or JSON text, or a bare config object.
Json config_from_text(const std::string& text);

std::string format_cell(const Json& cell);

// Weyl monomials on [-n, n] scaled by the inverse of this have Lip-norm <= 1.
double uhf_lmax(int p, double lambda, int n);
// Point clouds: "grid:N", "segment:N", "jitter:N:seed", "random:N:seed".
std::vector<std::vector<double>> generate_points(const std::string& text);

}  // namespace qmetric::experiments
