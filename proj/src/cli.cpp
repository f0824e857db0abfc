#include "qmetric/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "qmetric/errors.hpp"
#include "qmetric/experiments.hpp"

namespace qmetric::cli {

namespace {

using experiments::Json;

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

Json parse_matrix(const std::string& text) {
  std::vector<long long> v;
  std::stringstream ss(text);
  for (std::string cell; std::getline(ss, cell, ',');) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoll(cell, &used));
      QMETRIC_REQUIRE(used == cell.size(), "trailing characters");
    } catch (const std::logic_error&) {
      throw PreconditionError("--T expects comma-separated integers, got '" + text + "'");
    }
  }
  std::size_t n = 0;
  while (n * n < v.size()) ++n;
  QMETRIC_REQUIRE(n >= 1 && n * n == v.size(), "--T needs a square number of entries");
  Json T = Json::array();
  for (std::size_t i = 0; i < n; ++i) T.push_back(std::vector<long long>(v.begin() + i * n, v.begin() + (i + 1) * n));
  return T;
}

Json convert(const std::string& key, const std::string& text, const Json& like) {
  if (key == "T") return parse_matrix(text);
  try {
    std::size_t used = 0;
    if (like.is_number_integer()) {
      const long long x = std::stoll(text, &used);
      QMETRIC_REQUIRE(used == text.size(), "trailing characters");
      return x;
    }
    if (like.is_number()) {
      const double x = std::stod(text, &used);
      QMETRIC_REQUIRE(used == text.size(), "trailing characters");
      return x;
    }
  } catch (const std::logic_error&) {
    throw PreconditionError(flag_name(key) + ": cannot parse '" + text + "'");
  }
  return text;
}

std::string utc_stamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string render(const experiments::Result& r, const std::string& format, const std::string& stamp) {
  if (format == "json") return experiments::to_json_text(r, stamp);
  return experiments::to_csv(r, stamp) + "# summary: " + r.summary.dump() + "\n";
}

struct Output {
  std::string format = "csv";
  std::string out;
  std::string json;
  bool stamp = false;
};

void add_output_options(CLI::App* app, Output& o) {
  app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--out", o.out, "output file (default stdout)");
  app->add_option("--json", o.json, "also write the summary object to this file");
  app->add_flag("--stamp", o.stamp, "add a UTC timestamp line to the header");
}

void emit(const experiments::Result& r, const Output& o, std::ostream& out) {
  const std::string text = render(r, o.format, o.stamp ? utc_stamp() : "");
  if (o.out.empty()) {
    out << text;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    QMETRIC_REQUIRE(f.good(), "cannot open output file '" + o.out + "'");
    f << text;
  }
  if (!o.json.empty()) {
    std::ofstream f(o.json, std::ios::binary);
    QMETRIC_REQUIRE(f.good(), "cannot open summary file '" + o.json + "'");
    f << r.summary.dump(2) << "\n";
  }
}

}  // namespace

std::string describe(const std::string& cmd) {
  static const std::map<std::string, std::string> text{
      {"weyl-dim", "dimension brackets for Weyl tensor windows and their log-log slopes"},
      {"torus-dim", "dimension brackets for Fourier truncations of the noncommutative torus"},
      {"shift-entropy", "entropy bracket for the shift on tensor powers of M_p"},
      {"toral-entropy", "lattice growth, eigenvalue entropy and box bound for a toral map"},
      {"lattice-growth", "orbit sum-set cardinalities K + TK + ... for an integer matrix"},
      {"kolmogorov", "net statistics and box dimension of a point cloud"},
      {"cesaro-rate", "Fejer kernel integrals, moments and Cesaro convergence rate"},
      {"dim-bracket", "dimension bracket of a vector family over a delta grid"},
  };
  const auto it = text.find(cmd);
  return it == text.end() ? std::string() : it->second;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"qmetric: quantum metric dimension and entropy experiments"};
  app.require_subcommand(1);
  Output output;
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, CLI::App*> subs;

  for (const auto& cmd : experiments::commands()) {
    CLI::App* sub = app.add_subcommand(cmd, describe(cmd));
    subs[cmd] = sub;
    const Json defaults = experiments::default_config(cmd);
    for (const auto& [key, value] : defaults.items()) {
      if (key == "command") continue;
      std::string names = flag_name(key);
      if (cmd == "shift-entropy" && key == "n_max") names += ",--n";
      sub->add_option(names, values[cmd][key], "default " + (value.is_string() ? value.get<std::string>() : value.dump()));
    }
    add_output_options(sub, output);
  }
  std::string replay_file;
  CLI::App* replay = app.add_subcommand("replay", "rerun the experiment recorded in an emitted CSV, JSON or config file");
  replay->add_option("file", replay_file)->required();
  add_output_options(replay, output);

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      out << app.help();
      return 0;
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {
        out << app.help();
        return 0;
      }
      err << "error: " << e.what() << "\n";
      return 2;
    }

    Json config;
    if (replay->parsed()) {
      std::ifstream f(replay_file, std::ios::binary);
      QMETRIC_REQUIRE(f.good(), "cannot open '" + replay_file + "'");
      std::stringstream buf;
      buf << f.rdbuf();
      config = experiments::config_from_text(buf.str());
    } else {
      for (const auto& [cmd, sub] : subs) {
        if (!sub->parsed()) continue;
        const Json defaults = experiments::default_config(cmd);
        config = {{"command", cmd}};
        for (const auto& [key, text] : values[cmd])
          if (sub->count(flag_name(key)) > 0 || (key == "n_max" && cmd == "shift-entropy" && sub->count("--n") > 0))
            config[key] = convert(key, text, defaults.at(key));
      }
    }
    emit(experiments::run(config), output, out);
    return 0;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << "\n";
    return 2;
  } catch (const ResourceLimitError& e) {
    err << "resource cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace qmetric::cli
