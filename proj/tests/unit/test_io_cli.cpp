#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qmetric/cli.hpp"
#include "qmetric/errors.hpp"
#include "qmetric/experiments.hpp"
#include "qmetric/io.hpp"

using namespace qmetric;
using experiments::Json;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qmetric");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string body_of(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, body;
  while (std::getline(in, line))
    if (!line.starts_with("#")) body += line + "\n";
  return body;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("qmetric_unit_" + name);
}

}  // namespace

TEST_CASE("delta grids") {
  const auto g = io::parse_delta_grid("0.5:0.0625:4");
  REQUIRE(g.size() == 4);
  CHECK(g[0] == 0.5);
  CHECK(g[1] == doctest::Approx(0.25));
  CHECK(g[3] == doctest::Approx(0.0625));
  CHECK(io::parse_delta_grid("1:1:1").size() == 1);
  for (const char* bad : {"", "0.5", "0.5:0.1", "a:b:3", "0.5:0.1:0", "-1:0.1:3", "0.5:0.1:3:4"})
    CHECK_THROWS_AS(io::parse_delta_grid(bad), PreconditionError);
}

TEST_CASE("number formatting") {
  CHECK(io::format_number(0.5) == "0.5");
  CHECK(io::format_number(3.0) == "3");
  CHECK(io::format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(std::stod(io::format_number(std::acos(-1.0))) == doctest::Approx(std::acos(-1.0)).epsilon(1e-11));
}

TEST_CASE("JSON round trips") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  SUBCASE("Weyl elements") {
    const weyl::WeylWindow w{3, -1, 0};
    linalg::CMatrix m(9, 9);
    for (auto& x : m.data()) x = {g(rng), g(rng)};
    const weyl::WeylElement a(w, m);
    const auto back = io::weyl_from_json(io::to_json(a));
    CHECK(back.window() == w);
    CHECK(back.matrix().max_abs_diff(m) < 1e-12);
    const auto again = io::weyl_from_json(Json::parse(io::to_json(a).dump()));
    CHECK(again.matrix().max_abs_diff(m) < 1e-12);
  }
  SUBCASE("twisted polynomials") {
    const auto ph = nctorus::PhaseMatrix::two_torus(0.3);
    nctorus::TwistedPolynomial a(ph);
    for (int i = 0; i < 8; ++i) a.add_term({i - 4, 2 * i - 7}, {g(rng), g(rng)});
    const auto back = io::torus_from_json(Json::parse(io::to_json(a).dump()));
    CHECK(back.phase() == ph);
    CHECK(nctorus::gns_norm(back - a) < 1e-12);
  }
  SUBCASE("vector families") {
    const auto fam = approx::VectorFamily::from_columns({{1.0, {0.0, 2.0}}, {{-1.5, 0.25}, 0.0}});
    const auto back = io::family_from_json(Json::parse(io::to_json(fam).dump()));
    CHECK(back.matrix().max_abs_diff(fam.matrix()) < 1e-12);
    const auto real = io::family_from_json(Json::parse("[[1, 0], [0.5, 0.5]]"));
    CHECK(real.size() == 2);
    CHECK_THROWS_AS(io::family_from_json(Json::parse("[[1, 0], [1]]")), PreconditionError);
  }
}

TEST_CASE("config normalization") {
  const auto cfg = experiments::normalize({{"command", "weyl-dim"}, {"n_max", 2}});
  CHECK(cfg.at("n_max") == 2);
  CHECK(cfg.at("p") == 2);
  CHECK_THROWS_AS(experiments::normalize({{"command", "weyl-dim"}, {"bogus", 1}}), PreconditionError);
  CHECK_THROWS_AS(experiments::normalize({{"command", "weyl-dim"}, {"n_max", "two"}}), PreconditionError);
  CHECK_THROWS_AS(experiments::normalize({{"command", "nope"}}), PreconditionError);
  CHECK_THROWS_AS(experiments::normalize(Json::array()), PreconditionError);
  for (const auto& c : experiments::commands()) CHECK(experiments::default_config(c).is_object());
}

TEST_CASE("emitted output determines the rerun") {
  const Json cfg{{"command", "lattice-growth"}, {"n", 6}};
  const auto r = experiments::run(cfg);
  const auto csv = experiments::to_csv(r, "unit");
  CHECK(csv.starts_with("# qmetric lattice-growth\n"));
  CHECK(csv.find("# stamp: unit") != std::string::npos);
  const auto again = experiments::run(experiments::config_from_text(csv));
  CHECK(experiments::csv_body(again) == experiments::csv_body(r));
  const auto json = experiments::to_json_text(r);
  CHECK(experiments::csv_body(experiments::run(experiments::config_from_text(json))) == experiments::csv_body(r));
  CHECK(experiments::normalize(experiments::config_from_text(cfg.dump())) == experiments::normalize(cfg));
  CHECK_THROWS_AS(experiments::config_from_text("not a config"), PreconditionError);
}

TEST_CASE("point generators") {
  CHECK(experiments::generate_points("grid:4").size() == 16);
  CHECK(experiments::generate_points("segment:10").size() == 10);
  CHECK(experiments::generate_points("random:7:2") == experiments::generate_points("random:7:2"));
  CHECK(experiments::generate_points("random:7:2") != experiments::generate_points("random:7:3"));
  CHECK_THROWS_AS(experiments::generate_points("blob:3"), PreconditionError);
}

TEST_CASE("command line") {
  SUBCASE("success and format") {
    const auto r = run_cli({"lattice-growth", "--n", "5"});
    CHECK(r.code == 0);
    CHECK(r.out.starts_with("# qmetric lattice-growth"));
    const auto j = run_cli({"lattice-growth", "--n", "5", "--format", "json"});
    CHECK(j.code == 0);
    CHECK(Json::parse(j.out).contains("summary"));
    const auto s = run_cli({"shift-entropy", "--n", "3"});
    CHECK(s.code == 0);
    CHECK(experiments::config_from_text(s.out).at("n_max") == 3);
  }
  SUBCASE("toral matrix option") {
    const auto r = run_cli({"toral-entropy", "--T", "2,1,1,1", "--n", "8"});
    CHECK(r.code == 0);
    CHECK(run_cli({"toral-entropy", "--T", "2,1,1"}).code == 2);
  }
  SUBCASE("exit codes") {
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({"weyl-dim", "--p", "1"}).code == 2);
    CHECK(run_cli({"toral-entropy", "--T", "1,1,0,1", "--pad", "0"}).code == 2);
    CHECK(run_cli({"replay", temp_file("missing.csv").string()}).code == 2);
    CHECK(run_cli({"--help"}).code == 0);
  }
  SUBCASE("replay reproduces the body") {
    const auto path = temp_file("replay.csv");
    const auto first = run_cli({"torus-dim", "--n-max", "4", "--out", path.string()});
    REQUIRE(first.code == 0);
    std::ifstream f(path);
    std::stringstream buf;
    buf << f.rdbuf();
    const auto again = run_cli({"replay", path.string()});
    CHECK(again.code == 0);
    CHECK(body_of(again.out) == body_of(buf.str()));
    std::filesystem::remove(path);
  }
}
