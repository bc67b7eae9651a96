#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "hetnet/cli.hpp"

using namespace hetnet;
using namespace hetnet::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("hetnet_cli_" + name);
  std::ofstream(path) << text;
  return path.string();
}

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hetnet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "# comment\n"
      "beta = 3.5   # trailing\n"
      "\n"
      "p = 0.4\n"
      "p_micro = 0\n"
      "taus = 1, 2\n"
      "grid_p = 0.1:0.1:0.5\n"
      "replications = 1e3\n");
  CHECK(c.net.beta == 3.5);
  CHECK(c.net.p == 0.4);
  CHECK(c.net.p_macro == doctest::Approx(std::pow(0.4, -1.75)));
  CHECK(c.taus == std::vector<double>{1, 2});
  CHECK(c.grid.p_values.size() == 5);
  CHECK(c.grid.p_values.back() == doctest::Approx(0.5));
  CHECK(c.sim.replications == 1000);
  CHECK(c.given.count("beta") == 1);
  CHECK_FALSE(c.r0.has_value());
}

TEST_CASE("micro power defaults to the reference power") {
  const auto c = parse_config("beta = 4\np = 0.5\np_ref = 2\n");
  CHECK(c.net.p_micro == 2.0);
  CHECK(c.net.p_macro == 2.0);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("p = 1\n"), ConfigError);
  try {
    parse_config("p = 1\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("beta") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("beta = 4\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("beta = 4\nbeta = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("beta = four\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("beta = 4\njust text\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("beta = 4\nreplications = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("beta = 4\ngrid_p = 1:0.1:0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("beta = 4\np = 0.1\np_micro = 5\n"), ConfigError);
}

TEST_CASE("every documented key is accepted") {
  for (const char* k : {"lambda_bs", "p", "p_macro", "p_micro", "p_ref", "beta", "a_prefactor", "lambda_su",
                        "lambda_mu", "lambda_l", "v", "t_h", "taus", "grid_p", "grid_pmicro", "xi_list", "r0",
                        "window", "guard", "replications"}) {
    const auto& keys = known_keys();
    CHECK(std::find(keys.begin(), keys.end(), k) != keys.end());
  }
}

TEST_CASE("cell formatting") {
  CHECK(format_cell(0.63661977236758) == "0.63662");
  CHECK(format_cell(1234567.0) == "1.23457e+06");
  CHECK(format_cell(std::int64_t{42}) == "42");
  CHECK(format_cell(true) == "true");
  CHECK(format_cell(std::string("x")) == "x");
  Table t{{"a", "b"}, {{std::numeric_limits<double>::quiet_NaN(), false}}};
  std::ostringstream csv, json;
  write_csv(t, csv);
  CHECK(csv.str() == "a,b\nnan,false\n");
  write_json(t, json);
  CHECK(json.str().find("\"a\": null") != std::string::npos);
}

TEST_CASE("coverage command") {
  const auto cfg = write_temp("cov.cfg", "beta = 4\n");
  const auto r = run_cli({"coverage", "--config", cfg});
  CHECK(r.code == kExitOk);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 5);
  CHECK(l[0] == "tau,ccdf_analytic,method");
  CHECK(l[1] == "1,0.63662,closed-form");

  const auto sim = write_temp("cov_sim.cfg", "beta = 4\nreplications = 50\n");
  const auto s = run_cli({"coverage", "--config", sim, "--simulate", "--seed", "3"});
  CHECK(s.code == kExitOk);
  CHECK(lines(s.out)[0] == "tau,ccdf_analytic,method,ccdf_sim,se");
}

TEST_CASE("missing beta exits with a config error naming the key") {
  const auto cfg = write_temp("nobeta.cfg", "p = 1\n");
  const auto r = run_cli({"coverage", "--config", cfg});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("beta") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("bad invocations") {
  CHECK(run_cli({}).code == kExitConfig);
  CHECK(run_cli({"coverage"}).code == kExitConfig);
  CHECK(run_cli({"coverage", "--config", "/nonexistent/file.cfg"}).code == kExitConfig);
  const auto cfg = write_temp("fmt.cfg", "beta = 4\n");
  CHECK(run_cli({"coverage", "--config", cfg, "--format", "xml"}).code == kExitConfig);
  CHECK(run_cli({"--help"}).code == kExitOk);
}

TEST_CASE("output file") {
  const auto cfg = write_temp("out.cfg", "beta = 4\ntaus = 2\n");
  const auto path = (std::filesystem::temp_directory_path() / "hetnet_cli_out.csv").string();
  const auto r = run_cli({"coverage", "--config", cfg, "--out", path});
  CHECK(r.code == kExitOk);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::string head;
  std::getline(f, head);
  CHECK(head == "tau,ccdf_analytic,method");
}

TEST_CASE("sweep with nothing feasible fails") {
  const auto cfg = write_temp("empty.cfg", "beta = 4\ngrid_p = 0\n");
  CHECK(run_cli({"sweep", "--config", cfg}).code != kExitOk);
}

TEST_CASE("static throughput peaks with equal tier powers") {
  const auto cfg = write_temp("sweep.cfg", "beta = 4\ngrid_p = 0.2:0.2:1\ngrid_pmicro = 0:0.25:1\n");
  const auto r = run_cli({"sweep", "--config", cfg});
  REQUIRE(r.code == kExitOk);
  double best = -1;
  std::string best_row;
  for (const auto& l : lines(r.out)) {
    if (l.rfind("p,", 0) == 0) continue;
    std::vector<std::string> f;
    std::stringstream ss(l);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    const double rsu = std::stod(f[3]);
    if (rsu > best) {
      best = rsu;
      best_row = l;
    }
  }
  CHECK(best_row.find(",1,1,") != std::string::npos);
}

TEST_CASE("optimize rows and diagnostics") {
  const auto cfg = write_temp("opt.cfg", "beta = 4\ngrid_pmicro = 0:0.25:1\n");
  const auto r = run_cli({"optimize", "--config", cfg, "--exact"});
  REQUIRE(r.code == kExitOk);
  const auto l = lines(r.out);
  CHECK(l[0] ==
        "xi,p_star,P_micro_over_P,P_macro_over_P,r_su,r_mu,objective,status,gap,exact_p_star,"
        "exact_P_micro_over_P,exact_objective_delta,flipped,monotonicity");
  CHECK(l.size() == 7);
  CHECK(l[1].rfind("0.001,0.4,0,", 0) == 0);
  CHECK(l[6].find(",1,1,") != std::string::npos);
  CHECK(l[1].substr(l[1].size() - 4) == "pass");
  CHECK(r.err.find("p* closed form 0.428368") != std::string::npos);
}

TEST_CASE("unreachable r0 gives a certificate row") {
  const auto cfg = write_temp("r0.cfg", "beta = 4\nr0 = 5\n");
  const auto r = run_cli({"optimize", "--config", cfg});
  CHECK(r.code == kExitOk);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 2);
  CHECK(l[1].find("infeasible") != std::string::npos);
  CHECK(r.err.find("exceeds") != std::string::npos);
}

TEST_CASE("validate passes at the urban defaults") {
  const auto cfg = write_temp("val.cfg", "beta = 4\nreplications = 300\n");
  const auto r = run_cli({"validate", "--config", cfg, "--seed", "17"});
  CHECK(r.code == kExitOk);
  const auto l = lines(r.out);
  CHECK(l[0] == "quantity,analytic,sim_mean,sim_se,z_score,pass,note");
  for (std::size_t i = 1; i < l.size(); ++i) CHECK(l[i].find(",true,") != std::string::npos);
}

TEST_CASE("validate with a single replicate is flagged low power") {
  const auto cfg = write_temp("val1.cfg", "beta = 4\nreplications = 1\n");
  const auto r = run_cli({"validate", "--config", cfg});
  CHECK(r.code == kExitOk);
  const auto l = lines(r.out);
  for (std::size_t i = 1; i < l.size(); ++i) CHECK(l[i].find("low power") != std::string::npos);
}
