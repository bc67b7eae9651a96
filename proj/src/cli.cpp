#include "hetnet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hetnet/cellstats.hpp"
#include "hetnet/coverage.hpp"
#include "hetnet/throughput.hpp"

namespace hetnet::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + value + "'");
  }
  if (used != value.size()) throw ConfigError("key '" + key + "': trailing text in '" + value + "'");
  return v;
}

std::int64_t parse_integer(const std::string& key, const std::string& value) {
  const double v = parse_number(key, value);
  if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError("key '" + key + "': expected an integer");
  return static_cast<std::int64_t>(v);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <class T>
Setter number(T RunConfig::*group, double T::*field) {
  return [group, field](RunConfig& c, const std::string& k, const std::string& v) {
    (c.*group).*field = parse_number(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m = {
      {"lambda_bs", number(&RunConfig::net, &NetworkParams::lambda_bs)},
      {"p", number(&RunConfig::net, &NetworkParams::p)},
      {"p_macro", number(&RunConfig::net, &NetworkParams::p_macro)},
      {"p_micro", number(&RunConfig::net, &NetworkParams::p_micro)},
      {"p_ref", number(&RunConfig::net, &NetworkParams::p_ref)},
      {"beta", number(&RunConfig::net, &NetworkParams::beta)},
      {"a_prefactor", number(&RunConfig::net, &NetworkParams::a_prefactor)},
      {"lambda_su", number(&RunConfig::users, &UserParams::lambda_su)},
      {"lambda_mu", number(&RunConfig::users, &UserParams::lambda_mu)},
      {"lambda_l", number(&RunConfig::users, &UserParams::lambda_l)},
      {"v", number(&RunConfig::users, &UserParams::v)},
      {"t_h", number(&RunConfig::users, &UserParams::t_h)},
      {"window", number(&RunConfig::sim, &sim::SimConfig::window)},
      {"guard", number(&RunConfig::sim, &sim::SimConfig::guard)},
      {"rel_tol", number(&RunConfig::quad, &specfun::QuadratureSpec::rel_tol)},
      {"replications",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.sim.replications = parse_integer(k, v); }},
      {"seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sim.seed = static_cast<std::uint64_t>(parse_integer(k, v));
       }},
      {"n_max",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.quad.n_max = static_cast<int>(parse_integer(k, v));
       }},
      {"qmc_points",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.quad.total_points = parse_integer(k, v); }},
      {"top_k",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const auto n = parse_integer(k, v);
         if (n < 1) throw ConfigError("key 'top_k' must be >= 1");
         c.top_k = static_cast<std::size_t>(n);
       }},
      {"segment_length",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.segment_length = parse_number(k, v); }},
      {"r0", [](RunConfig& c, const std::string& k, const std::string& v) { c.r0 = parse_number(k, v); }},
      {"taus", [](RunConfig& c, const std::string& k, const std::string& v) { c.taus = parse_list(k, v); }},
      {"grid_p", [](RunConfig& c, const std::string& k, const std::string& v) { c.grid.p_values = parse_list(k, v); }},
      {"grid_pmicro",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.grid.pmicro_values = parse_list(k, v); }},
      {"xi_list", [](RunConfig& c, const std::string& k, const std::string& v) { c.xi_list = parse_list(k, v); }},
  };
  return m;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

void check_params(const RunConfig& cfg) {
  const auto rep = validate(cfg.net, cfg.users);
  if (!rep.ok()) throw ConfigError("invalid parameters: " + rep.to_string());
}

sim::SimConfig sim_config(const RunConfig& cfg, const Options& opt) {
  auto s = cfg.sim;
  if (opt.seed) s.seed = *opt.seed;
  s.threads = opt.threads;
  return s;
}

struct Verdict {
  double z = 0.0;
  bool pass = true;
  bool low_power = false;
};

// z against the interval [lo, hi]; zero inside it.
Verdict compare(double lo, double hi, const sim::SimEstimate& e) {
  Verdict v;
  if (e.replications < 2) {
    v.low_power = true;
    v.z = nan();
    return v;
  }
  const double off = (e.mean < lo) ? e.mean - lo : (e.mean > hi ? e.mean - hi : 0.0);
  if (off == 0.0) {
    v.z = 0.0;
  } else {
    v.z = (e.se > 0.0) ? off / e.se : std::copysign(std::numeric_limits<double>::infinity(), off);
  }
  v.pass = std::abs(v.z) <= 3.0;
  return v;
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  const auto colon = std::count(value.begin(), value.end(), ':');
  if (colon == 2) {
    const auto a = value.find(':');
    const auto b = value.find(':', a + 1);
    const double lo = parse_number(key, trim(value.substr(0, a)));
    const double step = parse_number(key, trim(value.substr(a + 1, b - a - 1)));
    const double hi = parse_number(key, trim(value.substr(b + 1)));
    if (!(step > 0.0) || hi < lo) throw ConfigError("key '" + key + "': bad range '" + value + "'");
    const auto n = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
    if (n > 1000000) throw ConfigError("key '" + key + "': range too long");
    for (std::int64_t i = 0; i <= n; ++i) out.push_back(lo + i * step);
    return out;
  }
  if (colon != 0) throw ConfigError("key '" + key + "': range must be lo:step:hi");
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!cfg.given.insert(key).second) throw ConfigError("duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError("key '" + key + "': empty value");
    it->second(cfg, key, value);
  }
  if (!cfg.given.count("beta")) throw ConfigError("missing required key 'beta'");
  if (!cfg.given.count("p_micro")) cfg.net.p_micro = cfg.net.p_ref;
  if (!cfg.given.count("p_macro") && cfg.net.p > 0.0 && cfg.net.beta > 2.0) {
    try {
      cfg.net.p_macro = solve_equivalent_pmacro(cfg.net.p, cfg.net.p_micro, cfg.net.p_ref, cfg.net.beta);
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string("cannot derive p_macro: ") + e.what());
    }
  }
  cfg.quad.check();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string format_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(double v) const {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", v);
      return buf;
    }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, c);
}

void write_csv(const Table& t, std::ostream& os) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
}

void write_json(const Table& t, std::ostream& os) {
  using Json = nlohmann::ordered_json;  // keeps column order
  auto rows = Json::array();
  for (const auto& row : t.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
      const auto& c = row[i];
      if (const auto* d = std::get_if<double>(&c)) {
        // round-trip the 6-digit CSV value; JSON has no NaN
        obj[t.columns[i]] = std::isfinite(*d) ? Json(std::stod(format_cell(c))) : Json(nullptr);
      } else if (const auto* n = std::get_if<std::int64_t>(&c)) {
        obj[t.columns[i]] = *n;
      } else if (const auto* b = std::get_if<bool>(&c)) {
        obj[t.columns[i]] = *b;
      } else {
        obj[t.columns[i]] = std::get<std::string>(c);
      }
    }
    rows.push_back(std::move(obj));
  }
  os << rows.dump(2) << '\n';
}

CommandResult cmd_coverage(const RunConfig& cfg, const Options& opt) {
  check_params(cfg);
  CommandResult r;
  r.table.columns = {"tau", "ccdf_analytic", "method"};
  if (opt.simulate) {
    r.table.columns.push_back("ccdf_sim");
    r.table.columns.push_back("se");
  }
  for (double t : cfg.taus) {
    if (!(t > 0.0)) throw ConfigError("taus must be positive");
  }
  const auto curve = coverage::sir_ccdf_curve(cfg.net, cfg.taus, cfg.quad);
  std::optional<sim::SirResult> s;
  if (opt.simulate) {
    s = sim::empirical_sir_ccdf(cfg.net, sim_config(cfg, opt), cfg.taus);
    for (const auto& w : s->warnings) r.messages.push_back("warning: " + w);
  }
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& pt = curve.points[i];
    std::vector<Cell> row{pt.tau, pt.prob, std::string(coverage::to_string(pt.method))};
    if (pt.clipped) r.messages.push_back("warning: series left [0,1] at tau=" + format_cell(pt.tau));
    if (s) {
      row.emplace_back(s->ccdf[i].mean);
      row.emplace_back(s->ccdf[i].se);
    }
    r.table.rows.push_back(std::move(row));
  }
  return r;
}

CommandResult cmd_sweep(const RunConfig& cfg, const Options& opt) {
  check_params(cfg);
  CommandResult r;
  const auto mode = opt.exact ? tput::Denominators::exact : tput::Denominators::approximate;
  const auto g = opt::evaluate_grid(cfg.net, cfg.users, cfg.grid, mode, cfg.quad, opt.threads);
  if (g.points.empty()) throw ConfigError("no feasible design on the grid");
  r.table.columns = {"p", "P_micro_over_P", "P_macro_over_P", "r_su", "r_mu", "handoff_factor", "feasible"};
  struct Row {
    DesignPoint d;
    const MetricBundle* m;
  };
  std::vector<Row> rows;
  for (const auto& pt : g.points) rows.push_back({pt.design, &pt.metrics});
  for (const auto& d : g.rejected) rows.push_back({d, nullptr});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.d.p < b.d.p || (a.d.p == b.d.p && a.d.p_micro < b.d.p_micro);
  });
  const double pref = cfg.net.p_ref;
  for (const auto& row : rows) {
    if (row.m) {
      r.table.rows.push_back({row.d.p, row.d.p_micro / pref, row.d.p_macro / pref, row.m->r_su, row.m->r_mu,
                              row.m->handoff_factor, true});
    } else {
      r.table.rows.push_back({row.d.p, row.d.p_micro / pref, nan(), nan(), nan(), nan(), false});
    }
  }
  return r;
}

CommandResult cmd_optimize(const RunConfig& cfg, const Options& opt) {
  check_params(cfg);
  CommandResult r;
  const auto g = opt::evaluate_grid(cfg.net, cfg.users, cfg.grid, tput::Denominators::approximate, cfg.quad,
                                    opt.threads);
  if (g.points.empty()) throw ConfigError("no feasible design on the grid");

  const double pstar = opt::p_star_closed_form(cfg.net.lambda_bs, cfg.users);
  const auto best_rate = opt::maximize_mu_rate(g);
  const auto best_mu = opt::maximize_mu_throughput(g);
  std::ostringstream os;
  os << "p* closed form " << format_cell(pstar) << "; MU-rate argmax p=" << format_cell(best_rate.design.p)
     << " P_micro/P=" << format_cell(best_rate.design.p_micro / cfg.net.p_ref)
     << "; MU-throughput argmax p=" << format_cell(best_mu.design.p)
     << " P_micro/P=" << format_cell(best_mu.design.p_micro / cfg.net.p_ref);
  r.messages.push_back(os.str());

  r.table.columns = {"xi", "p_star", "P_micro_over_P", "P_macro_over_P", "r_su", "r_mu", "objective", "status", "gap"};
  if (opt.exact) {
    for (const char* c : {"exact_p_star", "exact_P_micro_over_P", "exact_objective_delta", "flipped"}) {
      r.table.columns.emplace_back(c);
    }
  }
  r.table.columns.emplace_back("monotonicity");

  auto add_row = [&](const opt::ParetoRecord& rec, const std::string& status, double gap, const std::string& mono) {
    std::vector<Cell> row{rec.xi, rec.p_star, rec.pmicro_star, rec.pmacro_star, rec.r_su_star, rec.r_mu_star,
                          rec.objective, status, gap};
    if (opt.exact) {
      const auto rs = opt::rescore_exact(g, rec.xi, cfg.top_k);
      row.emplace_back(rs.exact.p_star);
      row.emplace_back(rs.exact.pmicro_star);
      row.emplace_back(rs.objective_delta);
      row.emplace_back(rs.flipped);
    }
    row.emplace_back(mono);
    r.table.rows.push_back(std::move(row));
  };

  if (cfg.r0) {
    const auto c = opt::solve_constrained(g, *cfg.r0);
    auto rec = c.record;
    if (!c.feasible) rec.xi = nan();
    add_row(rec, c.feasible ? "feasible" : "infeasible", c.gap, "n/a");
    if (!c.feasible) {
      r.messages.push_back("r0 exceeds the best achievable r_su " + format_cell(c.max_r_su));
    }
    return r;
  }

  std::vector<opt::ParetoRecord> recs;
  for (double xi : cfg.xi_list) {
    if (!(xi >= 0.0)) throw ConfigError("xi_list entries must be >= 0");
    recs.push_back(opt::maximize_joint(g, xi));
  }
  const auto rep = opt::verify_xi_properties(recs);
  for (const auto& v : rep.violations) r.messages.push_back("monotonicity: " + v);
  for (const auto& rec : recs) add_row(rec, "optimal", 0.0, rep.ok ? "pass" : "fail");
  return r;
}

CommandResult cmd_validate(const RunConfig& cfg, const Options& opt) {
  check_params(cfg);
  if (!(cfg.net.p > 0.0)) throw ConfigError("validate needs p > 0");
  CommandResult r;
  r.table.columns = {"quantity", "analytic", "sim_mean", "sim_se", "z_score", "pass", "note"};
  const auto scfg = sim_config(cfg, opt);
  bool all = true;

  auto add = [&](const std::string& q, double analytic, double lo, double hi, const sim::SimEstimate& e,
                 std::string note) {
    auto v = compare(lo, hi, e);
    if (v.low_power) note = note.empty() ? "low power" : note + "; low power";
    all = all && v.pass;
    r.table.rows.push_back({q, analytic, e.mean, e.se, v.z, v.pass, note});
  };

  const auto s = sim::empirical_sir_ccdf(cfg.net, scfg, cfg.taus);
  for (const auto& w : s.warnings) r.messages.push_back("warning: " + w);
  for (std::size_t i = 0; i < cfg.taus.size(); ++i) {
    const auto pt = coverage::sir_ccdf(cfg.net, cfg.taus[i], cfg.quad);
    add("ccdf@" + format_cell(cfg.taus[i]), pt.prob, pt.lower, pt.upper, s.ccdf[i],
        pt.truncated ? "bracket" : coverage::to_string(pt.method));
  }
  const auto rm = coverage::mean_rate_macro(cfg.net, cfg.quad);
  add("rate_macro", rm.value, rm.lower, rm.upper, s.mean_rate, "bracket");
  if (cfg.net.feasible()) {
    const auto re = coverage::mean_rate_equivalent(cfg.net, cfg.quad);
    add("rate_equivalent", re.value, re.lower, re.upper, s.mean_rate_het, "bracket");
  } else {
    r.messages.push_back("rate_equivalent skipped: design off the equivalence surface");
  }

  const double lc = cells::crossing_intensity(cfg.net);
  add("crossing_rate", lc, lc, lc, sim::empirical_crossings(cfg.net, scfg, cfg.segment_length), "");

  const auto hf = sim::empirical_handoff_free_fraction(cfg.net, cfg.users, scfg, cfg.segment_length);
  const double bound = 1.0 - lc * cfg.users.handoff_length();
  add("handoff_free", bound, bound, std::numeric_limits<double>::infinity(), hf, "one-sided lower bound");

  const auto c = sim::empirical_counts(cfg.net, cfg.users, scfg);
  for (const auto& w : c.warnings) r.messages.push_back("warning: " + w);
  const double mu = cells::n_mu_macro(cfg.net, cfg.users);
  add("n_mu_macro", mu, mu, mu, c.n_mu_macro, "");
  auto exact = [&](const std::string& q, const cells::CountEstimate& a, const sim::SimEstimate& e) {
    add(q, a.value, a.value - a.error, a.value + a.error, e, a.converged ? "" : "quadrature not converged");
  };
  exact("n_su_macro", cells::n_su_macro(cfg.net, cfg.users, cfg.quad), c.n_su_macro);
  exact("n_su_het", cells::n_su_het(cfg.net, cfg.users, cfg.quad), c.n_su_het);
  exact("n_mu_het", cells::n_mu_het(cfg.net, cfg.users, cfg.quad), c.n_mu_het);
  add("mass_transport", 0.0, 0.0, 0.0, c.mass_transport, "per-replicate difference");

  r.exit_code = all ? kExitOk : kExitGateFailed;
  return r;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-tier cellular network analysis: coverage, cell populations, handoff and design"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  Options opt;
  std::uint64_t seed = 0;

  std::map<std::string, std::function<CommandResult(const RunConfig&, const Options&)>> commands = {
      {"coverage", cmd_coverage}, {"sweep", cmd_sweep}, {"optimize", cmd_optimize}, {"validate", cmd_validate}};
  const std::map<std::string, std::string> help = {
      {"coverage", "SIR tail distribution of the typical mobile user"},
      {"sweep", "throughputs over the design grid"},
      {"optimize", "optimal designs for a list of xi or a target r0"},
      {"validate", "analytic values against Monte Carlo (non-zero exit on failure)"}};
  std::vector<CLI::App*> subs;
  CLI::Option* seed_opts[4] = {};
  int idx = 0;
  for (const auto& [name, fn] : commands) {
    auto* sc = app.add_subcommand(name, help.at(name));
    sc->add_option("--config", config_path, "key=value configuration file")->required();
    sc->add_option("--out", out_path, "output file (default stdout)");
    sc->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sc->add_flag("--simulate", opt.simulate, "add Monte Carlo columns (coverage)");
    sc->add_flag("--exact", opt.exact, "exact user-count integrals");
    sc->add_option("--threads", opt.threads, "worker cap (0 = all cores)");
    seed_opts[idx++] = sc->add_option("--seed", seed, "64-bit RNG seed");
    subs.push_back(sc);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  for (int i = 0; i < 4; ++i) {
    if (seed_opts[i] && seed_opts[i]->count() > 0) opt.seed = seed;
  }

  std::string which;
  for (auto* sc : subs) {
    if (sc->parsed()) which = sc->get_name();
  }

  CommandResult res;
  try {
    const auto cfg = load_config(config_path);
    res = commands.at(which)(cfg, opt);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  for (const auto& m : res.messages) err << m << '\n';

  std::ofstream file;
  std::ostream* dst = &out;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      err << "cannot write '" << out_path << "'\n";
      return kExitConfig;
    }
    dst = &file;
  }
  if (format == "json") write_json(res.table, *dst);
  else write_csv(res.table, *dst);
  return res.exit_code;
}

}  // namespace hetnet::cli
