#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hetnet/optimizer.hpp"

using namespace hetnet;
using namespace hetnet::opt;

namespace {

const GridEvaluation& default_grid() {
  static const GridEvaluation g = evaluate_grid(NetworkParams{}, UserParams{}, SearchGrid::defaults());
  return g;
}

ParetoRecord rec(double xi, double r_su, double r_mu) {
  ParetoRecord r;
  r.xi = xi;
  r.r_su_star = r_su;
  r.r_mu_star = r_mu;
  r.objective = r_mu + xi * r_su;
  return r;
}

}  // namespace

TEST_CASE("closed-form p*") {
  UserParams u;
  CHECK(p_star_closed_form(1.0 / 2500, u) == doctest::Approx(std::numbers::pi * std::numbers::pi / 23.04));
  CHECK(p_star_closed_form(1.0 / 2500, u) == doctest::Approx(0.4284).epsilon(1e-4));
  CHECK(p_star_closed_form(4.0 / 2500, u) == doctest::Approx(p_star_closed_form(1.0 / 2500, u) / 4));
  u.v = 0.0;
  CHECK(p_star_closed_form(1.0 / 2500, u) == 1.0);
}

TEST_CASE("default grid") {
  const auto g = SearchGrid::defaults();
  CHECK(g.p_values.size() == 101);
  CHECK(g.pmicro_values.size() == 21);
  CHECK(g.p_values.back() == 1.0);
  const auto& e = default_grid();
  CHECK(e.points.size() == 100 * 21);
  CHECK(e.rejected.size() == 21);
  for (const auto& pt : e.points) CHECK(with_design(e.base, pt.design).feasible());
}

TEST_CASE("grid evaluation is independent of the thread count") {
  SearchGrid s{{0.1, 0.5, 0.9}, {0.0, 0.5, 1.0}};
  const auto a = evaluate_grid(NetworkParams{}, UserParams{}, s, tput::Denominators::approximate, {}, 1);
  const auto b = evaluate_grid(NetworkParams{}, UserParams{}, s, tput::Denominators::approximate, {}, 4);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].metrics.r_mu == b.points[i].metrics.r_mu);
    CHECK(a.points[i].metrics.r_su == b.points[i].metrics.r_su);
  }
}

TEST_CASE("single-point grid") {
  SearchGrid s{{0.4}, {0.0}};
  const auto g = evaluate_grid(NetworkParams{}, UserParams{}, s);
  REQUIRE(g.points.size() == 1);
  CHECK(maximize_mu_rate(g).index == 0);
  CHECK(maximize_mu_throughput(g).index == 0);
  CHECK(maximize_joint(g, 0.3).p_star == 0.4);
}

TEST_CASE("empty grid is an error") {
  SearchGrid s{{0.0}, {0.5}};
  const auto g = evaluate_grid(NetworkParams{}, UserParams{}, s);
  CHECK(g.points.empty());
  CHECK_THROWS_AS(maximize_joint(g, 0.1), std::invalid_argument);
}

TEST_CASE("mobile throughput optimum turns the micro tier off") {
  const auto best = maximize_mu_throughput(default_grid());
  CHECK(best.micro_off);
  CHECK(best.design.p == doctest::Approx(0.40));
  CHECK(best.design.p_macro == doctest::Approx(6.25));
}

TEST_CASE("xi = 0 reduces to the mobile throughput problem") {
  const auto& g = default_grid();
  CHECK(maximize_joint(g, 0.0).index == maximize_mu_throughput(g).index);
}

TEST_CASE("ties go to the lowest p, then the lowest micro power") {
  // without handoff and with micro off every p gives the same macro rate
  UserParams u;
  u.v = 0.0;
  SearchGrid s{{0.2, 0.5, 1.0}, {0.0}};
  const auto g = evaluate_grid(NetworkParams{}, u, s);
  const auto best = maximize_mu_rate(g);
  CHECK(best.design.p == 0.2);
  CHECK(best.micro_off);
}

TEST_CASE("xi sweep structure") {
  const auto& g = default_grid();
  std::vector<ParetoRecord> recs;
  for (double xi : {0.001, 0.01, 0.1, 0.2, 0.3, 1.0}) recs.push_back(maximize_joint(g, xi));
  CHECK(verify_xi_properties(recs).ok);
  CHECK(recs.front().pmicro_star == 0.0);
  CHECK(recs.back().pmicro_star == 1.0);
  CHECK(recs.back().pmacro_star == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact re-score of the top points") {
  const auto& g = default_grid();
  const auto r = rescore_exact(g, 0.01, 5);
  CHECK(r.approximate.index == maximize_joint(g, 0.01).index);
  CHECK(std::isfinite(r.objective_delta));
  CHECK(r.exact.r_su_star > 0.0);
}

TEST_CASE("constrained problem") {
  const auto& g = default_grid();
  const auto zero = solve_constrained(g, 0.0);
  CHECK(zero.feasible);
  CHECK(zero.record.index == maximize_joint(g, 0.0).index);

  const double top = zero.max_r_su;
  const auto at_top = solve_constrained(g, top);
  CHECK(at_top.feasible);
  CHECK(at_top.record.r_su_star == top);

  const double mid = 0.5 * (maximize_joint(g, 0.0).r_su_star + top);
  const auto m = solve_constrained(g, mid);
  CHECK(m.feasible);
  CHECK(m.record.r_su_star >= mid);
  CHECK(m.gap >= 0.0);
  // nothing with a smaller xi meets the target
  const auto below = maximize_joint(g, m.record.xi * (1 - 1e-9));
  CHECK((below.r_su_star < mid || below.index == m.record.index));

  const auto over = solve_constrained(g, top * 1.01);
  CHECK_FALSE(over.feasible);
  CHECK(over.max_r_su == top);
  CHECK(over.gap < 0.0);
}

TEST_CASE("property report") {
  std::vector<ParetoRecord> flat{rec(0.1, 1, 1), rec(0.2, 1, 1), rec(0.5, 1, 1)};
  CHECK(verify_xi_properties(flat).ok);

  // a plateau after a sharp switch, as large xi pins the powers
  std::vector<ParetoRecord> table{rec(0.001, 107.0036, 33.2543), rec(0.01, 109.5806, 33.2408),
                                  rec(0.1, 132.5683, 31.9570),   rec(0.2, 162.6537, 27.3609),
                                  rec(0.29, 189.6808, 20.6754),  rec(0.3, 253.8792, 1.4436),
                                  rec(0.4, 253.8792, 1.4436),    rec(0.5, 253.8792, 1.4436),
                                  rec(1.0, 253.8792, 1.4436)};
  CHECK(verify_xi_properties(table).ok);

  auto bad = table;
  bad[3].r_su_star = 100.0;
  const auto rep = verify_xi_properties(bad);
  CHECK_FALSE(rep.ok);
  REQUIRE_FALSE(rep.violations.empty());
  CHECK(rep.violations.front().find("index 3") != std::string::npos);
}
