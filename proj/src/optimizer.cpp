#include "hetnet/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hetnet/coverage.hpp"
#include "hetnet/parallel.hpp"

namespace hetnet::opt {

namespace {

std::vector<double> linspace_step(double lo, double hi, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) v.push_back(lo + i * step);
  v.back() = hi;
  return v;
}

ParetoRecord make_record(const GridEvaluation& g, std::size_t i, double xi, const MetricBundle& m) {
  const auto& d = g.points[i].design;
  ParetoRecord r;
  r.xi = xi;
  r.index = i;
  r.p_star = d.p;
  r.pmicro_star = d.p_micro / g.base.p_ref;
  r.pmacro_star = d.p_macro / g.base.p_ref;
  r.r_mu_star = m.r_mu;
  r.r_su_star = m.r_su;
  r.objective = m.r_mu + xi * m.r_su;
  return r;
}

void require_points(const GridEvaluation& g) {
  if (g.points.empty()) throw std::invalid_argument("optimizer: no feasible grid points");
}

template <class Score>
Optimum argmax(const GridEvaluation& g, Score score) {
  require_points(g);
  Optimum best;
  best.value = score(g.points[0].metrics);
  for (std::size_t i = 1; i < g.points.size(); ++i) {
    const double v = score(g.points[i].metrics);
    if (v > best.value) {
      best.value = v;
      best.index = i;
    }
  }
  best.design = g.points[best.index].design;
  best.micro_off = best.design.p_micro == 0.0;
  return best;
}

}  // namespace

SearchGrid SearchGrid::defaults() { return {linspace_step(0.0, 1.0, 0.01), linspace_step(0.0, 1.0, 0.05)}; }

GridEvaluation evaluate_grid(const NetworkParams& base, const UserParams& usr, const SearchGrid& grid,
                             tput::Denominators mode, const specfun::QuadratureSpec& quad, unsigned threads) {
  GridEvaluation g;
  g.base = base;
  g.users = usr;
  g.mode = mode;
  g.quad = quad;

  auto ps = grid.p_values;
  auto pms = grid.pmicro_values;
  std::sort(ps.begin(), ps.end());
  std::sort(pms.begin(), pms.end());
  for (double p : ps) {
    for (double pm : pms) {
      // p = 0 leaves no macro tier and the mobile metrics undefined
      if (!(p > 0.0)) {
        g.rejected.push_back({p, pm * base.p_ref, 0.0});
        continue;
      }
      DesignPoint d{p, pm * base.p_ref, 0.0};
      try {
        d.p_macro = solve_equivalent_pmacro(p, d.p_micro, base.p_ref, base.beta);
      } catch (const std::domain_error&) {
        g.rejected.push_back({p, d.p_micro, 0.0});
        continue;
      }
      if (!with_design(base, d).feasible()) {
        g.rejected.push_back(d);
        continue;
      }
      g.points.push_back({d, {}});
    }
  }
  coverage::rate_model(base.beta, quad);  // build once before fanning out
  parallel_for(g.points.size(), threads, [&](std::size_t i) {
    g.points[i].metrics = tput::evaluate(with_design(base, g.points[i].design), usr, mode, quad);
  });
  return g;
}

double p_star_closed_form(double lambda_bs, const UserParams& usr) {
  const double d = usr.v * usr.t_h;
  const double denom = 36.0 * d * d * lambda_bs;
  if (!(denom > 0.0)) return 1.0;
  return std::min(1.0, std::numbers::pi * std::numbers::pi / denom);
}

Optimum maximize_mu_rate(const GridEvaluation& g) {
  return argmax(g, [](const MetricBundle& m) { return m.handoff_factor * m.e_rate_macro; });
}

Optimum maximize_mu_throughput(const GridEvaluation& g) {
  return argmax(g, [](const MetricBundle& m) { return m.r_mu; });
}

ParetoRecord maximize_joint(const GridEvaluation& g, double xi) {
  const auto best = argmax(g, [xi](const MetricBundle& m) { return m.r_mu + xi * m.r_su; });
  return make_record(g, best.index, xi, g.points[best.index].metrics);
}

Rescore rescore_exact(const GridEvaluation& g, double xi, std::size_t k) {
  require_points(g);
  std::vector<std::size_t> order(g.points.size());
  std::iota(order.begin(), order.end(), 0);
  auto obj = [&](std::size_t i) { return g.points[i].metrics.r_mu + xi * g.points[i].metrics.r_su; };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return obj(a) > obj(b); });
  order.resize(std::min(k, order.size()));

  std::vector<MetricBundle> exact(order.size());
  parallel_for(order.size(), 0, [&](std::size_t j) {
    exact[j] = tput::evaluate(with_design(g.base, g.points[order[j]].design), g.users, tput::Denominators::exact,
                              g.quad);
  });

  Rescore r;
  r.approximate = make_record(g, order[0], xi, g.points[order[0]].metrics);
  std::size_t best = 0;
  for (std::size_t j = 1; j < order.size(); ++j) {
    const double v = exact[j].r_mu + xi * exact[j].r_su;
    const double b = exact[best].r_mu + xi * exact[best].r_su;
    // equal scores keep the lower grid index
    if (v > b || (v == b && order[j] < order[best])) best = j;
  }
  r.exact = make_record(g, order[best], xi, exact[best]);
  r.objective_delta = (exact[0].r_mu + xi * exact[0].r_su) - r.approximate.objective;
  r.flipped = order[best] != order[0];
  return r;
}

ConstrainedResult solve_constrained(const GridEvaluation& g, double r0, int max_iter) {
  require_points(g);
  ConstrainedResult out;
  std::size_t imax = 0;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    if (g.points[i].metrics.r_su > g.points[imax].metrics.r_su) imax = i;
  }
  out.max_r_su = g.points[imax].metrics.r_su;
  if (r0 > out.max_r_su) {
    out.feasible = false;
    out.record = make_record(g, imax, 0.0, g.points[imax].metrics);
    out.gap = out.max_r_su - r0;
    return out;
  }
  out.feasible = true;
  auto rec = maximize_joint(g, 0.0);
  if (rec.r_su_star >= r0) {
    out.record = rec;
    out.gap = rec.r_su_star - r0;
    return out;
  }
  double lo = 0.0;
  double hi = 1.0;
  auto hi_rec = maximize_joint(g, hi);
  for (int k = 0; hi_rec.r_su_star < r0; ++k) {
    if (k > 200) throw std::runtime_error("solve_constrained: xi bracket did not close");
    lo = hi;
    hi *= 2.0;
    hi_rec = maximize_joint(g, hi);
  }
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto m = maximize_joint(g, mid);
    if (m.r_su_star >= r0) {
      hi = mid;
      hi_rec = m;
    } else {
      lo = mid;
    }
    out.iterations = it + 1;
  }
  out.record = hi_rec;
  out.gap = hi_rec.r_su_star - r0;
  return out;
}

PropertyReport verify_xi_properties(const std::vector<ParetoRecord>& records, double tol) {
  PropertyReport rep;
  auto recs = records;
  std::stable_sort(recs.begin(), recs.end(), [](const ParetoRecord& a, const ParetoRecord& b) { return a.xi < b.xi; });
  auto slack = [tol](double a, double b) { return tol * std::max({1.0, std::abs(a), std::abs(b)}); };
  auto fail = [&rep](const char* what, std::size_t i, double by) {
    std::ostringstream os;
    os << what << " at index " << i << " by " << by;
    rep.violations.push_back(os.str());
    rep.ok = false;
  };
  auto F = [](const ParetoRecord& r) { return r.r_mu_star + r.xi * r.r_su_star; };
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const auto& a = recs[i - 1];
    const auto& b = recs[i];
    if (b.r_su_star < a.r_su_star - slack(a.r_su_star, b.r_su_star)) {
      fail("r_su* decreases", i, a.r_su_star - b.r_su_star);
    }
    if (b.r_mu_star > a.r_mu_star + slack(a.r_mu_star, b.r_mu_star)) {
      fail("r_mu* increases", i, b.r_mu_star - a.r_mu_star);
    }
    if (F(b) < F(a) - slack(F(a), F(b))) fail("objective decreases", i, F(a) - F(b));
  }
  for (std::size_t i = 1; i + 1 < recs.size(); ++i) {
    const auto& a = recs[i - 1];
    const auto& b = recs[i];
    const auto& c = recs[i + 1];
    if (!(c.xi > a.xi)) continue;
    const double chord = F(a) + (F(c) - F(a)) * (b.xi - a.xi) / (c.xi - a.xi);
    if (F(b) > chord + slack(F(b), chord)) fail("objective not convex", i, F(b) - chord);
  }
  return rep;
}

}  // namespace hetnet::opt
