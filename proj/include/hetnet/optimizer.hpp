#pragma once

// Grid search over designs (p, P_micro, P_macro) on the equivalence surface.

#include <cstddef>
#include <string>
#include <vector>

#include "hetnet/model.hpp"
#include "hetnet/specfun.hpp"
#include "hetnet/throughput.hpp"

namespace hetnet::opt {

struct SearchGrid {
  std::vector<double> p_values;       // macro fractions
  std::vector<double> pmicro_values;  // P_micro / P_ref

  /// p = 0:0.01:1, P_micro/P_ref = 0:0.05:1.
  static SearchGrid defaults();
};

struct GridPoint {
  DesignPoint design;  // absolute powers
  MetricBundle metrics;
};

/// A grid with every retained (feasible, p > 0) point evaluated once.
struct GridEvaluation {
  NetworkParams base;
  UserParams users;
  tput::Denominators mode = tput::Denominators::approximate;
  specfun::QuadratureSpec quad;
  std::vector<GridPoint> points;  // p ascending, then P_micro ascending
  std::vector<DesignPoint> rejected;  // infeasible or p = 0, P_macro left 0
};

GridEvaluation evaluate_grid(const NetworkParams& base, const UserParams& usr, const SearchGrid& grid,
                             tput::Denominators mode = tput::Denominators::approximate,
                             const specfun::QuadratureSpec& quad = {}, unsigned threads = 0);

/// min(1, pi^2 / (36 v^2 T_h^2 lambda_bs)); takes no powers on purpose.
double p_star_closed_form(double lambda_bs, const UserParams& usr);

struct Optimum {
  std::size_t index = 0;
  DesignPoint design;
  double value = 0.0;
  bool micro_off = false;  // argmax has P_micro = 0
};

/// argmax of handoff * E[R_macro].
Optimum maximize_mu_rate(const GridEvaluation& g);
/// argmax of r_mu.
Optimum maximize_mu_throughput(const GridEvaluation& g);

struct ParetoRecord {
  double xi = 0.0;
  double p_star = 0.0;
  double pmicro_star = 0.0;  // / P_ref
  double pmacro_star = 0.0;  // / P_ref
  double r_su_star = 0.0;
  double r_mu_star = 0.0;
  double objective = 0.0;
  std::size_t index = 0;
};

/// argmax of r_mu + xi r_su; ties go to lowest p, then lowest P_micro.
ParetoRecord maximize_joint(const GridEvaluation& g, double xi);

struct Rescore {
  ParetoRecord approximate;  // winner with approximate denominators
  ParetoRecord exact;        // winner among the top K after exact re-scoring
  double objective_delta = 0.0;  // exact minus approximate objective at the approximate winner
  bool flipped = false;
};

/// Re-scores the top `k` points for `xi` with exact denominators.
Rescore rescore_exact(const GridEvaluation& g, double xi, std::size_t k = 10);

struct ConstrainedResult {
  bool feasible = false;
  ParetoRecord record;
  double max_r_su = 0.0;  // best achievable on the grid
  double gap = 0.0;       // record.r_su_star - r0
  int iterations = 0;
};

/// max r_mu subject to r_su >= r0 by bisection on xi.
ConstrainedResult solve_constrained(const GridEvaluation& g, double r0, int max_iter = 40);

struct PropertyReport {
  bool ok = true;
  std::vector<std::string> violations;
};

inline constexpr double kMonotoneTol = 1e-9;

/// Checks, over records sorted by xi, that r_su* is non-decreasing, r_mu* is
/// non-increasing and xi -> r_mu* + xi r_su* is non-decreasing and convex.
PropertyReport verify_xi_properties(const std::vector<ParetoRecord>& records, double tol = kMonotoneTol);

}  // namespace hetnet::opt
