#pragma once

#include <string>
#include <vector>

namespace hetnet {

// Relative tolerance for the power-equivalence constraint
//   p * Pmacro^(2/beta) + (1 - p) * Pmicro^(2/beta) = Pref^(2/beta).
inline constexpr double kEquivalenceTol = 1e-9;

/// Two-tier base-station layer: a macro PPP of density p*lambda_bs and a
/// micro PPP of density (1-p)*lambda_bs, with path loss (A r)^beta.
struct NetworkParams {
  double lambda_bs = 1.0 / 2500.0;  // BS density, 1/m^2
  double p = 1.0;                   // fraction of macro BSs
  double p_macro = 1.0;
  double p_micro = 1.0;
  double beta = 4.0;         // path-loss exponent, > 2
  double a_prefactor = 1.0;  // path-loss prefactor A, 1/m
  double p_ref = 1.0;        // power of the equivalent homogeneous network

  double macro_density() const { return lambda_bs * p; }
  double micro_density() const { return lambda_bs * (1.0 - p); }

  /// (1-p) Pmicro^(2/beta) / (p Pmacro^(2/beta)); +inf when the macro tier
  /// delivers no power.
  double kappa() const;

  /// Probability that a static user is served by a macro BS,
  /// p Pmacro^(2/beta) / (p Pmacro^(2/beta) + (1-p) Pmicro^(2/beta)).
  double macro_association() const;

  /// (Pmicro / Pmacro)^(1/beta): radius scaling of the micro dominance disc.
  double micro_radius_ratio() const;

  /// Relative residual of the equivalence constraint.
  double equivalence_residual() const;
  bool feasible(double tol = kEquivalenceTol) const { return equivalence_residual() <= tol; }
};

struct UserParams {
  double lambda_su = 1.0 / 400.0;            // static users per m^2
  double lambda_mu = 1.0 / 20.0;             // mobile users per m of road
  double lambda_l = 1.4142135623730951 / 50;  // road length per m^2
  double v = 20.0;                           // m/s
  double t_h = 2.0;                          // handoff duration, s

  double handoff_length() const { return v * t_h; }
};

/// A candidate design (p, Pmicro, Pmacro).
struct DesignPoint {
  double p = 1.0;
  double p_micro = 1.0;
  double p_macro = 1.0;
};

/// Every analytic output at one design point.
struct MetricBundle {
  double e_rate_macro = 0.0;
  double e_rate_equivalent = 0.0;
  double lambda_c = 0.0;
  double handoff_factor = 1.0;
  double n_mu_macro = 1.0;
  double n_su_macro = 0.0;
  double n_su_macro_hat = 0.0;
  double n_su_macro_ub = 0.0;
  double n_su_het = 1.0;
  double n_su_het_hat = 1.0;
  double n_mu_het = 0.0;
  double n_mu_het_hat = 0.0;
  double r_mu = 0.0;
  double r_su = 0.0;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate(const NetworkParams& net, const UserParams& usr);

/// Macro power that puts (p, Pmicro) on the equivalence surface for Pref.
/// Throws std::domain_error when p == 0 or the micro tier alone exceeds the
/// budget.
double solve_equivalent_pmacro(double p, double p_micro, double p_ref, double beta);

/// Copy of `net` with the design (p, Pmicro, Pmacro) substituted.
NetworkParams with_design(NetworkParams net, const DesignPoint& d);

DesignPoint design_of(const NetworkParams& net);

}  // namespace hetnet
