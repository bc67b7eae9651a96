#pragma once

// SIR tail of the typical mobile user and mean Shannon rates.

#include <array>
#include <vector>

#include "hetnet/model.hpp"
#include "hetnet/specfun.hpp"

namespace hetnet::coverage {

enum class CcdfMethod { closed_form, series, clamped };

const char* to_string(CcdfMethod m);

struct CcdfPoint {
  double tau = 0.0;
  double prob = 0.0;   // reported value (bracket midpoint when truncated)
  double lower = 0.0;  // certified bracket
  double upper = 1.0;
  double raw = 0.0;    // unclamped series sum
  double error = 0.0;  // propagated quadrature error of the series
  CcdfMethod method = CcdfMethod::closed_form;
  bool truncated = false;  // ceil(1/tau) > n_max, only the bracket is known
  bool clipped = false;    // raw left [0,1] by more than 1e-6
};

struct CcdfCurve {
  std::vector<CcdfPoint> points;
};

/// Smallest tau the series handles with n <= n_max terms.
double tau_cut(const specfun::QuadratureSpec& quad = {});

/// One signed term of the small-tau series with unit association factor:
///   (-1)^(n-1) tau_n^(-2n/beta) J_n(tau_n) (beta/2) (2/(beta gp))^n.
/// Multiply by y^n, y = 1/(1+kappa), to get the series term.
specfun::SpecialValue series_coefficient(int n, double beta, double tau, const specfun::QuadratureSpec& quad = {});
std::vector<specfun::SpecialValue> series_coefficients(int n, double beta, const std::vector<double>& taus,
                                                       const specfun::QuadratureSpec& quad = {});

/// P{SIR_macro(0) > tau}.
CcdfPoint sir_ccdf(const NetworkParams& net, double tau, const specfun::QuadratureSpec& quad = {});

/// Evaluates sir_ccdf on `taus` (any order; output follows input order).
CcdfCurve sir_ccdf_curve(const NetworkParams& net, const std::vector<double>& taus,
                         const specfun::QuadratureSpec& quad = {});

struct RateEstimate {
  double value = 0.0;  // bits/s/Hz
  double lower = 0.0;
  double upper = 0.0;
  double error = 0.0;  // bracket half-width plus quadrature error
};

/// Int_1^inf (2^t - 1)^(-2/beta) dt, exact via the incomplete beta function.
double tail_integral(double beta);

/// Rate constant above SIR 1: tail_integral(beta) / gamma_product(beta).
double rate_constant(double beta);

/// E[R_macro] as a function of the association factor y = 1/(1+kappa).
///
/// The CCDF at tau < 1 is a polynomial in y whose coefficients depend only on
/// beta, so the t-integral is done once per beta. Above t = 1 the closed
/// form integrates exactly; below log2(1 + tau_cut) only a bracket is known.
class MacroRateModel {
 public:
  explicit MacroRateModel(double beta, const specfun::QuadratureSpec& quad = {}, int gl_points = 16);

  double beta() const { return beta_; }
  RateEstimate at(double y) const;
  RateEstimate at(const NetworkParams& net) const;

  /// Int over [t_cut, 1) of the y^n coefficient, n = 1..n_max.
  const std::vector<double>& moments() const { return moments_; }
  /// CCDF(tau_cut) coefficients of y^n.
  const std::vector<double>& cut_coefficients() const { return cut_coeffs_; }
  double tail() const { return tail_; }
  double t_cut() const { return t_cut_; }
  double quadrature_error() const { return quad_error_; }
  bool converged() const { return converged_; }

 private:
  double beta_;
  double t_cut_;
  double tail_;
  std::vector<double> moments_;
  std::vector<double> cut_coeffs_;
  double quad_error_ = 0.0;
  bool converged_ = true;
};

/// Shared, lazily built model for (beta, quad). Thread-safe.
const MacroRateModel& rate_model(double beta, const specfun::QuadratureSpec& quad = {});

/// Int_0^inf P{SIR_macro(0) > 2^t - 1} dt.
RateEstimate mean_rate_macro(const NetworkParams& net, const specfun::QuadratureSpec& quad = {});

/// Rate of the equivalent homogeneous network (p = 1, powers P_ref). Throws
/// std::domain_error when `net` is off the equivalence surface.
RateEstimate mean_rate_equivalent(const NetworkParams& net, const specfun::QuadratureSpec& quad = {});

struct AboveOne {
  double value = 0.0;
  bool extrapolated = false;  // P_micro = 0: P_ref substituted for P_micro
};

/// C p (P_macro/P_micro)^(2/beta), the heuristic behind the p* formula.
AboveOne rate_above_one(const NetworkParams& net);

}  // namespace hetnet::coverage
