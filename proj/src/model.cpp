#include "hetnet/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hetnet {

namespace {

double tier_weight(double fraction, double power, double beta) {
  if (fraction == 0.0 || power == 0.0) return 0.0;
  return fraction * std::pow(power, 2.0 / beta);
}

}  // namespace

double NetworkParams::kappa() const {
  const double macro = tier_weight(p, p_macro, beta);
  const double micro = tier_weight(1.0 - p, p_micro, beta);
  if (micro == 0.0) return 0.0;
  if (macro == 0.0) return std::numeric_limits<double>::infinity();
  // Ratio of powers first so a common power scale cancels exactly.
  return (1.0 - p) / p * std::pow(p_micro / p_macro, 2.0 / beta);
}

double NetworkParams::macro_association() const {
  const double k = kappa();
  if (std::isinf(k)) return 0.0;
  return 1.0 / (1.0 + k);
}

double NetworkParams::micro_radius_ratio() const {
  if (p_micro == 0.0) return 0.0;
  if (p_macro == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(p_micro / p_macro, 1.0 / beta);
}

double NetworkParams::equivalence_residual() const {
  const double target = std::pow(p_ref, 2.0 / beta);
  const double lhs = tier_weight(p, p_macro, beta) + tier_weight(1.0 - p, p_micro, beta);
  return std::abs(lhs - target) / target;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i];
  }
  return os.str();
}

ValidationReport validate(const NetworkParams& net, const UserParams& usr) {
  ValidationReport r;
  auto check = [&r](bool ok, const char* msg) {
    if (!ok) r.violations.emplace_back(msg);
  };
  check(net.lambda_bs > 0.0, "lambda_bs must be positive");
  check(net.p >= 0.0 && net.p <= 1.0, "p outside [0,1]");
  check(net.p_macro >= 0.0, "p_macro must be non-negative");
  check(net.p_micro >= 0.0, "p_micro must be non-negative");
  check(net.beta > 2.0, "beta must exceed 2");
  check(net.a_prefactor > 0.0, "a_prefactor must be positive");
  check(net.p_ref > 0.0, "p_ref must be positive");

  check(usr.lambda_su >= 0.0, "lambda_su must be non-negative");
  check(usr.lambda_mu >= 0.0, "lambda_mu must be non-negative");
  check(usr.lambda_l >= 0.0, "lambda_l must be non-negative");
  check(usr.v >= 0.0, "v must be non-negative");
  check(usr.t_h >= 0.0, "t_h must be non-negative");
  check(std::isfinite(usr.v * usr.t_h), "v*t_h must be finite");

  const bool users = usr.lambda_su > 0.0 || (usr.lambda_mu > 0.0 && usr.lambda_l > 0.0);
  check(!(users && net.p == 0.0 && net.p_micro == 0.0),
        "no service: p = 0 and p_micro = 0 with users present");
  return r;
}

double solve_equivalent_pmacro(double p, double p_micro, double p_ref, double beta) {
  if (!(p > 0.0)) throw std::domain_error("solve_equivalent_pmacro: p must be positive");
  if (p_micro == p_ref) return p_ref;
  const double e = 2.0 / beta;
  const double budget = std::pow(p_ref, e);
  double rest = budget - (1.0 - p) * std::pow(p_micro, e);
  if (rest < -kEquivalenceTol * budget) {
    throw std::domain_error("solve_equivalent_pmacro: micro tier alone exceeds the power budget");
  }
  rest = std::max(rest, 0.0);
  return std::pow(rest / p, beta / 2.0);
}

NetworkParams with_design(NetworkParams net, const DesignPoint& d) {
  net.p = d.p;
  net.p_micro = d.p_micro;
  net.p_macro = d.p_macro;
  return net;
}

DesignPoint design_of(const NetworkParams& net) { return {net.p, net.p_micro, net.p_macro}; }

}  // namespace hetnet
