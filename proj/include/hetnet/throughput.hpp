#pragma once

#include "hetnet/coverage.hpp"
#include "hetnet/model.hpp"
#include "hetnet/specfun.hpp"

namespace hetnet::tput {

struct HandoffFactor {
  double raw = 1.0;      // 1 - lambda_c v T_h, may be negative
  double clamped = 1.0;  // max(raw, 0)
  bool vacuous = false;  // raw <= 0
};

HandoffFactor handoff_factor(const NetworkParams& net, const UserParams& usr);

/// Which user-count denominators the throughputs use.
enum class Denominators {
  approximate,  // closed-form approximations, cheap
  exact,        // reduced 2-D integrals
};

struct Throughput {
  double raw = 0.0;
  double clamped = 0.0;  // handoff factor clamped at zero (MU only)
  double numerator = 0.0;
  double denominator = 1.0;
};

/// handoff * E[R_macro] / (N_SU,macro + N_MU,macro).
Throughput r_mu(const NetworkParams& net, const UserParams& usr, Denominators mode,
                const specfun::QuadratureSpec& quad = {});

/// E[R_equivalent] / (N_SU,het + N_MU,het). Throws std::domain_error off the
/// equivalence surface.
Throughput r_su(const NetworkParams& net, const UserParams& usr, Denominators mode,
                const specfun::QuadratureSpec& quad = {});

/// Every analytic output at one design. Count fields that the chosen mode
/// does not need are still filled: closed forms always, integrals only in
/// exact mode (NaN otherwise).
MetricBundle evaluate(const NetworkParams& net, const UserParams& usr, Denominators mode,
                      const specfun::QuadratureSpec& quad = {});

}  // namespace hetnet::tput
