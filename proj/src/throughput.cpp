#include "hetnet/throughput.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hetnet/cellstats.hpp"

namespace hetnet::tput {

HandoffFactor handoff_factor(const NetworkParams& net, const UserParams& usr) {
  HandoffFactor h;
  h.raw = 1.0 - cells::crossing_intensity(net) * usr.handoff_length();
  h.clamped = std::max(h.raw, 0.0);
  h.vacuous = h.raw <= 0.0;
  return h;
}

Throughput r_mu(const NetworkParams& net, const UserParams& usr, Denominators mode,
                const specfun::QuadratureSpec& quad) {
  const auto h = handoff_factor(net, usr);
  const double rate = coverage::mean_rate_macro(net, quad).value;
  const double su = (mode == Denominators::exact) ? cells::n_su_macro(net, usr, quad).value
                                                  : cells::n_su_macro_hat(net, usr);
  Throughput t;
  t.numerator = h.raw * rate;
  t.denominator = su + cells::n_mu_macro(net, usr);
  t.raw = t.numerator / t.denominator;
  t.clamped = h.clamped * rate / t.denominator;
  return t;
}

Throughput r_su(const NetworkParams& net, const UserParams& usr, Denominators mode,
                const specfun::QuadratureSpec& quad) {
  const double rate = coverage::mean_rate_equivalent(net, quad).value;
  double den = 0.0;
  if (mode == Denominators::exact) {
    den = cells::n_su_het(net, usr, quad).value + cells::n_mu_het(net, usr, quad).value;
  } else {
    den = cells::n_su_het_hat(net, usr) + cells::n_mu_het_hat(net, usr);
  }
  Throughput t;
  t.numerator = rate;
  t.denominator = den;
  t.raw = t.clamped = rate / den;
  return t;
}

MetricBundle evaluate(const NetworkParams& net, const UserParams& usr, Denominators mode,
                      const specfun::QuadratureSpec& quad) {
  MetricBundle m;
  const auto h = handoff_factor(net, usr);
  m.e_rate_macro = coverage::mean_rate_macro(net, quad).value;
  m.e_rate_equivalent = coverage::mean_rate_equivalent(net, quad).value;
  m.lambda_c = cells::crossing_intensity(net);
  m.handoff_factor = h.raw;
  m.n_mu_macro = cells::n_mu_macro(net, usr);
  m.n_su_macro_hat = cells::n_su_macro_hat(net, usr);
  m.n_su_macro_ub = cells::n_su_macro_ub(net, usr);
  m.n_su_het_hat = cells::n_su_het_hat(net, usr);
  m.n_mu_het_hat = cells::n_mu_het_hat(net, usr);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double su_macro = m.n_su_macro_hat;
  double su_het = m.n_su_het_hat;
  double mu_het = m.n_mu_het_hat;
  if (mode == Denominators::exact) {
    m.n_su_macro = su_macro = cells::n_su_macro(net, usr, quad).value;
    m.n_su_het = su_het = cells::n_su_het(net, usr, quad).value;
    m.n_mu_het = mu_het = cells::n_mu_het(net, usr, quad).value;
  } else {
    m.n_su_macro = m.n_su_het = m.n_mu_het = nan;
  }
  m.r_mu = h.raw * m.e_rate_macro / (su_macro + m.n_mu_macro);
  m.r_su = m.e_rate_equivalent / (su_het + mu_het);
  return m;
}

}  // namespace hetnet::tput
