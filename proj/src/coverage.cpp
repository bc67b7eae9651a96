#include "hetnet/coverage.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include <boost/math/special_functions/beta.hpp>

#include "hetnet/quadrature.hpp"

namespace hetnet::coverage {

const char* to_string(CcdfMethod m) {
  switch (m) {
    case CcdfMethod::closed_form: return "closed-form";
    case CcdfMethod::series: return "series";
    case CcdfMethod::clamped: return "clamped";
  }
  return "?";
}

double tau_cut(const specfun::QuadratureSpec& quad) { return 1.0 / quad.n_max; }

std::vector<specfun::SpecialValue> series_coefficients(int n, double beta, const std::vector<double>& taus,
                                                       const specfun::QuadratureSpec& quad) {
  const double gp = specfun::gamma_product(beta);
  std::vector<specfun::SpecialValue> out(taus.size());
  std::vector<double> xs;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double denom = 1.0 - (n - 1) * taus[i];
    if (denom <= 0.0) continue;  // tau_n = inf, the term vanishes
    xs.push_back(taus[i] / denom);
    where.push_back(i);
  }
  if (xs.empty()) return out;
  const auto js = specfun::j_n_beta(n, beta, xs, quad);
  const double sign = (n % 2 == 1) ? 1.0 : -1.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double log_mag =
        -2.0 * n / beta * std::log(xs[k]) + std::log(beta / 2.0) + n * std::log(2.0 / (beta * gp));
    const double mag = std::exp(log_mag);
    auto& o = out[where[k]];
    o.value = sign * mag * js[k].value;
    o.error = mag * js[k].error;
    o.converged = js[k].converged;
    o.scheme = js[k].scheme;
  }
  return out;
}

specfun::SpecialValue series_coefficient(int n, double beta, double tau, const specfun::QuadratureSpec& quad) {
  return series_coefficients(n, beta, std::vector<double>{tau}, quad).front();
}

namespace {

// Sum in extended precision, smallest magnitudes first.
double careful_sum(std::vector<long double> terms) {
  std::sort(terms.begin(), terms.end(), [](long double a, long double b) { return std::fabs(a) < std::fabs(b); });
  long double s = 0.0L;
  for (long double t : terms) s += t;
  return static_cast<double>(s);
}

double closed_form(double beta, double tau, double y) {
  return y / (std::pow(tau, 2.0 / beta) * specfun::gamma_product(beta));
}

int series_terms(double tau) { return static_cast<int>(std::ceil(1.0 / tau - 1e-12)); }

// Series at tau in [tau_cut, 1) from its unit-y coefficients.
CcdfPoint assemble_series(double tau, double y, const std::vector<specfun::SpecialValue>& coeffs) {
  CcdfPoint pt;
  pt.tau = tau;
  pt.method = CcdfMethod::series;
  std::vector<long double> parts;
  double err = 0.0;
  double yn = 1.0;
  for (const auto& c : coeffs) {
    yn *= y;
    parts.push_back(static_cast<long double>(c.value) * yn);
    err += c.error * yn;
  }
  pt.raw = careful_sum(std::move(parts));
  pt.error = err;
  pt.clipped = pt.raw < -1e-6 || pt.raw > 1.0 + 1e-6;
  pt.prob = std::clamp(pt.raw, 0.0, 1.0);
  pt.lower = std::clamp(pt.raw - err, 0.0, 1.0);
  pt.upper = std::clamp(pt.raw + err, 0.0, 1.0);
  if (pt.clipped) pt.method = CcdfMethod::clamped;
  return pt;
}

template <class Series>
CcdfPoint ccdf_point(const NetworkParams& net, double tau, const specfun::QuadratureSpec& quad, Series series) {
  if (!(tau > 0.0)) throw std::domain_error("sir_ccdf: tau must be positive");
  if (!(net.beta > 2.0)) throw std::domain_error("sir_ccdf: beta must exceed 2");
  const double y = (net.p > 0.0) ? net.macro_association() : 0.0;
  CcdfPoint pt;
  pt.tau = tau;
  if (y == 0.0) {
    // no macro power reaches the user
    pt.prob = pt.lower = pt.upper = pt.raw = 0.0;
    return pt;
  }
  if (tau >= 1.0) {
    pt.prob = pt.raw = pt.lower = pt.upper = closed_form(net.beta, tau, y);
    return pt;
  }
  const double cut = tau_cut(quad);
  if (tau < cut) {
    const auto at_cut = assemble_series(cut, y, series(cut));
    pt.method = CcdfMethod::clamped;
    pt.truncated = true;
    pt.lower = at_cut.lower;
    pt.upper = 1.0;
    pt.raw = at_cut.raw;
    pt.error = at_cut.error;
    pt.prob = 0.5 * (pt.lower + pt.upper);
    return pt;
  }
  return assemble_series(tau, y, series(tau));
}

}  // namespace

CcdfPoint sir_ccdf(const NetworkParams& net, double tau, const specfun::QuadratureSpec& quad) {
  return ccdf_point(net, tau, quad, [&](double t) {
    std::vector<specfun::SpecialValue> c;
    for (int n = 1; n <= series_terms(t); ++n) c.push_back(series_coefficient(n, net.beta, t, quad));
    return c;
  });
}

CcdfCurve sir_ccdf_curve(const NetworkParams& net, const std::vector<double>& taus,
                         const specfun::QuadratureSpec& quad) {
  // Share each J order across every tau that needs it.
  const double cut = tau_cut(quad);
  std::vector<double> need;
  for (double t : taus) {
    if (t > 0.0 && t < 1.0) need.push_back(std::max(t, cut));
  }
  std::sort(need.begin(), need.end());
  need.erase(std::unique(need.begin(), need.end()), need.end());
  std::map<double, std::vector<specfun::SpecialValue>> coeffs;
  if (!need.empty() && net.beta > 2.0) {
    for (int n = 1; n <= series_terms(need.front()); ++n) {
      std::vector<double> sub;
      for (double t : need) {
        if (series_terms(t) >= n) sub.push_back(t);
      }
      const auto vals = series_coefficients(n, net.beta, sub, quad);
      for (std::size_t i = 0; i < sub.size(); ++i) coeffs[sub[i]].push_back(vals[i]);
    }
  }
  CcdfCurve c;
  c.points.reserve(taus.size());
  for (double t : taus) {
    c.points.push_back(ccdf_point(net, t, quad, [&](double u) { return coeffs.at(u); }));
  }
  return c;
}

double tail_integral(double beta) {
  if (!(beta > 2.0)) throw std::domain_error("tail_integral: beta must exceed 2");
  // u = 2^-t: Int_0^{1/2} u^(s-1) (1-u)^(-s) du / ln 2
  const double s = 2.0 / beta;
  return boost::math::beta(s, 1.0 - s, 0.5) / std::log(2.0);
}

double rate_constant(double beta) { return tail_integral(beta) / specfun::gamma_product(beta); }

MacroRateModel::MacroRateModel(double beta, const specfun::QuadratureSpec& quad, int gl_points) : beta_(beta) {
  quad.check();
  if (!(beta > 2.0)) throw std::domain_error("MacroRateModel: beta must exceed 2");
  const int nmax = quad.n_max;
  const double cut = tau_cut(quad);
  t_cut_ = std::log2(1.0 + cut);
  tail_ = rate_constant(beta);
  moments_.assign(nmax, 0.0);
  cut_coeffs_.assign(nmax, 0.0);

  // tau in [1/(k+1), 1/k) uses k+1 terms; pieces end at t = log2(1 + 1/k).
  std::vector<std::vector<double>> taus(nmax + 1), weights(nmax + 1);
  for (int k = 1; k < nmax; ++k) {
    const double lo = std::max(t_cut_, std::log2(1.0 + 1.0 / (k + 1)));
    const double hi = std::log2(1.0 + 1.0 / k);
    if (!(hi > lo)) continue;
    const auto rule = quad::gauss_legendre(gl_points, lo, hi);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double tau = std::exp2(rule.nodes[i]) - 1.0;
      for (int n = 1; n <= k + 1; ++n) {
        taus[n].push_back(tau);
        weights[n].push_back(rule.weights[i]);
      }
    }
  }
  for (int n = 1; n <= nmax; ++n) {
    if (taus[n].empty()) continue;
    const auto cs = series_coefficients(n, beta, taus[n], quad);
    for (std::size_t i = 0; i < cs.size(); ++i) {
      moments_[n - 1] += weights[n][i] * cs[i].value;
      quad_error_ += weights[n][i] * cs[i].error;
      converged_ = converged_ && cs[i].converged;
    }
  }
  const int cut_terms = static_cast<int>(std::ceil(1.0 / cut - 1e-12));
  for (int n = 1; n <= cut_terms; ++n) {
    const auto c = series_coefficient(n, beta, cut, quad);
    cut_coeffs_[n - 1] = c.value;
    converged_ = converged_ && c.converged;
  }
}

RateEstimate MacroRateModel::at(double y) const {
  RateEstimate r;
  if (!(y > 0.0)) return r;
  long double mid = 0.0L;
  long double at_cut = 0.0L;
  long double yn = 1.0L;
  for (std::size_t n = 0; n < moments_.size(); ++n) {
    yn *= y;
    mid += moments_[n] * yn;
    at_cut += cut_coeffs_[n] * yn;
  }
  const double low_lo = t_cut_ * std::clamp(static_cast<double>(at_cut), 0.0, 1.0);
  const double low_hi = t_cut_;
  const double known = static_cast<double>(mid) + y * tail_;
  r.lower = known + low_lo;
  r.upper = known + low_hi;
  r.value = 0.5 * (r.lower + r.upper);
  r.error = 0.5 * (r.upper - r.lower) + quad_error_ * y;
  return r;
}

RateEstimate MacroRateModel::at(const NetworkParams& net) const {
  if (net.beta != beta_) throw std::invalid_argument("MacroRateModel: beta mismatch");
  if (!(net.p > 0.0)) return {};
  return at(net.macro_association());
}

const MacroRateModel& rate_model(double beta, const specfun::QuadratureSpec& quad) {
  using Key = std::tuple<std::uint64_t, int, int, std::int64_t, int, int, int, std::uint64_t, std::uint64_t>;
  static std::mutex mu;
  static std::map<Key, std::unique_ptr<MacroRateModel>> cache;
  const Key key{std::bit_cast<std::uint64_t>(beta), static_cast<int>(quad.scheme), quad.points_per_dim,
                quad.total_points, quad.randomizations, quad.tensor_max_dim, quad.n_max,
                std::bit_cast<std::uint64_t>(quad.rel_tol), quad.seed};
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<MacroRateModel>(beta, quad);
  return *slot;
}

RateEstimate mean_rate_macro(const NetworkParams& net, const specfun::QuadratureSpec& quad) {
  if (!(net.beta > 2.0)) throw std::domain_error("mean_rate_macro: beta must exceed 2");
  return rate_model(net.beta, quad).at(net);
}

RateEstimate mean_rate_equivalent(const NetworkParams& net, const specfun::QuadratureSpec& quad) {
  if (!net.feasible()) {
    throw std::domain_error("mean_rate_equivalent: design violates the power equivalence constraint");
  }
  NetworkParams homo = net;
  homo.p = 1.0;
  homo.p_macro = homo.p_micro = net.p_ref;
  return mean_rate_macro(homo, quad);
}

AboveOne rate_above_one(const NetworkParams& net) {
  AboveOne out;
  if (net.p == 0.0 || net.p_macro == 0.0) return out;
  const double c = rate_constant(net.beta);
  const double e = 2.0 / net.beta;
  if (net.p_micro > 0.0) {
    out.value = c * net.p * std::pow(net.p_macro / net.p_micro, e);
  } else {
    out.value = c * net.p * std::pow(net.p_macro / net.p_ref, e);
    out.extrapolated = true;
  }
  return out;
}

}  // namespace hetnet::coverage
