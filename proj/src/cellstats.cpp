#include "hetnet/cellstats.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hetnet/quadrature.hpp"

namespace hetnet::cells {

namespace {

constexpr double kPi = std::numbers::pi;

void require_macro(const NetworkParams& net, const char* what) {
  if (!(net.p * net.lambda_bs > 0.0)) throw std::domain_error(std::string(what) + ": needs p * lambda_bs > 0");
}

// The integrals factor as R^2 times a function of (w, theta) after the
// radial part Int_0^inf u e^{-u g} du = 1/g^2 is done exactly. Radii are
// sqrt(w), sqrt(1-w) and the centre distance is
// sqrt(1 - 2 sqrt(w(1-w)) cos theta).
double lens_scaled(double scale, double w, double d) {
  return geom::lens_area(scale * std::sqrt(w), scale * std::sqrt(1.0 - w), d);
}

double center_distance(double w, double theta) {
  return std::sqrt(std::max(0.0, 1.0 - 2.0 * std::sqrt(w * (1.0 - w)) * std::cos(theta)));
}

}  // namespace

double union_area(const DiscPair& dp) { return geom::union_area(dp.r1, dp.r2, (dp.c1 - dp.c2).norm()); }

double area_A(geom::Vec2 x, geom::Vec2 y) { return union_area({x, y, x.norm(), y.norm()}); }

double area_B(geom::Vec2 x, geom::Vec2 y, const NetworkParams& net) {
  const double s = net.micro_radius_ratio();
  if (std::isinf(s)) return std::numeric_limits<double>::infinity();
  return union_area({x, y, s * x.norm(), s * y.norm()});
}

double area_D(geom::Vec2 x, geom::Vec2 y, const NetworkParams& net) {
  const double s = net.micro_radius_ratio();
  if (s == 0.0) return std::numeric_limits<double>::infinity();
  return union_area({x, y, x.norm() / s, y.norm() / s});
}

double crossing_intensity(const NetworkParams& net) {
  const double m = net.lambda_bs * net.p;
  if (!(m > 0.0)) return 0.0;
  return 4.0 * std::sqrt(m) / kPi;
}

double n_mu_macro(const NetworkParams& net, const UserParams& usr) {
  require_macro(net, "n_mu_macro");
  const double m = net.lambda_bs * net.p;
  return 1.0 + (kZeroCellArea * usr.lambda_l / m + kChordMoment / (kPi * std::sqrt(m))) * usr.lambda_mu;
}

CountEstimate reduced_integral(int which, const NetworkParams& net, double rel_tol) {
  const double p = net.p;
  const double s = net.micro_radius_ratio();
  std::function<double(double, double)> g;
  switch (which) {
    case 0: {
      const double k = (s == 0.0) ? 0.0 : (1.0 - p) * s * s / p;
      g = [k](double w, double d) { return 1.0 - lens_scaled(1.0, w, d) / kPi + k * (1.0 - w); };
      break;
    }
    case 1:
      g = [p, s](double w, double d) {
        const double micro = (s == 0.0) ? 0.0 : s * s - lens_scaled(s, w, d) / kPi;
        return p * (1.0 - lens_scaled(1.0, w, d) / kPi) + (1.0 - p) * micro;
      };
      break;
    case 2:
      g = [p, s](double w, double d) {
        const double inv = 1.0 / s;
        const double macro = std::isinf(inv) ? 0.0 : inv * inv - lens_scaled(inv, w, d) / kPi;
        return (1.0 - p) * (1.0 - lens_scaled(1.0, w, d) / kPi) + p * macro;
      };
      break;
    default: throw std::invalid_argument("reduced_integral: which must be 0, 1 or 2");
  }

  bool converged = true;
  double inner_err = 0.0;
  const quad::AdaptiveOptions inner_opt{rel_tol * 0.1, 0.0, 400};
  auto outer = [&](double theta) {
    auto f = [&](double w) {
      const double v = g(w, center_distance(w, theta));
      return 1.0 / (v * v);
    };
    const auto r = quad::adaptive(f, 0.0, 1.0, inner_opt);
    converged = converged && r.converged;
    inner_err += r.error;
    return r.value;
  };
  const auto r = quad::adaptive(outer, 0.0, kPi, {rel_tol, 0.0, 400});
  CountEstimate out;
  out.value = r.value / kPi;
  // inner errors are summed over all outer evaluations, a loose upper bound
  out.error = (r.error + inner_err * kPi / std::max(1, r.evaluations)) / kPi;
  out.converged = converged && r.converged;
  return out;
}

CountEstimate n_su_macro(const NetworkParams& net, const UserParams& usr, const specfun::QuadratureSpec& quad) {
  require_macro(net, "n_su_macro");
  if (usr.lambda_su == 0.0) return {};
  const double scale = usr.lambda_su / (net.lambda_bs * net.p);
  auto k = reduced_integral(0, net, quad.rel_tol);
  return {scale * k.value, scale * k.error, k.converged};
}

double n_su_macro_hat(const NetworkParams& net, const UserParams& usr) {
  require_macro(net, "n_su_macro_hat");
  return net.macro_association() * usr.lambda_su / (net.lambda_bs * net.p);
}

double n_su_macro_ub(const NetworkParams& net, const UserParams& usr) {
  require_macro(net, "n_su_macro_ub");
  return kZeroCellArea * usr.lambda_su / (net.lambda_bs * net.p);
}

CountEstimate n_su_het(const NetworkParams& net, const UserParams& usr, const specfun::QuadratureSpec& quad) {
  CountEstimate out{1.0, 0.0, true};
  if (usr.lambda_su == 0.0) return out;
  const double p = net.p;
  const double s = net.micro_radius_ratio();
  // Macro term vanishes without macro power, micro term without micro power.
  if (p > 0.0 && net.p_macro > 0.0) {
    const auto k = reduced_integral(1, net, quad.rel_tol);
    const double scale = usr.lambda_su * p / net.lambda_bs;
    out.value += scale * k.value;
    out.error += scale * k.error;
    out.converged = out.converged && k.converged;
  }
  if (p < 1.0 && s > 0.0) {
    const auto k = reduced_integral(2, net, quad.rel_tol);
    const double scale = usr.lambda_su * (1.0 - p) / net.lambda_bs;
    out.value += scale * k.value;
    out.error += scale * k.error;
    out.converged = out.converged && k.converged;
  }
  return out;
}

double n_su_het_hat(const NetworkParams& net, const UserParams& usr) {
  const double q = (net.p > 0.0) ? net.macro_association() : 0.0;
  double out = 1.0;
  if (net.p > 0.0 && q > 0.0) out += q * q * usr.lambda_su / (net.lambda_bs * net.p);
  if (net.p < 1.0 && q < 1.0) out += (1.0 - q) * (1.0 - q) * usr.lambda_su / (net.lambda_bs * (1.0 - net.p));
  return out;
}

CountEstimate n_mu_het(const NetworkParams& net, const UserParams& usr, const specfun::QuadratureSpec& quad) {
  require_macro(net, "n_mu_het");
  const double rate = usr.lambda_l * usr.lambda_mu;
  if (rate == 0.0) return {};
  // Density-free form of the macro-cell SU integral, so lambda_su = 0 works.
  auto k = reduced_integral(0, net, quad.rel_tol);
  const double scale = rate / (net.lambda_bs * net.p);
  return {scale * k.value, scale * k.error, k.converged};
}

double n_mu_het_hat(const NetworkParams& net, const UserParams& usr) {
  require_macro(net, "n_mu_het_hat");
  return net.macro_association() * kZeroCellArea * usr.lambda_l * usr.lambda_mu / (net.lambda_bs * net.p);
}

}  // namespace hetnet::cells
