#pragma once

// Crossing intensity and mean numbers of co-served users.

#include "hetnet/geometry.hpp"
#include "hetnet/model.hpp"
#include "hetnet/specfun.hpp"

namespace hetnet::cells {

// Literature constants for the Poisson-Voronoi tessellation.
// Mean zero-cell area times density: 1 + Var(|V|) lambda^2 with Var = 0.2802.
inline constexpr double kZeroCellArea = 1.2802;
// 4 x 0.804, the second moment of the chord of a typical cell cut by a line.
inline constexpr double kChordMoment = 3.216;

struct DiscPair {
  geom::Vec2 c1, c2;
  double r1 = 0.0;
  double r2 = 0.0;
};

double union_area(const DiscPair& dp);

/// Union of B(x, |x|) and B(y, |y|).
double area_A(geom::Vec2 x, geom::Vec2 y);
/// Radii scaled by (P_micro/P_macro)^(1/beta).
double area_B(geom::Vec2 x, geom::Vec2 y, const NetworkParams& net);
/// Radii scaled by (P_macro/P_micro)^(1/beta); +inf when P_micro = 0.
double area_D(geom::Vec2 x, geom::Vec2 y, const NetworkParams& net);

/// 4 sqrt(lambda_bs p) / pi.
double crossing_intensity(const NetworkParams& net);

struct CountEstimate {
  double value = 0.0;
  double error = 0.0;  // absolute
  bool converged = true;
};

double n_mu_macro(const NetworkParams& net, const UserParams& usr);
CountEstimate n_su_macro(const NetworkParams& net, const UserParams& usr, const specfun::QuadratureSpec& quad = {});
double n_su_macro_hat(const NetworkParams& net, const UserParams& usr);
double n_su_macro_ub(const NetworkParams& net, const UserParams& usr);
CountEstimate n_su_het(const NetworkParams& net, const UserParams& usr, const specfun::QuadratureSpec& quad = {});
double n_su_het_hat(const NetworkParams& net, const UserParams& usr);
CountEstimate n_mu_het(const NetworkParams& net, const UserParams& usr, const specfun::QuadratureSpec& quad = {});
double n_mu_het_hat(const NetworkParams& net, const UserParams& usr);

/// (1/pi) Int_0^pi Int_0^1 g(w, theta)^-2 dw dtheta for the reduced
/// integrands; exposed for testing. `which` = 0 macro-cell SU term,
/// 1 and 2 the two hetnet terms.
CountEstimate reduced_integral(int which, const NetworkParams& net, double rel_tol);

}  // namespace hetnet::cells
