#pragma once

// Quadrature building blocks shared by specfun, coverage and cellstats.

#include <cstdint>
#include <functional>
#include <vector>

namespace hetnet::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Jacobi rule for the weight v^a (1-v)^b on [0,1] (Golub-Welsch).
/// Weights sum to B(a+1, b+1).
Rule gauss_jacobi_unit(int n, double a, double b);

/// Gauss-Legendre rule on [lo, hi].
Rule gauss_legendre(int n, double lo, double hi);

/// `count` points of a `dim`-dimensional Sobol sequence, row-major,
/// skipping the origin.
std::vector<double> sobol_points(int dim, std::int64_t count);

struct Integral {
  double value = 0.0;
  double error = 0.0;  // absolute
  int evaluations = 0;
  bool converged = false;
};

struct AdaptiveOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_intervals = 2000;
};

/// Globally adaptive Gauss-Kronrod 7/15 on [a, b] (bisects the interval with
/// the largest error). `b` may be +infinity.
Integral adaptive(const std::function<double(double)>& f, double a, double b,
                  const AdaptiveOptions& opt = {});

}  // namespace hetnet::quad
