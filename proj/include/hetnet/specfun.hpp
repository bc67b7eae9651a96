#pragma once

#include <cstdint>
#include <vector>

namespace hetnet::specfun {

enum class Scheme {
  automatic,          // tensor Gauss-Jacobi up to `tensor_max_dim`, QMC above
  tensor_gauss,       // tensor Gauss-Jacobi (endpoint weights built in)
  quasi_monte_carlo,  // randomly shifted Sobol with Kumaraswamy importance map
};

struct QuadratureSpec {
  Scheme scheme = Scheme::automatic;
  int points_per_dim = 20;
  std::int64_t total_points = 1 << 14;  // QMC points per randomization
  int randomizations = 8;               // independent Cranley-Patterson shifts
  double rel_tol = 1e-6;
  int tensor_max_dim = 4;
  int n_max = 8;  // largest J order callers may request
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;

  void check() const;
};

struct SpecialValue {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
  bool converged = true;
  Scheme scheme = Scheme::tensor_gauss;
};

/// Gamma(1 - 2/beta) * Gamma(1 + 2/beta) = (2 pi / beta) / sin(2 pi / beta).
double gamma_product(double beta);

/// J_{n,beta}(x, ..., x): the (n-1)-dimensional Dirichlet-type integral
///
///   (1 + n x)/n * Int_{[0,1]^{n-1}} prod_i v_i^{i(2/beta+1)-1} (1-v_i)^{2/beta}
///                                   / prod_{k=1..n} (x + eta_k) dv
///
/// with eta_1 = v_1...v_{n-1}, eta_k = (1 - v_{k-1}) v_k...v_{n-1}, eta_n = 1 - v_{n-1}.
/// J_1 = 1 exactly. Throws std::out_of_range when n > quad.n_max.
SpecialValue j_n_beta(int n, double beta, double x, const QuadratureSpec& quad = {});

/// Same for many x at once; the QMC sample set is shared across `xs`.
std::vector<SpecialValue> j_n_beta(int n, double beta, const std::vector<double>& xs,
                                   const QuadratureSpec& quad = {});

/// I_{n,beta}(x) = 2^n Int_0^inf u^{2n-1} exp(-u^2 - u^beta x Gamma(1-2/beta)^{-beta/2}) du
///                 / (beta^{n-1} (n-1)! Gamma(1-2/beta)^n Gamma(1+2/beta)^n).
SpecialValue i_n_beta(int n, double beta, double x, double rel_tol = 1e-12);

}  // namespace hetnet::specfun
