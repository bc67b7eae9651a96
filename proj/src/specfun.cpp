#include "hetnet/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetnet/quadrature.hpp"

namespace hetnet::specfun {

void QuadratureSpec::check() const {
  if (points_per_dim < 2) throw std::invalid_argument("QuadratureSpec: points_per_dim must be >= 2");
  if (total_points < 2) throw std::invalid_argument("QuadratureSpec: total_points must be >= 2");
  if (randomizations < 2) throw std::invalid_argument("QuadratureSpec: randomizations must be >= 2");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: rel_tol must be positive");
  if (n_max < 1) throw std::invalid_argument("QuadratureSpec: n_max must be >= 1");
}

double gamma_product(double beta) {
  if (!(beta > 2.0)) throw std::domain_error("gamma_product: beta must exceed 2");
  const double d = 2.0 / beta;
  return std::tgamma(1.0 - d) * std::tgamma(1.0 + d);
}

namespace {

// Exponent of v_i in the J integrand.
double jacobi_a(int i, double beta) { return i * (2.0 / beta + 1.0) - 1.0; }

class TensorJ {
 public:
  TensorJ(int n, double beta, double x, int points) : n_(n), x_(x) {
    const double b = 2.0 / beta;
    rules_.reserve(n - 1);
    for (int i = 1; i < n; ++i) rules_.push_back(quad::gauss_jacobi_unit(points, jacobi_a(i, beta), b));
  }

  double integral() const { return level(n_ - 1, 1.0, 1.0); }

 private:
  // Chooses v_j given suffix = v_{j+1} ... v_{n-1}; `acc` carries the weights
  // over the already-fixed 1/(x + eta_k), k > j + 1.
  double level(int j, double suffix, double acc) const {
    const auto& r = rules_[j - 1];
    double sum = 0.0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k) {
      const double v = r.nodes[k];
      const double next = acc * r.weights[k] / (x_ + (1.0 - v) * suffix);
      const double s = v * suffix;
      sum += (j == 1) ? next / (x_ + s) : level(j - 1, s, next);
    }
    return sum;
  }

  int n_;
  double x_;
  std::vector<quad::Rule> rules_;
};

SpecialValue j_tensor(int n, double beta, double x, const QuadratureSpec& quad) {
  const double scale = (1.0 + n * x) / n;
  const int dim = n - 1;
  int points = quad.points_per_dim;
  // Refine while the tensor budget allows it.
  constexpr double kBudget = 4e7;
  constexpr int kMaxPoints = 640;  // Golub-Welsch cost grows as points^2
  SpecialValue out;
  out.scheme = Scheme::tensor_gauss;
  for (;;) {
    const int coarse = std::max(2, (3 * points) / 4);
    const double fine_v = scale * TensorJ(n, beta, x, points).integral();
    const double coarse_v = scale * TensorJ(n, beta, x, coarse).integral();
    out.value = fine_v;
    out.error = std::abs(fine_v - coarse_v);
    out.converged = out.error <= quad.rel_tol * std::abs(fine_v);
    const int next = 2 * points;
    if (out.converged || next > kMaxPoints || std::pow(static_cast<double>(next), dim) > kBudget) break;
    points = next;
  }
  return out;
}

std::vector<SpecialValue> j_qmc(int n, double beta, const std::vector<double>& xs, const QuadratureSpec& quad) {
  const int dim = n - 1;
  const double b = 2.0 / beta;
  const double B = b + 1.0;
  std::vector<double> A(dim);
  double norm = 1.0;
  for (int i = 0; i < dim; ++i) {
    A[i] = jacobi_a(i + 1, beta) + 1.0;
    norm /= A[i] * B;
  }

  const auto pts = quad::sobol_points(dim, quad.total_points);
  std::mt19937_64 rng(quad.seed ^ (0x100000001b3ULL * static_cast<std::uint64_t>(n)));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // The mapped points do not depend on x, so they are shared by every x.
  const std::size_t count = static_cast<std::size_t>(quad.total_points);
  std::vector<double> v(count * dim);
  std::vector<double> ratio(count);
  std::vector<double> shift(dim);
  std::vector<std::vector<double>> estimates(xs.size());
  for (int m = 0; m < quad.randomizations; ++m) {
    for (auto& s : shift) s = unif(rng);
    for (std::size_t k = 0; k < count; ++k) {
      double r = 1.0;
      for (int i = 0; i < dim; ++i) {
        double u = pts[k * dim + i] + shift[i];
        if (u >= 1.0) u -= 1.0;
        // Kumaraswamy(A_i, B) inverse CDF; z = 1 - v^A.
        const double z = std::pow(1.0 - u, 1.0 / B);
        const double one_minus_v = -std::expm1(std::log1p(-z) / A[i]);
        v[k * dim + i] = 1.0 - one_minus_v;
        r *= (z > 0.0) ? std::pow(one_minus_v / z, b) : std::pow(1.0 / A[i], b);
      }
      ratio[k] = r;
    }
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      const double x = xs[ix];
      double sum = 0.0;
      for (std::size_t k = 0; k < count; ++k) {
        const double* vk = &v[k * dim];
        double suffix = 1.0;
        double denom = 1.0;
        for (int j = dim; j >= 1; --j) {
          denom *= x + (1.0 - vk[j - 1]) * suffix;
          suffix *= vk[j - 1];
        }
        denom *= x + suffix;
        sum += ratio[k] / denom;
      }
      estimates[ix].push_back(sum / static_cast<double>(count));
    }
  }

  std::vector<SpecialValue> out(xs.size());
  for (std::size_t ix = 0; ix < xs.size(); ++ix) {
    const auto& e = estimates[ix];
    double mean = 0.0;
    for (double val : e) mean += val;
    mean /= e.size();
    double var = 0.0;
    for (double val : e) var += (val - mean) * (val - mean);
    var /= (e.size() - 1);
    const double scale = norm * (1.0 + n * xs[ix]) / n;
    out[ix].scheme = Scheme::quasi_monte_carlo;
    out[ix].value = scale * mean;
    out[ix].error = 3.0 * scale * std::sqrt(var / e.size());
    out[ix].converged = out[ix].error <= quad.rel_tol * std::abs(out[ix].value);
  }
  return out;
}

}  // namespace

std::vector<SpecialValue> j_n_beta(int n, double beta, const std::vector<double>& xs, const QuadratureSpec& quad) {
  quad.check();
  if (n < 1) throw std::invalid_argument("j_n_beta: n must be >= 1");
  if (n > quad.n_max) {
    throw std::out_of_range("j_n_beta: n = " + std::to_string(n) + " exceeds n_max = " +
                            std::to_string(quad.n_max));
  }
  for (double x : xs) {
    if (!(x >= 0.0)) throw std::domain_error("j_n_beta: x must be non-negative");
  }
  if (!(beta > 2.0)) throw std::domain_error("j_n_beta: beta must exceed 2");
  if (n == 1) return std::vector<SpecialValue>(xs.size(), SpecialValue{1.0, 0.0, true, Scheme::tensor_gauss});

  Scheme s = quad.scheme;
  if (s == Scheme::automatic) s = (n - 1 <= quad.tensor_max_dim) ? Scheme::tensor_gauss : Scheme::quasi_monte_carlo;
  if (s == Scheme::quasi_monte_carlo) return j_qmc(n, beta, xs, quad);
  std::vector<SpecialValue> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(j_tensor(n, beta, x, quad));
  return out;
}

SpecialValue j_n_beta(int n, double beta, double x, const QuadratureSpec& quad) {
  return j_n_beta(n, beta, std::vector<double>{x}, quad).front();
}

SpecialValue i_n_beta(int n, double beta, double x, double rel_tol) {
  if (n < 1) throw std::invalid_argument("i_n_beta: n must be >= 1");
  if (!(x >= 0.0)) throw std::domain_error("i_n_beta: x must be non-negative");
  if (!(beta > 2.0)) throw std::domain_error("i_n_beta: beta must exceed 2");

  const double d = 2.0 / beta;
  const double g_minus = std::tgamma(1.0 - d);
  const double g_plus = std::tgamma(1.0 + d);
  const double c = x * std::pow(g_minus, -beta / 2.0);
  auto f = [n, beta, c](double u) {
    if (u == 0.0) return 0.0;
    const double e = -u * u - c * std::pow(u, beta);
    return std::exp((2 * n - 1) * std::log(u) + e);
  };
  const auto integral = quad::adaptive(f, 0.0, std::numeric_limits<double>::infinity(), {rel_tol, 0.0, 4000});

  // 2^n / (beta^{n-1} (n-1)! (g_- g_+)^n), in logs to stay finite for large n.
  const double log_pref = n * std::log(2.0) - (n - 1) * std::log(beta) - std::lgamma(n) -
                          n * std::log(g_minus * g_plus);
  const double pref = std::exp(log_pref);
  SpecialValue out;
  out.value = pref * integral.value;
  out.error = pref * integral.error;
  out.converged = integral.converged;
  return out;
}

}  // namespace hetnet::specfun
