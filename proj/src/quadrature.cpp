#include "hetnet/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <boost/random/sobol.hpp>

namespace hetnet::quad {

Rule gauss_jacobi_unit(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi_unit: n must be >= 1");
  if (!(a > -1.0) || !(b > -1.0)) throw std::invalid_argument("gauss_jacobi_unit: exponents must exceed -1");

  // Jacobi matrix on [-1,1] for (1-t)^alpha (1+t)^beta, with v = (1+t)/2.
  const double alpha = b;
  const double beta = a;
  const double s = alpha + beta;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    const double d = 2.0 * k + s;
    diag(k) = (k == 0) ? (beta - alpha) / (s + 2.0) : (beta * beta - alpha * alpha) / (d * (d + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double d = 2.0 * k + s;
    const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + s);
    off(k - 1) = std::sqrt(num / (d * d * (d + 1.0) * (d - 1.0)));
  }

  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double mass = std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));
  if (n == 1) {
    r.nodes[0] = 0.5 * (1.0 + diag(0));
    r.weights[0] = mass;
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off.head(n - 1), Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw std::runtime_error("gauss_jacobi_unit: eigen solver failed");
  for (int j = 0; j < n; ++j) {
    const double v0 = es.eigenvectors()(0, j);
    r.nodes[j] = 0.5 * (1.0 + es.eigenvalues()(j));
    r.weights[j] = mass * v0 * v0;
  }
  return r;
}

Rule gauss_legendre(int n, double lo, double hi) {
  Rule r = gauss_jacobi_unit(n, 0.0, 0.0);
  const double len = hi - lo;
  for (int j = 0; j < n; ++j) {
    r.nodes[j] = lo + len * r.nodes[j];
    r.weights[j] *= len;
  }
  return r;
}

std::vector<double> sobol_points(int dim, std::int64_t count) {
  if (dim < 1) throw std::invalid_argument("sobol_points: dim must be >= 1");
  boost::random::sobol gen(static_cast<std::size_t>(dim));
  gen.discard(static_cast<std::uintmax_t>(dim));  // drop the all-zero first point
  constexpr double scale = 0x1p-64;
  std::vector<double> pts(static_cast<std::size_t>(dim * count));
  for (auto& x : pts) x = static_cast<double>(gen()) * scale;
  return pts;
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084728250317520291854025};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error;
};

Piece gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[i] * s;
    if (i % 2 == 1) gauss += kWg[i / 2] * s;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace

Integral adaptive(const std::function<double(double)>& f, double a, double b, const AdaptiveOptions& opt) {
  std::function<double(double)> g = f;
  double lo = a;
  double hi = b;
  if (std::isinf(b)) {
    // x = a + t / (1 - t), t in [0, 1)
    g = [&f, a](double t) {
      const double u = 1.0 - t;
      return f(a + t / u) / (u * u);
    };
    lo = 0.0;
    hi = 1.0;
  }

  std::vector<Piece> pieces{gk15(g, lo, hi)};
  Integral out;
  out.evaluations = 15;
  auto by_error = [](const Piece& x, const Piece& y) { return x.error < y.error; };
  for (;;) {
    double total = 0.0;
    double err = 0.0;
    for (const auto& p : pieces) {
      total += p.value;
      err += p.error;
    }
    out.value = total;
    out.error = err;
    if (err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
      out.converged = true;
      break;
    }
    if (static_cast<int>(pieces.size()) >= opt.max_intervals) break;
    std::pop_heap(pieces.begin(), pieces.end(), by_error);
    const Piece worst = pieces.back();
    pieces.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // interval exhausted at machine resolution
      pieces.push_back(worst);
      std::push_heap(pieces.begin(), pieces.end(), by_error);
      break;
    }
    pieces.push_back(gk15(g, worst.a, mid));
    std::push_heap(pieces.begin(), pieces.end(), by_error);
    pieces.push_back(gk15(g, mid, worst.b));
    std::push_heap(pieces.begin(), pieces.end(), by_error);
    out.evaluations += 30;
  }
  return out;
}

}  // namespace hetnet::quad
