#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hetnet/coverage.hpp"

using namespace hetnet;
using namespace hetnet::coverage;

namespace {

NetworkParams homogeneous(double p, double beta = 4.0) {
  NetworkParams n;
  n.p = p;
  n.beta = beta;
  return n;
}

NetworkParams design(double p, double pmicro, double beta = 4.0) {
  NetworkParams n = homogeneous(p, beta);
  n.p_micro = pmicro;
  n.p_macro = solve_equivalent_pmacro(p, pmicro, 1.0, beta);
  return n;
}

// Int_1^inf (2^t - 1)^(-2/beta) dt by a midpoint sum; past `hi` the
// integrand is 2^(-2t/beta) to double precision.
double tail_oracle(double beta) {
  const double hi = 120.0;
  const int m = 4000000;
  const double h = (hi - 1.0) / m;
  long double s = 0.0L;
  for (int i = 0; i < m; ++i) {
    const double t = 1.0 + (i + 0.5) * h;
    s += std::pow(std::exp2(t) - 1.0, -2.0 / beta);
  }
  const double k = 2.0 / beta * std::numbers::ln2;
  return static_cast<double>(s) * h + std::exp(-k * hi) / k;
}

// Composite Simpson of CCDF(2^t - 1) over [a, b].
double simpson_ccdf(const NetworkParams& n, double a, double b, int m) {
  const double h = (b - a) / m;
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * sir_ccdf(n, std::exp2(a + i * h) - 1.0).prob;
  }
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("closed form above tau = 1") {
  CHECK(sir_ccdf(homogeneous(1.0), 1.0).prob == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-14));
  CHECK(sir_ccdf(homogeneous(1.0), 4.0).prob == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
  CHECK(sir_ccdf(homogeneous(0.5), 1.0).prob == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
  for (double tau : {2.0, 5.0, 10.0}) {
    const auto pt = sir_ccdf(homogeneous(1.0), tau);
    CHECK(pt.method == CcdfMethod::closed_form);
    CHECK_FALSE(pt.truncated);
    CHECK(pt.prob == doctest::Approx(2.0 / std::numbers::pi / std::sqrt(tau)).epsilon(1e-14));
  }
}

TEST_CASE("first series term equals the closed form at tau = 1") {
  for (double beta : {2.5, 3.0, 4.0, 6.0}) {
    const double closed = 1.0 / specfun::gamma_product(beta);
    const auto c1 = series_coefficient(1, beta, 1.0);
    CHECK(c1.value == doctest::Approx(closed).epsilon(1e-12));
    CHECK(sir_ccdf(homogeneous(1.0, beta), 1.0).prob == doctest::Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("linear in p above tau = 1 for homogeneous powers") {
  for (double tau : {1.0, 1.5, 3.0, 10.0}) {
    const double base = sir_ccdf(homogeneous(1.0), tau).prob;
    for (int i = 1; i <= 9; ++i) {
      const double p = i / 10.0;
      CHECK(sir_ccdf(homogeneous(p), tau).prob / base == doctest::Approx(p).epsilon(1e-10));
    }
  }
}

TEST_CASE("series below tau = 1 continues the closed form") {
  const auto n = homogeneous(1.0);
  const double at1 = sir_ccdf(n, 1.0).prob;
  const auto below = sir_ccdf(n, 1.0 - 1e-7);
  CHECK(below.method == CcdfMethod::series);
  CHECK(below.prob == doctest::Approx(at1).epsilon(1e-6));
  CHECK(below.prob >= at1);
}

TEST_CASE("ccdf non-increasing on [0.05, 50]") {
  for (const auto& n : {homogeneous(1.0), design(0.5, 0.5), design(0.3, 0.0), homogeneous(0.7, 3.0)}) {
    std::vector<double> taus;
    for (int i = 0; i <= 120; ++i) taus.push_back(0.05 * std::pow(1000.0, i / 120.0));
    const auto curve = sir_ccdf_curve(n, taus);
    REQUIRE(curve.points.size() == taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const auto& pt = curve.points[i];
      CHECK(pt.tau == taus[i]);
      CHECK(pt.prob >= 0.0);
      CHECK(pt.prob <= 1.0);
      CHECK(pt.lower <= pt.prob);
      CHECK(pt.prob <= pt.upper);
      if (i > 0) CHECK(pt.prob <= curve.points[i - 1].prob + 1e-9);
    }
  }
}

TEST_CASE("small tau is bracketed, not guessed") {
  const auto n = homogeneous(1.0);
  const double cut = tau_cut();
  CHECK(cut == doctest::Approx(0.125));
  const auto at_cut = sir_ccdf(n, cut);
  CHECK_FALSE(at_cut.truncated);
  const auto pt = sir_ccdf(n, 0.05);
  CHECK(pt.truncated);
  CHECK(pt.lower == doctest::Approx(at_cut.prob).epsilon(1e-8));
  CHECK(pt.upper == 1.0);
  CHECK(pt.prob == doctest::Approx(0.5 * (pt.lower + pt.upper)));
}

TEST_CASE("no macro tier means no coverage") {
  NetworkParams n = homogeneous(0.0);
  n.p_micro = 1.0;
  n.p_macro = 0.0;
  for (double tau : {0.05, 0.5, 2.0}) CHECK(sir_ccdf(n, tau).prob == 0.0);
  CHECK(mean_rate_macro(n).value == 0.0);
}

TEST_CASE("tail integral against a 1-D oracle") {
  for (double beta : {3.0, 3.5, 4.0, 6.0}) {
    CHECK(tail_integral(beta) == doctest::Approx(tail_oracle(beta)).epsilon(1e-8));
  }
}

TEST_CASE("rate above one") {
  const double c = rate_constant(4.0);
  CHECK(c == doctest::Approx(2.0 / std::numbers::pi * tail_oracle(4.0)).epsilon(1e-8));
  CHECK(rate_above_one(homogeneous(1.0)).value == doctest::Approx(c).epsilon(1e-14));
  CHECK(rate_above_one(homogeneous(0.25)).value == doctest::Approx(c / 4).epsilon(1e-14));
  CHECK(rate_above_one(homogeneous(0.0)).value == 0.0);
  const auto off = rate_above_one(design(0.5, 0.0));
  CHECK(off.extrapolated);
  CHECK(std::isfinite(off.value));
}

TEST_CASE("mean rate integrates the ccdf") {
  const auto n = homogeneous(1.0);
  const auto r = mean_rate_macro(n);
  const double t0 = std::log2(1.0 + tau_cut());
  // above t = 1 the closed form integrates exactly
  const double upper = tail_integral(4.0) / specfun::gamma_product(4.0);
  const double mid = simpson_ccdf(n, t0, 1.0, 200);
  const double low_hi = t0;
  const double low_lo = t0 * sir_ccdf(n, tau_cut()).prob;
  CHECK(r.lower <= r.value);
  CHECK(r.value <= r.upper);
  CHECK(r.lower == doctest::Approx(low_lo + mid + upper).epsilon(1e-6));
  CHECK(r.upper == doctest::Approx(low_hi + mid + upper).epsilon(1e-6));
  CHECK(r.upper - r.lower < 2e-4);
}

TEST_CASE("micro off keeps the homogeneous rate") {
  const auto a = mean_rate_macro(homogeneous(1.0));
  const auto b = mean_rate_macro(design(0.5, 0.0));
  CHECK(b.value == doctest::Approx(a.value).epsilon(1e-14));
}

TEST_CASE("equivalent rate ignores the design") {
  const auto h = mean_rate_macro(homogeneous(1.0));
  const auto a = mean_rate_equivalent(design(0.3, 0.2));
  const auto b = mean_rate_equivalent(design(0.8, 0.9));
  CHECK(a.value == b.value);
  CHECK(a.lower == b.lower);
  CHECK(a.value == doctest::Approx(h.value).epsilon(1e-14));
  NetworkParams bad = design(0.5, 0.5);
  bad.p_macro *= 2.0;
  CHECK_THROWS_AS(mean_rate_equivalent(bad), std::domain_error);
}

TEST_CASE("rate falls as the micro tier takes power") {
  double prev = INFINITY;
  for (double pm : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const double v = mean_rate_macro(design(0.5, pm)).value;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("rate model is cached per beta") {
  const auto& a = rate_model(4.0);
  const auto& b = rate_model(4.0);
  CHECK(&a == &b);
  CHECK(a.moments().size() == 8);
  CHECK(a.quadrature_error() < 1e-8);
}

TEST_CASE("curve matches pointwise evaluation") {
  const auto n = design(0.4, 0.3);
  const std::vector<double> taus{2.0, 0.7, 0.02, 0.3, 0.125, 1.0};
  const auto curve = sir_ccdf_curve(n, taus);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const auto pt = sir_ccdf(n, taus[i]);
    CHECK(curve.points[i].prob == doctest::Approx(pt.prob).epsilon(1e-10));
    CHECK(curve.points[i].method == pt.method);
    CHECK(curve.points[i].truncated == pt.truncated);
  }
}
