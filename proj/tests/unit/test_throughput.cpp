#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hetnet/cellstats.hpp"
#include "hetnet/coverage.hpp"
#include "hetnet/throughput.hpp"

using namespace hetnet;
using namespace hetnet::tput;

namespace {

NetworkParams design(double p, double pmicro, double scale = 1.0) {
  NetworkParams n;
  n.p = p;
  n.p_ref = scale;
  n.p_micro = pmicro * scale;
  n.p_macro = solve_equivalent_pmacro(p, n.p_micro, scale, n.beta);
  return n;
}

bool same(double a, double b, double rel) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST_CASE("handoff factor") {
  UserParams u;
  u.v = 0.0;
  CHECK(handoff_factor(NetworkParams{}, u).raw == 1.0);
  u = {};
  const auto h1 = handoff_factor(NetworkParams{}, u);
  CHECK(h1.raw == doctest::Approx(1.0 - 4.0 / (50 * std::numbers::pi) * 40).epsilon(1e-14));
  CHECK(h1.raw == doctest::Approx(-0.0186).epsilon(1e-2));
  CHECK(h1.vacuous);
  CHECK(h1.clamped == 0.0);
  const auto h4 = handoff_factor(design(0.4, 0.0), u);
  CHECK(h4.raw == doctest::Approx(0.3556).epsilon(1e-3));
  CHECK_FALSE(h4.vacuous);
  CHECK(h4.clamped == h4.raw);
}

TEST_CASE("lone user keeps the whole rate") {
  UserParams u;
  u.lambda_su = 0.0;
  u.lambda_mu = 0.0;
  const auto n = design(0.5, 0.0);
  for (auto mode : {Denominators::approximate, Denominators::exact}) {
    const auto mu = r_mu(n, u, mode);
    const double want = handoff_factor(n, u).raw * coverage::mean_rate_macro(n).value;
    CHECK(mu.denominator == 1.0);
    CHECK(mu.raw == doctest::Approx(want).epsilon(1e-14));
    const auto su = r_su(n, u, mode);
    CHECK(su.denominator == 1.0);
    CHECK(su.raw == doctest::Approx(coverage::mean_rate_equivalent(n).value).epsilon(1e-14));
  }
}

TEST_CASE("fast users lose everything") {
  UserParams u;
  u.v = 1e6;
  const auto t = r_mu(design(0.5, 0.0), u, Denominators::approximate);
  CHECK(t.raw < 0.0);
  CHECK(t.clamped == 0.0);
}

TEST_CASE("mobile throughput at p = 0.5 with micro off") {
  const auto t = r_mu(design(0.5, 0.0), UserParams{}, Denominators::approximate);
  CHECK(t.raw > 0.0);
  CHECK(std::isfinite(t.raw));
}

TEST_CASE("mobile throughput rises then falls in p") {
  const UserParams u;
  std::vector<double> v;
  for (int i = 1; i <= 20; ++i) v.push_back(r_mu(design(i / 20.0, 0.0), u, Denominators::approximate).raw);
  const auto peak = std::max_element(v.begin(), v.end()) - v.begin();
  CHECK(peak > 0);
  CHECK(peak < 19);
  for (long i = 1; i <= peak; ++i) CHECK(v[i] > v[i - 1]);
  for (std::size_t i = peak + 1; i < v.size(); ++i) CHECK(v[i] < v[i - 1]);
}

TEST_CASE("static throughput numerator ignores the design") {
  const UserParams u;
  const auto a = r_su(design(0.3, 0.2), u, Denominators::approximate);
  const auto b = r_su(design(0.9, 0.7), u, Denominators::approximate);
  CHECK(a.numerator == b.numerator);
  NetworkParams off = design(0.5, 0.5);
  off.p_macro *= 1.5;
  CHECK_THROWS_AS(r_su(off, u, Denominators::approximate), std::domain_error);
}

TEST_CASE("approximate and exact denominators differ modestly") {
  const UserParams u;
  const auto n = design(0.5, 0.5);
  const auto a = r_su(n, u, Denominators::approximate);
  const auto e = r_su(n, u, Denominators::exact);
  const double gap = std::abs(a.raw - e.raw) / e.raw;
  CHECK(gap > 0.0);
  CHECK(gap < 0.25);
}

TEST_CASE("mobile throughput falls as micro power rises, where the factor is positive") {
  const UserParams u;
  for (double p : {0.2, 0.4, 0.6}) {
    double prev = INFINITY;
    for (int j = 0; j <= 20; ++j) {
      const auto n = design(p, j / 20.0);
      REQUIRE(handoff_factor(n, u).raw > 0.0);
      const double v = r_mu(n, u, Denominators::approximate).raw;
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("bundle fills exact-only fields only in exact mode") {
  const auto n = design(0.5, 0.5);
  const UserParams u;
  const auto a = evaluate(n, u, Denominators::approximate);
  CHECK(std::isnan(a.n_su_macro));
  CHECK(std::isnan(a.n_su_het));
  CHECK(std::isnan(a.n_mu_het));
  CHECK(a.r_mu == doctest::Approx(r_mu(n, u, Denominators::approximate).raw).epsilon(1e-14));
  CHECK(a.r_su == doctest::Approx(r_su(n, u, Denominators::approximate).raw).epsilon(1e-14));
  const auto e = evaluate(n, u, Denominators::exact);
  CHECK(e.n_su_macro == doctest::Approx(cells::n_su_macro(n, u).value));
  CHECK(e.r_mu == doctest::Approx(r_mu(n, u, Denominators::exact).raw).epsilon(1e-14));
  CHECK(e.r_su == doctest::Approx(r_su(n, u, Denominators::exact).raw).epsilon(1e-14));
  CHECK(e.n_su_macro_hat <= e.n_su_macro);
  CHECK(e.n_su_macro <= e.n_su_macro_ub);
}

TEST_CASE("common power scale changes nothing") {
  const UserParams u;
  for (auto mode : {Denominators::approximate, Denominators::exact}) {
    const auto a = evaluate(design(0.4, 0.35), u, mode);
    const auto b = evaluate(design(0.4, 0.35, 1000.0), u, mode);
    CHECK(same(a.e_rate_macro, b.e_rate_macro, 1e-12));
    CHECK(same(a.e_rate_equivalent, b.e_rate_equivalent, 1e-12));
    CHECK(same(a.n_su_macro, b.n_su_macro, 1e-12));
    CHECK(same(a.n_su_het, b.n_su_het, 1e-12));
    CHECK(same(a.n_mu_het, b.n_mu_het, 1e-12));
    CHECK(same(a.n_su_het_hat, b.n_su_het_hat, 1e-12));
    CHECK(same(a.r_mu, b.r_mu, 1e-12));
    CHECK(same(a.r_su, b.r_su, 1e-12));
  }
}
