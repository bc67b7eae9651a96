#include "hetnet/simgeo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hetnet/parallel.hpp"

namespace hetnet::sim {

namespace {

constexpr double kPi = std::numbers::pi;

enum Stream : std::uint64_t { kNetwork = 1, kLines = 2, kStaticUsers = 3, kTypicalLine = 4, kMobiles = 5 };

struct LineParams {
  double r;
  double theta;
};

std::vector<LineParams> sample_line_params(double lambda_l, double window, std::mt19937_64& rng) {
  std::vector<LineParams> out;
  if (!(lambda_l > 0.0)) return out;
  // (r, theta) on [-R, R] x [0, pi) with intensity lambda_l / pi
  const double reach = window * std::numbers::sqrt2;
  std::poisson_distribution<std::int64_t> count(2.0 * reach * lambda_l);
  std::uniform_real_distribution<double> ur(-reach, reach);
  std::uniform_real_distribution<double> ut(0.0, kPi);
  const auto n = count(rng);
  out.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double r = ur(rng);
    out.push_back({r, ut(rng)});
  }
  return out;
}

// Chord of the line {q : q . normal = r} through `poly`.
bool chord(const geom::Polygon& poly, double r, double theta, double reach, geom::Vec2& a, double& len) {
  const geom::Vec2 n{std::cos(theta), std::sin(theta)};
  const geom::Vec2 d{-n.y, n.x};
  const geom::Vec2 p0 = n * r - d * reach;
  const geom::Vec2 p1 = n * r + d * reach;
  double t0 = 0.0;
  double t1 = 0.0;
  if (!geom::clip_segment(poly, p0, p1, t0, t1)) return false;
  t0 = std::max(t0, 0.0);
  t1 = std::min(t1, 1.0);
  if (!(t1 > t0)) return false;
  a = p0 + (p1 - p0) * t0;
  len = (t1 - t0) * 2.0 * reach;
  return true;
}

double gain(double d2, double beta, double a) {
  const double x = a * a * d2;
  if (beta == 4.0) return 1.0 / (x * x);
  return std::pow(x, -0.5 * beta);
}

std::size_t nearest(const std::vector<geom::Vec2>& pts, geom::Vec2 q) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = (pts[i] - q).norm2();
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

// Voronoi cell of sites[k] among `sites`, clipped to the window.
geom::Polygon voronoi_cell(const std::vector<geom::Vec2>& sites, std::size_t k, double window) {
  geom::Polygon poly = geom::square(window);
  const geom::Vec2 c = sites[k];
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (i != k) order.emplace_back((sites[i] - c).norm2(), i);
  }
  std::sort(order.begin(), order.end());
  double reach2 = std::numeric_limits<double>::infinity();
  for (const auto& [d2, i] : order) {
    // a site farther than twice the cell radius cannot cut the cell
    if (d2 > 4.0 * reach2) break;
    const geom::Vec2 s = sites[i];
    poly = geom::clip_halfplane(poly, s - c, 0.5 * (s.norm2() - c.norm2()));
    reach2 = 0.0;
    for (const auto& v : poly) reach2 = std::max(reach2, (v - c).norm2());
  }
  return poly;
}

bool touches_guard(const geom::Polygon& poly, double inner) {
  for (const auto& v : poly) {
    if (std::abs(v.x) > inner || std::abs(v.y) > inner) return true;
  }
  return false;
}

// Static users in `poly` (Poisson, lambda per m^2) that `keep` accepts.
template <class Keep>
std::int64_t count_users(const geom::Polygon& poly, double lambda, std::mt19937_64& rng, Keep keep) {
  if (!(lambda > 0.0) || poly.size() < 3) return 0;
  double x0 = poly[0].x, x1 = poly[0].x, y0 = poly[0].y, y1 = poly[0].y;
  for (const auto& v : poly) {
    x0 = std::min(x0, v.x);
    x1 = std::max(x1, v.x);
    y0 = std::min(y0, v.y);
    y1 = std::max(y1, v.y);
  }
  std::poisson_distribution<std::int64_t> count(lambda * (x1 - x0) * (y1 - y0));
  std::uniform_real_distribution<double> ux(x0, x1);
  std::uniform_real_distribution<double> uy(y0, y1);
  const auto n = count(rng);
  std::int64_t kept = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const geom::Vec2 q{ux(rng), uy(rng)};
    if (geom::contains(poly, q) && keep(q)) ++kept;
  }
  return kept;
}

// True when no site in `others` is within `ratio * dist` of q.
bool clear_of(const std::vector<geom::Vec2>& others, geom::Vec2 q, double dist2, double ratio) {
  const double lim = ratio * ratio * dist2;
  for (const auto& o : others) {
    if ((o - q).norm2() < lim) return false;
  }
  return true;
}

void emit(const SimConfig& cfg, const std::string& quantity, const std::vector<double>& values) {
  if (!cfg.records) return;
  auto& os = *cfg.records;
  for (std::size_t i = 0; i < values.size(); ++i) os << i << ',' << quantity << ',' << values[i] << '\n';
}

}  // namespace

std::vector<std::string> SimConfig::check(const NetworkParams& net) const {
  if (!(window > 0.0)) throw std::invalid_argument("SimConfig: window must be positive");
  if (!(guard >= 0.0 && guard < window)) throw std::invalid_argument("SimConfig: need 0 <= guard < window");
  if (replications < 1) throw std::invalid_argument("SimConfig: replications must be >= 1");
  std::vector<std::string> w;
  const double expected = net.lambda_bs * 4.0 * window * window;
  if (expected < 50.0) {
    std::ostringstream os;
    os << "expected BS count in window is " << expected << " (< 50)";
    w.push_back(os.str());
  }
  return w;
}

SimEstimate summarize(const std::string& quantity, const std::vector<double>& values, std::uint64_t seed) {
  SimEstimate e;
  e.quantity = quantity;
  e.seed = seed;
  e.replications = static_cast<std::int64_t>(values.size());
  if (values.empty()) return e;
  long double s = 0.0L;
  for (double v : values) s += v;
  const long double mean = s / values.size();
  long double ss = 0.0L;
  for (double v : values) ss += (v - mean) * (v - mean);
  e.mean = static_cast<double>(mean);
  if (values.size() > 1) {
    const long double var = ss / (values.size() - 1);
    e.se = static_cast<double>(std::sqrt(var / values.size()));
  }
  return e;
}

std::mt19937_64 replicate_rng(std::uint64_t seed, std::int64_t rep, std::uint64_t stream) {
  const auto r = static_cast<std::uint64_t>(rep);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

Realization sample_network(const NetworkParams& net, const SimConfig& cfg, std::int64_t rep) {
  auto rng = replicate_rng(cfg.seed, rep, kNetwork);
  const double area = 4.0 * cfg.window * cfg.window;
  std::uniform_real_distribution<double> u(-cfg.window, cfg.window);
  auto draw = [&](double density, std::vector<geom::Vec2>& out) {
    if (!(density > 0.0)) return;
    std::poisson_distribution<std::int64_t> count(density * area);
    const auto n = count(rng);
    out.reserve(n);
    for (std::int64_t i = 0; i < n; ++i) {
      const double x = u(rng);
      out.push_back({x, u(rng)});
    }
  };
  Realization r;
  draw(net.macro_density(), r.macro);
  draw(net.micro_density(), r.micro);
  return r;
}

geom::Vec2 Line::normal() const { return {std::cos(theta), std::sin(theta)}; }
geom::Vec2 Line::direction() const { return {-std::sin(theta), std::cos(theta)}; }

LineSet sample_lines(const UserParams& usr, const SimConfig& cfg, std::int64_t rep) {
  auto rng = replicate_rng(cfg.seed, rep, kLines);
  const auto params = sample_line_params(usr.lambda_l, cfg.window, rng);
  auto urng = replicate_rng(cfg.seed, rep, kMobiles);
  const auto box = geom::square(cfg.window);
  const double reach = 2.0 * cfg.window;
  LineSet out;
  for (const auto& lp : params) {
    geom::Vec2 a;
    double len = 0.0;
    if (!chord(box, lp.r, lp.theta, reach, a, len)) continue;
    Line line{lp.r, lp.theta, {}};
    if (usr.lambda_mu > 0.0) {
      std::poisson_distribution<std::int64_t> count(usr.lambda_mu * len);
      std::uniform_real_distribution<double> pos(0.0, len);
      const auto n = count(urng);
      line.users.reserve(n);
      for (std::int64_t i = 0; i < n; ++i) line.users.push_back(pos(urng));
      std::sort(line.users.begin(), line.users.end());
    }
    out.total_length += len;
    out.lines.push_back(std::move(line));
  }
  return out;
}

double guard_tail_fraction(const NetworkParams& net, const SimConfig& cfg) {
  const double r_typ = 0.5 / std::sqrt(net.lambda_bs);
  return std::pow(r_typ / cfg.window, net.beta - 2.0);
}

std::pair<double, double> replicate_sir(const NetworkParams& net, const Realization& r) {
  const std::size_t nm = r.macro.size();
  const std::size_t n = nm + r.micro.size();
  if (n == 0) return {0.0, 0.0};
  std::vector<double> rx(n);
  std::size_t near_macro = 0;
  double near_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nm; ++i) {
    const double d2 = r.macro[i].norm2();
    rx[i] = net.p_macro * gain(d2, net.beta, net.a_prefactor);
    if (d2 < near_d2) {
      near_d2 = d2;
      near_macro = i;
    }
  }
  for (std::size_t i = 0; i < r.micro.size(); ++i) {
    rx[nm + i] = net.p_micro * gain(r.micro[i].norm2(), net.beta, net.a_prefactor);
  }
  const std::size_t strongest = static_cast<std::size_t>(std::max_element(rx.begin(), rx.end()) - rx.begin());
  double i_macro = 0.0;
  double i_het = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != near_macro) i_macro += rx[i];
    if (i != strongest) i_het += rx[i];
  }
  auto ratio = [](double s, double i) { return i > 0.0 ? s / i : std::numeric_limits<double>::infinity(); };
  const double sir_macro = (nm == 0) ? 0.0 : ratio(rx[near_macro], i_macro);
  return {sir_macro, ratio(rx[strongest], i_het)};
}

SirResult empirical_sir_ccdf(const NetworkParams& net, const SimConfig& cfg, const std::vector<double>& taus) {
  SirResult out;
  out.warnings = cfg.check(net);
  out.tail_fraction = guard_tail_fraction(net, cfg);
  if (out.tail_fraction >= 1e-3) {
    std::ostringstream os;
    os << "interference beyond the window is " << out.tail_fraction << " of the mean (>= 1e-3)";
    out.warnings.push_back(os.str());
  }
  const auto R = static_cast<std::size_t>(cfg.replications);
  std::vector<double> sm(R), sh(R);
  parallel_for(R, cfg.threads, [&](std::size_t i) {
    const auto real = sample_network(net, cfg, static_cast<std::int64_t>(i));
    std::tie(sm[i], sh[i]) = replicate_sir(net, real);
    if (real.macro.empty()) sm[i] = -1.0;  // marks a miss
  });
  for (auto& v : sm) {
    if (v < 0.0) {
      ++out.misses;
      v = 0.0;
    }
  }
  if (out.misses * 100 > cfg.replications) out.warnings.push_back("more than 1% of replicates had no macro BS");

  std::vector<double> ind(R);
  for (double tau : taus) {
    std::ostringstream tag;
    tag << tau;
    for (std::size_t i = 0; i < R; ++i) ind[i] = sm[i] > tau ? 1.0 : 0.0;
    out.ccdf.push_back(summarize("ccdf_macro@" + tag.str(), ind, cfg.seed));
    emit(cfg, out.ccdf.back().quantity, ind);
    for (std::size_t i = 0; i < R; ++i) ind[i] = sh[i] > tau ? 1.0 : 0.0;
    out.ccdf_het.push_back(summarize("ccdf_het@" + tag.str(), ind, cfg.seed));
    emit(cfg, out.ccdf_het.back().quantity, ind);
  }
  for (std::size_t i = 0; i < R; ++i) ind[i] = std::log2(1.0 + sm[i]);
  out.mean_rate = summarize("rate_macro", ind, cfg.seed);
  emit(cfg, "rate_macro", ind);
  for (std::size_t i = 0; i < R; ++i) ind[i] = std::log2(1.0 + sh[i]);
  out.mean_rate_het = summarize("rate_het", ind, cfg.seed);
  emit(cfg, "rate_het", ind);
  return out;
}

CountsResult empirical_counts(const NetworkParams& net, const UserParams& usr, const SimConfig& cfg) {
  CountsResult out;
  out.warnings = cfg.check(net);
  const auto R = static_cast<std::size_t>(cfg.replications);
  std::vector<double> mu_macro(R), su_macro(R), su_het(R), mu_het(R), transport(R);
  std::vector<char> truncated(R, 0), missed(R, 0);
  const double s = net.micro_radius_ratio();
  const double inner = cfg.window - cfg.guard;
  const double reach = 2.0 * cfg.window;

  parallel_for(R, cfg.threads, [&](std::size_t i) {
    const auto rep = static_cast<std::int64_t>(i);
    const auto real = sample_network(net, cfg, rep);
    auto line_rng = replicate_rng(cfg.seed, rep, kLines);
    const auto lines = sample_line_params(usr.lambda_l, cfg.window, line_rng);
    auto mu_rng = replicate_rng(cfg.seed, rep, kMobiles);
    auto su_rng = replicate_rng(cfg.seed, rep, kStaticUsers);
    auto typ_rng = replicate_rng(cfg.seed, rep, kTypicalLine);
    if (real.macro.empty()) {
      missed[i] = 1;
      mu_macro[i] = 1.0;
      su_het[i] = 1.0;
      return;
    }
    const std::size_t k = nearest(real.macro, {0.0, 0.0});
    const geom::Vec2 xs = real.macro[k];
    const auto cell = voronoi_cell(real.macro, k, cfg.window);
    bool trunc = touches_guard(cell, inner);

    // Mobile users in the macro cell: a Poisson count per chord is exact.
    auto mobiles_on = [&](double r, double theta) -> double {
      geom::Vec2 a;
      double len = 0.0;
      if (usr.lambda_mu <= 0.0 || !chord(cell, r, theta, reach, a, len)) return 0.0;
      std::poisson_distribution<std::int64_t> count(usr.lambda_mu * len);
      return static_cast<double>(count(mu_rng));
    };
    double plp = 0.0;
    for (const auto& lp : lines) plp += mobiles_on(lp.r, lp.theta);
    std::uniform_real_distribution<double> ut(0.0, kPi);
    const double typical_line = mobiles_on(0.0, ut(typ_rng));
    mu_macro[i] = 1.0 + plp + typical_line;

    // Static users whose strongest BS is the macro X*.
    auto macro_keeps = [&](geom::Vec2 q) {
      if (s == 0.0) return true;
      return clear_of(real.micro, q, (q - xs).norm2(), s);
    };
    su_macro[i] = static_cast<double>(count_users(cell, usr.lambda_su, su_rng, macro_keeps));

    // Typical static user at the origin.
    double best = net.p_macro * gain(xs.norm2(), net.beta, 1.0);
    std::size_t best_micro = real.micro.size();
    for (std::size_t j = 0; j < real.micro.size(); ++j) {
      const double v = net.p_micro * gain(real.micro[j].norm2(), net.beta, 1.0);
      if (v > best) {
        best = v;
        best_micro = j;
      }
    }
    if (best_micro == real.micro.size()) {
      // served by X*: same cell, same count
      su_het[i] = 1.0 + su_macro[i];
      mu_het[i] = plp;
    } else {
      const auto mcell = voronoi_cell(real.micro, best_micro, cfg.window);
      trunc = trunc || touches_guard(mcell, inner);
      const geom::Vec2 b0 = real.micro[best_micro];
      auto micro_keeps = [&](geom::Vec2 q) { return clear_of(real.macro, q, (q - b0).norm2(), 1.0 / s); };
      su_het[i] = 1.0 + static_cast<double>(count_users(mcell, usr.lambda_su, su_rng, micro_keeps));
      mu_het[i] = 0.0;
    }
    transport[i] = usr.lambda_su * mu_het[i] - usr.lambda_l * usr.lambda_mu * su_macro[i];
    truncated[i] = trunc ? 1 : 0;
  });

  for (std::size_t i = 0; i < R; ++i) {
    out.truncated += truncated[i];
    out.misses += missed[i];
  }
  if (out.truncated > 0) {
    std::ostringstream os;
    os << out.truncated << " replicate(s) had a served cell reaching the guard band";
    out.warnings.push_back(os.str());
  }
  out.n_mu_macro = summarize("n_mu_macro", mu_macro, cfg.seed);
  out.n_su_macro = summarize("n_su_macro", su_macro, cfg.seed);
  out.n_su_het = summarize("n_su_het", su_het, cfg.seed);
  out.n_mu_het = summarize("n_mu_het", mu_het, cfg.seed);
  out.mass_transport = summarize("mass_transport", transport, cfg.seed);
  emit(cfg, "n_mu_macro", mu_macro);
  emit(cfg, "n_su_macro", su_macro);
  emit(cfg, "n_su_het", su_het);
  emit(cfg, "n_mu_het", mu_het);
  emit(cfg, "mass_transport", transport);
  return out;
}

std::vector<double> macro_crossings(const std::vector<geom::Vec2>& macro, double lo, double hi) {
  std::vector<double> out;
  if (macro.size() < 2) return out;
  std::size_t cur = nearest(macro, {lo, 0.0});
  double t = lo;
  for (;;) {
    const geom::Vec2 c = macro[cur];
    double next = std::numeric_limits<double>::infinity();
    std::size_t who = cur;
    for (std::size_t j = 0; j < macro.size(); ++j) {
      const geom::Vec2 s = macro[j];
      if (!(s.x > c.x)) continue;  // only sites ahead along +x can take over
      const double tj = (s.norm2() - c.norm2()) / (2.0 * (s.x - c.x));
      if (tj > t && tj < next) {
        next = tj;
        who = j;
      }
    }
    if (!(next <= hi)) break;
    out.push_back(next);
    t = next;
    cur = who;
  }
  return out;
}

double covered_length(const std::vector<double>& centers, double h, double lo, double hi) {
  if (!(h > 0.0)) return 0.0;
  double total = 0.0;
  double run_lo = 0.0;
  double run_hi = -std::numeric_limits<double>::infinity();
  bool open = false;
  auto flush = [&] {
    if (open) total += std::max(0.0, std::min(run_hi, hi) - std::max(run_lo, lo));
  };
  for (double c : centers) {  // sorted
    const double a = c - 0.5 * h;
    const double b = c + 0.5 * h;
    if (open && a <= run_hi) {
      run_hi = std::max(run_hi, b);
    } else {
      flush();
      run_lo = a;
      run_hi = b;
      open = true;
    }
  }
  flush();
  return total;
}

SimEstimate empirical_crossings(const NetworkParams& net, const SimConfig& cfg, double length) {
  cfg.check(net);
  if (!(length > 0.0) || length > 2.0 * (cfg.window - cfg.guard)) {
    throw std::invalid_argument("empirical_crossings: need 0 < length <= 2 (window - guard)");
  }
  const auto R = static_cast<std::size_t>(cfg.replications);
  std::vector<double> rate(R);
  parallel_for(R, cfg.threads, [&](std::size_t i) {
    const auto real = sample_network(net, cfg, static_cast<std::int64_t>(i));
    rate[i] = macro_crossings(real.macro, -0.5 * length, 0.5 * length).size() / length;
  });
  emit(cfg, "crossing_rate", rate);
  return summarize("crossing_rate", rate, cfg.seed);
}

SimEstimate empirical_handoff_free_fraction(const NetworkParams& net, const UserParams& usr, const SimConfig& cfg,
                                            double length) {
  cfg.check(net);
  const double h = usr.handoff_length();
  if (!(length > 0.0) || length + h > 2.0 * (cfg.window - cfg.guard)) {
    throw std::invalid_argument("empirical_handoff_free_fraction: need 0 < length + v t_h <= 2 (window - guard)");
  }
  const auto R = static_cast<std::size_t>(cfg.replications);
  std::vector<double> frac(R);
  const double lo = -0.5 * length;
  const double hi = 0.5 * length;
  parallel_for(R, cfg.threads, [&](std::size_t i) {
    const auto real = sample_network(net, cfg, static_cast<std::int64_t>(i));
    // crossings just outside the segment still cover part of it
    const auto xs = macro_crossings(real.macro, lo - 0.5 * h, hi + 0.5 * h);
    frac[i] = 1.0 - covered_length(xs, h, lo, hi) / length;
  });
  emit(cfg, "handoff_free", frac);
  return summarize("handoff_free", frac, cfg.seed);
}

}  // namespace hetnet::sim
