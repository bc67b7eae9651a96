#pragma once

// Monte Carlo oracle: samples the two-tier network and the road system in a
// square window and measures the analytic quantities at the origin.

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "hetnet/geometry.hpp"
#include "hetnet/model.hpp"

namespace hetnet::sim {

struct SimConfig {
  double window = 1000.0;  // half-width W, m
  double guard = 200.0;    // G, m
  std::int64_t replications = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;              // 0 = hardware concurrency
  std::ostream* records = nullptr;   // optional sink for replicate,quantity,value rows (no header)

  /// Hard errors throw std::invalid_argument; soft issues come back as text.
  std::vector<std::string> check(const NetworkParams& net) const;
};

struct SimEstimate {
  std::string quantity;
  double mean = 0.0;
  double se = 0.0;  // sample std / sqrt(R)
  std::int64_t replications = 0;
  std::uint64_t seed = 0;
};

/// Mean and standard error of `values` (order-preserving sum).
SimEstimate summarize(const std::string& quantity, const std::vector<double>& values, std::uint64_t seed);

/// Generator for replicate `rep` of stream `stream`; independent of threads.
std::mt19937_64 replicate_rng(std::uint64_t seed, std::int64_t rep, std::uint64_t stream);

struct Realization {
  std::vector<geom::Vec2> macro;
  std::vector<geom::Vec2> micro;
};

Realization sample_network(const NetworkParams& net, const SimConfig& cfg, std::int64_t rep);

struct Line {
  double r = 0.0;      // signed distance from the origin
  double theta = 0.0;  // normal direction in [0, pi)
  std::vector<double> users;  // arc positions of MUs along the chord, from its start

  geom::Vec2 normal() const;
  geom::Vec2 direction() const;
};

struct LineSet {
  std::vector<Line> lines;
  double total_length = 0.0;  // chord length inside the window
};

/// Poisson line process of length intensity lambda_l clipped to the window,
/// with a 1-D Poisson(lambda_mu) user process on every chord.
LineSet sample_lines(const UserParams& usr, const SimConfig& cfg, std::int64_t rep);

/// Interference beyond distance W as a fraction of the mean, from the tail
/// of r^(1-beta) against a typical nearest distance 1/(2 sqrt(lambda)).
double guard_tail_fraction(const NetworkParams& net, const SimConfig& cfg);

struct SirResult {
  std::vector<SimEstimate> ccdf;      // macro-served mobile user
  SimEstimate mean_rate;              // E[log2(1 + SIR_macro)]
  std::vector<SimEstimate> ccdf_het;  // strongest-BS static user
  SimEstimate mean_rate_het;
  std::int64_t misses = 0;  // replicates without a macro BS
  double tail_fraction = 0.0;
  std::vector<std::string> warnings;
};

SirResult empirical_sir_ccdf(const NetworkParams& net, const SimConfig& cfg, const std::vector<double>& taus);

/// SIR at the origin for one replicate: {macro-served, strongest-BS}.
std::pair<double, double> replicate_sir(const NetworkParams& net, const Realization& r);

struct CountsResult {
  SimEstimate n_mu_macro;
  SimEstimate n_su_macro;
  SimEstimate n_su_het;
  SimEstimate n_mu_het;
  SimEstimate mass_transport;  // lambda_su n_mu_het - lambda_l lambda_mu n_su_macro, per replicate
  std::int64_t truncated = 0;  // zero cell reached the guard band
  std::int64_t misses = 0;
  std::vector<std::string> warnings;
};

CountsResult empirical_counts(const NetworkParams& net, const UserParams& usr, const SimConfig& cfg);

/// Boundary crossings of the macro Voronoi tessellation on the segment
/// [lo, hi] x {0}, in increasing order.
std::vector<double> macro_crossings(const std::vector<geom::Vec2>& macro, double lo, double hi);

/// Crossings per metre on a segment of length `length` centred at the origin.
SimEstimate empirical_crossings(const NetworkParams& net, const SimConfig& cfg, double length);

/// 1 - |union of length v T_h intervals centred at crossings| / length.
SimEstimate empirical_handoff_free_fraction(const NetworkParams& net, const UserParams& usr, const SimConfig& cfg,
                                            double length);

/// Measure of the union of [c - h/2, c + h/2] over `centers`, clipped to [lo, hi].
double covered_length(const std::vector<double>& centers, double h, double lo, double hi);

}  // namespace hetnet::sim
