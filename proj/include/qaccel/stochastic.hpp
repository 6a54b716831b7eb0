#pragma once

#include <cstdint>
#include <vector>

#include "qaccel/indicator.hpp"
#include "qaccel/levelmap.hpp"

namespace qaccel {

struct BernoulliParams {
  double beta;   // P(sigma1(k) = +1), in (0,1)
  double gamma;  // P(sigma2(k) = +1), in (0,1)
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  // Degenerate (0 or 1) probabilities are admitted only when `testing`
  // relaxes the open-interval invariant.
  void validate(bool testing = false) const;
};

// I.i.d. +/-1 sequence, +1 with probability beta (which = 1) or gamma
// (which = 2). Deterministic given (seed, stream_id, which); draws for
// distinct (stream_id, which) never share generator state.
IndicatorSequence bernoulli_indicators(
    const BernoulliParams& params, int which,
    std::uint64_t max_length = IndicatorSequence::kDefaultMaxLength);

// The analytic per-period gain rho = beta ln(beta/gamma)
// + (1-beta) ln((1-beta)/(1-gamma)); nonnegative, zero iff beta == gamma.
double kl_rho(double beta, double gamma);

struct GainEstimate {
  double mean;
  double stderr_mean;
  std::uint64_t trials;
};

// Monte Carlo estimate of E[ln kbar - ln k]: each trial samples one
// forward map step from k_start out of the exact induced distribution
// (fresh sigma1, sigma2 realizations each trial).
GainEstimate mc_gain(const BernoulliParams& params, std::uint64_t k_start,
                     std::uint64_t trials);

struct LlnOptions {
  // Redraw sigma1, sigma2 each period (default). When false, a single
  // fixed realization pair is used for all periods.
  bool fresh_pair_each_period = true;
  // Test hook: derive sigma2 from the same stream as sigma1, making the
  // two sequences identical realizations.
  bool mirror_streams = false;
  // Below this level the step is taken through materialized sequences and
  // the ordinary map; above it the step is sampled exactly from the
  // induced distribution (binomial prefix count + negative binomial
  // placement), which stays O(1) as k grows.
  std::uint64_t materialize_limit = std::uint64_t{1} << 20;
  std::uint64_t sequence_cap = IndicatorSequence::kDefaultMaxLength;
};

struct LlnResult {
  LevelTrajectory trajectory;
  std::vector<double> log_levels;  // ln k_s
  bool overflowed = false;         // trajectory truncated at the 64-bit edge
};

// Single-realization trajectory of the random map over `periods` periods.
LlnResult lln_trajectory(const BernoulliParams& params, std::uint64_t k0,
                         std::uint64_t periods, const LlnOptions& opts = {});

}  // namespace qaccel
