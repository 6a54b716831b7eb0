#include "qaccel/stochastic.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <unordered_map>

namespace qaccel {

namespace {

// Levels above this are reported as overflow: the exact-distribution step
// needs index * (1-p)/p to stay well inside the int64 Poisson range.
constexpr std::uint64_t kLevelGuard = std::uint64_t{5} * 100000000 *
                                      1000000000;  // 5e17

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Independent stream per (seed, stream_id, trial, which): the sub-stream
// coordinates are mixed into the engine seed, so parallel trials never
// share state.
std::mt19937_64 engine_for(const BernoulliParams& p, std::uint64_t trial,
                           int which) {
  std::uint64_t h = splitmix64(p.seed);
  h = splitmix64(h ^ splitmix64(p.stream_id + 0x1000));
  h = splitmix64(h ^ splitmix64(trial + 0x2000));
  h = splitmix64(h ^ splitmix64(static_cast<std::uint64_t>(which) + 0x3000));
  return std::mt19937_64(h);
}

// +1 with probability prob, via a fixed 64-bit threshold.
struct BernoulliDraw {
  explicit BernoulliDraw(double prob) {
    if (prob >= 1.0)
      threshold = std::numeric_limits<std::uint64_t>::max(), always = true;
    else if (prob <= 0.0)
      threshold = 0;
    else
      threshold = static_cast<std::uint64_t>(std::ldexp(prob, 64));
  }
  bool operator()(std::mt19937_64& eng) const {
    return always || eng() < threshold;
  }
  std::uint64_t threshold = 0;
  bool always = false;
};

// One forward step of the random map realized by streaming draws: count the
// sigma1 prefix, then scan sigma2 until the matching group member appears.
// Identical in law (and, for shared streams, in realization) to building
// the sequences and calling AdiabaticLevelMap::forward.
std::uint64_t streamed_step(std::uint64_t k, double beta, double gamma,
                            std::mt19937_64& eng1, std::mt19937_64& eng2) {
  BernoulliDraw draw1(beta), draw2(gamma);
  std::uint64_t ones = 0;
  for (std::uint64_t i = 1; i < k; ++i) ones += draw1(eng1) ? 1 : 0;
  bool up = draw1(eng1);
  std::uint64_t index = up ? ones + 1 : k - ones;

  std::uint64_t pos = 0, cnt = 0;
  while (cnt < index) {
    ++pos;
    if (pos > kLevelGuard)
      throw OverflowError("level number exceeded guard during sigma2 scan");
    bool v = draw2(eng2);
    if (v == up) ++cnt;
  }
  return pos;
}

// Binomial(n, p) drawn in chunks of at most 1e16 trials: the libstdc++
// rejection sampler loses double precision (and slows to seconds per draw)
// near n ~ 1e17, while sums of independent binomials are exact.
std::uint64_t draw_binomial(std::uint64_t n, double p, std::mt19937_64& eng) {
  constexpr std::uint64_t kChunk = std::uint64_t{10000000000000000};  // 1e16
  std::uint64_t total = 0;
  while (n > 0) {
    std::uint64_t part = std::min(n, kChunk);
    std::binomial_distribution<std::int64_t> bin(
        static_cast<std::int64_t>(part), p);
    total += static_cast<std::uint64_t>(bin(eng));
    n -= part;
  }
  return total;
}

// The same step sampled exactly from the induced distribution, O(1) in k:
// the prefix count is Binomial(k-1, beta) and the placement of the index-th
// group member in sigma2 is index + NegBinomial(index, p), drawn through
// the Gamma-Poisson mixture.
std::uint64_t sampled_step(std::uint64_t k, double beta, double gamma,
                           std::mt19937_64& eng1, std::mt19937_64& eng2) {
  BernoulliDraw draw1(beta);
  std::int64_t ones = static_cast<std::int64_t>(draw_binomial(k - 1, beta,
                                                              eng1));
  bool up = draw1(eng1);
  std::uint64_t index =
      up ? static_cast<std::uint64_t>(ones) + 1
         : k - static_cast<std::uint64_t>(ones);

  double p = up ? gamma : 1.0 - gamma;
  std::uint64_t failures = 0;
  if (p < 1.0) {
    std::gamma_distribution<double> gd(static_cast<double>(index),
                                       (1.0 - p) / p);
    double lambda = gd(eng2);
    if (lambda > 8.0e18)
      throw OverflowError("negative-binomial mean exceeded int64 range");
    if (lambda > 0.0) {
      std::poisson_distribution<std::int64_t> pois(lambda);
      failures = static_cast<std::uint64_t>(pois(eng2));
    }
  }
  std::uint64_t kbar = index + failures;
  if (kbar < index || kbar > kLevelGuard)
    throw OverflowError("level number exceeded 64-bit guard");
  return kbar;
}

}  // namespace

void BernoulliParams::validate(bool testing) const {
  auto in_range = [testing](double p) {
    return testing ? (p >= 0.0 && p <= 1.0) : (p > 0.0 && p < 1.0);
  };
  if (!in_range(beta) || !in_range(gamma))
    throw DomainError("Bernoulli probabilities must lie in (0,1), got beta=" +
                      std::to_string(beta) +
                      " gamma=" + std::to_string(gamma));
}

IndicatorSequence bernoulli_indicators(const BernoulliParams& params,
                                       int which, std::uint64_t max_length) {
  if (which != 1 && which != 2)
    throw DomainError("which must be 1 (sigma1) or 2 (sigma2)");
  params.validate(true);
  double prob = which == 1 ? params.beta : params.gamma;
  auto gen = [eng = engine_for(params, 0, which),
              draw = BernoulliDraw(prob)]() mutable {
    return draw(eng) ? 1 : -1;
  };
  return IndicatorSequence(gen, max_length);
}

double kl_rho(double beta, double gamma) {
  if (!(beta > 0.0 && beta < 1.0) || !(gamma > 0.0 && gamma < 1.0))
    throw DomainError("kl_rho arguments must lie in (0,1)");
  return beta * std::log(beta / gamma) +
         (1.0 - beta) * std::log((1.0 - beta) / (1.0 - gamma));
}

GainEstimate mc_gain(const BernoulliParams& params, std::uint64_t k_start,
                     std::uint64_t trials) {
  params.validate();
  if (k_start == 0) throw DomainError("k_start must be >= 1");
  if (trials == 0) throw DomainError("trials must be >= 1");

  double sum = 0.0, sumsq = 0.0;
  double lnk = std::log(static_cast<double>(k_start));
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto eng1 = engine_for(params, t, 1);
    auto eng2 = engine_for(params, t, 2);
    std::uint64_t kbar =
        sampled_step(k_start, params.beta, params.gamma, eng1, eng2);
    double g = std::log(static_cast<double>(kbar)) - lnk;
    sum += g;
    sumsq += g * g;
  }
  double n = static_cast<double>(trials);
  double mean = sum / n;
  double var = trials > 1 ? (sumsq - n * mean * mean) / (n - 1.0) : 0.0;
  return GainEstimate{mean, std::sqrt(std::max(var, 0.0) / n), trials};
}

LlnResult lln_trajectory(const BernoulliParams& params, std::uint64_t k0,
                         std::uint64_t periods, const LlnOptions& opts) {
  params.validate(true);
  if (k0 == 0) throw DomainError("level numbers start at 1");

  LlnResult result;
  auto& traj = result.trajectory;
  traj.start = k0;
  traj.steps.push_back(k0);
  traj.kind = LevelTrajectory::Kind::Undetermined;
  traj.detail = periods;

  if (!opts.fresh_pair_each_period) {
    // One fixed realization pair for the whole run; loops are meaningful
    // here since the map never changes.
    AdiabaticLevelMap map(
        bernoulli_indicators(params, 1, opts.sequence_cap),
        bernoulli_indicators(params, opts.mirror_streams ? 1 : 2,
                             opts.sequence_cap));
    std::unordered_map<std::uint64_t, std::uint64_t> first_seen;
    first_seen.emplace(k0, 0);
    std::uint64_t k = k0;
    for (std::uint64_t s = 1; s <= periods; ++s) {
      try {
        k = map.forward(k);
      } catch (const TruncationError& e) {
        traj.note = e.what();
        result.overflowed = true;
        break;
      }
      traj.steps.push_back(k);
      auto [it, inserted] = first_seen.emplace(k, s);
      if (!inserted) {
        traj.kind = LevelTrajectory::Kind::Loop;
        traj.detail = s - it->second;
        break;
      }
    }
    result.log_levels = log_series(traj);
    return result;
  }

  std::uint64_t k = k0;
  for (std::uint64_t s = 1; s <= periods; ++s) {
    auto eng1 = engine_for(params, s, 1);
    auto eng2 = engine_for(params, s, opts.mirror_streams ? 1 : 2);
    try {
      if (k <= opts.materialize_limit)
        k = streamed_step(k, params.beta,
                          opts.mirror_streams ? params.beta : params.gamma,
                          eng1, eng2);
      else
        k = sampled_step(k, params.beta,
                         opts.mirror_streams ? params.beta : params.gamma,
                         eng1, eng2);
    } catch (const OverflowError& e) {
      traj.note = e.what();
      result.overflowed = true;
      break;
    }
    traj.steps.push_back(k);
  }
  result.log_levels = log_series(traj);
  return result;
}

}  // namespace qaccel
