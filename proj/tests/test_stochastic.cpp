#include <doctest.h>

#include <cmath>

#include "qaccel/stochastic.hpp"

using namespace qaccel;

TEST_CASE("kl_rho closed-form values") {
  CHECK(kl_rho(0.3, 0.3) == 0.0);
  CHECK(kl_rho(0.5, 0.25) ==
        doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0))
            .epsilon(1e-14));
  CHECK(kl_rho(0.5, 0.25) == doctest::Approx(0.14384103622589045));
  CHECK(kl_rho(0.9, 0.1) ==
        doctest::Approx(0.9 * std::log(9.0) + 0.1 * std::log(1.0 / 9.0)));
}

TEST_CASE("kl_rho is nonnegative, zero only on the diagonal") {
  for (int i = 1; i < 32; ++i)
    for (int j = 1; j < 32; ++j) {
      double beta = i / 32.0, gamma = j / 32.0;
      double rho = kl_rho(beta, gamma);
      if (i == j)
        CHECK(rho == 0.0);
      else
        CHECK(rho > 0.0);
    }
}

TEST_CASE("kl_rho is symmetric under relabelling the groups") {
  CHECK(kl_rho(0.3, 0.8) == doctest::Approx(kl_rho(0.7, 0.2)).epsilon(1e-14));
  CHECK_THROWS_AS(kl_rho(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(kl_rho(0.5, 1.0), DomainError);
}

TEST_CASE("degenerate Bernoulli gives the all-ones sequence") {
  auto seq = bernoulli_indicators({1.0, 0.5, 1, 0}, 1);
  for (std::uint64_t k = 1; k <= 100; ++k) CHECK(seq.sigma(k) == 1);
}

TEST_CASE("empirical mean of a fair sequence is near zero") {
  auto seq = bernoulli_indicators({0.5, 0.5, 42, 0}, 1);
  const std::uint64_t n = 1000000;
  double mean = static_cast<double>(seq.prefix_sum(n)) / n;
  CHECK(std::abs(mean) < 3.0e-3);  // 3 sigma of the binomial standard error
}

TEST_CASE("prefix sums scale as (2 beta - 1) k") {
  BernoulliParams p{0.8, 0.5, 7, 3};
  auto seq = bernoulli_indicators(p, 1);
  const std::uint64_t n = 400000;
  double slope = static_cast<double>(seq.prefix_sum(n)) / n;
  CHECK(slope == doctest::Approx(0.6).epsilon(0.02));
}

TEST_CASE("identical seed and stream give bit-identical sequences") {
  BernoulliParams p{0.37, 0.62, 123456789, 17};
  auto a = bernoulli_indicators(p, 2);
  auto b = bernoulli_indicators(p, 2);
  for (std::uint64_t k = 1; k <= 5000; ++k) REQUIRE(a.sigma(k) == b.sigma(k));
  auto other = bernoulli_indicators({0.37, 0.62, 123456789, 18}, 2);
  bool all_equal = true;
  for (std::uint64_t k = 1; k <= 5000; ++k)
    if (a.sigma(k) != other.sigma(k)) all_equal = false;
  CHECK(!all_equal);
}

TEST_CASE("mc_gain with beta == gamma is consistent with zero") {
  BernoulliParams p{0.4, 0.4, 11, 0};
  auto est = mc_gain(p, 5000, 800);
  CHECK(std::abs(est.mean) < 3.0 * est.stderr_mean + 1e-12);
}

TEST_CASE("mc_gain reproduces kl_rho at moderate scale") {
  BernoulliParams p{0.5, 0.25, 20260823, 0};
  const std::uint64_t k_start = 20000;
  auto est = mc_gain(p, k_start, 2000);
  double rho = kl_rho(0.5, 0.25);
  double allowance =
      3.0 * est.stderr_mean + 2.0 / std::sqrt(static_cast<double>(k_start));
  CHECK(std::abs(est.mean - rho) < allowance);
}

TEST_CASE("mc_gain is reproducible") {
  BernoulliParams p{0.5, 0.25, 5, 2};
  auto a = mc_gain(p, 1000, 200);
  auto b = mc_gain(p, 1000, 200);
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_mean == b.stderr_mean);
}

TEST_CASE("mirrored streams give the identity trajectory") {
  LlnOptions opts;
  opts.mirror_streams = true;
  BernoulliParams p{0.5, 0.5, 9, 0};
  auto r = lln_trajectory(p, 37, 50, opts);
  REQUIRE(r.trajectory.steps.size() == 51);
  for (std::uint64_t k : r.trajectory.steps) CHECK(k == 37);

  // Fixed-pair mode detects the loop outright.
  opts.fresh_pair_each_period = false;
  auto fixed = lln_trajectory(p, 37, 50, opts);
  CHECK(fixed.trajectory.kind == LevelTrajectory::Kind::Loop);
  CHECK(fixed.trajectory.detail == 1);
}

TEST_CASE("zero periods returns just the start") {
  auto r = lln_trajectory({0.5, 0.25, 1, 0}, 100, 0);
  REQUIRE(r.trajectory.steps.size() == 1);
  CHECK(r.trajectory.steps[0] == 100);
  CHECK(r.log_levels[0] == doctest::Approx(std::log(100.0)));
}

TEST_CASE("lln slope approaches kl_rho") {
  double rho = kl_rho(0.5, 0.25);
  int within = 0, total = 20;
  for (int s = 0; s < total; ++s) {
    BernoulliParams p{0.5, 0.25, 77, static_cast<std::uint64_t>(s)};
    auto r = lln_trajectory(p, 100, 200);
    if (r.trajectory.steps.size() > 1) {
      double slope = growth_rate(r.trajectory);
      if (std::abs(slope - rho) <= 0.3 * rho) ++within;
    }
  }
  CHECK(within >= total / 2);  // majority of seeds
}

TEST_CASE("sampled and materialized steps agree in distribution") {
  // Same start, two estimates of E[ln kbar - ln k]: one from the streamed
  // path (materialize_limit high), one from the exact-distribution path
  // (materialize_limit 0). Means must agree within combined error bars.
  auto run = [](std::uint64_t limit, std::uint64_t seed) {
    LlnOptions opts;
    opts.materialize_limit = limit;
    double sum = 0.0, sumsq = 0.0;
    const int n = 400;
    for (int s = 0; s < n; ++s) {
      BernoulliParams p{0.5, 0.25, seed, static_cast<std::uint64_t>(s)};
      auto r = lln_trajectory(p, 5000, 1, opts);
      double g = r.log_levels[1] - r.log_levels[0];
      sum += g;
      sumsq += g * g;
    }
    double mean = sum / n;
    double se = std::sqrt((sumsq / n - mean * mean) / (n - 1));
    return std::pair{mean, se};
  };
  auto [m1, se1] = run(std::uint64_t{1} << 40, 1);
  auto [m2, se2] = run(0, 2);
  CHECK(std::abs(m1 - m2) < 3.5 * std::sqrt(se1 * se1 + se2 * se2));
}

TEST_CASE("invalid Bernoulli parameters are rejected") {
  CHECK_THROWS_AS(mc_gain({0.0, 0.5, 0, 0}, 10, 10), DomainError);
  CHECK_THROWS_AS(mc_gain({0.5, 1.0, 0, 0}, 10, 10), DomainError);
  CHECK_THROWS_AS(mc_gain({0.5, 0.5, 0, 0}, 0, 10), DomainError);
  CHECK_THROWS_AS(lln_trajectory({0.5, 0.5, 0, 0}, 0, 5), DomainError);
}
