#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "qaccel/spectral.hpp"
#include "qaccel/tdse.hpp"

using namespace qaccel;

namespace {

constexpr double kPi = std::numbers::pi;

Schedule frozen_schedule(double a, double epsilon = 0.05) {
  Schedule s;
  s.a1 = a;
  s.a2 = a + 1.0;   // unused when the wall is frozen
  s.move_wall = false;
  s.alpha_max = 0.0;
  s.epsilon = epsilon;
  return s;
}

double right_mass(const WaveState& state, const Grid& grid) {
  double acc = 0.0;
  for (int i = 0; i < grid.n_interior(); ++i)
    if (grid.x_of_interior(i) > 1e-12) acc += std::norm(state.psi[i]);
  return acc * grid.dx;
}

}  // namespace

TEST_CASE("grid nodes hit the barrier site and integer walls") {
  Grid grid = Grid::make(48, 3.15);
  CHECK(grid.dx == doctest::Approx(1.0 / 48.0));
  CHECK(grid.x_max() >= 3.15);
  CHECK(grid.x_of_interior(grid.interior_index(0.0)) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(grid.x_of_interior(grid.interior_index(3.0)) == doctest::Approx(3.0));
  CHECK_THROWS_AS(grid.interior_index(0.5 * grid.dx + 0.25), DomainError);
  Grid fine = grid.refined();
  CHECK(fine.dx == doctest::Approx(grid.dx / 2.0));
  CHECK(fine.x_max() == doctest::Approx(grid.x_max()));
}

TEST_CASE("split Hamiltonian reproduces the left-well spectrum") {
  Grid grid = Grid::make(72, 1.1);
  WallOptions wall{WallModel::DirichletNode};
  auto h = build_hamiltonian(grid, 1.0, 1.0, wall);
  auto spec = instantaneous_spectrum(h, grid, 4);
  // At a=1 the merged order alternates left, right; left energies -1+pi^2 n^2.
  CHECK(spec.energies[0] ==
        doctest::Approx(kPi * kPi - 1.0).epsilon(2e-3));
  CHECK(spec.energies[2] ==
        doctest::Approx(4.0 * kPi * kPi - 1.0).epsilon(2e-3));
  CHECK(spec.energies[1] == doctest::Approx(kPi * kPi).epsilon(2e-3));
}

TEST_CASE("large finite barrier approaches the split limit") {
  Grid grid = Grid::make(48, 3.2);
  WallOptions wall{WallModel::DirichletNode};
  auto split = instantaneous_spectrum(build_hamiltonian(grid, 3.0, 1.0, wall),
                                      grid, 6);
  auto big_g = instantaneous_spectrum(
      build_hamiltonian(grid, 3.0, 1.0 - 1e-6, wall), grid, 6);
  for (int k = 0; k < 6; ++k)
    CHECK(big_g.energies[k] ==
          doctest::Approx(split.energies[k]).epsilon(1e-2));
}

TEST_CASE("alpha=0 removes the barrier term") {
  Grid grid = Grid::make(48, 1.2);
  auto h0 = build_hamiltonian(grid, 1.0, 0.0);
  auto h5 = build_hamiltonian(grid, 1.0, 0.5);
  int i0 = grid.interior_index(0.0);
  for (int i = 0; i < h0.size(); ++i) {
    if (i == i0)
      CHECK(h5.diag[i] - h0.diag[i] ==
            doctest::Approx(1.0 / grid.dx));  // g(1/2) = 1
    else
      CHECK(h5.diag[i] == h0.diag[i]);
  }
  CHECK_THROWS_AS(build_hamiltonian(grid, 1.0, 1.5), DomainError);
  CHECK_THROWS_AS(build_hamiltonian(grid, 1.0, -0.1), DomainError);
}

TEST_CASE("attractive barrier switch flips the sign of the point term") {
  Grid grid = Grid::make(48, 1.2);
  BarrierOptions attractive;
  attractive.attractive = true;
  auto rep = build_hamiltonian(grid, 1.0, 0.5);
  auto att = build_hamiltonian(grid, 1.0, 0.5, {}, attractive);
  int i0 = grid.interior_index(0.0);
  CHECK(att.diag[i0] - rep.diag[i0] == doctest::Approx(-2.0 / grid.dx));
}

TEST_CASE("eigenvectors are dx-orthonormal") {
  Grid grid = Grid::make(48, 3.2);
  auto spec = instantaneous_spectrum(build_hamiltonian(grid, 3.0, 1.0), grid,
                                     8);
  for (int i = 0; i < 8; ++i)
    for (int j = i; j < 8; ++j) {
      double dot = 0.0;
      for (std::size_t p = 0; p < spec.states[i].size(); ++p)
        dot += spec.states[i][p] * spec.states[j][p];
      dot *= grid.dx;
      CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-8);
    }
  for (int i = 1; i < 8; ++i) CHECK(spec.energies[i] > spec.energies[i - 1]);
}

TEST_CASE("split eigen-ordering matches the segment indicators") {
  Grid grid = Grid::make(64, 3.2);
  WallOptions wall{WallModel::DirichletNode};
  auto spec = instantaneous_spectrum(build_hamiltonian(grid, 3.0, 1.0, wall),
                                     grid, 8);
  auto seq = segment_indicators(3.0);
  for (int k = 0; k < 8; ++k) {
    WaveState probe;
    probe.psi.assign(spec.states[k].begin(), spec.states[k].end());
    bool is_right = right_mass(probe, grid) > 0.5;
    CHECK(seq.sigma(k + 1) == (is_right ? -1 : 1));
  }
}

TEST_CASE("populations are projections") {
  Grid grid = Grid::make(48, 1.5);
  auto spec = instantaneous_spectrum(build_hamiltonian(grid, 1.0, 0.0), grid,
                                     4);
  WaveState state;
  state.psi.assign(spec.states[2].begin(), spec.states[2].end());
  auto pops = populations(state, spec, grid.dx);
  for (int k = 0; k < 4; ++k)
    CHECK(std::abs(pops[k] - (k == 2 ? 1.0 : 0.0)) < 1e-10);

  // Equal superposition splits evenly.
  for (std::size_t i = 0; i < state.psi.size(); ++i)
    state.psi[i] = (spec.states[0][i] + spec.states[1][i]) / std::sqrt(2.0);
  pops = populations(state, spec, grid.dx);
  CHECK(std::abs(pops[0] - 0.5) < 1e-10);
  CHECK(std::abs(pops[1] - 0.5) < 1e-10);
  double total = 0.0;
  for (double p : pops) total += p;
  CHECK(total <= 1.0 + 1e-6);
}

TEST_CASE("stationary state stays put under a frozen schedule") {
  Grid grid = Grid::make(48, 1.45);
  Schedule sched = frozen_schedule(1.0);
  auto h = build_hamiltonian(grid, sched.a(0.0), sched.alpha(0.0));
  auto spec = instantaneous_spectrum(h, grid, 3);
  WaveState state = eigenstate_wave(grid, sched, 0.0, 2);
  double e0 = h.expectation(state.psi, grid.dx);

  PropagationStats stats;
  const double t1 = 5.0;
  state = propagate(state, grid, sched, 0.0, t1, 1e-3, {}, {}, &stats);

  auto pops = populations(state, spec, grid.dx);
  CHECK(std::abs(pops[1] - 1.0) < 1e-6);
  CHECK(stats.max_norm_drift < 1e-10);

  // Energy expectation conserved under time-independent H.
  double e1 = h.expectation(state.psi, grid.dx);
  CHECK(std::abs(e1 - e0) / std::abs(e0) < 1e-8);

  // Phase advances as exp(-i E t) up to the O(dt^2) phase error.
  std::complex<double> overlap = 0.0;
  for (std::size_t i = 0; i < state.psi.size(); ++i)
    overlap += spec.states[1][i] * state.psi[i];
  overlap *= grid.dx;
  double expected_phase = -spec.energies[1] * t1;
  double got = std::arg(overlap);
  double diff = std::remainder(got - expected_phase, 2.0 * kPi);
  CHECK(std::abs(diff) < 1e-2);
}

TEST_CASE("full separation confines the left well exactly") {
  Grid grid = Grid::make(48, 3.2);
  Schedule sched;
  sched.move_wall = false;  // freeze a at a1 = 1; alpha still ramps to 1
  sched.epsilon = 0.05;
  WaveState state = eigenstate_wave(grid, sched, sched.tau1, 1);
  CHECK(right_mass(state, grid) < 1e-10);
  state = propagate(state, grid, sched, sched.tau1 / sched.epsilon,
                    sched.tau2 / sched.epsilon, 1e-3);
  CHECK(right_mass(state, grid) < 1e-10);
}

TEST_CASE("schedule shape") {
  Schedule s;
  CHECK(s.a(s.tau1) == doctest::Approx(1.0));
  CHECK(s.a(s.tau2) == doctest::Approx(3.0));
  CHECK(s.a(0.0) == doctest::Approx(1.0));
  CHECK(s.a(s.period) == doctest::Approx(1.0));
  for (double tau = s.tau1; tau <= s.tau2; tau += 0.01)
    CHECK(s.alpha(tau) == 1.0);
  CHECK(s.alpha(0.0) == 0.0);
  CHECK(s.alpha(s.period) == 0.0);
  // Wall holds still whenever the barrier is partial.
  for (double tau : {s.tau1 - 0.5 * s.ramp, s.tau2 + 0.5 * s.ramp}) {
    double a_lo = s.a(tau - 1e-6), a_hi = s.a(tau + 1e-6);
    CHECK(a_lo == doctest::Approx(a_hi).epsilon(1e-12));
  }
  // Continuity.
  for (double tau = 0.0; tau < s.period; tau += 1e-3) {
    CHECK(std::abs(s.a(tau + 1e-6) - s.a(tau)) < 1e-4);
    CHECK(std::abs(s.alpha(tau + 1e-6) - s.alpha(tau)) < 1e-4);
  }
  Schedule bad;
  bad.tau2 = bad.tau1;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = Schedule{};
  bad.ramp = 0.3;  // does not fit before tau1
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("suggest_timestep resolves the spectral window") {
  Grid grid = Grid::make(48, 3.2);
  Schedule sched;
  sched.epsilon = 0.05;
  double dt = suggest_timestep(grid, sched, 12);
  CHECK(dt > 0.0);
  auto h = build_hamiltonian(grid, 1.0, 0.0);
  auto spec = instantaneous_spectrum(h, grid, 12);
  CHECK(dt * spec.energies.back() <= 0.1 + 1e-12);
}
