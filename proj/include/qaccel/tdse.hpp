#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qaccel/errors.hpp"

namespace qaccel {

// Uniform spatial grid on [-1, x_max] with Dirichlet ends. dx = 1 / m for
// integer m, so x = 0 (the barrier site) and every integer wall position
// fall exactly on grid nodes. The wave function lives on interior nodes.
struct Grid {
  double x_min = -1.0;
  double dx = 1.0 / 144.0;
  int n_points = 600;  // total nodes including both Dirichlet ends

  // Grid with nodes_per_unit cells per unit length, extending to at least
  // x_max_at_least.
  static Grid make(int nodes_per_unit, double x_max_at_least);

  // Refined grid with every cell halved (same extent).
  Grid refined() const;

  int n_interior() const { return n_points - 2; }
  double x_max() const { return x_min + dx * (n_points - 1); }
  double x_of_interior(int i) const { return x_min + dx * (i + 1); }
  // Interior index of a node at coordinate x; DomainError if x is not a node.
  int interior_index(double x) const;
};

// How the moving right wall at x = a is realized.
enum class WallModel {
  // Smooth steep confining potential height * s((x - a) / (width_cells*dx))
  // with logistic s. Keeps the Hamiltonian continuous in slow time while
  // the wall moves; used for propagation and the matching eigensolves.
  Smooth,
  // Exact Dirichlet condition at the node x = a (nodes at x >= a are
  // decoupled). Requires a to sit on a node; used for frozen-Hamiltonian
  // accuracy checks.
  DirichletNode,
};

struct WallOptions {
  WallModel model = WallModel::Smooth;
  double height = 1.0e5;
  double width_cells = 2.0;
};

struct BarrierOptions {
  // Repulsive point interaction g(alpha) = alpha/(1-alpha) by default; the
  // attractive sign of the printed boundary condition is kept as a switch.
  bool attractive = false;
  // Above this alpha the barrier becomes an exact topological split.
  double split_threshold = 1.0 - 1.0e-8;
};

// Real symmetric tridiagonal operator on the interior nodes. Decoupled
// (Dirichlet) nodes carry kExcludedDiagonal and zeroed couplings so the
// low-lying spectrum is unaffected.
struct TridiagonalOperator {
  std::vector<double> diag;
  std::vector<double> lower;  // lower[i] couples nodes i and i+1
  std::vector<char> excluded;

  static constexpr double kExcludedDiagonal = 1.0e12;

  int size() const { return static_cast<int>(diag.size()); }
  void apply(const std::complex<double>* in, std::complex<double>* out) const;
  double expectation(const std::vector<std::complex<double>>& psi,
                     double dx) const;
};

// H = -d^2/dx^2 + V with V = -1 on x < 0, 0 on x > 0, the point barrier
// g(alpha)/dx at the x = 0 node, and the right wall at x = a.
TridiagonalOperator build_hamiltonian(const Grid& grid, double a, double alpha,
                                      const WallOptions& wall = {},
                                      const BarrierOptions& barrier = {});

// Lowest K eigenpairs, eigenvectors orthonormal under the dx-weighted inner
// product, sign fixed so the first significant component is positive.
struct InstantaneousSpectrum {
  std::vector<double> energies;
  std::vector<std::vector<double>> states;
};

InstantaneousSpectrum instantaneous_spectrum(const TridiagonalOperator& h,
                                             const Grid& grid, int K);

// Slow-time schedule over one period. alpha ramps 0 -> 1 on
// [tau1-ramp, tau1] and back on [tau2, tau2+ramp]; a holds a1 through the
// up-ramp, moves a1 -> a2 during full separation, holds a2 through the
// down-ramp, and returns to a1 on [tau2+ramp, period]. Cosine ramps, so a
// and alpha are C^1 and the wall never moves while the barrier is partial.
struct Schedule {
  double period = 1.0;
  double tau1 = 0.25;
  double tau2 = 0.75;
  double ramp = 0.10;
  double a1 = 1.0;
  double a2 = 3.0;
  double alpha_max = 1.0;  // 0 gives the identity schedule
  bool move_wall = true;   // false freezes a at a1
  double epsilon = 2.0e-3;

  void validate() const;
  double a(double tau) const;
  double alpha(double tau) const;
  double period_physical_time() const { return period / epsilon; }
};

struct WaveState {
  std::vector<std::complex<double>> psi;  // interior nodes
  double time = 0.0;

  double norm(double dx) const;
};

// Initial condition: the k0-th instantaneous eigenstate (real positive
// convention) at slow time tau.
WaveState eigenstate_wave(const Grid& grid, const Schedule& sched, double tau,
                          int k0, const WallOptions& wall = {},
                          const BarrierOptions& barrier = {});

struct PropagationStats {
  double max_norm_drift = 0.0;  // max |norm - initial norm|
  std::uint64_t steps = 0;
};

// Crank-Nicolson (implicit midpoint) propagation from physical time t0 to
// t1 with the Hamiltonian frozen at each step's midpoint slow time.
// Norm drift beyond 1e-8 per unit time aborts with NumericError.
WaveState propagate(WaveState state, const Grid& grid, const Schedule& sched,
                    double t0, double t1, double dt,
                    const WallOptions& wall = {},
                    const BarrierOptions& barrier = {},
                    PropagationStats* stats = nullptr);

// I_k = |<psi_k | psi>|^2 with quadrature weight dx.
std::vector<double> populations(const WaveState& state,
                                const InstantaneousSpectrum& spec, double dx);

// Suggested Crank-Nicolson step: phase_margin / (K-th eigenvalue over the
// schedule's extreme configurations).
double suggest_timestep(const Grid& grid, const Schedule& sched, int K,
                        double phase_margin = 0.1,
                        const WallOptions& wall = {},
                        const BarrierOptions& barrier = {});

struct PeriodCheckpoint {
  std::string label;
  double tau = 0.0;
  std::vector<double> pops;
  std::vector<double> energies;
  int dominant = 0;  // 1-based argmax level
};

struct PeriodReport {
  std::uint64_t k_start = 0;
  std::uint64_t k_predicted = 0;
  std::vector<PeriodCheckpoint> checkpoints;
  std::vector<double> energy_series;  // <H> at regular sample times
  std::vector<double> energy_times;
  double norm_drift = 0.0;
  std::uint64_t steps = 0;

  const PeriodCheckpoint& final_checkpoint() const {
    return checkpoints.back();
  }
};

// Propagates one full period from instantaneous eigenstate k0 at tau = 0,
// recording populations at the ramp boundaries and period end, and compares
// against the level-map prediction for the segment model (a1, a2).
PeriodReport run_period_experiment(int k0, const Schedule& sched,
                                   const Grid& grid, int K, double dt = 0.0,
                                   const WallOptions& wall = {},
                                   const BarrierOptions& barrier = {});

}  // namespace qaccel
