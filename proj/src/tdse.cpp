#include "qaccel/tdse.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qaccel/spectral.hpp"

namespace qaccel {

namespace {

constexpr double kNodeTol = 1.0e-9;

double smooth_ramp(double s) {  // C^1 cosine ramp, 0 -> 1 on [0,1]
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return 0.5 * (1.0 - std::cos(std::numbers::pi * s));
}

double logistic(double u) {
  if (u > 40.0) return 1.0;
  if (u < -40.0) return 0.0;
  return 1.0 / (1.0 + std::exp(-u));
}

// Thomas solve for a symmetric tridiagonal complex system; the operators
// here are strictly diagonally dominant after the Crank-Nicolson shift.
void solve_tridiagonal(const std::vector<std::complex<double>>& diag,
                       const std::vector<std::complex<double>>& off,
                       std::vector<std::complex<double>>& rhs,
                       std::vector<std::complex<double>>& scratch) {
  const int n = static_cast<int>(diag.size());
  scratch.resize(n);
  std::complex<double> pivot = diag[0];
  if (std::abs(pivot) == 0.0) throw NumericError("tridiagonal solve: zero pivot");
  rhs[0] /= pivot;
  for (int i = 1; i < n; ++i) {
    scratch[i] = off[i - 1] / pivot;
    pivot = diag[i] - off[i - 1] * scratch[i];
    if (std::abs(pivot) == 0.0)
      throw NumericError("tridiagonal solve: zero pivot");
    rhs[i] = (rhs[i] - off[i - 1] * rhs[i - 1]) / pivot;
  }
  for (int i = n - 2; i >= 0; --i) rhs[i] -= scratch[i + 1] * rhs[i + 1];
}

}  // namespace

Grid Grid::make(int nodes_per_unit, double x_max_at_least) {
  if (nodes_per_unit < 2) throw DomainError("nodes_per_unit must be >= 2");
  if (x_max_at_least <= 0.0)
    throw DomainError("grid must extend past the barrier at x = 0");
  Grid g;
  g.x_min = -1.0;
  g.dx = 1.0 / nodes_per_unit;
  double span = x_max_at_least - g.x_min;
  g.n_points = static_cast<int>(std::ceil(span / g.dx - kNodeTol)) + 1;
  return g;
}

Grid Grid::refined() const {
  Grid g;
  g.x_min = x_min;
  g.dx = dx / 2.0;
  g.n_points = 2 * (n_points - 1) + 1;
  return g;
}

int Grid::interior_index(double x) const {
  double u = (x - x_min) / dx;
  int node = static_cast<int>(std::llround(u));
  if (std::abs(u - node) > 1.0e-6)
    throw DomainError("x=" + std::to_string(x) + " does not lie on a node");
  if (node < 1 || node > n_points - 2)
    throw DomainError("x=" + std::to_string(x) + " is not an interior node");
  return node - 1;
}

void TridiagonalOperator::apply(const std::complex<double>* in,
                                std::complex<double>* out) const {
  const int n = size();
  for (int i = 0; i < n; ++i) {
    std::complex<double> v = diag[i] * in[i];
    if (i > 0) v += lower[i - 1] * in[i - 1];
    if (i + 1 < n) v += lower[i] * in[i + 1];
    out[i] = v;
  }
}

double TridiagonalOperator::expectation(
    const std::vector<std::complex<double>>& psi, double dx) const {
  const int n = size();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    std::complex<double> v = diag[i] * psi[i];
    if (i > 0) v += lower[i - 1] * psi[i - 1];
    if (i + 1 < n) v += lower[i] * psi[i + 1];
    acc += (std::conj(psi[i]) * v).real();
  }
  return acc * dx;
}

TridiagonalOperator build_hamiltonian(const Grid& grid, double a, double alpha,
                                      const WallOptions& wall,
                                      const BarrierOptions& barrier) {
  if (alpha < 0.0 || alpha > 1.0)
    throw DomainError("barrier parameter alpha must lie in [0,1]");
  if (a <= 0.0) throw DomainError("wall position must be positive");
  const int n = grid.n_interior();
  const double inv2 = 1.0 / (grid.dx * grid.dx);

  TridiagonalOperator h;
  h.diag.assign(n, 2.0 * inv2);
  h.lower.assign(n - 1, -inv2);
  h.excluded.assign(n, 0);

  const double w = wall.width_cells * grid.dx;
  for (int i = 0; i < n; ++i) {
    double x = grid.x_of_interior(i);
    if (x < -kNodeTol)
      h.diag[i] += -1.0;
    else if (std::abs(x) <= kNodeTol)
      h.diag[i] += -0.5;  // step midpoint value at the barrier node
    if (wall.model == WallModel::Smooth)
      h.diag[i] += wall.height * logistic((x - a) / w);
  }

  auto exclude = [&](int i) {
    h.diag[i] = TridiagonalOperator::kExcludedDiagonal;
    h.excluded[i] = 1;
    if (i > 0) h.lower[i - 1] = 0.0;
    if (i + 1 < n) h.lower[i] = 0.0;
  };

  if (wall.model == WallModel::DirichletNode) {
    int ia = grid.interior_index(a);  // throws if a is off-node
    for (int i = ia; i < n; ++i) exclude(i);
  }

  int i0 = grid.interior_index(0.0);
  if (alpha >= barrier.split_threshold) {
    exclude(i0);
  } else if (alpha > 0.0) {
    double g = alpha / (1.0 - alpha);
    h.diag[i0] += (barrier.attractive ? -g : g) / grid.dx;
  }
  return h;
}

InstantaneousSpectrum instantaneous_spectrum(const TridiagonalOperator& h,
                                             const Grid& grid, int K) {
  const int n = h.size();
  if (K < 1 || K > n)
    throw DomainError("requested eigenpair count outside [1, n_interior]");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = h.diag[i];
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = h.lower[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigensolver failed to converge");

  InstantaneousSpectrum spec;
  spec.energies.reserve(K);
  spec.states.reserve(K);
  const double scale = 1.0 / std::sqrt(grid.dx);
  for (int k = 0; k < K; ++k) {
    spec.energies.push_back(solver.eigenvalues()(k));
    Eigen::VectorXd v = solver.eigenvectors().col(k);
    double vmax = v.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1.0e-6 * vmax) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    std::vector<double> state(n);
    for (int i = 0; i < n; ++i) state[i] = v(i) * scale;
    spec.states.push_back(std::move(state));
  }
  return spec;
}

void Schedule::validate() const {
  if (epsilon <= 0.0) throw DomainError("epsilon must be positive");
  if (a1 <= 0.0 || a2 <= 0.0) throw DomainError("wall lengths must be positive");
  if (alpha_max < 0.0 || alpha_max > 1.0)
    throw DomainError("alpha_max must lie in [0,1]");
  if (!(0.0 < tau1 && tau1 < tau2 && tau2 < period))
    throw DomainError("need 0 < tau1 < tau2 < period");
  if (ramp <= 0.0 || tau1 - ramp < 0.0 || tau2 + ramp > period)
    throw DomainError("ramps must fit inside [0, period]");
}

double Schedule::a(double tau) const {
  if (!move_wall) return a1;
  tau = tau - period * std::floor(tau / period);
  if (tau <= tau1) return a1;
  if (tau <= tau2)
    return a1 + (a2 - a1) * smooth_ramp((tau - tau1) / (tau2 - tau1));
  double back = tau2 + ramp;
  if (tau <= back) return a2;
  return a2 + (a1 - a2) * smooth_ramp((tau - back) / (period - back));
}

double Schedule::alpha(double tau) const {
  tau = tau - period * std::floor(tau / period);
  double up = tau1 - ramp;
  if (tau <= up) return 0.0;
  if (tau <= tau1) return alpha_max * smooth_ramp((tau - up) / ramp);
  if (tau <= tau2) return alpha_max;
  if (tau <= tau2 + ramp)
    return alpha_max * (1.0 - smooth_ramp((tau - tau2) / ramp));
  return 0.0;
}

double WaveState::norm(double dx) const {
  double acc = 0.0;
  for (const auto& c : psi) acc += std::norm(c);
  return acc * dx;
}

WaveState eigenstate_wave(const Grid& grid, const Schedule& sched, double tau,
                          int k0, const WallOptions& wall,
                          const BarrierOptions& barrier) {
  if (k0 < 1) throw DomainError("level numbers start at 1");
  auto h = build_hamiltonian(grid, sched.a(tau), sched.alpha(tau), wall,
                             barrier);
  auto spec = instantaneous_spectrum(h, grid, k0);
  WaveState state;
  state.time = tau / sched.epsilon;
  state.psi.assign(spec.states[k0 - 1].begin(), spec.states[k0 - 1].end());
  return state;
}

WaveState propagate(WaveState state, const Grid& grid, const Schedule& sched,
                    double t0, double t1, double dt, const WallOptions& wall,
                    const BarrierOptions& barrier, PropagationStats* stats) {
  sched.validate();
  if (dt <= 0.0) throw DomainError("dt must be positive");
  if (t1 < t0) throw DomainError("t1 must be >= t0");
  if (static_cast<int>(state.psi.size()) != grid.n_interior())
    throw DomainError("wave state does not match grid");

  const int n = grid.n_interior();
  const std::uint64_t nsteps = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::ceil((t1 - t0) / dt - 1.0e-12)));
  const double h_step = (t1 - t0) / static_cast<double>(nsteps);

  std::vector<std::complex<double>> adiag(n), aoff(n - 1), rhs(n), scratch(n);
  const double norm0 = state.norm(grid.dx);
  double max_drift = 0.0;

  double t = t0;
  for (std::uint64_t s = 0; s < nsteps; ++s) {
    const double tau_mid = sched.epsilon * (t + 0.5 * h_step);
    auto h = build_hamiltonian(grid, sched.a(tau_mid), sched.alpha(tau_mid),
                               wall, barrier);
    const std::complex<double> il(0.0, 0.5 * h_step);
    for (int i = 0; i < n; ++i) adiag[i] = 1.0 + il * h.diag[i];
    for (int i = 0; i < n - 1; ++i) aoff[i] = il * h.lower[i];
    // rhs = (I - i dt/2 H) psi
    for (int i = 0; i < n; ++i) {
      std::complex<double> v = h.diag[i] * state.psi[i];
      if (i > 0) v += h.lower[i - 1] * state.psi[i - 1];
      if (i + 1 < n) v += h.lower[i] * state.psi[i + 1];
      rhs[i] = state.psi[i] - il * v;
    }
    solve_tridiagonal(adiag, aoff, rhs, scratch);
    state.psi.swap(rhs);
    for (int i = 0; i < n; ++i)
      if (h.excluded[i]) state.psi[i] = 0.0;
    t = t0 + (s + 1) * h_step;

    if ((s & 1023) == 0 || s + 1 == nsteps) {
      double drift = std::abs(state.norm(grid.dx) - norm0);
      max_drift = std::max(max_drift, drift);
      if (drift > 1.0e-8 * std::max(1.0, t - t0))
        throw NumericError("norm drift " + std::to_string(drift) +
                           " beyond tolerance at t=" + std::to_string(t));
    }
  }
  state.time = t1;
  if (stats) {
    stats->max_norm_drift = std::max(stats->max_norm_drift, max_drift);
    stats->steps += nsteps;
  }
  return state;
}

std::vector<double> populations(const WaveState& state,
                                const InstantaneousSpectrum& spec, double dx) {
  std::vector<double> out;
  out.reserve(spec.states.size());
  for (const auto& phi : spec.states) {
    if (phi.size() != state.psi.size())
      throw DomainError("state and spectrum live on different grids");
    std::complex<double> dot = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) dot += phi[i] * state.psi[i];
    out.push_back(std::norm(dot * dx));
  }
  return out;
}

double suggest_timestep(const Grid& grid, const Schedule& sched, int K,
                        double phase_margin, const WallOptions& wall,
                        const BarrierOptions& barrier) {
  double emax = 0.0;
  for (double a : {sched.a1, sched.a2}) {
    auto h = build_hamiltonian(grid, a, 0.0, wall, barrier);
    auto spec = instantaneous_spectrum(h, grid, K);
    emax = std::max(emax, std::abs(spec.energies.back()));
  }
  if (emax <= 0.0) throw NumericError("degenerate spectral window");
  return phase_margin / emax;
}

PeriodReport run_period_experiment(int k0, const Schedule& sched,
                                   const Grid& grid, int K, double dt,
                                   const WallOptions& wall,
                                   const BarrierOptions& barrier) {
  sched.validate();
  if (k0 < 1 || k0 > K) throw DomainError("need 1 <= k0 <= K");
  if (dt <= 0.0) dt = suggest_timestep(grid, sched, K, 0.1, wall, barrier);

  PeriodReport report;
  report.k_start = static_cast<std::uint64_t>(k0);
  if (sched.move_wall && sched.alpha_max == 1.0) {
    AdiabaticLevelMap map = segment_map({sched.a1, sched.a2, 0});
    report.k_predicted = map.forward(static_cast<std::uint64_t>(k0));
  } else {
    report.k_predicted = static_cast<std::uint64_t>(k0);  // identity schedule
  }

  struct Mark {
    const char* label;
    double tau;
  };
  const std::vector<Mark> marks = {
      {"start", 0.0},
      {"pre_separation", sched.tau1 - sched.ramp},
      {"separation", sched.tau1},
      {"reconnection", sched.tau2},
      {"post_reconnection", sched.tau2 + sched.ramp},
      {"period_end", sched.period},
  };

  WaveState state = eigenstate_wave(grid, sched, 0.0, k0, wall, barrier);
  PropagationStats stats;

  auto record = [&](const Mark& mark) {
    auto h = build_hamiltonian(grid, sched.a(mark.tau), sched.alpha(mark.tau),
                               wall, barrier);
    auto spec = instantaneous_spectrum(h, grid, K);
    PeriodCheckpoint cp;
    cp.label = mark.label;
    cp.tau = mark.tau;
    cp.pops = populations(state, spec, grid.dx);
    cp.energies = spec.energies;
    cp.dominant = static_cast<int>(std::max_element(cp.pops.begin(),
                                                    cp.pops.end()) -
                                   cp.pops.begin()) +
                  1;
    report.checkpoints.push_back(std::move(cp));
  };

  record(marks[0]);
  const int samples_per_leg = 8;
  for (std::size_t leg = 1; leg < marks.size(); ++leg) {
    double tau_from = marks[leg - 1].tau;
    double tau_to = marks[leg].tau;
    for (int q = 1; q <= samples_per_leg; ++q) {
      double tau_next =
          tau_from + (tau_to - tau_from) * q / static_cast<double>(samples_per_leg);
      state = propagate(state, grid, sched, tau_from / sched.epsilon,
                        tau_next / sched.epsilon, dt, wall, barrier, &stats);
      auto h = build_hamiltonian(grid, sched.a(tau_next),
                                 sched.alpha(tau_next), wall, barrier);
      report.energy_series.push_back(h.expectation(state.psi, grid.dx));
      report.energy_times.push_back(tau_next);
      tau_from = tau_next;
    }
    record(marks[leg]);
  }
  report.norm_drift = stats.max_norm_drift;
  report.steps = stats.steps;
  return report;
}

}  // namespace qaccel
