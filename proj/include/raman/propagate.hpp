#pragma once

// Time-ordered propagation of i dU/dt = H(t) U with one exact exponential of
// the midpoint Hamiltonian per step.

#include <cmath>
#include <concepts>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "atomic_structure.hpp"
#include "common.hpp"
#include "model.hpp"

namespace raman {

/// Anything that can be propagated: a Model, or an adapter around one.
template <class S>
concept HamiltonianSource = requires(const S& s, double t) {
  { s.hamiltonian(t) } -> std::convertible_to<HMatrix>;
  { s.dimension() } -> std::convertible_to<int>;
  { s.norm_bound() } -> std::convertible_to<double>;
  { s.shortest_period() } -> std::convertible_to<double>;
};

/// exp(-i H h) for Hermitian H.
///
/// Small arguments use a Taylor series summed until the terms drop below
/// double precision; larger ones go through the eigendecomposition. Both are
/// exact to rounding.
inline HMatrix unitary_step(const HMatrix& h_matrix, double h) {
  const int n = static_cast<int>(h_matrix.rows());
  const double scale = h_matrix.norm() * h;
  if (scale < 0.05) {
    const HMatrix a = h_matrix * cplx(0.0, -h);
    HMatrix term = HMatrix::Identity(n, n);
    HMatrix sum = term;
    for (int k = 1; k < 20; ++k) {
      term = (term * a) / static_cast<double>(k);
      sum += term;
      if (term.norm() < 1e-18) break;
    }
    return sum;
  }
  Eigen::SelfAdjointEigenSolver<HMatrix> eig(h_matrix);
  const auto& v = eig.eigenvectors();
  StateVector phases(n);
  for (int i = 0; i < n; ++i) phases(i) = std::polar(1.0, -eig.eigenvalues()(i) * h);
  return v * phases.asDiagonal() * v.adjoint();
}

struct PropagationOptions {
  double norm_fraction = 0.05;   // h <= norm_fraction / |H|max
  double period_fraction = 0.05; // h <= period_fraction * shortest period
  double max_step = std::numeric_limits<double>::infinity();
  double min_step = 1e-9;        // ns
  bool keep_propagators = false;  // store U(t_i, t_0) at every grid point
};

struct PropagationResult {
  std::vector<Level> basis;
  std::vector<double> times;
  std::vector<StateVector> states;
  std::vector<RealVector> populations;
  HMatrix propagator;  // U(times.back(), times.front())
  std::vector<HMatrix> propagators;  // only with keep_propagators
  long step_count = 0;
  double step_size = 0.0;

  /// Population of `level` at sample i (0 if the tier drops the level).
  double population(std::size_t i, Level level) const {
    for (std::size_t b = 0; b < basis.size(); ++b) {
      if (basis[b] == level) return populations[i](static_cast<int>(b));
    }
    return 0.0;
  }
  double final_population(Level level) const { return population(times.size() - 1, level); }

  double max_norm_error() const {
    double worst = 0.0;
    for (const auto& s : states) worst = std::max(worst, std::abs(s.norm() - 1.0));
    return worst;
  }

  /// max |(U^dagger U - I)_ij|
  double unitarity_error() const {
    const int n = static_cast<int>(propagator.rows());
    return (propagator.adjoint() * propagator - HMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  }
};

/// Step size contract: h <= min(0.05/|H|max, T_osc/20, max_step).
template <HamiltonianSource S>
double choose_step(const S& source, const PropagationOptions& opt) {
  double h = opt.max_step;
  if (source.norm_bound() > 0.0) h = std::min(h, opt.norm_fraction / source.norm_bound());
  if (std::isfinite(source.shortest_period())) h = std::min(h, opt.period_fraction * source.shortest_period());
  if (!std::isfinite(h)) h = opt.max_step;
  return h;
}

template <HamiltonianSource S>
PropagationResult propagate(const S& source, const StateVector& initial, std::span<const double> grid,
                            const PropagationOptions& opt = {}) {
  const int n = source.dimension();
  require(initial.size() == n, "initial state has dimension " + std::to_string(initial.size()) +
                                   ", model has " + std::to_string(n));
  require(std::abs(initial.norm() - 1.0) < 1e-9, "initial state must be normalized");
  require(!grid.empty(), "output grid must not be empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    require(grid[i] > grid[i - 1], "output grid must be strictly increasing");
  }

  double h_max = choose_step(source, opt);
  if (!std::isfinite(h_max)) h_max = grid.back() - grid.front();
  if (grid.size() > 1 && h_max < opt.min_step) {
    throw NumericalError("step size " + std::to_string(h_max) +
                         " ns underflows the minimum step; use a lower tier (e.g. cross_coupled instead of "
                         "lab_frame) or a smaller carrier offset");
  }

  PropagationResult out;
  if constexpr (requires { source.basis(); }) out.basis = source.basis();
  out.step_size = h_max;
  out.times.assign(grid.begin(), grid.end());
  out.states.reserve(grid.size());
  out.populations.reserve(grid.size());
  HMatrix u = HMatrix::Identity(n, n);

  auto record = [&](const HMatrix& prop) {
    StateVector psi = prop * initial;
    out.states.push_back(psi);
    out.populations.push_back(psi.cwiseAbs2());
    if (opt.keep_propagators) out.propagators.push_back(prop);
  };
  record(u);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double span = grid[i] - grid[i - 1];
    const long steps = std::max<long>(1, static_cast<long>(std::ceil(span / h_max - 1e-9)));
    const double h = span / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
      const double t_mid = grid[i - 1] + (static_cast<double>(s) + 0.5) * h;
      u = unitary_step(source.hamiltonian(t_mid), h) * u;
    }
    out.step_count += steps;
    record(u);
  }
  out.propagator = u;
  return out;
}

/// H_r(s) = -H(t0 + t1 - s): running it over [t0, t1] undoes a forward run.
template <HamiltonianSource S>
class TimeReversed {
 public:
  TimeReversed(const S& source, double t0, double t1) : source_(source), t0_(t0), t1_(t1) {}
  HMatrix hamiltonian(double s) const { return -source_.hamiltonian(t0_ + t1_ - s); }
  int dimension() const { return source_.dimension(); }
  double norm_bound() const { return source_.norm_bound(); }
  double shortest_period() const { return source_.shortest_period(); }

 private:
  const S& source_;
  double t0_;
  double t1_;
};

inline std::vector<double> uniform_grid(double t0, double t1, std::size_t samples) {
  require(samples >= 1, "grid needs at least one sample");
  if (samples == 1) return {t0};
  std::vector<double> g(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    g[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  g.back() = t1;
  return g;
}

inline constexpr std::size_t kDefaultGridSamples = 2000;

/// Default output grid: 2000 uniform samples over the train window.
inline std::vector<double> default_grid(const Model& model) {
  return uniform_grid(model.t_start(), model.t_end(), kDefaultGridSamples);
}

/// Basis state for `level` in the model's basis.
inline StateVector basis_state(const Model& model, Level level) {
  const int p = model.position(level);
  require(p >= 0, std::string("level ") + label_of(level) + " is not part of tier " + to_string(model.tier()));
  StateVector psi = StateVector::Zero(model.dimension());
  psi(p) = 1.0;
  return psi;
}

inline PropagationResult propagate(const Model& model, const PropagationOptions& opt = {}) {
  const auto grid = default_grid(model);
  return propagate(model, basis_state(model, Level::g1), std::span<const double>(grid), opt);
}

}  // namespace raman
