#pragma once

// Adiabatic-frame bookkeeping: instantaneous eigensystems, mixing angles,
// dynamical phases, accumulation functions, geometric couplings and the
// dark-state population of a propagated wavefunction.

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "common.hpp"
#include "model.hpp"
#include "propagate.hpp"

namespace raman {

/// Below this both Rabi envelopes count as zero field (rad/ns).
inline constexpr double kZeroField = 1e-12;

struct AdiabaticFrame {
  std::vector<double> eigenvalues;  // ascending
  HMatrix eigenvectors;             // columns, gauge-fixed
  StateVector dark_state;
  double theta = 0.0;
  double xi = 0.0;
  bool theta_carried = false;  // zero field: theta taken from the previous sample
};

enum class AccumulationConvention {
  uniform_rate,  // integrate Y dt with the mean traversal rate (thetaT - theta0)/t_T
  mixing_angle,  // integrate Y dtheta along the instantaneous mixing angle
};

inline const char* to_string(AccumulationConvention c) {
  return c == AccumulationConvention::uniform_rate ? "uniform_rate" : "mixing_angle";
}

inline AccumulationConvention parse_convention(const std::string& s) {
  if (s == "uniform_rate") return AccumulationConvention::uniform_rate;
  if (s == "mixing_angle") return AccumulationConvention::mixing_angle;
  throw ValidationError("unknown accumulation convention '" + s + "'");
}

/// Make the largest-magnitude component (or component `index`) real positive.
template <class V>
void fix_gauge(V&& v, int index = -1) {
  if (index < 0) v.cwiseAbs().maxCoeff(&index);
  const double mag = std::abs(v(index));
  if (mag > 0.0) v *= std::conj(v(index)) / mag;
}

namespace detail {

inline void require_adiabatic_tier(const Model& m) {
  require(m.tier() == Tier::rwa3 || m.tier() == Tier::rwa4 || m.tier() == Tier::detuned_lambda,
          std::string("adiabatic diagnostics need a rotating-frame tier, got ") + to_string(m.tier()));
}

/// Closed-form eigensystem of a resonant Lambda, H = |v><e| + |e><v| with v
/// supported on the two ground positions. Columns ordered (-, 0, +).
inline void lambda_eigensystem(cplx v1, cplx v2, int p1, int p2, int pe, int dim, HMatrix& vecs,
                               std::vector<double>& vals, StateVector& dark) {
  const double norm = std::sqrt(std::norm(v1) + std::norm(v2));
  vecs = HMatrix::Zero(dim, dim);
  dark = StateVector::Zero(dim);
  dark(p1) = std::conj(v2) / norm;
  dark(p2) = -std::conj(v1) / norm;
  const double r = 1.0 / std::numbers::sqrt2;
  for (int col : {0, 2}) {
    const double sign = col == 0 ? -1.0 : 1.0;
    vecs(p1, col) = r * v1 / norm;
    vecs(p2, col) = r * v2 / norm;
    vecs(pe, col) = sign * r;
  }
  vecs.col(1) = dark;
  vals = {-norm, 0.0, norm};
}

inline double mixing_angle(double omega_p, double omega_s) {
  return 2.0 * std::atan2(std::abs(omega_p), std::abs(omega_s));
}

}  // namespace detail

/// Eigensystem and mixing angles at t. Pass the previous frame of a time
/// series so theta can be carried across zero-field stretches.
inline AdiabaticFrame instantaneous_frame(const Model& model, double t, const AdiabaticFrame* previous = nullptr) {
  detail::require_adiabatic_tier(model);
  const LevelSystem& sys = model.system();
  const HMatrix h = model.hamiltonian(t);
  const int dim = model.dimension();
  const auto env = envelope_at(model.train(), t);

  AdiabaticFrame f;
  const double om_p = sys.mu(Level::g1, Level::e1) * env.pump;
  const double om_s = sys.mu(Level::g2, Level::e1) * env.stokes;
  if (std::abs(om_p) < kZeroField && std::abs(om_s) < kZeroField) {
    f.theta = previous ? previous->theta : 0.0;
    f.theta_carried = true;
  } else {
    f.theta = detail::mixing_angle(om_p, om_s);
  }

  // Dark state with respect to the Lambda's excited level.
  const Level excited = model.tier() == Tier::detuned_lambda ? Level::e2 : Level::e1;
  const int p1 = model.position(Level::g1);
  const int p2 = model.position(Level::g2);
  const int pe = model.position(excited);
  cplx v1 = h(p1, pe);
  cplx v2 = h(p2, pe);
  const double coupling = std::sqrt(std::norm(v1) + std::norm(v2));
  if (std::abs(v1) < kZeroField && std::abs(v2) < kZeroField) {
    // Direction of the (vanishing) coupling vector from the carried angle.
    const double c1 = -(excited == Level::e1 ? sys.mu(Level::g1, Level::e1) : sys.mu(Level::g1, Level::e2));
    const double c2 = -(excited == Level::e1 ? sys.mu(Level::g2, Level::e1) : sys.mu(Level::g2, Level::e2));
    v1 = std::copysign(std::sin(0.5 * f.theta), c1);
    v2 = std::copysign(std::cos(0.5 * f.theta), c2);
  }

  if (model.tier() == Tier::rwa3) {
    detail::lambda_eigensystem(v1, v2, p1, p2, pe, dim, f.eigenvectors, f.eigenvalues, f.dark_state);
    f.eigenvalues = {-coupling, 0.0, coupling};
  } else {
    Eigen::SelfAdjointEigenSolver<HMatrix> solver(h);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    f.eigenvectors = solver.eigenvectors();
    f.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + dim);
    f.dark_state = StateVector::Zero(dim);
    const double norm = std::sqrt(std::norm(v1) + std::norm(v2));
    f.dark_state(p1) = std::conj(v2) / norm;
    f.dark_state(p2) = -std::conj(v1) / norm;

    const double omp_p = sys.mu(Level::g1, Level::e2) * env.pump;
    const double omp_s = sys.mu(Level::g2, Level::e2) * env.stokes;
    const double delta1 = model.diagonal()(model.position(Level::e2));
    f.xi = 0.5 * std::atan2(std::hypot(omp_p, omp_s), delta1);
  }
  for (int c = 0; c < dim; ++c) fix_gauge(f.eigenvectors.col(c));
  fix_gauge(f.dark_state);
  return f;
}

/// Eigenvalues (E-, E0, E+) of a three-dimensional rotating-frame model.
inline std::array<double, 3> branch_energies(const Model& model, double t) {
  require(model.dimension() == 3, "branch energies are defined for three-level tiers");
  detail::require_adiabatic_tier(model);
  const HMatrix h = model.hamiltonian(t);
  if (model.tier() == Tier::rwa3) {
    const double n = std::sqrt(std::norm(h(0, 2)) + std::norm(h(1, 2)));
    return {-n, 0.0, n};
  }
  Eigen::SelfAdjointEigenSolver<HMatrix> solver(h, Eigen::EigenvaluesOnly);
  const auto& e = solver.eigenvalues();
  return {e(0), e(1), e(2)};
}

// ------------------------------------------------------------------ traces

struct DiagnosticsOptions {
  AccumulationConvention convention = AccumulationConvention::uniform_rate;
  double theta0 = 0.0;
  double thetaT = pi;
  double max_substep = 0.0;  // ns; 0 picks 1/40 of the narrowest subpulse
};

struct DiagnosticsTrace {
  std::vector<double> times;
  std::vector<std::array<double, 3>> energies;  // (E-, E0, E+)
  std::vector<double> theta;
  std::vector<bool> theta_carried;
  std::vector<std::array<double, 3>> alpha;  // (alpha-, alpha0, alpha+)
  std::vector<double> eps_0minus;
  std::vector<double> eps_0plus;
  std::vector<double> p0_ad;  // empty unless a propagation was supplied
};

namespace detail {

// 5-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 5> kGaussNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                                   0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> kGaussWeights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                     0.4786286704993665, 0.2369268850561891};

/// int_a^b E_f dt for all three branches.
inline std::array<double, 3> integrate_energies(const Model& m, double a, double b) {
  std::array<double, 3> acc{};
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
    const auto e = branch_energies(m, mid + half * kGaussNodes[q]);
    for (std::size_t f = 0; f < 3; ++f) acc[f] += kGaussWeights[q] * half * e[f];
  }
  return acc;
}

inline double default_substep(const Model& m) {
  double narrowest = std::numeric_limits<double>::infinity();
  for (const auto& s : m.train().subpulses) narrowest = std::min(narrowest, s.width);
  if (!std::isfinite(narrowest)) narrowest = m.train().duration();
  return narrowest / 40.0;
}

}  // namespace detail

/// Dynamical phases, accumulation functions and (optionally) the adiabatic
/// dark-state population on `grid`. alpha and eps vanish at grid.front().
inline DiagnosticsTrace diagnostics_trace(const Model& model, std::span<const double> grid,
                                          const DiagnosticsOptions& opt = {},
                                          const PropagationResult* propagation = nullptr) {
  require(model.dimension() == 3, "diagnostics traces need a three-level tier (rwa3 or detuned_lambda)");
  detail::require_adiabatic_tier(model);
  require(!grid.empty(), "diagnostics grid must not be empty");
  for (std::size_t i = 1; i < grid.size(); ++i) require(grid[i] > grid[i - 1], "grid must be strictly increasing");
  require(opt.thetaT > opt.theta0, "thetaT must exceed theta0");
  if (propagation) {
    require(propagation->times.size() == grid.size(), "propagation and diagnostics grids differ");
    require(static_cast<int>(propagation->states.front().size()) == model.dimension(),
            "propagation does not belong to this model");
  }
  const double rate = (opt.thetaT - opt.theta0) / model.train().duration();
  const double h_max = opt.max_substep > 0.0 ? opt.max_substep : detail::default_substep(model);

  DiagnosticsTrace out;
  out.times.assign(grid.begin(), grid.end());
  std::array<double, 3> alpha{};
  cplx acc_minus = 0.0;
  cplx acc_plus = 0.0;
  auto factor = [](const std::array<double, 3>& a, int branch) { return std::polar(1.0, a[branch] - a[1]); };
  auto theta_at = [&](double t, double previous) {
    const auto env = rabi_envelope_at(model.train(), model.system(), t);
    if (std::abs(env.pump) < kZeroField && std::abs(env.stokes) < kZeroField) return previous;
    return detail::mixing_angle(env.pump, env.stokes);
  };

  std::optional<AdiabaticFrame> frame;
  double theta_prev = theta_at(grid.front(), 0.0);
  auto sample = [&](std::size_t i) {
    frame = instantaneous_frame(model, grid[i], frame ? &*frame : nullptr);
    out.energies.push_back(branch_energies(model, grid[i]));
    out.theta.push_back(frame->theta);
    out.theta_carried.push_back(frame->theta_carried);
    out.alpha.push_back(alpha);
    out.eps_0minus.push_back(std::abs(acc_minus));
    out.eps_0plus.push_back(std::abs(acc_plus));
    if (propagation) out.p0_ad.push_back(std::norm(frame->dark_state.dot(propagation->states[i])));
  };
  sample(0);

  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double span = grid[i] - grid[i - 1];
    const long n = std::max<long>(1, static_cast<long>(std::ceil(span / h_max - 1e-9)));
    const double h = span / static_cast<double>(n);
    for (long s = 0; s < n; ++s) {
      const double a = grid[i - 1] + h * static_cast<double>(s);
      const double b = a + h;
      const double mid = 0.5 * (a + b);
      const auto alpha_a = alpha;
      const auto first = detail::integrate_energies(model, a, mid);
      const auto second = detail::integrate_energies(model, mid, b);
      std::array<double, 3> alpha_mid{};
      for (std::size_t f = 0; f < 3; ++f) {
        alpha_mid[f] = alpha_a[f] - first[f];
        alpha[f] = alpha_mid[f] - second[f];
      }
      if (opt.convention == AccumulationConvention::uniform_rate) {
        // Simpson on the phase factor.
        const double w = rate * h / 6.0;
        acc_minus += w * (factor(alpha_a, 0) + 4.0 * factor(alpha_mid, 0) + factor(alpha, 0));
        acc_plus += w * (factor(alpha_a, 2) + 4.0 * factor(alpha_mid, 2) + factor(alpha, 2));
      } else {
        const double th_mid = theta_at(mid, theta_prev);
        const double th_b = theta_at(b, th_mid);
        acc_minus += 0.5 * (th_mid - theta_prev) * (factor(alpha_a, 0) + factor(alpha_mid, 0)) +
                     0.5 * (th_b - th_mid) * (factor(alpha_mid, 0) + factor(alpha, 0));
        acc_plus += 0.5 * (th_mid - theta_prev) * (factor(alpha_a, 2) + factor(alpha_mid, 2)) +
                    0.5 * (th_b - th_mid) * (factor(alpha_mid, 2) + factor(alpha, 2));
        theta_prev = th_b;
      }
    }
    sample(i);
  }
  return out;
}

/// alpha_f(t) = -int_{t0}^t E_f dt', f in (-, 0, +).
inline std::vector<std::array<double, 3>> dynamical_phases(const Model& model, std::span<const double> grid,
                                                           const DiagnosticsOptions& opt = {}) {
  return diagnostics_trace(model, grid, opt).alpha;
}

struct AccumulationFunctions {
  std::vector<double> eps_0minus;
  std::vector<double> eps_0plus;
};

inline AccumulationFunctions accumulation_functions(const Model& model, std::span<const double> grid,
                                                    const DiagnosticsOptions& opt = {}) {
  auto tr = diagnostics_trace(model, grid, opt);
  return {std::move(tr.eps_0minus), std::move(tr.eps_0plus)};
}

/// |<psi_0(t)|Psi(t)>|^2 along a propagation of the same model.
inline std::vector<double> adiabatic_population(const Model& model, const PropagationResult& propagation) {
  detail::require_adiabatic_tier(model);
  require(!propagation.states.empty() && static_cast<int>(propagation.states.front().size()) == model.dimension(),
          "propagation does not belong to this model");
  std::vector<double> out;
  out.reserve(propagation.times.size());
  std::optional<AdiabaticFrame> frame;
  for (std::size_t i = 0; i < propagation.times.size(); ++i) {
    frame = instantaneous_frame(model, propagation.times[i], frame ? &*frame : nullptr);
    out.push_back(std::norm(frame->dark_state.dot(propagation.states[i])));
  }
  return out;
}

// ------------------------------------------------------- geometric couplings

struct GeometricCouplings {
  std::vector<double> theta;
  std::vector<Eigen::Matrix3cd> g;  // g(f, h) = <psi_f| i d/dtheta |psi_h>, order (-, 0, +)
  std::vector<std::array<double, 3>> gamma;
  std::vector<bool> flagged;  // near-degenerate sample, excluded from gamma
};

inline constexpr double kThetaStep = 1e-4;
inline constexpr double kDegenerateGap = 1e-10;

/// Couplings of the rwa3 eigenbasis along the mixing angle, with unit peak
/// Rabi frequency and the model's coupling signs.
inline GeometricCouplings geometric_couplings(const Model& model, std::span<const double> theta_samples) {
  require(model.tier() == Tier::rwa3, "geometric couplings are parameterized for the rwa3 tier");
  require(model.train().phase_mode == PhaseMode::locked, "geometric couplings need phase_mode=locked");
  const LevelSystem& sys = model.system();
  const double s1 = -sys.mu(Level::g1, Level::e1) >= 0.0 ? 1.0 : -1.0;
  const double s2 = -sys.mu(Level::g2, Level::e1) >= 0.0 ? 1.0 : -1.0;

  auto basis = [&](double theta, std::vector<double>& vals) {
    HMatrix vecs;
    StateVector dark;
    detail::lambda_eigensystem(s1 * std::sin(0.5 * theta), s2 * std::cos(0.5 * theta), 0, 1, 2, 3, vecs, vals, dark);
    return vecs;
  };

  GeometricCouplings out;
  std::array<double, 3> gamma{};
  for (std::size_t i = 0; i < theta_samples.size(); ++i) {
    const double th = theta_samples[i];
    std::vector<double> vals;
    HMatrix center = basis(th, vals);
    std::vector<double> unused;
    HMatrix up = basis(th + kThetaStep, unused);
    HMatrix down = basis(th - kThetaStep, unused);
    for (int c = 0; c < 3; ++c) {
      int index = 0;
      center.col(c).cwiseAbs().maxCoeff(&index);
      fix_gauge(center.col(c), index);
      fix_gauge(up.col(c), index);
      fix_gauge(down.col(c), index);
    }
    const HMatrix deriv = (up - down) / (2.0 * kThetaStep);
    Eigen::Matrix3cd g = cplx(0.0, 1.0) * (center.adjoint() * deriv);
    const bool degenerate = std::min(vals[1] - vals[0], vals[2] - vals[1]) < kDegenerateGap;
    if (i > 0 && !degenerate && !out.flagged.back()) {
      const double dth = th - out.theta.back();
      for (int f = 0; f < 3; ++f) gamma[static_cast<std::size_t>(f)] += 0.5 * dth * (g(f, f) + out.g.back()(f, f)).real();
    }
    out.theta.push_back(th);
    out.g.push_back(g);
    out.gamma.push_back(gamma);
    out.flagged.push_back(degenerate);
  }
  return out;
}

}  // namespace raman
