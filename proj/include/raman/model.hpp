#pragma once

// Hamiltonian realizations of (level system x pulse train).
//
// Frames:
//   rwa3, rwa4, detuned_lambda  frame rotating with the pump/Stokes carriers;
//                               static detunings sit on the diagonal.
//   cross_coupled, lab_frame    interaction picture of the bare level energies;
//                               the diagonal vanishes and every coupling carries
//                               its own beat note e^{i (w_field - w_transition) t}.
// Populations do not depend on the frame.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "atomic_structure.hpp"
#include "common.hpp"
#include "pulse.hpp"

namespace raman {

enum class Tier {
  rwa3,            // |1>,|2>,|1'>; pump on 1-1', Stokes on 2-1' only
  rwa4,            // all four levels; each field on its ground level's two transitions
  detuned_lambda,  // rwa4 with |1'> removed: |1>,|2>,|2'>
  cross_coupled,   // every field on every dipole-allowed transition, optical RWA only
  lab_frame,       // H0 - mu E(t) with explicit carriers (no RWA at all)
};

inline const char* to_string(Tier t) {
  switch (t) {
    case Tier::rwa3: return "rwa3";
    case Tier::rwa4: return "rwa4";
    case Tier::detuned_lambda: return "detuned_lambda";
    case Tier::cross_coupled: return "cross_coupled";
    case Tier::lab_frame: return "lab_frame";
  }
  return "?";
}

inline Tier parse_tier(const std::string& s) {
  for (Tier t : {Tier::rwa3, Tier::rwa4, Tier::detuned_lambda, Tier::cross_coupled, Tier::lab_frame}) {
    if (s == to_string(t)) return t;
  }
  throw ValidationError("unknown tier '" + s +
                        "' (expected rwa3|rwa4|detuned_lambda|cross_coupled|lab_frame)");
}

inline bool is_rotating_frame_tier(Tier t) {
  return t == Tier::rwa3 || t == Tier::rwa4 || t == Tier::detuned_lambda;
}

/// Levels kept by a tier. cross_coupled and lab_frame can run on the
/// three-level Lambda {1,2,1'} (dimension 3) or the full manifold (dimension 4).
inline std::vector<Level> basis_for(Tier tier, int dimension) {
  switch (tier) {
    case Tier::rwa3: return {Level::g1, Level::g2, Level::e1};
    case Tier::rwa4: return {Level::g1, Level::g2, Level::e1, Level::e2};
    case Tier::detuned_lambda: return {Level::g1, Level::g2, Level::e2};
    case Tier::cross_coupled:
    case Tier::lab_frame:
      require(dimension == 3 || dimension == 4, "dimension must be 3 or 4");
      if (dimension == 3) return {Level::g1, Level::g2, Level::e1};
      return {Level::g1, Level::g2, Level::e1, Level::e2};
  }
  return {};
}

inline int default_dimension(Tier tier) { return tier == Tier::rwa3 || tier == Tier::detuned_lambda ? 3 : 4; }

class Model {
 public:
  Model(Tier tier, LevelSystem system, PulseTrain train, double detuning2, std::vector<Level> basis)
      : tier_(tier),
        system_(std::move(system)),
        train_(std::move(train)),
        detuning2_(detuning2),
        basis_(std::move(basis)) {
    setup();
  }

  Tier tier() const { return tier_; }
  int dimension() const { return static_cast<int>(basis_.size()); }
  const std::vector<Level>& basis() const { return basis_; }
  const LevelSystem& system() const { return system_; }
  /// The train actually applied (Stokes carrier already shifted by detuning2).
  const PulseTrain& train() const { return train_; }
  double detuning2() const { return detuning2_; }
  double t_start() const { return train_.t_start; }
  double t_end() const { return train_.t_end; }

  /// Basis position of `level`, or -1 if the tier drops it.
  int position(Level level) const {
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (basis_[i] == level) return static_cast<int>(i);
    }
    return -1;
  }

  /// Static diagonal of the rotating frame (all zero for interaction-picture tiers).
  const RealVector& diagonal() const { return diagonal_; }

  HMatrix hamiltonian(double t) const {
    const int n = dimension();
    HMatrix h = HMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = diagonal_(i);

    thread_local std::vector<cplx> amplitudes;
    amplitudes.resize(train_.subpulses.size());
    for (std::size_t j = 0; j < train_.subpulses.size(); ++j) {
      amplitudes[j] = train_.subpulses[j].complex_envelope(t);
    }
    for (const auto& c : couplings_) {
      const cplx a = amplitudes[c.pulse];
      if (a == cplx(0.0)) continue;
      cplx term = c.coefficient * a;
      if (c.beat != 0.0) term *= std::polar(1.0, c.beat * t);
      if (c.counter_rotating != 0.0) {
        term += c.coefficient * std::conj(a) * std::polar(1.0, -c.counter_rotating * t);
      }
      h(c.ground, c.excited) += term;
    }
    for (int r = 0; r < n; ++r) {
      for (int col = r + 1; col < n; ++col) h(col, r) = std::conj(h(r, col));
    }
    return h;
  }

  /// Upper bound on the spectral norm of H(t) over all t.
  double norm_bound() const { return norm_bound_; }

  /// Shortest oscillation period present in H(t) (infinity if none).
  double shortest_period() const { return shortest_period_; }

 private:
  struct Coupling {
    int ground = 0;
    int excited = 0;
    std::size_t pulse = 0;
    double coefficient = 0.0;       // -mu/2
    double beat = 0.0;              // w_field - w_transition (interaction picture)
    double counter_rotating = 0.0;  // w_field + w_transition (lab frame only)
  };

  void setup();

  Tier tier_;
  LevelSystem system_;
  PulseTrain train_;
  double detuning2_ = 0.0;
  std::vector<Level> basis_;
  RealVector diagonal_;
  std::vector<Coupling> couplings_;
  double norm_bound_ = 0.0;
  double shortest_period_ = std::numeric_limits<double>::infinity();
};

inline void Model::setup() {
  const int n = dimension();
  diagonal_ = RealVector::Zero(n);
  system_.validate();
  train_.validate();

  const double w_p_nominal = system_.omega(Level::e1, Level::g1);
  const double w_s_nominal = system_.omega(Level::e1, Level::g2);
  double w_p = train_.carrier(Channel::pump);
  double w_s = train_.carrier(Channel::stokes);
  if (w_p == 0.0) w_p = w_p_nominal;
  if (w_s == 0.0) w_s = w_s_nominal;

  if (is_rotating_frame_tier(tier_)) {
    // Amplitudes rotate with: |1> 0, |2> w_p - w_s, excited levels w_p.
    for (int i = 0; i < n; ++i) {
      switch (basis_[static_cast<std::size_t>(i)]) {
        case Level::g1: diagonal_(i) = 0.0; break;
        case Level::g2: diagonal_(i) = system_.omega(Level::g2, Level::g1) - (w_p - w_s); break;
        case Level::e1: diagonal_(i) = system_.omega(Level::e1, Level::g1) - w_p; break;
        case Level::e2: diagonal_(i) = system_.omega(Level::e2, Level::g1) - w_p; break;
      }
    }
  }

  for (int gi = 0; gi < n; ++gi) {
    const Level g = basis_[static_cast<std::size_t>(gi)];
    if (!is_ground(g)) continue;
    for (int ei = 0; ei < n; ++ei) {
      const Level e = basis_[static_cast<std::size_t>(ei)];
      if (is_ground(e)) continue;
      const double mu = system_.mu(g, e);
      if (mu == 0.0) continue;
      const double w_eg = system_.omega(e, g);
      for (std::size_t j = 0; j < train_.subpulses.size(); ++j) {
        const auto& sp = train_.subpulses[j];
        Coupling c{gi, ei, j, -0.5 * mu, 0.0, 0.0};
        if (is_rotating_frame_tier(tier_)) {
          // Each field only drives transitions out of its own ground level.
          const Level own = sp.channel == Channel::pump ? Level::g1 : Level::g2;
          if (g != own) continue;
          if (tier_ == Tier::rwa3 && e != Level::e1) continue;
        } else {
          c.beat = sp.carrier - w_eg;
          if (tier_ == Tier::lab_frame) c.counter_rotating = sp.carrier + w_eg;
        }
        couplings_.push_back(c);
      }
    }
  }

  // Norm bound: |diag|_max + Frobenius norm of the off-diagonal part at peak strengths.
  Eigen::MatrixXd peak = Eigen::MatrixXd::Zero(n, n);
  double fastest = 0.0;
  for (const auto& c : couplings_) {
    const double s = train_.subpulses[c.pulse].strength;
    const double factor = tier_ == Tier::lab_frame ? 2.0 : 1.0;
    peak(c.ground, c.excited) += factor * std::abs(c.coefficient) * s;
    if (s > 0.0) fastest = std::max({fastest, std::abs(c.beat), std::abs(c.counter_rotating)});
  }
  norm_bound_ = diagonal_.cwiseAbs().maxCoeff() + std::sqrt(2.0) * peak.norm();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) fastest = std::max(fastest, std::abs(diagonal_(a) - diagonal_(b)));
  }
  if (fastest > 0.0) shortest_period_ = two_pi / fastest;
}

/// Builds a model. detuning2 (two-photon detuning, rad/ns) shifts the Stokes
/// carrier to w_s = w_p - delta1 + detuning2. dimension selects the basis of
/// cross_coupled/lab_frame (3 or 4); 0 means the tier default.
inline Model build_model(Tier tier, const LevelSystem& system, const PulseTrain& train, double detuning2 = 0.0,
                         int dimension = 0) {
  if (tier == Tier::rwa3) {
    require(detuning2 == 0.0, "the resonant rwa3 tier has no two-photon detuning; use rwa4 or cross_coupled");
  }
  if (dimension == 0) dimension = default_dimension(tier);
  if (tier == Tier::rwa3 || tier == Tier::detuned_lambda) {
    require(dimension == 3, std::string(to_string(tier)) + " is a three-level tier");
  }
  if (tier == Tier::rwa4) require(dimension == 4, "rwa4 is a four-level tier");
  return Model(tier, system, with_stokes_shift(train, detuning2), detuning2, basis_for(tier, dimension));
}

}  // namespace raman
