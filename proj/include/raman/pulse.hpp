#pragma once

// Gaussian pump/Stokes subpulses, STIRAP pairs and pulsed-jump trains.

#include <cmath>
#include <string>
#include <vector>

#include "atomic_structure.hpp"
#include "common.hpp"

namespace raman {

enum class Channel { pump, stokes };
enum class Protocol { stirap, jump };

/// How carrier phases are chosen. `centered` uses cos[w (t - zeta)];
/// `locked` sets phase0 = w*zeta mod 2pi so every subpulse has zero phase in
/// the frame rotating with its carrier.
enum class PhaseMode { centered, locked };

inline double inv_sqrt_two_pi() { return 1.0 / std::sqrt(two_pi); }

struct GaussianSubpulse {
  double strength = 0.0;  // field amplitude
  double center = 0.0;    // zeta, ns
  double width = 1.0;     // Gaussian sigma, ns
  double carrier = 1.0;   // rad/ns
  double phase0 = 0.0;    // rad
  Channel channel = Channel::pump;

  double envelope(double t) const {
    const double x = (t - center) / width;
    return strength * std::exp(-0.5 * x * x);
  }

  double field(double t) const { return envelope(t) * std::cos(carrier * (t - center) + phase0); }

  /// Phase of the slowly varying amplitude: field = Re[ envelope * e^{i phase} * e^{i w t} ].
  double rotating_phase() const {
    return std::remainder(phase0 - std::fmod(carrier * center, two_pi), two_pi);
  }

  cplx complex_envelope(double t) const { return std::polar(envelope(t), rotating_phase()); }

  /// Envelope integral over the real line.
  double envelope_integral() const { return strength * width * std::sqrt(two_pi); }

  void validate() const {
    require(strength >= 0.0, "subpulse strength must be non-negative");
    require(width > 0.0, "subpulse width must be positive");
    require(carrier > 0.0, "subpulse carrier must be positive");
  }
};

struct PulseTrain {
  std::vector<GaussianSubpulse> subpulses;
  double t_start = 0.0;
  double t_end = 0.0;
  Protocol protocol = Protocol::jump;
  PhaseMode phase_mode = PhaseMode::locked;

  double duration() const { return t_end - t_start; }

  /// Carrier shared by all subpulses of a channel (0 when the channel is empty).
  double carrier(Channel ch) const {
    double w = 0.0;
    for (const auto& s : subpulses) {
      if (s.channel != ch) continue;
      if (w == 0.0) {
        w = s.carrier;
      } else if (s.carrier != w) {
        throw ValidationError("subpulses of one channel must share a carrier");
      }
    }
    return w;
  }

  void validate() const {
    require(t_end > t_start, "pulse train window must have positive length");
    for (const auto& s : subpulses) {
      s.validate();
      require(s.center - 4.0 * s.width >= t_start - 1e-9 * duration() &&
                  s.center + 4.0 * s.width <= t_end + 1e-9 * duration(),
              "every subpulse must satisfy center +- 4 width inside the train window");
    }
  }
};

inline double lock_phase(double carrier, double center) { return std::fmod(carrier * center, two_pi); }

inline double phase_for(PhaseMode mode, double carrier, double center) {
  return mode == PhaseMode::locked ? lock_phase(carrier, center) : 0.0;
}

/// Field strength giving envelope area `area` on a transition with dipole `mu`
/// for a Gaussian of bandwidth `bandwidth` (sigma = 1/bandwidth).
inline double strength_for_area(double area, double bandwidth, double mu) {
  require(mu != 0.0, "transition dipole is zero; no field strength reaches the requested area");
  return inv_sqrt_two_pi() * area * bandwidth / std::abs(mu);
}

// ---------------------------------------------------------------- STIRAP

struct StirapSpec {
  double area_p = 6.0 * std::numbers::sqrt2 * pi;
  double area_s = 6.0 * std::numbers::sqrt2 * pi;
  double bandwidth = 1.0;  // rad/ns; tau_S = 1/bandwidth
  double t_s = 0.0;
  double t_p = 1.76;  // ns
  PhaseMode phase_mode = PhaseMode::locked;

  double tau() const { return 1.0 / bandwidth; }

  /// Counterintuitive defaults: Stokes at 0, pump at 1.76 tau_S, areas 6 sqrt2 pi each.
  static StirapSpec with_bandwidth(double bandwidth) {
    StirapSpec s;
    s.bandwidth = bandwidth;
    s.t_s = 0.0;
    s.t_p = 1.76 / bandwidth;
    return s;
  }

  void validate() const {
    require(area_p >= 0.0 && area_s >= 0.0, "STIRAP areas must be non-negative");
    require(bandwidth > 0.0, "STIRAP bandwidth must be positive");
    require(t_p > t_s, "STIRAP needs counterintuitive ordering t_p > t_s");
  }
};

inline PulseTrain stirap_pair(const StirapSpec& spec, const LevelSystem& sys) {
  spec.validate();
  const double mu_p = sys.mu(Level::g1, Level::e1);
  const double mu_s = sys.mu(Level::g2, Level::e1);
  const double w_p = sys.omega(Level::e1, Level::g1);
  const double w_s = sys.omega(Level::e1, Level::g2);
  const double tau = spec.tau();

  PulseTrain train;
  train.protocol = Protocol::stirap;
  train.phase_mode = spec.phase_mode;
  train.t_start = spec.t_s - 4.0 * tau;
  train.t_end = std::max(spec.t_s + 6.0 * tau, spec.t_p + 4.0 * tau);
  train.subpulses.push_back({strength_for_area(spec.area_s, spec.bandwidth, mu_s), spec.t_s, tau, w_s,
                             phase_for(spec.phase_mode, w_s, spec.t_s), Channel::stokes});
  train.subpulses.push_back({strength_for_area(spec.area_p, spec.bandwidth, mu_p), spec.t_p, tau, w_p,
                             phase_for(spec.phase_mode, w_p, spec.t_p), Channel::pump});
  train.validate();
  return train;
}

// ---------------------------------------------------------------- pulsed jump

/// Center-to-center spacing of consecutive pairs in units of tau_J.
inline constexpr double kJumpSpacing = 2.8 * pi;

struct JumpSpec {
  int n_pairs = 1;
  int s0 = 0;
  double theta0 = 0.0;
  double thetaT = pi;
  double tau_J = 1.0;       // ns; bandwidth is 1/tau_J
  double area_error = 0.0;  // added to the effective area 2(2 s0 + 1) pi
  PhaseMode phase_mode = PhaseMode::locked;

  double bandwidth() const { return 1.0 / tau_J; }
  double ideal_area() const { return 2.0 * (2.0 * s0 + 1.0) * pi; }
  double effective_area() const { return ideal_area() + area_error; }
  double spacing() const { return kJumpSpacing * tau_J; }
  double duration() const { return spacing() * n_pairs; }

  void validate() const {
    require(n_pairs >= 1, "jump train needs at least one pair");
    require(s0 >= 0, "s0 must be a non-negative integer");
    require(thetaT > theta0, "thetaT must exceed theta0");
    require(tau_J > 0.0, "tau_J must be positive");
    // Equality is the zero-field limit.
    require(effective_area() >= 0.0, "area error drives the effective area negative");
  }
};

/// theta_k = (thetaT - theta0)(2k - 1)/(2N) + theta0, k = 1..N.
inline std::vector<double> jump_mixing_angles(const JumpSpec& spec) {
  std::vector<double> theta(static_cast<std::size_t>(spec.n_pairs));
  for (int k = 1; k <= spec.n_pairs; ++k) {
    theta[static_cast<std::size_t>(k - 1)] =
        (spec.thetaT - spec.theta0) * (2.0 * k - 1.0) / (2.0 * spec.n_pairs) + spec.theta0;
  }
  return theta;
}

/// Path points reached after each pair: Theta_k = 2 sum_v (-1)^(v+k) theta_v.
inline std::vector<double> jump_path_points(const std::vector<double>& theta) {
  std::vector<double> out(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    double s = 0.0;
    for (std::size_t v = 0; v <= k; ++v) s += ((v + k) % 2 == 0 ? 1.0 : -1.0) * theta[v];
    out[k] = 2.0 * s;
  }
  return out;
}

struct PairAreas {
  double pump = 0.0;
  double stokes = 0.0;
};

inline std::vector<PairAreas> jump_pair_areas(const JumpSpec& spec) {
  std::vector<PairAreas> out;
  for (double th : jump_mixing_angles(spec)) {
    out.push_back({spec.effective_area() * std::sin(0.5 * th), spec.effective_area() * std::cos(0.5 * th)});
  }
  return out;
}

/// Pair boundaries t_0 = 0, t_k = k * spacing.
inline std::vector<double> jump_boundaries(const JumpSpec& spec) {
  std::vector<double> t(static_cast<std::size_t>(spec.n_pairs) + 1);
  for (int k = 0; k <= spec.n_pairs; ++k) t[static_cast<std::size_t>(k)] = k * spec.spacing();
  return t;
}

inline PulseTrain jump_train(const JumpSpec& spec, const LevelSystem& sys) {
  spec.validate();
  const double mu_p = sys.mu(Level::g1, Level::e1);
  const double mu_s = sys.mu(Level::g2, Level::e1);
  const double w_p = sys.omega(Level::e1, Level::g1);
  const double w_s = sys.omega(Level::e1, Level::g2);
  const auto areas = jump_pair_areas(spec);

  PulseTrain train;
  train.protocol = Protocol::jump;
  train.phase_mode = spec.phase_mode;
  train.t_start = 0.0;
  train.t_end = spec.duration();
  for (int k = 1; k <= spec.n_pairs; ++k) {
    const double zeta = spec.spacing() * (k - 0.5);
    const auto& a = areas[static_cast<std::size_t>(k - 1)];
    train.subpulses.push_back({strength_for_area(a.pump, spec.bandwidth(), mu_p), zeta, spec.tau_J, w_p,
                               phase_for(spec.phase_mode, w_p, zeta), Channel::pump});
    train.subpulses.push_back({strength_for_area(a.stokes, spec.bandwidth(), mu_s), zeta, spec.tau_J, w_s,
                               phase_for(spec.phase_mode, w_s, zeta), Channel::stokes});
  }
  train.validate();
  return train;
}

// ---------------------------------------------------------------- evaluation

struct ChannelValues {
  double pump = 0.0;
  double stokes = 0.0;
};

/// Real field per channel, carrier included.
inline ChannelValues field_at(const PulseTrain& train, double t) {
  ChannelValues v;
  for (const auto& s : train.subpulses) {
    (s.channel == Channel::pump ? v.pump : v.stokes) += s.field(t);
  }
  return v;
}

/// Envelope sum per channel (no carrier).
inline ChannelValues envelope_at(const PulseTrain& train, double t) {
  ChannelValues v;
  for (const auto& s : train.subpulses) {
    (s.channel == Channel::pump ? v.pump : v.stokes) += s.envelope(t);
  }
  return v;
}

/// Rabi envelopes on the designated transitions: pump on 1-1', Stokes on 2-1'.
/// Signs follow the dipole matrix elements.
inline ChannelValues rabi_envelope_at(const PulseTrain& train, const LevelSystem& sys, double t) {
  const auto env = envelope_at(train, t);
  return {sys.mu(Level::g1, Level::e1) * env.pump, sys.mu(Level::g2, Level::e1) * env.stokes};
}

/// Copy of `train` with every Stokes carrier shifted by `shift` (rad/ns).
/// Locked trains are re-locked to the new carrier.
inline PulseTrain with_stokes_shift(PulseTrain train, double shift) {
  if (shift == 0.0) return train;
  for (auto& s : train.subpulses) {
    if (s.channel != Channel::stokes) continue;
    s.carrier += shift;
    require(s.carrier > 0.0, "Stokes carrier shift makes the carrier non-positive");
    s.phase0 = phase_for(train.phase_mode, s.carrier, s.center);
  }
  return train;
}

inline const char* to_string(PhaseMode m) { return m == PhaseMode::locked ? "locked" : "centered"; }
inline const char* to_string(Protocol p) { return p == Protocol::stirap ? "stirap" : "jump"; }

inline PhaseMode parse_phase_mode(const std::string& s) {
  if (s == "locked") return PhaseMode::locked;
  if (s == "centered") return PhaseMode::centered;
  throw ValidationError("unknown phase mode '" + s + "' (expected locked|centered)");
}

inline Protocol parse_protocol(const std::string& s) {
  if (s == "stirap") return Protocol::stirap;
  if (s == "jump") return Protocol::jump;
  throw ValidationError("unknown protocol '" + s + "' (expected stirap|jump)");
}

}  // namespace raman
