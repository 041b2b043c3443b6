#pragma once

// Closed-form propagators of the resonant three-level jump protocol, in the
// basis {|1>, |2>, |1'>} and the convention H = +1/2 (Omega_p |1><1'| +
// Omega_s |2><1'| + h.c.) with Omega_p, Omega_s >= 0. Compare against a
// numerical run after conjugating with `jump_gauge_signs`.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "common.hpp"
#include "model.hpp"
#include "pulse.hpp"

namespace raman {

using Matrix3c = Eigen::Matrix3cd;

/// Single pair with mixing angle theta and running effective area `area`:
/// Cayley-Klein parameters z = cos(area/2), y = -i sin(area/2).
inline Matrix3c cayley_klein_pair(double theta, double area) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const cplx z = std::cos(0.5 * area);
  const cplx y = cplx(0.0, -std::sin(0.5 * area));
  Matrix3c u;
  u << c * c + s * s * z, 0.5 * std::sin(theta) * (z - 1.0), s * y,
       0.5 * std::sin(theta) * (z - 1.0), s * s + z * c * c, c * y,
       -s * std::conj(y), -c * std::conj(y), std::conj(z);
  return u;
}

/// Running effective area of pair k (0-based) at time t.
using RunningArea = std::function<double(std::size_t k, double t)>;

/// Time-ordered product of the per-pair propagators, later pairs on the left.
/// Pairs that have not started contribute (numerically) the identity.
inline Matrix3c analytic_jump_propagator(std::span<const double> thetas, const RunningArea& area, double t) {
  Matrix3c u = Matrix3c::Identity();
  for (std::size_t k = 0; k < thetas.size(); ++k) u = cayley_klein_pair(thetas[k], area(k, t)) * u;
  return u;
}

/// Accumulated Gaussian area of each pair of a jump train since `t0`.
inline RunningArea gaussian_running_area(const JumpSpec& spec, double t0 = 0.0) {
  const double area = spec.effective_area();
  const double width = spec.tau_J;
  const double spacing = spec.spacing();
  return [=](std::size_t k, double t) {
    const double zeta = spacing * (static_cast<double>(k) + 0.5);
    auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - zeta) / (width * std::numbers::sqrt2)); };
    return area * (cdf(t) - cdf(t0));
  };
}

/// Ideal final unitary after N pairs with Theta_N = thetaT (real 3x3).
inline Eigen::Matrix3d final_jump_unitary(int n_pairs, double thetaT) {
  require(n_pairs >= 1, "need at least one pair");
  const double c = std::cos(0.5 * thetaT);
  const double s = std::sin(0.5 * thetaT);
  const double sign = (n_pairs % 2 == 0) ? 1.0 : -1.0;
  Eigen::Matrix3d u;
  u << c, sign * s, 0.0,
       -s, sign * c, 0.0,
       0.0, 0.0, sign;
  return u;
}

/// Diagonal +-1 gauge D such that D H D has non-negative real couplings on
/// 1-1' and 2-1' for a locked rwa3 model, i.e. matches the closed-form
/// convention above. Returned as the diagonal entries.
inline Eigen::Vector3d jump_gauge_signs(const Model& model) {
  require(model.tier() == Tier::rwa3, "gauge alignment is defined for the rwa3 tier");
  const double mu_p = model.system().mu(Level::g1, Level::e1);
  const double mu_s = model.system().mu(Level::g2, Level::e1);
  // Coupling element is -mu/2 times a non-negative envelope.
  return Eigen::Vector3d(mu_p < 0.0 ? 1.0 : -1.0, mu_s < 0.0 ? 1.0 : -1.0, 1.0);
}

/// D U D for a diagonal sign gauge.
inline Matrix3c align_gauge(const Matrix3c& u, const Eigen::Vector3d& signs) {
  return signs.cast<cplx>().asDiagonal() * u * signs.cast<cplx>().asDiagonal();
}

}  // namespace raman
