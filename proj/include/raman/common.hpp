#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace raman {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Internal units: time in ns, angular frequency in rad/ns.
constexpr double ghz_to_rad_per_ns(double ghz) { return two_pi * ghz; }
constexpr double mhz_to_rad_per_ns(double mhz) { return two_pi * mhz * 1e-3; }
constexpr double rad_per_ns_to_mhz(double w) { return w / two_pi * 1e3; }

// Small complex matrices: at most 4x4, stored inline.
using HMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, 4>;
using StateVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;
using RealVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;

/// Bad arguments or inconsistent configuration (CLI exit code 1).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Integration could not proceed (CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace raman
