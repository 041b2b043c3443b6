#pragma once

// Frequency-domain construction of a jump train: each channel spectrum is a
// sum of Gaussians at the carrier with linear spectral phase, transformed to
// the time domain with FFTW. The FFT period is the train window.

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <vector>

#include "common.hpp"
#include "pulse.hpp"

namespace raman {

struct SampledField {
  std::vector<double> times;  // ns, uniform, [t0, t0 + period)
  std::vector<double> pump;   // real fields
  std::vector<double> stokes;
  std::vector<double> pump_envelope;  // modulus of the analytic signal
  std::vector<double> stokes_envelope;
};

namespace detail {

// The FFTW planner is not re-entrant.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!data) throw NumericalError("fftw_malloc failed");
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

/// In-place backward transform: x_n <- sum_m x_m exp(+2 pi i m n / M).
inline void inverse_dft(FftwBuffer& buf, std::size_t n) {
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), buf.data, buf.data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!plan) throw NumericalError("FFTW could not create a plan");
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace detail

/// A_k(w) = area_k / (2 pi |mu|) exp(-(w - w_c)^2 / (2 bw^2)) exp(-i (w - w_c) zeta_k).
/// Its inverse transform is the locked time-domain pulse.
inline SampledField spectral_synthesize(const JumpSpec& spec, const LevelSystem& sys, std::size_t n_samples) {
  spec.validate();
  require(n_samples >= (std::size_t{1} << 14) && std::has_single_bit(n_samples),
          "n_samples must be a power of two >= 2^14");
  const double mu_p = sys.mu(Level::g1, Level::e1);
  const double mu_s = sys.mu(Level::g2, Level::e1);
  require(mu_p != 0.0 && mu_s != 0.0, "designated transitions have zero dipole");
  const double w_p = sys.omega(Level::e1, Level::g1);
  const double w_s = sys.omega(Level::e1, Level::g2);

  const double t0 = 0.0;
  const double period = spec.duration();
  const double dt = period / static_cast<double>(n_samples);
  const double sampling_rate = 1.0 / dt;  // 1/ns
  const double fastest = std::max(w_p, w_s) / two_pi;
  if (sampling_rate < 4.0 * fastest) {
    throw ValidationError("sampling rate " + std::to_string(sampling_rate) + "/ns is below 4x the carrier frequency " +
                          std::to_string(fastest) + "/ns; increase n_samples");
  }

  const double dw = two_pi / period;
  const double bw = spec.bandwidth();
  const auto areas = jump_pair_areas(spec);
  std::vector<double> zeta;
  for (int k = 1; k <= spec.n_pairs; ++k) zeta.push_back(spec.spacing() * (k - 0.5));

  auto synthesize = [&](double carrier, double mu, bool pump, std::vector<double>& field, std::vector<double>& env) {
    detail::FftwBuffer buf(n_samples);
    const double norm = dw / (two_pi * std::abs(mu));
    for (std::size_t m = 0; m < n_samples; ++m) {
      const double w = dw * static_cast<double>(m);
      const double x = w - carrier;
      cplx value = 0.0;
      const double gauss = std::exp(-0.5 * x * x / (bw * bw));
      if (gauss > 0.0) {
        for (std::size_t k = 0; k < zeta.size(); ++k) {
          const double a = pump ? areas[k].pump : areas[k].stokes;
          value += a * std::polar(1.0, -x * zeta[k]);
        }
        value *= norm * gauss * std::polar(1.0, w * t0);
      }
      buf.data[m][0] = value.real();
      buf.data[m][1] = value.imag();
    }
    detail::inverse_dft(buf, n_samples);
    field.resize(n_samples);
    env.resize(n_samples);
    for (std::size_t n = 0; n < n_samples; ++n) {
      field[n] = buf.data[n][0];
      env[n] = std::hypot(buf.data[n][0], buf.data[n][1]);
    }
  };

  SampledField out;
  out.times.resize(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) out.times[n] = t0 + dt * static_cast<double>(n);
  synthesize(w_p, mu_p, true, out.pump, out.pump_envelope);
  synthesize(w_s, mu_s, false, out.stokes, out.stokes_envelope);
  return out;
}

}  // namespace raman
