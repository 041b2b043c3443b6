#include <catch_amalgamated.hpp>

#include "raman/spectral.hpp"

using namespace raman;
using Catch::Approx;

namespace {

// Low surrogate carrier so the FFT grid stays small.
LevelSystem small_carrier_system() {
  Rb87Parameters p;
  p.optical_offset = two_pi * 20.0;
  return build_rb87_system(HalfInt(1), p);
}

JumpSpec jump(int n) {
  JumpSpec j;
  j.n_pairs = n;
  j.tau_J = 30.0 / small_carrier_system().delta1;
  return j;
}

constexpr std::size_t kSamples = std::size_t{1} << 14;

}  // namespace

TEST_CASE("spectral route reproduces the locked time-domain field", "[spectral]") {
  const auto sys = small_carrier_system();
  const auto spec = jump(1);
  const auto field = spectral_synthesize(spec, sys, kSamples);
  const auto train = jump_train(spec, sys);
  double peak = 0.0;
  double worst = 0.0;
  // The FFT period is the train window, so compare with the periodized field.
  const double period = train.duration();
  for (std::size_t i = 0; i < field.times.size(); ++i) {
    double pump = 0.0;
    double stokes = 0.0;
    for (int m = -2; m <= 2; ++m) {
      const auto ref = field_at(train, field.times[i] + m * period);
      pump += ref.pump;
      stokes += ref.stokes;
    }
    peak = std::max({peak, std::abs(pump), std::abs(stokes)});
    worst = std::max({worst, std::abs(pump - field.pump[i]), std::abs(stokes - field.stokes[i])});
  }
  CHECK(peak > 0.0);
  CHECK(worst <= 1e-6 * peak);
}

TEST_CASE("envelope centers are recovered for three pairs", "[spectral]") {
  const auto sys = small_carrier_system();
  const auto spec = jump(3);
  const auto field = spectral_synthesize(spec, sys, kSamples);
  const double dt = field.times[1] - field.times[0];
  for (int k = 1; k <= 3; ++k) {
    const double zeta = spec.spacing() * (k - 0.5);
    for (const auto* env : {&field.pump_envelope, &field.stokes_envelope}) {
      // Peak sample inside pair k, refined by a parabola through log-envelope.
      std::size_t best = 0;
      for (std::size_t i = 0; i < field.times.size(); ++i) {
        const double t = field.times[i];
        if (t < spec.spacing() * (k - 1) || t >= spec.spacing() * k) continue;
        if ((*env)[i] > (*env)[best] || best == 0) best = i;
      }
      const double a = std::log((*env)[best - 1]);
      const double b = std::log((*env)[best]);
      const double c = std::log((*env)[best + 1]);
      const double center = field.times[best] + 0.5 * dt * (a - c) / (a - 2.0 * b + c);
      CHECK(std::abs(center - zeta) <= spec.tau_J / 100.0);
    }
  }
}

TEST_CASE("zero areas give an identically zero field", "[spectral]") {
  auto spec = jump(2);
  spec.area_error = -2.0 * pi;
  const auto field = spectral_synthesize(spec, small_carrier_system(), kSamples);
  for (std::size_t i = 0; i < field.times.size(); ++i) {
    REQUIRE(field.pump[i] == 0.0);
    REQUIRE(field.stokes[i] == 0.0);
  }
}

TEST_CASE("sampling preconditions", "[spectral]") {
  const auto sys = small_carrier_system();
  CHECK_THROWS_AS(spectral_synthesize(jump(1), sys, kSamples + 1), ValidationError);
  CHECK_THROWS_AS(spectral_synthesize(jump(1), sys, kSamples / 2), ValidationError);
  // The default surrogate carrier needs far more samples than 2^14.
  CHECK_THROWS_AS(spectral_synthesize(jump(1), build_rb87_system(HalfInt(1)), kSamples), ValidationError);
}
