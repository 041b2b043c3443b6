#include <catch_amalgamated.hpp>

#include <random>

#include "oracle/quadrature.hpp"
#include "raman/pulse.hpp"

using namespace raman;
using Catch::Approx;

namespace {
LevelSystem rb() { return build_rb87_system(HalfInt(1)); }

JumpSpec jump(int n, double ratio = 1.0 / 30.0) {
  JumpSpec j;
  j.n_pairs = n;
  j.tau_J = 1.0 / (ratio * rb().delta1);
  return j;
}
}  // namespace

TEST_CASE("single ideal pair", "[jump]") {
  const auto spec = jump(1);
  const auto areas = jump_pair_areas(spec);
  CHECK(areas[0].pump == Approx(std::sqrt(2.0) * pi));
  CHECK(areas[0].stokes == Approx(std::sqrt(2.0) * pi));
  const auto train = jump_train(spec, rb());
  CHECK(train.subpulses[0].center == Approx(1.4 * pi * spec.tau_J));
  CHECK(train.t_start == 0.0);
  CHECK(train.t_end == Approx(2.8 * pi * spec.tau_J));
}

TEST_CASE("six-pair mixing angles and path points", "[jump]") {
  const auto theta = jump_mixing_angles(jump(6));
  const auto path = jump_path_points(theta);
  for (int k = 1; k <= 6; ++k) {
    CHECK(theta[static_cast<std::size_t>(k - 1)] == Approx((2 * k - 1) * pi / 12.0));
    CHECK(path[static_cast<std::size_t>(k - 1)] == Approx(k * pi / 6.0));
  }
  CHECK(path.back() == Approx(pi));
}

TEST_CASE("s0 = 1 gives effective area 6 pi", "[jump]") {
  JumpSpec j = jump(1);
  j.s0 = 1;
  CHECK(j.effective_area() == Approx(6.0 * pi));
}

TEST_CASE("jump spec validation", "[jump]") {
  JumpSpec j = jump(1);
  j.area_error = -2.0 * pi;
  CHECK_NOTHROW(j.validate());
  j.area_error = -2.1 * pi;
  CHECK_THROWS_AS(j.validate(), ValidationError);
  j = jump(0);
  CHECK_THROWS_AS(j.validate(), ValidationError);
  j = jump(1);
  j.thetaT = -1.0;
  CHECK_THROWS_AS(j.validate(), ValidationError);
}

TEST_CASE("effective area identity", "[jump][property]") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> err(-pi, pi);
  for (int trial = 0; trial < 100; ++trial) {
    JumpSpec j = jump(1 + trial % 8);
    j.s0 = trial % 3;
    j.area_error = err(rng);
    for (const auto& a : jump_pair_areas(j)) {
      CHECK(std::hypot(a.pump, a.stokes) == Approx(j.effective_area()).epsilon(1e-13));
    }
  }
}

TEST_CASE("monotone handoff from Stokes to pump", "[jump][property]") {
  for (int n = 2; n <= 8; ++n) {
    const auto a = jump_pair_areas(jump(n));
    for (std::size_t k = 1; k < a.size(); ++k) {
      CHECK(a[k].pump > a[k - 1].pump);
      CHECK(a[k].stokes < a[k - 1].stokes);
    }
  }
}

TEST_CASE("adjacent pairs do not overlap", "[jump][property]") {
  const auto spec = jump(4);
  const auto train = jump_train(spec, rb());
  const double bound = std::exp(-0.5 * std::pow(1.4 * pi, 2));
  for (const auto& s : train.subpulses) {
    const double peak = s.envelope(s.center);
    CHECK(s.envelope(s.center + 0.5 * spec.spacing()) <= bound * peak * (1 + 1e-12));
  }
  CHECK(bound == Approx(6.3e-5).epsilon(0.05));
}

TEST_CASE("Rabi envelope integrates to the pair area", "[pulse]") {
  const auto sys = rb();
  const auto spec = jump(3);
  const auto train = jump_train(spec, sys);
  const auto areas = jump_pair_areas(spec);
  for (int k = 0; k < 3; ++k) {
    const auto& pump = train.subpulses[static_cast<std::size_t>(2 * k)];
    const auto& stokes = train.subpulses[static_cast<std::size_t>(2 * k + 1)];
    REQUIRE(pump.channel == Channel::pump);
    const double mu_p = std::abs(sys.mu(Level::g1, Level::e1));
    const double mu_s = std::abs(sys.mu(Level::g2, Level::e1));
    const double span = 12.0 * spec.tau_J;
    const double ap = oracle::integrate([&](double t) { return mu_p * pump.envelope(t); }, pump.center - span,
                                        pump.center + span);
    const double as = oracle::integrate([&](double t) { return mu_s * stokes.envelope(t); }, stokes.center - span,
                                        stokes.center + span);
    CHECK(ap == Approx(areas[static_cast<std::size_t>(k)].pump).epsilon(1e-9));
    CHECK(as == Approx(areas[static_cast<std::size_t>(k)].stokes).epsilon(1e-9));
  }
}

TEST_CASE("field and envelope evaluation", "[pulse]") {
  const auto sys = rb();
  const auto train = jump_train(jump(1), sys);
  const auto& p = train.subpulses[0];
  CHECK(field_at(train, 1e6).pump == 0.0);
  CHECK(envelope_at(train, -1e6).stokes == 0.0);
  const auto r = rabi_envelope_at(train, sys, p.center);
  CHECK(r.pump == Approx(sys.mu(Level::g1, Level::e1) * p.strength));
  CHECK(field_at(train, p.center).pump == Approx(p.strength * std::cos(p.phase0)));
}

TEST_CASE("phase modes", "[pulse]") {
  const auto sys = rb();
  JumpSpec j = jump(2);
  const auto locked = jump_train(j, sys);
  for (const auto& s : locked.subpulses) {
    CHECK(std::cos(s.rotating_phase()) == Approx(1.0).epsilon(1e-9));
  }
  j.phase_mode = PhaseMode::centered;
  const auto centered = jump_train(j, sys);
  for (const auto& s : centered.subpulses) {
    CHECK(s.phase0 == 0.0);
    CHECK(s.field(s.center + 0.1) == Approx(s.envelope(s.center + 0.1) * std::cos(s.carrier * 0.1)));
  }
}

TEST_CASE("STIRAP pair layout", "[stirap]") {
  const auto sys = rb();
  const auto spec = StirapSpec::with_bandwidth(sys.delta1 / 50.0);
  const auto train = stirap_pair(spec, sys);
  REQUIRE(train.subpulses.size() == 2);
  CHECK(train.subpulses[0].channel == Channel::stokes);
  CHECK(train.subpulses[1].center - train.subpulses[0].center == Approx(1.76 * spec.tau()));
  CHECK(train.carrier(Channel::pump) == Approx(sys.omega(Level::e1, Level::g1)));
  CHECK(train.carrier(Channel::stokes) == Approx(sys.omega(Level::e1, Level::g2)));
  const double area = oracle::integrate(
      [&](double t) { return std::abs(rabi_envelope_at(train, sys, t).pump); }, train.t_start - 20.0,
      train.t_end + 20.0);
  CHECK(area == Approx(6.0 * std::sqrt(2.0) * pi).epsilon(1e-9));
  StirapSpec bad = spec;
  bad.t_p = bad.t_s - 1.0;
  CHECK_THROWS_AS(stirap_pair(bad, sys), ValidationError);
}

TEST_CASE("Stokes shift re-locks phases", "[pulse]") {
  const auto sys = rb();
  const auto train = jump_train(jump(2), sys);
  const auto shifted = with_stokes_shift(train, 0.5);
  for (std::size_t i = 0; i < train.subpulses.size(); ++i) {
    const auto& a = train.subpulses[i];
    const auto& b = shifted.subpulses[i];
    if (a.channel == Channel::stokes) {
      CHECK(b.carrier == Approx(a.carrier + 0.5));
      CHECK(std::cos(b.rotating_phase()) == Approx(1.0).epsilon(1e-9));
    } else {
      CHECK(b.carrier == a.carrier);
    }
  }
}

TEST_CASE("parsers", "[pulse]") {
  CHECK(parse_protocol("jump") == Protocol::jump);
  CHECK(parse_phase_mode("centered") == PhaseMode::centered);
  CHECK_THROWS_AS(parse_protocol("x"), ValidationError);
  CHECK_THROWS_AS(strength_for_area(1.0, 1.0, 0.0), ValidationError);
}
