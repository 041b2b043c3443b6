// Acceptance run: one [PASS]/[FAIL] line per criterion, exit code 1 if any fails.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "oracle/angular_oracle.hpp"
#include "raman/raman.hpp"

using namespace raman;

namespace {

// Tolerances and thresholds.
constexpr double kStirapFidelity = 0.995;
constexpr double kStirapSeconds = 60.0;
constexpr double kThresholdP2 = 0.99;
constexpr double kStirapThresholdLo = 1.0 / 55.0;
constexpr double kStirapThresholdHi = 1.0 / 38.0;
constexpr double kScanSeconds = 1800.0;
constexpr double kJumpFidelity = 0.995;
constexpr double kJumpThresholdLo = 1.0 / 27.0;
constexpr double kJumpThresholdHi = 1.0 / 18.0;
constexpr double kFinalUnitaryTol = 1e-3;
constexpr double kCompositionTol = 1e-6;
constexpr double kCompositionMaxStep = 1e-3;  // ns
constexpr int kInteriorTimes = 200;
constexpr double kPhaseTol = 1e-3;
constexpr double kRobustnessError = 0.2;  // units of pi
constexpr double kOptimumLo = 0.991;
constexpr double kOptimumArea = -0.8;     // units of pi
constexpr double kOptimumDetuning = -12.0;  // MHz
constexpr double kPlateauP2 = 0.95;
constexpr double kPlateauWidth = 0.8;  // units of pi
constexpr double kDegradation = 0.05;
constexpr double kAngularTol = 1e-10;
constexpr int kAngularSamples = 500;
constexpr double kNormTol = 1e-9;
constexpr double kUnitarityTol = 1e-8;
constexpr double kAdiabaticP0 = 0.995;
constexpr double kEpsRatio = 0.15;
constexpr double kLabFrameTol = 0.01;
constexpr double kLabFrameSeconds = 900.0;

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

void info(const std::string& name, const std::string& detail) {
  std::printf("[INFO] %s: %s\n", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Worst conservation figures over every propagation in this run.
struct Conservation {
  double norm = 0.0;
  double unitarity = 0.0;
  long runs = 0;
  void add(double n, double u) {
    norm = std::max(norm, n);
    unitarity = std::max(unitarity, u);
    ++runs;
  }
  void add(const PropagationResult& r) { add(r.max_norm_error(), r.unitarity_error()); }
  void add(const ExperimentResult& r) {
    for (const auto& row : r.rows) {
      if (row.ok) add(row.norm_error, row.unitarity_error);
    }
  }
} conservation;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Largest axis value whose row has P2 above the threshold.
double largest_passing(const ExperimentResult& r, double threshold) {
  double best = 0.0;
  for (const auto& row : r.rows) {
    if (row.ok && row.populations[1] > threshold) best = std::max(best, row.axis_values[0]);
  }
  return best;
}

bool all_ok(const ExperimentResult& r) {
  for (const auto& row : r.rows) {
    if (!row.ok) return false;
  }
  return true;
}

SweepSpec point(Protocol protocol, double ratio, std::vector<TierChoice> tiers) {
  SweepSpec s;
  s.kind = SweepKind::bandwidth_scan;
  s.protocol = protocol;
  s.tiers = std::move(tiers);
  s.axes = {{"bandwidth_ratio", {ratio}}};
  return s;
}

const TierChoice kCross3{Tier::cross_coupled, 3};

void stirap_point() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_scan(point(Protocol::stirap, 1.0 / 50.0, {kCross3}), 1);
  const double secs = seconds_since(t0);
  conservation.add(r);
  const double p2 = r.rows[0].populations[1];
  report("stirap_fidelity_point", r.rows[0].ok && p2 > kStirapFidelity && secs <= kStirapSeconds,
         "P2 = " + fmt("%.6f", p2) + " (need > 0.995), " + fmt("%.2f", secs) + " s (limit 60 s)");
}

void bandwidth_threshold(Protocol protocol, const std::string& name, double lo, double hi) {
  SweepSpec s;
  s.kind = SweepKind::bandwidth_scan;
  s.protocol = protocol;
  s.tiers = {kCross3};
  const int workers = default_workers();
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_scan(s, workers);
  const double secs = seconds_since(t0);
  conservation.add(r);
  const double best = largest_passing(r, kThresholdP2);
  report(name, all_ok(r) && best >= lo && best <= hi && secs <= kScanSeconds,
         "largest ratio with P2 > 0.99 = 1/" + fmt("%.2f", 1.0 / best) +
             " (need in [1/" + fmt("%.0f", 1.0 / lo) + ", 1/" + fmt("%.0f", 1.0 / hi) + "]), " +
             std::to_string(r.rows.size()) + " points, " + fmt("%.1f", secs) + " s on " +
             std::to_string(workers) + " worker(s)");
}

void jump_point() {
  const auto r = run_scan(point(Protocol::jump, 1.0 / 30.0, {kCross3}), 1);
  conservation.add(r);
  const double p2 = r.rows[0].populations[1];
  report("jump_n1_fidelity_point", r.rows[0].ok && p2 > kJumpFidelity,
         "P2 = " + fmt("%.6f", p2) + " (need > 0.995)");
}

JumpSpec ideal_jump(int n, const LevelSystem& sys) {
  FixedParameters p;
  p.n_pairs = n;
  return jump_spec_for(p, sys);
}

void analytic_equivalence() {
  const auto sys = system_for({});
  double worst_final = 0.0;
  double worst_interior = 0.0;
  for (int n = 1; n <= 6; ++n) {
    const auto spec = ideal_jump(n, sys);
    const Model model = build_model(Tier::rwa3, sys, jump_train(spec, sys));
    PropagationOptions o;
    o.keep_propagators = true;
    o.max_step = kCompositionMaxStep;
    const auto grid = uniform_grid(model.t_start(), model.t_end(), kInteriorTimes + 2);
    const auto r = propagate(model, basis_state(model, Level::g1), grid, o);
    conservation.add(r);
    const auto theta = jump_mixing_angles(spec);
    const auto area = gaussian_running_area(spec);
    const auto signs = jump_gauge_signs(model);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const Matrix3c diff = align_gauge(r.propagators[i], signs) - analytic_jump_propagator(theta, area, grid[i]);
      worst_interior = std::max(worst_interior, diff.cwiseAbs().maxCoeff());
    }
    const Matrix3c final_diff = align_gauge(r.propagator, signs) - final_jump_unitary(n, spec.thetaT).cast<cplx>();
    worst_final = std::max(worst_final, final_diff.cwiseAbs().maxCoeff());
  }
  report("analytic_oracle_equivalence", worst_final <= kFinalUnitaryTol && worst_interior <= kCompositionTol,
         "N=1..6 final max|dU| = " + fmt("%.2e", worst_final) + " (need <= 1e-3), interior composition max|dU| = " +
             fmt("%.2e", worst_interior) + " (need <= 1e-6)");
}

void per_pair_phases() {
  const auto sys = system_for({});
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n) {
    const auto spec = ideal_jump(n, sys);
    const Model model = build_model(Tier::rwa3, sys, jump_train(spec, sys));
    const auto b = jump_boundaries(spec);
    const auto alpha = dynamical_phases(model, b);
    for (std::size_t k = 1; k < b.size(); ++k) {
      worst = std::max(worst, std::abs(alpha[k][0] - alpha[k - 1][0] - pi));
      worst = std::max(worst, std::abs(alpha[k][2] - alpha[k - 1][2] + pi));
    }
  }
  report("per_pair_phase_condition", worst <= kPhaseTol,
         "max |alpha_pm - (-/+pi)| = " + fmt("%.2e", worst) + " rad over N=1..6 (need <= 1e-3)");
}

void robustness_ordering() {
  SweepSpec s;
  s.kind = SweepKind::robustness_scan;
  s.tiers = {{Tier::rwa3, 0}};
  s.axes = {{"n_pairs", {1, 2, 4, 6}}, {"area_error_pi", {-kRobustnessError, kRobustnessError}}};
  const auto r = run_scan(s);
  conservation.add(r);
  auto p2 = [&](int n, double e) {
    for (const auto& row : r.rows) {
      if (row.axis_values[0] == n && row.axis_values[1] == e) return row.populations[1];
    }
    throw NumericalError("missing robustness row");
  };
  bool pass = all_ok(r);
  std::string detail;
  for (double e : {-kRobustnessError, kRobustnessError}) {
    pass = pass && p2(6, e) >= p2(1, e) && p2(4, e) >= p2(2, e);
    detail += fmt("dA=%+.1fpi: ", e) + fmt("N1 %.4f ", p2(1, e)) + fmt("N2 %.4f ", p2(2, e)) +
              fmt("N4 %.4f ", p2(4, e)) + fmt("N6 %.4f; ", p2(6, e));
  }
  report("robustness_ordering", pass, detail + "need P2(6) >= P2(1) and P2(4) >= P2(2)");
}

void four_level() {
  SweepSpec s;
  s.kind = SweepKind::fidelity_map;
  const auto t0 = std::chrono::steady_clock::now();
  const auto map = run_scan(s);
  conservation.add(map);
  const ResultRow* opt = nullptr;
  const ResultRow* argmax = nullptr;
  for (const auto& row : map.rows) {
    if (std::abs(row.axis_values[0] - kOptimumArea) < 1e-9 && std::abs(row.axis_values[1] - kOptimumDetuning) < 1e-9) {
      opt = &row;
    }
    if (row.ok && (!argmax || row.populations[1] > argmax->populations[1])) argmax = &row;
  }
  if (argmax) {
    info("fidelity_map_argmax", fmt("dA = %.2fpi, ", argmax->axis_values[0]) +
                                    fmt("D2 = %.0f MHz, ", argmax->axis_values[1]) +
                                    fmt("P2 = %.5f", argmax->populations[1]) + ", " +
                                    std::to_string(map.rows.size()) + " points in " +
                                    fmt("%.1f s", seconds_since(t0)));
  }
  const double p_opt = opt ? opt->populations[1] : 0.0;

  // Widest contiguous run of cut points above the plateau level.
  const auto cut = detuning_cut(map, kOptimumDetuning);
  double width = 0.0;
  double run_start = 0.0;
  bool in_run = false;
  for (const auto& row : cut) {
    const bool above = row.ok && row.populations[1] > kPlateauP2;
    if (above && !in_run) run_start = row.axis_values[0];
    if (above) width = std::max(width, row.axis_values[0] - run_start);
    in_run = above;
  }
  report("four_level_optimum", opt && p_opt >= kOptimumLo && p_opt <= 1.0 + 1e-12 && width >= kPlateauWidth - 1e-9,
         "rwa4 N=6 at (-0.8pi, -12 MHz): P2 = " + fmt("%.5f", p_opt) + " (need in [0.991, 1]); cut plateau P2 > 0.95 width = " +
             fmt("%.2fpi", width) + " (need >= 0.8pi)");

  // Same point on the full four-level cross-coupled tier, for comparison.
  SweepSpec c;
  c.kind = SweepKind::fidelity_map;
  c.tiers = {{Tier::cross_coupled, 4}};
  c.fixed.n_pairs = 6;
  c.axes = {{"area_error_pi", {kOptimumArea}}, {"detuning2_mhz", {kOptimumDetuning}}};
  const auto cc = run_scan(c, 1);
  conservation.add(cc);
  info("four_level_optimum_cross_coupled4", fmt("P2 = %.5f", cc.rows[0].populations[1]));
}

void degradation() {
  SweepSpec s;
  s.kind = SweepKind::time_trace;
  s.fixed.n_pairs = 6;
  s.tiers = {{Tier::rwa3, 0}, {Tier::rwa4, 0}, {Tier::detuned_lambda, 0}, {Tier::cross_coupled, 4}};
  s.fixed.samples = 2;
  const auto r = run_time_trace(s, 1);
  std::vector<double> p2;
  for (const auto& t : r.traces) {
    conservation.add(t.propagation);
    p2.push_back(t.propagation.final_population(Level::g2));
  }
  const double drop = p2[0] - p2[1];
  report("four_level_degradation", drop >= kDegradation,
         "N=6 unmodified: rwa3 P2 = " + fmt("%.5f", p2[0]) + ", rwa4 P2 = " + fmt("%.5f", p2[1]) + ", drop = " +
             fmt("%.4f", drop) + " (need >= 0.05)");
  info("four_level_degradation_other_tiers", "detuned_lambda P2 = " + fmt("%.5f", p2[2]) +
                                                 ", cross_coupled:4 P2 = " + fmt("%.5f", p2[3]) +
                                                 ", cross_coupled:4 drop = " + fmt("%.4f", p2[0] - p2[3]));
}

void dipole_algebra() {
  oracle::CouplingTable table;
  std::mt19937 rng(5150);
  auto h = [](int twice) { return HalfInt::from_twice(twice); };
  auto ok = [](int a, int b, int c) { return c >= std::abs(a - b) && c <= a + b && (a + b + c) % 2 == 0; };
  std::uniform_int_distribution<int> jd(0, 8);
  double worst3 = 0.0;
  for (int i = 0; i < kAngularSamples;) {
    const int j1 = jd(rng), j2 = jd(rng), j3 = jd(rng);
    if (!ok(j1, j2, j3)) continue;
    const int m1 = -j1 + 2 * std::uniform_int_distribution<int>(0, j1)(rng);
    const int m2 = -j2 + 2 * std::uniform_int_distribution<int>(0, j2)(rng);
    const int m3 = -m1 - m2;
    if (std::abs(m3) > j3) continue;
    ++i;
    worst3 = std::max(worst3, std::abs(wigner_3j(h(j1), h(j2), h(j3), h(m1), h(m2), h(m3)) -
                                       table.three_j(j1, j2, j3, m1, m2, m3)));
  }
  std::uniform_int_distribution<int> jd6(0, 6);
  double worst6 = 0.0;
  for (int i = 0; i < kAngularSamples;) {
    const int j1 = jd6(rng), j2 = jd6(rng), j3 = jd6(rng), j4 = jd6(rng), j5 = jd6(rng), j6 = jd6(rng);
    if (!ok(j1, j2, j3) || !ok(j1, j5, j6) || !ok(j4, j2, j6) || !ok(j4, j5, j3)) continue;
    ++i;
    worst6 = std::max(worst6, std::abs(wigner_6j(h(j1), h(j2), h(j3), h(j4), h(j5), h(j6)) -
                                       table.six_j(j1, j2, j3, j4, j5, j6)));
  }
  const auto sys = build_rb87_system(HalfInt(1));
  const double m11 = sys.mu(Level::g1, Level::e1), m12 = sys.mu(Level::g1, Level::e2);
  const double m21 = sys.mu(Level::g2, Level::e1), m22 = sys.mu(Level::g2, Level::e2);
  const double r1 = std::abs(m12 + std::sqrt(3.0) * m11) / std::abs(m12);
  const double r2 = std::abs(m21 - std::sqrt(3.0) * m22) / std::abs(m21);
  report("dipole_algebra", worst3 <= kAngularTol && worst6 <= kAngularTol && r1 <= kAngularTol && r2 <= kAngularTol,
         "500 3j max dev = " + fmt("%.1e", worst3) + ", 500 6j max dev = " + fmt("%.1e", worst6) +
             ", mu12'=-sqrt3 mu11' rel = " + fmt("%.1e", r1) + ", mu21'=sqrt3 mu22' rel = " + fmt("%.1e", r2) +
             " (need <= 1e-10)");
}

void adiabaticity() {
  const auto sys = system_for({});
  const auto spec = ideal_jump(6, sys);
  const Model model = build_model(Tier::rwa3, sys, jump_train(spec, sys));
  const auto b = jump_boundaries(spec);
  // Boundaries plus 40 samples inside each interval.
  std::vector<double> grid{b.front()};
  std::vector<std::size_t> at_boundary{0};
  for (std::size_t k = 1; k < b.size(); ++k) {
    for (int j = 1; j <= 40; ++j) grid.push_back(b[k - 1] + (b[k] - b[k - 1]) * j / 40.0);
    grid.back() = b[k];
    at_boundary.push_back(grid.size() - 1);
  }
  const auto r = propagate(model, basis_state(model, Level::g1), grid);
  conservation.add(r);
  const auto tr = diagnostics_trace(model, grid, {}, &r);

  double min_p0 = 1.0;
  for (std::size_t k = 1; k + 1 < at_boundary.size(); ++k) min_p0 = std::min(min_p0, tr.p0_ad[at_boundary[k]]);
  double worst_ratio = 0.0;
  for (std::size_t k = 1; k < at_boundary.size(); ++k) {
    for (const auto* eps : {&tr.eps_0minus, &tr.eps_0plus}) {
      double peak = 0.0;
      for (std::size_t i = at_boundary[k - 1] + 1; i < at_boundary[k]; ++i) peak = std::max(peak, (*eps)[i]);
      if (peak > 0.0) worst_ratio = std::max(worst_ratio, (*eps)[at_boundary[k]] / peak);
    }
  }
  report("adiabaticity_diagnostics", min_p0 >= kAdiabaticP0 && worst_ratio <= kEpsRatio,
         "N=6 min p0_ad at interior pair boundaries = " + fmt("%.5f", min_p0) +
             " (need >= 0.995); max eps(t_k)/interval max = " + fmt("%.3f", worst_ratio) + " (need <= 0.15)");
}

void lab_frame() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_scan(point(Protocol::stirap, 1.0 / 50.0, {{Tier::lab_frame, 3}, kCross3}), 1);
  const double secs = seconds_since(t0);
  conservation.add(r);
  double worst = 0.0;
  for (std::size_t l = 0; l < 4; ++l) worst = std::max(worst, std::abs(r.rows[0].populations[l] - r.rows[1].populations[l]));
  report("lab_frame_spot_check", all_ok(r) && worst <= kLabFrameTol && secs <= kLabFrameSeconds,
         "max |dP| lab_frame vs cross_coupled = " + fmt("%.2e", worst) + " (need <= 0.01), lab P2 = " +
             fmt("%.6f", r.rows[0].populations[1]) + ", " + fmt("%.1f", secs) + " s (limit 900 s)" +
             (r.rows[0].ok ? "" : ", error: " + r.rows[0].message));
}

void phase_modes() {
  SweepSpec s;
  s.kind = SweepKind::time_trace;
  s.tiers = {kCross3};
  for (int n : {1, 6}) {
    s.fixed.n_pairs = n;
    const auto c = compare_phase_modes(s);
    info("phase_modes_jump_n" + std::to_string(n), "cross_coupled:3 P2 locked = " + fmt("%.6f", c.p2_locked) +
                                                       ", centered = " + fmt("%.6f", c.p2_centered));
  }
}

}  // namespace

int main() {
  try {
    stirap_point();
    bandwidth_threshold(Protocol::stirap, "stirap_bandwidth_threshold", kStirapThresholdLo, kStirapThresholdHi);
    jump_point();
    bandwidth_threshold(Protocol::jump, "jump_bandwidth_threshold", kJumpThresholdLo, kJumpThresholdHi);
    analytic_equivalence();
    per_pair_phases();
    robustness_ordering();
    four_level();
    degradation();
    dipole_algebra();
    adiabaticity();
    lab_frame();
    phase_modes();
    report("conservation_suite", conservation.norm <= kNormTol && conservation.unitarity <= kUnitarityTol,
           std::to_string(conservation.runs) + " propagations, max |norm-1| = " + fmt("%.2e", conservation.norm) +
               " (need <= 1e-9), max |U^dag U - I| = " + fmt("%.2e", conservation.unitarity) + " (need <= 1e-8)");
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance run aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
