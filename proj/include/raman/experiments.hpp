#pragma once

// Sweep harness: a SweepSpec names a protocol, a list of tiers, scan axes and
// fixed parameters; runners turn it into rows of final populations or into
// full time traces.

#include <atomic>
#include <chrono>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "atomic_structure.hpp"
#include "diagnostics.hpp"
#include "model.hpp"
#include "output.hpp"
#include "propagate.hpp"
#include "pulse.hpp"

namespace raman {

inline constexpr const char* kCodeVersion = "0.1.0";

enum class SweepKind { bandwidth_scan, robustness_scan, time_trace, fidelity_map, diagnostics_trace };

inline const char* to_string(SweepKind k) {
  switch (k) {
    case SweepKind::bandwidth_scan: return "bandwidth_scan";
    case SweepKind::robustness_scan: return "robustness_scan";
    case SweepKind::time_trace: return "time_trace";
    case SweepKind::fidelity_map: return "fidelity_map";
    case SweepKind::diagnostics_trace: return "diagnostics_trace";
  }
  return "?";
}

inline SweepKind parse_sweep_kind(const std::string& s) {
  for (auto k : {SweepKind::bandwidth_scan, SweepKind::robustness_scan, SweepKind::time_trace,
                 SweepKind::fidelity_map, SweepKind::diagnostics_trace}) {
    if (s == to_string(k)) return k;
  }
  throw ValidationError("unknown sweep kind '" + s + "'");
}

/// A tier plus an explicit basis size; dimension 0 means the tier default.
/// Written "cross_coupled:3".
struct TierChoice {
  Tier tier = Tier::rwa3;
  int dimension = 0;

  int resolved_dimension() const { return dimension > 0 ? dimension : default_dimension(tier); }
  bool operator==(const TierChoice&) const = default;
};

inline std::string to_string(const TierChoice& c) {
  std::string s = to_string(c.tier);
  if (c.dimension > 0) s += ":" + std::to_string(c.dimension);
  return s;
}

inline TierChoice parse_tier_choice(const std::string& s) {
  const auto colon = s.find(':');
  TierChoice c;
  c.tier = parse_tier(s.substr(0, colon));
  if (colon != std::string::npos) {
    const std::string d = s.substr(colon + 1);
    require(d == "3" || d == "4", "tier dimension must be 3 or 4, got '" + d + "'");
    c.dimension = std::stoi(d);
  }
  return c;
}

// ---------------------------------------------------------------- axes

inline const std::vector<std::string>& axis_names() {
  static const std::vector<std::string> names{"bandwidth_ratio", "area_error_pi", "detuning2_mhz", "n_pairs"};
  return names;
}

struct Axis {
  std::string name;
  std::vector<double> values;
  bool operator==(const Axis&) const = default;
};

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  require(n >= 1, "linspace needs at least one point");
  if (n == 1) return {a};
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  v.back() = b;
  return v;
}

inline std::vector<double> logspace(double a, double b, std::size_t n) {
  require(a > 0.0 && b > 0.0, "logspace bounds must be positive");
  auto v = linspace(std::log(a), std::log(b), n);
  for (auto& x : v) x = std::exp(x);
  v.front() = a;
  v.back() = b;
  return v;
}

// ---------------------------------------------------------------- spec

struct FixedParameters {
  double bandwidth_ratio = 1.0 / 30.0;  // bandwidth / delta1
  int n_pairs = 1;
  int s0 = 0;
  double theta0 = 0.0;  // rad
  double thetaT = pi;   // rad
  double area_error_pi = 0.0;
  double detuning2_mhz = 0.0;
  PhaseMode phase_mode = PhaseMode::locked;
  double stirap_area_pi = 6.0 * std::numbers::sqrt2;  // per channel
  double stirap_delay = 1.76;                         // t_p - t_s in units of tau_S
  int mF = 1;
  double optical_offset_ghz = 2.0e5;
  int samples = static_cast<int>(kDefaultGridSamples);
  double max_step_ns = 0.0;  // 0: integrator default
  AccumulationConvention convention = AccumulationConvention::uniform_rate;

  bool operator==(const FixedParameters&) const = default;
};

struct SweepSpec {
  SweepKind kind = SweepKind::time_trace;
  Protocol protocol = Protocol::jump;
  std::vector<TierChoice> tiers;
  std::vector<Axis> axes;
  FixedParameters fixed;

  bool operator==(const SweepSpec&) const = default;
};

inline bool is_trace_kind(SweepKind k) { return k == SweepKind::time_trace || k == SweepKind::diagnostics_trace; }

/// Copy with empty tiers/axes replaced by the defaults of the sweep kind.
inline SweepSpec resolved(SweepSpec s) {
  if (s.tiers.empty()) {
    switch (s.kind) {
      case SweepKind::bandwidth_scan: s.tiers = {{Tier::rwa3, 0}, {Tier::cross_coupled, 3}}; break;
      case SweepKind::fidelity_map: s.tiers = {{Tier::rwa4, 0}}; break;
      default: s.tiers = {{Tier::rwa3, 0}}; break;
    }
  }
  if (s.axes.empty()) {
    switch (s.kind) {
      case SweepKind::bandwidth_scan: s.axes = {{"bandwidth_ratio", logspace(1.0 / 100.0, 1.0 / 10.0, 60)}}; break;
      case SweepKind::robustness_scan:
        s.axes = {{"n_pairs", {1, 2, 3, 4, 5, 6}}, {"area_error_pi", linspace(-1.0, 1.0, 81)}};
        break;
      case SweepKind::fidelity_map:
        s.axes = {{"area_error_pi", linspace(-1.0, 0.5, 31)}, {"detuning2_mhz", linspace(-30.0, 10.0, 41)}};
        if (s.fixed.n_pairs == 1) s.fixed.n_pairs = 6;
        break;
      default: break;
    }
  }
  return s;
}

inline void validate(const SweepSpec& s) {
  const auto r = resolved(s);
  std::set<std::string> seen;
  for (const auto& axis : r.axes) {
    require(std::find(axis_names().begin(), axis_names().end(), axis.name) != axis_names().end(),
            "unknown axis '" + axis.name + "'");
    require(seen.insert(axis.name).second, "axis '" + axis.name + "' given twice");
    require(!axis.values.empty(), "axis '" + axis.name + "' is empty");
    const bool up = axis.values.size() < 2 || axis.values[1] > axis.values[0];
    for (std::size_t i = 1; i < axis.values.size(); ++i) {
      require(up ? axis.values[i] > axis.values[i - 1] : axis.values[i] < axis.values[i - 1],
              "axis '" + axis.name + "' is not strictly monotone");
    }
    if (axis.name == "n_pairs") {
      for (double v : axis.values) require(v >= 1.0 && v == std::floor(v), "n_pairs values must be integers >= 1");
    }
    if (axis.name == "bandwidth_ratio") {
      for (double v : axis.values) require(v > 0.0, "bandwidth_ratio values must be positive");
    }
    if ((axis.name == "n_pairs" || axis.name == "area_error_pi") && r.protocol != Protocol::jump) {
      throw ValidationError("axis '" + axis.name + "' applies to the jump protocol only");
    }
  }
  if (is_trace_kind(r.kind)) require(r.axes.empty(), std::string(to_string(r.kind)) + " takes no scan axes");
  if (r.kind == SweepKind::robustness_scan || r.kind == SweepKind::fidelity_map) {
    require(r.protocol == Protocol::jump, std::string(to_string(r.kind)) + " needs the jump protocol");
  }
  for (const auto& t : r.tiers) {
    if (t.tier == Tier::rwa3 || t.tier == Tier::detuned_lambda) {
      require(t.resolved_dimension() == 3, std::string(to_string(t.tier)) + " is three-dimensional");
    }
    if (t.tier == Tier::rwa4) require(t.resolved_dimension() == 4, "rwa4 is four-dimensional");
  }
  if (r.kind == SweepKind::diagnostics_trace) {
    for (const auto& t : r.tiers) {
      require(t.tier == Tier::rwa3 || t.tier == Tier::detuned_lambda,
              "diagnostics traces support the rwa3 and detuned_lambda tiers");
    }
  }
  require(r.fixed.bandwidth_ratio > 0.0, "bandwidth_ratio must be positive");
  require(r.fixed.samples >= 1, "samples must be >= 1");
  require(r.fixed.max_step_ns >= 0.0, "max_step_ns must be non-negative");
  require(r.fixed.stirap_delay > 0.0, "stirap_delay must be positive");
}

// ---------------------------------------------------------------- JSON

inline nlohmann::json to_json(const SweepSpec& s) {
  nlohmann::json j;
  j["kind"] = to_string(s.kind);
  j["protocol"] = to_string(s.protocol);
  j["tiers"] = nlohmann::json::array();
  for (const auto& t : s.tiers) j["tiers"].push_back(to_string(t));
  j["axes"] = nlohmann::json::array();
  for (const auto& a : s.axes) j["axes"].push_back({{"name", a.name}, {"values", a.values}});
  const auto& f = s.fixed;
  j["fixed"] = {{"bandwidth_ratio", f.bandwidth_ratio},
                {"n_pairs", f.n_pairs},
                {"s0", f.s0},
                {"theta0", f.theta0},
                {"thetaT", f.thetaT},
                {"area_error_pi", f.area_error_pi},
                {"detuning2_mhz", f.detuning2_mhz},
                {"phase_mode", to_string(f.phase_mode)},
                {"stirap_area_pi", f.stirap_area_pi},
                {"stirap_delay", f.stirap_delay},
                {"mF", f.mF},
                {"optical_offset_ghz", f.optical_offset_ghz},
                {"samples", f.samples},
                {"max_step_ns", f.max_step_ns},
                {"convention", to_string(f.convention)}};
  return j;
}

namespace detail {

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config field '") + key + "': " + e.what());
  }
}

/// Axis values either listed or generated from start/stop/count.
inline Axis axis_from_json(const nlohmann::json& j) {
  Axis a;
  read_field(j, "name", a.name);
  require(!a.name.empty(), "axis needs a name");
  if (j.contains("values")) {
    read_field(j, "values", a.values);
    return a;
  }
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  std::string spacing = "linear";
  read_field(j, "start", start);
  read_field(j, "stop", stop);
  read_field(j, "count", count);
  read_field(j, "spacing", spacing);
  require(count >= 1, "axis '" + a.name + "' needs values or start/stop/count");
  if (spacing == "log") {
    a.values = logspace(start, stop, static_cast<std::size_t>(count));
  } else {
    require(spacing == "linear", "axis spacing must be linear or log");
    a.values = linspace(start, stop, static_cast<std::size_t>(count));
  }
  return a;
}

}  // namespace detail

inline SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  require(j.is_object(), "sweep spec must be a JSON object");
  static const std::set<std::string> top{"kind", "protocol", "tiers", "axes", "fixed"};
  for (const auto& [key, _] : j.items()) require(top.count(key) == 1, "unknown sweep spec field '" + key + "'");
  SweepSpec s;
  std::string text;
  if (j.contains("kind")) {
    detail::read_field(j, "kind", text);
    s.kind = parse_sweep_kind(text);
  }
  if (j.contains("protocol")) {
    detail::read_field(j, "protocol", text);
    s.protocol = parse_protocol(text);
  }
  if (j.contains("tiers")) {
    std::vector<std::string> names;
    detail::read_field(j, "tiers", names);
    for (const auto& n : names) s.tiers.push_back(parse_tier_choice(n));
  }
  if (j.contains("axes")) {
    require(j["axes"].is_array(), "axes must be an array");
    for (const auto& a : j["axes"]) s.axes.push_back(detail::axis_from_json(a));
  }
  if (j.contains("fixed")) {
    const auto& f = j["fixed"];
    require(f.is_object(), "fixed must be an object");
    static const std::set<std::string> known{"bandwidth_ratio", "n_pairs", "s0", "theta0", "thetaT",
                                             "area_error_pi", "detuning2_mhz", "phase_mode", "stirap_area_pi",
                                             "stirap_delay", "mF", "optical_offset_ghz", "samples",
                                             "max_step_ns", "convention"};
    for (const auto& [key, _] : f.items()) require(known.count(key) == 1, "unknown fixed parameter '" + key + "'");
    auto& x = s.fixed;
    detail::read_field(f, "bandwidth_ratio", x.bandwidth_ratio);
    detail::read_field(f, "n_pairs", x.n_pairs);
    detail::read_field(f, "s0", x.s0);
    detail::read_field(f, "theta0", x.theta0);
    detail::read_field(f, "thetaT", x.thetaT);
    detail::read_field(f, "area_error_pi", x.area_error_pi);
    detail::read_field(f, "detuning2_mhz", x.detuning2_mhz);
    detail::read_field(f, "stirap_area_pi", x.stirap_area_pi);
    detail::read_field(f, "stirap_delay", x.stirap_delay);
    detail::read_field(f, "mF", x.mF);
    detail::read_field(f, "optical_offset_ghz", x.optical_offset_ghz);
    detail::read_field(f, "samples", x.samples);
    detail::read_field(f, "max_step_ns", x.max_step_ns);
    if (f.contains("phase_mode")) {
      detail::read_field(f, "phase_mode", text);
      x.phase_mode = parse_phase_mode(text);
    }
    if (f.contains("convention")) {
      detail::read_field(f, "convention", text);
      x.convention = parse_convention(text);
    }
  }
  return s;
}

inline SweepSpec sweep_spec_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
  return sweep_spec_from_json(j);
}

// ---------------------------------------------------------------- points

/// Fixed parameters with one grid point's axis values applied.
inline FixedParameters apply_point(FixedParameters p, const std::vector<Axis>& axes,
                                   const std::vector<double>& values) {
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const auto& n = axes[i].name;
    const double v = values[i];
    if (n == "bandwidth_ratio") p.bandwidth_ratio = v;
    else if (n == "area_error_pi") p.area_error_pi = v;
    else if (n == "detuning2_mhz") p.detuning2_mhz = v;
    else if (n == "n_pairs") p.n_pairs = static_cast<int>(v);
  }
  return p;
}

inline LevelSystem system_for(const FixedParameters& p) {
  Rb87Parameters rb;
  rb.optical_offset = ghz_to_rad_per_ns(p.optical_offset_ghz);
  return build_rb87_system(HalfInt(p.mF), rb);
}

inline JumpSpec jump_spec_for(const FixedParameters& p, const LevelSystem& sys) {
  JumpSpec j;
  j.n_pairs = p.n_pairs;
  j.s0 = p.s0;
  j.theta0 = p.theta0;
  j.thetaT = p.thetaT;
  j.tau_J = 1.0 / (p.bandwidth_ratio * sys.delta1);
  j.area_error = p.area_error_pi * pi;
  j.phase_mode = p.phase_mode;
  return j;
}

inline StirapSpec stirap_spec_for(const FixedParameters& p, const LevelSystem& sys) {
  StirapSpec s = StirapSpec::with_bandwidth(p.bandwidth_ratio * sys.delta1);
  s.area_p = s.area_s = p.stirap_area_pi * pi;
  s.t_p = s.t_s + p.stirap_delay * s.tau();
  s.phase_mode = p.phase_mode;
  return s;
}

inline PulseTrain train_for(Protocol protocol, const FixedParameters& p, const LevelSystem& sys) {
  return protocol == Protocol::jump ? jump_train(jump_spec_for(p, sys), sys) : stirap_pair(stirap_spec_for(p, sys), sys);
}

inline Model model_for(Protocol protocol, const FixedParameters& p, const TierChoice& tier) {
  const LevelSystem sys = system_for(p);
  return build_model(tier.tier, sys, train_for(protocol, p, sys), mhz_to_rad_per_ns(p.detuning2_mhz),
                     tier.resolved_dimension());
}

inline PropagationOptions propagation_options(const FixedParameters& p) {
  PropagationOptions o;
  if (p.max_step_ns > 0.0) o.max_step = p.max_step_ns;
  return o;
}

// ---------------------------------------------------------------- parallel

inline int default_workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

/// Runs task(i) for i in [0, n). Worker w owns indices w, w + W, w + 2W, ...
/// The first exception thrown by a task is rethrown after all workers join.
inline void run_static_partition(std::size_t n, int workers, const std::function<void(std::size_t)>& task) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = static_cast<std::size_t>(w); i < n; i += static_cast<std::size_t>(workers)) task(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------- scans

struct ResultRow {
  std::vector<double> axis_values;
  TierChoice tier;
  std::array<double, 4> populations{};  // P1, P2, P1', P2'
  long steps = 0;
  double norm_error = 0.0;
  double unitarity_error = 0.0;
  bool ok = true;
  std::string message;
};

struct ResultMetadata {
  std::string code_version = kCodeVersion;
  double wall_seconds = 0.0;
  long total_steps = 0;
  int workers = 1;
};

struct ExperimentResult {
  SweepSpec spec;  // resolved
  std::vector<ResultRow> rows;
  ResultMetadata metadata;
};

/// Row-major grid over the axes, first axis slowest.
inline std::vector<std::vector<double>> axis_grid(const std::vector<Axis>& axes) {
  std::vector<std::vector<double>> grid{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : grid) {
      for (double v : axis.values) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    }
    grid = std::move(next);
  }
  return grid;
}

/// Final populations for every (grid point, tier); failures are recorded in
/// the row and do not stop the scan.
inline ExperimentResult run_scan(const SweepSpec& input, int workers = default_workers()) {
  validate(input);
  const SweepSpec spec = resolved(input);
  require(!is_trace_kind(spec.kind), "trace kinds are run with run_time_trace");
  const auto start = std::chrono::steady_clock::now();
  const auto points = axis_grid(spec.axes);
  const std::size_t n_tiers = spec.tiers.size();

  ExperimentResult out;
  out.spec = spec;
  out.rows.resize(points.size() * n_tiers);
  run_static_partition(out.rows.size(), workers, [&](std::size_t i) {
    ResultRow& row = out.rows[i];
    row.axis_values = points[i / n_tiers];
    row.tier = spec.tiers[i % n_tiers];
    try {
      const auto params = apply_point(spec.fixed, spec.axes, row.axis_values);
      const Model model = model_for(spec.protocol, params, row.tier);
      const std::vector<double> ends{model.t_start(), model.t_end()};
      const auto r = propagate(model, basis_state(model, Level::g1), ends, propagation_options(params));
      for (Level l : kAllLevels) row.populations[static_cast<std::size_t>(index_of(l))] = r.final_population(l);
      row.steps = r.step_count;
      row.norm_error = r.max_norm_error();
      row.unitarity_error = r.unitarity_error();
    } catch (const std::exception& e) {
      row.ok = false;
      row.message = e.what();
      row.populations.fill(std::numeric_limits<double>::quiet_NaN());
    }
  });
  out.metadata.workers = workers;
  for (const auto& r : out.rows) out.metadata.total_steps += r.steps;
  out.metadata.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

inline ExperimentResult run_bandwidth_scan(SweepSpec spec, int workers = default_workers()) {
  spec.kind = SweepKind::bandwidth_scan;
  return run_scan(spec, workers);
}

inline ExperimentResult run_robustness_scan(SweepSpec spec, int workers = default_workers()) {
  spec.kind = SweepKind::robustness_scan;
  return run_scan(spec, workers);
}

inline ExperimentResult run_fidelity_map(SweepSpec spec, int workers = default_workers()) {
  spec.kind = SweepKind::fidelity_map;
  return run_scan(spec, workers);
}

inline constexpr double kFidelityCutMhz = -12.0;

/// Rows of a fidelity map lying on a fixed detuning2 value.
inline std::vector<ResultRow> detuning_cut(const ExperimentResult& map, double detuning2_mhz = kFidelityCutMhz) {
  const auto& axes = map.spec.axes;
  const auto it = std::find_if(axes.begin(), axes.end(), [](const Axis& a) { return a.name == "detuning2_mhz"; });
  require(it != axes.end(), "result has no detuning2_mhz axis");
  const auto k = static_cast<std::size_t>(it - axes.begin());
  std::vector<ResultRow> out;
  for (const auto& r : map.rows) {
    if (std::abs(r.axis_values[k] - detuning2_mhz) < 1e-9) out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------- traces

struct TierTrace {
  TierChoice tier;
  PropagationResult propagation;
  std::optional<DiagnosticsTrace> diagnostics;
};

struct TraceResult {
  SweepSpec spec;
  std::vector<TierTrace> traces;
  ResultMetadata metadata;
};

/// Full time-resolved run of one parameter point on every requested tier.
/// Diagnostics are attached for diagnostics_trace specs.
inline TraceResult run_time_trace(const SweepSpec& input, int workers = default_workers()) {
  validate(input);
  const SweepSpec spec = resolved(input);
  require(is_trace_kind(spec.kind), "run_time_trace needs a time_trace or diagnostics_trace spec");
  const auto start = std::chrono::steady_clock::now();
  TraceResult out;
  out.spec = spec;
  out.traces.resize(spec.tiers.size());
  run_static_partition(spec.tiers.size(), workers, [&](std::size_t i) {
    const Model model = model_for(spec.protocol, spec.fixed, spec.tiers[i]);
    const auto grid = uniform_grid(model.t_start(), model.t_end(), static_cast<std::size_t>(spec.fixed.samples));
    auto& tr = out.traces[i];
    tr.tier = spec.tiers[i];
    tr.propagation = propagate(model, basis_state(model, Level::g1), grid, propagation_options(spec.fixed));
    if (spec.kind == SweepKind::diagnostics_trace) {
      DiagnosticsOptions d;
      d.convention = spec.fixed.convention;
      if (spec.protocol == Protocol::jump) {
        d.theta0 = spec.fixed.theta0;
        d.thetaT = spec.fixed.thetaT;
      }
      tr.diagnostics = diagnostics_trace(model, grid, d, &tr.propagation);
    }
  });
  out.metadata.workers = workers;
  for (const auto& t : out.traces) out.metadata.total_steps += t.propagation.step_count;
  out.metadata.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

struct PhaseModeComparison {
  double p2_locked = 0.0;
  double p2_centered = 0.0;
};

/// Final P2 of one point in both phase modes, on the first tier.
inline PhaseModeComparison compare_phase_modes(const SweepSpec& input) {
  const SweepSpec spec = resolved(input);
  PhaseModeComparison out;
  for (auto mode : {PhaseMode::locked, PhaseMode::centered}) {
    auto p = spec.fixed;
    p.phase_mode = mode;
    const Model model = model_for(spec.protocol, p, spec.tiers.front());
    const std::vector<double> ends{model.t_start(), model.t_end()};
    const double p2 = propagate(model, basis_state(model, Level::g1), ends, propagation_options(p))
                          .final_population(Level::g2);
    (mode == PhaseMode::locked ? out.p2_locked : out.p2_centered) = p2;
  }
  return out;
}

// ---------------------------------------------------------------- emit

enum class OutputFormat { csv, json };

inline OutputFormat parse_output_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ValidationError("unknown format '" + s + "' (expected csv|json)");
}

inline std::string scan_csv(const ExperimentResult& r) {
  std::ostringstream os;
  std::vector<std::string> header;
  for (const auto& a : r.spec.axes) header.push_back(a.name);
  for (const char* c : {"tier", "P1", "P2", "P1p", "P2p", "steps", "status"}) header.emplace_back(c);
  write_csv_row(os, header);
  for (const auto& row : r.rows) {
    std::vector<std::string> cells;
    for (double v : row.axis_values) cells.push_back(format_number(v));
    cells.push_back(to_string(row.tier));
    for (double p : row.populations) cells.push_back(format_number(p));
    cells.push_back(std::to_string(row.steps));
    cells.push_back(row.ok ? "ok" : csv_escape(row.message));
    write_csv_row(os, cells);
  }
  return os.str();
}

inline nlohmann::json metadata_json(const ResultMetadata& m) {
  return {{"code_version", m.code_version},
          {"wall_seconds", m.wall_seconds},
          {"total_steps", m.total_steps},
          {"workers", m.workers}};
}

namespace detail {
inline nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }
}  // namespace detail

inline nlohmann::json scan_json(const ExperimentResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json j;
    for (std::size_t i = 0; i < row.axis_values.size(); ++i) j[r.spec.axes[i].name] = row.axis_values[i];
    j["tier"] = to_string(row.tier);
    j["P1"] = detail::number_or_null(row.populations[0]);
    j["P2"] = detail::number_or_null(row.populations[1]);
    j["P1p"] = detail::number_or_null(row.populations[2]);
    j["P2p"] = detail::number_or_null(row.populations[3]);
    j["steps"] = row.steps;
    j["status"] = row.ok ? "ok" : row.message;
    rows.push_back(std::move(j));
  }
  return {{"spec", to_json(r.spec)}, {"rows", rows}, {"metadata", metadata_json(r.metadata)}};
}

inline std::string trace_csv(const TraceResult& r) {
  std::ostringstream os;
  const bool with_tier = r.traces.size() > 1;
  trace_csv_header(os, with_tier);
  for (const auto& t : r.traces) trace_csv_rows(os, t.propagation, with_tier ? to_string(t.tier) : std::string());
  return os.str();
}

inline nlohmann::json trace_json(const TraceResult& r) {
  nlohmann::json traces = nlohmann::json::array();
  for (const auto& t : r.traces) {
    nlohmann::json j;
    j["tier"] = to_string(t.tier);
    j["t_ns"] = t.propagation.times;
    for (Level l : kAllLevels) {
      std::vector<double> p;
      for (std::size_t i = 0; i < t.propagation.times.size(); ++i) p.push_back(t.propagation.population(i, l));
      j[std::string("P") + label_of(l)] = p;
    }
    j["steps"] = t.propagation.step_count;
    if (t.diagnostics) {
      const auto& d = *t.diagnostics;
      std::vector<double> em, e0, ep, am, ap;
      for (std::size_t i = 0; i < d.times.size(); ++i) {
        em.push_back(d.energies[i][0]);
        e0.push_back(d.energies[i][1]);
        ep.push_back(d.energies[i][2]);
        am.push_back(d.alpha[i][0]);
        ap.push_back(d.alpha[i][2]);
      }
      j["diagnostics"] = {{"E_minus", em},         {"E_0", e0},           {"E_plus", ep},
                          {"theta", d.theta},      {"alpha_minus", am},   {"alpha_plus", ap},
                          {"eps_0minus", d.eps_0minus}, {"eps_0plus", d.eps_0plus}, {"p0_ad", d.p0_ad}};
    }
    traces.push_back(std::move(j));
  }
  return {{"spec", to_json(r.spec)}, {"traces", traces}, {"metadata", metadata_json(r.metadata)}};
}

inline std::string render(const ExperimentResult& r, OutputFormat f) {
  return f == OutputFormat::csv ? scan_csv(r) : scan_json(r).dump(2) + "\n";
}

inline std::string render(const TraceResult& r, OutputFormat f) {
  if (f == OutputFormat::json) return trace_json(r).dump(2) + "\n";
  if (r.spec.kind == SweepKind::diagnostics_trace) {
    require(r.traces.size() == 1, "diagnostics CSV holds a single tier; use --format json for several");
    return diagnostics_csv(*r.traces.front().diagnostics);
  }
  return trace_csv(r);
}

template <class Result>
void emit(const Result& r, OutputFormat f, const std::string& path) {
  write_text(path, render(r, f));
}

}  // namespace raman
