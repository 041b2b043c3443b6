// raman: command-line front end for the Raman-transfer simulation library.
//
//   raman dipoles     [--mF v]
//   raman pulses      [pulse flags]
//   raman simulate    [pulse flags] [--tier t]...
//   raman diagnostics [pulse flags] [--tier t] [--convention c]
//   raman sweep       [--config f] [--kind k] [--tier t]...
//
// Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "raman/raman.hpp"

namespace {

using namespace raman;

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct Options {
  std::string config;
  std::string out;
  std::string format = "csv";
  int workers = 0;
  std::string protocol;
  std::vector<std::string> tiers;
  std::string kind;
  int n_pairs = 0;
  double bandwidth_ratio = 0.0;
  double area_error = 0.0;
  double detuning2_mhz = 0.0;
  std::string phase_mode;
  int mF = 1;
  int samples = 0;
  double max_step_ns = 0.0;
  double optical_offset_ghz = 0.0;
  std::string convention;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Flags {
  std::map<std::string, CLI::Option*> opt;
  bool given(const std::string& name) const {
    auto it = opt.find(name);
    return it != opt.end() && it->second->count() > 0;
  }
};

void add_common(CLI::App* app, Options& o, Flags& f) {
  f.opt["config"] = app->add_option("--config", o.config, "JSON sweep spec; flags override its values");
  f.opt["out"] = app->add_option("--out", o.out, "output path (default: stdout)");
  f.opt["format"] = app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  f.opt["workers"] = app->add_option("--workers", o.workers, "worker threads (default: available CPUs)")
                         ->check(CLI::PositiveNumber);
}

void add_point(CLI::App* app, Options& o, Flags& f) {
  f.opt["protocol"] = app->add_option("--protocol", o.protocol, "stirap or jump")
                          ->check(CLI::IsMember({"stirap", "jump"}));
  f.opt["n-pairs"] = app->add_option("--n-pairs", o.n_pairs, "number of pump-Stokes pairs (jump)");
  f.opt["bandwidth-ratio"] = app->add_option("--bandwidth-ratio", o.bandwidth_ratio, "bandwidth / delta1");
  f.opt["area-error"] = app->add_option("--area-error", o.area_error, "effective area error in units of pi (jump)");
  f.opt["detuning2-mhz"] = app->add_option("--detuning2-mhz", o.detuning2_mhz, "two-photon detuning in MHz");
  f.opt["phase-mode"] = app->add_option("--phase-mode", o.phase_mode, "locked or centered")
                            ->check(CLI::IsMember({"locked", "centered"}));
  f.opt["mF"] = app->add_option("--mF", o.mF, "magnetic sublevel (+1 or -1)");
  f.opt["samples"] = app->add_option("--samples", o.samples, "output time samples");
  f.opt["max-step-ns"] = app->add_option("--max-step-ns", o.max_step_ns, "integrator step cap in ns");
  f.opt["optical-offset-ghz"] =
      app->add_option("--optical-offset-ghz", o.optical_offset_ghz, "surrogate optical energy of |1'> in GHz");
}

SweepSpec build_spec(const Options& o, const Flags& f, SweepKind default_kind) {
  SweepSpec s;
  s.kind = default_kind;
  if (f.given("config")) s = sweep_spec_from_string(read_file(o.config));
  if (f.given("kind")) s.kind = parse_sweep_kind(o.kind);
  if (f.given("protocol")) s.protocol = parse_protocol(o.protocol);
  if (f.given("tier")) {
    s.tiers.clear();
    for (const auto& t : o.tiers) s.tiers.push_back(parse_tier_choice(t));
  }
  auto& x = s.fixed;
  if (f.given("n-pairs")) x.n_pairs = o.n_pairs;
  if (f.given("bandwidth-ratio")) x.bandwidth_ratio = o.bandwidth_ratio;
  if (f.given("area-error")) x.area_error_pi = o.area_error;
  if (f.given("detuning2-mhz")) x.detuning2_mhz = o.detuning2_mhz;
  if (f.given("phase-mode")) x.phase_mode = parse_phase_mode(o.phase_mode);
  if (f.given("mF")) x.mF = o.mF;
  if (f.given("samples")) x.samples = o.samples;
  if (f.given("max-step-ns")) x.max_step_ns = o.max_step_ns;
  if (f.given("optical-offset-ghz")) x.optical_offset_ghz = o.optical_offset_ghz;
  if (f.given("convention")) x.convention = parse_convention(o.convention);
  return s;
}

int workers_of(const Options& o) { return o.workers > 0 ? o.workers : default_workers(); }

std::string dipoles_json(const LevelSystem& sys) {
  nlohmann::json j;
  j["labels"] = nlohmann::json::array();
  for (Level l : kAllLevels) j["labels"].push_back(label_of(l));
  j["dipole"] = nlohmann::json::array();
  for (Level a : kAllLevels) {
    std::vector<double> row;
    for (Level b : kAllLevels) row.push_back(sys.mu(a, b));
    j["dipole"].push_back(row);
  }
  return j.dump(2) + "\n";
}

std::string pulses_output(const SweepSpec& s, OutputFormat format) {
  const LevelSystem sys = system_for(s.fixed);
  const PulseTrain train = train_for(s.protocol, s.fixed, sys);
  const auto grid = uniform_grid(train.t_start, train.t_end, static_cast<std::size_t>(s.fixed.samples));
  if (format == OutputFormat::csv) return pulses_csv(train, sys, grid);
  nlohmann::json j;
  std::vector<double> ep, es, op, os;
  for (double t : grid) {
    const auto e = field_at(train, t);
    const auto r = rabi_envelope_at(train, sys, t);
    ep.push_back(e.pump);
    es.push_back(e.stokes);
    op.push_back(r.pump);
    os.push_back(r.stokes);
  }
  j = {{"spec", to_json(s)}, {"t_ns", grid}, {"E_pump", ep}, {"E_stokes", es}, {"Omega_pump", op},
       {"Omega_stokes", os}};
  return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Raman population transfer in 87Rb: dipoles, pulses, dynamics, diagnostics and sweeps"};
  app.require_subcommand(1);
  Options o;

  auto* dip = app.add_subcommand("dipoles", "print the 4x4 dipole matrix");
  dip->add_option("--mF", o.mF, "magnetic sublevel (+1 or -1)");
  dip->add_option("--out", o.out, "output path (default: stdout)");
  dip->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* pul = app.add_subcommand("pulses", "sample a pulse train");
  auto* sim = app.add_subcommand("simulate", "time-resolved populations");
  auto* dia = app.add_subcommand("diagnostics", "adiabatic-frame diagnostics along a run");
  auto* swp = app.add_subcommand("sweep", "parameter scan");

  // Each subcommand gets its own option objects; only one is parsed.
  std::map<CLI::App*, Flags> flags;
  for (auto* sub : {pul, sim, dia, swp}) {
    add_common(sub, o, flags[sub]);
    add_point(sub, o, flags[sub]);
  }
  for (auto* sub : {sim, dia, swp}) {
    flags[sub].opt["tier"] = sub->add_option("--tier", o.tiers, "model tier, e.g. rwa3, rwa4, cross_coupled:3");
  }
  flags[dia].opt["convention"] =
      dia->add_option("--convention", o.convention, "uniform_rate or mixing_angle")
          ->check(CLI::IsMember({"uniform_rate", "mixing_angle"}));
  flags[swp].opt["kind"] = swp->add_option("--kind", o.kind, "bandwidth_scan, robustness_scan or fidelity_map");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    const OutputFormat format = parse_output_format(o.format);
    if (dip->parsed()) {
      const LevelSystem sys = build_rb87_system(HalfInt(o.mF));
      write_text(o.out, format == OutputFormat::csv ? dipole_csv(sys) : dipoles_json(sys));
      return 0;
    }
    if (pul->parsed()) {
      const auto spec = build_spec(o, flags[pul], SweepKind::time_trace);
      write_text(o.out, pulses_output(spec, format));
      return 0;
    }
    if (sim->parsed() || dia->parsed()) {
      CLI::App* sub = sim->parsed() ? sim : dia;
      const auto kind = sim->parsed() ? SweepKind::time_trace : SweepKind::diagnostics_trace;
      auto spec = build_spec(o, flags[sub], kind);
      spec.kind = kind;
      spec.axes.clear();
      const auto result = run_time_trace(spec, workers_of(o));
      emit(result, format, o.out);
      return 0;
    }
    auto spec = build_spec(o, flags[swp], SweepKind::bandwidth_scan);
    if (is_trace_kind(spec.kind)) {
      emit(run_time_trace(spec, workers_of(o)), format, o.out);
      return 0;
    }
    const auto result = run_scan(spec, workers_of(o));
    emit(result, format, o.out);
    int failed = 0;
    for (const auto& r : result.rows) failed += r.ok ? 0 : 1;
    if (failed > 0) {
      std::cerr << "raman: " << failed << " sweep point(s) failed; see the status column\n";
      return kExitNumerical;
    }
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "raman: invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "raman: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "raman: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
