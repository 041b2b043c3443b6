#pragma once

// CSV writers shared by the sweep harness and the command-line tool.

#include <array>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "atomic_structure.hpp"
#include "common.hpp"
#include "diagnostics.hpp"
#include "propagate.hpp"
#include "pulse.hpp"

namespace raman {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 9 significant digits, '.' decimal point regardless of locale.
inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

/// Writes `content` to `path`, or to stdout when path is empty or "-".
inline void write_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw IoError("write to '" + path + "' failed");
}

// ------------------------------------------------------------------- tables

inline std::string dipole_csv(const LevelSystem& sys) {
  std::ostringstream os;
  std::vector<std::string> header{""};
  for (Level l : kAllLevels) header.emplace_back(label_of(l));
  write_csv_row(os, header);
  for (Level a : kAllLevels) {
    std::vector<std::string> row{label_of(a)};
    for (Level b : kAllLevels) row.push_back(format_number(sys.mu(a, b)));
    write_csv_row(os, row);
  }
  return os.str();
}

inline std::string pulses_csv(const PulseTrain& train, const LevelSystem& sys, std::span<const double> grid) {
  std::ostringstream os;
  write_csv_row(os, {"t_ns", "E_pump", "E_stokes", "Omega_pump", "Omega_stokes"});
  for (double t : grid) {
    const auto e = field_at(train, t);
    const auto om = rabi_envelope_at(train, sys, t);
    write_csv_row(os, {format_number(t), format_number(e.pump), format_number(e.stokes), format_number(om.pump),
                       format_number(om.stokes)});
  }
  return os.str();
}

/// Populations and amplitudes of all four levels; zero for levels a tier drops.
inline void trace_csv_header(std::ostream& os, bool with_tier) {
  std::vector<std::string> h;
  if (with_tier) h.emplace_back("tier");
  h.emplace_back("t_ns");
  for (Level l : kAllLevels) h.push_back(std::string("P") + label_of(l));
  for (Level l : kAllLevels) {
    h.push_back(std::string("re_") + label_of(l));
    h.push_back(std::string("im_") + label_of(l));
  }
  write_csv_row(os, h);
}

inline void trace_csv_rows(std::ostream& os, const PropagationResult& r, const std::string& tier = {}) {
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    std::vector<std::string> row;
    if (!tier.empty()) row.push_back(tier);
    row.push_back(format_number(r.times[i]));
    std::array<cplx, 4> amp{};
    for (std::size_t b = 0; b < r.basis.size(); ++b) {
      amp[static_cast<std::size_t>(index_of(r.basis[b]))] = r.states[i](static_cast<int>(b));
    }
    for (const auto& a : amp) row.push_back(format_number(std::norm(a)));
    for (const auto& a : amp) {
      row.push_back(format_number(a.real()));
      row.push_back(format_number(a.imag()));
    }
    write_csv_row(os, row);
  }
}

inline std::string diagnostics_csv(const DiagnosticsTrace& d) {
  std::ostringstream os;
  write_csv_row(os, {"t_ns", "E_minus", "E_0", "E_plus", "theta", "alpha_minus", "alpha_plus", "eps_0minus",
                     "eps_0plus", "p0_ad"});
  for (std::size_t i = 0; i < d.times.size(); ++i) {
    write_csv_row(os, {format_number(d.times[i]), format_number(d.energies[i][0]), format_number(d.energies[i][1]),
                       format_number(d.energies[i][2]), format_number(d.theta[i]), format_number(d.alpha[i][0]),
                       format_number(d.alpha[i][2]), format_number(d.eps_0minus[i]), format_number(d.eps_0plus[i]),
                       d.p0_ad.empty() ? std::string() : format_number(d.p0_ad[i])});
  }
  return os.str();
}

}  // namespace raman
