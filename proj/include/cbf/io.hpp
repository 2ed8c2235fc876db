#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "cbf/solver.hpp"

namespace cbf {

/// Fixed leading columns of the diagnostics table.
inline const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> cols{"t",         "energy",          "v_seminorm_sq",   "v_norm_sq",
                                             "lr1_norm",  "forcing_power",   "energy_residual", "int_dissipation",
                                             "int_damping", "int_forcing"};
  return cols;
}

/// Columns appended in extended mode.
inline const std::vector<std::string>& extended_columns() {
  static const std::vector<std::string> cols{"a_norm_sq",    "weighted_grad",        "int_a_norm_sq",
                                             "int_weighted_grad", "int_darcy",       "int_forcing_vdual_sq",
                                             "int_forcing_h_sq", "abs_residual",     "max_velocity",
                                             "divergence_ratio"};
  return cols;
}

inline std::string diagnostics_header(bool extended) {
  std::string h;
  for (const auto& c : diagnostics_columns()) h += (h.empty() ? "" : "\t") + c;
  if (extended)
    for (const auto& c : extended_columns()) h += "\t" + c;
  return h;
}

inline std::string diagnostics_row(const DiagnosticsSample& s, bool extended) {
  std::string row;
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (!row.empty()) row += '\t';
    row += buf;
  };
  for (double v : {s.t, s.energy, s.v_seminorm_sq, s.v_norm_sq, s.lr1_norm, s.forcing_power, s.energy_residual,
                   s.int_dissipation, s.int_damping, s.int_forcing})
    put(v);
  if (extended)
    for (double v : {s.a_norm_sq, s.weighted_grad, s.int_a_norm_sq, s.int_weighted_grad, s.int_darcy,
                     s.int_forcing_vdual_sq, s.int_forcing_h_sq, s.abs_residual, s.max_velocity, s.divergence_ratio})
      put(v);
  return row;
}

/// Tab-separated table with a header line; one row per sample.
inline void write_diagnostics(const std::vector<DiagnosticsSample>& samples, const std::string& path,
                              bool extended = false) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("write_diagnostics: cannot open " + path);
  out << diagnostics_header(extended) << '\n';
  for (const auto& s : samples) out << diagnostics_row(s, extended) << '\n';
  if (!out) throw IoError("write_diagnostics: write failed for " + path);
}

inline void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace cbf
