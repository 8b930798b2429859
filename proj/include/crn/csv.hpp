#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include "crn/ode.hpp"
#include "crn/pde.hpp"

namespace crn {

/// 17 significant digits: enough to round-trip any double exactly.
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// `t,E,D,mass_residual,c_1,...,c_N`, LF line endings. The dissipation column
/// carries the sum-of-Psi form; the log form is omitted on boundary states.
inline std::string ode_trace_csv(const OdeTrace& trace) {
  std::string out = "t,E,D,mass_residual";
  const Eigen::Index n = trace.states.empty() ? 0 : trace.states.front().size();
  for (Eigen::Index i = 0; i < n; ++i) out += ",c_" + std::to_string(i + 1);
  out += "\n";
  for (size_t k = 0; k < trace.size(); ++k) {
    out += g17(trace.times[k]) + "," + g17(trace.E[k]) + "," + g17(trace.D_formula[k]) + "," +
           g17(trace.mass_residual[k]);
    for (Eigen::Index i = 0; i < n; ++i) out += "," + g17(trace.states[k][i]);
    out += "\n";
  }
  return out;
}

/// ODE columns plus per-species min/max over the grid.
inline std::string pde_trace_csv(const PdeTrace& trace) {
  std::string out = "t,E,D,mass_residual";
  const Eigen::Index n = trace.means.empty() ? 0 : trace.means.front().size();
  for (Eigen::Index i = 0; i < n; ++i) out += ",c_" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < n; ++i) out += ",min_" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < n; ++i) out += ",max_" + std::to_string(i + 1);
  out += "\n";
  for (size_t k = 0; k < trace.size(); ++k) {
    out += g17(trace.times[k]) + "," + g17(trace.E[k]) + "," + g17(trace.D[k]) + "," +
           g17(trace.mass_residual[k]);
    for (Eigen::Index i = 0; i < n; ++i) out += "," + g17(trace.means[k][i]);
    for (Eigen::Index i = 0; i < n; ++i) out += "," + g17(trace.min_values[k][i]);
    for (Eigen::Index i = 0; i < n; ++i) out += "," + g17(trace.max_values[k][i]);
    out += "\n";
  }
  return out;
}

/// Full-field snapshot: `x,c_1..c_N` per cell.
inline std::string snapshot_csv(const Grid1D& reference, const Eigen::MatrixXd& fields) {
  std::string out = "x";
  for (Eigen::Index i = 0; i < fields.cols(); ++i) out += ",c_" + std::to_string(i + 1);
  out += "\n";
  const double h = (reference.x_hi - reference.x_lo) / static_cast<double>(fields.rows());
  for (Eigen::Index j = 0; j < fields.rows(); ++j) {
    out += g17(reference.x_lo + (j + 0.5) * h);
    for (Eigen::Index i = 0; i < fields.cols(); ++i) out += "," + g17(fields(j, i));
    out += "\n";
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace crn
