#pragma once

#include "crn/network.hpp"

namespace crn {

/// Uniform finite-volume grid on an interval. fields(j, i) is the cell-average
/// concentration of species i in cell j; homogeneous Neumann boundaries are
/// realized as zero-flux faces at both ends.
struct Grid1D {
  double x_lo = 0.0;
  double x_hi = 1.0;
  Eigen::MatrixXd fields;  // J x N

  int cells() const { return static_cast<int>(fields.rows()); }
  int species() const { return static_cast<int>(fields.cols()); }
  double h() const { return (x_hi - x_lo) / cells(); }
  double cell_center(int j) const { return x_lo + (j + 0.5) * h(); }

  /// Spatial average of each species (integral / |Omega|).
  Vector means() const { return fields.colwise().mean().transpose(); }

  /// Per-species integral over the domain, h * sum over cells.
  Vector integrals() const { return fields.colwise().sum().transpose() * h(); }
};

/// Grid with every species initialized from a profile f(x, species).
template <typename F>
Grid1D make_grid(int cells, F&& profile, int n_species, double x_lo = 0.0, double x_hi = 1.0) {
  if (cells < 2) throw DomainError("grid needs at least two cells");
  Grid1D g;
  g.x_lo = x_lo;
  g.x_hi = x_hi;
  g.fields = Eigen::MatrixXd::Zero(cells, n_species);
  for (int j = 0; j < cells; ++j)
    for (int i = 0; i < n_species; ++i) g.fields(j, i) = profile(g.cell_center(j), i);
  return g;
}

inline Grid1D make_constant_grid(int cells, const Vector& value, double x_lo = 0.0,
                                 double x_hi = 1.0) {
  return make_grid(
      cells, [&](double, int i) { return value[i]; }, static_cast<int>(value.size()), x_lo, x_hi);
}

}  // namespace crn
