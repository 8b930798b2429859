#pragma once

#include <limits>
#include <optional>

#include "crn/grid.hpp"
#include "crn/network.hpp"

namespace crn {

/// Psi(x; y) = x log(x/y) - x + y, the building block of the relative entropy.
/// Nonnegative, zero iff x = y, and Psi(x,y) >= (sqrt x - sqrt y)^2.
/// Psi(0; y) := y by continuity.
inline double psi(double x, double y) {
  if (x < 0.0 || !(y > 0.0)) throw DomainError("psi requires x >= 0 and y > 0");
  if (x == 0.0) return y;
  // The log1p form sidesteps the cancellation of x log(x/y) - x + y near
  // x = y, where the quotient x/y rounds away the fine difference; the clip
  // removes the remaining sub-ulp rounding noise so Psi stays nonnegative.
  const double s = (x - y) / y;
  return std::max(0.0, x * std::log1p(s) + (y - x));
}

namespace detail {

// Continuity extension used on boundary states: Psi(0; 0) = 0 and
// Psi(x>0; 0) = +inf (the entropy slope genuinely diverges there).
inline double psi_extended(double x, double y) {
  if (y == 0.0) return x == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return psi(x, y);
}

}  // namespace detail

/// E(c | c_inf) = sum_i Psi(c_i; c_{i,inf}).
inline double relative_entropy(const Vector& c, const Vector& c_inf) {
  if (c.size() != c_inf.size()) throw DimensionError("state length mismatch");
  double e = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (!(c_inf[i] > 0.0)) throw DomainError("relative entropy requires c_inf > 0");
    e += psi(c[i], c_inf[i]);
  }
  return e;
}

/// Entropy dissipation of a state evaluated both ways: the sum-of-Psi form of
/// the explicit dissipation and the defining form -R(c) . log(c/c_inf). The two
/// agree exactly when c_inf is complex balanced; identity_gap certifies the
/// telescoping cancellation numerically.
struct EntropyReport {
  double E = 0.0;
  double D_formula = 0.0;
  double D_logform = 0.0;
  double identity_gap = 0.0;
};

/// D_formula = sum_r k_r c_inf^{y_r} Psi(c^{y_r}/c_inf^{y_r}; c^{y_r'}/c_inf^{y_r'}).
/// Extends by continuity to nonnegative states; +inf where the entropy slope is
/// genuinely infinite (some source monomial positive while its target vanishes).
inline double dissipation_formula(const Network& net, const Vector& c, const Vector& c_inf) {
  double d = 0.0;
  for (const auto& rx : net.reactions) {
    const double minf_src = monomial(c_inf, rx.source.coeffs);
    const double minf_dst = monomial(c_inf, rx.target.coeffs);
    d += rx.rate * minf_src *
         detail::psi_extended(monomial(c, rx.source.coeffs) / minf_src,
                              monomial(c, rx.target.coeffs) / minf_dst);
  }
  return d;
}

/// Both dissipation routes at a strictly positive state (the log form needs
/// log(c/c_inf)), plus the relative entropy and the identity gap.
inline EntropyReport dissipation_ode(const Network& net, const Vector& c, const Vector& c_inf) {
  if (c.size() != net.species_count() || c_inf.size() != net.species_count())
    throw DimensionError("state length does not match network");
  EntropyReport rep;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (!(c[i] > 0.0)) throw DomainError("dissipation_ode requires a strictly positive state");
    if (!(c_inf[i] > 0.0)) throw DomainError("dissipation_ode requires c_inf > 0");
  }
  rep.E = relative_entropy(c, c_inf);
  rep.D_formula = dissipation_formula(net, c, c_inf);
  const Vector R = reaction_vector(net, c);
  double dlog = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) dlog -= R[i] * std::log(c[i] / c_inf[i]);
  rep.D_logform = dlog;
  rep.identity_gap = std::abs(rep.D_formula - rep.D_logform);
  return rep;
}

/// Discrete Fisher information h * sum_faces ((c_{j+1}-c_j)/h)^2 / c_face with
/// harmonic-mean face values; the zero-flux boundary contributes nothing.
/// Vanishing neighbours with equal values contribute zero; a jump onto a zero
/// cell costs +inf, matching the divergence of the continuous integral.
inline double discrete_fisher(const Eigen::Ref<const Eigen::VectorXd>& c, double h) {
  double f = 0.0;
  for (Eigen::Index j = 0; j + 1 < c.size(); ++j) {
    const double dc = c[j + 1] - c[j];
    if (dc == 0.0) continue;
    const double denom = c[j] + c[j + 1];
    const double cf = denom > 0.0 ? 2.0 * c[j] * c[j + 1] / denom : 0.0;
    if (cf <= 0.0) return std::numeric_limits<double>::infinity();
    f += dc * dc / (h * cf);
  }
  return f;
}

/// PDE entropy functional, midpoint-rule quadrature of sum_i Psi(c_i; c_ref_i).
inline double pde_entropy(const Grid1D& grid, const Vector& c_ref) {
  if (grid.species() != c_ref.size()) throw DimensionError("reference state length mismatch");
  double e = 0.0;
  for (int j = 0; j < grid.cells(); ++j)
    for (int i = 0; i < grid.species(); ++i) {
      if (!(c_ref[i] > 0.0)) throw DomainError("pde_entropy requires a positive reference state");
      e += psi(grid.fields(j, i), c_ref[i]);
    }
  return e * grid.h();
}

/// PDE entropy dissipation: Fisher term per species plus the midpoint-rule
/// quadrature of the reaction Psi terms.
inline double pde_dissipation(const Network& net, const Grid1D& grid, const Vector& c_inf) {
  if (grid.species() != net.species_count()) throw DimensionError("grid/network mismatch");
  double d = 0.0;
  for (int i = 0; i < grid.species(); ++i)
    d += net.diffusion[i] * discrete_fisher(grid.fields.col(i), grid.h());
  for (int j = 0; j < grid.cells(); ++j)
    d += grid.h() * dissipation_formula(net, grid.fields.row(j).transpose(), c_inf);
  return d;
}

/// Csiszar-Kullback-Pinsker diagnostic: E(c|c_inf) / (sum_i |c_i - c_{i,inf}|)^2
/// for states. Lower bounds of this type hold, but no constant is asserted here.
inline double ckp_diagnostic(const Vector& c, const Vector& c_inf) {
  const double gap = (c - c_inf).cwiseAbs().sum();
  if (gap == 0.0) throw DomainError("ckp_diagnostic undefined at c = c_inf");
  return relative_entropy(c, c_inf) / (gap * gap);
}

/// Field version: the L1 distances are integrals over the domain.
inline double ckp_diagnostic(const Grid1D& grid, const Vector& c_inf) {
  double gap = 0.0;
  for (int i = 0; i < grid.species(); ++i)
    gap += (grid.fields.col(i).array() - c_inf[i]).abs().sum() * grid.h();
  if (gap == 0.0) throw DomainError("ckp_diagnostic undefined at c = c_inf");
  return pde_entropy(grid, c_inf) / (gap * gap);
}

}  // namespace crn
