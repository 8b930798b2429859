#pragma once

#include <algorithm>
#include <optional>

#include "crn/conservation.hpp"
#include "crn/entropy.hpp"

namespace crn {

enum class EquilibriumKind { detailed_balance, complex_balance, plain_equilibrium };

inline const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::detailed_balance: return "detailed_balance";
    case EquilibriumKind::complex_balance: return "complex_balance";
    default: return "plain_equilibrium";
  }
}

struct EquilibriumPoint {
  Vector c;                  // the state c_inf
  EquilibriumKind kind = EquilibriumKind::plain_equilibrium;
  bool boundary = false;     // some component at zero (within threshold)
  Vector residuals;          // per-complex balance residual at c
};

struct SolveOpts {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_iterations = 200;
  double zero_threshold = 1e-9;  // relative to the mass scale
};

/// Per-complex balance residual: total outflow minus total inflow,
/// sum_{r: y_r = y} k_r c^{y_r} - sum_{s: y_s' = y} k_s c^{y_s},
/// one entry per distinct complex in first-occurrence order.
inline Vector complex_balance_residual(const Network& net, const Vector& c) {
  const auto complexes = distinct_complexes(net);
  Vector res = Vector::Zero(static_cast<Eigen::Index>(complexes.size()));
  for (const auto& rx : net.reactions) {
    const double flux = rx.rate * monomial(c, rx.source.coeffs);
    for (size_t k = 0; k < complexes.size(); ++k) {
      if (complexes[k] == rx.source) res[static_cast<Eigen::Index>(k)] += flux;
      if (complexes[k] == rx.target) res[static_cast<Eigen::Index>(k)] -= flux;
    }
  }
  return res;
}

/// True iff reactions pair into forward/backward partners with
/// k_f c^y = k_b c^{y'} at the equilibrium state, within tolerance.
inline bool classify_detailed_balance(const Network& net, const EquilibriumPoint& eq,
                                      double tol = 1e-9) {
  for (const auto& rx : net.reactions) {
    const Reaction* reverse = nullptr;
    for (const auto& other : net.reactions)
      if (other.source == rx.target && other.target == rx.source) {
        reverse = &other;
        break;
      }
    if (!reverse) return false;
    const double fwd = rx.rate * monomial(eq.c, rx.source.coeffs);
    const double bwd = reverse->rate * monomial(eq.c, rx.target.coeffs);
    if (std::abs(fwd - bwd) > tol * (1.0 + std::abs(fwd) + std::abs(bwd))) return false;
  }
  return true;
}

namespace detail {

inline double monomial_scale(const Network& net, const Vector& c) {
  double s = 0.0;
  for (const auto& rx : net.reactions) {
    s = std::max(s, std::abs(rx.rate * monomial(c, rx.source.coeffs)));
    s = std::max(s, std::abs(monomial(c, rx.target.coeffs)));
  }
  return s;
}

inline EquilibriumPoint classify_point(const Network& net, const Vector& c, double mass_scale,
                                       const SolveOpts& opts) {
  EquilibriumPoint eq;
  eq.c = c;
  eq.residuals = complex_balance_residual(net, c);
  const double res_tol = opts.abs_tol + 100.0 * opts.rel_tol * (1.0 + monomial_scale(net, c));
  const bool complex_balanced =
      eq.residuals.size() == 0 || eq.residuals.cwiseAbs().maxCoeff() <= res_tol;
  if (complex_balanced)
    eq.kind = classify_detailed_balance(net, eq) ? EquilibriumKind::detailed_balance
                                                 : EquilibriumKind::complex_balance;
  else
    eq.kind = EquilibriumKind::plain_equilibrium;
  eq.boundary = c.minCoeff() <= opts.zero_threshold * (1.0 + mass_scale);
  return eq;
}

// Damped Gauss-Newton on u = log c for the stacked residual
// [complex balance residuals; Q c - M], restricted to the species in `active`
// (the others are pinned at zero). Returns the state on success.
inline std::optional<Vector> newton_log_solve(const Network& net, const ConservationBasis& basis,
                                              const Vector& M, const std::vector<int>& active,
                                              const Vector& c_init, const SolveOpts& opts,
                                              double* final_residual = nullptr) {
  const int n = net.species_count();
  const int na = static_cast<int>(active.size());
  const auto complexes = distinct_complexes(net);
  const int nc = static_cast<int>(complexes.size());
  const int m = basis.m();

  Vector u(na);
  for (int a = 0; a < na; ++a) u[a] = std::log(std::max(c_init[active[a]], 1e-8));

  auto expand = [&](const Vector& ua) {
    Vector c = Vector::Zero(n);
    for (int a = 0; a < na; ++a) c[active[a]] = std::exp(ua[a]);
    return c;
  };
  auto residual = [&](const Vector& c) {
    Vector F(nc + m);
    F.head(nc) = complex_balance_residual(net, c);
    if (m > 0) F.tail(m) = basis.Q * c - M;
    return F;
  };

  const double scale = m > 0 ? 1.0 + M.cwiseAbs().maxCoeff() : 1.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Vector c = expand(u);
    const Vector F = residual(c);
    // Polish down to the absolute tolerance; a stall above it still counts as
    // converged within the relative tolerance (see below).
    const double tight = opts.abs_tol * (1.0 + scale + monomial_scale(net, c));
    const double loose = opts.rel_tol * (1.0 + scale + monomial_scale(net, c));
    if (F.cwiseAbs().maxCoeff() <= tight) {
      if (final_residual) *final_residual = F.cwiseAbs().maxCoeff();
      return c;
    }

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nc + m, na);
    for (const auto& rx : net.reactions) {
      const double flux = rx.rate * monomial(c, rx.source.coeffs);
      int src_k = -1, dst_k = -1;
      for (int k = 0; k < nc; ++k) {
        if (complexes[static_cast<size_t>(k)] == rx.source) src_k = k;
        if (complexes[static_cast<size_t>(k)] == rx.target) dst_k = k;
      }
      for (int a = 0; a < na; ++a) {
        const double dflux = flux * rx.source.coeffs[active[a]];
        if (dflux == 0.0) continue;
        J(src_k, a) += dflux;
        J(dst_k, a) -= dflux;
      }
    }
    for (int i = 0; i < m; ++i)
      for (int a = 0; a < na; ++a) J(nc + i, a) = basis.Q(i, active[a]) * c[active[a]];

    Vector step = J.colPivHouseholderQr().solve(-F);
    if (!step.allFinite()) return std::nullopt;
    const double cap = 5.0;
    const double mag = step.cwiseAbs().maxCoeff();
    if (mag > cap) step *= cap / mag;

    const double phi0 = 0.5 * F.squaredNorm();
    double s = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls, s *= 0.5) {
      const Vector Ftry = residual(expand(u + s * step));
      if (!Ftry.allFinite()) continue;
      if (0.5 * Ftry.squaredNorm() < phi0 * (1.0 - 1e-4 * s)) {
        u += s * step;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Stalled at floating-point resolution: success if already within the
      // relative tolerance, otherwise the residual cannot vanish here.
      if (final_residual) *final_residual = F.cwiseAbs().maxCoeff();
      if (F.cwiseAbs().maxCoeff() <= loose) return c;
      return std::nullopt;
    }
  }
  if (final_residual) *final_residual = residual(expand(u)).cwiseAbs().maxCoeff();
  return std::nullopt;
}

}  // namespace detail

/// The strictly positive complex balance equilibrium for mass vector M, by
/// damped Newton on log-concentrations (positivity is structural). Throws
/// NotComplexBalanced when the stacked residual cannot be driven to zero and
/// NonConvergence when the iteration fails outright.
inline EquilibriumPoint solve_positive_equilibrium(const Network& net,
                                                   const ConservationBasis& basis,
                                                   const Vector& M,
                                                   const SolveOpts& opts = {}) {
  const int n = net.species_count();
  const int m = basis.m();
  if (M.size() != m) throw DimensionError("mass vector length does not match basis");
  for (int i = 0; i < m; ++i)
    if (!(M[i] > 0.0)) throw DomainError("mass vector must be strictly positive");

  // Uniform mass distribution as the initial guess: the minimum-norm solution
  // of Q c = M, floored away from zero.
  const double mass_scale = m > 0 ? M.cwiseAbs().sum() : 1.0;
  Vector c_init = Vector::Constant(n, std::max(mass_scale / n, 1e-3));
  if (m > 0) {
    Vector least_norm =
        basis.Q.transpose() * (basis.Q * basis.Q.transpose()).ldlt().solve(M);
    for (int i = 0; i < n; ++i)
      if (least_norm[i] > 1e-6 * mass_scale) c_init[i] = least_norm[i];
  }

  std::vector<int> active(n);
  for (int i = 0; i < n; ++i) active[i] = i;
  double final_res = std::numeric_limits<double>::quiet_NaN();
  auto c = detail::newton_log_solve(net, basis, M, active, c_init, opts, &final_res);
  if (!c) {
    if (std::isfinite(final_res))
      throw NotComplexBalanced("complex balance residuals cannot be driven to zero (residual " +
                               std::to_string(final_res) + ")");
    throw NonConvergence("positive equilibrium solve failed");
  }
  return detail::classify_point(net, *c, mass_scale, opts);
}

/// Closed-form positive equilibrium of the A -> B+C -> 2B -> A system:
/// a = (k3/k1) b^2, c = (k3/k2) b, with b the positive root of the mass
/// constraint 2a + b + c = M.
inline Eigen::Vector3d equilibrium_3x3(double k1, double k2, double k3, double M) {
  const double A = 2.0 * k3 / k1;
  const double B = 1.0 + k3 / k2;
  const double b = (-B + std::sqrt(B * B + 4.0 * A * M)) / (2.0 * A);
  return {k3 / k1 * b * b, b, k3 / k2 * b};
}

struct CyclicEquilibrium {
  EquilibriumPoint point;
  Network network;  // the cycle the point belongs to
};

/// Unique positive equilibrium of the cycle alpha_1 A_1 -> ... -> alpha_1 A_1,
/// solving k_1 a_1^{alpha_1} = ... = k_N a_N^{alpha_N} together with the mass
/// law sum a_i/alpha_i = M. The scalar equation f(a_1) = M has a strictly
/// increasing f with f(0) = 0, so bisection on an expanding bracket converges.
inline CyclicEquilibrium solve_cyclic_equilibrium(const std::vector<int>& alphas,
                                                  const std::vector<double>& ks, double mass,
                                                  const SolveOpts& opts = {}) {
  const int n = static_cast<int>(alphas.size());
  if (!(mass > 0.0)) throw DomainError("mass must be strictly positive");
  for (double k : ks)
    if (!(k > 0.0)) throw DomainError("rates must be strictly positive");

  auto back_substitute = [&](double a1) {
    Vector a(n);
    a[0] = a1;
    const double lead = ks[0] * std::pow(a1, alphas[0]);
    for (int i = 1; i < n; ++i) a[i] = std::pow(lead / ks[i], 1.0 / alphas[i]);
    return a;
  };
  auto f = [&](double a1) {
    const Vector a = back_substitute(a1);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] / alphas[i];
    return s;
  };

  if (f(0.0) != 0.0) throw NonConvergence("cyclic mass function must vanish at zero");
  double lo = 0.0, hi = 1.0, f_hi = f(hi);
  for (int it = 0; f_hi < mass; ++it) {
    if (it > 200) throw NonConvergence("bracketing the cyclic equilibrium failed");
    lo = hi;
    hi *= 2.0;
    const double next = f(hi);
    if (!(next > f_hi)) throw NonConvergence("cyclic mass function is not increasing");
    f_hi = next;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < mass ? lo : hi) = mid;
  }
  double root = 0.5 * (lo + hi);
  // Newton polish; f' > 0 on (0, inf).
  for (int it = 0; it < 8; ++it) {
    const double h = 1e-7 * (1.0 + root);
    const double deriv = (f(root + h) - f(root - h)) / (2.0 * h);
    if (!(deriv > 0.0)) break;
    const double next = root - (f(root) - mass) / deriv;
    if (!(next > 0.0)) break;
    root = next;
  }

  CyclicEquilibrium out{.point = {}, .network = make_cycle(alphas, ks)};
  out.point = detail::classify_point(out.network, back_substitute(root), mass, opts);
  return out;
}

/// All boundary equilibria for mass vector M: enumerate the proper supports,
/// solve the complex balance + mass system restricted to each support and keep
/// the states whose full residual vanishes. Exponential in N, hence the cap.
inline std::vector<EquilibriumPoint> boundary_equilibria(const Network& net,
                                                         const ConservationBasis& basis,
                                                         const Vector& M,
                                                         const SolveOpts& opts = {},
                                                         int support_cap = 12) {
  const int n = net.species_count();
  if (n > support_cap)
    throw SupportEnumerationTooLarge("support enumeration over " + std::to_string(n) +
                                     " species exceeds the cap of " + std::to_string(support_cap));
  const int m = basis.m();
  if (M.size() != m) throw DimensionError("mass vector length does not match basis");
  const double mass_scale = m > 0 ? M.cwiseAbs().sum() : 1.0;
  const double mass_tol = opts.abs_tol + opts.rel_tol * (1.0 + mass_scale);
  const double zt = opts.zero_threshold * (1.0 + mass_scale);

  std::vector<EquilibriumPoint> found;
  for (unsigned mask = 0; mask + 1 < (1u << n); ++mask) {
    std::vector<int> active;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) active.push_back(i);

    Vector c;
    if (active.empty()) {
      c = Vector::Zero(n);
      if (m > 0 && (basis.Q * c - M).cwiseAbs().maxCoeff() > mass_tol) continue;
    } else {
      Vector c_init = Vector::Constant(n, std::max(mass_scale / n, 1e-3));
      auto solved = detail::newton_log_solve(net, basis, M, active, c_init, opts);
      if (!solved) continue;
      c = *solved;
      bool interior_on_support = true;
      for (int i : active)
        if (c[i] <= zt) interior_on_support = false;
      if (!interior_on_support) continue;  // collapses onto a smaller support
    }

    const double res_tol = opts.abs_tol + 100.0 * opts.rel_tol * (1.0 + detail::monomial_scale(net, c));
    const Vector res = complex_balance_residual(net, c);
    if (res.size() > 0 && res.cwiseAbs().maxCoeff() > res_tol) continue;
    if (m > 0 && (basis.Q * c - M).cwiseAbs().maxCoeff() > mass_tol) continue;

    EquilibriumPoint eq = detail::classify_point(net, c, mass_scale, opts);
    if (!eq.boundary) continue;
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const EquilibriumPoint& p) {
      return (p.c - eq.c).cwiseAbs().maxCoeff() <= 10.0 * zt;
    });
    if (!duplicate) found.push_back(std::move(eq));
  }
  std::sort(found.begin(), found.end(), [](const EquilibriumPoint& a, const EquilibriumPoint& b) {
    return std::lexicographical_compare(a.c.data(), a.c.data() + a.c.size(), b.c.data(),
                                        b.c.data() + b.c.size());
  });
  return found;
}

}  // namespace crn
