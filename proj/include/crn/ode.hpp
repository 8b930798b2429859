#pragma once

#include <array>
#include <optional>

#include "crn/entropy.hpp"
#include "crn/equilibria.hpp"

namespace crn {

/// Analytic Jacobian of the mass-action reaction vector.
inline Eigen::MatrixXd reaction_jacobian(const Network& net, const Vector& c) {
  const int n = net.species_count();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (const auto& rx : net.reactions) {
    for (int j = 0; j < n; ++j) {
      const int yj = rx.source.coeffs[j];
      if (yj == 0) continue;
      double dmon = yj * rx.rate;
      for (int i = 0; i < n; ++i)
        for (int e = 0; e < rx.source.coeffs[i] - (i == j ? 1 : 0); ++e) dmon *= c[i];
      for (int i = 0; i < n; ++i) {
        const int d = rx.target.coeffs[i] - rx.source.coeffs[i];
        if (d != 0) J(i, j) += dmon * d;
      }
    }
  }
  return J;
}

struct OdeOpts {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double max_dt = 1.0;
  double initial_dt = 1e-4;
  double fixed_dt = 0.0;  // > 0 disables adaptivity and steps with this size
  long max_steps = 5'000'000;
  std::optional<Vector> equilibrium;  // reference state for E/D; solved from mass when absent
};

/// Trajectory of dc/dt = R(c) with per-accepted-step diagnostics. D_logform is
/// NaN on samples where some component is zero (the log form needs positivity);
/// D_formula extends by continuity.
struct OdeTrace {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> E;
  std::vector<double> D_formula;
  std::vector<double> D_logform;
  std::vector<double> mass_residual;  // |Q c(t) - M|_inf
  Vector c_inf;
  Vector mass;

  size_t size() const { return times.size(); }
};

/// Adaptive Dormand-Prince 5(4). A step whose result dips below -abs_tol in any
/// component is rejected and halved; components within [-abs_tol, 0) are
/// clamped to zero, preserving the nonnegativity contract.
inline OdeTrace integrate_ode(const Network& net, const Vector& c0, double t_end,
                              const OdeOpts& opts = {}) {
  if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
  if (c0.minCoeff() < 0.0) throw DomainError("initial state must be nonnegative");

  const auto basis = conservation_basis(net);
  const Vector M = mass_vector(basis, c0);

  OdeTrace trace;
  trace.mass = M;
  if (opts.equilibrium)
    trace.c_inf = *opts.equilibrium;
  else
    trace.c_inf = solve_positive_equilibrium(net, basis, M).c;

  // Dormand-Prince coefficients.
  static const double A[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double B5[7] = {35.0 / 384,     0.0,        500.0 / 1113, 125.0 / 192,
                               -2187.0 / 6784, 11.0 / 84,  0.0};
  static const double B4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                               -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

  auto record = [&](double t, const Vector& c) {
    trace.times.push_back(t);
    trace.states.push_back(c);
    trace.E.push_back(relative_entropy(c, trace.c_inf));
    trace.D_formula.push_back(dissipation_formula(net, c, trace.c_inf));
    if (c.minCoeff() > 0.0) {
      const Vector R = reaction_vector(net, c);
      double dlog = 0.0;
      for (Eigen::Index i = 0; i < c.size(); ++i) dlog -= R[i] * std::log(c[i] / trace.c_inf[i]);
      trace.D_logform.push_back(dlog);
    } else {
      trace.D_logform.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    trace.mass_residual.push_back(basis.m() > 0 ? (basis.Q * c - M).cwiseAbs().maxCoeff() : 0.0);
  };

  Vector c = c0;
  double t = 0.0;
  const double t_eps = 1e-12 * (1.0 + t_end);
  const bool fixed = opts.fixed_dt > 0.0;
  double dt = fixed ? opts.fixed_dt : std::min(opts.initial_dt, t_end);
  record(t, c);

  std::array<Vector, 7> k;
  for (long step = 0; step < opts.max_steps && t < t_end - t_eps; ++step) {
    dt = std::min(dt, t_end - t);
    if (dt < 1e-14 * (1.0 + t)) throw StepSizeUnderflow("step size underflow at t=" + std::to_string(t));

    k[0] = reaction_vector(net, c);
    for (int s = 1; s < 7; ++s) {
      Vector y = c;
      for (int j = 0; j < s; ++j)
        if (A[s][j] != 0.0) y += dt * A[s][j] * k[j];
      k[s] = reaction_vector(net, y);
    }
    Vector c5 = c, err = Vector::Zero(c.size());
    for (int s = 0; s < 7; ++s) {
      if (B5[s] != 0.0) c5 += dt * B5[s] * k[s];
      err += dt * (B5[s] - B4[s]) * k[s];
    }
    if (!c5.allFinite()) throw NonFiniteState("non-finite state at t=" + std::to_string(t));

    double err_norm = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i)
      err_norm = std::max(err_norm, std::abs(err[i]) / (opts.abs_tol +
                                                        opts.rel_tol * std::max(std::abs(c[i]),
                                                                                std::abs(c5[i]))));
    if (!fixed) {
      if (err_norm > 1.0) {
        dt *= std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
        continue;
      }
      if (c5.minCoeff() < -opts.abs_tol) {
        dt *= 0.5;
        continue;
      }
    }
    c5 = c5.cwiseMax(0.0);
    t += dt;
    c = c5;
    record(t, c);
    dt = fixed ? opts.fixed_dt
               : std::min(opts.max_dt, dt * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(
                                                                             err_norm, 1e-10),
                                                                         -0.2))));
  }
  if (t < t_end - t_eps) throw NonConvergence("step budget exhausted before t_end");
  return trace;
}

struct DecayFit {
  double lambda = 0.0;
  double r_squared = 0.0;
  int samples = 0;
};

/// Least-squares slope of log E versus t on [t_start, t_end]; the window is
/// truncated at the first sample with E < 1e-14 (underflow of the relative
/// entropy in double precision).
inline DecayFit fit_decay_rate(const OdeTrace& trace, double t_start) {
  std::vector<double> ts, ys;
  for (size_t i = 0; i < trace.size(); ++i) {
    if (trace.times[i] < t_start) continue;
    if (!(trace.E[i] > 1e-14)) break;
    ts.push_back(trace.times[i]);
    ys.push_back(std::log(trace.E[i]));
  }
  if (ts.size() < 10) throw DomainError("fit window too short (need at least 10 samples)");
  const double n = static_cast<double>(ts.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sy += ys[i];
    stt += ts[i] * ts[i];
    sty += ts[i] * ys[i];
  }
  const double denom = n * stt - st * st;
  if (denom == 0.0) throw DomainError("degenerate fit window");
  const double slope = (n * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (size_t i = 0; i < ts.size(); ++i) {
    const double fit = intercept + slope * ts[i];
    ss_res += (ys[i] - fit) * (ys[i] - fit);
    ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  DecayFit out;
  out.lambda = -slope;
  out.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
  out.samples = static_cast<int>(ts.size());
  return out;
}

/// c_i(t) <= 2 (E(c_0|c_inf) + sum_j c_{j,inf}) + tol for every sample.
inline bool check_Ktilde(const OdeTrace& trace, const Vector& c_inf, double tol = 1e-9) {
  if (trace.size() == 0) return true;
  const double Ktilde = 2.0 * (trace.E.front() + c_inf.sum());
  for (const auto& c : trace.states)
    if (c.maxCoeff() > Ktilde + tol) return false;
  return true;
}

}  // namespace crn
