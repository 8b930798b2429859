#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "crn/entropy.hpp"
#include "crn/equilibria.hpp"

namespace crn {

/// The constrained state set: nonnegative states on the mass shell Q xi = M
/// with relative entropy at most K.
struct ConstraintSet {
  ConservationBasis basis;
  Vector M;
  double K = 1.0;

  bool contains(const Vector& xi, const Vector& c_inf, double tol = 1e-9) const {
    if (xi.minCoeff() < 0.0) return false;
    if (basis.m() > 0 &&
        (basis.Q * xi - M).cwiseAbs().maxCoeff() > tol * (1.0 + M.cwiseAbs().maxCoeff()))
      return false;
    return relative_entropy(xi, c_inf) <= K + tol;
  }
};

struct LambdaEstimate {
  double lambda_lo = 0.0;       // best sampled/descended value of D/E
  Vector witness;               // state attaining it
  double Lambda_quadratic = 0.0;  // near-equilibrium limit
};

struct SampleBudget {
  long samples = 20000;
  int descents = 12;             // local searches from the best samples
  int descent_iterations = 200;
  unsigned long seed = 0;
};

namespace detail {

inline int thread_count() {
  if (const char* env = std::getenv("CRN_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return std::min(v, 64);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

// Fixed 64-way chunking: results are independent of the worker count because
// every chunk owns a generator seeded from (seed, chunk index).
template <typename Fn>
void parallel_chunks(long total, unsigned long seed, Fn&& fn) {
  const int chunks = 64;
  const int workers = std::min(thread_count(), chunks);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
      const long begin = total * c / chunks;
      const long end = total * (c + 1) / chunks;
      std::mt19937_64 rng(seed * 6364136223846793005ull + static_cast<unsigned long>(c) + 1);
      fn(c, begin, end, rng);
    }
  };
  if (workers == 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
}

// Orthonormal basis of ker(A) for a dense matrix (full-pivot LU kernel + QR).
inline Eigen::MatrixXd orthonormal_kernel(const Eigen::MatrixXd& A, int n) {
  if (A.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-12);
  const Eigen::MatrixXd K = lu.kernel();
  if (K.cols() == 1 && K.isZero(0.0)) return Eigen::MatrixXd(n, 0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(K);
  return Eigen::MatrixXd(qr.householderQ()).leftCols(K.cols());
}

}  // namespace detail

/// Rayleigh quotient of the near-equilibrium expansion at a feasible
/// perturbation mu (Q mu = 0):
///   [sum_r k_r (sum_i (y_{r,i}-y'_{r,i}) mu_i / c_{i,inf})^2] / [sum_i mu_i^2 / c_{i,inf}].
inline double quadratic_ratio(const Network& net, const Vector& c_inf, const Vector& mu) {
  double num = 0.0;
  for (const auto& rx : net.reactions) {
    double dot = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      dot += (rx.source.coeffs[i] - rx.target.coeffs[i]) * mu[i] / c_inf[i];
    num += rx.rate * dot * dot;
  }
  double den = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) den += mu[i] * mu[i] / c_inf[i];
  if (den == 0.0) throw DomainError("quadratic_ratio requires mu != 0");
  return num / den;
}

namespace detail {

// The pencil of the Taylor-limit quadratic form, restricted to the feasible
// subspace {Q diag(c_inf) eta = 0} in eta coordinates (mu = diag(c_inf) eta).
struct LambdaPencil {
  Eigen::MatrixXd basis_eta;  // columns span the feasible eta subspace
  Eigen::MatrixXd num;        // B^T A B
  Eigen::MatrixXd den;        // B^T C B
};

inline LambdaPencil lambda_pencil(const Network& net, const Vector& c_inf,
                                  const ConservationBasis& basis) {
  const int n = net.species_count();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (const auto& rx : net.reactions) {
    Vector w(n);
    for (int i = 0; i < n; ++i) w[i] = rx.source.coeffs[i] - rx.target.coeffs[i];
    A += rx.rate * w * w.transpose();
  }
  const Eigen::MatrixXd C = c_inf.asDiagonal();
  LambdaPencil p;
  p.basis_eta = detail::orthonormal_kernel(basis.m() > 0 ? Eigen::MatrixXd(basis.Q * C)
                                                         : Eigen::MatrixXd(0, n),
                                           n);
  p.num = p.basis_eta.transpose() * A * p.basis_eta;
  p.den = p.basis_eta.transpose() * C * p.basis_eta;
  return p;
}

}  // namespace detail

/// Near-equilibrium limit Lambda: the smallest generalized eigenvalue of the
/// quadratic-form pencil over the feasible subspace. Strictly positive for
/// valid networks (kernel directions are excluded by the mass constraint when
/// m > 0, and ker(W) = 0 when m = 0).
inline double quadratic_form_Lambda(const Network& net, const Vector& c_inf,
                                    const ConservationBasis& basis) {
  const auto p = detail::lambda_pencil(net, c_inf, basis);
  if (p.num.rows() == 0) throw DomainError("no feasible perturbation directions");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(p.num, p.den);
  return solver.eigenvalues()[0];
}

/// The feasible perturbation direction attaining Lambda (unit mass-shell
/// tangent), useful as a descent/limit probe.
inline Vector quadratic_min_direction(const Network& net, const Vector& c_inf,
                                      const ConservationBasis& basis) {
  const auto p = detail::lambda_pencil(net, c_inf, basis);
  if (p.num.rows() == 0) throw DomainError("no feasible perturbation directions");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(p.num, p.den);
  const Vector eta = p.basis_eta * solver.eigenvectors().col(0);
  Vector mu = c_inf.asDiagonal() * eta;
  mu /= mu.norm();
  return mu;
}

/// Constrained infimum lambda = inf_{xi in C_M} D(xi)/E(xi|c_inf), estimated by
/// Latin-hypercube sampling of the mass shell followed by projected descent.
/// A ball of radius 1e-6 around c_inf is excluded (the ratio is governed by
/// the quadratic form there); a probe along the quadratic minimizer keeps
/// lambda_lo <= Lambda + tol structurally.
inline LambdaEstimate estimate_lambda_ode(const Network& net, const Vector& c_inf,
                                          const ConstraintSet& cset,
                                          const SampleBudget& budget = {}) {
  const int n = net.species_count();
  const int m = cset.basis.m();
  const int d = n - m;
  if (d <= 0) throw DomainError("mass shell has no interior directions");

  // Rational kernel of Q gives the exact slice directions; orthonormalize.
  Eigen::MatrixXd B;
  if (m == 0) {
    B = Eigen::MatrixXd::Identity(n, n);
  } else {
    const auto kernel_rows = rational_kernel(cset.basis.rows, n);
    Eigen::MatrixXd K(n, static_cast<Eigen::Index>(kernel_rows.size()));
    for (size_t c = 0; c < kernel_rows.size(); ++c)
      for (int r = 0; r < n; ++r)
        K(r, static_cast<Eigen::Index>(c)) = boost::rational_cast<double>(kernel_rows[c][r]);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(K);
    B = Eigen::MatrixXd(qr.householderQ()).leftCols(K.cols());
  }

  const double exclusion = 1e-6;
  auto ratio_at = [&](const Vector& xi) -> double {
    const double E = relative_entropy(xi, c_inf);
    if (E <= 0.0) return std::numeric_limits<double>::infinity();
    return dissipation_formula(net, xi, c_inf) / E;
  };
  auto feasible = [&](const Vector& xi) {
    return xi.minCoeff() > 0.0 && (xi - c_inf).norm() >= exclusion &&
           relative_entropy(xi, c_inf) <= cset.K;
  };

  const double Ktilde = 2.0 * (cset.K + c_inf.sum());
  const double L = Ktilde * std::sqrt(static_cast<double>(n));

  struct Candidate {
    double ratio;
    Vector z;
  };
  std::vector<Candidate> best;
  long accepted_total = 0;
  std::mutex merge_mutex;

  const long nsamples = budget.samples;
  // Latin hypercube: per-dimension affine permutations s -> (a s + b) mod n of
  // the strata, reproducible independently of the chunking.
  std::vector<long> lhs_a(d), lhs_b(d);
  {
    std::mt19937_64 perm_rng(budget.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_int_distribution<long> pick(1, std::max<long>(1, nsamples - 1));
    for (int j = 0; j < d; ++j) {
      long a = 1;
      do {
        a = pick(perm_rng);
      } while (std::gcd(a, nsamples) != 1);
      lhs_a[j] = a;
      lhs_b[j] = pick(perm_rng);
    }
  }
  detail::parallel_chunks(nsamples, budget.seed, [&](int, long begin, long end,
                                                     std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Candidate> local;
    long accepted = 0;
    for (long s = begin; s < end; ++s) {
      Vector z(d);
      for (int j = 0; j < d; ++j) {
        const long stratum = (s % nsamples) * lhs_a[j] % nsamples;
        const long shifted = (stratum + lhs_b[j]) % nsamples;
        z[j] = -L + (shifted + unif(rng)) * (2.0 * L / nsamples);
      }
      const Vector xi = c_inf + B * z;
      if (!feasible(xi)) continue;
      ++accepted;
      local.push_back({ratio_at(xi), z});
      std::push_heap(local.begin(), local.end(),
                     [](const Candidate& a, const Candidate& b) { return a.ratio < b.ratio; });
      if (static_cast<int>(local.size()) > budget.descents) {
        std::pop_heap(local.begin(), local.end(),
                      [](const Candidate& a, const Candidate& b) { return a.ratio < b.ratio; });
        local.pop_back();
      }
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    accepted_total += accepted;
    best.insert(best.end(), local.begin(), local.end());
  });
  if (accepted_total == 0)
    throw NonConvergence("sampling budget exhausted without feasible states (degenerate mass vector)");

  std::sort(best.begin(), best.end(),
            [](const Candidate& a, const Candidate& b) { return a.ratio < b.ratio; });
  if (static_cast<int>(best.size()) > budget.descents) best.resize(budget.descents);

  // Probe along the quadratic minimizer, just outside the exclusion ball.
  const Vector mu_min = quadratic_min_direction(net, c_inf, cset.basis);
  for (double t : {2.0 * exclusion, 1e-4, 1e-2}) {
    const Vector xi = c_inf + t * mu_min;
    if (feasible(xi)) best.push_back({ratio_at(xi), B.transpose() * (xi - c_inf)});
  }

  // Projected-gradient descent in slice coordinates with numerical gradients.
  auto ratio_z = [&](const Vector& z) -> double {
    const Vector xi = c_inf + B * z;
    if (!feasible(xi)) return std::numeric_limits<double>::infinity();
    return ratio_at(xi);
  };
  LambdaEstimate out;
  out.Lambda_quadratic = quadratic_form_Lambda(net, c_inf, cset.basis);
  out.lambda_lo = std::numeric_limits<double>::infinity();
  for (auto& cand : best) {
    Vector z = cand.z;
    double f = ratio_z(z);
    for (int it = 0; it < budget.descent_iterations && std::isfinite(f); ++it) {
      Vector g(d);
      const double fd = 1e-6 * (1.0 + z.norm());
      for (int j = 0; j < d; ++j) {
        Vector zp = z, zm = z;
        zp[j] += fd;
        zm[j] -= fd;
        const double fp = ratio_z(zp), fm = ratio_z(zm);
        g[j] = (std::isfinite(fp) && std::isfinite(fm)) ? (fp - fm) / (2.0 * fd) : 0.0;
      }
      if (g.norm() == 0.0) break;
      double s = 0.25 * (1.0 + z.norm()) / g.norm();
      bool improved = false;
      for (int ls = 0; ls < 30; ++ls, s *= 0.5) {
        const double ftry = ratio_z(z - s * g);
        if (ftry < f - 1e-14) {
          z -= s * g;
          f = ftry;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    if (f < out.lambda_lo) {
      out.lambda_lo = f;
      out.witness = c_inf + B * z;
    }
  }
  return out;
}

// -------------------------------------------------------------------------
// Brute-force verification of the finite-dimensional inequalities.
// -------------------------------------------------------------------------

struct InequalityRow {
  long sample_id;
  double ratio;
  char case_label;  // 'I', 'J' (=II), 'K' (=III) for the 3x3 cases; '-' otherwise
};

struct InequalityReport {
  long samples = 0;      // accepted (constraint-respecting) samples
  long redraws = 0;      // constraint unsolvable for the raw draw
  long violations = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  long case_counts[3] = {0, 0, 0};  // I, II, III
  std::vector<InequalityRow> rows;  // filled only when keep_rows
  bool keep_rows = false;
};

/// Cyclic finite-dimensional inequality: mu in [-1,inf)^N on the constraint surface
/// sum_i alpha_i^{-1} A_{i,inf}^2 (mu_i^2 + 2 mu_i) = 0 satisfies
///   sum_i ((1+mu_i)^{alpha_i} - (1+mu_{i+1})^{alpha_{i+1}})^2 >= N^-N sum mu_i^2.
/// Draws all coordinates but one and solves the constraint for the pivot.
inline InequalityReport verify_finite_cycle_inequality(const std::vector<int>& alphas,
                                                       const Vector& A_inf, long samples,
                                                       unsigned long seed = 0,
                                                       bool keep_rows = false,
                                                       double slack = 1e-12) {
  const int N = static_cast<int>(alphas.size());
  if (A_inf.size() != N) throw DimensionError("A_inf length mismatch");
  int pivot = 0;
  for (int i = 1; i < N; ++i)
    if (A_inf[i] > A_inf[pivot]) pivot = i;
  const double bound = std::pow(static_cast<double>(N), -N);

  InequalityReport rep;
  rep.keep_rows = keep_rows;
  std::mutex merge_mutex;
  detail::parallel_chunks(samples, seed, [&](int, long begin, long end, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 3.0);
    InequalityReport local;
    local.keep_rows = keep_rows;
    for (long s = begin; s < end; ++s) {
      Vector mu(N);
      bool ok = false;
      for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
        for (int i = 0; i < N; ++i) mu[i] = unif(rng);
        if (A_inf[pivot] > 0.0) {
          double S = 0.0;
          for (int i = 0; i < N; ++i)
            if (i != pivot) S += A_inf[i] * A_inf[i] * mu[i] * (mu[i] + 2.0) / alphas[i];
          const double disc = 1.0 - S * alphas[pivot] / (A_inf[pivot] * A_inf[pivot]);
          if (disc < 0.0) {
            ++local.redraws;
            continue;
          }
          mu[pivot] = -1.0 + std::sqrt(disc);
        }
        ok = true;
      }
      if (!ok) continue;

      double lhs = 0.0, mu2 = 0.0;
      for (int i = 0; i < N; ++i) {
        const int j = (i + 1) % N;
        const double diff =
            std::pow(1.0 + mu[i], alphas[i]) - std::pow(1.0 + mu[j], alphas[j]);
        lhs += diff * diff;
        mu2 += mu[i] * mu[i];
      }
      ++local.samples;
      if (lhs < bound * mu2 - slack) ++local.violations;
      if (mu2 > 0.0) {
        const double ratio = lhs / mu2;
        local.min_ratio = std::min(local.min_ratio, ratio);
        if (keep_rows) local.rows.push_back({s, ratio, '-'});
      }
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    rep.samples += local.samples;
    rep.redraws += local.redraws;
    rep.violations += local.violations;
    rep.min_ratio = std::min(rep.min_ratio, local.min_ratio);
    if (keep_rows) rep.rows.insert(rep.rows.end(), local.rows.begin(), local.rows.end());
  });
  if (keep_rows)
    std::sort(rep.rows.begin(), rep.rows.end(),
              [](const InequalityRow& a, const InequalityRow& b) { return a.sample_id < b.sample_id; });
  return rep;
}

/// The 3x3 finite-dimensional inequality: on the mass-conservation surface
///   2 A_inf^2 mu_A(mu_A+2) + B_inf^2 mu_B(mu_B+2) + C_inf^2 mu_C(mu_C+2) = 0
/// restricted to (1+mu_B)^2 >= eps^2/B_inf^2, the quadratic form
///   ((1+mu_A)-(1+mu_B)^2)^2 + (1+mu_B)^2 (mu_B-mu_C)^2 + ((1+mu_B)(1+mu_C)-(1+mu_A))^2
/// dominates K5 (mu_A^2+mu_B^2+mu_C^2) with K5 = min(eps^2/B_inf^2, 1)/4.
inline InequalityReport verify_3x3_inequality(const Vector& c_inf, double eps, long samples,
                                              unsigned long seed = 0, bool keep_rows = false,
                                              double slack = 1e-12) {
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("eps must lie in (0, 1]");
  const double a_inf = c_inf[0], b_inf = c_inf[1], g_inf = c_inf[2];
  const double eps_ratio = eps * eps / b_inf;  // eps^2 / B_inf^2 with B_inf = sqrt(b_inf)
  const double K5 = 0.25 * std::min(eps_ratio, 1.0);

  InequalityReport rep;
  rep.keep_rows = keep_rows;
  std::mutex merge_mutex;
  detail::parallel_chunks(samples, seed, [&](int, long begin, long end, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 3.0);
    InequalityReport local;
    for (long s = begin; s < end; ++s) {
      double muA = 0, muB = 0, muC = 0;
      bool ok = false;
      for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
        muA = unif(rng);
        muB = unif(rng);
        if ((1.0 + muB) * (1.0 + muB) < eps_ratio) {
          ++local.redraws;
          continue;
        }
        const double S = 2.0 * a_inf * muA * (muA + 2.0) + b_inf * muB * (muB + 2.0);
        const double disc = 1.0 - S / g_inf;
        if (disc < 0.0) {
          ++local.redraws;
          continue;
        }
        muC = -1.0 + std::sqrt(disc);
        ok = true;
      }
      if (!ok) continue;

      const double t1 = (1.0 + muA) - (1.0 + muB) * (1.0 + muB);
      const double t2 = (1.0 + muB) * (muB - muC);
      const double t3 = (1.0 + muB) * (1.0 + muC) - (1.0 + muA);
      const double lhs = t1 * t1 + t2 * t2 + t3 * t3;
      const double mu2 = muA * muA + muB * muB + muC * muC;
      char label;
      int case_idx;
      if (muA >= 0.0 && muB >= 0.0) {
        label = 'J';
        case_idx = 1;
      } else if (muA <= 0.0 && muB <= 0.0) {
        label = 'K';
        case_idx = 2;
      } else {
        label = 'I';
        case_idx = 0;
      }
      ++local.samples;
      ++local.case_counts[case_idx];
      if (lhs < K5 * mu2 - slack) ++local.violations;
      if (mu2 > 0.0) {
        const double ratio = lhs / mu2;
        local.min_ratio = std::min(local.min_ratio, ratio);
        if (keep_rows) local.rows.push_back({s, ratio, label});
      }
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    rep.samples += local.samples;
    rep.redraws += local.redraws;
    rep.violations += local.violations;
    rep.min_ratio = std::min(rep.min_ratio, local.min_ratio);
    for (int i = 0; i < 3; ++i) rep.case_counts[i] += local.case_counts[i];
    if (keep_rows) rep.rows.insert(rep.rows.end(), local.rows.begin(), local.rows.end());
  });
  if (keep_rows)
    std::sort(rep.rows.begin(), rep.rows.end(),
              [](const InequalityRow& a, const InequalityRow& b) { return a.sample_id < b.sample_id; });
  return rep;
}

struct AveragedCycleReport {
  double K2 = 0.0;          // explicit quadratic bound on the entropy side
  double K3_sampled = 0.0;  // empirical infimum of the averaged ratio
  long samples = 0;
  long case_small = 0;      // samples with some a_i < eps^2 (paper's Case 4.2)
  double min_ratio_small = std::numeric_limits<double>::infinity();
};

/// Sampled form of the averaged inequality for homogeneous states of the cycle
/// (gradient terms vanish): the reaction quadratic dominates a positive
/// multiple of the squared distance of sqrt-concentrations from equilibrium.
/// Also evaluates the explicit K2 = max_i Psi(M alpha_i; a_{i,inf}) /
/// (sqrt(M alpha_i) - sqrt(a_{i,inf}))^2 from the monotonicity of Psi(.,y)/(sqrt(.)-sqrt(y))^2.
inline AveragedCycleReport verify_averaged_cyclic_inequality(const std::vector<int>& alphas,
                                                             const std::vector<double>& ks,
                                                             double mass, double eps,
                                                             long samples,
                                                             unsigned long seed = 0) {
  const int N = static_cast<int>(alphas.size());
  const auto eq = solve_cyclic_equilibrium(alphas, ks, mass);
  const Vector a_inf = eq.point.c;

  AveragedCycleReport rep;
  for (int i = 0; i < N; ++i) {
    const double x = mass * alphas[i];
    const double denom = std::sqrt(x) - std::sqrt(a_inf[i]);
    rep.K2 = std::max(rep.K2, psi(x, a_inf[i]) / (denom * denom));
  }

  double min_ratio = std::numeric_limits<double>::infinity();
  std::mutex merge_mutex;
  detail::parallel_chunks(samples, seed, [&](int, long begin, long end, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double local_min = std::numeric_limits<double>::infinity();
    double local_min_small = std::numeric_limits<double>::infinity();
    long local_samples = 0, local_small = 0;
    for (long s = begin; s < end; ++s) {
      Vector a(N);
      double massa = 0.0;
      for (int i = 0; i < N; ++i) {
        a[i] = unif(rng) * alphas[i] * mass;
        massa += a[i] / alphas[i];
      }
      if (massa <= 0.0) continue;
      a *= mass / massa;  // exact mass shell (constraint is linear)
      if ((a - a_inf).cwiseAbs().maxCoeff() < 1e-8) continue;

      double lhs = 0.0, rhs = 0.0;
      for (int i = 0; i < N; ++i) {
        const int j = (i + 1) % N;
        const double ri = std::pow(a[i] / a_inf[i], 0.5 * alphas[i]);
        const double rj = std::pow(a[j] / a_inf[j], 0.5 * alphas[j]);
        lhs += (ri - rj) * (ri - rj);
        const double diff = std::sqrt(a[i]) - std::sqrt(a_inf[i]);
        rhs += diff * diff;
      }
      if (rhs == 0.0) continue;
      ++local_samples;
      const double ratio = lhs / rhs;
      local_min = std::min(local_min, ratio);
      if (a.minCoeff() < eps * eps) {
        ++local_small;
        local_min_small = std::min(local_min_small, ratio);
      }
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    rep.samples += local_samples;
    rep.case_small += local_small;
    min_ratio = std::min(min_ratio, local_min);
    rep.min_ratio_small = std::min(rep.min_ratio_small, local_min_small);
  });
  rep.K3_sampled = min_ratio;
  return rep;
}

/// Cholesky check that Q diag(c_inf) Q^T is positive definite (the Case 1
/// argument for Lambda > 0 when m > 0).
inline bool mass_matrix_positive_definite(const ConservationBasis& basis, const Vector& c_inf) {
  if (basis.m() == 0) return true;
  const Eigen::MatrixXd G = basis.Q * c_inf.asDiagonal() * basis.Q.transpose();
  return Eigen::LLT<Eigen::MatrixXd>(G).info() == Eigen::Success;
}

struct PdeLambdaEstimate {
  double c_lsi = 0.0;
  double lambda1 = 0.0;  // 0.5 * C_LSI * min_i d_i, controls E(c | mean)
  double lambda2 = 0.0;  // finite-dimensional part, controls E(mean | c_inf)
  double lambda = 0.0;   // min of the two
};

/// Assembles the PDE decay estimate from the spatial and finite-dimensional
/// halves. C_LSI defaults to the Poincare surrogate pi^2 / L^2 on an interval
/// of length L -- a stand-in for the sharp logarithmic Sobolev constant, which
/// this artifact does not derive.
inline PdeLambdaEstimate pde_lambda_estimate(const Network& net, double domain_length,
                                             double lambda2,
                                             std::optional<double> c_lsi = {}) {
  if (!(domain_length > 0.0)) throw DomainError("domain length must be positive");
  PdeLambdaEstimate est;
  est.c_lsi = c_lsi ? *c_lsi : M_PI * M_PI / (domain_length * domain_length);
  est.lambda1 = 0.5 * est.c_lsi * net.diffusion.minCoeff();
  est.lambda2 = lambda2;
  est.lambda = std::min(est.lambda1, est.lambda2);
  return est;
}

}  // namespace crn
