#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "crn/eed.hpp"
#include "crn/ode.hpp"

using namespace crn;

namespace {

Network autocat() {
  Network net;
  net.species = {"A"};
  net.reactions = {{make_complex({1}), make_complex({2}), 1.0},
                   {make_complex({2}), make_complex({1}), 1.0}};
  net.diffusion = Vector::Ones(1);
  return net;
}

// Projection of v onto ker(Q), computed directly from the basis matrix.
Vector project_to_shell(const ConservationBasis& basis, const Vector& v) {
  if (basis.m() == 0) return v;
  const Eigen::MatrixXd Q = basis.Q;
  return v - Q.transpose() * (Q * Q.transpose()).ldlt().solve(Q * v);
}

}  // namespace

TEST_CASE("quadratic form anchor: Lambda = 4 for the 2x2 system at M = 2") {
  const auto net = make_2x2();
  const auto basis = conservation_basis(net);
  const Vector c_inf = Vector::Ones(2);
  CHECK(quadratic_form_Lambda(net, c_inf, basis) == Catch::Approx(4.0).margin(1e-10));

  // Same structure for the two-species unit cycle.
  const auto cyc = make_cycle({1, 1}, {1.0, 1.0});
  const auto cyc_basis = conservation_basis(cyc);
  CHECK(quadratic_form_Lambda(cyc, Vector::Ones(2), cyc_basis) == Catch::Approx(4.0).margin(1e-10));
}

TEST_CASE("quadratic form for the 3x3 and unit cycle: hand-reduced pencils") {
  // 3x3 at c_inf = (1,1,1): on the tangent {2 mu_A + mu_B + mu_C = 0} with
  // basis v1 = (1,0,-2), v2 = (0,1,-1), the ratio reduces to
  // (14x^2+4xy+8y^2)/(5x^2+4xy+2y^2) whose smaller generalized eigenvalue
  // solves l^2 - 10 l + 18 = 0, i.e. Lambda = 5 - sqrt(7).
  const auto net3 = make_3x3();
  const auto basis3 = conservation_basis(net3);
  CHECK(quadratic_form_Lambda(net3, Vector::Ones(3), basis3) ==
        Catch::Approx(5.0 - std::sqrt(7.0)).margin(1e-12));

  // Unit 3-cycle: numerator is the cycle Laplacian form, eigenvalue 3 on the
  // mean-zero subspace.
  const auto cyc = make_cycle({1, 1, 1}, {1.0, 1.0, 1.0});
  const auto basisc = conservation_basis(cyc);
  CHECK(quadratic_form_Lambda(cyc, Vector::Ones(3), basisc) == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("m = 0 network: Lambda is the unconstrained eigenvalue (k1+k2)/c_inf") {
  const auto net = autocat();
  const auto basis = conservation_basis(net);
  REQUIRE(basis.m() == 0);
  const Vector c_inf = Vector::Ones(1);
  CHECK(quadratic_form_Lambda(net, c_inf, basis) == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("directional limits of D/E match the quadratic Rayleigh quotient") {
  std::mt19937_64 rng(12);
  struct Case {
    Network net;
    Vector mass;
  };
  std::vector<Case> cases;
  cases.push_back({make_2x2(), Vector::Constant(1, 2.0)});
  cases.push_back({make_cycle({1, 1, 1}, {1, 1, 1}), Vector::Constant(1, 3.0)});
  cases.push_back({make_3x3(), Vector::Constant(1, 4.0)});
  for (const auto& cs : cases) {
    const auto basis = conservation_basis(cs.net);
    const auto eq = solve_positive_equilibrium(cs.net, basis, cs.mass);
    for (int trial = 0; trial < 5; ++trial) {
      Vector raw(cs.net.species_count());
      for (Eigen::Index i = 0; i < raw.size(); ++i)
        raw[i] = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
      Vector mu = project_to_shell(basis, raw);
      if (mu.norm() < 1e-8) continue;
      mu.normalize();
      const double t = 1e-4;
      const Vector xi = eq.c + t * mu;
      const double limit = dissipation_formula(cs.net, xi, eq.c) / relative_entropy(xi, eq.c);
      CHECK(limit == Catch::Approx(quadratic_ratio(cs.net, eq.c, mu)).epsilon(1e-3));
    }
    // And along the minimizing direction: the limit is Lambda itself.
    const Vector mu_min = quadratic_min_direction(cs.net, eq.c, basis);
    const Vector xi = eq.c + 1e-4 * mu_min;
    const double limit = dissipation_formula(cs.net, xi, eq.c) / relative_entropy(xi, eq.c);
    CHECK(limit == Catch::Approx(quadratic_form_Lambda(cs.net, eq.c, basis)).epsilon(1e-3));
  }
}

TEST_CASE("the Rayleigh quotient is exactly homogeneous of degree zero") {
  const auto net = make_3x3();
  const auto basis = conservation_basis(net);
  const Vector c_inf = Vector::Ones(3);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    Vector raw(3);
    for (int i = 0; i < 3; ++i) raw[i] = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    const Vector mu = project_to_shell(basis, raw);
    if (mu.norm() < 1e-8) continue;
    const double base = quadratic_ratio(net, c_inf, mu);
    for (double s : {2.0, 4.0, 0.5}) {
      CHECK(quadratic_ratio(net, c_inf, Vector(s * mu)) == base);
    }
  }
}

TEST_CASE("Q diag(c_inf) Q^T is positive definite on the bundled networks") {
  struct Case {
    Network net;
    Vector mass;
  };
  std::vector<Case> cases;
  cases.push_back({make_2x2(), Vector::Constant(1, 2.0)});
  cases.push_back({make_3x3(), Vector::Constant(1, 4.0)});
  cases.push_back({make_cycle({2, 1}, {1.0, 2.0}), Vector::Constant(1, 1.0)});
  for (const auto& cs : cases) {
    const auto basis = conservation_basis(cs.net);
    const auto eq = solve_positive_equilibrium(cs.net, basis, cs.mass);
    CHECK(mass_matrix_positive_definite(basis, eq.c));
  }
}

TEST_CASE("estimate_lambda_ode: positivity and the quadratic ceiling") {
  const auto net = make_2x2();
  const auto basis = conservation_basis(net);
  const Vector M = Vector::Constant(1, 2.0);
  const auto eq = solve_positive_equilibrium(net, basis, M);
  ConstraintSet cset{basis, M, 1.0};
  SampleBudget budget;
  budget.samples = 4000;
  budget.seed = 3;
  const auto est = estimate_lambda_ode(net, eq.c, cset, budget);
  CHECK(est.Lambda_quadratic == Catch::Approx(4.0).margin(1e-10));
  CHECK(est.lambda_lo > 0.0);
  CHECK(est.lambda_lo <= est.Lambda_quadratic + 1e-3);
  CHECK(cset.contains(est.witness, eq.c, 1e-6));
}

TEST_CASE("pde_lambda_estimate assembles the two halves") {
  const auto net = make_2x2(1.0, 1.0, 0.5, 2.0);  // min d = 0.5
  const auto est = pde_lambda_estimate(net, 1.0, 4.0);
  CHECK(est.c_lsi == Catch::Approx(M_PI * M_PI).epsilon(1e-14));
  CHECK(est.lambda1 == Catch::Approx(0.25 * M_PI * M_PI).epsilon(1e-14));
  CHECK(est.lambda == Catch::Approx(std::min(est.lambda1, 4.0)).epsilon(1e-14));

  // Doubling the interval length quarters the surrogate constant.
  const auto wide = pde_lambda_estimate(net, 2.0, 4.0);
  CHECK(wide.c_lsi == Catch::Approx(est.c_lsi / 4.0).epsilon(1e-14));

  // Explicit constant overrides the surrogate.
  const auto fixed = pde_lambda_estimate(net, 1.0, 4.0, 2.0);
  CHECK(fixed.c_lsi == 2.0);
  CHECK(fixed.lambda1 == Catch::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(pde_lambda_estimate(net, 0.0, 1.0), DomainError);
}

TEST_CASE("estimate_lambda_ode handles m = 0 (unconstrained slice)") {
  const auto net = autocat();
  const auto basis = conservation_basis(net);
  const Vector c_inf = Vector::Ones(1);
  ConstraintSet cset{basis, Vector(), 0.5};
  SampleBudget budget;
  budget.samples = 2000;
  budget.seed = 2;
  const auto est = estimate_lambda_ode(net, c_inf, cset, budget);
  CHECK(est.lambda_lo > 0.0);
  CHECK(est.lambda_lo <= est.Lambda_quadratic + 1e-3);
  CHECK(est.Lambda_quadratic == Catch::Approx(2.0).margin(1e-10));
}

TEST_CASE("estimate_lambda_ode on the cycle has an interior witness") {
  const auto net = make_cycle({1, 1, 1}, {1.0, 1.0, 1.0});
  const auto basis = conservation_basis(net);
  const Vector M = Vector::Constant(1, 3.0);
  const auto eq = solve_positive_equilibrium(net, basis, M);
  ConstraintSet cset{basis, M, 1.0};
  SampleBudget budget;
  budget.samples = 4000;
  budget.seed = 5;
  const auto est = estimate_lambda_ode(net, eq.c, cset, budget);
  CHECK(est.lambda_lo > 0.0);
  CHECK(est.witness.minCoeff() > 0.0);
}

TEST_CASE("3x3 lambda estimate collapses as the entropy cap admits the boundary") {
  const auto net = make_3x3();
  const auto basis = conservation_basis(net);
  const Vector M = Vector::Constant(1, 4.0);
  const auto eq = solve_positive_equilibrium(net, basis, M);
  SampleBudget budget;
  budget.samples = 8000;
  budget.seed = 11;
  ConstraintSet tight{basis, M, 0.3};
  ConstraintSet loose{basis, M, 6.0};  // admits states near (0,0,4), E -> 4 ln 4 - 1
  const auto est_tight = estimate_lambda_ode(net, eq.c, tight, budget);
  const auto est_loose = estimate_lambda_ode(net, eq.c, loose, budget);
  CHECK(est_tight.lambda_lo > 0.0);
  CHECK(est_loose.lambda_lo > 0.0);
  CHECK(est_loose.lambda_lo < 0.5 * est_tight.lambda_lo);
}

TEST_CASE("degenerate mass vector exhausts the sampling budget") {
  const auto net = make_2x2();
  const auto basis = conservation_basis(net);
  ConstraintSet cset{basis, Vector::Constant(1, 2.0), -1.0};  // empty: E <= -1 impossible
  SampleBudget budget;
  budget.samples = 200;
  CHECK_THROWS_AS(estimate_lambda_ode(net, Vector::Ones(2), cset, budget), NonConvergence);
}

TEST_CASE("finite cycle inequality: brute force with zero violations") {
  {
    const auto rep = verify_finite_cycle_inequality({1, 1}, Vector::Ones(2), 20000, 7);
    CHECK(rep.violations == 0);
    CHECK(rep.samples > 10000);
    CHECK(rep.min_ratio >= 0.25);
  }
  {
    const auto eq = solve_cyclic_equilibrium({1, 2, 1}, {1, 1, 1}, 3.0);
    const auto rep =
        verify_finite_cycle_inequality({1, 2, 1}, eq.point.c.cwiseSqrt(), 20000, 7);
    CHECK(rep.violations == 0);
    CHECK(rep.min_ratio >= std::pow(3.0, -3));
  }
}

TEST_CASE("finite cycle inequality: small-perturbation Taylor check") {
  // N = 2, alpha = (1,1), A_inf = (1,1): mu = (t, mu2(t)) on the constraint has
  // LHS ~ 8 t^2 >= (1/4) * sum mu^2 ~ t^2 / 2.
  const double t = 1e-3;
  const double mu2 = -1.0 + std::sqrt(1.0 - t * t - 2.0 * t);
  const double lhs = 2.0 * std::pow((1.0 + t) - (1.0 + mu2), 2.0);
  const double rhs = 0.25 * (t * t + mu2 * mu2);
  CHECK(lhs >= rhs);
  CHECK(lhs == Catch::Approx(8.0 * t * t).epsilon(0.01));

  // mu = 0 sits on the constraint with both sides zero.
  const double zero_lhs = std::pow((1.0 + 0.0) - (1.0 + 0.0), 2.0);
  CHECK(zero_lhs == 0.0);
}

TEST_CASE("3x3 g6 inequality: zero violations and the case-I bound") {
  const Eigen::Vector3d c_inf = equilibrium_3x3(1, 1, 1, 4.0);
  REQUIRE((c_inf - Eigen::Vector3d::Ones()).cwiseAbs().maxCoeff() < 1e-12);
  const auto rep = verify_3x3_inequality(c_inf, 0.5, 20000, 13);
  CHECK(rep.violations == 0);
  CHECK(rep.samples > 10000);
  CHECK(rep.min_ratio >= 0.25 * 0.25 - 1e-12);  // K5 = eps^2/4 at B_inf = 1
  CHECK(rep.case_counts[0] + rep.case_counts[1] + rep.case_counts[2] == rep.samples);

  // Case I directly: mu_A = 0.2, mu_B < 0 solved from the constraint surface.
  const double muA = 0.2;
  const double muB = -1.0 + std::sqrt(1.0 - 2.0 * muA * (muA + 2.0) / 2.0);  // mu_C = 0 slice
  REQUIRE(muB < 0.0);
  const double lhs1 = std::pow((1.0 + muA) - (1.0 + muB) * (1.0 + muB), 2.0);
  CHECK(lhs1 >= muA * muA + muB * muB);
}

TEST_CASE("averaged cyclic inequality: K2 value and positive sampled infimum") {
  const auto rep = verify_averaged_cyclic_inequality({1, 1}, {1.0, 1.0}, 2.0, 0.3, 20000, 19);
  // K2 = Psi(2;1)/(sqrt2 - 1)^2, evaluated directly.
  const double expect_K2 = psi(2.0, 1.0) / std::pow(std::sqrt(2.0) - 1.0, 2.0);
  CHECK(rep.K2 == Catch::Approx(expect_K2).epsilon(1e-12));
  CHECK(expect_K2 == Catch::Approx(2.2515).epsilon(1e-3));
  CHECK(rep.K3_sampled > 0.0);
  CHECK(rep.samples > 10000);

  // The equilibrium state makes both sides vanish.
  const auto eq = solve_cyclic_equilibrium({1, 1}, {1.0, 1.0}, 2.0);
  double lhs = 0.0, rhs = 0.0;
  for (int i = 0; i < 2; ++i) {
    const int j = (i + 1) % 2;
    lhs += std::pow(std::sqrt(eq.point.c[i] / eq.point.c[i]) -
                        std::sqrt(eq.point.c[j] / eq.point.c[j]),
                    2.0);
    rhs += std::pow(std::sqrt(eq.point.c[i]) - std::sqrt(eq.point.c[i]), 2.0);
  }
  CHECK(lhs == 0.0);
  CHECK(rhs == 0.0);
}

TEST_CASE("lambda estimates stay below the entropy-decay rate observed in simulation") {
  // Sanity link between the functional inequality and the dynamics: along a
  // trajectory, D/E >= lambda_lo for the matching entropy cap.
  const auto net = make_2x2();
  const auto basis = conservation_basis(net);
  Vector c0(2);
  c0 << 1.5, 0.5;
  const auto trace = integrate_ode(net, c0, 8.0);
  ConstraintSet cset{basis, trace.mass, trace.E.front() + 1e-9};
  SampleBudget budget;
  budget.samples = 4000;
  budget.seed = 23;
  const auto est = estimate_lambda_ode(net, trace.c_inf, cset, budget);
  for (size_t k = 0; k < trace.size(); ++k) {
    if (trace.E[k] > 1e-10)
      CHECK(trace.D_formula[k] / trace.E[k] >= est.lambda_lo - 1e-6);
  }
}
