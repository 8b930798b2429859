#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "crn/ode.hpp"

using namespace crn;

namespace {

Vector random_positive(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Vector c(n);
  for (int i = 0; i < n; ++i) c[i] = unif(rng);
  return c;
}

// Slowest nonzero decay rate of the linearization at the equilibrium; the
// relative entropy decays at twice that rate near equilibrium.
double linearization_rate(const Network& net, const Vector& c_inf) {
  const Eigen::MatrixXd J = reaction_jacobian(net, c_inf);
  const Eigen::VectorXcd ev = J.eigenvalues();
  double slow = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double re = -ev[i].real();
    if (re > 1e-9) slow = std::min(slow, re);
  }
  return slow;
}

}  // namespace

TEST_CASE("2x2 trajectory converges to (1,1)") {
  const auto net = make_2x2();
  Vector c0(2);
  c0 << 1.5, 0.5;
  const auto trace = integrate_ode(net, c0, 20.0);
  CHECK((trace.states.back() - Vector::Ones(2)).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(trace.mass_residual.back() < 1e-10);
}

TEST_CASE("equilibrium initial data stays put with zero entropy") {
  const auto net = make_2x2();
  const auto trace = integrate_ode(net, Vector::Ones(2), 5.0);
  for (size_t k = 0; k < trace.size(); ++k) {
    CHECK(trace.E[k] <= 1e-14);
    CHECK((trace.states[k] - Vector::Ones(2)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("3x3 mass-preserving perturbation returns to (1,1,1)") {
  const auto net = make_3x3();
  Vector c0(3);
  c0 << 1.2, 0.8, 0.8;  // 2a+b+c = 4
  const auto trace = integrate_ode(net, c0, 50.0);
  CHECK((trace.states.back() - Vector::Ones(3)).cwiseAbs().maxCoeff() < 1e-5);
  CHECK(complex_balance_residual(net, trace.states.back()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("entropy is nonincreasing along accepted steps") {
  std::mt19937_64 rng(31);
  const std::vector<Network> nets = {make_2x2(), make_3x3(), make_cycle({1, 1, 1}, {1, 1, 1})};
  for (const auto& net : nets) {
    for (int trial = 0; trial < 100; ++trial) {
      const Vector c0 = random_positive(rng, net.species_count(), 0.05, 3.0);
      const auto trace = integrate_ode(net, c0, 20.0);
      bool monotone = true;
      for (size_t k = 0; k + 1 < trace.size(); ++k)
        monotone = monotone && trace.E[k + 1] <= trace.E[k] + 1e-8;
      CHECK(monotone);
      CHECK(*std::max_element(trace.mass_residual.begin(), trace.mass_residual.end()) < 1e-8);
      CHECK(check_Ktilde(trace, trace.c_inf));
    }
  }
}

TEST_CASE("discrete entropy-dissipation consistency at second order") {
  const auto net = make_2x2();
  Vector c0(2);
  c0 << 1.5, 0.5;
  auto error_at = [&](double h) {
    OdeOpts opts;
    opts.fixed_dt = h;
    const auto trace = integrate_ode(net, c0, 2.0, opts);
    double worst = 0.0;
    for (size_t k = 1; k + 1 < trace.size(); ++k) {
      const double central = (trace.E[k - 1] - trace.E[k + 1]) / (2.0 * h);
      worst = std::max(worst, std::abs(central - trace.D_formula[k]));
    }
    return worst;
  };
  const double e1 = error_at(0.02);
  const double e2 = error_at(0.01);
  CHECK(e2 < e1 / 3.0);  // ~O(h^2) refinement
  CHECK(e1 < 1e-2);
}

TEST_CASE("D along the trajectory agrees between both routes") {
  const auto net = make_cycle({1, 1, 1}, {1.0, 2.0, 4.0});
  Vector c0(3);
  c0 << 1.0, 0.2, 0.55;
  const auto trace = integrate_ode(net, c0, 10.0);
  for (size_t k = 0; k < trace.size(); ++k) {
    if (!std::isnan(trace.D_logform[k]))
      CHECK(std::abs(trace.D_formula[k] - trace.D_logform[k]) <=
            1e-9 * (1.0 + trace.D_formula[k]));
  }
}

TEST_CASE("fit_decay_rate on synthetic and real traces") {
  // Exact exponential: lambda = 3, r^2 = 1.
  OdeTrace synth;
  for (int i = 0; i <= 200; ++i) {
    const double t = 0.05 * i;
    synth.times.push_back(t);
    synth.E.push_back(std::exp(-3.0 * t));
    synth.states.emplace_back(Vector::Zero(1));
  }
  const auto fit = fit_decay_rate(synth, 0.0);
  CHECK(fit.lambda == Catch::Approx(3.0).margin(1e-10));
  CHECK(fit.r_squared == Catch::Approx(1.0).margin(1e-12));

  // Near-equilibrium rate of the 2x2 system: twice the slow linearization
  // eigenvalue (independent oracle), fitted within 20%.
  const auto net = make_2x2();
  Vector c0(2);
  c0 << 1.5, 0.5;
  const auto trace = integrate_ode(net, c0, 12.0);
  const auto real_fit = fit_decay_rate(trace, 3.0);
  const double oracle = 2.0 * linearization_rate(net, trace.c_inf);
  CHECK(real_fit.lambda == Catch::Approx(oracle).epsilon(0.2));
  CHECK(real_fit.r_squared > 0.99);

  // Nothing to fit on a flat-zero trace.
  OdeTrace flat;
  for (int i = 0; i < 50; ++i) {
    flat.times.push_back(0.1 * i);
    flat.E.push_back(0.0);
    flat.states.emplace_back(Vector::Zero(1));
  }
  CHECK_THROWS_AS(fit_decay_rate(flat, 0.0), DomainError);
}

TEST_CASE("check_Ktilde detects violating traces") {
  const auto net = make_2x2();
  Vector c0(2);
  c0 << 1.5, 0.5;
  auto trace = integrate_ode(net, c0, 5.0);
  CHECK(check_Ktilde(trace, trace.c_inf));

  // Constructed counterexample: hoist one state far above the bound.
  auto broken = trace;
  broken.states[2] = Vector::Constant(2, 1e6);
  CHECK_FALSE(check_Ktilde(broken, broken.c_inf));

  const auto eq_trace = integrate_ode(net, Vector::Ones(2), 1.0);
  CHECK(check_Ktilde(eq_trace, eq_trace.c_inf));
}

TEST_CASE("boundary initial data on the 2x2 system converges to the boundary equilibrium") {
  // a0 = 0 freezes a; b relaxes by pure mass balance (the ODE counterpart of
  // the PDE boundary-convergence statement).
  const auto net = make_2x2();
  Vector c0(2);
  c0 << 0.0, 2.0;
  const auto trace = integrate_ode(net, c0, 5.0);
  CHECK(trace.states.back()[0] == 0.0);
  CHECK(trace.states.back()[1] == Catch::Approx(2.0).margin(1e-12));
  // The log-form dissipation is marked absent on the boundary.
  CHECK(std::isnan(trace.D_logform.front()));
  CHECK(std::isfinite(trace.E.front()));
}

TEST_CASE("integration rejects bad inputs") {
  const auto net = make_2x2();
  CHECK_THROWS_AS(integrate_ode(net, Vector::Ones(2), -1.0), DomainError);
  Vector neg(2);
  neg << -0.1, 1.0;
  CHECK_THROWS_AS(integrate_ode(net, neg, 1.0), DomainError);
}

TEST_CASE("convergence targets on the three bundled systems") {
  std::mt19937_64 rng(77);
  const std::vector<Network> nets = {make_2x2(), make_3x3(), make_cycle({1, 1, 1}, {1, 1, 1})};
  for (const auto& net : nets) {
    const Vector c0 = random_positive(rng, net.species_count(), 0.2, 2.0);
    const auto trace = integrate_ode(net, c0, 50.0);
    CHECK(complex_balance_residual(net, trace.states.back()).cwiseAbs().maxCoeff() <= 1e-8);
  }
}
