#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "crn/conservation.hpp"
#include "crn/network.hpp"
#include "crn/ode.hpp"

using namespace crn;

namespace {

// Hand-written right-hand sides, independent of the generic mass-action engine.
Vector rhs_2x2_oracle(double k1, double k2, const Vector& c) {
  const double f = -k1 * c[0] * c[0] + k2 * c[0] * c[1];
  Vector r(2);
  r << f, -f;
  return r;
}

Vector rhs_3x3_oracle(double k1, double k2, double k3, const Vector& c) {
  Vector r(3);
  r[0] = -k1 * c[0] + k3 * c[1] * c[1];
  r[1] = k1 * c[0] + k2 * c[1] * c[2] - 2.0 * k3 * c[1] * c[1];
  r[2] = k1 * c[0] - k2 * c[1] * c[2];
  return r;
}

Vector rhs_cycle_oracle(const std::vector<int>& alphas, const std::vector<double>& ks,
                        const Vector& a) {
  const int n = static_cast<int>(alphas.size());
  Vector r(n);
  for (int i = 0; i < n; ++i) {
    const int prev = (i + n - 1) % n;
    r[i] = alphas[i] * (-ks[i] * std::pow(a[i], alphas[i]) +
                        ks[prev] * std::pow(a[prev], alphas[prev]));
  }
  return r;
}

Vector random_state(std::mt19937_64& rng, int n, double lo = 0.0, double hi = 3.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Vector c(n);
  for (int i = 0; i < n; ++i) c[i] = unif(rng);
  return c;
}

}  // namespace

TEST_CASE("validate_network flags the well-formedness violations") {
  CHECK(validate_network(make_2x2()).empty());
  CHECK(validate_network(make_3x3()).empty());
  CHECK(validate_network(make_cycle({1, 1, 1}, {1, 1, 1})).empty());

  Network trivial = make_2x2();
  trivial.reactions[0].target = trivial.reactions[0].source;
  auto v = validate_network(trivial);
  REQUIRE_FALSE(v.empty());
  CHECK(v.front().find("trivial reaction") != std::string::npos);
  CHECK(v.front().find("index 0") != std::string::npos);

  Network unused = make_2x2();
  unused.species.push_back("C");
  unused.diffusion = Vector::Ones(3);
  for (auto& rx : unused.reactions) {
    rx.source.coeffs.conservativeResize(3);
    rx.source.coeffs[2] = 0;
    rx.target.coeffs.conservativeResize(3);
    rx.target.coeffs[2] = 0;
  }
  v = validate_network(unused);
  REQUIRE_FALSE(v.empty());
  CHECK(v.front().find("species C unused") != std::string::npos);

  Network bad_rate = make_2x2();
  bad_rate.reactions[0].rate = -1.0;
  CHECK_FALSE(validate_network(bad_rate).empty());

  Network bad_diff = make_2x2(1, 1, 1, -1);
  CHECK_FALSE(validate_network(bad_diff).empty());
}

TEST_CASE("reaction_vector matches the closed-form systems") {
  const auto net2 = make_2x2();
  Vector c(2);
  c << 2, 1;
  Vector R = reaction_vector(net2, c);
  CHECK(R[0] == Catch::Approx(-2.0).margin(1e-14));
  CHECK(R[1] == Catch::Approx(2.0).margin(1e-14));
  c << 1, 1;
  CHECK(reaction_vector(net2, c).cwiseAbs().maxCoeff() == 0.0);

  const auto net3 = make_3x3();
  Vector c3 = Vector::Ones(3);
  CHECK(reaction_vector(net3, c3).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector x2 = random_state(rng, 2);
    CHECK((reaction_vector(net2, x2) - rhs_2x2_oracle(1, 1, x2)).cwiseAbs().maxCoeff() < 1e-13);
    const Vector x3 = random_state(rng, 3);
    CHECK((reaction_vector(net3, x3) - rhs_3x3_oracle(1, 1, 1, x3)).cwiseAbs().maxCoeff() < 1e-13);
  }

  const std::vector<int> alphas{2, 1, 3};
  const std::vector<double> ks{0.5, 2.0, 1.25};
  const auto cyc = make_cycle(alphas, ks);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector a = random_state(rng, 3);
    CHECK((reaction_vector(cyc, a) - rhs_cycle_oracle(alphas, ks, a)).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("reaction_vector dimension mismatch and the 0^0 convention") {
  CHECK_THROWS_AS(reaction_vector(make_2x2(), Vector::Ones(3)), DimensionError);

  // States with zero components where the exponent is zero must not NaN.
  const auto net3 = make_3x3();
  Vector c(3);
  c << 0.0, 0.0, 2.0;
  const Vector R = reaction_vector(net3, c);
  CHECK(R.allFinite());
  CHECK(R.cwiseAbs().maxCoeff() == 0.0);
  Vector one(1);
  one << 0.0;
  Complex empty = make_complex({0});
  CHECK(monomial(one, empty.coeffs) == 1.0);
}

TEST_CASE("reaction_vector is exactly homogeneous in the rates") {
  std::mt19937_64 rng(11);
  auto doubled = make_3x3(2.0, 2.0, 2.0);
  const auto base = make_3x3();
  for (int trial = 0; trial < 100; ++trial) {
    const Vector c = random_state(rng, 3);
    const Vector r1 = reaction_vector(base, c);
    const Vector r2 = reaction_vector(doubled, c);
    for (int i = 0; i < 3; ++i) CHECK(r2[i] == 2.0 * r1[i]);
  }
}

TEST_CASE("wegscheider_matrix rows are the net stoichiometric changes") {
  Eigen::MatrixXi W2 = wegscheider_matrix(make_2x2());
  REQUIRE(W2.rows() == 2);
  CHECK(W2(0, 0) == -1);
  CHECK(W2(0, 1) == 1);
  CHECK(W2(1, 0) == 1);
  CHECK(W2(1, 1) == -1);

  Eigen::MatrixXi Wc = wegscheider_matrix(make_cycle({1, 1, 1}, {1, 1, 1}));
  Eigen::MatrixXi Wc_expect(3, 3);
  Wc_expect << -1, 1, 0, 0, -1, 1, 1, 0, -1;
  CHECK(Wc == Wc_expect);

  Eigen::MatrixXi W3 = wegscheider_matrix(make_3x3());
  Eigen::MatrixXi W3_expect(3, 3);
  W3_expect << -1, 1, 1, 0, 1, -1, 1, -2, 0;
  CHECK(W3 == W3_expect);

  CHECK(W3.rows() == make_3x3().reaction_count());
}

TEST_CASE("conservation_basis produces the exact rational kernels") {
  const auto b2 = conservation_basis(make_2x2());
  REQUIRE(b2.m() == 1);
  CHECK(b2.rows[0][0] == Rational(1));
  CHECK(b2.rows[0][1] == Rational(1));

  const auto b3 = conservation_basis(make_3x3());
  REQUIRE(b3.m() == 1);
  CHECK(b3.rows[0][0] == Rational(2));
  CHECK(b3.rows[0][1] == Rational(1));
  CHECK(b3.rows[0][2] == Rational(1));

  const auto bc = conservation_basis(make_cycle({2, 1}, {1.0, 2.0}));
  REQUIRE(bc.m() == 1);
  // (1/alpha_1, ..., 1/alpha_N) up to scaling; the RREF convention scales the
  // last coordinate to one.
  CHECK(bc.rows[0][0] == Rational(1, 2));
  CHECK(bc.rows[0][1] == Rational(1));

  const auto bg = conservation_basis(make_generalized_3x3(2));
  REQUIRE(bg.m() == 1);
  CHECK(bg.rows[0][0] == Rational(3));

  // Exact rank via rational elimination.
  CHECK(rational_rank(b3.rows) == b3.m());
  CHECK(rational_rank(b2.rows) == b2.m());

  // m = 0 for the one-species autocatalytic loop.
  Network auto1;
  auto1.species = {"A"};
  auto1.reactions = {{make_complex({1}), make_complex({2}), 1.0},
                     {make_complex({2}), make_complex({1}), 1.0}};
  auto1.diffusion = Vector::Ones(1);
  CHECK(conservation_basis(auto1).m() == 0);
}

TEST_CASE("Q annihilates the reaction vector on random states") {
  std::mt19937_64 rng(23);
  const std::vector<Network> nets = {make_2x2(), make_3x3(), make_cycle({1, 1, 1}, {1, 1, 1}),
                                     make_cycle({2, 1}, {1.0, 2.0}), make_generalized_3x3(2)};
  for (const auto& net : nets) {
    const auto basis = conservation_basis(net);
    REQUIRE(basis.m() >= 1);
    for (int trial = 0; trial < 2000; ++trial) {
      const Vector c = random_state(rng, net.species_count(), 0.0, 5.0);
      const double bound = 1e-10 * (1.0 + c.norm());
      CHECK((basis.Q * reaction_vector(net, c)).cwiseAbs().maxCoeff() < bound);
    }
  }
}

TEST_CASE("mass_vector evaluates Q c0") {
  const auto b3 = conservation_basis(make_3x3());
  Vector c0 = Vector::Ones(3);
  CHECK(mass_vector(b3, c0)[0] == Catch::Approx(4.0).margin(1e-15));
  CHECK(mass_vector(b3, Vector::Zero(3))[0] == 0.0);

  const auto b2 = conservation_basis(make_2x2());
  Vector c2(2);
  c2 << 1.5, 0.5;
  CHECK(mass_vector(b2, c2)[0] == Catch::Approx(2.0).margin(1e-15));
}

TEST_CASE("rational kernel: exact annihilation and rank-nullity on random matrices") {
  std::mt19937_64 rng(97);
  std::uniform_int_distribution<int> entry(-3, 3);
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 5);
    const int cols = 1 + static_cast<int>(rng() % 5);
    RationalMatrix A(rows, std::vector<Rational>(cols));
    for (auto& row : A)
      for (auto& x : row) x = Rational(entry(rng));
    const int rank = rational_rank(A);
    const auto kernel = rational_kernel(A, cols);
    CHECK(rank + static_cast<int>(kernel.size()) == cols);
    for (const auto& v : kernel) {
      for (int r = 0; r < rows; ++r) {
        Rational dot(0);
        for (int c = 0; c < cols; ++c) dot += A[r][c] * v[c];
        CHECK(dot == Rational(0));
      }
    }
    // Kernel rows are independent by the free-variable construction.
    if (!kernel.empty()) CHECK(rational_rank(kernel) == static_cast<int>(kernel.size()));
  }
}

TEST_CASE("reaction_jacobian matches finite differences") {
  std::mt19937_64 rng(5);
  const auto net = make_3x3(0.7, 1.3, 2.1);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector c = random_state(rng, 3, 0.1, 2.0);
    const Eigen::MatrixXd J = reaction_jacobian(net, c);
    for (int j = 0; j < 3; ++j) {
      const double h = 1e-6;
      Vector cp = c, cm = c;
      cp[j] += h;
      cm[j] -= h;
      const Vector col = (reaction_vector(net, cp) - reaction_vector(net, cm)) / (2.0 * h);
      CHECK((J.col(j) - col).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}
