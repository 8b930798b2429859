#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace crn {

using Vector = Eigen::VectorXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct NonConvergence : Error {
  using Error::Error;
};
struct NotComplexBalanced : Error {
  using Error::Error;
};
struct StepSizeUnderflow : Error {
  using Error::Error;
};
struct StepRejected : Error {
  using Error::Error;
};
struct NonFiniteState : Error {
  using Error::Error;
};
struct NonFiniteField : Error {
  using Error::Error;
};
struct SupportEnumerationTooLarge : Error {
  using Error::Error;
};

/// A chemical complex: one stoichiometric coefficient per species.
struct Complex {
  Eigen::VectorXi coeffs;

  bool operator==(const Complex& other) const { return coeffs == other.coeffs; }
};

/// y -> y' with mass-action rate constant k (1/time after nondimensionalization).
struct Reaction {
  Complex source;
  Complex target;
  double rate = 0.0;
};

/// Mass-action reaction network over N named species, with per-species
/// diffusion coefficients for the reaction-diffusion setting.
struct Network {
  std::vector<std::string> species;  // index = declaration order
  std::vector<Reaction> reactions;
  Vector diffusion;  // d_i > 0

  int species_count() const { return static_cast<int>(species.size()); }
  int reaction_count() const { return static_cast<int>(reactions.size()); }

  int species_index(const std::string& name) const {
    for (int i = 0; i < species_count(); ++i)
      if (species[i] == name) return i;
    throw DomainError("unknown species '" + name + "'");
  }
};

/// c^y = prod_i c_i^{y_i}, with the empty product giving 0^0 = 1.
inline double monomial(const Vector& c, const Eigen::VectorXi& y) {
  double m = 1.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    for (int e = 0; e < y[i]; ++e) m *= c[i];
  return m;
}

/// Distinct complexes in first-occurrence order (source before target, by reaction index).
inline std::vector<Complex> distinct_complexes(const Network& net) {
  std::vector<Complex> out;
  auto push = [&](const Complex& y) {
    for (const auto& z : out)
      if (z == y) return;
    out.push_back(y);
  };
  for (const auto& r : net.reactions) {
    push(r.source);
    push(r.target);
  }
  return out;
}

/// Checks the three well-formedness requirements plus positivity of rates and
/// diffusion coefficients. Diagnostic: violations are returned, never thrown.
inline std::vector<std::string> validate_network(const Network& net) {
  std::vector<std::string> v;
  const int n = net.species_count();
  if (net.reactions.empty()) v.push_back("network has no reactions");
  if (net.diffusion.size() != n) {
    v.push_back("diffusion vector has wrong length");
  } else {
    for (int i = 0; i < n; ++i)
      if (!(net.diffusion[i] > 0.0))
        v.push_back("diffusion coefficient of species " + net.species[i] + " must be positive");
  }
  std::vector<bool> used(n, false);
  for (int r = 0; r < net.reaction_count(); ++r) {
    const auto& rx = net.reactions[r];
    const std::string at = " at reaction index " + std::to_string(r);
    if (rx.source.coeffs.size() != n || rx.target.coeffs.size() != n) {
      v.push_back("complex length mismatch" + at);
      continue;
    }
    if (rx.source.coeffs.minCoeff() < 0 || rx.target.coeffs.minCoeff() < 0)
      v.push_back("negative stoichiometric coefficient" + at);
    if (rx.source == rx.target) v.push_back("trivial reaction" + at);
    if (!(rx.rate > 0.0)) v.push_back("rate must be positive" + at);
    for (int i = 0; i < n; ++i)
      if (rx.source.coeffs[i] > 0 || rx.target.coeffs[i] > 0) used[i] = true;
  }
  for (int i = 0; i < n; ++i)
    if (!used[i]) v.push_back("species " + net.species[i] + " unused");
  return v;
}

/// Mass-action reaction vector R(c) = sum_r k_r c^{y_r} (y_r' - y_r).
inline Vector reaction_vector(const Network& net, const Vector& c) {
  const int n = net.species_count();
  if (c.size() != n) throw DimensionError("state length does not match species count");
  Vector R = Vector::Zero(n);
  for (const auto& rx : net.reactions) {
    const double flux = rx.rate * monomial(c, rx.source.coeffs);
    for (int i = 0; i < n; ++i) {
      const int d = rx.target.coeffs[i] - rx.source.coeffs[i];
      if (d != 0) R[i] += flux * d;
    }
  }
  return R;
}

/// Wegscheider matrix: row r equals (y_r' - y_r)^T.
inline Eigen::MatrixXi wegscheider_matrix(const Network& net) {
  const int n = net.species_count();
  Eigen::MatrixXi W(net.reaction_count(), n);
  for (int r = 0; r < net.reaction_count(); ++r)
    W.row(r) = (net.reactions[r].target.coeffs - net.reactions[r].source.coeffs).transpose();
  return W;
}

inline Complex make_complex(std::initializer_list<int> ys) {
  Complex y;
  y.coeffs = Eigen::VectorXi(static_cast<Eigen::Index>(ys.size()));
  Eigen::Index i = 0;
  for (int v : ys) y.coeffs[i++] = v;
  return y;
}

/// 2A <-> A+B (the detailed balanced two-species system with boundary equilibrium (0,M)).
inline Network make_2x2(double k1 = 1.0, double k2 = 1.0, double da = 1.0, double db = 1.0) {
  Network net;
  net.species = {"A", "B"};
  net.reactions = {{make_complex({2, 0}), make_complex({1, 1}), k1},
                   {make_complex({1, 1}), make_complex({2, 0}), k2}};
  net.diffusion = Vector(2);
  net.diffusion << da, db;
  return net;
}

/// A -> B+C -> 2B -> A (complex balanced three-species system, boundary equilibrium (0,0,M)).
inline Network make_3x3(double k1 = 1.0, double k2 = 1.0, double k3 = 1.0,
                        double da = 1.0, double db = 1.0, double dc = 1.0) {
  Network net;
  net.species = {"A", "B", "C"};
  net.reactions = {{make_complex({1, 0, 0}), make_complex({0, 1, 1}), k1},
                   {make_complex({0, 1, 1}), make_complex({0, 2, 0}), k2},
                   {make_complex({0, 2, 0}), make_complex({1, 0, 0}), k3}};
  net.diffusion = Vector(3);
  net.diffusion << da, db, dc;
  return net;
}

/// A -> alpha B + C -> (alpha+1) B -> A; alpha = 1 recovers make_3x3.
inline Network make_generalized_3x3(int alpha, double k1 = 1.0, double k2 = 1.0, double k3 = 1.0,
                                    double da = 1.0, double db = 1.0, double dc = 1.0) {
  if (alpha < 1) throw DomainError("alpha must be a positive integer");
  Network net;
  net.species = {"A", "B", "C"};
  Complex ya = make_complex({1, 0, 0});
  Complex ybc = make_complex({0, alpha, 1});
  Complex ybb = make_complex({0, alpha + 1, 0});
  net.reactions = {{ya, ybc, k1}, {ybc, ybb, k2}, {ybb, ya, k3}};
  net.diffusion = Vector(3);
  net.diffusion << da, db, dc;
  return net;
}

/// Cycle alpha_1 A_1 -> alpha_2 A_2 -> ... -> alpha_N A_N -> alpha_1 A_1.
inline Network make_cycle(const std::vector<int>& alphas, const std::vector<double>& ks,
                          const std::vector<double>& ds = {}) {
  const int n = static_cast<int>(alphas.size());
  if (n < 2) throw DomainError("a cycle needs at least two species");
  if (ks.size() != alphas.size()) throw DimensionError("alphas/ks length mismatch");
  Network net;
  net.diffusion = Vector::Ones(n);
  for (int i = 0; i < n; ++i) {
    if (alphas[i] < 1) throw DomainError("alpha must be a positive integer");
    net.species.push_back("A" + std::to_string(i + 1));
    if (!ds.empty()) net.diffusion[i] = ds.at(i);
  }
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    Complex src, dst;
    src.coeffs = Eigen::VectorXi::Zero(n);
    dst.coeffs = Eigen::VectorXi::Zero(n);
    src.coeffs[i] = alphas[i];
    dst.coeffs[j] = alphas[j];
    net.reactions.push_back({src, dst, ks[i]});
  }
  return net;
}

}  // namespace crn
