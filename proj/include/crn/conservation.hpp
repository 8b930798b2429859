#pragma once

#include <boost/rational.hpp>

#include "crn/network.hpp"

namespace crn {

using Rational = boost::rational<long long>;
using RationalMatrix = std::vector<std::vector<Rational>>;

namespace detail {

// Mixed-type boost::rational comparisons recurse on this toolchain; rationals
// are kept normalized, so the numerator carries the sign and zero tests.
inline bool is_zero(const Rational& x) { return x.numerator() == 0; }
inline bool is_negative(const Rational& x) { return x.numerator() < 0; }

// In-place reduced row echelon form over the rationals. Returns pivot columns.
inline std::vector<int> rref(RationalMatrix& A) {
  std::vector<int> pivots;
  if (A.empty()) return pivots;
  const int rows = static_cast<int>(A.size());
  const int cols = static_cast<int>(A[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (!is_zero(A[i][c])) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(A[r], A[p]);
    const Rational inv = A[r][c];
    for (int j = 0; j < cols; ++j) A[r][j] /= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || is_zero(A[i][c])) continue;
      const Rational f = A[i][c];
      for (int j = 0; j < cols; ++j) A[i][j] -= f * A[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace detail

/// Exact rank via rational Gaussian elimination.
inline int rational_rank(RationalMatrix A) { return static_cast<int>(detail::rref(A).size()); }

/// Basis of ker(A) (A acting on column vectors of length ncols), one row per
/// basis vector, in the reduced-row-echelon free-variable convention.
inline RationalMatrix rational_kernel(RationalMatrix A, int ncols) {
  const auto pivots = detail::rref(A);
  std::vector<bool> is_pivot(ncols, false);
  for (int c : pivots) is_pivot[c] = true;
  RationalMatrix basis;
  for (int f = 0; f < ncols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(ncols, Rational(0));
    v[f] = 1;
    for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -A[r][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Conservation laws of a network: rows of Q span ker(W) exactly, so
/// Q R(c) = 0 for every state and Q c is constant along trajectories.
struct ConservationBasis {
  RationalMatrix rows;    // m x N, exact
  Eigen::MatrixXd Q;      // same matrix in doubles
  std::vector<int> row_signs;  // +-1 applied to the raw kernel basis

  int m() const { return static_cast<int>(rows.size()); }
};

/// Exact rational kernel basis of the Wegscheider matrix. Rows are flipped so
/// that each sums nonnegative, making Q c0 >= 0 for nonnegative states whenever
/// the flipped row is itself nonnegative. When m > 1 the basis is the RREF
/// free-variable one; any other basis differs by an invertible recombination.
inline ConservationBasis conservation_basis(const Network& net) {
  const int n = net.species_count();
  const Eigen::MatrixXi W = wegscheider_matrix(net);
  RationalMatrix A(W.rows(), std::vector<Rational>(n));
  for (int r = 0; r < W.rows(); ++r)
    for (int c = 0; c < n; ++c) A[r][c] = Rational(W(r, c));

  ConservationBasis basis;
  basis.rows = rational_kernel(std::move(A), n);
  for (auto& row : basis.rows) {
    Rational sum(0);
    for (const auto& x : row) sum += x;
    const int sign = detail::is_negative(sum) ? -1 : 1;
    basis.row_signs.push_back(sign);
    if (sign < 0)
      for (auto& x : row) x = -x;
  }
  basis.Q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.rows.size()), n);
  for (size_t r = 0; r < basis.rows.size(); ++r)
    for (int c = 0; c < n; ++c)
      basis.Q(static_cast<Eigen::Index>(r), c) =
          boost::rational_cast<double>(basis.rows[r][c]);
  return basis;
}

/// M = Q c0.
inline Vector mass_vector(const ConservationBasis& basis, const Vector& c0) {
  if (basis.Q.cols() != c0.size()) throw DimensionError("state length does not match basis");
  return basis.Q * c0;
}

}  // namespace crn
