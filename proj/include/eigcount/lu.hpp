#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "eigcount/error.hpp"
#include "eigcount/matrix.hpp"

namespace eigcount {

/// Smallest admissible |pivot| relative to the largest entry magnitude.
inline constexpr double kInvertibilityThreshold = 1e-12;

/// Partial-pivoting LU factorization P A = L U of a square complex matrix.
/// L (unit lower) and U share storage in `lu`.
struct LuDecomposition {
  CMatrix lu;
  std::vector<std::size_t> perm;  // row i of PA is row perm[i] of A
  int sign = 1;
  double min_pivot = 0.0;
  double max_entry = 0.0;

  bool invertible() const {
    return max_entry > 0.0 && min_pivot >= kInvertibilityThreshold * max_entry;
  }
};

inline LuDecomposition lu_decompose(const CMatrix& a) {
  detail::require(a.square(), Errc::DimensionMismatch, "LU requires a square matrix");
  const std::size_t n = a.rows();
  LuDecomposition f{a, std::vector<std::size_t>(n), 1, 0.0, a.max_abs()};
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  CMatrix& m = f.lu;
  double min_piv = n == 0 ? 0.0 : INFINITY;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(m(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      std::swap(f.perm[k], f.perm[p]);
      f.sign = -f.sign;
    }
    min_piv = std::min(min_piv, best);
    if (best == 0.0) continue;
    const cplx piv = m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx factor = m(i, k) / piv;
      m(i, k) = factor;
      if (factor == cplx{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= factor * m(k, j);
    }
  }
  f.min_pivot = min_piv;
  return f;
}

/// Solves A X = B given the factorization of A. Assumes invertibility.
inline CMatrix lu_solve(const LuDecomposition& f, const CMatrix& b) {
  const std::size_t n = f.lu.rows();
  detail::require(b.rows() == n, Errc::DimensionMismatch, "right-hand side row count mismatch");
  CMatrix x(n, b.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) x(i, j) = b(f.perm[i], j);
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      cplx acc = x(i, j);
      for (std::size_t k = 0; k < i; ++k) acc -= f.lu(i, k) * x(k, j);
      x(i, j) = acc;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      cplx acc = x(ii, j);
      for (std::size_t k = ii + 1; k < n; ++k) acc -= f.lu(ii, k) * x(k, j);
      x(ii, j) = acc / f.lu(ii, ii);
    }
  }
  return x;
}

/// Inverse of a general square matrix; throws `code` naming `what` when the
/// matrix fails the invertibility threshold.
inline CMatrix inverse(const CMatrix& a, Errc code = Errc::SingularMatrix,
                       const std::string& what = "matrix") {
  const auto f = lu_decompose(a);
  if (!f.invertible())
    throw Error(code, what + " is not invertible (min pivot " + std::to_string(f.min_pivot) +
                          ", max entry " + std::to_string(f.max_entry) + ")");
  return lu_solve(f, CMatrix::identity(a.rows()));
}

inline HermitianMatrix inverse(const HermitianMatrix& a, Errc code = Errc::SingularMatrix,
                               const std::string& what = "matrix") {
  return HermitianMatrix(inverse(a.matrix(), code, what));
}

inline bool is_invertible(const CMatrix& a) { return lu_decompose(a).invertible(); }
inline bool is_invertible(const HermitianMatrix& a) { return is_invertible(a.matrix()); }

struct Determinant {
  double value = 0.0;
  bool singular = false;  // failed the pivot threshold; value forced to 0
};

/// Complex determinant of a general square matrix via pivoted LU.
inline cplx complex_determinant(const CMatrix& a) {
  const auto f = lu_decompose(a);
  cplx det = static_cast<double>(f.sign);
  for (std::size_t i = 0; i < a.rows(); ++i) det *= f.lu(i, i);
  return det;
}

/// Real determinant of a Hermitian matrix. An imaginary residue up to
/// 1e-9 |det| is discarded; anything larger signals a numerical failure.
inline Determinant determinant(const HermitianMatrix& a) {
  const auto f = lu_decompose(a.matrix());
  if (!f.invertible()) return {0.0, true};
  cplx det = static_cast<double>(f.sign);
  for (std::size_t i = 0; i < a.dim(); ++i) det *= f.lu(i, i);
  if (std::abs(det.imag()) > 1e-9 * std::abs(det))
    throw Error(Errc::NumericalFailure, "Hermitian determinant has a large imaginary residue");
  return {det.real(), false};
}

}  // namespace eigcount
