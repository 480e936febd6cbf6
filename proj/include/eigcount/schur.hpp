#pragma once

#include "eigcount/error.hpp"
#include "eigcount/lu.hpp"
#include "eigcount/matrix.hpp"

namespace eigcount {

/// A / A[alpha] = A[alpha^c] - A[alpha^c, alpha] A[alpha]^{-1} A[alpha, alpha^c].
/// Throws SingularBlock when A[alpha] fails the invertibility threshold.
inline HermitianMatrix schur_complement(const HermitianMatrix& a, const IndexSet& alpha) {
  detail::require(alpha.universe() == a.dim(), Errc::DimensionMismatch,
                  "index set universe does not match matrix dimension");
  detail::require(!alpha.empty(), Errc::InvalidArgument, "Schur complement block must be nonempty");
  detail::require(alpha.size() < a.dim(), Errc::InvalidArgument,
                  "Schur complement of the full matrix is empty");
  const IndexSet rest = alpha.complement();
  const CMatrix block = submatrix(a, alpha, alpha);
  const auto f = lu_decompose(block);
  if (!f.invertible()) throw Error(Errc::SingularBlock, "principal block A[alpha] is not invertible");
  const CMatrix coupling = submatrix(a, alpha, rest);
  const CMatrix solved = lu_solve(f, coupling);
  return HermitianMatrix(submatrix(a, rest, rest) - submatrix(a, rest, alpha) * solved);
}

/// (A^{-1}[gamma])^{-1}; equals A / A[gamma^c] when gamma^c is nonempty.
inline HermitianMatrix inverse_compression(const HermitianMatrix& a, const IndexSet& gamma) {
  const HermitianMatrix g = inverse(a, Errc::SingularMatrix, "A");
  return inverse(principal(g, gamma), Errc::SingularPrincipalSubmatrix, "A^{-1}[gamma]");
}

/// Shifted-resolvent form of (A + J)^{-1}:
///   R - R (R + S)^{-1} R,  R = (A - a)^{-1},  S = (J + a)^{-1}.
inline HermitianMatrix woodbury_resolvent(const HermitianMatrix& a, const HermitianMatrix& j,
                                          double shift) {
  detail::require(a.dim() == j.dim(), Errc::DimensionMismatch, "A and J must have equal dimension");
  detail::require(is_invertible(a + j), Errc::SingularBlock, "A + J is not invertible");
  const CMatrix r = inverse(a.shifted(-shift).matrix(), Errc::SingularBlock, "A - a");
  const CMatrix s = inverse(j.shifted(shift).matrix(), Errc::SingularBlock, "J + a");
  const CMatrix mid = inverse(r + s, Errc::SingularBlock, "(A - a)^{-1} + (J + a)^{-1}");
  return HermitianMatrix(r - r * mid * r);
}

}  // namespace eigcount
