#pragma once

// Seeded test-instance generators used by the property suites.

#include <cmath>
#include <span>
#include <vector>

#include "eigcount/eigen.hpp"
#include "eigcount/matrix.hpp"
#include "eigcount/rng.hpp"

namespace eigcount {

/// Haar-like unitary from Gram-Schmidt on a complex Gaussian matrix.
inline CMatrix random_unitary(CounterRng& rng, std::size_t n) {
  CMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        cplx dot{};
        for (std::size_t i = 0; i < n; ++i) dot += std::conj(g(i, k)) * g(i, j);
        for (std::size_t i = 0; i < n; ++i) g(i, j) -= dot * g(i, k);
      }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += std::norm(g(i, j));
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) g(i, j) /= nrm;
  }
  return g;
}

/// U diag(spectrum) U* with a random unitary U.
inline HermitianMatrix hermitian_with_spectrum(CounterRng& rng, std::span<const double> spectrum) {
  const std::size_t n = spectrum.size();
  CMatrix u = random_unitary(rng, n);
  CMatrix ud = u;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) ud(i, j) *= spectrum[j];
  return HermitianMatrix(ud * u.adjoint());
}

/// GUE-style matrix with entries of unit variance scaled by `scale`.
inline HermitianMatrix random_hermitian(CounterRng& rng, std::size_t n, double scale = 1.0) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = scale * rng.normal();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx v = scale * cplx(rng.normal(), rng.normal()) / std::sqrt(2.0);
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
  return HermitianMatrix(m);
}

/// Hermitian matrix with spectral norm exactly `norm`.
inline HermitianMatrix random_hermitian_with_norm(CounterRng& rng, std::size_t n, double norm) {
  const HermitianMatrix h = random_hermitian(rng, n);
  const double cur = operator_norm(h);
  return cur == 0.0 ? h : h.scaled(norm / cur);
}

/// General complex matrix with spectral norm exactly `norm`.
inline CMatrix random_matrix_with_norm(CounterRng& rng, std::size_t rows, std::size_t cols,
                                       double norm) {
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = cplx(rng.normal(), rng.normal());
  const double cur = operator_norm(m);
  if (cur > 0.0) m *= norm / cur;
  return m;
}

/// Positive-definite matrix with eigenvalues drawn uniformly in [lo, hi].
inline HermitianMatrix random_positive_definite(CounterRng& rng, std::size_t n, double lo,
                                                double hi) {
  std::vector<double> spec(n);
  for (auto& s : spec) s = rng.uniform(lo, hi);
  return hermitian_with_spectrum(rng, spec);
}

inline double random_sign(CounterRng& rng) { return rng.uniform() < 0.5 ? -1.0 : 1.0; }

inline std::size_t random_index(CounterRng& rng, std::size_t lo, std::size_t hi_inclusive) {
  return lo + static_cast<std::size_t>(rng.next_u64() % (hi_inclusive - lo + 1));
}

}  // namespace eigcount
