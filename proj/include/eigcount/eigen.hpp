#pragma once

// Dense Hermitian eigensolver: Householder reduction to a complex Hermitian
// tridiagonal, a diagonal phase similarity to make it real symmetric, then
// implicit-shift QL. Spectral counting helpers sit on top.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "eigcount/error.hpp"
#include "eigcount/matrix.hpp"

namespace eigcount {

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // column j pairs with values[j]
};

struct SpectrumSummary {
  std::vector<double> eigenvalues;  // ascending
  std::map<double, int> count_below_eps;
  double norm = 0.0;
};

struct Inertia {
  int negative = 0;
  int zero = 0;
  int positive = 0;

  int dim() const { return negative + zero + positive; }
  friend bool operator==(const Inertia&, const Inertia&) = default;
  Inertia& operator+=(const Inertia& o) {
    negative += o.negative;
    zero += o.zero;
    positive += o.positive;
    return *this;
  }
  friend Inertia operator+(Inertia a, const Inertia& b) { return a += b; }
};

namespace detail {

constexpr double kDeflationScale = 1e-13;
constexpr int kMaxQlIterations = 50;

// Implicit-shift QL on a real symmetric tridiagonal (d: diagonal, e[i]:
// coupling between i and i+1). When z is non-null its columns are rotated
// along with the iteration (z is n x n real, row-major).
inline void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>* z,
                           double tol) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        if (std::abs(e[m]) <= tol) break;
      }
      if (m != l) {
        if (iter++ == kMaxQlIterations)
          throw Error(Errc::ConvergenceFailure, "QL iteration did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        bool underflow = false;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (z != nullptr) {
            auto& zz = *z;
            for (int k = 0; k < n; ++k) {
              f = zz[k * n + i + 1];
              zz[k * n + i + 1] = s * zz[k * n + i] + c * f;
              zz[k * n + i] = c * zz[k * n + i] - s * f;
            }
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

inline EigenDecomposition hermitian_eig(const HermitianMatrix& a, bool want_vectors) {
  const std::size_t n = a.dim();
  CMatrix t = a.matrix();
  CMatrix q = want_vectors ? CMatrix::identity(n) : CMatrix();
  std::vector<cplx> v(n), w(n), qv(n);

  // Householder: zero column k below the first subdiagonal.
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(t(i, k));
    const double tail2 = xnorm2 - std::norm(t(k + 1, k));
    if (tail2 == 0.0) continue;
    const double xnorm = std::sqrt(xnorm2);
    const cplx x0 = t(k + 1, k);
    const cplx phase = std::abs(x0) == 0.0 ? cplx(1.0) : x0 / std::abs(x0);
    std::fill(v.begin(), v.end(), cplx{});
    for (std::size_t i = k + 1; i < n; ++i) v[i] = t(i, k);
    v[k + 1] += phase * xnorm;
    double vv = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vv += std::norm(v[i]);
    const double tau = 2.0 / vv;

    // A <- H A H with H = I - tau v v*, as A - v q* - q v*.
    for (std::size_t i = 0; i < n; ++i) {
      cplx acc{};
      for (std::size_t j = k + 1; j < n; ++j) acc += t(i, j) * v[j];
      w[i] = acc;
    }
    cplx vw{};
    for (std::size_t i = k + 1; i < n; ++i) vw += std::conj(v[i]) * w[i];
    const double half = 0.5 * tau * tau * vw.real();
    for (std::size_t i = 0; i < n; ++i) w[i] = tau * w[i] - half * v[i];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        t(i, j) -= v[i] * std::conj(w[j]) + w[i] * std::conj(v[j]);
      }
    }

    if (want_vectors) {
      for (std::size_t i = 0; i < n; ++i) {
        cplx acc{};
        for (std::size_t j = k + 1; j < n; ++j) acc += q(i, j) * v[j];
        qv[i] = acc;
      }
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = k + 1; j < n; ++j) q(i, j) -= tau * qv[i] * std::conj(v[j]);
    }
  }

  std::vector<double> d(n), e(n, 0.0);
  std::vector<cplx> phase(n, cplx(1.0));
  for (std::size_t i = 0; i < n; ++i) d[i] = t(i, i).real();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const cplx off = t(i + 1, i);
    const double mag = std::abs(off);
    e[i] = mag;
    phase[i + 1] = mag == 0.0 ? phase[i] : phase[i] * off / mag;
  }

  std::vector<double> z;
  if (want_vectors) {
    z.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  }
  const double tol = kDeflationScale * a.frobenius_norm();
  tridiagonal_ql(d, e, want_vectors ? &z : nullptr, tol);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return d[x] < d[y]; });

  EigenDecomposition out;
  out.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.values[j] = d[order[j]];
  if (want_vectors) {
    // vectors = Q * diag(phase) * Z, columns permuted into ascending order.
    out.vectors = CMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t col = order[j];
        cplx acc{};
        for (std::size_t l = 0; l < n; ++l) acc += q(i, l) * phase[l] * z[l * n + col];
        out.vectors(i, j) = acc;
      }
    }
  }
  return out;
}

}  // namespace detail

/// All eigenvalues and orthonormal eigenvectors, eigenvalues ascending.
inline EigenDecomposition eigh(const HermitianMatrix& a) { return detail::hermitian_eig(a, true); }

/// Eigenvalues only, ascending.
inline std::vector<double> eigvalsh(const HermitianMatrix& a) {
  return detail::hermitian_eig(a, false).values;
}

/// Spectrum summary; `eps_list` entries populate count_below_eps = C_eps(A).
inline SpectrumSummary eigenvalues(const HermitianMatrix& a, std::span<const double> eps_list = {}) {
  SpectrumSummary s;
  s.eigenvalues = eigvalsh(a);
  s.norm = std::max(std::abs(s.eigenvalues.front()), std::abs(s.eigenvalues.back()));
  for (double eps : eps_list) {
    detail::require(eps > 0.0, Errc::InvalidArgument, "eps must be > 0");
    int c = 0;
    for (double l : s.eigenvalues) c += std::abs(l) < eps ? 1 : 0;
    s.count_below_eps[eps] = c;
  }
  return s;
}

/// |{lambda : |lambda - energy| < eps}| over a precomputed spectrum.
inline int count_in_interval(std::span<const double> spectrum, double energy, double eps) {
  detail::require(eps > 0.0, Errc::InvalidArgument, "eps must be > 0");
  int c = 0;
  for (double l : spectrum) c += std::abs(l - energy) < eps ? 1 : 0;
  return c;
}

inline int count_in_interval(const HermitianMatrix& a, double energy, double eps) {
  detail::require(eps > 0.0, Errc::InvalidArgument, "eps must be > 0");
  return count_in_interval(eigvalsh(a), energy, eps);
}

/// C_eps(A): eigenvalues in the open interval (-eps, eps).
inline int count_small(const HermitianMatrix& a, double eps) { return count_in_interval(a, 0.0, eps); }

/// B_a(A): eigenvalues in the closed ray [a, inf).
inline int count_at_least(std::span<const double> spectrum, double a) {
  detail::require(a > 0.0, Errc::InvalidArgument, "threshold a must be > 0");
  int c = 0;
  for (double l : spectrum) c += l >= a ? 1 : 0;
  return c;
}

inline int count_at_least(const HermitianMatrix& a, double threshold) {
  detail::require(threshold > 0.0, Errc::InvalidArgument, "threshold a must be > 0");
  return count_at_least(eigvalsh(a), threshold);
}

/// Spectral norm of a Hermitian matrix, max |lambda|.
inline double operator_norm(const HermitianMatrix& a) {
  const auto ev = eigvalsh(a);
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

/// Spectral norm of a general matrix, sqrt(lambda_max(M* M)).
inline double operator_norm(const CMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const CMatrix g = m.rows() <= m.cols() ? m * m.adjoint() : m.adjoint() * m;
  const auto ev = eigvalsh(HermitianMatrix(g));
  return std::sqrt(std::max(0.0, ev.back()));
}

inline double lambda_min(const HermitianMatrix& a) { return eigvalsh(a).front(); }
inline double lambda_max(const HermitianMatrix& a) { return eigvalsh(a).back(); }

inline double default_zero_tol(const HermitianMatrix& a) { return 1e-10 * a.frobenius_norm(); }

/// Counts eigenvalues in (-inf, -tol), [-tol, tol], (tol, inf).
inline Inertia inertia(const HermitianMatrix& a, std::optional<double> zero_tol = std::nullopt) {
  const double tol = zero_tol.value_or(default_zero_tol(a));
  detail::require(tol >= 0.0, Errc::InvalidArgument, "zero_tol must be >= 0");
  Inertia in;
  for (double l : eigvalsh(a)) {
    if (l < -tol)
      ++in.negative;
    else if (l > tol)
      ++in.positive;
    else
      ++in.zero;
  }
  return in;
}

}  // namespace eigcount
