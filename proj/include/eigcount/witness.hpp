#pragma once

// Green-function witnesses for small eigenvalues.
//
// A pair of index sets (alpha, beta) with |alpha| = |beta| = m witnesses at
// level K when
//     G[alpha, beta] G[beta, alpha] > (K / eps)^2 I,     G = A^{-1}.
// At K = 1 a witness certifies C_eps(A) >= m. Conversely C_eps(A) >= m
// guarantees a witness at K = C_m / N with C_m = 1 / (m! 2^(m-1)).

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eigcount/eigen.hpp"
#include "eigcount/error.hpp"
#include "eigcount/lu.hpp"
#include "eigcount/matrix.hpp"
#include "eigcount/schur.hpp"

namespace eigcount {

/// Margins at or below this value are indeterminate and never certify.
inline constexpr double kIndeterminateMargin = 1e-12;

/// Exhaustive witness searches are capped at this many candidate pairs.
inline constexpr double kWitnessSearchBudget = 1e7;

struct CountingConstant {
  int m = 1;
  int n = 1;
  double c_m = 1.0;  // 1 / (m! 2^(m-1))
  double k = 1.0;    // c_m / n
};

inline CountingConstant counting_constant(int m, int n) {
  detail::require(m >= 1 && n >= 1, Errc::InvalidArgument, "m and N must be >= 1");
  detail::require(m <= 20, Errc::InvalidArgument, "m > 20 overflows the counting constant");
  double denom = 1.0;
  for (int i = 2; i <= m; ++i) denom *= i;
  denom *= std::ldexp(1.0, m - 1);
  CountingConstant c{m, n, 1.0 / denom, 0.0};
  c.k = c.c_m / n;
  return c;
}

struct WitnessCertificate {
  IndexSet alpha;
  IndexSet beta;
  int m = 0;
  double eps = 0.0;
  double k = 0.0;
  double margin = 0.0;  // lambda_min(G[a,b] G[b,a]) - (K/eps)^2
};

namespace detail {

// Advances `idx` to the next m-subset of {0..n-1} in lexicographic order.
inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t m = idx.size();
  for (std::size_t i = m; i-- > 0;) {
    if (idx[i] < n - m + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

inline std::vector<std::size_t> first_combination(std::size_t m) {
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  return idx;
}

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

inline double pair_margin(const CMatrix& g, const IndexSet& alpha, const IndexSet& beta, double eps,
                          double k) {
  const CMatrix y = submatrix(g, alpha, beta);
  const HermitianMatrix m(y * y.adjoint());
  const double level = k / eps;
  return lambda_min(m) - level * level;
}

inline void check_witness_args(const HermitianMatrix& a, double eps, int m, double k) {
  require(eps > 0.0, Errc::InvalidArgument, "eps must be > 0");
  require(k > 0.0, Errc::InvalidArgument, "K must be > 0");
  require(m >= 1 && static_cast<std::size_t>(m) <= a.dim(), Errc::InvalidArgument,
          "m must satisfy 1 <= m <= N");
}

}  // namespace detail

/// lambda_min(G[alpha,beta] G[beta,alpha]) - (K/eps)^2 for G = A^{-1}.
inline double witness_margin(const HermitianMatrix& a, double eps, const IndexSet& alpha,
                             const IndexSet& beta, double k) {
  detail::require(alpha.size() == beta.size() && !alpha.empty(), Errc::DimensionMismatch,
                  "alpha and beta must be nonempty with equal cardinality");
  detail::require(eps > 0.0 && k > 0.0, Errc::InvalidArgument, "eps and K must be > 0");
  const CMatrix g = inverse(a.matrix(), Errc::SingularMatrix, "A");
  return detail::pair_margin(g, alpha, beta, eps, k);
}

/// Lexicographically first witness pair (alpha outer, beta inner) at level K,
/// or nullopt when none exists.
inline std::optional<WitnessCertificate> find_witness_pair(const HermitianMatrix& a, double eps,
                                                           int m, double k) {
  detail::check_witness_args(a, eps, m, k);
  const std::size_t n = a.dim();
  const auto mm = static_cast<std::size_t>(m);
  const double choices = detail::binomial(n, mm);
  if (choices * choices > kWitnessSearchBudget)
    throw Error(Errc::SearchBudgetExceeded,
                "C(N,m)^2 = " + std::to_string(choices * choices) + " candidate pairs");
  const CMatrix g = inverse(a.matrix(), Errc::SingularMatrix, "A");

  auto alpha_idx = detail::first_combination(mm);
  do {
    const IndexSet alpha(n, alpha_idx);
    auto beta_idx = detail::first_combination(mm);
    do {
      const IndexSet beta(n, beta_idx);
      const double margin = detail::pair_margin(g, alpha, beta, eps, k);
      if (margin > kIndeterminateMargin) return WitnessCertificate{alpha, beta, m, eps, k, margin};
    } while (detail::next_combination(beta_idx, n));
  } while (detail::next_combination(alpha_idx, n));
  return std::nullopt;
}

/// True iff (alpha, beta) witnesses at K = 1, which certifies C_eps(A) >= |alpha|.
/// Indeterminate margins return false.
inline bool certify_lower_count(const HermitianMatrix& a, double eps, const IndexSet& alpha,
                                const IndexSet& beta) {
  return witness_margin(a, eps, alpha, beta, 1.0) > kIndeterminateMargin;
}

/// Guaranteed floor a / (k! 2^(k-1) N) on lambda_min(A[alpha_k]).
inline double heavy_subset_bound(double a, int k, std::size_t n) {
  return a * counting_constant(k, static_cast<int>(n)).k;
}

/// Deterministic construction of k indices whose principal block is bounded
/// below by a / (k! 2^(k-1) N): take the largest diagonal entry (lowest index
/// on ties), Schur-complement it out, repeat on the complement.
inline IndexSet select_heavy_principal_subset(const HermitianMatrix& a, int k, double threshold) {
  detail::require(threshold > 0.0, Errc::InvalidArgument, "threshold a must be > 0");
  detail::require(k >= 1 && static_cast<std::size_t>(k) <= a.dim(), Errc::InvalidArgument,
                  "k must satisfy 1 <= k <= N");
  const auto spec = eigvalsh(a);
  if (!(spec.front() > 0.0)) throw Error(Errc::NotPositiveDefinite, "A must be positive definite");
  if (count_at_least(spec, threshold) < k)
    throw Error(Errc::InsufficientSpectralMass,
                "B_a(A) = " + std::to_string(count_at_least(spec, threshold)) + " < k = " +
                    std::to_string(k));

  const std::size_t n = a.dim();
  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;
  std::vector<std::size_t> chosen;
  HermitianMatrix d = a;
  for (int step = 0; step < k; ++step) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < d.dim(); ++i)
      if (d(i, i).real() > d(best, best).real()) best = i;
    chosen.push_back(active[best]);
    if (step + 1 < k) {
      d = schur_complement(d, IndexSet(d.dim(), {best}));
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(best));
    }
  }
  return IndexSet::from_unsorted(n, chosen);
}

/// Smallest block-respecting gamma (a union of whole `block`-sized sites, at
/// most 2m of them) with C_{eps/K}((A^{-1}[gamma])^{-1}) >= m. Candidates are
/// scanned by increasing number of sites, lexicographically within a size;
/// candidates whose compression A^{-1}[gamma] is singular are skipped.
inline std::optional<IndexSet> find_block_witness(const HermitianMatrix& a, double eps, int m,
                                                  int block, double k) {
  detail::check_witness_args(a, eps, m, k);
  detail::require(block >= 1, Errc::InvalidArgument, "block size must be >= 1");
  const std::size_t n = a.dim();
  const auto bs = static_cast<std::size_t>(block);
  detail::require(n % bs == 0, Errc::InvalidArgument, "N must be divisible by the block size");
  const std::size_t sites = n / bs;
  const auto max_sites = static_cast<std::size_t>(2 * m);
  detail::require(max_sites <= sites, Errc::InvalidArgument, "2m * block must not exceed N");
  double budget = 0.0;
  for (std::size_t s = 1; s <= max_sites; ++s) budget += detail::binomial(sites, s);
  if (budget > kWitnessSearchBudget)
    throw Error(Errc::SearchBudgetExceeded, "too many block subsets to scan");

  const HermitianMatrix g = inverse(a, Errc::SingularMatrix, "A");
  bool any_invertible = false;
  for (std::size_t s = 1; s <= max_sites; ++s) {
    if (s * bs < static_cast<std::size_t>(m)) continue;
    auto idx = detail::first_combination(s);
    do {
      const IndexSet gamma = IndexSet(sites, idx).expand_blocks(bs);
      const HermitianMatrix compressed = principal(g, gamma);
      const auto f = lu_decompose(compressed.matrix());
      if (!f.invertible()) continue;
      any_invertible = true;
      const HermitianMatrix reduced(lu_solve(f, CMatrix::identity(gamma.size())));
      if (count_small(reduced, eps / k) >= m) return gamma;
    } while (detail::next_combination(idx, sites));
  }
  if (!any_invertible)
    throw Error(Errc::SingularPrincipalSubmatrix, "every candidate A^{-1}[gamma] is singular");
  return std::nullopt;
}

struct GreenRelations {
  double max_abs_entry = 0.0;
  bool implies_small_eig = false;     // max |G| > 1/eps, which forces C_eps(A) > 0
  bool implied_by_small_eig = false;  // C_eps(A) > 0 => max |G| > 1/(N eps) held
};

inline GreenRelations green_function_relations(const HermitianMatrix& a, double eps) {
  detail::require(eps > 0.0, Errc::InvalidArgument, "eps must be > 0");
  const CMatrix g = inverse(a.matrix(), Errc::SingularMatrix, "A");
  GreenRelations r;
  r.max_abs_entry = g.max_abs();
  r.implies_small_eig = r.max_abs_entry > 1.0 / eps;
  const bool has_small = count_small(a, eps) > 0;
  r.implied_by_small_eig =
      !has_small || r.max_abs_entry > 1.0 / (static_cast<double>(a.dim()) * eps);
  return r;
}

struct CompressionBound {
  double lhs = 0.0;  // ||A[p1 u p2]||
  double rhs = 0.0;  // 2 max(||A[p1]||, ||A[p2]||)
  bool holds() const { return lhs <= rhs + 1e-10; }
};

/// Norm of the compression onto two orthogonal coordinate projections against
/// twice the larger of the individual compressions.
inline CompressionBound compressed_norm_bound(const HermitianMatrix& a, const IndexSet& p1,
                                              const IndexSet& p2) {
  detail::require(!p1.empty() && !p2.empty(), Errc::InvalidArgument, "projections must be nonempty");
  detail::require(p1.disjoint(p2), Errc::InvalidArgument, "index sets overlap");
  if (!(lambda_min(a) > 0.0)) throw Error(Errc::NotPositiveDefinite, "A must be positive definite");
  CompressionBound b;
  b.lhs = operator_norm(principal(a, p1.unite(p2)));
  b.rhs = 2.0 * std::max(operator_norm(principal(a, p1)), operator_norm(principal(a, p2)));
  return b;
}

}  // namespace eigcount
