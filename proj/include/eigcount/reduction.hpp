#pragma once

// Norm-reduction transform and counting-stability checks.
//
// For Hermitian B1, B2 with ||B1|| <= 1 and an integer shift a with
// dist(sigma(B2), -a) >= 2, the matrix
//     B_hat = (B1 - a)^{-1} + (B2 + a)^{-1}
// has norm at most 1, and its small-eigenvalue counts sandwich those of
// B = B1 + B2:
//     C_{eps/(225 L^4)}(B_hat) <= C_eps(B) <= C_{7 L^2 eps}(B_hat).

#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "eigcount/eigen.hpp"
#include "eigcount/error.hpp"
#include "eigcount/lu.hpp"
#include "eigcount/matrix.hpp"
#include "eigcount/schur.hpp"

namespace eigcount {

/// Largest eps admitted by the sandwich and Schur-complement count checks.
inline constexpr double kReductionEps0 = 0.5;

/// Slack allowed on norm preconditions.
inline constexpr double kNormSlack = 1e-10;

struct ShiftReduction {
  int a = 0;
  std::size_t l = 0;
  double nu = 0.0;  // ||(B1 - a)^{-1}||
  HermitianMatrix b_hat = HermitianMatrix::zero(1);
  double lower_scale = 0.0;  // 225 L^4
  double upper_scale = 0.0;  // 7 L^2
  bool extended = false;     // |a| > L + 3, see choose_shift
};

/// First integer a in the scan 3, -3, 4, -4, ..., L+3, -L-3 whose negation
/// lies at distance >= 2 from the spectrum of B2. Each eigenvalue can exclude
/// up to four consecutive integers, so this range may be exhausted (e.g.
/// spectrum {-4, 3.86} with L = 2); the scan then continues up to 2L+3, where
/// 4L+2 candidates always leave one admissible.
inline int choose_shift(const HermitianMatrix& b2, std::size_t l) {
  detail::require(b2.dim() == l, Errc::DimensionMismatch, "dim(B2) must equal L");
  const auto spec = eigvalsh(b2);
  const int top = 2 * static_cast<int>(l) + 3;
  for (int mag = 3; mag <= top; ++mag) {
    for (int a : {mag, -mag}) {
      double dist = INFINITY;
      for (double s : spec) dist = std::min(dist, std::abs(s + a));
      if (dist >= 2.0) return a;
    }
  }
  throw Error(Errc::NoAdmissibleShift, "no integer shift with 3 <= |a| <= 2L+3 is admissible");
}

inline ShiftReduction reduce(const HermitianMatrix& b1, const HermitianMatrix& b2) {
  detail::require(b1.dim() == b2.dim(), Errc::DimensionMismatch, "B1 and B2 must have equal dimension");
  const double n1 = operator_norm(b1);
  if (n1 > 1.0 + kNormSlack)
    throw Error(Errc::NormTooLarge, "||B1|| = " + std::to_string(n1) + " exceeds 1");
  const std::size_t l = b1.dim();
  ShiftReduction r;
  r.a = choose_shift(b2, l);
  r.l = l;
  r.extended = std::abs(r.a) > static_cast<int>(l) + 3;
  const HermitianMatrix left = inverse(b1.shifted(-r.a), Errc::SingularFactor, "B1 - a");
  const HermitianMatrix right = inverse(b2.shifted(r.a), Errc::SingularFactor, "B2 + a");
  r.nu = operator_norm(left);
  r.b_hat = left + right;
  const double ld = static_cast<double>(l);
  r.lower_scale = 225.0 * ld * ld * ld * ld;
  r.upper_scale = 7.0 * ld * ld;
  return r;
}

struct SandwichCounts {
  int low = 0;   // C_{eps/(225 L^4)}(B_hat)
  int mid = 0;   // C_eps(B1 + B2)
  int high = 0;  // C_{7 L^2 eps}(B_hat)
  bool holds() const { return low <= mid && mid <= high; }
};

inline SandwichCounts count_sandwich_check(const HermitianMatrix& b1, const HermitianMatrix& b2,
                                           double eps) {
  detail::require(eps > 0.0 && eps < kReductionEps0, Errc::InvalidArgument,
                  "eps must lie in (0, 1/2)");
  const ShiftReduction r = reduce(b1, b2);
  const auto hat_spec = eigvalsh(r.b_hat);
  SandwichCounts c;
  c.low = count_in_interval(hat_spec, 0.0, eps / r.lower_scale);
  c.mid = count_small(b1 + b2, eps);
  c.high = count_in_interval(hat_spec, 0.0, eps * r.upper_scale);
  return c;
}

/// C_eps(D) <= C_{2 eps}(D~) for ||D - D~|| <= eps.
inline bool weyl_count_stability(const HermitianMatrix& d, const HermitianMatrix& dt, double eps) {
  detail::require(eps > 0.0, Errc::InvalidArgument, "eps must be > 0");
  detail::require(d.dim() == dt.dim(), Errc::DimensionMismatch, "D and D~ must have equal dimension");
  const double gap = operator_norm(d - dt);
  if (gap > eps * (1.0 + kNormSlack))
    throw Error(Errc::PerturbationTooLarge, "||D - D~|| = " + std::to_string(gap) + " exceeds eps");
  return count_small(d, eps) <= count_small(dt, 2.0 * eps);
}

/// C_eps(A) <= C_eps(B A B) for Hermitian B with ||B|| <= 1.
inline bool sandwich_count_conjugation(const HermitianMatrix& a, const HermitianMatrix& b,
                                       double eps) {
  detail::require(eps > 0.0, Errc::InvalidArgument, "eps must be > 0");
  detail::require(a.dim() == b.dim(), Errc::DimensionMismatch, "A and B must have equal dimension");
  const double nb = operator_norm(b);
  if (nb > 1.0 + kNormSlack)
    throw Error(Errc::NormTooLarge, "||B|| = " + std::to_string(nb) + " exceeds 1");
  const HermitianMatrix bab(b.matrix() * a.matrix() * b.matrix());
  return count_small(a, eps) <= count_small(bab, eps);
}

struct SchurCounts {
  int schur_count = 0;        // C_eps(D/B)
  int full_count = 0;         // C_eps(D)
  int beta_scaled_count = 0;  // C_{beta eps}(D/B), beta = 2(||B^{-1}|| + 1)^2
  double beta = 0.0;
  bool holds() const { return schur_count <= full_count && full_count <= beta_scaled_count; }
};

/// Count bounds for D = [[A, V], [V*, B]] where A = D[alpha] and
/// B = D[alpha^c]. Requires ||V|| <= 1/2, C_{2 eps}(B) = 0 and eps <= 1/2.
inline SchurCounts schur_count_bounds(const HermitianMatrix& d, const IndexSet& alpha, double eps) {
  detail::require(alpha.universe() == d.dim(), Errc::DimensionMismatch,
                  "index set universe does not match matrix dimension");
  detail::require(!alpha.empty() && alpha.size() < d.dim(), Errc::InvalidArgument,
                  "alpha must be a proper nonempty subset");
  if (!(eps > 0.0 && eps <= kReductionEps0))
    throw Error(Errc::PreconditionViolation, "eps must lie in (0, 1/2]");
  const IndexSet rest = alpha.complement();
  const double vnorm = operator_norm(submatrix(d, alpha, rest));
  if (vnorm > 0.5 + kNormSlack)
    throw Error(Errc::PreconditionViolation, "||V|| = " + std::to_string(vnorm) + " exceeds 1/2");
  const HermitianMatrix b = principal(d, rest);
  if (count_small(b, 2.0 * eps) != 0)
    throw Error(Errc::PreconditionViolation, "C_{2eps}(B) != 0");

  const HermitianMatrix db = schur_complement(d, rest);
  const double binv = operator_norm(inverse(b, Errc::PreconditionViolation, "B"));
  SchurCounts c;
  c.beta = 2.0 * (binv + 1.0) * (binv + 1.0);
  const auto ds = eigvalsh(db);
  c.schur_count = count_in_interval(ds, 0.0, eps);
  c.full_count = count_small(d, eps);
  c.beta_scaled_count = count_in_interval(ds, 0.0, c.beta * eps);
  return c;
}

enum class DichotomyBranch { DetBound, NormBound, NotApplicable, Neither };

inline std::string_view branch_name(DichotomyBranch b) {
  switch (b) {
    case DichotomyBranch::DetBound: return "DetBound";
    case DichotomyBranch::NormBound: return "NormBound";
    case DichotomyBranch::NotApplicable: return "NotApplicable";
    case DichotomyBranch::Neither: return "Neither";
  }
  return "?";
}

struct DichotomyResult {
  DichotomyBranch branch = DichotomyBranch::NotApplicable;
  double lhs = 0.0;        // left side of the reported branch
  double rhs = 0.0;        // |det((A-a)^{-1} + (J+a)^{-1})|
  double threshold = 0.0;  // applicability threshold on rhs
  double det_lhs = 0.0;    // (2(|a|+1)^2)^{-k} |det(A+J)|
  double norm_lhs = 0.0;   // (16|a|)^{-1} (2(|a|+1)^2 ||(A+J)^{-1}||)^{1-k}
};

/// Determinant dichotomy for k x k Hermitian A, J with ||A|| <= 1, |a| >= 2.
/// When |det X| with X = (A-a)^{-1} + (J+a)^{-1} is at most
/// (16|a|)^{-1} ((|a|-1) / (2(|a|+1)^2))^{k-1}, either
/// (2(|a|+1)^2)^{-k} |det(A+J)| <= |det X| or
/// (16|a|)^{-1} (2(|a|+1)^2 ||(A+J)^{-1}||)^{1-k} <= |det X|.
/// `Neither` is only returned if both fail.
inline DichotomyResult determinant_dichotomy(const HermitianMatrix& a, const HermitianMatrix& j,
                                             double shift) {
  detail::require(a.dim() == j.dim(), Errc::DimensionMismatch, "A and J must have equal dimension");
  const double na = operator_norm(a);
  if (na > 1.0 + kNormSlack)
    throw Error(Errc::NormTooLarge, "||A|| = " + std::to_string(na) + " exceeds 1");
  detail::require(std::abs(shift) >= 2.0, Errc::InvalidArgument, "|a| must be >= 2");
  const auto k = static_cast<double>(a.dim());
  const double abs_a = std::abs(shift);

  const HermitianMatrix left = inverse(a.shifted(-shift), Errc::SingularFactor, "A - a");
  const HermitianMatrix right = inverse(j.shifted(shift), Errc::SingularFactor, "J + a");
  const HermitianMatrix sum = a + j;
  const HermitianMatrix sum_inv = inverse(sum, Errc::SingularFactor, "A + J");
  const HermitianMatrix x = left + right;

  DichotomyResult r;
  r.rhs = std::abs(complex_determinant(x.matrix()));
  const double wide = 2.0 * (abs_a + 1.0) * (abs_a + 1.0);
  r.threshold = 1.0 / (16.0 * abs_a) * std::pow((abs_a - 1.0) / wide, k - 1.0);
  r.det_lhs = std::pow(wide, -k) * std::abs(complex_determinant(sum.matrix()));
  r.norm_lhs = 1.0 / (16.0 * abs_a) * std::pow(wide * operator_norm(sum_inv), 1.0 - k);
  if (r.rhs > r.threshold) {
    r.branch = DichotomyBranch::NotApplicable;
    return r;
  }
  if (r.det_lhs <= r.rhs) {
    r.branch = DichotomyBranch::DetBound;
    r.lhs = r.det_lhs;
  } else if (r.norm_lhs <= r.rhs) {
    r.branch = DichotomyBranch::NormBound;
    r.lhs = r.norm_lhs;
  } else {
    r.branch = DichotomyBranch::Neither;
    r.lhs = std::min(r.det_lhs, r.norm_lhs);
  }
  return r;
}

}  // namespace eigcount
