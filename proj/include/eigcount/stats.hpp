#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "eigcount/error.hpp"

namespace eigcount {

inline constexpr double kZ95 = 1.959963984540054;

struct Proportion {
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Wilson score interval at 95%. Zero-success cells report the rule-of-three
/// upper bound 3/n instead.
inline Proportion wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  detail::require(trials >= 1, Errc::InvalidArgument, "trials must be >= 1");
  detail::require(successes <= trials, Errc::InvalidArgument, "successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  if (successes == 0) return {0.0, 0.0, std::min(1.0, 3.0 / n)};
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {p, std::max(0.0, std::min(p, center - half)), std::min(1.0, std::max(p, center + half))};
}

/// Standard error of a proportion estimate.
inline double binomial_standard_error(double p, std::uint64_t trials) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size() && x.size() >= 2, Errc::InvalidArgument,
                  "least squares needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  detail::require(sxx > 0.0, Errc::InvalidArgument, "abscissae must not all coincide");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace eigcount
