#pragma once

// Monte Carlo estimates of m-level counting probabilities
//     P(C_eps(H - E) >= m)
// and of the reduced determinant event P(|det H_hat| <= delta), with log-log
// scaling fits. One Hamiltonian draw per trial serves every threshold in a
// sweep, so events are nested trial by trial.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "eigcount/eigen.hpp"
#include "eigcount/error.hpp"
#include "eigcount/lu.hpp"
#include "eigcount/models.hpp"
#include "eigcount/stats.hpp"

namespace eigcount {

struct McReport {
  double eps = 0.0;
  int m = 1;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double bound_value = 0.0;
  SampleSeed seed;

  /// p_hat / bound_value, the smallest constant making the bound hold here.
  double implied_constant() const {
    if (bound_value > 0.0 && std::isfinite(bound_value)) return p_hat / bound_value;
    return std::numeric_limits<double>::quiet_NaN();
  }
  friend bool operator==(const McReport&, const McReport&) = default;
};

struct ScalingFit {
  std::vector<double> eps_grid;
  std::vector<double> p_hats;
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct McOptions {
  unsigned jobs = 1;
  double alpha = 1.0;         // exponent in the reported bound
  double regularity_k = 1.0;  // K in the determinant-event bound
};

/// |ln(N eps / g) (N eps / g)^alpha|^m; +inf when g = 0.
inline double count_bound_value(std::size_t n, double eps, double g, double alpha, int m) {
  if (g <= 0.0) return std::numeric_limits<double>::infinity();
  const double x = static_cast<double>(n) * eps / g;
  return std::pow(std::abs(std::log(x) * std::pow(x, alpha)), m);
}

/// (2 K alpha)^N ln^N(1/delta) delta^alpha, with |ln| for delta >= 1.
inline double det_bound_value(std::size_t n, double delta, double regularity_k, double alpha) {
  const double nd = static_cast<double>(n);
  return std::pow(2.0 * regularity_k * alpha, nd) * std::pow(std::abs(std::log(1.0 / delta)), nd) *
         std::pow(delta, alpha);
}

namespace detail {

// Evaluates fn(t) for t in [0, trials) on up to `jobs` threads and returns the
// results indexed by t. A failure is rethrown for the lowest failing trial.
template <class T, class Fn>
std::vector<T> run_trials(std::uint64_t trials, unsigned jobs, Fn fn) {
  std::vector<T> out(trials);
  std::vector<std::exception_ptr> errors;
  std::uint64_t first_bad = trials;
  std::mutex mu;
  std::atomic<std::uint64_t> next{0};
  constexpr std::uint64_t chunk = 64;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t lo = next.fetch_add(chunk);
      if (lo >= trials) return;
      const std::uint64_t hi = std::min(trials, lo + chunk);
      for (std::uint64_t t = lo; t < hi; ++t) {
        try {
          out[t] = fn(t);
        } catch (...) {
          std::lock_guard lock(mu);
          if (t < first_bad) {
            first_bad = t;
            errors.assign(1, std::current_exception());
          }
          return;
        }
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::uint64_t>(1, trials / chunk))));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!errors.empty()) {
    try {
      std::rethrow_exception(errors.front());
    } catch (const Error& e) {
      throw Error(e.code(), "trial " + std::to_string(first_bad) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(Errc::NumericalFailure, "trial " + std::to_string(first_bad) + ": " + e.what());
    }
  }
  return out;
}

inline SampleSeed trial_seed(const SampleSeed& base, std::uint64_t t) {
  return {base.master, base.trial + t};
}

inline McReport make_report(double eps, int m, std::uint64_t trials, std::uint64_t successes,
                            double bound, const SampleSeed& seed) {
  const auto p = wilson_interval(successes, trials);
  return {eps, m, trials, successes, p.p_hat, p.ci_low, p.ci_high, bound, seed};
}

}  // namespace detail

/// Per-trial spectral counts C_eps(H - E) for every eps in the grid.
/// counts[t][i] belongs to trial t and eps_grid[i].
inline std::vector<std::vector<int>> sample_counts(const ModelSpec& spec,
                                                   std::span<const double> eps_grid,
                                                   std::uint64_t trials, const SampleSeed& seed,
                                                   unsigned jobs = 1) {
  spec.validate();
  detail::require(trials >= 1, Errc::InvalidArgument, "trials must be >= 1");
  for (double e : eps_grid) detail::require(e > 0.0, Errc::InvalidArgument, "eps must be > 0");
  const std::vector<double> grid(eps_grid.begin(), eps_grid.end());
  return detail::run_trials<std::vector<int>>(trials, jobs, [&](std::uint64_t t) {
    const auto spectrum = eigvalsh(sample_hamiltonian(spec, detail::trial_seed(seed, t)));
    std::vector<int> c(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) c[i] = count_in_interval(spectrum, spec.energy, grid[i]);
    return c;
  });
}

/// Reports for every (eps, m) pair, eps-major, from one shared set of draws.
inline std::vector<McReport> count_probability_sweep(const ModelSpec& spec,
                                                     std::span<const double> eps_grid,
                                                     std::span<const int> m_list,
                                                     std::uint64_t trials, const SampleSeed& seed,
                                                     const McOptions& opt = {}) {
  for (int m : m_list) detail::require(m >= 1, Errc::InvalidArgument, "m must be >= 1");
  const auto counts = sample_counts(spec, eps_grid, trials, seed, opt.jobs);
  std::vector<McReport> out;
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    for (int m : m_list) {
      std::uint64_t hits = 0;
      for (const auto& c : counts) hits += c[i] >= m ? 1 : 0;
      out.push_back(detail::make_report(
          eps_grid[i], m, trials, hits,
          count_bound_value(spec.graph.vertices, eps_grid[i], spec.coupling, opt.alpha, m), seed));
    }
  }
  return out;
}

inline McReport estimate_count_probability(const ModelSpec& spec, double eps, int m,
                                           std::uint64_t trials, const SampleSeed& seed,
                                           const McOptions& opt = {}) {
  const double grid[] = {eps};
  const int ms[] = {m};
  return count_probability_sweep(spec, grid, ms, trials, seed, opt).front();
}

/// Per-trial |det H_hat| for the reduced Hamiltonian at shift a.
inline std::vector<double> sample_reduced_determinants(const ModelSpec& spec, int a,
                                                       std::uint64_t trials, const SampleSeed& seed,
                                                       unsigned jobs = 1) {
  spec.validate();
  detail::require(trials >= 1, Errc::InvalidArgument, "trials must be >= 1");
  return detail::run_trials<double>(trials, jobs, [&](std::uint64_t t) {
    const auto h = sample_reduced_hamiltonian(spec, a, detail::trial_seed(seed, t));
    return std::abs(complex_determinant(h.matrix()));
  });
}

inline std::vector<McReport> det_event_sweep(const ModelSpec& spec, int a,
                                             std::span<const double> deltas, std::uint64_t trials,
                                             const SampleSeed& seed, const McOptions& opt = {}) {
  for (double d : deltas) detail::require(d > 0.0, Errc::InvalidArgument, "delta must be > 0");
  const auto dets = sample_reduced_determinants(spec, a, trials, seed, opt.jobs);
  std::vector<McReport> out;
  for (double d : deltas) {
    std::uint64_t hits = 0;
    for (double v : dets) hits += v <= d ? 1 : 0;
    out.push_back(detail::make_report(
        d, 1, trials, hits, det_bound_value(spec.graph.vertices, d, opt.regularity_k, opt.alpha), seed));
  }
  return out;
}

inline McReport estimate_det_event(const ModelSpec& spec, int a, double delta, std::uint64_t trials,
                                   const SampleSeed& seed, const McOptions& opt = {}) {
  const double grid[] = {delta};
  return det_event_sweep(spec, a, grid, trials, seed, opt).front();
}

/// Least-squares slope of log p_hat against log eps over cells with p_hat > 0.
inline ScalingFit fit_scaling(std::span<const double> eps_grid, std::span<const McReport> reports) {
  detail::require(eps_grid.size() == reports.size(), Errc::DimensionMismatch,
                  "one report per grid point expected");
  ScalingFit f;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    f.eps_grid.push_back(eps_grid[i]);
    f.p_hats.push_back(reports[i].p_hat);
    if (reports[i].p_hat > 0.0) {
      detail::require(eps_grid[i] > 0.0, Errc::InvalidArgument, "eps must be > 0");
      lx.push_back(std::log(eps_grid[i]));
      ly.push_back(std::log(reports[i].p_hat));
    }
  }
  if (lx.size() < 3)
    throw Error(Errc::InsufficientPositivePoints,
                std::to_string(lx.size()) + " grid points with p_hat > 0, need 3");
  const auto fit = least_squares(lx, ly);
  f.exponent = fit.slope;
  f.intercept = fit.intercept;
  f.r_squared = fit.r_squared;
  return f;
}

struct MinamiCheck {
  std::vector<McReport> m1;
  std::vector<McReport> m2;
  std::optional<ScalingFit> fit_m1;
  std::optional<ScalingFit> fit_m2;
  std::string note;  // why a fit is missing, empty otherwise

  bool complete() const { return fit_m1 && fit_m2; }
  double slope_m1() const { return fit_m1 ? fit_m1->exponent : std::numeric_limits<double>::quiet_NaN(); }
  double slope_m2() const { return fit_m2 ? fit_m2->exponent : std::numeric_limits<double>::quiet_NaN(); }
  /// slope_m2 >= slope_m1 + margin; false when either fit is missing.
  bool separated(double margin) const { return complete() && slope_m2() >= slope_m1() + margin; }
};

/// m = 1 and m = 2 sweeps on shared samples with their scaling fits. A fit
/// that lacks enough nonzero cells is recorded in `note`, not thrown.
inline MinamiCheck minami_gap_check(const ModelSpec& spec, std::span<const double> eps_grid,
                                    std::uint64_t trials, const SampleSeed& seed,
                                    const McOptions& opt = {}) {
  const int ms[] = {1, 2};
  const auto all = count_probability_sweep(spec, eps_grid, ms, trials, seed, opt);
  MinamiCheck r;
  for (std::size_t i = 0; i < all.size(); i += 2) {
    r.m1.push_back(all[i]);
    r.m2.push_back(all[i + 1]);
  }
  auto try_fit = [&](const std::vector<McReport>& reps, const char* label) -> std::optional<ScalingFit> {
    const bool degenerate = std::all_of(reps.begin(), reps.end(), [](const McReport& x) {
      return x.successes == 0 || x.successes == x.trials;
    });
    if (degenerate) {
      if (!r.note.empty()) r.note += "; ";
      r.note += std::string(label) + ": every cell has p_hat in {0, 1}";
      return std::nullopt;
    }
    try {
      return fit_scaling(eps_grid, reps);
    } catch (const Error& e) {
      if (e.code() != Errc::InsufficientPositivePoints) throw;
      if (!r.note.empty()) r.note += "; ";
      r.note += std::string(label) + ": " + e.what();
      return std::nullopt;
    }
  };
  r.fit_m1 = try_fit(r.m1, "m=1");
  r.fit_m2 = try_fit(r.m2, "m=2");
  return r;
}

}  // namespace eigcount
