#pragma once

// Random Hamiltonian families on finite graphs and single-site regularity
// checkers.
//
//   H(g) = H0 + g * blockdiag(A(x)),  x in V,
//
// with i.i.d. k x k Hermitian site blocks A(x): scalars for the Anderson model,
// traceless real 2x2 blocks [[u, v], [v, -u]] with (u, v) uniform on the unit
// disc for the BdG model, and general Hermitian blocks for RandomBlock.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "eigcount/eigen.hpp"
#include "eigcount/error.hpp"
#include "eigcount/lu.hpp"
#include "eigcount/matrix.hpp"
#include "eigcount/rng.hpp"
#include "eigcount/stats.hpp"

namespace eigcount {

struct GraphSpec {
  std::size_t vertices = 1;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t max_degree = 0;

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> deg(vertices, 0);
    for (auto [u, v] : edges) {
      ++deg[u];
      ++deg[v];
    }
    return deg;
  }

  void validate() const {
    detail::require(vertices >= 1, Errc::InvalidArgument, "graph needs at least one vertex");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto [u, v] : edges) {
      detail::require(u < vertices && v < vertices, Errc::InvalidArgument, "edge endpoint out of range");
      detail::require(u != v, Errc::InvalidArgument, "self-loops are not allowed");
      detail::require(seen.insert(std::minmax(u, v)).second, Errc::InvalidArgument,
                      "duplicate edge");
    }
    for (auto d : degrees())
      detail::require(d <= max_degree, Errc::InvalidArgument, "vertex degree exceeds max_degree");
  }

  friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

inline GraphSpec make_graph(std::size_t vertices,
                            std::vector<std::pair<std::size_t, std::size_t>> edges) {
  GraphSpec g{vertices, std::move(edges), 0};
  if (vertices >= 1) {
    std::vector<std::size_t> deg(vertices, 0);
    for (auto [u, v] : g.edges) {
      if (u < vertices) ++deg[u];
      if (v < vertices) ++deg[v];
    }
    g.max_degree = *std::max_element(deg.begin(), deg.end());
  }
  g.validate();
  return g;
}

/// 1D path 0 - 1 - ... - (n-1).
inline GraphSpec path_graph(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return make_graph(n, std::move(e));
}

/// lx by ly box of Z^2 with open boundaries; vertex (x, y) is x + lx * y.
inline GraphSpec grid_graph(std::size_t lx, std::size_t ly) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t y = 0; y < ly; ++y) {
    for (std::size_t x = 0; x < lx; ++x) {
      const std::size_t v = x + lx * y;
      if (x + 1 < lx) e.emplace_back(v, v + 1);
      if (y + 1 < ly) e.emplace_back(v, v + lx);
    }
  }
  return make_graph(lx * ly, std::move(e));
}

enum class DistributionKind { UniformInterval, UniformDisc, Custom };

/// Single-site law. UniformInterval lives on [-b, b], UniformDisc on the unit
/// disc, Custom is a piecewise-constant density over equal bins of [-b, b].
struct SiteDistribution {
  DistributionKind kind = DistributionKind::UniformInterval;
  double support_bound = 1.0;
  double regularity_alpha = 1.0;
  std::vector<double> density;  // Custom only

  static SiteDistribution uniform_interval(double b) {
    return {DistributionKind::UniformInterval, b, 1.0, {}};
  }
  static SiteDistribution uniform_disc() { return {DistributionKind::UniformDisc, 1.0, 1.0, {}}; }
  static SiteDistribution custom(double b, std::vector<double> density, double alpha) {
    return {DistributionKind::Custom, b, alpha, std::move(density)};
  }

  bool scalar() const { return kind != DistributionKind::UniformDisc; }

  void validate() const {
    detail::require(support_bound > 0.0 && std::isfinite(support_bound), Errc::InvalidArgument,
                    "support bound must be positive");
    detail::require(regularity_alpha > 0.0 && regularity_alpha <= 1.0, Errc::InvalidArgument,
                    "regularity_alpha must lie in (0, 1]");
    if (kind == DistributionKind::UniformDisc)
      detail::require(support_bound == 1.0, Errc::InvalidArgument, "disc support radius is 1");
    if (kind == DistributionKind::Custom) {
      detail::require(!density.empty(), Errc::InvalidArgument, "custom density grid is empty");
      double total = 0.0;
      for (double w : density) {
        detail::require(w >= 0.0 && std::isfinite(w), Errc::InvalidArgument,
                        "density weights must be finite and nonnegative");
        total += w;
      }
      detail::require(total > 0.0, Errc::InvalidArgument, "density has zero mass");
    }
  }

  /// One scalar draw (not valid for the disc).
  double sample_scalar(CounterRng& rng) const {
    const double b = support_bound;
    if (kind == DistributionKind::UniformInterval) return rng.uniform(-b, b);
    const double total = std::accumulate(density.begin(), density.end(), 0.0);
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t bin = density.size() - 1;
    for (std::size_t i = 0; i < density.size(); ++i) {
      acc += density[i];
      if (target < acc) {
        bin = i;
        break;
      }
    }
    const double width = 2.0 * b / static_cast<double>(density.size());
    return -b + width * (static_cast<double>(bin) + rng.uniform());
  }

  friend bool operator==(const SiteDistribution&, const SiteDistribution&) = default;
};

enum class ModelFamily { Anderson, RandomBlock, BdG };

/// Draws one k x k site block from `dist` for the given family. Draw order
/// within the stream is part of the reproducibility contract.
inline CMatrix draw_site_block(const SiteDistribution& dist, ModelFamily family, std::size_t k,
                               CounterRng& rng) {
  CMatrix blk(k, k);
  switch (family) {
    case ModelFamily::Anderson:
      blk(0, 0) = dist.sample_scalar(rng);
      break;
    case ModelFamily::BdG: {
      double u = 0.0, v = 0.0;
      rng.unit_disc(u, v);
      blk(0, 0) = u;
      blk(0, 1) = v;
      blk(1, 0) = v;
      blk(1, 1) = -u;
      break;
    }
    case ModelFamily::RandomBlock:
      for (std::size_t i = 0; i < k; ++i) blk(i, i) = dist.sample_scalar(rng);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
          const double re = dist.sample_scalar(rng);
          const double im = dist.sample_scalar(rng);
          blk(i, j) = cplx(re, im) / std::sqrt(2.0);
          blk(j, i) = std::conj(blk(i, j));
        }
      }
      break;
  }
  return blk;
}

/// Hopping -sum_{y~x} psi(y): the discrete Laplacian without its diagonal
/// degree term, so the band is centred at zero.
inline HermitianMatrix adjacency_hopping(const GraphSpec& g) {
  CMatrix h(g.vertices, g.vertices);
  for (auto [u, v] : g.edges) {
    h(u, v) = -1.0;
    h(v, u) = -1.0;
  }
  return HermitianMatrix(h);
}

/// Translation-invariant block hopping: block (x, y) = t for each edge with
/// x < y and t* for the reverse direction.
inline HermitianMatrix block_hopping(const GraphSpec& g, const CMatrix& t) {
  detail::require(t.square() && t.rows() >= 1, Errc::InvalidArgument, "hopping block must be square");
  const std::size_t k = t.rows();
  CMatrix h(g.vertices * k, g.vertices * k);
  for (auto [u0, v0] : g.edges) {
    const auto [u, v] = std::minmax(u0, v0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        h(u * k + i, v * k + j) = t(i, j);
        h(v * k + j, u * k + i) = std::conj(t(i, j));
      }
    }
  }
  return HermitianMatrix(h);
}

struct ModelSpec {
  GraphSpec graph;
  std::size_t block_size = 1;
  double coupling = 1.0;
  double energy = 0.0;
  HermitianMatrix hopping = HermitianMatrix::zero(1);
  SiteDistribution site_dist;
  ModelFamily family = ModelFamily::Anderson;

  std::size_t dim() const { return graph.vertices * block_size; }

  void validate() const {
    graph.validate();
    site_dist.validate();
    detail::require(block_size >= 1, Errc::InvalidArgument, "block_size must be >= 1");
    detail::require(std::isfinite(coupling) && coupling >= 0.0, Errc::InvalidArgument,
                    "coupling must be finite and >= 0");
    detail::require(std::isfinite(energy), Errc::InvalidArgument, "energy must be finite");
    detail::require(hopping.dim() == dim(), Errc::DimensionMismatch,
                    "hopping dimension must equal block_size * vertices");
    switch (family) {
      case ModelFamily::Anderson:
        detail::require(block_size == 1, Errc::InvalidArgument, "Anderson model needs block_size 1");
        detail::require(site_dist.scalar(), Errc::InvalidArgument,
                        "Anderson model needs a scalar distribution");
        break;
      case ModelFamily::BdG:
        detail::require(block_size == 2, Errc::InvalidArgument, "BdG model needs block_size 2");
        detail::require(site_dist.kind == DistributionKind::UniformDisc, Errc::InvalidArgument,
                        "BdG model needs the unit-disc distribution");
        break;
      case ModelFamily::RandomBlock:
        detail::require(site_dist.scalar(), Errc::InvalidArgument,
                        "random block model needs a scalar entry distribution");
        break;
    }
  }
};

inline ModelSpec anderson_model(const GraphSpec& g, double coupling, double energy, double b) {
  ModelSpec s{g, 1, coupling, energy, adjacency_hopping(g), SiteDistribution::uniform_interval(b),
              ModelFamily::Anderson};
  s.validate();
  return s;
}

inline ModelSpec bdg_model(const GraphSpec& g, double coupling, double energy) {
  const CMatrix t{{-1.0, 0.0}, {0.0, 1.0}};
  ModelSpec s{g, 2, coupling, energy, block_hopping(g, t), SiteDistribution::uniform_disc(),
              ModelFamily::BdG};
  s.validate();
  return s;
}

inline ModelSpec random_block_model(const GraphSpec& g, std::size_t k, double coupling,
                                    double energy, double b) {
  CMatrix t(k, k);
  for (std::size_t i = 0; i < k; ++i) t(i, i) = -1.0;
  ModelSpec s{g, k, coupling, energy, block_hopping(g, t), SiteDistribution::uniform_interval(b),
              ModelFamily::RandomBlock};
  s.validate();
  return s;
}

struct SampleSeed {
  std::uint64_t master = 0;
  std::uint64_t trial = 0;
  friend bool operator==(const SampleSeed&, const SampleSeed&) = default;
};

/// Site block A(x) for the given seed; independent of every other site.
inline CMatrix sample_site_block(const ModelSpec& spec, const SampleSeed& seed, std::size_t site) {
  CounterRng rng(stream_key(seed.master, seed.trial, site));
  return draw_site_block(spec.site_dist, spec.family, spec.block_size, rng);
}

/// H0 + g * blockdiag(A(x)).
inline HermitianMatrix sample_hamiltonian(const ModelSpec& spec, const SampleSeed& seed) {
  CMatrix h = spec.hopping.matrix();
  const std::size_t k = spec.block_size;
  if (spec.coupling == 0.0) return spec.hopping;
  for (std::size_t x = 0; x < spec.graph.vertices; ++x) {
    const CMatrix blk = sample_site_block(spec, seed, x);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) h(x * k + i, x * k + j) += spec.coupling * blk(i, j);
  }
  return HermitianMatrix(h);
}

/// H0 + blockdiag((g A(x) - a)^{-1}). Requires |a| >= 3 and ||H0|| <= 1/2;
/// the result is checked to satisfy ||H_hat|| <= 1.
inline HermitianMatrix sample_reduced_hamiltonian(const ModelSpec& spec, int a,
                                                  const SampleSeed& seed) {
  detail::require(std::abs(a) >= 3, Errc::InvalidArgument, "|a| must be >= 3");
  const double h0 = operator_norm(spec.hopping);
  if (h0 > 0.5 + 1e-10)
    throw Error(Errc::HoppingNormTooLarge, "||H0|| = " + std::to_string(h0) + " exceeds 1/2");
  CMatrix h = spec.hopping.matrix();
  const std::size_t k = spec.block_size;
  for (std::size_t x = 0; x < spec.graph.vertices; ++x) {
    CMatrix blk = sample_site_block(spec, seed, x);
    blk *= spec.coupling;
    blk.shift(-static_cast<double>(a));
    const CMatrix inv =
        inverse(blk, Errc::SingularSiteBlock, "site block A(" + std::to_string(x) + ") - a");
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) h(x * k + i, x * k + j) += inv(i, j);
  }
  HermitianMatrix out(h);
  const double n = operator_norm(out);
  if (n > 1.0 + 1e-10)
    throw Error(Errc::NormTooLarge, "||H_hat|| = " + std::to_string(n) + " exceeds 1");
  return out;
}

struct ScalarRegularity {
  double interval_length = 0.0;  // 2 eps / ((j+a)^{-2} - eps^2) when 0 < j+a < 1, else 0
  double bound = 0.0;            // 4 eps
  double support_measure = 0.0;  // |{v in [-b,b] : |1/(v-a) + 1/(j+a)| < eps}|
};

/// Exact Lebesgue measure of {v in [-b, b] : |1/(v - a) + c| < eps}, a > b.
inline double scalar_event_measure(double a, double c, double eps, double b) {
  detail::require(a > b, Errc::InvalidArgument, "shift must exceed the support bound");
  if (eps <= 0.0) return 0.0;
  // On [-b, b], t = 1/(v - a) runs over [1/(b - a), -1/(b + a)] and the event
  // is t in (-c - eps, -c + eps); map the clipped t-interval back through
  // v = a + 1/t.
  const double t_lo = std::max(-c - eps, 1.0 / (b - a));
  const double t_hi = std::min(-c + eps, -1.0 / (b + a));
  if (!(t_lo < t_hi)) return 0.0;
  return std::abs(1.0 / t_lo - 1.0 / t_hi);
}

inline ScalarRegularity scalar_regularity_margin(int a, double j, double eps,
                                                 double support_bound = 1.0) {
  detail::require(static_cast<double>(a) - support_bound >= 2.0, Errc::InvalidArgument,
                  "need a - b >= 2");
  detail::require(eps >= 0.0 && eps <= 1.0 / (2.0 * a), Errc::InvalidArgument,
                  "eps must lie in [0, 1/(2a)]");
  ScalarRegularity r;
  r.bound = 4.0 * eps;
  const double ja = j + a;
  if (ja > 0.0 && ja < 1.0) r.interval_length = 2.0 * eps / (1.0 / (ja * ja) - eps * eps);
  if (ja != 0.0) r.support_measure = scalar_event_measure(a, 1.0 / ja, eps, support_bound);
  return r;
}

namespace detail {

// Arc angle of the circle |X - P| = r lying inside the unit disc, |P| = d.
inline double arc_angle_in_unit_disc(double d, double r) {
  if (r <= 0.0) return 2.0 * std::numbers::pi;
  if (d + r <= 1.0) return 2.0 * std::numbers::pi;
  if (r >= d + 1.0 || d >= r + 1.0) return 0.0;
  const double c = std::clamp((r * r + d * d - 1.0) / (2.0 * r * d), -1.0, 1.0);
  return 2.0 * std::acos(c);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace detail

/// Area of the unit disc intersected with the annulus r_lo <= |X - (cx, cy)| <= r_hi,
/// by radial quadrature of the inscribed arc length, absolute tolerance ~1e-9.
inline double disc_annulus_area(double cx, double cy, double r_lo, double r_hi) {
  r_lo = std::max(0.0, r_lo);
  if (!(r_hi > r_lo)) return 0.0;
  const double d = std::hypot(cx, cy);
  const auto f = [d](double r) { return r * detail::arc_angle_in_unit_disc(d, r); };
  std::vector<double> cuts{r_lo, r_hi};
  for (double c : {std::abs(1.0 - d), 1.0 + d})
    if (c > r_lo && c < r_hi) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  double area = 0.0;
  const double tol = 1e-10 / static_cast<double>(cuts.size());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) area += detail::integrate(f, cuts[i], cuts[i + 1], tol);
  return area;
}

struct BdgRegularity {
  double det_set_area = 0.0;
  double det_bound = 0.0;  // 2 pi eps
  double norm_set_area = 0.0;
  double norm_bound = 0.0;  // 4 pi eps
};

/// Unit-disc measure of the small-determinant and large-resolvent sets for
/// sigma + J with det = c^2 - (u - a)^2 - (v - b)^2.
inline BdgRegularity bdg_regularity_margin(double a, double b, double c, double eps) {
  detail::require(eps >= 0.0 && eps <= 1.0, Errc::InvalidArgument, "eps must lie in [0, 1]");
  BdgRegularity r;
  r.det_bound = 2.0 * std::numbers::pi * eps;
  r.norm_bound = 4.0 * std::numbers::pi * eps;
  if (eps == 0.0) return r;
  const double c2 = c * c;
  r.det_set_area = disc_annulus_area(a, b, std::sqrt(std::max(c2 - eps, 0.0)), std::sqrt(c2 + eps));
  const double ac = std::abs(c);
  r.norm_set_area = disc_annulus_area(a, b, std::max(ac - eps, 0.0), ac + eps);
  return r;
}

struct AssumptionRecord {
  double eps = 0.0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double bound_k_eps_alpha = 0.0;  // regularity_K * eps^alpha
};

/// Monte Carlo estimate of P(|det((A(x) - a)^{-1} + (J + a)^{-1})| <= eps)
/// for each eps, one shared site draw per trial. The family is implied by the
/// distribution and k: disc => BdG (k = 2), scalar with k = 1 => Anderson,
/// otherwise a random Hermitian block.
inline std::vector<AssumptionRecord> empirical_assumption_A(
    const SiteDistribution& dist, std::size_t k, int a, const HermitianMatrix& j,
    std::span<const double> eps_grid, std::uint64_t trials, const SampleSeed& seed,
    double regularity_k = 1.0, double alpha = 1.0) {
  dist.validate();
  detail::require(trials >= 1, Errc::InvalidArgument, "trials must be >= 1");
  detail::require(j.dim() == k, Errc::DimensionMismatch, "J must be k x k");
  ModelFamily family = ModelFamily::RandomBlock;
  if (!dist.scalar()) {
    detail::require(k == 2, Errc::InvalidArgument, "disc distribution needs k = 2");
    family = ModelFamily::BdG;
  } else if (k == 1) {
    family = ModelFamily::Anderson;
  }
  const CMatrix env = inverse(j.shifted(a).matrix(), Errc::SingularFactor, "J + a");

  std::vector<std::uint64_t> hits(eps_grid.size(), 0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    CounterRng rng(stream_key(seed.master, seed.trial + t, 0));
    CMatrix blk = draw_site_block(dist, family, k, rng);
    blk.shift(-static_cast<double>(a));
    const CMatrix x = inverse(blk, Errc::SingularSiteBlock, "A(x) - a") + env;
    const double det = std::abs(complex_determinant(x));
    for (std::size_t e = 0; e < eps_grid.size(); ++e) hits[e] += det <= eps_grid[e] ? 1 : 0;
  }
  std::vector<AssumptionRecord> out;
  for (std::size_t e = 0; e < eps_grid.size(); ++e) {
    const auto p = wilson_interval(hits[e], trials);
    out.push_back({eps_grid[e], hits[e], trials, p.p_hat, p.ci_low, p.ci_high,
                   regularity_k * std::pow(eps_grid[e], alpha)});
  }
  return out;
}

}  // namespace eigcount
