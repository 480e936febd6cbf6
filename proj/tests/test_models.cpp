#include <gtest/gtest.h>

#include <cstring>
#include <numbers>

#include "eigcount/models.hpp"
#include "eigcount/verify.hpp"
#include "oracles.hpp"

using namespace eigcount;

namespace {

bool bit_identical(const HermitianMatrix& a, const HermitianMatrix& b) {
  const auto& x = a.matrix().data();
  const auto& y = b.matrix().data();
  return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(cplx)) == 0;
}

// |{v in [-b, b] : |1/(v - a) + c| < eps}| by midpoint counting on a fine grid.
double grid_measure(double a, double c, double eps, double b, int cells = 2'000'000) {
  const double w = 2.0 * b / cells;
  int hits = 0;
  for (int i = 0; i < cells; ++i) {
    const double v = -b + (i + 0.5) * w;
    hits += std::abs(1.0 / (v - a) + c) < eps ? 1 : 0;
  }
  return hits * w;
}

}  // namespace

TEST(Graph, PathAndGrid) {
  const auto p = path_graph(4);
  EXPECT_EQ(p.vertices, 4u);
  EXPECT_EQ(p.edges.size(), 3u);
  EXPECT_EQ(p.max_degree, 2u);
  const auto g = grid_graph(3, 2);
  EXPECT_EQ(g.vertices, 6u);
  EXPECT_EQ(g.edges.size(), 7u);
  EXPECT_EQ(g.max_degree, 3u);
  EXPECT_NO_THROW(g.validate());
  EXPECT_EQ(path_graph(1).edges.size(), 0u);
}

TEST(Graph, RejectsBadEdges) {
  EXPECT_THROW(make_graph(3, {{0, 0}}), Error);
  EXPECT_THROW(make_graph(3, {{0, 1}, {1, 0}}), Error);
  EXPECT_THROW(make_graph(3, {{0, 3}}), Error);
  GraphSpec g{3, {{0, 1}, {1, 2}}, 1};
  EXPECT_THROW(g.validate(), Error);
}

TEST(Distribution, Validation) {
  EXPECT_THROW(SiteDistribution::uniform_interval(0.0).validate(), Error);
  EXPECT_THROW(SiteDistribution::custom(1.0, {}, 1.0).validate(), Error);
  EXPECT_THROW(SiteDistribution::custom(1.0, {1.0, -1.0}, 1.0).validate(), Error);
  EXPECT_THROW(SiteDistribution::custom(1.0, {1.0}, 0.0).validate(), Error);
  EXPECT_NO_THROW(SiteDistribution::custom(2.0, {0.0, 1.0}, 0.5).validate());
}

TEST(Distribution, CustomSamplesStayInTheirBins) {
  const auto d = SiteDistribution::custom(2.0, {0.0, 1.0, 0.0, 0.0}, 1.0);
  CounterRng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = d.sample_scalar(rng);
    EXPECT_GE(x, -1.0);
    EXPECT_LE(x, 0.0);
  }
}

TEST(Hamiltonian, ZeroCouplingReturnsHopping) {
  const auto spec = anderson_model(path_graph(5), 0.0, 0.0, 1.0);
  EXPECT_TRUE(bit_identical(sample_hamiltonian(spec, {3, 9}), spec.hopping));
}

TEST(Hamiltonian, DeterministicPerSeed) {
  const auto spec = anderson_model(path_graph(3), 1.0, 0.0, 1.0);
  const auto h1 = sample_hamiltonian(spec, {42, 7});
  const auto h2 = sample_hamiltonian(spec, {42, 7});
  EXPECT_TRUE(bit_identical(h1, h2));
  EXPECT_FALSE(bit_identical(h1, sample_hamiltonian(spec, {42, 8})));
  EXPECT_FALSE(bit_identical(h1, sample_hamiltonian(spec, {43, 7})));
  for (std::size_t x = 0; x < 3; ++x) {
    EXPECT_LE(std::abs(h1(x, x).real()), 1.0);
    EXPECT_EQ(h1(x, x), sample_site_block(spec, {42, 7}, x)(0, 0));
  }
  EXPECT_EQ(h1(0, 1), cplx(-1.0));
  EXPECT_EQ(h1(0, 2), cplx(0.0));
}

TEST(Hamiltonian, SiteStreamsAreIndependentOfGraphSize) {
  const auto small = anderson_model(path_graph(3), 1.0, 0.0, 1.0);
  const auto big = anderson_model(path_graph(9), 1.0, 0.0, 1.0);
  const auto hs = sample_hamiltonian(small, {5, 1});
  const auto hb = sample_hamiltonian(big, {5, 1});
  for (std::size_t x = 0; x < 3; ++x) EXPECT_EQ(hs(x, x), hb(x, x));
}

TEST(Hamiltonian, BdgBlockForm) {
  const auto spec = bdg_model(path_graph(1), 1.0, 0.0);
  for (std::uint64_t t = 0; t < 50; ++t) {
    const auto blk = sample_site_block(spec, {11, t}, 0);
    const double u = blk(0, 0).real(), v = blk(0, 1).real();
    EXPECT_LE(u * u + v * v, 1.0);
    EXPECT_EQ(blk(1, 1).real(), -u);
    EXPECT_EQ(blk(1, 0).real(), v);
    EXPECT_EQ(blk(0, 1).imag(), 0.0);
    const auto ev = eigvalsh(sample_hamiltonian(spec, {11, t}));
    const double r = std::hypot(u, v);
    EXPECT_NEAR(ev[0], -r, 1e-14);
    EXPECT_NEAR(ev[1], r, 1e-14);
  }
}

TEST(Hamiltonian, RandomBlockIsHermitianWithBlockHopping) {
  const auto spec = random_block_model(path_graph(3), 3, 0.5, 0.0, 1.0);
  const auto h = sample_hamiltonian(spec, {1, 2});
  EXPECT_EQ(h.dim(), 9u);
  EXPECT_EQ(h(0, 3), cplx(-1.0));
  EXPECT_EQ(h(0, 4), cplx(0.0));
  EXPECT_EQ(h(0, 6), cplx(0.0));
}

TEST(Hamiltonian, SpecValidation) {
  auto spec = anderson_model(path_graph(2), 1.0, 0.0, 1.0);
  spec.block_size = 2;
  EXPECT_THROW(spec.validate(), Error);
  spec = anderson_model(path_graph(2), 1.0, 0.0, 1.0);
  spec.site_dist = SiteDistribution::uniform_disc();
  EXPECT_THROW(spec.validate(), Error);
  spec = anderson_model(path_graph(2), 1.0, 0.0, 1.0);
  spec.coupling = -1.0;
  EXPECT_THROW(spec.validate(), Error);
  spec = anderson_model(path_graph(2), 1.0, 0.0, 1.0);
  spec.hopping = HermitianMatrix::zero(3);
  EXPECT_THROW(spec.validate(), Error);
}

TEST(ReducedHamiltonian, ZeroCouplingZeroHopping) {
  auto spec = anderson_model(path_graph(3), 0.0, 0.0, 1.0);
  spec.hopping = HermitianMatrix::zero(3);
  const auto h = sample_reduced_hamiltonian(spec, 3, {1, 0});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(h(i, j) - (i == j ? -1.0 / 3.0 : 0.0)), 0.0, 1e-16);
}

TEST(ReducedHamiltonian, AndersonSiteEntriesInRange) {
  auto spec = anderson_model(path_graph(4), 1.0, 0.0, 1.0);
  spec.hopping = HermitianMatrix::zero(4);
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto h = sample_reduced_hamiltonian(spec, 3, {2, t});
    for (std::size_t x = 0; x < 4; ++x) {
      EXPECT_GE(h(x, x).real(), -0.5);
      EXPECT_LE(h(x, x).real(), -0.25);
    }
  }
}

TEST(ReducedHamiltonian, BdgNormAtMostOne) {
  auto spec = bdg_model(grid_graph(2, 2), 1.0, 0.0);
  spec.hopping = spec.hopping.scaled(0.25);
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto h = sample_reduced_hamiltonian(spec, -3, {4, t});
    const auto ev = oracle::eigenvalues(h);
    EXPECT_LE(std::max(std::abs(ev.front()), std::abs(ev.back())), 1.0 + 1e-10);
  }
}

TEST(ReducedHamiltonian, Errors) {
  const auto spec = anderson_model(path_graph(3), 1.0, 0.0, 1.0);
  try {
    sample_reduced_hamiltonian(spec, 3, {1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::HoppingNormTooLarge);
  }
  auto wide = anderson_model(path_graph(1), 1.0, 0.0, 5.0);
  EXPECT_THROW(sample_reduced_hamiltonian(wide, 2, {1, 0}), Error);
  wide.hopping = HermitianMatrix::diagonal({0.5});
  bool singular_or_large = false;
  for (std::uint64_t t = 0; t < 200 && !singular_or_large; ++t) {
    try {
      sample_reduced_hamiltonian(wide, 3, {1, t});
    } catch (const Error& e) {
      singular_or_large = e.code() == Errc::NormTooLarge || e.code() == Errc::SingularSiteBlock;
    }
  }
  EXPECT_TRUE(singular_or_large);
}

TEST(ScalarRegularity, ClosedForm) {
  EXPECT_EQ(scalar_regularity_margin(3, -2.5, 0.0).interval_length, 0.0);
  const auto r = scalar_regularity_margin(3, -2.5, 0.1);
  EXPECT_NEAR(r.interval_length, 0.2 / (4.0 - 0.01), 1e-15);
  EXPECT_NEAR(r.interval_length, 0.050125, 1e-6);
  EXPECT_DOUBLE_EQ(r.bound, 0.4);
  EXPECT_EQ(scalar_regularity_margin(3, -1.0, 0.1).interval_length, 0.0);
  EXPECT_THROW(scalar_regularity_margin(3, 0.0, 0.2), Error);
  EXPECT_THROW(scalar_regularity_margin(2, 0.0, 0.1), Error);
}

TEST(ScalarRegularity, IntervalLengthBelowBound) {
  CounterRng g(99);
  for (int i = 0; i < 1000; ++i) {
    const int a = 3 + static_cast<int>(g.uniform() * 5);
    const double j = -a + g.uniform(0.0, 1.0);
    const double eps = g.uniform(0.0, 1.0 / (2.0 * a));
    const auto r = scalar_regularity_margin(a, j, eps);
    EXPECT_LE(r.interval_length, r.bound);
  }
}

TEST(ScalarRegularity, SupportMeasureMatchesGrid) {
  for (double c : {-0.35, 0.3, 0.45, 0.2, 0.26}) {
    for (double eps : {0.001, 0.01, 0.05}) {
      const double exact = scalar_event_measure(3.0, c, eps, 1.0);
      EXPECT_NEAR(exact, grid_measure(3.0, c, eps, 1.0), 3e-6) << "c=" << c << " eps=" << eps;
    }
  }
}

TEST(Area, MatchesLensFormula) {
  CounterRng g(5);
  for (int i = 0; i < 300; ++i) {
    const double cx = g.uniform(-1.5, 1.5), cy = g.uniform(-1.5, 1.5);
    const double lo = g.uniform(0.0, 1.5), hi = lo + g.uniform(0.0, 1.0);
    EXPECT_NEAR(disc_annulus_area(cx, cy, lo, hi), oracle::disc_annulus_area(cx, cy, lo, hi), 1e-8);
  }
}

TEST(BdgRegularity, CentredDisc) {
  for (double eps : {0.01, 0.1, 0.5}) {
    const auto r = bdg_regularity_margin(0.0, 0.0, 0.0, eps);
    EXPECT_NEAR(r.det_set_area, std::numbers::pi * eps, 1e-9);
    EXPECT_LE(r.det_set_area, r.det_bound);
    EXPECT_DOUBLE_EQ(r.det_bound, 2 * std::numbers::pi * eps);
    EXPECT_DOUBLE_EQ(r.norm_bound, 4 * std::numbers::pi * eps);
  }
  EXPECT_THROW(bdg_regularity_margin(0, 0, 0, 1.5), Error);
}

TEST(BdgRegularity, AnnulusInsideDisc) {
  const double c = 0.4, eps = 0.05;
  const auto r = bdg_regularity_margin(0.1, -0.1, c, eps);
  const double rp2 = c * c + eps, rm2 = c * c - eps;
  EXPECT_NEAR(r.det_set_area, std::numbers::pi * (rp2 - rm2), 1e-9);
  EXPECT_NEAR(r.norm_set_area, std::numbers::pi * ((c + eps) * (c + eps) - (c - eps) * (c - eps)), 1e-9);
}

TEST(BdgRegularity, MonteCarloAgreementAndBounds) {
  CounterRng g(2024);
  for (int i = 0; i < 8; ++i) {
    const double a = g.uniform(-1.0, 1.0), b = g.uniform(-1.0, 1.0), c = g.uniform(-1.5, 1.5);
    const double eps = i % 2 == 0 ? 0.01 : 0.1;
    const auto r = bdg_regularity_margin(a, b, c, eps);
    EXPECT_LE(r.det_set_area, r.det_bound);
    EXPECT_LE(r.norm_set_area, r.norm_bound);
    const auto det_mc = oracle::rejection_area(
        [&](double u, double v) { return std::abs(c * c - (u - a) * (u - a) - (v - b) * (v - b)) <= eps; },
        1'000'000, 100 + i);
    const auto norm_mc = oracle::rejection_area(
        [&](double u, double v) { return std::abs(std::abs(c) - std::hypot(u - a, v - b)) <= eps; }, 1'000'000,
        200 + i);
    EXPECT_LE(std::abs(det_mc.area - r.det_set_area), 3 * det_mc.standard_error + 1e-12) << i;
    EXPECT_LE(std::abs(norm_mc.area - r.norm_set_area), 3 * norm_mc.standard_error + 1e-12) << i;
  }
}

TEST(AssumptionA, SaturatedAndEmptyEvents) {
  const auto d = SiteDistribution::uniform_interval(1.0);
  const auto j = HermitianMatrix::diagonal({0.0});
  const std::vector<double> grid{0.0, 10.0};
  const auto recs = empirical_assumption_A(d, 1, 3, j, grid, 2000, {1, 0});
  EXPECT_EQ(recs[0].p_hat, 0.0);
  EXPECT_EQ(recs[1].p_hat, 1.0);
  EXPECT_DOUBLE_EQ(recs[1].bound_k_eps_alpha, 10.0);
}

TEST(AssumptionA, ScalarMatchesExactMeasure) {
  const auto d = SiteDistribution::uniform_interval(1.0);
  const double c = 0.35;  // (j + a)^{-1}
  const auto j = HermitianMatrix::diagonal({1.0 / c - 3.0});
  const std::vector<double> grid{0.002, 0.01, 0.03};
  const std::uint64_t trials = 200'000;
  const auto recs = empirical_assumption_A(d, 1, 3, j, grid, trials, {77, 0});
  for (const auto& r : recs) {
    const double p = scalar_regularity_margin(3, 1.0 / c - 3.0, r.eps).support_measure / 2.0;
    EXPECT_GT(p, 0.0);
    EXPECT_LE(std::abs(r.p_hat - p), 3 * binomial_standard_error(p, trials) + 1e-12) << r.eps;
  }
}

TEST(AssumptionA, BdgWithinAreaBound) {
  const auto d = SiteDistribution::uniform_disc();
  const auto j = HermitianMatrix(CMatrix{{0.5, 0.1}, {0.1, -0.2}});
  const std::vector<double> grid{0.01, 0.05};
  const auto recs = empirical_assumption_A(d, 2, 3, j, grid, 20'000, {3, 0});
  for (const auto& r : recs) {
    EXPECT_GE(r.p_hat, 0.0);
    EXPECT_LE(r.ci_low, r.p_hat);
    EXPECT_LE(r.p_hat, r.ci_high);
  }
  EXPECT_THROW(empirical_assumption_A(d, 1, 3, HermitianMatrix::zero(1), grid, 10, {3, 0}), Error);
}
