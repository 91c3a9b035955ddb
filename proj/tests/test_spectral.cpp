#include <catch2/catch.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "isinggap/events.hpp"
#include "isinggap/spectral.hpp"

using namespace isinggap;

// Independent gap oracle: full non-symmetric eigendecomposition of -A.
static double gap_oracle(const GeneratorMatrix& gen) {
  Eigen::MatrixXd M = gen.dense_neg_generator();
  Eigen::EigenSolver<Eigen::MatrixXd> es(M);
  std::vector<double> re;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    re.push_back(es.eigenvalues()[i].real());
  std::sort(re.begin(), re.end());
  return re[1];
}

TEST_CASE("generator structure") {
  Geometry gs = Geometry::rect(1, 1);
  GeneratorMatrix gen(gs, BoundarySpec::uniform(gs, 0), 0.0, RateFamily::HeatBath);
  CHECK(gen.dim() == 2);
  CHECK(gen.rate(0, 0) == Approx(0.5));
  CHECK(gen.rate(1, 0) == Approx(0.5));

  Geometry g22 = Geometry::rect(2, 2);
  GeneratorMatrix g2(g22, BoundarySpec::uniform(g22, 0), 0.7, RateFamily::HeatBath);
  Eigen::MatrixXd M = g2.dense_neg_generator();
  CHECK(M.rows() == 16);
  for (int r = 0; r < 16; ++r) {
    int offdiag = 0;
    for (int c = 0; c < 16; ++c)
      if (r != c && M(r, c) != 0.0) ++offdiag;
    CHECK(offdiag == 4);  // Hamming-neighbor structure
  }

  // row sums of A vanish; off-diagonals of -A are -rates in (0,1]
  Rng rng(8);
  for (int rep = 0; rep < 5; ++rep) {
    BoundarySpec b = BoundarySpec::uniform(g22, 0);
    for (auto& v : b.value) v = static_cast<std::int8_t>(rng.below(3) - 1);
    const double beta = 0.2 + rng.uniform();
    GeneratorMatrix gg(g22, b, beta, RateFamily::HeatBath);
    Eigen::MatrixXd A = -gg.dense_neg_generator();
    for (int r = 0; r < 16; ++r) CHECK(std::abs(A.row(r).sum()) < 1e-12);
    CHECK(gg.max_reversibility_violation() < 1e-12);
    // symmetrization exactness
    Eigen::MatrixXd S = gg.dense_sym();
    CHECK((S - S.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }

  Geometry big = Geometry::box(3);
  CHECK_THROWS_AS(GeneratorMatrix(big, BoundarySpec::uniform(big, 0), 1.0,
                                  RateFamily::HeatBath),
                  std::invalid_argument);
}

TEST_CASE("exact gap: single site is 1 for any boundary and beta") {
  Geometry gs = Geometry::rect(1, 1);
  Rng rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    BoundarySpec b = BoundarySpec::uniform(gs, 0);
    for (auto& v : b.value) v = static_cast<std::int8_t>(rng.below(3) - 1);
    const double beta = 2.0 * rng.uniform();
    GeneratorMatrix gen(gs, b, beta, RateFamily::HeatBath);
    GapResult r = exact_gap(gen);
    CHECK(r.gap == Approx(1.0).margin(1e-10));
    CHECK(r.residual < 1e-8);
  }
}

TEST_CASE("exact gap: independent sites at beta = 0") {
  for (auto [w, h] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {3, 3}}) {
    Geometry g = Geometry::rect(w, h);
    GeneratorMatrix gen(g, BoundarySpec::uniform(g, 0), 0.0, RateFamily::HeatBath);
    GapResult r = exact_gap(gen);
    CHECK(r.gap == Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("exact gap matches the non-symmetric oracle on the 2x2 box") {
  Geometry g = Geometry::rect(2, 2);
  GeneratorMatrix gen(g, BoundarySpec::uniform(g, 0), 0.5, RateFamily::HeatBath);
  GapResult dense = exact_gap(gen);
  CHECK(dense.solver == "dense");
  CHECK(dense.gap == Approx(gap_oracle(gen)).margin(1e-8));

  // forced matrix-free path agrees
  GapResult lz = exact_gap(gen, 1, 99);
  CHECK(lz.solver == "lanczos");
  CHECK(lz.gap == Approx(dense.gap).margin(1e-8));
  CHECK(lz.residual < 1e-8);

  // metropolis family, mixed boundary
  BoundarySpec b = BoundarySpec::uniform(g, 1);
  b.value[0] = -1;
  GeneratorMatrix gm(g, b, 0.8, RateFamily::Metropolis);
  CHECK(exact_gap(gm).gap == Approx(gap_oracle(gm)).margin(1e-8));
}

TEST_CASE("lanczos agrees with dense on the 3x3 box") {
  Geometry g = Geometry::box(1);
  GeneratorMatrix gen(g, eta(g, 1, 0), 0.5, RateFamily::HeatBath);
  GapResult dense = exact_gap(gen);
  GapResult lz = exact_gap(gen, 1, 7);
  CHECK(lz.gap == Approx(dense.gap).margin(1e-8));
}

TEST_CASE("zero eigenvalue is simple with eigenvector sqrt(mu)") {
  Geometry g = Geometry::rect(2, 2);
  GeneratorMatrix gen(g, BoundarySpec::uniform(g, 0), 0.9, RateFamily::HeatBath);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gen.dense_sym());
  CHECK(std::abs(es.eigenvalues()[0]) < 1e-12);
  CHECK(es.eigenvalues()[1] > 1e-6);  // multiplicity one
  Eigen::VectorXd ground = es.eigenvectors().col(0);
  Eigen::VectorXd want(16);
  for (int s = 0; s < 16; ++s) want[s] = std::sqrt(gen.mu()[s]);
  want.normalize();
  if (ground.dot(want) < 0) ground = -ground;
  CHECK((ground - want).norm() < 1e-10);
}

TEST_CASE("rayleigh bound") {
  Geometry gs = Geometry::rect(1, 1);
  GeneratorMatrix gen(gs, BoundarySpec::uniform(gs, 0), 0.0, RateFamily::HeatBath);
  std::vector<double> f{0.0, 1.0};  // indicator of +1
  CHECK(rayleigh_bound(gen, f) == Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(rayleigh_bound(gen, std::vector<double>{2.0, 2.0}),
                  std::invalid_argument);

  Geometry g = Geometry::rect(2, 2);
  GeneratorMatrix g2(g, BoundarySpec::uniform(g, 0), 0.7, RateFamily::HeatBath);
  const double gap = exact_gap(g2).gap;
  Rng rng(123);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> fr(16);
    for (auto& v : fr) v = rng.uniform();
    CHECK(rayleigh_bound(g2, fr) >= gap - 1e-8);
  }
}

TEST_CASE("indicator bound") {
  Geometry gs = Geometry::rect(1, 1);
  GeneratorMatrix gen(gs, BoundarySpec::uniform(gs, 0), 0.0, RateFamily::HeatBath);
  IndicatorBound ib = indicator_bound(gen, [](std::uint64_t s) { return s == 1; });
  CHECK(ib.value == Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(indicator_bound(gen, [](std::uint64_t) { return true; }),
                  std::invalid_argument);

  // random nontrivial events on the 2x2 box dominate the gap through the
  // Rayleigh quotient of their indicator
  Geometry g = Geometry::rect(2, 2);
  GeneratorMatrix g2(g, BoundarySpec::uniform(g, 0), 0.7, RateFamily::HeatBath);
  const double gap = exact_gap(g2).gap;
  Rng rng(321);
  for (int rep = 0; rep < 25; ++rep) {
    std::uint64_t mask = rng.bits() & 0xFFFF;
    if (mask == 0 || mask == 0xFFFF) mask = 0x00F3;
    auto S = [mask](std::uint64_t s) { return (mask >> s) & 1; };
    IndicatorBound b = indicator_bound(g2, S);
    std::vector<double> f(16);
    for (int s = 0; s < 16; ++s) f[s] = S(s) ? 1.0 : 0.0;
    const double ray = rayleigh_bound(g2, f);
    CHECK(b.value >= ray - 1e-8);
    CHECK(ray >= gap - 1e-8);
  }
}

TEST_CASE("indicator bound on the event D dominates the 3x3 gap") {
  Geometry g = Geometry::box(1);
  BoundarySpec b = eta(g, 1, 0);
  const double beta = 1.2;
  GeneratorMatrix gen(g, b, beta, RateFamily::HeatBath);
  auto S = [&](std::uint64_t s) {
    return in_D(g, SpinConfig::from_bits(g, s), b, 1);
  };
  IndicatorBound ib = indicator_bound(gen, S);
  CHECK(ib.mu_S > 0);
  CHECK(ib.mu_inner > 0);
  CHECK(ib.mu_inner <= ib.mu_S);
  const double gap = exact_gap(gen).gap;
  CHECK(ib.value >= gap - 1e-8);
}

TEST_CASE("indicator bound, estimate mode") {
  Estimate inner{0.02, 0.004, 10000, 20, 0.1, false, 0};
  Estimate S{0.3, 0.01, 10000, 20, 0.1, false, 0};
  IndicatorBound b = indicator_bound_mc(inner, S, 9);
  CHECK(b.value == Approx(9 * 0.02 / (0.3 * 0.7)).epsilon(1e-12));
  CHECK(b.se > 0);
  Estimate zero{0.0, 0.0, 10000, 20, 0.0, true, 3.0 / 10000};
  IndicatorBound bz = indicator_bound_mc(zero, S, 9);
  CHECK(bz.from_upper_bound);
  CHECK(bz.value == Approx(9 * (3.0 / 10000) / (0.3 * 0.7)).epsilon(1e-12));
  Estimate bad{1.0, 0.0, 100, 10, 0, false, 0};
  CHECK_THROWS_AS(indicator_bound_mc(inner, bad, 9), std::invalid_argument);
}

TEST_CASE("mc event probability") {
  Geometry g = Geometry::box(1);
  BoundarySpec b = eta(g, 1, 0);
  McChainConfig cfg{20000, 1000, 1, 19, 99};
  Estimate always = mc_event_probability(g, b, 0.4, cfg,
                                         [](const SpinConfig&, const BondConfig*) {
                                           return 1.0;
                                         });
  CHECK(always.value == 1.0);
  CHECK(always.se == 0.0);

  Estimate never = mc_event_probability(g, b, 0.4, cfg,
                                        [](const SpinConfig&, const BondConfig*) {
                                          return 0.0;
                                        });
  CHECK(never.value == 0.0);
  CHECK(never.zero_hit);
  CHECK(never.upper95 == Approx(3.0 / never.n));

  McChainConfig bad = cfg;
  bad.batches = 5;
  CHECK_THROWS_AS(mc_event_probability(g, b, 0.4, bad,
                                       [](const SpinConfig&, const BondConfig*) {
                                         return 1.0;
                                       }),
                  std::invalid_argument);
}

TEST_CASE("mc estimate of mu(D) agrees with enumeration") {
  Geometry g = Geometry::box(1);
  BoundarySpec b = eta(g, 1, 0);
  const double beta = 0.2;  // D has measurable probability here
  GibbsTable t = gibbs_table(g, b, beta);
  double truth = 0;
  for (std::uint64_t s = 0; s < t.size(); ++s)
    if (in_D(g, SpinConfig::from_bits(g, s), b, 1)) truth += t.prob[s];
  REQUIRE(truth > 1e-4);

  McChainConfig cfg{60000, 2000, 1, 20, 2024};
  Estimate est = mc_event_probability(g, b, beta, cfg,
                                      [&](const SpinConfig& s, const BondConfig*) {
                                        return in_D(g, s, b, 1) ? 1.0 : 0.0;
                                      });
  REQUIRE(!est.zero_hit);
  CHECK(std::abs(est.value - truth) <= 3 * est.se);
}
