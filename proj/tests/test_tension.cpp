#include <catch2/catch.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "isinggap/fk.hpp"
#include "isinggap/tension.hpp"

using namespace isinggap;

TEST_CASE("zero displacement connects with probability one") {
  McChainConfig cfg{2000, 100, 1, 10, 4};
  Estimate e = connectivity_probability(0.6, 16, {0, 0}, cfg);
  CHECK(e.value == 1.0);
  CHECK(e.se == 0.0);
}

TEST_CASE("boundary guard rejects displacements near the wall") {
  McChainConfig cfg{2000, 100, 1, 10, 4};
  CHECK_THROWS_AS(connectivity_probability(0.6, 16, {10, 0}, cfg), std::invalid_argument);
}

TEST_CASE("dual connectivity decreases as the coupling strengthens") {
  // common seeds across the beta grid
  McChainConfig cfg{20000, 1000, 1, 20, 77};
  std::vector<double> vals, ses;
  for (double beta : {0.50, 0.62, 0.80}) {
    Estimate e = connectivity_probability(beta, 24, {1, 0}, cfg);
    vals.push_back(e.value);
    ses.push_back(e.se);
  }
  for (std::size_t i = 1; i < vals.size(); ++i) {
    const double joint = std::sqrt(ses[i] * ses[i] + ses[i - 1] * ses[i - 1]);
    CHECK(vals[i] < vals[i - 1] - joint);
  }
}

TEST_CASE("mc connectivity matches exact enumeration on the 2x2 box") {
  Geometry g = Geometry::rect(2, 2);
  const double beta = 0.55;
  const double p = -std::expm1(-2.0 * beta);
  // exact wired FK probability of a dual connection across the box
  const Pt u{-1, 0}, v{1, 0};
  double z = 0, hit = 0;
  for (std::uint64_t bits = 0; bits < (1ULL << g.n_bonds()); ++bits) {
    BondConfig w = BondConfig::from_bits(g, bits);
    const double wt = fk_weight(g, w, FKBoundary::wired(), p, 2);
    z += wt;
    detail::DisjointSets ds(g.n_dual_sites());
    for (int e = 0; e < g.n_bonds(); ++e) {
      if (w.open[e]) continue;
      auto [a, b] = g.dual_endpoints(e);
      ds.unite(a, b);
    }
    if (ds.find(g.dual_ord(u)) == ds.find(g.dual_ord(v))) hit += wt;
  }
  const double truth = hit / z;

  McChainConfig cfg{40000, 2000, 1, 20, 99};
  Estimate est = dual_connectivity_mc(g, beta, {{u, v}}, cfg)[0];
  CHECK(std::abs(est.value - truth) <= 3 * est.se);
}

TEST_CASE("tau ladder at a supercritical coupling") {
  const double beta = 0.6 * ModelParams::beta_c();  // coupling density 1-e^{-1.2 beta_c}
  McChainConfig cfg{30000, 2000, 1, 20, 11};
  DirectionalTension t = estimate_tau(beta, {1, 0}, {2, 4, 6}, 32, cfg);
  REQUIRE(t.tau_n.size() == 3);
  // positivity at three standard errors
  CHECK(t.tau - 3 * t.tau_se > 0);
  // subadditive ordering within joint noise
  for (std::size_t i = 1; i < t.tau_n.size(); ++i) {
    const double joint = 3 * std::sqrt(t.tau_n_se[i] * t.tau_n_se[i] +
                                       t.tau_n_se[i - 1] * t.tau_n_se[i - 1]);
    CHECK(t.tau_n[i] <= t.tau_n[i - 1] + joint);
  }
  // internal consistency with the subadditive upper bound on connectivity
  const double tau_lower = std::max(0.0, t.tau - 3 * t.tau_se);
  for (std::size_t i = 0; i < t.ladder.size(); ++i)
    CHECK(t.p_hat[i].value <=
          std::exp(-t.ladder[i] * tau_lower) + 3 * t.p_hat[i].se);
  // every ladder point stays above the extrapolated value within noise
  for (std::size_t i = 0; i < t.tau_n.size(); ++i)
    CHECK(t.tau_n[i] >= t.tau - 3 * (t.tau_se + t.tau_n_se[i]));

  // zero hits must raise, not silently degrade
  McChainConfig small{3000, 200, 1, 10, 5};
  CHECK_THROWS_AS(estimate_tau(1.8, {1, 0}, {14}, 32, small), std::runtime_error);
}

TEST_CASE("analytic norm values and symmetries") {
  NormModel l1 = NormModel::l1();
  NormModel l2 = NormModel::l2();
  NormModel li = NormModel::linf();
  NormModel gauge = NormModel::from_samples(1.0, std::sqrt(2.0));
  CHECK(l1.value(2, -1) == Approx(3));
  CHECK(l2.value(3, 4) == Approx(5));
  CHECK(li.value(2, -1) == Approx(2));
  CHECK(gauge.value(1, 0) == Approx(1));
  CHECK(gauge.value(1, 1) == Approx(std::sqrt(2.0)));
  CHECK(NormModel::scaled(l1, 2.5).value(1, 1) == Approx(5));

  std::vector<std::pair<double, double>> pts{{1, 0}, {2, 1}, {3, -2}, {0.5, 0.25}};
  for (const NormModel& nm : {l1, l2, li, gauge, NormModel::from_samples(0.7, 1.1)}) {
    for (auto [x, y] : pts) {
      const double v = nm.value(x, y);
      CHECK(v > 0);  // positivity off the origin
      // axis and diagonal symmetry
      for (double a : {x, -x})
        for (double b : {y, -y}) {
          CHECK(nm.value(a, b) == Approx(v));
          CHECK(nm.value(b, a) == Approx(v));
        }
      // positive homogeneity
      CHECK(nm.value(2 * x, 2 * y) == Approx(2 * v));
    }
    // triangle inequality on sampled triples
    for (auto [x1, y1] : pts)
      for (auto [x2, y2] : pts)
        CHECK(nm.value(x1 + x2, y1 + y2) <= nm.value(x1, y1) + nm.value(x2, y2) + 1e-12);
  }
}

TEST_CASE("equivnorm bracket") {
  EquivNormReport l1r = check_equivnorm(1.0, 0.0, 2.0, 0.0);
  CHECK(l1r.ratio == Approx(std::sqrt(2.0)));
  CHECK(l1r.pass);
  EquivNormReport l2r = check_equivnorm(1.0, 0.0, std::sqrt(2.0), 0.0);
  CHECK(l2r.ratio == Approx(1.0));
  CHECK(l2r.pass);
  EquivNormReport lir = check_equivnorm(1.0, 0.0, 1.0, 0.0);
  CHECK(lir.ratio == Approx(1.0 / std::sqrt(2.0)));
  CHECK(lir.pass);
  // violation beyond slack
  EquivNormReport bad = check_equivnorm(1.0, 0.001, 3.0, 0.001);
  CHECK(!bad.pass);
  CHECK_THROWS_AS(check_equivnorm(0.0, 0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("normprop excess is strictly positive on the grid") {
  for (const NormModel& nm : {NormModel::l1(), NormModel::l2(), NormModel::linf()}) {
    NormpropResult r = normprop_excess(nm, 12, 3, 2);
    CHECK(r.min_excess > 0);
    CHECK(r.n_z > 0);
  }
  CHECK_THROWS_AS(normprop_excess(NormModel::l2(), 10, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(normprop_excess(NormModel::l2(), 6, 3, 2), std::invalid_argument);
}

TEST_CASE("admissible z excludes the closed triangle") {
  // N=12, k=3, m=2: excluded triangle T_{12.5, 7.5}
  CHECK(!normprop_admissible_z(12, 3, 2, half_of_site({0, -6})));   // inside
  CHECK(normprop_admissible_z(12, 3, 2, half_of_site({0, -4})));    // above apex
  CHECK(normprop_admissible_z(12, 3, 2, half_of_site({8, -12})));   // beside
  CHECK(!normprop_admissible_z(12, 3, 2, half_of_site({0, -14})));  // below H+
  CHECK(!normprop_admissible_z(12, 3, 2, HalfPt{15, -25}));         // on the base, inside
  CHECK(normprop_admissible_z(12, 3, 2, HalfPt{17, -25}));          // on the base, outside
}

TEST_CASE("grid refinement never increases the minimum") {
  NormModel l2 = NormModel::l2();
  NormpropResult coarse = normprop_excess(l2, 10, 2, 2, 2);
  NormpropResult fine = normprop_excess(l2, 10, 2, 2, 1);
  CHECK(fine.min_excess <= coarse.min_excess + 1e-12);
  CHECK(fine.n_z > coarse.n_z);
}

TEST_CASE("crossover point") {
  CHECK(crossover_k(100, 1.0, std::sqrt(2.0)) / 100 ==
        Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
  CHECK(crossover_k(10, 1.0, 2.0) == Approx(5.0));
  CHECK_THROWS_AS(crossover_k(10, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(crossover_k(10, 1.0, -1.0), std::invalid_argument);
}
