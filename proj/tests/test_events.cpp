#include <catch2/catch.hpp>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "isinggap/events.hpp"
#include "isinggap/fk.hpp"
#include "isinggap/geometry.hpp"
#include "isinggap/ising.hpp"
#include "isinggap/rng.hpp"

using namespace isinggap;

// ---- test-side oracles, built from raw coordinates -------------------------

namespace {

int spin_at(const Geometry& g, const SpinConfig& s, const BoundarySpec& b, Pt p) {
  const int node = g.node_of(p);
  if (node < 0) return 0;
  return node_spin(g, s, b, node);
}

// recursive spin-path reachability over raw coordinates
void reach_rec(const Geometry& g, const SpinConfig& s, const BoundarySpec& b, Pt p,
               int spin, std::set<Pt>& seen) {
  seen.insert(p);
  for (Pt q : {Pt{p.x + 1, p.y}, Pt{p.x - 1, p.y}, Pt{p.x, p.y + 1}, Pt{p.x, p.y - 1}}) {
    if (seen.count(q)) continue;
    // the bond pq must belong to B-bar: at least one endpoint in the box
    if (!g.in_box(p) && !g.in_box(q)) continue;
    if (g.node_of(q) < 0) continue;
    if (spin_at(g, s, b, q) != spin) continue;
    reach_rec(g, s, b, q, spin, seen);
  }
}

std::set<Pt> spin_reach_oracle(const Geometry& g, const SpinConfig& s,
                               const BoundarySpec& b, const std::vector<Pt>& from,
                               int spin) {
  std::set<Pt> seen;
  for (Pt p : from) {
    if (seen.count(p)) continue;
    if (g.node_of(p) < 0) continue;
    if (spin_at(g, s, b, p) != spin) continue;
    reach_rec(g, s, b, p, spin, seen);
  }
  return seen;
}

bool in_D_oracle(const Geometry& g, const SpinConfig& s, const BoundarySpec& b, int k) {
  const int N = g.half_width();
  const int j = (N - k) / 4;
  for (int i = 1; i <= 4; ++i) {
    std::set<Pt> cl = spin_reach_oracle(g, s, b, strip(g, i, k).sites, +1);
    RegionMask tri = triangle_Nk(g, i, k + 3 * j);
    for (Pt p : cl)
      if (g.in_box(p) && !tri.contains_site(p)) return false;
  }
  return true;
}

SpinConfig random_spins(const Geometry& g, Rng& rng, double pplus = 0.5) {
  SpinConfig s;
  s.s.resize(g.n_sites());
  for (auto& v : s.s) v = rng.uniform() < pplus ? 1 : -1;
  return s;
}

// dual connectivity oracle: recursive DFS on half-integer coordinates
struct DualOracle {
  const Geometry& g;
  const BondConfig& w;

  static bool close(double a, double b) { return std::abs(a - b) < 1e-9; }

  // open dual bonds incident to dual site (ux+.5, uy+.5), via raw coordinates
  std::vector<Pt> open_neighbors(Pt u) const {
    std::vector<Pt> out;
    for (int e = 0; e < g.n_bonds(); ++e) {
      if (w.open[e]) continue;  // dual open iff primal closed
      const Bond& b = g.bonds()[e];
      Pt d1, d2;
      if (b.horizontal) {
        d1 = {b.lo.x, b.lo.y - 1};
        d2 = {b.lo.x, b.lo.y};
      } else {
        d1 = {b.lo.x - 1, b.lo.y};
        d2 = {b.lo.x, b.lo.y};
      }
      if (d1 == u) out.push_back(d2);
      if (d2 == u) out.push_back(d1);
    }
    return out;
  }

  template <class Pred>
  void visit(Pt u, Pred pred, std::set<Pt>& seen) const {
    seen.insert(u);
    for (Pt v : open_neighbors(u))
      if (!seen.count(v) && pred(v)) visit(v, pred, seen);
  }
};

}  // namespace

TEST_CASE("plus and minus clusters") {
  Geometry g = Geometry::box(2);
  BoundarySpec bp = BoundarySpec::uniform(g, 1);
  SpinConfig plus = SpinConfig::uniform(g, +1);
  SpinConfig minus = SpinConfig::uniform(g, -1);

  CHECK(plus_cluster(g, strip(g, 1, 1).sites, plus, bp).size() ==
        std::size_t(g.n_sites()));
  CHECK(plus_cluster(g, strip(g, 1, 1).sites, minus, bp).empty());
  CHECK(minus_cluster(g, strip(g, 1, 1).sites, minus, bp).empty());  // strip is +1

  // random configurations against the recursive oracle
  Rng rng(91);
  BoundarySpec b = eta(g, 1, 0);
  for (int rep = 0; rep < 200; ++rep) {
    SpinConfig s = random_spins(g, rng);
    for (int i = 1; i <= 4; ++i) {
      auto got = plus_cluster(g, strip(g, i, 1).sites, s, b);
      std::set<Pt> oracle = spin_reach_oracle(g, s, b, strip(g, i, 1).sites, +1);
      std::set<Pt> oracle_box;
      for (Pt p : oracle)
        if (g.in_box(p)) oracle_box.insert(p);
      CHECK(std::set<Pt>(got.begin(), got.end()) == oracle_box);
    }
  }
}

TEST_CASE("bond clusters against the oracle graph") {
  Geometry g = Geometry::box(1);
  Rng rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    BondConfig w;
    w.open.resize(g.n_bonds());
    for (auto& v : w.open) v = rng.uniform() < 0.5;
    auto got = bond_cluster(g, strip(g, 1, 1).sites, w);
    // oracle: union-free recursive walk over open bonds
    std::set<int> seen;
    std::vector<int> stack;
    for (Pt p : strip(g, 1, 1).sites) {
      const int n = g.node_of(p);
      if (n >= 0 && !seen.count(n)) {
        seen.insert(n);
        stack.push_back(n);
      }
    }
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [nb, e] : g.adj(v))
        if (w.open[e] && !seen.count(nb)) {
          seen.insert(nb);
          stack.push_back(nb);
        }
    }
    std::set<Pt> want;
    for (int n : seen)
      if (g.node_is_site(n)) want.insert(g.node_pt(n));
    CHECK(std::set<Pt>(got.begin(), got.end()) == want);
  }
}

TEST_CASE("event D") {
  Geometry g9 = Geometry::box(9);
  BoundarySpec b9 = eta(g9, 1, 0);
  CHECK(in_D(g9, SpinConfig::uniform(g9, -1), b9, 1));
  CHECK(!in_D(g9, SpinConfig::uniform(g9, +1), b9, 1));

  Geometry g2 = Geometry::box(2);
  BoundarySpec b2 = eta(g2, 1, 0);
  Rng rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    SpinConfig s = random_spins(g2, rng, 0.35);
    CHECK(in_D(g2, s, b2, 1) == in_D_oracle(g2, s, b2, 1));
  }
  CHECK_THROWS_AS(in_D(g2, SpinConfig::uniform(g2, -1), b2, 0), std::invalid_argument);
}

TEST_CASE("event D is decreasing") {
  // exhaustive on N=1
  Geometry g1 = Geometry::box(1);
  BoundarySpec b1 = eta(g1, 1, 0);
  for (std::uint64_t st = 0; st < 512; ++st) {
    SpinConfig s = SpinConfig::from_bits(g1, st);
    if (in_D(g1, s, b1, 1)) continue;
    for (int x = 0; x < 9; ++x) {
      if (s.s[x] > 0) continue;
      SpinConfig up = s;
      up.s[x] = 1;
      CHECK(!in_D(g1, up, b1, 1));
    }
  }
  // sampled on N=2
  Geometry g2 = Geometry::box(2);
  BoundarySpec b2 = eta(g2, 1, 0);
  Rng rng(23);
  for (int rep = 0; rep < 400; ++rep) {
    SpinConfig s = random_spins(g2, rng, 0.5);
    if (in_D(g2, s, b2, 1)) continue;
    for (int x = 0; x < g2.n_sites(); ++x) {
      if (s.s[x] > 0) continue;
      SpinConfig up = s;
      up.s[x] = 1;
      CHECK(!in_D(g2, up, b2, 1));
    }
  }
}

TEST_CASE("inner boundary of D") {
  Geometry g = Geometry::box(2);
  BoundarySpec b = eta(g, 1, 0);
  Rng rng(77);
  int inner_seen = 0;
  for (int rep = 0; rep < 300; ++rep) {
    SpinConfig s = random_spins(g, rng, 0.3);
    // independent two-pass oracle
    bool oracle = in_D_oracle(g, s, b, 1);
    if (oracle) {
      bool exits = false;
      for (int x = 0; x < g.n_sites() && !exits; ++x) {
        SpinConfig f = s;
        f.s[x] = static_cast<std::int8_t>(-f.s[x]);
        if (!in_D_oracle(g, f, b, 1)) exits = true;
      }
      oracle = exits;
    }
    const bool got = in_inner_boundary_D(g, s, b, 1);
    CHECK(got == oracle);
    inner_seen += got;
    if (!in_D(g, s, b, 1)) CHECK(!got);  // inner boundary is a subset of D
  }
  CHECK(inner_seen > 0);

  // deep-minus configuration: inside D, no single flip exits
  Geometry g6 = Geometry::box(6);
  BoundarySpec b6 = eta(g6, 1, 0);
  SpinConfig deep = SpinConfig::uniform(g6, -1);
  CHECK(in_D(g6, deep, b6, 1));
  CHECK(!in_inner_boundary_D(g6, deep, b6, 1));
}

TEST_CASE("event D-hat") {
  Geometry g = Geometry::box(6);
  BoundarySpec b = eta(g, 4, -1);
  CHECK(in_Dhat(g, SpinConfig::uniform(g, +1), b, 4));
  CHECK(!in_Dhat(g, SpinConfig::uniform(g, -1), b, 4));
  CHECK_THROWS_AS(in_Dhat(g, SpinConfig::uniform(g, +1), b, 3), std::invalid_argument);
  CHECK_THROWS_AS(in_Dhat(g, SpinConfig::uniform(g, +1), eta(g, 4, 0), 4),
                  std::invalid_argument);

  // minus droplet confined to the bottom-right corner square [1,7]x[-7,-1]
  SpinConfig droplet = SpinConfig::uniform(g, +1);
  droplet.s[g.site_ord({6, -6})] = -1;
  droplet.s[g.site_ord({5, -6})] = -1;
  droplet.s[g.site_ord({6, -5})] = -1;
  CHECK(in_Dhat(g, droplet, b, 4));
  // minus path escaping the square: walk from the corner strip into the bulk
  SpinConfig leak = droplet;
  for (int x = 6; x >= 0; --x) leak.s[g.site_ord({x, -6})] = -1;
  CHECK(!in_Dhat(g, leak, b, 4));

  // random configurations against an oracle built from the same pairing
  Rng rng(13);
  const int m = 1;  // floor(4/4)
  for (int rep = 0; rep < 120; ++rep) {
    SpinConfig s = random_spins(g, rng, 0.75);
    bool oracle = true;
    const int sq_side[5] = {0, 4, 3, 2, 1};  // strip corner i -> square side
    for (int i = 1; i <= 4 && oracle; ++i) {
      std::set<Pt> cl = spin_reach_oracle(g, s, b, corner_strip(g, i, 4).sites, -1);
      RegionMask sq = square_region(g, sq_side[i], m);
      for (Pt p : cl)
        if (g.in_box(p) && !sq.contains_site(p)) oracle = false;
    }
    CHECK(in_Dhat(g, s, b, 4) == oracle);
  }
}

TEST_CASE("dual crossing E") {
  Geometry g = Geometry::box(3);
  const int k = 1, j = 0;
  CHECK(!dual_crossing_E(g, BondConfig::uniform(g, true), k, j, 1));
  for (int i = 1; i <= 4; ++i)
    CHECK(dual_crossing_E(g, BondConfig::uniform(g, false), k, j, i));

  // random omegas against the coordinate-level dual DFS oracle
  Rng rng(29);
  int hits = 0;
  for (int rep = 0; rep < 150; ++rep) {
    BondConfig w;
    w.open.resize(g.n_bonds());
    for (auto& v : w.open) v = rng.uniform() < 0.35;
    DualOracle oracle{g, w};
    auto tri = [&](Pt d) {
      const double x = d.x + 0.5, y = d.y + 0.5;
      return y >= -3.5 && y + std::abs(x) <= 1.5 - 3.5;
    };
    RegionMask from = dual_corner_set(g, 4, k);  // Gamma*_{4,1}
    RegionMask to = dual_corner_set(g, 1, k);    // Gamma*_{1,2}
    std::set<Pt> seen;
    for (Pt u : from.dual_sites)
      if (tri(u) && !seen.count(u)) oracle.visit(u, tri, seen);
    bool want = false;
    for (Pt v : to.dual_sites)
      if (tri(v) && seen.count(v)) want = true;
    CHECK(dual_crossing_E(g, w, k, j, 1) == want);
    hits += want;
  }
  CHECK(hits > 0);
}

TEST_CASE("square crossing F") {
  Geometry g = Geometry::box(6);
  const int k = 4;
  for (int i = 1; i <= 4; ++i) {
    CHECK(square_crossing_F(g, BondConfig::uniform(g, false), k, i));
    CHECK(!square_crossing_F(g, BondConfig::uniform(g, true), k, i));
  }

  Rng rng(37);
  int hits = 0;
  for (int rep = 0; rep < 100; ++rep) {
    BondConfig w;
    w.open.resize(g.n_bonds());
    for (auto& v : w.open) v = rng.uniform() < 0.35;
    DualOracle oracle{g, w};
    // bottom-right square [1,7] x [-7,-1] in dual coordinates
    auto sq = [&](Pt d) {
      const double x = d.x + 0.5, y = d.y + 0.5;
      return x >= 1 && x <= 7 && y >= -7 && y <= -1;
    };
    const Pt from{4, -7};  // (4.5, -6.5): x_{1,2} for N=6,k=4
    const Pt to{6, -5};    // (6.5, -4.5): x_{2,1}
    std::set<Pt> seen;
    if (sq(from)) oracle.visit(from, sq, seen);
    const bool want = sq(to) && seen.count(to) > 0;
    CHECK(square_crossing_F(g, w, k, 1) == want);
    hits += want;
  }
  CHECK(hits > 0);
}

TEST_CASE("strip connectivity") {
  Geometry g = Geometry::box(2);
  BoundarySpec b = eta(g, 1, 0);
  CHECK(strip_connectivity(g, SpinConfig::uniform(g, +1), b, 1).size() == 6);
  CHECK(strip_connectivity(g, SpinConfig::uniform(g, -1), b, 1).empty());

  // a crafted bridge joining only Gamma_1 (bottom) and Gamma_2 (left)
  SpinConfig s = SpinConfig::uniform(g, -1);
  for (Pt p : {Pt{0, -2}, Pt{-1, -2}, Pt{-2, -2}, Pt{-2, -1}, Pt{-2, 0}})
    s.s[g.site_ord(p)] = 1;
  auto pairs = strip_connectivity(g, s, b, 1);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == std::pair<int, int>{1, 2});
}

// Coupling compatibility: for an allowable pair where every free cluster is
// labeled -1 (a positive-probability labeling of any sampled omega), the four
// dual crossings E_i confine each bond cluster C(Gamma_i, omega), and with
// all other clusters minus the plus clusters coincide with them, so sigma
// must lie in D.
TEST_CASE("coupling compatibility: E for all sides forces D under minus labeling") {
  Geometry g = Geometry::box(4);
  const int k = 1;
  BoundarySpec b = eta(g, k, 0);
  const int j = d_event_j(4, k);
  const double beta = 0.3;
  Rng rng(4242);
  SpinConfig sigma = SpinConfig::uniform(g, +1);
  BondConfig omega;
  long fired = 0;
  for (int sweep = 0; sweep < 50000; ++sweep) {
    sigma = sw_sweep(g, sigma, b, beta, rng, &omega);
    bool all_E = true;
    for (int i = 1; i <= 4 && all_E; ++i)
      if (!dual_crossing_E(g, omega, k, j, i)) all_E = false;
    if (!all_E) continue;
    ++fired;
    ClusterDecomposition cd = clusters(g, omega, FKBoundary::site(b));
    REQUIRE(!cd.violates_site_bc);
    std::vector<int> root_spin(g.n_nodes(), -1);
    for (auto [r, s] : cd.boundary_spin_of_root)
      if (s != 0) root_spin[r] = s;
    SpinConfig forced;
    forced.s.resize(g.n_sites());
    for (int o = 0; o < g.n_sites(); ++o)
      forced.s[o] = static_cast<std::int8_t>(root_spin[cd.label[o]]);
    REQUIRE(in_D(g, forced, b, k));
  }
  CHECK(fired > 0);
}

TEST_CASE("event registry") {
  Geometry g = Geometry::box(6);
  BoundarySpec b = eta(g, 4, -1);
  auto reg = event_registry(g, b, 4);
  CHECK(reg.count("D") == 1);
  CHECK(reg.count("Dhat") == 1);
  CHECK(reg.count("AN") == 1);
  for (const char* name : {"E1", "E2", "E3", "E4", "F12", "F23", "F34", "F41"})
    CHECK(reg.count(name) == 1);

  Rng rng(3);
  SpinConfig s = SpinConfig::uniform(g, +1);
  BondConfig w = es_percolation(g, s, b, 0.6, rng);
  CHECK(reg["D"].eval(s, &w) == (in_D(g, s, b, 4) ? 1.0 : 0.0));
  CHECK(reg["Dhat"].eval(s, &w) == (in_Dhat(g, s, b, 4) ? 1.0 : 0.0));
  CHECK(reg["AN"].eval(s, &w) ==
        static_cast<double>(strip_connectivity(g, s, b, 4).size()));
  CHECK(reg["E1"].eval(s, &w) ==
        (dual_crossing_E(g, w, 4, d_event_j(6, 4), 1) ? 1.0 : 0.0));
  CHECK(reg["F12"].eval(s, &w) == (square_crossing_F(g, w, 4, 1) ? 1.0 : 0.0));
  CHECK_THROWS_AS(reg["E1"].eval(s, nullptr), std::invalid_argument);

  // no Dhat under eps = 0
  auto reg0 = event_registry(g, eta(g, 4, 0), 4);
  CHECK(reg0.count("Dhat") == 0);
}
