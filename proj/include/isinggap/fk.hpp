// Fortuin-Kasteleyn random-cluster model on B-bar(Lambda): weights under
// wired / free / site(eta) / bond boundary conventions, cluster decomposition,
// planar duality, and the Edwards-Sokal coupling in both directions
// (percolation construction and cluster labeling), composed into the
// Swendsen-Wang sweep.
//
// Cluster-count conventions, following the definitions in use:
//  * wired and site(eta): C = number of open clusters (isolated sites count)
//    that do not intersect the exterior boundary;
//  * free = site(eta == 0): bonds to the boundary are forced closed, so C
//    counts components inside the box;
//  * bond(ties): C = clusters of omega with the given exterior wirings that
//    intersect the box.
//
// RNG consumption is pinned for reproducibility: es_percolation draws one
// variate per bond in bond-ordinal order; es_label draws one variate per free
// cluster in increasing root (minimal node ordinal) order.

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "geometry.hpp"
#include "ising.hpp"
#include "rng.hpp"

namespace isinggap {

struct BondConfig {
  std::vector<std::uint8_t> open;  // per bond ordinal of B-bar

  static BondConfig uniform(const Geometry& g, bool open_) {
    BondConfig w;
    w.open.assign(g.n_bonds(), open_ ? 1 : 0);
    return w;
  }
  static BondConfig from_bits(const Geometry& g, std::uint64_t bits) {
    BondConfig w;
    w.open.resize(g.n_bonds());
    for (int e = 0; e < g.n_bonds(); ++e) w.open[e] = (bits >> e) & 1;
    return w;
  }
  int n_open() const {
    int c = 0;
    for (auto v : open) c += v;
    return c;
  }
};

struct FKBoundary {
  enum class Kind { Wired, Free, Site, Bond };
  Kind kind = Kind::Free;
  BoundarySpec eta;                          // Site
  std::vector<std::pair<int, int>> ties;     // Bond: boundary-ordinal pairs
                                             // wired together outside the box

  static FKBoundary wired() { return {Kind::Wired, {}, {}}; }
  static FKBoundary free() { return {Kind::Free, {}, {}}; }
  static FKBoundary site(BoundarySpec e) { return {Kind::Site, std::move(e), {}}; }
  static FKBoundary bond(std::vector<std::pair<int, int>> t) {
    return {Kind::Bond, {}, std::move(t)};
  }
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }
 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

}  // namespace detail

struct ClusterDecomposition {
  // Component label per node (box sites then boundary sites); labels are
  // canonicalized to the minimal node ordinal of the component.
  std::vector<int> label;
  // Cluster count under the active boundary convention (see header comment).
  int count = 0;
  // Site bc only: true when omega leaves V(Lambda,eta) (an open connection
  // joins unequal boundary spins, or an open bond touches an eta=0 site).
  bool violates_site_bc = false;
  // Site bc: per component root, the boundary spin it inherits (0 if the
  // component touches no +-1 boundary site).
  std::vector<std::pair<int, int>> boundary_spin_of_root;
};

inline ClusterDecomposition clusters(const Geometry& g, const BondConfig& omega,
                                     const FKBoundary& bc) {
  if (static_cast<int>(omega.open.size()) != g.n_bonds())
    throw std::invalid_argument("clusters: bond config size mismatch");
  const int n = g.n_nodes();
  detail::DisjointSets ds(n);
  for (int e = 0; e < g.n_bonds(); ++e)
    if (omega.open[e]) ds.unite(g.bonds()[e].a, g.bonds()[e].b);
  if (bc.kind == FKBoundary::Kind::Bond)
    for (auto [i, j] : bc.ties) ds.unite(g.n_sites() + i, g.n_sites() + j);

  ClusterDecomposition out;
  out.label.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    const int r = ds.find(v);
    if (out.label[r] < 0) out.label[r] = v;  // first visit is the minimum
  }
  for (int v = 0; v < n; ++v) out.label[v] = out.label[ds.find(v)];

  // per-root flags
  std::vector<std::uint8_t> touches_boundary(n, 0);
  std::vector<std::uint8_t> touches_box(n, 0);
  std::vector<int> spin_of(n, 0);
  std::vector<std::uint8_t> spin_conflict(n, 0);
  auto eta_at = [&](int node) {
    if (bc.kind == FKBoundary::Kind::Wired) return 1;
    if (bc.kind == FKBoundary::Kind::Site) return bc.eta.at(node - g.n_sites());
    return 0;
  };
  for (int v = 0; v < n; ++v) {
    const int r = out.label[v];
    if (g.node_is_site(v)) {
      touches_box[r] = 1;
      continue;
    }
    touches_boundary[r] = 1;
    const int ev = eta_at(v);
    if (ev == 0) continue;
    if (spin_of[r] == 0) spin_of[r] = ev;
    else if (spin_of[r] != ev) spin_conflict[r] = 1;
  }

  bool violated = false;
  if (bc.kind == FKBoundary::Kind::Site || bc.kind == FKBoundary::Kind::Free) {
    // open bond touching an eta=0 boundary site is forbidden
    for (int e = 0; e < g.n_bonds(); ++e) {
      if (!omega.open[e] || g.bonds()[e].interior) continue;
      const Bond& b = g.bonds()[e];
      const int bd = g.node_is_site(b.a) ? b.b : b.a;
      if (eta_at(bd) == 0) violated = true;
    }
    for (int r = 0; r < n; ++r)
      if (out.label[r] == r && spin_conflict[r]) violated = true;
  }
  out.violates_site_bc = violated;

  int count = 0;
  for (int r = 0; r < n; ++r) {
    if (out.label[r] != r) continue;
    if (bc.kind == FKBoundary::Kind::Bond) {
      if (touches_box[r]) ++count;
    } else {
      if (!touches_boundary[r]) ++count;
    }
    if (r < g.n_sites() || touches_boundary[r])
      out.boundary_spin_of_root.push_back({r, spin_of[r]});
  }
  out.count = count;
  return out;
}

// alpha(p,q) = p / (p + q(1-p)): the uniform conditional lower bound on a
// single bond being open.
inline double alpha(double p, double q) {
  if (p < 0 || p > 1 || q <= 0) throw std::invalid_argument("alpha: bad parameters");
  return p / (p + q * (1.0 - p));
}

// p* dual to p at level q: p/(q(1-p)) = (1-p*)/p*.
inline double dual_p(double p, double q) {
  if (p <= 0 || p >= 1 || q <= 0) throw std::invalid_argument("dual_p: p must be in (0,1)");
  return q * (1.0 - p) / (p + q * (1.0 - p));
}

// W(omega) = p^{|omega|} (1-p)^{|B-bar|-|omega|} q^{C}, zero when a site
// boundary condition's V(Lambda,eta) is violated.
inline double fk_weight(const Geometry& g, const BondConfig& omega,
                        const FKBoundary& bc, double p, double q) {
  if (p < 0 || p > 1) throw std::invalid_argument("fk_weight: p must be in [0,1]");
  if (q <= 0) throw std::invalid_argument("fk_weight: q must be > 0");
  ClusterDecomposition cd = clusters(g, omega, bc);
  if (cd.violates_site_bc) return 0.0;
  const int no = omega.n_open();
  return std::pow(p, no) * std::pow(1.0 - p, g.n_bonds() - no) * std::pow(q, cd.count);
}

// omega* on the dual box: e* open exactly when e closed.  Bonds of the dual
// box's own exterior ring are closed (they cross nothing of B-bar(Lambda)).
inline BondConfig dual_config(const Geometry& g, const Geometry& dual_geom,
                              const BondConfig& omega) {
  BondConfig out = BondConfig::uniform(dual_geom, false);
  for (int e = 0; e < g.n_bonds(); ++e)
    out.open[g.dual_bond_in(dual_geom, e)] = omega.open[e] ? 0 : 1;
  return out;
}

// ---- Edwards-Sokal coupling -------------------------------------------------

// Percolation construction: open each bond between equal spins with density p
// (boundary spins from eta); bonds between unequal spins, and bonds to eta=0
// boundary sites, stay closed.  One variate per bond, in ordinal order.
inline BondConfig es_percolation(const Geometry& g, const SpinConfig& sigma,
                                 const BoundarySpec& eta_, double p, Rng& rng) {
  if (p < 0 || p > 1) throw std::invalid_argument("es_percolation: p must be in [0,1]");
  BondConfig w;
  w.open.resize(g.n_bonds());
  for (int e = 0; e < g.n_bonds(); ++e) {
    const Bond& b = g.bonds()[e];
    const int sa = node_spin(g, sigma, eta_, b.a);
    const int sb = node_spin(g, sigma, eta_, b.b);
    const double u = rng.uniform();
    w.open[e] = (sa != 0 && sa == sb && u < p) ? 1 : 0;
  }
  return w;
}

inline BondConfig es_percolation(const Geometry& g, const SpinConfig& sigma,
                                 const BoundarySpec& eta_, double p,
                                 std::uint64_t seed) {
  Rng rng(seed);
  return es_percolation(g, sigma, eta_, p, rng);
}

// Cluster labeling: clusters touching the boundary inherit the boundary spin;
// free clusters get independent uniform labels, drawn in root-ordinal order.
// Throws if omega violates V(Lambda,eta).
inline SpinConfig es_label(const Geometry& g, const BondConfig& omega,
                           const BoundarySpec& eta_, Rng& rng) {
  ClusterDecomposition cd = clusters(g, omega, FKBoundary::site(eta_));
  if (cd.violates_site_bc)
    throw std::invalid_argument("es_label: omega violates V(Lambda,eta)");
  std::vector<int> spin_of_root(g.n_nodes(), 0);
  for (auto [r, s] : cd.boundary_spin_of_root) spin_of_root[r] = s;
  for (auto& [r, s] : cd.boundary_spin_of_root)
    if (s == 0 && r < g.n_sites())
      spin_of_root[r] = rng.uniform() < 0.5 ? 1 : -1;
  SpinConfig sigma;
  sigma.s.resize(g.n_sites());
  for (int o = 0; o < g.n_sites(); ++o) {
    int s = spin_of_root[cd.label[o]];
    if (s == 0) s = 1;  // unreachable: every box component gets a label above
    sigma.s[o] = static_cast<std::int8_t>(s);
  }
  return sigma;
}

inline SpinConfig es_label(const Geometry& g, const BondConfig& omega,
                           const BoundarySpec& eta_, std::uint64_t seed) {
  Rng rng(seed);
  return es_label(g, omega, eta_, rng);
}

// One Swendsen-Wang sweep at the coupling density p = 1 - e^{-2 beta}, which
// preserves mu prop to e^{-beta H} exactly.  Optionally exposes the intermediate
// bond configuration, an exact sample of the corresponding FK model when
// sigma is at equilibrium.
inline SpinConfig sw_sweep(const Geometry& g, const SpinConfig& sigma,
                           const BoundarySpec& eta_, double beta, Rng& rng,
                           BondConfig* omega_out = nullptr) {
  const double p = -std::expm1(-2.0 * beta);
  BondConfig omega = es_percolation(g, sigma, eta_, p, rng);
  SpinConfig next = es_label(g, omega, eta_, rng);
  if (omega_out) *omega_out = std::move(omega);
  return next;
}

inline SpinConfig sw_sweep(const Geometry& g, const SpinConfig& sigma,
                           const BoundarySpec& eta_, double beta,
                           std::uint64_t seed, BondConfig* omega_out = nullptr) {
  Rng rng(seed);
  return sw_sweep(g, sigma, eta_, beta, rng, omega_out);
}

}  // namespace isinggap
