// Finite boxes of Z^2: sites, exterior boundary, bond sets, the dual box,
// eta-family boundary conditions and the region masks (strips, corner strips,
// triangles, squares, dual corner sets) that the event definitions consume.
//
// Conventions fixed here and relied on everywhere else:
//  * site ordinals are row-major (y outer, x inner) over the box;
//  * boundary ordinals run bottom row, left column, top row, right column;
//  * bond ordinals list all horizontal bonds first (row-major by left
//    endpoint, including the two per row that cross the boundary), then all
//    vertical bonds (column-major by lower endpoint);
//  * the dual site (a+1/2, b+1/2) is stored as the integer pair (a, b); the
//    dual of the box [x0,x1]x[y0,y1] is the box [x0-1,x1]x[y0-1,y1];
//  * the dual of the horizontal bond with left endpoint (a,b) is the vertical
//    dual bond (a,b-1)-(a,b); the dual of the vertical bond with lower
//    endpoint (a,b) is the horizontal dual bond (a-1,b)-(a,b).
//
// Exact geometry predicates work in half-units (coordinates doubled), so
// half-integer triangle and square parameters need no floating point.

#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace isinggap {

struct Pt {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pt&, const Pt&) = default;
  friend auto operator<=>(const Pt&, const Pt&) = default;
};

// A point in half-units: (hx, hy) represents (hx/2, hy/2).
struct HalfPt {
  long long hx = 0;
  long long hy = 0;
  friend bool operator==(const HalfPt&, const HalfPt&) = default;
};

inline HalfPt half_of_site(Pt p) { return {2LL * p.x, 2LL * p.y}; }
// Dual site stored as (a,b) meaning (a+1/2, b+1/2).
inline HalfPt half_of_dual(Pt d) { return {2LL * d.x + 1, 2LL * d.y + 1}; }

// 90-degree rotations. cw maps the bottom side to the left side, ccw maps the
// bottom side to the right side.
inline HalfPt rot_cw(HalfPt p) { return {p.hy, -p.hx}; }
inline HalfPt rot_ccw(HalfPt p) { return {-p.hy, p.hx}; }
inline Pt rot_cw(Pt p) { return {p.y, -p.x}; }
inline Pt rot_ccw(Pt p) { return {-p.y, p.x}; }

struct Bond {
  int a = 0;        // node id of one endpoint (node ids: see Geometry)
  int b = 0;        // node id of the other
  bool horizontal = false;
  bool interior = false;  // both endpoints in the box
  Pt lo;            // left (horizontal) or lower (vertical) endpoint coords
};

class Geometry {
 public:
  // General rectangle [x0,x1] x [y0,y1], both bounds inclusive.
  Geometry(int x0, int y0, int x1, int y1) : x0_(x0), y0_(y0), x1_(x1), y1_(y1) {
    if (x1 < x0 || y1 < y0) throw std::invalid_argument("Geometry: empty box");
    nx_ = x1 - x0 + 1;
    ny_ = y1 - y0 + 1;
    n_sites_ = nx_ * ny_;
    build();
  }

  // The box Lambda_N = [-N,N]^2.
  static Geometry box(int N) {
    if (N < 1) throw std::invalid_argument("box: N must be >= 1");
    Geometry g(-N, -N, N, N);
    g.N_ = N;
    return g;
  }

  static Geometry rect(int width, int height) {
    if (width < 1 || height < 1) throw std::invalid_argument("rect: empty");
    return Geometry(0, 0, width - 1, height - 1);
  }

  int x0() const { return x0_; }
  int y0() const { return y0_; }
  int x1() const { return x1_; }
  int y1() const { return y1_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int n_sites() const { return n_sites_; }
  int n_boundary() const { return static_cast<int>(boundary_.size()); }
  int n_nodes() const { return n_sites_ + n_boundary(); }
  int n_bonds() const { return static_cast<int>(bonds_.size()); }
  int n_interior_bonds() const { return n_interior_bonds_; }

  bool is_centered_square() const { return N_ > 0; }
  int half_width() const {
    if (N_ <= 0) throw std::logic_error("half_width: not a centered box");
    return N_;
  }

  bool in_box(Pt p) const {
    return p.x >= x0_ && p.x <= x1_ && p.y >= y0_ && p.y <= y1_;
  }

  int site_ord(Pt p) const { return (p.y - y0_) * nx_ + (p.x - x0_); }
  Pt site_at(int ord) const { return {x0_ + ord % nx_, y0_ + ord / nx_}; }

  const std::vector<Pt>& boundary_sites() const { return boundary_; }

  // Node ids: 0..n_sites-1 are box sites (site ordinal), then boundary sites.
  int node_of_site(Pt p) const { return site_ord(p); }
  int node_of_boundary(Pt p) const {
    auto it = std::lower_bound(boundary_sorted_.begin(), boundary_sorted_.end(),
                               std::pair<Pt, int>{p, -1});
    if (it == boundary_sorted_.end() || it->first != p)
      throw std::invalid_argument("node_of_boundary: not a boundary site");
    return n_sites_ + it->second;
  }
  // Returns -1 if p is neither a box site nor a boundary site.
  int node_of(Pt p) const {
    if (in_box(p)) return site_ord(p);
    auto it = std::lower_bound(boundary_sorted_.begin(), boundary_sorted_.end(),
                               std::pair<Pt, int>{p, -1});
    if (it == boundary_sorted_.end() || it->first != p) return -1;
    return n_sites_ + it->second;
  }
  bool node_is_site(int node) const { return node < n_sites_; }
  Pt node_pt(int node) const {
    return node < n_sites_ ? site_at(node) : boundary_[node - n_sites_];
  }

  const std::vector<Bond>& bonds() const { return bonds_; }
  // adjacency over nodes: (neighbor node, bond index)
  const std::vector<std::pair<int, int>>& adj(int node) const { return adj_[node]; }

  int hbond_index(int x, int y) const {  // bond (x,y)-(x+1,y)
    if (y < y0_ || y > y1_ || x < x0_ - 1 || x > x1_)
      throw std::invalid_argument("hbond_index: out of range");
    return (y - y0_) * (nx_ + 1) + (x - (x0_ - 1));
  }
  int vbond_index(int x, int y) const {  // bond (x,y)-(x,y+1)
    if (x < x0_ || x > x1_ || y < y0_ - 1 || y > y1_)
      throw std::invalid_argument("vbond_index: out of range");
    return ny_ * (nx_ + 1) + (x - x0_) * (ny_ + 1) + (y - (y0_ - 1));
  }

  // ---- dual box ----------------------------------------------------------

  int dual_nx() const { return nx_ + 1; }
  int dual_ny() const { return ny_ + 1; }
  int n_dual_sites() const { return dual_nx() * dual_ny(); }
  bool dual_in_box(Pt d) const {
    return d.x >= x0_ - 1 && d.x <= x1_ && d.y >= y0_ - 1 && d.y <= y1_;
  }
  int dual_ord(Pt d) const { return (d.y - (y0_ - 1)) * dual_nx() + (d.x - (x0_ - 1)); }
  Pt dual_at(int ord) const {
    return {x0_ - 1 + ord % dual_nx(), y0_ - 1 + ord / dual_nx()};
  }

  // Endpoints (as dual ordinals) of the dual bond crossing bond `e`.
  std::pair<int, int> dual_endpoints(int e) const {
    const Bond& b = bonds_[e];
    if (b.horizontal)
      return {dual_ord({b.lo.x, b.lo.y - 1}), dual_ord({b.lo.x, b.lo.y})};
    return {dual_ord({b.lo.x - 1, b.lo.y}), dual_ord({b.lo.x, b.lo.y})};
  }

  // adjacency over dual sites: (neighbor dual ordinal, primal bond index)
  const std::vector<std::pair<int, int>>& dual_adj(int dual_ord) const {
    return dual_adj_[dual_ord];
  }

  // The dual box as a Geometry in shifted integer coordinates, plus the map
  // from each bond of this box to the corresponding interior bond of the dual
  // box.  (e*)* recovers e shifted by (-1,-1), the usual involution up to the
  // half-lattice shift.
  Geometry dual_geometry() const { return Geometry(x0_ - 1, y0_ - 1, x1_, y1_); }
  int dual_bond_in(const Geometry& dual, int e) const {
    const Bond& b = bonds_[e];
    if (b.horizontal) return dual.vbond_index(b.lo.x, b.lo.y - 1);
    return dual.hbond_index(b.lo.x - 1, b.lo.y);
  }

 private:
  void build() {
    // boundary: bottom, left, top, right (sides 1..4 of the eta family)
    for (int x = x0_; x <= x1_; ++x) boundary_.push_back({x, y0_ - 1});
    for (int y = y0_; y <= y1_; ++y) boundary_.push_back({x0_ - 1, y});
    for (int x = x0_; x <= x1_; ++x) boundary_.push_back({x, y1_ + 1});
    for (int y = y0_; y <= y1_; ++y) boundary_.push_back({x1_ + 1, y});
    for (int i = 0; i < static_cast<int>(boundary_.size()); ++i)
      boundary_sorted_.push_back({boundary_[i], i});
    std::sort(boundary_sorted_.begin(), boundary_sorted_.end());

    auto add_bond = [&](Pt lo, bool horizontal) {
      Pt hi = horizontal ? Pt{lo.x + 1, lo.y} : Pt{lo.x, lo.y + 1};
      Bond b;
      b.horizontal = horizontal;
      b.lo = lo;
      b.interior = in_box(lo) && in_box(hi);
      b.a = in_box(lo) ? node_of_site(lo) : node_of_boundary(lo);
      b.b = in_box(hi) ? node_of_site(hi) : node_of_boundary(hi);
      bonds_.push_back(b);
      if (b.interior) ++n_interior_bonds_;
    };
    for (int y = y0_; y <= y1_; ++y)
      for (int x = x0_ - 1; x <= x1_; ++x) add_bond({x, y}, true);
    for (int x = x0_; x <= x1_; ++x)
      for (int y = y0_ - 1; y <= y1_; ++y) add_bond({x, y}, false);

    adj_.assign(n_nodes(), {});
    for (int e = 0; e < n_bonds(); ++e) {
      adj_[bonds_[e].a].push_back({bonds_[e].b, e});
      adj_[bonds_[e].b].push_back({bonds_[e].a, e});
    }
    dual_adj_.assign(n_dual_sites(), {});
    for (int e = 0; e < n_bonds(); ++e) {
      auto [u, v] = dual_endpoints(e);
      dual_adj_[u].push_back({v, e});
      dual_adj_[v].push_back({u, e});
    }
  }

  int x0_, y0_, x1_, y1_;
  int nx_ = 0, ny_ = 0, n_sites_ = 0, n_interior_bonds_ = 0;
  int N_ = 0;  // > 0 iff centered square box
  std::vector<Pt> boundary_;
  std::vector<std::pair<Pt, int>> boundary_sorted_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
  std::vector<std::vector<std::pair<int, int>>> dual_adj_;
};

// ---- boundary conditions --------------------------------------------------

struct BoundarySpec {
  std::vector<std::int8_t> value;  // indexed by boundary ordinal, in {-1,0,1}
  int k = -1;                      // provenance when built by eta(); else -1
  int eps = 0;

  static BoundarySpec uniform(const Geometry& g, int v) {
    if (v < -1 || v > 1) throw std::invalid_argument("boundary value must be in {-1,0,1}");
    BoundarySpec b;
    b.value.assign(g.n_boundary(), static_cast<std::int8_t>(v));
    return b;
  }
  int at(int boundary_ord) const { return value[boundary_ord]; }
};

// eta^{k,eps}: +1 on boundary sites within Euclidean distance k of either
// axis (for integer sites that is min(|x|,|y|) <= k), eps elsewhere.
inline BoundarySpec eta(const Geometry& g, int k, int eps) {
  if (!g.is_centered_square()) throw std::invalid_argument("eta: centered box required");
  if (eps != 0 && eps != -1) throw std::invalid_argument("eta: eps must be 0 or -1");
  const int N = g.half_width();
  if (k < 1 || k > N) throw std::invalid_argument("eta: k must be in [1,N]");
  BoundarySpec b;
  b.k = k;
  b.eps = eps;
  b.value.reserve(g.n_boundary());
  for (Pt p : g.boundary_sites()) {
    const bool plus = std::min(std::abs(p.x), std::abs(p.y)) <= k;
    b.value.push_back(static_cast<std::int8_t>(plus ? 1 : eps));
  }
  return b;
}

// ---- region masks ----------------------------------------------------------

enum class RegionKind { Strip, CornerStrip, Triangle, Square, DualCorner };

// Triangle with base on the line y = -A and apex (0, B - A), A and B in
// half-units; closed containment.  T^1_{N,k} has A2 = 2N, B2 = 2k.
inline bool triangle_base_contains(long long A2, long long B2, HalfPt p) {
  return p.hy >= -A2 && p.hy + std::llabs(p.hx) <= B2 - A2;
}

// Square S^{1,2}_{N,m} = [m, N+1] x [-N-1, -m] (bottom-right corner), in
// half-units A2 = 2N, B2 = 2m; closed containment.
inline bool square_base_contains(long long A2, long long B2, HalfPt p) {
  return p.hx >= B2 && p.hx <= A2 + 2 && p.hy >= -A2 - 2 && p.hy <= -B2;
}

struct RegionMask {
  RegionKind kind = RegionKind::Strip;
  int side = 1;           // 1..4
  long long A2 = 0;       // doubled parameters, meaning depends on kind
  long long B2 = 0;
  std::vector<Pt> sites;       // strips/corner strips: defining sites;
                               // triangle/square: box sites inside
  std::vector<Pt> dual_sites;  // dual-corner sets; triangle/square: dual box
                               // sites inside (integer-shifted labels)

  bool contains_site(Pt p) const { return contains_half(half_of_site(p)); }
  bool contains_dual(Pt d) const { return contains_half(half_of_dual(d)); }

  bool contains_half(HalfPt p) const {
    switch (kind) {
      case RegionKind::Triangle: {
        HalfPt q = p;
        for (int r = 1; r < side; ++r) q = rot_ccw(q);  // sides step clockwise
        return triangle_base_contains(A2, B2, q);
      }
      case RegionKind::Square: {
        HalfPt q = p;
        for (int r = 1; r < side; ++r) q = rot_cw(q);   // corners step counterclockwise
        return square_base_contains(A2, B2, q);
      }
      default:
        throw std::logic_error("contains_half: list-based region");
    }
  }
};

namespace detail {

inline std::vector<Pt> rotate_sites_cw(const std::vector<Pt>& base, int times) {
  std::vector<Pt> out;
  out.reserve(base.size());
  for (Pt p : base) {
    Pt q = p;
    for (int r = 0; r < times; ++r) q = rot_cw(q);
    out.push_back(q);
  }
  return out;
}

}  // namespace detail

// Gamma_i: the 2k+1 central boundary sites of side i (1 bottom, 2 left, 3 top,
// 4 right).
inline RegionMask strip(const Geometry& g, int side, int k) {
  if (!g.is_centered_square()) throw std::invalid_argument("strip: centered box required");
  if (side < 1 || side > 4) throw std::invalid_argument("strip: side in 1..4");
  const int N = g.half_width();
  if (k < 0 || k > N) throw std::invalid_argument("strip: k in [0,N]");
  std::vector<Pt> base;
  for (int t = -k; t <= k; ++t) base.push_back({t, -N - 1});
  RegionMask m;
  m.kind = RegionKind::Strip;
  m.side = side;
  m.B2 = 2 * k;
  m.sites = detail::rotate_sites_cw(base, side - 1);
  std::sort(m.sites.begin(), m.sites.end());
  return m;
}

// Gamma_{i,i+1}: boundary sites between Gamma_i and Gamma_{i+1}, plus the
// corner site.  Base case i=1 is the bottom-left corner, containing
// (-N-1,-N-1); i=2,3,4 by clockwise rotation (top-left, top-right,
// bottom-right).
inline RegionMask corner_strip(const Geometry& g, int side, int k) {
  if (!g.is_centered_square()) throw std::invalid_argument("corner_strip: centered box required");
  if (side < 1 || side > 4) throw std::invalid_argument("corner_strip: side in 1..4");
  const int N = g.half_width();
  if (k < 0 || k > N) throw std::invalid_argument("corner_strip: k in [0,N]");
  std::vector<Pt> base;
  for (int t = -N; t <= -k - 1; ++t) base.push_back({t, -N - 1});
  base.push_back({-N - 1, -N - 1});
  for (int t = -N; t <= -k - 1; ++t) base.push_back({-N - 1, t});
  RegionMask m;
  m.kind = RegionKind::CornerStrip;
  m.side = side;
  m.B2 = 2 * k;
  m.sites = detail::rotate_sites_cw(base, side - 1);
  std::sort(m.sites.begin(), m.sites.end());
  return m;
}

// Gamma*_{i,i+1}: dual sites on the ring max(|x|,|y|) = N+1/2 that are corners
// of Q(y) for some y in Gamma_{i,i+1}.  Indexed like corner_strip.
inline RegionMask dual_corner_set(const Geometry& g, int side, int k) {
  RegionMask cs = corner_strip(g, side, k);
  const long long ring = 2LL * g.half_width() + 1;
  std::set<Pt> out;
  for (Pt y : cs.sites) {
    for (int dx : {-1, 0})
      for (int dy : {-1, 0}) {
        Pt d{y.x + dx, y.y + dy};  // dual site (y.x+dx+1/2, y.y+dy+1/2)
        HalfPt h = half_of_dual(d);
        if (std::max(std::llabs(h.hx), std::llabs(h.hy)) == ring) out.insert(d);
      }
  }
  RegionMask m;
  m.kind = RegionKind::DualCorner;
  m.side = side;
  m.B2 = 2 * k;
  m.dual_sites.assign(out.begin(), out.end());
  return m;
}

// T^i_{A,B} with doubled parameters (A2 = 2A, B2 = 2B).  Side 1 has its base
// in the bottom of the box; 2,3,4 by clockwise rotation.  Resolves member box
// sites and member dual sites.
inline RegionMask triangle_region(const Geometry& g, int side, long long A2, long long B2) {
  if (!g.is_centered_square()) throw std::invalid_argument("triangle: centered box required");
  if (side < 1 || side > 4) throw std::invalid_argument("triangle: side in 1..4");
  const int N = g.half_width();
  if (B2 < 0) throw std::invalid_argument("triangle: negative width");
  if (B2 - A2 > 2 * N) throw std::invalid_argument("triangle: apex above the box");
  RegionMask m;
  m.kind = RegionKind::Triangle;
  m.side = side;
  m.A2 = A2;
  m.B2 = B2;
  for (int o = 0; o < g.n_sites(); ++o)
    if (m.contains_site(g.site_at(o))) m.sites.push_back(g.site_at(o));
  for (int o = 0; o < g.n_dual_sites(); ++o)
    if (m.contains_dual(g.dual_at(o))) m.dual_sites.push_back(g.dual_at(o));
  return m;
}

// T^i_{N,k} on lattice parameters.
inline RegionMask triangle_Nk(const Geometry& g, int side, int k) {
  return triangle_region(g, side, 2LL * g.half_width(), 2LL * k);
}

// S^{i,i+1}_{N,m}.  Side 1 is the bottom-right corner square
// [m,N+1] x [-N-1,-m]; 2,3,4 by counterclockwise rotation (top-right,
// top-left, bottom-left).
inline RegionMask square_region(const Geometry& g, int side, int m_param) {
  if (!g.is_centered_square()) throw std::invalid_argument("square: centered box required");
  if (side < 1 || side > 4) throw std::invalid_argument("square: side in 1..4");
  const int N = g.half_width();
  if (m_param < 0 || m_param > N) throw std::invalid_argument("square: m in [0,N]");
  RegionMask m;
  m.kind = RegionKind::Square;
  m.side = side;
  m.A2 = 2LL * N;
  m.B2 = 2LL * m_param;
  for (int o = 0; o < g.n_sites(); ++o)
    if (m.contains_site(g.site_at(o))) m.sites.push_back(g.site_at(o));
  for (int o = 0; o < g.n_dual_sites(); ++o)
    if (m.contains_dual(g.dual_at(o))) m.dual_sites.push_back(g.dual_at(o));
  return m;
}

struct RegionParams {
  int k = 0;            // strip half-width / triangle width (lattice units)
  int m = 0;            // square inset
  long long A2 = -1;    // doubled overrides for half-integer triangles
  long long B2 = -1;
};

inline RegionMask region(const Geometry& g, RegionKind kind, int side, RegionParams p) {
  switch (kind) {
    case RegionKind::Strip: return strip(g, side, p.k);
    case RegionKind::CornerStrip: return corner_strip(g, side, p.k);
    case RegionKind::DualCorner: return dual_corner_set(g, side, p.k);
    case RegionKind::Triangle:
      if (p.A2 >= 0 || p.B2 >= 0) return triangle_region(g, side, p.A2, p.B2);
      return triangle_Nk(g, side, p.k);
    case RegionKind::Square: return square_region(g, side, p.m);
  }
  throw std::logic_error("region: bad kind");
}

// Q(Phi) boundary: the dual bonds dual to bonds of Z^2 with exactly one
// endpoint in Phi, i.e. the edge set of the topological boundary of the union
// of closed unit squares around Phi.  Returned as canonical dual-site pairs
// (integer-shifted labels, lexicographically ordered within the pair).
inline std::vector<std::pair<Pt, Pt>> q_boundary(const std::vector<Pt>& phi) {
  if (phi.empty()) throw std::invalid_argument("q_boundary: empty site set");
  std::set<Pt> in(phi.begin(), phi.end());
  std::set<std::pair<Pt, Pt>> out;
  auto dual_of_h = [](Pt lo) {  // horizontal bond lo-(lo+e1)
    return std::pair<Pt, Pt>{{lo.x, lo.y - 1}, {lo.x, lo.y}};
  };
  auto dual_of_v = [](Pt lo) {  // vertical bond lo-(lo+e2)
    return std::pair<Pt, Pt>{{lo.x - 1, lo.y}, {lo.x, lo.y}};
  };
  for (Pt p : in) {
    if (in.count({p.x + 1, p.y}) == 0) out.insert(dual_of_h(p));
    if (in.count({p.x - 1, p.y}) == 0) out.insert(dual_of_h({p.x - 1, p.y}));
    if (in.count({p.x, p.y + 1}) == 0) out.insert(dual_of_v(p));
    if (in.count({p.x, p.y - 1}) == 0) out.insert(dual_of_v({p.x, p.y - 1}));
  }
  return {out.begin(), out.end()};
}

}  // namespace isinggap
