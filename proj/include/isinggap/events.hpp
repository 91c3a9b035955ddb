// Spin- and bond-configuration events: plus/minus clusters of site sets,
// the confinement events D and D-hat, the inner boundary of D, dual triangle
// crossings E_i, dual square crossings F, and the strip connectivity set A_N.
//
// Paths live on B-bar(Lambda_N): boundary sites participate with their eta
// value and may be traversed; cluster membership (and confinement checks)
// apply to box sites only.
//
// Corner bookkeeping: corner strips Gamma_{i,i+1} are indexed per the strip
// family (i=1 bottom-left, clockwise), squares S^{i,i+1} per the square
// family (i=1 bottom-right, counterclockwise).  D-hat pairs each corner strip
// with the square at the same geometric corner.

#pragma once

#include <array>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fk.hpp"
#include "geometry.hpp"
#include "ising.hpp"

namespace isinggap {

namespace detail {

// BFS over nodes carrying the given spin value, through bonds of B-bar.
// Sources outside the node set (e.g. corner meta-sites) are skipped.
inline std::vector<std::uint8_t> spin_reach(const Geometry& g, const SpinConfig& sigma,
                                            const BoundarySpec& eta_,
                                            const std::vector<Pt>& sources, int spin) {
  std::vector<std::uint8_t> seen(g.n_nodes(), 0);
  std::vector<int> stack;
  for (Pt p : sources) {
    const int node = g.node_of(p);
    if (node < 0 || seen[node]) continue;
    if (node_spin(g, sigma, eta_, node) != spin) continue;
    seen[node] = 1;
    stack.push_back(node);
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (auto [nb, e] : g.adj(v)) {
      if (seen[nb] || node_spin(g, sigma, eta_, nb) != spin) continue;
      seen[nb] = 1;
      stack.push_back(nb);
    }
  }
  return seen;
}

}  // namespace detail

// C_+(Phi, sigma): box sites joined to Phi by plus paths through B-bar.
inline std::vector<Pt> plus_cluster(const Geometry& g, const std::vector<Pt>& phi,
                                    const SpinConfig& sigma, const BoundarySpec& eta_) {
  auto seen = detail::spin_reach(g, sigma, eta_, phi, +1);
  std::vector<Pt> out;
  for (int o = 0; o < g.n_sites(); ++o)
    if (seen[o]) out.push_back(g.site_at(o));
  return out;
}

inline std::vector<Pt> minus_cluster(const Geometry& g, const std::vector<Pt>& phi,
                                     const SpinConfig& sigma, const BoundarySpec& eta_) {
  auto seen = detail::spin_reach(g, sigma, eta_, phi, -1);
  std::vector<Pt> out;
  for (int o = 0; o < g.n_sites(); ++o)
    if (seen[o]) out.push_back(g.site_at(o));
  return out;
}

// C(Phi, omega): box sites joined to Phi by open bonds.
inline std::vector<Pt> bond_cluster(const Geometry& g, const std::vector<Pt>& phi,
                                    const BondConfig& omega) {
  std::vector<std::uint8_t> seen(g.n_nodes(), 0);
  std::vector<int> stack;
  for (Pt p : phi) {
    const int node = g.node_of(p);
    if (node < 0 || seen[node]) continue;
    seen[node] = 1;
    stack.push_back(node);
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (auto [nb, e] : g.adj(v)) {
      if (!omega.open[e] || seen[nb]) continue;
      seen[nb] = 1;
      stack.push_back(nb);
    }
  }
  std::vector<Pt> out;
  for (int o = 0; o < g.n_sites(); ++o)
    if (seen[o]) out.push_back(g.site_at(o));
  return out;
}

inline int d_event_j(int N, int k) { return (N - k) / 4; }

// D: for every side i, the plus cluster of Gamma_i stays inside
// T^i_{N, k+3j}, j = floor((N-k)/4).
inline bool in_D(const Geometry& g, const SpinConfig& sigma, const BoundarySpec& eta_,
                 int k) {
  const int N = g.half_width();
  if (k < 1 || k > N) throw std::invalid_argument("in_D: k must be in [1,N]");
  const int j = d_event_j(N, k);
  for (int i = 1; i <= 4; ++i) {
    RegionMask tri = triangle_Nk(g, i, k + 3 * j);
    auto seen = detail::spin_reach(g, sigma, eta_, strip(g, i, k).sites, +1);
    for (int o = 0; o < g.n_sites(); ++o)
      if (seen[o] && !tri.contains_site(g.site_at(o))) return false;
  }
  return true;
}

// partial_in D: sigma in D and some single flip leaves D.  Evaluated by the
// flip scan; flipping +1 -> -1 shrinks plus clusters and cannot leave D, so
// only minus sites are scanned.
inline bool in_inner_boundary_D(const Geometry& g, const SpinConfig& sigma,
                                const BoundarySpec& eta_, int k) {
  if (!in_D(g, sigma, eta_, k)) return false;
  SpinConfig flip = sigma;
  for (int o = 0; o < g.n_sites(); ++o) {
    if (sigma.s[o] > 0) continue;
    flip.s[o] = 1;
    const bool still = in_D(g, flip, eta_, k);
    flip.s[o] = -1;
    if (!still) return true;
  }
  return false;
}

namespace detail {

// Square-family side index at the same geometric corner as corner-strip i.
// Corner strips: 1=BL, 2=TL, 3=TR, 4=BR.  Squares: 1=BR, 2=TR, 3=TL, 4=BL.
inline int square_side_at_strip_corner(int strip_i) {
  static constexpr std::array<int, 5> map{0, 4, 3, 2, 1};
  return map[strip_i];
}

}  // namespace detail

// D-hat: for every corner, the minus cluster of the corner strip
// Gamma_{i,i+1} stays inside the square at that corner, S_{N, floor(k/4)}.
// Requires eta = eta(N,k,-1) and k >= 4 (nondegenerate squares).
inline bool in_Dhat(const Geometry& g, const SpinConfig& sigma, const BoundarySpec& eta_,
                    int k) {
  const int N = g.half_width();
  if (k < 1 || k > N) throw std::invalid_argument("in_Dhat: k must be in [1,N]");
  if (k < 4) throw std::invalid_argument("in_Dhat: k < 4 gives a degenerate square");
  if (eta_.eps != -1) throw std::invalid_argument("in_Dhat: eta^{k,-1} required");
  const int m = k / 4;
  for (int i = 1; i <= 4; ++i) {
    RegionMask sq = square_region(g, detail::square_side_at_strip_corner(i), m);
    auto seen = detail::spin_reach(g, sigma, eta_, corner_strip(g, i, k).sites, -1);
    for (int o = 0; o < g.n_sites(); ++o)
      if (seen[o] && !sq.contains_site(g.site_at(o))) return false;
  }
  return true;
}

namespace detail {

// BFS over open dual bonds restricted to dual sites satisfying pred.
template <class Pred>
std::vector<std::uint8_t> dual_reach(const Geometry& g, const BondConfig& omega,
                                     const std::vector<int>& sources, Pred pred) {
  std::vector<std::uint8_t> seen(g.n_dual_sites(), 0);
  std::vector<int> stack;
  for (int d : sources) {
    if (seen[d] || !pred(d)) continue;
    seen[d] = 1;
    stack.push_back(d);
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (auto [nb, e] : g.dual_adj(v)) {
      if (omega.open[e] || seen[nb] || !pred(nb)) continue;  // dual open = e closed
      seen[nb] = 1;
      stack.push_back(nb);
    }
  }
  return seen;
}

}  // namespace detail

// E_i: open dual path inside the closed triangle T^i_{N+1/2, k+j+1/2} joining
// the two dual corner sets flanking side i.
inline bool dual_crossing_E(const Geometry& g, const BondConfig& omega, int k, int j,
                            int i) {
  const int N = g.half_width();
  if (i < 1 || i > 4) throw std::invalid_argument("dual_crossing_E: side in 1..4");
  RegionMask tri;
  tri.kind = RegionKind::Triangle;
  tri.side = i;
  tri.A2 = 2LL * N + 1;           // N + 1/2
  tri.B2 = 2LL * (k + j) + 1;     // k + j + 1/2
  const int prev = (i + 2) % 4 + 1;  // corner strip (i-1, i)
  RegionMask from = dual_corner_set(g, prev, k);
  RegionMask to = dual_corner_set(g, i, k);
  auto pred = [&](int d) { return tri.contains_dual(g.dual_at(d)); };
  std::vector<int> sources;
  for (Pt d : from.dual_sites) sources.push_back(g.dual_ord(d));
  auto seen = detail::dual_reach(g, omega, sources, pred);
  for (Pt d : to.dual_sites)
    if (pred(g.dual_ord(d)) && seen[g.dual_ord(d)]) return true;
  return false;
}

// Dual sites x_{i,1}, x_{i,2} at the ends of Gamma_i, on the dual ring.
// Stored in integer-shifted labels; i follows the counterclockwise square
// family so that x_{i,2} and x_{i+1,1} flank square S^{i,i+1}.
inline std::pair<Pt, Pt> strip_end_duals(int N, int k, int i) {
  // base side 1 (bottom): x_{1,1} = (-k-1/2, -N-1/2), x_{1,2} = (k+1/2, -N-1/2)
  HalfPt a{-2LL * k - 1, -2LL * N - 1};
  HalfPt b{2LL * k + 1, -2LL * N - 1};
  for (int r = 1; r < i; ++r) {
    a = rot_ccw(a);
    b = rot_ccw(b);
  }
  auto to_dual = [](HalfPt h) {
    return Pt{static_cast<int>((h.hx - 1) / 2), static_cast<int>((h.hy - 1) / 2)};
  };
  return {to_dual(a), to_dual(b)};
}

// F_{i,i+1}: x_{i,2} dual-connected to x_{i+1,1} inside S^{i,i+1}_{N, k/4}.
inline bool square_crossing_F(const Geometry& g, const BondConfig& omega, int k, int i) {
  const int N = g.half_width();
  if (i < 1 || i > 4) throw std::invalid_argument("square_crossing_F: side in 1..4");
  if (k < 1 || k > N) throw std::invalid_argument("square_crossing_F: k in [1,N]");
  const int m = k / 4;
  RegionMask sq = square_region(g, i, m);
  const Pt from = strip_end_duals(N, k, i).second;
  const Pt to = strip_end_duals(N, k, i % 4 + 1).first;
  auto pred = [&](int d) { return sq.contains_dual(g.dual_at(d)); };
  auto seen = detail::dual_reach(g, omega, {g.dual_ord(from)}, pred);
  return pred(g.dual_ord(to)) && seen[g.dual_ord(to)];
}

// A_N(sigma): all pairs i<j with Gamma_i plus-connected to Gamma_j in B-bar.
inline std::vector<std::pair<int, int>> strip_connectivity(const Geometry& g,
                                                           const SpinConfig& sigma,
                                                           const BoundarySpec& eta_,
                                                           int k) {
  std::vector<std::pair<int, int>> pairs;
  std::array<std::vector<std::uint8_t>, 5> reach;
  for (int i = 1; i <= 4; ++i)
    reach[i] = detail::spin_reach(g, sigma, eta_, strip(g, i, k).sites, +1);
  for (int i = 1; i <= 4; ++i)
    for (int jdx = i + 1; jdx <= 4; ++jdx) {
      bool hit = false;
      for (Pt p : strip(g, jdx, k).sites) {
        const int node = g.node_of(p);
        if (node >= 0 && reach[i][node]) {
          hit = true;
          break;
        }
      }
      if (hit) pairs.push_back({i, jdx});
    }
  return pairs;
}

// ---- named event registry ---------------------------------------------------

// Observables evaluated on a joint (sigma, omega) sample; omega may be null
// for spin-only events.  "AN" reports the number of plus-connected strip
// pairs (0..6); everything else is an indicator.
struct EventFn {
  bool needs_bonds = false;
  std::function<double(const SpinConfig&, const BondConfig*)> eval;
};

inline std::map<std::string, EventFn> event_registry(const Geometry& g,
                                                     const BoundarySpec& eta_, int k) {
  std::map<std::string, EventFn> reg;
  const int N = g.half_width();
  const int j = d_event_j(N, k);
  reg["D"] = {false, [&g, eta_, k](const SpinConfig& s, const BondConfig*) {
                return in_D(g, s, eta_, k) ? 1.0 : 0.0;
              }};
  if (eta_.eps == -1 && k >= 4)
    reg["Dhat"] = {false, [&g, eta_, k](const SpinConfig& s, const BondConfig*) {
                     return in_Dhat(g, s, eta_, k) ? 1.0 : 0.0;
                   }};
  reg["AN"] = {false, [&g, eta_, k](const SpinConfig& s, const BondConfig*) {
                 return static_cast<double>(strip_connectivity(g, s, eta_, k).size());
               }};
  for (int i = 1; i <= 4; ++i) {
    reg["E" + std::to_string(i)] =
        {true, [&g, k, j, i](const SpinConfig&, const BondConfig* w) {
           if (!w) throw std::invalid_argument("E_i needs a bond configuration");
           return dual_crossing_E(g, *w, k, j, i) ? 1.0 : 0.0;
         }};
    const std::string name = "F" + std::to_string(i) + std::to_string(i % 4 + 1);
    reg[name] = {true, [&g, k, i](const SpinConfig&, const BondConfig* w) {
                   if (!w) throw std::invalid_argument("F needs a bond configuration");
                   return square_crossing_F(g, *w, k, i) ? 1.0 : 0.0;
                 }};
  }
  return reg;
}

}  // namespace isinggap
