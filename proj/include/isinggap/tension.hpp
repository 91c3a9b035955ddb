// Dual surface tension: two-point dual connectivity estimated by
// Swendsen-Wang sampling in a wired box, the subadditive ladder
// tau_n = -(1/n) log P(0* <-*-> (n x)*), norm models with axis and diagonal
// symmetry, the brute-force certifier for the geometric excess inequality
// tau(z-x) + tau(y-z) >= 2k tau(e1) + eps m, and the crossover point
// 2k tau(e1) = (N-k) tau(e1+e2).
//
// "Box size M" means the centered box Lambda_{floor(M/2)} (side 2*floor(M/2)+1),
// sampled with the all-plus (wired) boundary; the dual configuration then
// carries the free dual measure.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fk.hpp"
#include "geometry.hpp"
#include "ising.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "stats.hpp"

namespace isinggap {

namespace detail {

// Centered dual-site pair realizing displacement n * dir.
inline std::pair<Pt, Pt> centered_dual_pair(Pt dir, int n) {
  const int dx = n * dir.x, dy = n * dir.y;
  Pt u{-(dx / 2), -(dy / 2)};
  Pt v{u.x + dx, u.y + dy};
  return {u, v};
}

inline int dual_boundary_distance(const Geometry& g, Pt d) {
  return std::min(std::min(d.x - (g.x0() - 1), g.x1() - d.x),
                  std::min(d.y - (g.y0() - 1), g.y1() - d.y));
}

}  // namespace detail

// Monte Carlo estimates of dual connectivities u* <-*-> v* for a batch of
// dual-site pairs, from one shared SW chain on the given box with the wired
// (all-plus) boundary.
inline std::vector<Estimate> dual_connectivity_mc(
    const Geometry& g, double beta, const std::vector<std::pair<Pt, Pt>>& pairs,
    const McChainConfig& cfg) {
  BoundarySpec wired = BoundarySpec::uniform(g, +1);
  for (auto [u, v] : pairs)
    if (!g.dual_in_box(u) || !g.dual_in_box(v))
      throw std::invalid_argument("dual displacement outside the box");
  if (cfg.sweeps <= cfg.burnin)
    throw std::invalid_argument("dual_connectivity_mc: burnin must be < sweeps");

  Rng rng(cfg.seed);
  SpinConfig sigma = SpinConfig::uniform(g, +1);
  BondConfig omega;
  std::vector<std::vector<double>> series(pairs.size());
  std::vector<int> comp(g.n_dual_sites());
  for (long sw = 0; sw < cfg.sweeps; ++sw) {
    sigma = sw_sweep(g, sigma, wired, beta, rng, &omega);
    if (sw < cfg.burnin || (sw - cfg.burnin) % cfg.thin != 0) continue;
    detail::DisjointSets ds(g.n_dual_sites());
    for (int e = 0; e < g.n_bonds(); ++e) {
      if (omega.open[e]) continue;  // dual bond open iff primal closed
      auto [a, b] = g.dual_endpoints(e);
      ds.unite(a, b);
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const bool hit = pairs[i].first == pairs[i].second ||
                       ds.find(g.dual_ord(pairs[i].first)) ==
                           ds.find(g.dual_ord(pairs[i].second));
      series[i].push_back(hit ? 1.0 : 0.0);
    }
  }
  std::vector<Estimate> out;
  out.reserve(pairs.size());
  for (auto& s : series) out.push_back(batch_means(s, cfg.batches));
  return out;
}

// Same, in the centered box Lambda_{M/2}, with the finite-volume guard: both
// endpoints must sit at least M/4 from the boundary.
inline std::vector<Estimate> dual_connectivity_mc(
    double beta, int M, const std::vector<std::pair<Pt, Pt>>& pairs,
    const McChainConfig& cfg) {
  const int N = M / 2;
  if (N < 1) throw std::invalid_argument("dual_connectivity_mc: box too small");
  Geometry g = Geometry::box(N);
  for (auto [u, v] : pairs) {
    if (!g.dual_in_box(u) || !g.dual_in_box(v))
      throw std::invalid_argument("dual displacement outside the box");
    if (detail::dual_boundary_distance(g, u) < M / 4 ||
        detail::dual_boundary_distance(g, v) < M / 4)
      throw std::invalid_argument("dual displacement too close to the boundary");
  }
  return dual_connectivity_mc(g, beta, pairs, cfg);
}

// P(0* <-*-> x*) for a single displacement.
inline Estimate connectivity_probability(double beta, int M, Pt displacement,
                                         const McChainConfig& cfg) {
  auto [u, v] = detail::centered_dual_pair(displacement, 1);
  return dual_connectivity_mc(beta, M, {{u, v}}, cfg)[0];
}

struct DirectionalTension {
  Pt direction;
  std::vector<int> ladder;
  std::vector<Estimate> p_hat;
  std::vector<double> tau_n;
  std::vector<double> tau_n_se;
  double tau = 0;      // last ladder point (subadditivity biases it upward)
  double tau_se = 0;   // its s.e. widened by the spread of the last two points
  int box_M = 0;       // sampling box side used
  std::string bc = "wired";
  std::vector<std::string> flags;
};

inline DirectionalTension estimate_tau(double beta, Pt direction,
                                       const std::vector<int>& ladder, int M,
                                       const McChainConfig& cfg) {
  if (ladder.empty()) throw std::invalid_argument("estimate_tau: empty ladder");
  std::vector<std::pair<Pt, Pt>> pairs;
  for (int n : ladder) pairs.push_back(detail::centered_dual_pair(direction, n));
  std::vector<Estimate> est = dual_connectivity_mc(beta, M, pairs, cfg);
  DirectionalTension t;
  t.direction = direction;
  t.ladder = ladder;
  t.box_M = M;
  t.p_hat = est;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (est[i].zero_hit)
      throw std::runtime_error("estimate_tau: zero-hit connectivity at n = " +
                               std::to_string(ladder[i]));
    t.tau_n.push_back(-std::log(est[i].value) / ladder[i]);
    t.tau_n_se.push_back(est[i].se / (ladder[i] * est[i].value));
  }
  // non-monotone beyond joint error bars gets flagged (subadditivity makes the
  // exact ladder of a subadditive sequence decrease in n along doublings)
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    const double slack = 3.0 * std::sqrt(t.tau_n_se[i] * t.tau_n_se[i] +
                                         t.tau_n_se[i - 1] * t.tau_n_se[i - 1]);
    if (t.tau_n[i] > t.tau_n[i - 1] + slack)
      t.flags.push_back("ladder increase at n=" + std::to_string(ladder[i]));
  }
  t.tau = t.tau_n.back();
  const double spread = ladder.size() > 1
                            ? std::abs(t.tau_n.back() - t.tau_n[ladder.size() - 2])
                            : 0.0;
  t.tau_se = t.tau_n_se.back() + spread;
  return t;
}

// ---- norm models -------------------------------------------------------------

// Positively homogeneous functions on R^2 with axis and diagonal symmetry.
// Sampled models are the gauge of the symmetrized polygon through the
// directional samples (piecewise-linear, convex, exact D4 symmetry).
class NormModel {
 public:
  static NormModel l1() { return NormModel(Kind::L1, 1, 2); }
  static NormModel l2() { return NormModel(Kind::L2, 1, std::sqrt(2.0)); }
  static NormModel linf() { return NormModel(Kind::Linf, 1, 1); }
  static NormModel scaled(const NormModel& base, double c) {
    if (c <= 0) throw std::invalid_argument("NormModel::scaled: c > 0 required");
    NormModel m = base;
    m.scale_ *= c;
    return m;
  }
  // From directional samples tau(e1) and tau(e1+e2).
  static NormModel from_samples(double tau_e1, double tau_diag) {
    if (tau_e1 <= 0 || tau_diag <= 0)
      throw std::invalid_argument("NormModel::from_samples: positive tensions required");
    return NormModel(Kind::Gauge, tau_e1, tau_diag);
  }

  double value(double x, double y) const {
    const double X = std::max(std::abs(x), std::abs(y));
    const double Y = std::min(std::abs(x), std::abs(y));
    switch (kind_) {
      case Kind::L1: return scale_ * (X + Y);
      case Kind::L2: return scale_ * std::hypot(X, Y);
      case Kind::Linf: return scale_ * X;
      case Kind::Gauge: {
        const double a = t1_, b = td_ - t1_;
        return scale_ * std::max(a * X + b * Y, b * X + a * Y);
      }
    }
    return 0;
  }
  double value(HalfPt p) const { return value(p.hx * 0.5, p.hy * 0.5); }
  double tau_e1() const { return value(1, 0); }
  double tau_diag() const { return value(1, 1); }

 private:
  enum class Kind { L1, L2, Linf, Gauge };
  NormModel(Kind k, double t1, double td) : kind_(k), t1_(t1), td_(td) {}
  Kind kind_;
  double t1_, td_;
  double scale_ = 1.0;
};

// ---- norm equivalence bracket --------------------------------------------------

struct EquivNormReport {
  double ratio = 0;  // tau(e1+e2) / (sqrt(2) tau(e1))
  double se = 0;
  double lo = 0, hi = 0;  // norm-equivalence bracket [1/sqrt2, sqrt2]
  bool pass = false;
};

inline EquivNormReport check_equivnorm(double tau_e1, double se_e1, double tau_diag,
                                       double se_diag) {
  if (tau_e1 <= 0 || tau_diag <= 0)
    throw std::invalid_argument("check_equivnorm: positive tensions required");
  EquivNormReport r;
  r.ratio = tau_diag / (std::sqrt(2.0) * tau_e1);
  r.se = r.ratio * std::sqrt(se_e1 * se_e1 / (tau_e1 * tau_e1) +
                             se_diag * se_diag / (tau_diag * tau_diag));
  r.lo = 1.0 / std::sqrt(2.0);
  r.hi = std::sqrt(2.0);
  r.pass = (r.ratio + 3 * r.se >= r.lo) && (r.ratio - 3 * r.se <= r.hi);
  return r;
}

inline EquivNormReport check_equivnorm(const DirectionalTension& e1,
                                       const DirectionalTension& diag) {
  return check_equivnorm(e1.tau, e1.tau_se, diag.tau, diag.tau_se);
}

// ---- geometric excess inequality ------------------------------------------------

// Admissible z: upper half-plane {y >= -N-1/2} minus the closed triangle
// T^1_{N+1/2, k+2m+1/2}.
inline bool normprop_admissible_z(int N, int k, int m, HalfPt z) {
  if (z.hy < -2LL * N - 1) return false;
  return !triangle_base_contains(2LL * N + 1, 2LL * (k + 2 * m) + 1, z);
}

struct NormpropResult {
  double min_excess = 0;  // min (tau(z-x)+tau(y-z)-2k tau(e1)) / m over the grid
  HalfPt argmin_z{};
  long long n_z = 0;
};

// Brute-force grid minimization.  x = (x1, -N-1/2) with x1 <= -k, y mirrored
// with y1 >= k, z on the step-h grid (h in half-units; 2 = unit grid) over
// the admissible window.  The objective splits as min_x tau(z-x) + min_y
// tau(y-z), so the scan is O(|Z| (|X| + |Y|)).
inline NormpropResult normprop_excess(const NormModel& norm, int N, int k, int m,
                                      int grid_step_half = 2) {
  if (!(0 < k && k < k + 2 * m && k + 2 * m < N))
    throw std::invalid_argument("normprop_excess: need 0 < k < k+2m < N");
  if (grid_step_half < 1) throw std::invalid_argument("normprop_excess: bad grid step");
  const long long h = grid_step_half;
  const long long base_y = -2LL * N - 1;
  const double tau1 = norm.tau_e1();

  std::vector<long long> xs;  // x1 in half-units, from -k down to -k-2N
  for (long long hx = -2LL * k; hx >= -2LL * k - 4LL * N; hx -= h) xs.push_back(hx);

  NormpropResult res;
  res.min_excess = std::numeric_limits<double>::infinity();
  const long long zx_max = 4LL * N;
  const long long zy_max = 4LL * N;
  for (long long zy = base_y; zy <= zy_max; zy += h) {
    for (long long zx = -zx_max; zx <= zx_max; zx += h) {
      HalfPt z{zx, zy};
      if (!normprop_admissible_z(N, k, m, z)) continue;
      ++res.n_z;
      double best_x = std::numeric_limits<double>::infinity();
      double best_y = std::numeric_limits<double>::infinity();
      for (long long hx : xs) {
        best_x = std::min(best_x, norm.value({zx - hx, zy - base_y}));
        best_y = std::min(best_y, norm.value({-hx - zx, base_y - zy}));
      }
      const double excess = (best_x + best_y - 2.0 * k * tau1) / m;
      if (excess < res.min_excess) {
        res.min_excess = excess;
        res.argmin_z = z;
      }
    }
  }
  if (res.n_z == 0) throw std::runtime_error("normprop_excess: empty admissible grid");
  return res;
}

// Crossover 2k tau(e1) = (N-k) tau(e1+e2)  =>  k* = N tau_d / (2 tau_1 + tau_d).
inline double crossover_k(int N, double tau_e1, double tau_diag) {
  if (tau_e1 <= 0 || tau_diag <= 0)
    throw std::invalid_argument("crossover_k: positive tensions required");
  return N * tau_diag / (2.0 * tau_e1 + tau_diag);
}

}  // namespace isinggap
