// Ising Hamiltonian, exact Gibbs tables on enumerable boxes, heat-bath and
// metropolis flip rates, and the discrete-time random-scan Glauber chain.
//
// The Gibbs measure is mu prop to e^{-beta H} with H = -sum sigma sigma over
// bonds of B-bar; the 4-neighbor energy jump is |dH| <= 8.  See ModelParams
// for how beta relates to the FK bond densities.
//
// The chain is simulated in discrete time (one sweep = |Lambda| random-site
// updates) and analyzed in continuous time through the exact identity
// A = |Lambda| (P - I), valid because all rates are <= 1.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "rng.hpp"

namespace isinggap {

// Two beta dictionaries coexist.  The Gibbs measure implemented here is
// mu prop to e^{-beta H} with H = -sum sigma sigma; the FK model corresponding to it
// through the Edwards-Sokal coupling has bond density 1 - e^{-2 beta}
// (coupling_p).  The FK literature's own dictionary p = 1 - e^{-beta_fk}
// relates by beta_fk = 2 beta, and its critical constants are
// beta_c = ln(1+sqrt 2), p_c = sqrt2/(1+sqrt2) with 1 - e^{-beta_c} = p_c.
struct ModelParams {
  double beta;
  double p;           // FK-dictionary density 1 - e^{-beta}
  double coupling_p;  // ES coupling density 1 - e^{-2 beta} for e^{-beta H}

  explicit ModelParams(double beta_)
      : beta(beta_), p(-std::expm1(-beta_)), coupling_p(-std::expm1(-2.0 * beta_)) {
    if (beta_ < 0) throw std::invalid_argument("beta must be >= 0");
  }
  static double beta_c() { return std::log(1.0 + std::sqrt(2.0)); }
  static double p_c() { return std::sqrt(2.0) / (1.0 + std::sqrt(2.0)); }
  // Gibbs beta whose coupling density is 1 - e^{-beta_fk}.
  static double gibbs_beta_for_fk(double beta_fk) { return beta_fk / 2.0; }
};

enum class RateFamily { HeatBath, Metropolis };

inline std::string to_string(RateFamily f) {
  return f == RateFamily::HeatBath ? "heat-bath" : "metropolis";
}

// Uniform rate bounds 0 < c0' <= c(x, sigma) <= c0 over all sites and
// configurations of a box with any {-1,0,1} boundary: |dH| <= 8 on the square
// lattice, and c0 = 1 for both families.
struct RateBounds {
  double c0_prime;
  double c0;
};

inline RateBounds rate_bounds(double beta, RateFamily family) {
  if (family == RateFamily::HeatBath)
    return {1.0 / (1.0 + std::exp(8.0 * beta)), 1.0};
  return {std::exp(-8.0 * beta), 1.0};
}

struct SpinConfig {
  std::vector<std::int8_t> s;  // +1/-1 per site ordinal

  static SpinConfig uniform(const Geometry& g, int v) {
    if (v != 1 && v != -1) throw std::invalid_argument("spin must be +1 or -1");
    SpinConfig c;
    c.s.assign(g.n_sites(), static_cast<std::int8_t>(v));
    return c;
  }
  // Bit-packed state: bit o set <=> spin +1 at site ordinal o.
  static SpinConfig from_bits(const Geometry& g, std::uint64_t bits) {
    SpinConfig c;
    c.s.resize(g.n_sites());
    for (int o = 0; o < g.n_sites(); ++o)
      c.s[o] = (bits >> o) & 1 ? 1 : -1;
    return c;
  }
  std::uint64_t to_bits() const {
    std::uint64_t b = 0;
    for (std::size_t o = 0; o < s.size(); ++o)
      if (s[o] > 0) b |= std::uint64_t{1} << o;
    return b;
  }
  int at(int ord) const { return s[ord]; }
  double magnetization() const {
    long sum = 0;
    for (auto v : s) sum += v;
    return static_cast<double>(sum) / static_cast<double>(s.size());
  }
};

// Spin seen at a node: sigma inside the box, eta on the boundary.
inline int node_spin(const Geometry& g, const SpinConfig& sigma,
                     const BoundarySpec& eta_, int node) {
  return g.node_is_site(node) ? sigma.s[node] : eta_.at(node - g.n_sites());
}

// H = -sum_{<xy> in Lambda} s_x s_y - sum_{x in Lambda, y in bd} s_x eta_y.
// Free boundary sites (eta = 0) contribute nothing.
inline long energy(const Geometry& g, const SpinConfig& sigma, const BoundarySpec& eta_) {
  if (static_cast<int>(sigma.s.size()) != g.n_sites() ||
      static_cast<int>(eta_.value.size()) != g.n_boundary())
    throw std::invalid_argument("energy: geometry mismatch");
  long h = 0;
  for (const Bond& b : g.bonds())
    h -= static_cast<long>(node_spin(g, sigma, eta_, b.a)) *
         node_spin(g, sigma, eta_, b.b);
  return h;
}

// Local field at site ordinal x: sum of neighboring spins/boundary values.
inline int local_field(const Geometry& g, const SpinConfig& sigma,
                       const BoundarySpec& eta_, int x) {
  int h = 0;
  for (auto [nb, e] : g.adj(x)) h += node_spin(g, sigma, eta_, nb);
  return h;
}

// Energy change of flipping site x: H(sigma^x) - H(sigma) = 2 s_x h_x.
inline int flip_delta(const Geometry& g, const SpinConfig& sigma,
                      const BoundarySpec& eta_, int x) {
  return 2 * sigma.s[x] * local_field(g, sigma, eta_, x);
}

// Flip rate c(x,sigma); in (0,1] and satisfies detailed balance for both
// families.
inline double flip_rate(const Geometry& g, const SpinConfig& sigma,
                        const BoundarySpec& eta_, int x, double beta,
                        RateFamily family) {
  const double dh = flip_delta(g, sigma, eta_, x);
  if (family == RateFamily::HeatBath) return 1.0 / (1.0 + std::exp(beta * dh));
  return std::min(1.0, std::exp(-beta * dh));
}

// ---- exact Gibbs table ------------------------------------------------------

struct GibbsTable {
  double beta;
  std::vector<long> energy;  // H per bit-packed state
  std::vector<double> prob;  // normalized Gibbs weights

  double mu(std::uint64_t state) const { return prob[state]; }
  std::size_t size() const { return prob.size(); }
};

inline GibbsTable gibbs_table(const Geometry& g, const BoundarySpec& eta_,
                              double beta, int max_sites = 20) {
  if (g.n_sites() > max_sites)
    throw std::invalid_argument("gibbs_table: box too large for enumeration");
  const std::size_t dim = std::size_t{1} << g.n_sites();
  GibbsTable t;
  t.beta = beta;
  t.energy.resize(dim);
  t.prob.resize(dim);
  long hmin = 0;
  for (std::size_t st = 0; st < dim; ++st) {
    SpinConfig sigma = SpinConfig::from_bits(g, st);
    t.energy[st] = energy(g, sigma, eta_);
    if (st == 0 || t.energy[st] < hmin) hmin = t.energy[st];
  }
  double z = 0;
  for (std::size_t st = 0; st < dim; ++st) {
    t.prob[st] = std::exp(-beta * static_cast<double>(t.energy[st] - hmin));
    z += t.prob[st];
  }
  for (auto& w : t.prob) w /= z;
  return t;
}

// ---- Glauber chain ----------------------------------------------------------

struct ObservableRow {
  long sweep;
  double energy;
  double magnetization;
  std::vector<double> extra;
};

using SpinObservable = std::function<double(const SpinConfig&)>;

struct ChainResult {
  SpinConfig state;
  std::uint64_t seed = 0;
  long sweeps = 0;
  std::vector<ObservableRow> series;
};

// One random-scan sweep: |Lambda| single-site proposals.  Consumes exactly
// two engine words per proposal (site pick, acceptance uniform).
inline void glauber_sweep(const Geometry& g, const BoundarySpec& eta_, double beta,
                          RateFamily family, SpinConfig& sigma, Rng& rng) {
  const int n = g.n_sites();
  for (int t = 0; t < n; ++t) {
    const int x = rng.below(n);
    const double c = flip_rate(g, sigma, eta_, x, beta, family);
    if (rng.uniform() < c) sigma.s[x] = static_cast<std::int8_t>(-sigma.s[x]);
  }
}

inline ChainResult run_chain(const Geometry& g, const BoundarySpec& eta_, double beta,
                             RateFamily family, std::uint64_t seed, long sweeps,
                             const std::vector<SpinObservable>& observables = {},
                             const SpinConfig* start = nullptr) {
  if (sweeps < 1) throw std::invalid_argument("run_chain: sweeps must be >= 1");
  ChainResult r;
  r.seed = seed;
  r.state = start ? *start : SpinConfig::uniform(g, +1);
  Rng rng(seed);
  r.series.reserve(sweeps);
  for (long sw = 1; sw <= sweeps; ++sw) {
    glauber_sweep(g, eta_, beta, family, r.state, rng);
    ObservableRow row;
    row.sweep = sw;
    row.energy = static_cast<double>(energy(g, r.state, eta_));
    row.magnetization = r.state.magnetization();
    for (const auto& f : observables) row.extra.push_back(f(r.state));
    r.series.push_back(std::move(row));
  }
  r.sweeps = sweeps;
  return r;
}

}  // namespace isinggap
