// The Glauber generator on enumerable state spaces, its exact spectral gap,
// and the variational / indicator upper bounds.
//
// States are bit-packed spins in site-ordinal order (+1 <-> bit 1).  The
// generator A acts as (Af)(s) = sum_x c(x,s)(f(s^x) - f(s)); the gap is the
// second-smallest eigenvalue of -A.  All eigen work happens on the
// symmetrized operator S = D_{sqrt mu} (-A) D_{1/sqrt mu}, whose off-diagonal
// entries have the closed forms
//     heat-bath:  -1 / (2 cosh(beta dH / 2))
//     metropolis: -exp(-beta |dH| / 2)
// so no stationary weights enter the matvec.
//
// Sign convention: the Dirichlet energy E(f) = (1/2) sum mu c (f(s^x)-f(s))^2
// used here is nonnegative, i.e. E(f) = -D(f,f) in the generator's own sign.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fk.hpp"
#include "geometry.hpp"
#include "ising.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace isinggap {

class GeneratorMatrix {
 public:
  GeneratorMatrix(const Geometry& g, const BoundarySpec& eta_, double beta,
                  RateFamily family, int max_sites = 24)
      : g_(g), eta_(eta_), beta_(beta), family_(family) {
    if (g.n_sites() > max_sites)
      throw std::invalid_argument("GeneratorMatrix: state space too large");
    n_ = g.n_sites();
    dim_ = std::size_t{1} << n_;
    // neighbor site lists and boundary field per site
    nbr_.assign(n_, {});
    bfield_.assign(n_, 0);
    for (int x = 0; x < n_; ++x)
      for (auto [nb, e] : g.adj(x)) {
        if (g.node_is_site(nb)) nbr_[x].push_back(nb);
        else bfield_[x] += eta_.at(nb - g.n_sites());
      }
    GibbsTable t = gibbs_table(g, eta_, beta, max_sites);
    mu_ = std::move(t.prob);
  }

  int n_sites() const { return n_; }
  std::size_t dim() const { return dim_; }
  double beta() const { return beta_; }
  RateFamily family() const { return family_; }
  const std::vector<double>& mu() const { return mu_; }
  const Geometry& geometry() const { return g_; }
  const BoundarySpec& boundary() const { return eta_; }

  // H(s^x) - H(s) for the bit-packed state s.
  int flip_dh(std::uint64_t s, int x) const {
    const int sx = (s >> x) & 1 ? 1 : -1;
    int h = bfield_[x];
    for (int y : nbr_[x]) h += (s >> y) & 1 ? 1 : -1;
    return 2 * sx * h;
  }

  double rate(std::uint64_t s, int x) const {
    const double dh = flip_dh(s, x);
    if (family_ == RateFamily::HeatBath) return 1.0 / (1.0 + std::exp(beta_ * dh));
    return std::min(1.0, std::exp(-beta_ * dh));
  }

  // S(s, s^x) = -sqrt(mu_s/mu_{s^x}) c(x,s); symmetric closed forms above.
  double sym_offdiag(std::uint64_t s, int x) const {
    const double dh = flip_dh(s, x);
    if (family_ == RateFamily::HeatBath)
      return -1.0 / (2.0 * std::cosh(0.5 * beta_ * dh));
    return -std::exp(-0.5 * beta_ * std::abs(dh));
  }

  double sym_diag(std::uint64_t s) const {
    double d = 0;
    for (int x = 0; x < n_; ++x) d += rate(s, x);
    return d;
  }

  // y = S x, matrix-free.
  void apply_sym(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    y.resize(static_cast<Eigen::Index>(dim_));
    for (std::uint64_t s = 0; s < dim_; ++s) {
      double acc = sym_diag(s) * x[static_cast<Eigen::Index>(s)];
      for (int site = 0; site < n_; ++site)
        acc += sym_offdiag(s, site) * x[static_cast<Eigen::Index>(s ^ (1ULL << site))];
      y[static_cast<Eigen::Index>(s)] = acc;
    }
  }

  Eigen::MatrixXd dense_sym() const {
    if (dim_ > (1u << 13))
      throw std::invalid_argument("dense_sym: dimension too large for a dense matrix");
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(dim_, dim_);
    for (std::uint64_t s = 0; s < dim_; ++s) {
      S(s, s) = sym_diag(s);
      for (int x = 0; x < n_; ++x) S(s, s ^ (1ULL << x)) = sym_offdiag(s, x);
    }
    return S;
  }

  // -A as a dense matrix (rows sum to zero before negation).
  Eigen::MatrixXd dense_neg_generator() const {
    if (dim_ > (1u << 13))
      throw std::invalid_argument("dense_neg_generator: dimension too large");
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim_, dim_);
    for (std::uint64_t s = 0; s < dim_; ++s) {
      double d = 0;
      for (int x = 0; x < n_; ++x) {
        const double c = rate(s, x);
        M(s, s ^ (1ULL << x)) = -c;
        d += c;
      }
      M(s, s) = d;
    }
    return M;
  }

  double max_reversibility_violation() const {
    double worst = 0;
    for (std::uint64_t s = 0; s < dim_; ++s)
      for (int x = 0; x < n_; ++x) {
        const std::uint64_t t = s ^ (1ULL << x);
        const double lhs = mu_[s] * rate(s, x);
        const double rhs = mu_[t] * rate(t, x);
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(lhs, rhs));
      }
    return worst;
  }

 private:
  Geometry g_;
  BoundarySpec eta_;
  double beta_;
  RateFamily family_;
  int n_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::vector<int>> nbr_;
  std::vector<int> bfield_;
  std::vector<double> mu_;
};

inline GeneratorMatrix build_generator(const Geometry& g, const BoundarySpec& eta_,
                                       double beta, RateFamily family) {
  return GeneratorMatrix(g, eta_, beta, family);
}

struct GapResult {
  double gap = 0;
  std::string solver;  // "dense" | "lanczos"
  double residual = 0; // ||S v - gap v|| / ||v|| in the symmetrized frame
  std::size_t dim = 0;
};

namespace detail {

inline double sym_residual(const GeneratorMatrix& gen, const Eigen::VectorXd& v,
                           double lambda) {
  Eigen::VectorXd w;
  gen.apply_sym(v, w);
  return (w - lambda * v).norm() / v.norm();
}

inline GapResult dense_gap(const GeneratorMatrix& gen) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gen.dense_sym());
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  GapResult r;
  r.dim = gen.dim();
  r.solver = "dense";
  r.gap = es.eigenvalues()[1];
  Eigen::VectorXd v = es.eigenvectors().col(1);
  r.residual = sym_residual(gen, v, r.gap);
  return r;
}

// Lanczos on S with the known ground state sqrt(mu) deflated.  Full
// reorthogonalization; fine for the enumerable dimensions this targets.
inline GapResult lanczos_gap(const GeneratorMatrix& gen, std::uint64_t seed,
                             int max_iter, double move_tol, double resid_tol) {
  const Eigen::Index dim = static_cast<Eigen::Index>(gen.dim());
  Eigen::VectorXd ground(dim);
  for (Eigen::Index i = 0; i < dim; ++i) ground[i] = std::sqrt(gen.mu()[i]);
  ground.normalize();

  Rng rng(seed);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.uniform() - 0.5;
  v -= ground.dot(v) * ground;
  v.normalize();

  std::vector<Eigen::VectorXd> basis{v};
  std::vector<double> a, b;  // tridiagonal diag / offdiag
  double prev_theta = -1;
  int stable = 0;
  GapResult r;
  r.dim = gen.dim();
  r.solver = "lanczos";

  Eigen::VectorXd w;
  for (int it = 0; it < max_iter; ++it) {
    gen.apply_sym(basis.back(), w);
    const double alpha_it = basis.back().dot(w);
    a.push_back(alpha_it);
    w -= alpha_it * basis.back();
    if (basis.size() > 1) w -= b.back() * basis[basis.size() - 2];
    w -= ground.dot(w) * ground;
    for (const auto& q : basis) w -= q.dot(w) * q;  // full reorthogonalization
    const double beta_it = w.norm();

    // Ritz values of the tridiagonal
    const int m = static_cast<int>(a.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = a[i];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = b.size() > static_cast<std::size_t>(i)
                                                     ? b[i]
                                                     : 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes(T);
    const double theta = tes.eigenvalues()[0];
    const double resid_bound = m > 0 ? std::abs(beta_it * tes.eigenvectors()(m - 1, 0)) : 1;

    if (prev_theta >= 0 && std::abs(theta - prev_theta) < move_tol) ++stable;
    else stable = 0;
    prev_theta = theta;

    const bool exhausted = beta_it < 1e-14 || basis.size() == static_cast<std::size_t>(dim);
    if ((stable >= 10 && resid_bound < resid_tol) || exhausted || it == max_iter - 1) {
      Eigen::VectorXd ritz = Eigen::VectorXd::Zero(dim);
      for (int i = 0; i < m; ++i) ritz += tes.eigenvectors()(i, 0) * basis[i];
      ritz.normalize();
      const double resid = sym_residual(gen, ritz, theta);
      if (resid <= resid_tol || exhausted) {
        r.gap = theta;
        r.residual = resid;
        return r;
      }
      if (it == max_iter - 1)
        throw std::runtime_error("lanczos_gap: no convergence, residual " +
                                 std::to_string(resid));
      stable = 0;  // premature stability; keep expanding the subspace
    }
    basis.push_back(w / beta_it);
    b.push_back(beta_it);
  }
  throw std::runtime_error("lanczos_gap: iteration cap reached");
}

}  // namespace detail

// Exact spectral gap (continuous-time convention).  Dense below
// dense_cap_dim, matrix-free Lanczos above.
inline GapResult exact_gap(const GeneratorMatrix& gen, std::size_t dense_cap_dim = 4096,
                           std::uint64_t seed = 1) {
  if (gen.dim() <= dense_cap_dim) return detail::dense_gap(gen);
  return detail::lanczos_gap(gen, seed, 600, 1e-10, 1e-8);
}

// E(f) / Var_mu(f) for an arbitrary test function over states; always an
// upper bound for the gap.
inline double rayleigh_bound(const GeneratorMatrix& gen, const std::vector<double>& f) {
  if (f.size() != gen.dim()) throw std::invalid_argument("rayleigh_bound: size mismatch");
  const auto& mu = gen.mu();
  double mean = 0;
  for (std::size_t s = 0; s < gen.dim(); ++s) mean += mu[s] * f[s];
  double var = 0;
  for (std::size_t s = 0; s < gen.dim(); ++s) var += mu[s] * (f[s] - mean) * (f[s] - mean);
  if (var <= 0) throw std::invalid_argument("rayleigh_bound: constant test function");
  double energy = 0;
  for (std::size_t s = 0; s < gen.dim(); ++s)
    for (int x = 0; x < gen.n_sites(); ++x) {
      const double d = f[s ^ (1ULL << x)] - f[s];
      energy += mu[s] * gen.rate(s, x) * d * d;
    }
  return 0.5 * energy / var;
}

using StatePredicate = std::function<bool(std::uint64_t)>;

struct IndicatorBound {
  double value = 0;
  double se = 0;       // 0 in exact mode
  double mu_S = 0;
  double mu_inner = 0;
  bool from_upper_bound = false;  // numerator was a zero-hit CI bound
};

// c0 |Lambda| mu(inner boundary of S) / (mu(S)(1 - mu(S))), exact enumeration.
inline IndicatorBound indicator_bound(const GeneratorMatrix& gen, const StatePredicate& S,
                                      double c0 = 1.0) {
  const auto& mu = gen.mu();
  double muS = 0, muIn = 0;
  for (std::uint64_t s = 0; s < gen.dim(); ++s) {
    if (!S(s)) continue;
    muS += mu[s];
    for (int x = 0; x < gen.n_sites(); ++x)
      if (!S(s ^ (1ULL << x))) {
        muIn += mu[s];
        break;
      }
  }
  if (muS <= 0 || muS >= 1)
    throw std::invalid_argument("indicator_bound: degenerate event");
  IndicatorBound b;
  b.mu_S = muS;
  b.mu_inner = muIn;
  b.value = c0 * gen.n_sites() * muIn / (muS * (1.0 - muS));
  return b;
}

// Estimate mode: consumes Monte Carlo estimates of mu(S) and mu(inner), delta
// method for the standard error (inputs treated as independent).  A zero-hit
// numerator yields an upper confidence bound instead of a point value.
inline IndicatorBound indicator_bound_mc(const Estimate& inner, const Estimate& S,
                                         int n_sites, double c0 = 1.0) {
  if (S.value <= 0 || S.value >= 1)
    throw std::invalid_argument("indicator_bound_mc: degenerate event estimate");
  IndicatorBound b;
  b.mu_S = S.value;
  b.mu_inner = inner.value;
  const double denom = S.value * (1.0 - S.value);
  if (inner.zero_hit) {
    b.from_upper_bound = true;
    b.value = c0 * n_sites * inner.upper95 / denom;
    b.se = 0;
    return b;
  }
  b.value = c0 * n_sites * inner.value / denom;
  const double dda = c0 * n_sites / denom;
  const double dds = c0 * n_sites * inner.value * (2.0 * S.value - 1.0) / (denom * denom);
  b.se = std::sqrt(dda * dda * inner.se * inner.se + dds * dds * S.se * S.se);
  return b;
}

// ---- Monte Carlo event probability -------------------------------------------

struct McChainConfig {
  long sweeps = 0;
  long burnin = 0;
  int thin = 1;
  int batches = 20;
  std::uint64_t seed = 0;
};

// Batched-means estimate of an event probability under the Swendsen-Wang
// chain.  The event sees the joint (sigma, omega) sample of each recorded
// sweep.
inline Estimate mc_event_probability(
    const Geometry& g, const BoundarySpec& eta_, double beta, const McChainConfig& cfg,
    const std::function<double(const SpinConfig&, const BondConfig*)>& event) {
  if (cfg.sweeps <= cfg.burnin)
    throw std::invalid_argument("mc_event_probability: burnin must be < sweeps");
  if (cfg.thin < 1) throw std::invalid_argument("mc_event_probability: thin >= 1");
  Rng rng(cfg.seed);
  SpinConfig sigma = SpinConfig::uniform(g, +1);
  BondConfig omega;
  std::vector<double> series;
  for (long sw = 0; sw < cfg.sweeps; ++sw) {
    sigma = sw_sweep(g, sigma, eta_, beta, rng, &omega);
    if (sw >= cfg.burnin && (sw - cfg.burnin) % cfg.thin == 0)
      series.push_back(event(sigma, &omega));
  }
  return batch_means(series, cfg.batches);
}

}  // namespace isinggap
