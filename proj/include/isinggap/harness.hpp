// Experiment orchestration: parameter grids, deterministic per-task seeds,
// CSV output with JSON mirrors, and reasoned skips.  Every row echoes its
// full parameter set, so files are self-describing.
//
// Task seeds are derive_seed(master, ordinal) with ordinals assigned in grid
// expansion order (N outermost, then k, eps, beta).  Output rows are written
// in task-ordinal order; reruns of the same config are byte-identical except
// for the build identifier column.

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "events.hpp"
#include "fk.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "ising.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "stats.hpp"
#include "tension.hpp"

#ifndef ISINGGAP_BUILD_ID
#define ISINGGAP_BUILD_ID "dev"
#endif

namespace isinggap {

inline const char* build_id() { return ISINGGAP_BUILD_ID; }

enum class ExperimentKind { ExactGapScan, BoundScan, SwSample, Tension, CrossoverDemo };

struct ExperimentConfig {
  ExperimentKind kind;
  std::vector<int> N, k, eps;
  std::vector<double> beta;
  RateFamily family = RateFamily::HeatBath;
  // chain parameters
  long sweeps = 0, burnin = 0;
  int thin = 1, batches = 20;
  std::uint64_t master_seed = 0;
  bool seed_set = false;
  // sw-sample observables
  std::vector<std::string> observables;
  // tension parameters
  int M = 0;
  std::vector<int> ladder;
  std::vector<Pt> directions;
  // crossover parameters
  double tau_e1 = 0, tau_e1_se = 0, tau_diag = 0, tau_diag_se = 0;
  std::string out_path;  // CSV; the JSON mirror replaces the extension
};

inline ExperimentKind kind_from_string(const std::string& s) {
  if (s == "exact-gap-scan" || s == "exact-gap") return ExperimentKind::ExactGapScan;
  if (s == "bound-scan" || s == "bound") return ExperimentKind::BoundScan;
  if (s == "sw-sample" || s == "sw") return ExperimentKind::SwSample;
  if (s == "tension") return ExperimentKind::Tension;
  if (s == "crossover-demo" || s == "crossover") return ExperimentKind::CrossoverDemo;
  throw std::invalid_argument("unknown experiment kind: " + s);
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig c;
  c.kind = kind_from_string(j.at("kind").get<std::string>());
  if (!j.contains("seed"))
    throw std::invalid_argument("config: master seed is required (no wall-clock default)");
  c.master_seed = j.at("seed").get<std::uint64_t>();
  c.seed_set = true;
  auto grid = j.value("grid", nlohmann::json::object());
  if (grid.contains("N")) c.N = grid.at("N").get<std::vector<int>>();
  if (grid.contains("k")) c.k = grid.at("k").get<std::vector<int>>();
  if (grid.contains("eps")) c.eps = grid.at("eps").get<std::vector<int>>();
  if (grid.contains("beta")) c.beta = grid.at("beta").get<std::vector<double>>();
  if (j.contains("family"))
    c.family = j.at("family").get<std::string>() == "metropolis" ? RateFamily::Metropolis
                                                                  : RateFamily::HeatBath;
  auto chain = j.value("chain", nlohmann::json::object());
  c.sweeps = chain.value("sweeps", 0L);
  c.burnin = chain.value("burnin", 0L);
  c.thin = chain.value("thin", 1);
  c.batches = chain.value("batches", 20);
  if (j.contains("observables")) c.observables = j.at("observables").get<std::vector<std::string>>();
  auto tj = j.value("tension", nlohmann::json::object());
  c.M = tj.value("M", 0);
  if (tj.contains("ladder")) c.ladder = tj.at("ladder").get<std::vector<int>>();
  if (tj.contains("directions"))
    for (const auto& d : tj.at("directions"))
      c.directions.push_back({d.at(0).get<int>(), d.at(1).get<int>()});
  auto cj = j.value("crossover", nlohmann::json::object());
  c.tau_e1 = cj.value("tau_e1", 0.0);
  c.tau_e1_se = cj.value("tau_e1_se", 0.0);
  c.tau_diag = cj.value("tau_diag", 0.0);
  c.tau_diag_se = cj.value("tau_diag_se", 0.0);
  c.out_path = j.value("out", std::string{});
  return c;
}

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  // When nonempty, these replace the generic row objects in the JSON mirror
  // (used to emit typed bound/gap records).
  std::vector<nlohmann::json> json_records;
  int n_errors = 0;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  void write_csv(std::ostream& os) const {
    write_csv_row(os, columns);
    for (const auto& r : rows) write_csv_row(os, r);
  }
  nlohmann::json to_json() const {
    if (!json_records.empty()) return nlohmann::json(json_records);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json o;
      for (std::size_t i = 0; i < columns.size(); ++i) o[columns[i]] = r[i];
      arr.push_back(o);
    }
    return arr;
  }
};

namespace detail {

struct GridPoint {
  int N, k, eps;
  double beta;
  std::uint64_t ordinal;
};

inline std::vector<GridPoint> expand_grid(const ExperimentConfig& c) {
  if (c.N.empty() || c.k.empty() || c.eps.empty() || c.beta.empty())
    throw std::invalid_argument("config: empty parameter grid");
  std::vector<GridPoint> pts;
  std::uint64_t ord = 0;
  for (int N : c.N)
    for (int k : c.k)
      for (int eps : c.eps)
        for (double beta : c.beta) pts.push_back({N, k, eps, beta, ord++});
  return pts;
}

inline std::string eps_str(int eps) { return eps == -1 ? "-1" : "0"; }

}  // namespace detail

// exact-gap-scan: exact spectral gap per grid point; infeasible state spaces
// are skipped with a reason, never silently.
inline ResultTable run_exact_gap_scan(const ExperimentConfig& c) {
  ResultTable t;
  t.columns = {"N", "k", "eps", "beta", "family", "gap", "solver",
               "residual", "dim", "skip_reason", "build_id"};
  for (const auto& gp : detail::expand_grid(c)) {
    std::vector<std::string> row{std::to_string(gp.N), std::to_string(gp.k),
                                 detail::eps_str(gp.eps), fmt_double(gp.beta),
                                 to_string(c.family)};
    const long n_sites = (2L * gp.N + 1) * (2L * gp.N + 1);
    if (gp.k < 1 || gp.k > gp.N) {
      row.insert(row.end(), {"", "", "", "", "k outside [1,N]", build_id()});
      t.add(std::move(row));
      continue;
    }
    if (n_sites > 24) {
      row.insert(row.end(), {"", "", "", "",
                             "state space 2^" + std::to_string(n_sites) + " infeasible",
                             build_id()});
      t.add(std::move(row));
      continue;
    }
    Geometry g = Geometry::box(gp.N);
    GeneratorMatrix gen(g, eta(g, gp.k, gp.eps), gp.beta, c.family);
    GapResult r = exact_gap(gen, 4096, derive_seed(c.master_seed, gp.ordinal));
    row.insert(row.end(), {fmt_double(r.gap), r.solver, fmt_double(r.residual),
                           std::to_string(r.dim), "", build_id()});
    t.add(std::move(row));
  }
  return t;
}

// bound-scan: exact mu(D), mu(inner D), indicator and Rayleigh bounds versus
// the exact gap, on enumerable boxes.
inline ResultTable run_bound_scan(const ExperimentConfig& c) {
  ResultTable t;
  t.columns = {"N", "k", "eps", "beta", "family", "mu_D", "mu_innerD",
               "indicator_bound", "rayleigh_1D", "gap", "ratio_innerD_D",
               "skip_reason", "build_id"};
  for (const auto& gp : detail::expand_grid(c)) {
    std::vector<std::string> row{std::to_string(gp.N), std::to_string(gp.k),
                                 detail::eps_str(gp.eps), fmt_double(gp.beta),
                                 to_string(c.family)};
    const long n_sites = (2L * gp.N + 1) * (2L * gp.N + 1);
    auto skip = [&](const std::string& why) {
      row.insert(row.end(), {"", "", "", "", "", "", why, build_id()});
      t.add(std::move(row));
    };
    if (gp.k < 1 || gp.k > gp.N) {
      skip("k outside [1,N]");
      continue;
    }
    if (n_sites > 20) {
      skip("enumeration over 2^" + std::to_string(n_sites) + " infeasible");
      continue;
    }
    Geometry g = Geometry::box(gp.N);
    BoundarySpec bspec = eta(g, gp.k, gp.eps);
    GeneratorMatrix gen(g, bspec, gp.beta, c.family);
    auto inD = [&](std::uint64_t s) {
      return in_D(g, SpinConfig::from_bits(g, s), bspec, gp.k);
    };
    IndicatorBound ib;
    try {
      ib = indicator_bound(gen, inD);
    } catch (const std::invalid_argument&) {
      skip("event D degenerate at these parameters");
      continue;
    }
    std::vector<double> f(gen.dim());
    for (std::uint64_t s = 0; s < gen.dim(); ++s) f[s] = inD(s) ? 1.0 : 0.0;
    const double ray = rayleigh_bound(gen, f);
    GapResult gap = exact_gap(gen);
    row.insert(row.end(),
               {fmt_double(ib.mu_S), fmt_double(ib.mu_inner), fmt_double(ib.value),
                fmt_double(ray), fmt_double(gap.gap),
                fmt_double(ib.mu_inner / ib.mu_S), "", build_id()});
    t.add(std::move(row));

    nlohmann::json echo{{"N", gp.N},       {"k", gp.k},
                        {"eps", gp.eps},   {"beta", gp.beta},
                        {"family", to_string(c.family)}};
    nlohmann::json gj = echo;
    gj["gap"] = gap.gap;
    gj["solver"] = gap.solver;
    gj["residual"] = gap.residual;
    t.json_records.push_back(gj);
    for (auto [kind, value] :
         std::vector<std::pair<std::string, double>>{{"indicator_D", ib.value},
                                                     {"rayleigh_1D", ray}}) {
      nlohmann::json bj = echo;
      bj["bound_kind"] = kind;
      bj["value"] = value;
      bj["stderr"] = 0.0;
      t.json_records.push_back(bj);
    }
  }
  return t;
}

// sw-sample: SW chain per grid point, batch-means estimates of the requested
// registry observables.
inline ResultTable run_sw_sample(const ExperimentConfig& c) {
  ResultTable t;
  std::vector<std::string> cols{"N", "k", "eps", "beta", "sweeps", "burnin",
                                "thin", "seed"};
  for (const auto& name : c.observables) {
    cols.push_back(name + "_mean");
    cols.push_back(name + "_se");
  }
  cols.push_back("skip_reason");
  cols.push_back("build_id");
  t.columns = cols;
  if (c.sweeps <= c.burnin) throw std::invalid_argument("sw-sample: burnin must be < sweeps");
  for (const auto& gp : detail::expand_grid(c)) {
    const std::uint64_t seed = derive_seed(c.master_seed, gp.ordinal);
    std::vector<std::string> row{std::to_string(gp.N), std::to_string(gp.k),
                                 detail::eps_str(gp.eps), fmt_double(gp.beta),
                                 std::to_string(c.sweeps), std::to_string(c.burnin),
                                 std::to_string(c.thin), std::to_string(seed)};
    if (gp.k < 1 || gp.k > gp.N) {
      for (std::size_t i = 0; i < c.observables.size(); ++i)
        row.insert(row.end(), {"", ""});
      row.insert(row.end(), {"k outside [1,N]", build_id()});
      t.add(std::move(row));
      continue;
    }
    Geometry g = Geometry::box(gp.N);
    BoundarySpec bspec = eta(g, gp.k, gp.eps);
    auto reg = event_registry(g, bspec, gp.k);
    std::vector<EventFn> fns;
    bool missing = false;
    std::string missing_name;
    for (const auto& name : c.observables) {
      auto it = reg.find(name);
      if (it == reg.end()) {
        missing = true;
        missing_name = name;
        break;
      }
      fns.push_back(it->second);
    }
    if (missing) {
      for (std::size_t i = 0; i < c.observables.size(); ++i)
        row.insert(row.end(), {"", ""});
      row.insert(row.end(),
                 {"observable " + missing_name + " unavailable here", build_id()});
      t.add(std::move(row));
      continue;
    }
    Rng rng(seed);
    SpinConfig sigma = SpinConfig::uniform(g, +1);
    BondConfig omega;
    std::vector<std::vector<double>> series(fns.size());
    for (long sw = 0; sw < c.sweeps; ++sw) {
      sigma = sw_sweep(g, sigma, bspec, gp.beta, rng, &omega);
      if (sw < c.burnin || (sw - c.burnin) % c.thin != 0) continue;
      for (std::size_t i = 0; i < fns.size(); ++i)
        series[i].push_back(fns[i].eval(sigma, &omega));
    }
    for (auto& s : series) {
      Estimate e = batch_means(s, c.batches);
      row.push_back(fmt_double(e.value));
      row.push_back(fmt_double(e.se));
    }
    row.insert(row.end(), {"", build_id()});
    t.add(std::move(row));
  }
  return t;
}

// tension: per (beta, direction), the ladder of dual connectivities and the
// tau estimates.
inline ResultTable run_tension(const ExperimentConfig& c) {
  ResultTable t;
  t.columns = {"beta", "direction", "n", "p_hat", "se", "tau_n", "tau_n_se",
               "tau_extrap", "tau_se", "build_id"};
  if (c.M < 4) throw std::invalid_argument("tension: box size M required");
  if (c.ladder.empty()) throw std::invalid_argument("tension: ladder required");
  if (c.beta.empty()) throw std::invalid_argument("tension: beta grid required");
  std::vector<Pt> dirs = c.directions;
  if (dirs.empty()) dirs = {{1, 0}, {1, 1}};
  std::uint64_t ordinal = 0;
  for (double beta : c.beta)
    for (Pt d : dirs) {
      McChainConfig mc{c.sweeps, c.burnin, c.thin, c.batches,
                       derive_seed(c.master_seed, ordinal++)};
      DirectionalTension dt = estimate_tau(beta, d, c.ladder, c.M, mc);
      const std::string dir = std::to_string(d.x) + "_" + std::to_string(d.y);
      for (std::size_t i = 0; i < dt.ladder.size(); ++i)
        t.add({fmt_double(beta), dir, std::to_string(dt.ladder[i]),
               fmt_double(dt.p_hat[i].value), fmt_double(dt.p_hat[i].se),
               fmt_double(dt.tau_n[i]), fmt_double(dt.tau_n_se[i]),
               fmt_double(dt.tau), fmt_double(dt.tau_se), build_id()});
    }
  return t;
}

// crossover-demo: sweep k at fixed N, beta, eps=-1; report mu(D), mu(D-hat)
// and the frequency of full strip connectivity, against the predicted k*.
//
// Near k* the chain is metastable (escape barriers ~ e^{2k tau_1} from the
// plus branch, ~ e^{(N-k) tau_d} from the minus branch), so each k runs two
// chains, one from each extreme start, and both branches are reported along
// with their average.  The branches swap stability where the two barriers
// cross, i.e. at k*, which is what the averaged curve's 1/2-crossing tracks.
inline ResultTable run_crossover_demo(const ExperimentConfig& c) {
  ResultTable t;
  t.columns = {"N", "k", "beta", "k_star",
               "mu_D_plus", "mu_D_minus", "mu_D_avg",
               "mu_Dhat_plus", "mu_Dhat_minus", "mu_Dhat_avg", "mu_Dhat_se",
               "an_full_plus", "an_full_minus", "an_full_avg",
               "seed", "skip_reason", "build_id"};
  if (c.N.size() != 1 || c.beta.size() != 1)
    throw std::invalid_argument("crossover-demo: single N and beta required");
  if (c.tau_e1 <= 0 || c.tau_diag <= 0)
    throw std::invalid_argument("crossover-demo: tension estimates required");
  const int N = c.N[0];
  const double beta = c.beta[0];
  const double kstar = crossover_k(N, c.tau_e1, c.tau_diag);
  Geometry g = Geometry::box(N);
  std::uint64_t ordinal = 0;
  for (int k : c.k) {
    const std::uint64_t seed = derive_seed(c.master_seed, ordinal++);
    std::vector<std::string> row{std::to_string(N), std::to_string(k), fmt_double(beta),
                                 fmt_double(kstar)};
    if (k < 4 || k > N) {
      row.insert(row.end(), 10, "");
      row.insert(row.end(), {std::to_string(seed), "k outside [4,N]", build_id()});
      t.add(std::move(row));
      continue;
    }
    BoundarySpec bspec = eta(g, k, -1);
    Estimate eD[2], eDhat[2], eAN[2];
    for (int branch = 0; branch < 2; ++branch) {
      Rng rng(derive_seed(seed, branch));
      SpinConfig sigma = SpinConfig::uniform(g, branch == 0 ? +1 : -1);
      std::vector<double> sD, sDhat, sAN;
      for (long sw = 0; sw < c.sweeps; ++sw) {
        sigma = sw_sweep(g, sigma, bspec, beta, rng);
        if (sw < c.burnin || (sw - c.burnin) % c.thin != 0) continue;
        sD.push_back(in_D(g, sigma, bspec, k) ? 1.0 : 0.0);
        sDhat.push_back(in_Dhat(g, sigma, bspec, k) ? 1.0 : 0.0);
        sAN.push_back(strip_connectivity(g, sigma, bspec, k).size() == 6 ? 1.0 : 0.0);
      }
      eD[branch] = batch_means(sD, c.batches);
      eDhat[branch] = batch_means(sDhat, c.batches);
      eAN[branch] = batch_means(sAN, c.batches);
    }
    const double dhat_se = 0.5 * std::sqrt(eDhat[0].se * eDhat[0].se +
                                           eDhat[1].se * eDhat[1].se);
    row.insert(row.end(),
               {fmt_double(eD[0].value), fmt_double(eD[1].value),
                fmt_double(0.5 * (eD[0].value + eD[1].value)),
                fmt_double(eDhat[0].value), fmt_double(eDhat[1].value),
                fmt_double(0.5 * (eDhat[0].value + eDhat[1].value)),
                fmt_double(dhat_se),
                fmt_double(eAN[0].value), fmt_double(eAN[1].value),
                fmt_double(0.5 * (eAN[0].value + eAN[1].value)),
                std::to_string(seed), "", build_id()});
    t.add(std::move(row));
  }
  return t;
}

inline ResultTable run_experiment(const ExperimentConfig& c) {
  if (!c.seed_set) throw std::invalid_argument("config: master seed is required");
  switch (c.kind) {
    case ExperimentKind::ExactGapScan: return run_exact_gap_scan(c);
    case ExperimentKind::BoundScan: return run_bound_scan(c);
    case ExperimentKind::SwSample: return run_sw_sample(c);
    case ExperimentKind::Tension: return run_tension(c);
    case ExperimentKind::CrossoverDemo: return run_crossover_demo(c);
  }
  throw std::logic_error("run_experiment: bad kind");
}

// Writes CSV to c.out_path and the JSON mirror next to it.
inline void write_results(const ExperimentConfig& c, const ResultTable& t) {
  if (c.out_path.empty()) throw std::invalid_argument("write_results: no output path");
  std::ofstream csv(c.out_path);
  if (!csv) throw std::runtime_error("cannot open " + c.out_path);
  t.write_csv(csv);
  std::filesystem::path jp(c.out_path);
  jp.replace_extension(".json");
  std::ofstream js(jp);
  js << t.to_json().dump(1) << '\n';
}

}  // namespace isinggap
