// Monte Carlo scalar estimates: batch means, standard errors, the rule-of-
// three upper bound for zero-hit indicators, and lag-1 autocorrelation as a
// mixing diagnostic.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace isinggap {

struct Estimate {
  double value = 0;
  double se = 0;
  long n = 0;       // recorded samples
  int batches = 0;
  double rho1 = 0;  // lag-1 autocorrelation of the sample series
  bool zero_hit = false;
  double upper95 = 0;  // one-sided 95% bound when zero_hit (3/n)
};

inline Estimate batch_means(const std::vector<double>& series, int n_batches) {
  if (n_batches < 10) throw std::invalid_argument("batch_means: need >= 10 batches");
  const long n = static_cast<long>(series.size());
  if (n < n_batches) throw std::invalid_argument("batch_means: too few samples");
  const long per = n / n_batches;
  std::vector<double> bm(n_batches, 0.0);
  for (int b = 0; b < n_batches; ++b) {
    double s = 0;
    for (long i = b * per; i < (b + 1) * per; ++i) s += series[i];
    bm[b] = s / static_cast<double>(per);
  }
  Estimate e;
  e.n = per * n_batches;
  e.batches = n_batches;
  double mean = 0;
  for (double v : bm) mean += v;
  mean /= n_batches;
  double var = 0;
  for (double v : bm) var += (v - mean) * (v - mean);
  var /= (n_batches - 1);
  e.value = mean;
  e.se = std::sqrt(var / n_batches);

  // lag-1 autocorrelation of the raw series
  double m = 0;
  for (long i = 0; i < e.n; ++i) m += series[i];
  m /= static_cast<double>(e.n);
  double c0 = 0, c1 = 0;
  for (long i = 0; i < e.n; ++i) {
    const double d = series[i] - m;
    c0 += d * d;
    if (i + 1 < e.n) c1 += d * (series[i + 1] - m);
  }
  e.rho1 = c0 > 0 ? c1 / c0 : 0.0;

  if (mean == 0.0) {
    e.zero_hit = true;
    e.upper95 = 3.0 / static_cast<double>(e.n);
  }
  return e;
}

// |a - b| within tol standard errors of the combined uncertainty.
inline bool agrees_within(double a, double b, double se_a, double se_b, double tol) {
  const double se = std::sqrt(se_a * se_a + se_b * se_b);
  return std::abs(a - b) <= tol * se;
}

}  // namespace isinggap
