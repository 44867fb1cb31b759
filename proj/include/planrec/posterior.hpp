#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "planrec/error.hpp"

namespace planrec {

struct GoalPosterior {
  std::vector<double> probs;
  // Total unnormalized mass; probs[i] = raw[i] / normalizer.
  double normalizer = 1.0;
  double log_normalizer = 0.0;
  bool uniform_fallback = false;

  std::size_t size() const noexcept { return probs.size(); }
  friend bool operator==(const GoalPosterior&, const GoalPosterior&) = default;
};

inline std::vector<double> uniform_priors(std::size_t n) {
  return std::vector<double>(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
}

// log(1 + e^x) without overflow.
inline double softplus(double x) {
  if (x == std::numeric_limits<double>::infinity()) return x;
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Normalizes log-space masses with the log-sum-exp pattern. When every mass is
// zero the result is uniform and flagged.
inline GoalPosterior normalize_log(const std::vector<double>& log_raw) {
  GoalPosterior out;
  const std::size_t n = log_raw.size();
  if (n == 0) throw Error("posterior over an empty goal set");
  const double m = *std::max_element(log_raw.begin(), log_raw.end());
  if (m == -std::numeric_limits<double>::infinity() || std::isnan(m)) {
    out.probs = uniform_priors(n);
    out.normalizer = 0.0;
    out.log_normalizer = -std::numeric_limits<double>::infinity();
    out.uniform_fallback = true;
    return out;
  }
  double sum = 0.0;
  out.probs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.probs[i] = std::exp(log_raw[i] - m);
    sum += out.probs[i];
  }
  for (double& p : out.probs) p /= sum;
  out.log_normalizer = m + std::log(sum);
  out.normalizer = std::exp(out.log_normalizer);
  return out;
}

inline void check_priors(const std::vector<double>& priors) {
  double s = 0.0;
  for (double p : priors) {
    if (!(p >= 0.0)) throw Error("priors must be non-negative");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-9) throw Error("priors must sum to 1");
}

// P(g|O) from per-goal cost differences: raw(g) = prior(g) / (1 + exp(beta * delta)).
inline GoalPosterior posterior(const std::vector<double>& deltas, const std::vector<double>& priors,
                               double beta = 1.0) {
  if (deltas.size() != priors.size()) throw Error("deltas and priors differ in length");
  if (!(beta > 0.0)) throw Error("beta must be positive");
  std::vector<double> log_raw(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double lp = priors[i] > 0 ? std::log(priors[i]) : -std::numeric_limits<double>::infinity();
    log_raw[i] = lp - softplus(beta * deltas[i]);
  }
  return normalize_log(log_raw);
}

// Indices whose probability is within eps of the maximum.
inline std::vector<std::size_t> argmax_set(const std::vector<double>& probs, double eps = 1e-9) {
  std::vector<std::size_t> out;
  if (probs.empty()) return out;
  const double m = *std::max_element(probs.begin(), probs.end());
  for (std::size_t i = 0; i < probs.size(); ++i)
    if (probs[i] >= m - eps) out.push_back(i);
  return out;
}

inline std::vector<std::size_t> argmax_set(const GoalPosterior& p, double eps = 1e-9) {
  return argmax_set(p.probs, eps);
}

}  // namespace planrec
