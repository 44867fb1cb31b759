#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "planrec/error.hpp"
#include "planrec/posterior.hpp"
#include "planrec/sampler.hpp"

namespace planrec::benchkit {

// Observation fractions in percent: 1..5, then 10..95 in steps of 5.
inline std::vector<int> lambda_grid_percent() {
  std::vector<int> out = {1, 2, 3, 4, 5};
  for (int p = 10; p <= 95; p += 5) out.push_back(p);
  return out;
}

// floor(T * percent / 100) without floating-point rounding.
inline std::size_t eval_index(std::size_t T, int percent) {
  return T * static_cast<std::size_t>(percent) / 100;
}

// One problem's posteriors for t = 0..T together with its true goal.
struct ScoredSeries {
  std::vector<std::vector<double>> probs;
  std::size_t true_goal = 0;

  std::size_t horizon() const { return probs.empty() ? 0 : probs.size() - 1; }
};

// 1 iff the true goal is the only maximizer at t.
inline bool uniquely_correct(const std::vector<double>& probs, std::size_t true_goal, double eps) {
  const auto best = argmax_set(probs, eps);
  return best.size() == 1 && best.front() == true_goal;
}

inline double accuracy(const std::vector<ScoredSeries>& series, int percent, double eps = 1e-9) {
  if (series.empty()) throw Error("accuracy over an empty problem set");
  std::size_t correct = 0;
  for (const auto& s : series) {
    if (s.probs.empty()) continue;
    const std::size_t t = eval_index(s.horizon(), percent);
    if (uniquely_correct(s.probs[t], s.true_goal, eps)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(series.size());
}

// --- Cross-validation --------------------------------------------------------

struct CvFold {
  std::vector<std::size_t> train;       // exactly n entries
  std::vector<std::size_t> padding;     // subset of train drawn from other partitions
  std::vector<std::size_t> validation;  // everything outside train
};

struct CvPlan {
  std::size_t n = 0;
  std::vector<CvFold> folds;
};

// Shuffled indices are cut into consecutive partitions of size n; a short last
// partition is filled up with indices sampled from the other partitions.
inline CvPlan make_cv_plan(std::size_t dataset_size, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error("training size must be positive");
  if (n >= dataset_size)
    throw Error("training size " + std::to_string(n) + " leaves no validation data among " +
                std::to_string(dataset_size) + " problems");
  std::vector<std::size_t> order(dataset_size);
  for (std::size_t i = 0; i < dataset_size; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  CvPlan plan;
  plan.n = n;
  const std::size_t k = (dataset_size + n - 1) / n;
  for (std::size_t f = 0; f < k; ++f) {
    CvFold fold;
    const std::size_t lo = f * n;
    const std::size_t hi = std::min(dataset_size, lo + n);
    fold.train.assign(order.begin() + static_cast<std::ptrdiff_t>(lo),
                      order.begin() + static_cast<std::ptrdiff_t>(hi));
    if (fold.train.size() < n) {
      std::vector<std::size_t> others(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(lo));
      rng.shuffle(others);
      for (std::size_t i = 0; fold.train.size() < n; ++i) {
        fold.train.push_back(others[i]);
        fold.padding.push_back(others[i]);
      }
    }
    std::vector<char> in_train(dataset_size, 0);
    for (std::size_t i : fold.train) in_train[i] = 1;
    for (std::size_t i = 0; i < dataset_size; ++i)
      if (!in_train[i]) fold.validation.push_back(i);
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

// --- Sequence statistics -----------------------------------------------------------

struct LengthStats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // population standard deviation
};

inline LengthStats length_stats(std::vector<std::size_t> lengths) {
  LengthStats s;
  s.count = lengths.size();
  if (lengths.empty()) return s;
  std::sort(lengths.begin(), lengths.end());
  double sum = 0.0;
  for (auto l : lengths) sum += static_cast<double>(l);
  s.mean = sum / static_cast<double>(s.count);
  const std::size_t mid = s.count / 2;
  s.median = s.count % 2 ? static_cast<double>(lengths[mid])
                         : 0.5 * static_cast<double>(lengths[mid - 1] + lengths[mid]);
  double var = 0.0;
  for (auto l : lengths) var += (static_cast<double>(l) - s.mean) * (static_cast<double>(l) - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(s.count));
  return s;
}

// Per goal index; goals without sequences are absent from the map.
inline std::map<std::size_t, LengthStats> sequence_stats(
    const std::vector<std::pair<std::size_t, std::size_t>>& goal_and_length) {
  std::map<std::size_t, std::vector<std::size_t>> buckets;
  for (const auto& [g, len] : goal_and_length) buckets[g].push_back(len);
  std::map<std::size_t, LengthStats> out;
  for (auto& [g, v] : buckets) out[g] = length_stats(std::move(v));
  return out;
}

}  // namespace planrec::benchkit
