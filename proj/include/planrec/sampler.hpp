#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "planrec/error.hpp"
#include "planrec/model.hpp"
#include "planrec/observations.hpp"
#include "planrec/planner.hpp"

namespace planrec {

// 64-bit Mersenne Twister with distribution code fixed here, so streams are
// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw Error("empty range");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    for (;;) {
      const std::uint64_t x = next();
      if (x < limit) return x % n;
    }
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; decorrelates seeds derived from small integers.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return mix_seed(mix_seed(mix_seed(base) ^ a) ^ b);
}

// W(AT | g) and W(OB | g) for one goal.
struct SamplerModel {
  std::map<std::string, double> action_type_weights;
  std::map<std::string, double> object_weights;
  std::vector<std::string> action_type_of;            // per ground action
  std::vector<std::vector<std::string>> objects_of;   // per ground action

  friend bool operator==(const SamplerModel&, const SamplerModel&) = default;
};

// Weights are drawn uniform(0.1, 1.0) in lexicographic key order, action types first.
inline SamplerModel init_sampler_model(const PlanningProblem& p, const GoalDescription& /*goal*/,
                                       std::uint64_t seed) {
  SamplerModel m;
  for (const auto& a : p.actions) {
    m.action_type_of.push_back(a.schema);
    m.objects_of.push_back(a.args);
    m.action_type_weights.emplace(a.schema, 0.0);
    for (const auto& o : a.args) m.object_weights.emplace(o, 0.0);
  }
  Rng rng(seed);
  for (auto& [k, w] : m.action_type_weights) w = rng.uniform(0.1, 1.0);
  for (auto& [k, w] : m.object_weights) w = rng.uniform(0.1, 1.0);
  return m;
}

inline double action_weight(const SamplerModel& m, ActionId a) {
  double w = m.action_type_weights.at(m.action_type_of.at(a));
  for (const auto& o : m.objects_of.at(a)) w *= m.object_weights.at(o);
  return w;
}

struct SamplerConfig {
  double p_plan_action = 0.5;
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_length;  // default: 10 x initial optimal plan length
  std::size_t satisficing_threshold = 10'000;
  SearchBudget budget = SearchBudget::seconds(30.0);
};

class TruncatedError : public Error {
 public:
  TruncatedError(ObservationSequence partial, std::size_t limit)
      : Error("sampled sequence reached the length limit of " + std::to_string(limit) +
              " without achieving the goal"),
        partial_(std::move(partial)) {}

  const ObservationSequence& partial() const noexcept { return partial_; }

 private:
  ObservationSequence partial_;
};

// Interleaves actions of the current optimal plan with weighted random
// applicable actions, replanning after every random action.
inline ObservationSequence sample_sequence(const PlanningProblem& p, const GoalDescription& goal,
                                           const SamplerModel& model, const SamplerConfig& cfg) {
  if (!(cfg.p_plan_action >= 0.0 && cfg.p_plan_action <= 1.0))
    throw Error("p_plan_action must lie in [0, 1]");
  if (cfg.max_length && *cfg.max_length < 1) throw Error("max_length must be at least 1");
  const SearchMode mode =
      p.actions.size() > cfg.satisficing_threshold ? SearchMode::Satisficing : SearchMode::Optimal;
  const Planner planner(p);
  auto plan_from = [&](const State& s) { return planner.solve(s, goal, mode, cfg.budget); };

  PlanResult first = plan_from(p.init);
  if (!first.solved()) throw UnsolvableError("goal is not reachable from the initial state");
  std::vector<ActionId> plan = first.plan->steps;
  const std::size_t limit = cfg.max_length.value_or(std::max<std::size_t>(1, 10 * plan.size()));

  Rng rng(cfg.seed);
  ObservationSequence seq;
  State s = p.init;
  std::size_t cursor = 0;
  while (!satisfies(s, goal)) {
    if (seq.size() >= limit) throw TruncatedError(seq, limit);
    bool took_random = false;
    if (rng.uniform01() >= cfg.p_plan_action) {
      std::vector<ActionId> candidates;
      std::vector<double> weights;
      for (const auto& a : p.actions) {
        if (!applicable(s, a)) continue;
        const double w = action_weight(model, a.id);
        if (w > 0.0) {
          candidates.push_back(a.id);
          weights.push_back(w);
        }
      }
      while (!candidates.empty()) {
        double total = 0.0;
        for (double w : weights) total += w;
        const double r = rng.uniform01() * total;
        std::size_t k = 0;
        double acc = weights[0];
        while (acc <= r && k + 1 < candidates.size()) acc += weights[++k];
        const ActionId a = candidates[k];
        State next = apply_unchecked(s, p.action(a));
        PlanResult replanned = plan_from(next);
        if (replanned.solved()) {
          s = std::move(next);
          seq.actions.push_back(a);
          plan = replanned.plan->steps;
          cursor = 0;
          took_random = true;
          break;
        }
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(k));
        weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(k));
      }
    }
    if (!took_random) {
      const ActionId a = plan.at(cursor++);
      s = apply_unchecked(s, p.action(a));
      seq.actions.push_back(a);
    }
  }
  return seq;
}

}  // namespace planrec
