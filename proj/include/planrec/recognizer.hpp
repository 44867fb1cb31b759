#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "planrec/model.hpp"
#include "planrec/observations.hpp"
#include "planrec/planner.hpp"
#include "planrec/posterior.hpp"

namespace planrec {

struct CostPair {
  double with_obs = 0.0;
  double without_obs = 0.0;

  double delta() const;
  friend bool operator==(const CostPair&, const CostPair&) = default;
};

// Δ with infinite sides: an impossible observation-embedding plan makes the
// goal maximally unlikely; a goal reachable only through the observations
// makes it maximally likely.
inline double cost_delta(double with_obs, double without_obs) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (with_obs == inf) return inf;
  if (without_obs == inf) return -inf;
  return with_obs - without_obs;
}

inline double CostPair::delta() const { return cost_delta(with_obs, without_obs); }

struct RecognitionConfig {
  double beta = 1.0;
  SearchMode mode = SearchMode::Satisficing;
  SearchBudget budget = SearchBudget::seconds(30.0);
  double tie_epsilon = 1e-9;
  bool force_apply = false;
};

struct RecognitionTask {
  std::shared_ptr<const PlanningProblem> problem;
  std::vector<std::string> goal_names;
  std::vector<GoalDescription> goals;
  std::vector<double> priors;
  ObservationSequence observations;

  void check() const {
    if (!problem) throw Error("recognition task without a problem");
    if (goals.empty()) throw Error("recognition task without goals");
    if (priors.size() != goals.size()) throw Error("one prior per goal is required");
    if (!goal_names.empty() && goal_names.size() != goals.size())
      throw Error("one name per goal is required");
    check_priors(priors);
    for (ActionId a : observations.actions)
      if (a >= problem->actions.size()) throw Error("observation refers to an unknown action");
  }
};

// --- Planner result cache --------------------------------------------------

struct CachedSolve {
  double cost = kInfiniteCost;
  PlanOutcome outcome = PlanOutcome::Unsolvable;
};

// Memoizes (action set, goal, state) -> cost for one fixed mode and budget.
// Lookups do not change the logical call count reported in traces.
class SolveCache {
 public:
  template <class F>
  CachedSolve get_or_solve(const void* tag, const GoalDescription& goal, const State& s, F&& solve) {
    Key k{tag, goal, s};
    {
      std::lock_guard lock(mu_);
      auto it = map_.find(k);
      if (it != map_.end()) {
        ++hits_;
        return it->second;
      }
    }
    CachedSolve v = solve();
    std::lock_guard lock(mu_);
    map_.emplace(std::move(k), v);
    return v;
  }

  std::size_t hits() const {
    std::lock_guard lock(mu_);
    return hits_;
  }
  std::size_t size() const {
    std::lock_guard lock(mu_);
    return map_.size();
  }

 private:
  struct Key {
    const void* tag;
    GoalDescription goal;
    State state;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::size_t h = k.state.hash() ^ (std::hash<const void*>()(k.tag) * 31U);
      for (FluentId f : k.goal.positive) h = h * 1000003U + f;
      for (FluentId f : k.goal.negative) h = h * 1000033U + f;
      return h;
    }
  };
  mutable std::mutex mu_;
  std::unordered_map<Key, CachedSolve, KeyHash> map_;
  std::size_t hits_ = 0;
};

// --- Trace ------------------------------------------------------------------

struct GoalCell {
  CostPair costs;
  PlanOutcome with_outcome = PlanOutcome::Solved;
  PlanOutcome without_outcome = PlanOutcome::Solved;
};

struct TraceStep {
  std::size_t t = 0;
  GoalPosterior posterior;
  std::vector<GoalCell> cells;  // empty at t = 0
  std::uint64_t planner_calls = 0;
  double elapsed_seconds = 0.0;
};

struct RecognitionTrace {
  std::string method;
  std::vector<std::string> goal_names;
  std::vector<TraceStep> steps;
  std::vector<double> baselines;  // GM only
  std::vector<PlanOutcome> baseline_outcomes;

  std::uint64_t planner_calls() const { return steps.empty() ? 0 : steps.back().planner_calls; }
  std::size_t horizon() const { return steps.empty() ? 0 : steps.size() - 1; }
};

// --- RG compilation ---------------------------------------------------------

struct RgCompilation {
  PlanningProblem problem;
  std::vector<ActionId> origin;          // compiled action -> original action
  std::vector<FluentId> obs_fluents;     // p_o1 .. p_on

  GoalDescription with_obs(const GoalDescription& g) const {
    GoalDescription out = g;
    out.positive.push_back(obs_fluents.back());
    return out;
  }
  GoalDescription without_obs(const GoalDescription& g) const {
    GoalDescription out = g;
    out.negative.push_back(obs_fluents.back());
    return out;
  }
  // The two planning problems of one goal.
  std::pair<PlanningProblem, PlanningProblem> problems_for(const GoalDescription& g) const {
    std::pair<PlanningProblem, PlanningProblem> out{problem, problem};
    out.first.goal = with_obs(g);
    out.second.goal = without_obs(g);
    return out;
  }
};

inline RgCompilation compile_rg(const PlanningProblem& p, const ObservationSequence& obs) {
  if (obs.empty()) throw Error("RG compilation needs at least one observation");
  RgCompilation c;
  c.problem = p;
  c.problem.goal = {};
  const std::size_t base = p.fluent_count();
  const std::size_t n = obs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = static_cast<FluentId>(base + i);
    c.problem.fluents.push_back({id, "(planrec-obs-" + std::to_string(i + 1) + ")"});
    c.obs_fluents.push_back(id);
  }
  const std::size_t universe = base + n;
  c.problem.init.resize(universe);
  for (std::size_t a = 0; a < p.actions.size(); ++a) c.origin.push_back(static_cast<ActionId>(a));

  std::vector<std::size_t> seen(p.actions.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const ActionId orig = obs.actions[i];
    if (orig >= p.actions.size()) throw Error("observation refers to an unknown action");
    GroundAction* target;
    if (seen[orig]++ == 0) {
      target = &c.problem.actions[orig];
    } else {
      GroundAction clone = p.actions[orig];
      clone.id = static_cast<ActionId>(c.problem.actions.size());
      clone.name = p.actions[orig].name + "#" + std::to_string(seen[orig]);
      c.problem.actions.push_back(std::move(clone));
      c.origin.push_back(orig);
      target = &c.problem.actions.back();
    }
    if (i == 0) {
      target->add.push_back(c.obs_fluents[0]);
      detail::sort_unique(target->add);
    } else {
      target->cond_effects.push_back({c.obs_fluents[i - 1], c.obs_fluents[i]});
    }
  }
  return c;
}

// --- GM transformation --------------------------------------------------------

struct GmProgress {
  State state;
  double prefix_cost = 0.0;
};

// Applies the observations in order. Without force_apply an inapplicable
// observation raises InapplicableActionError carrying its index.
inline GmProgress progress_observations(const PlanningProblem& p, const ObservationSequence& obs,
                                        bool force_apply = false) {
  GmProgress out{p.init, 0.0};
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const GroundAction& a = p.action(obs.actions[i]);
    if (!force_apply && !applicable(out.state, a)) throw InapplicableActionError(i, a.name);
    out.state = apply_unchecked(out.state, a);
    out.prefix_cost += a.cost;
  }
  return out;
}

struct GmTransform {
  PlanningProblem problem;
  double prefix_cost = 0.0;
};

inline GmTransform transform_gm(const PlanningProblem& p, const ObservationSequence& obs,
                                bool force_apply = false) {
  GmProgress pr = progress_observations(p, obs, force_apply);
  GmTransform out{p, pr.prefix_cost};
  out.problem.init = std::move(pr.state);
  return out;
}

// --- Online drivers -----------------------------------------------------------

namespace detail {

inline TraceStep prior_step(const RecognitionTask& task) {
  TraceStep s;
  s.t = 0;
  s.posterior.probs = task.priors;
  return s;
}

inline CachedSolve run_solver(const Planner& planner, const State& init, const GoalDescription& g,
                              const RecognitionConfig& cfg) {
  PlanResult r = planner.solve(init, g, cfg.mode, cfg.budget);
  return {r.cost(), r.outcome};
}

inline std::vector<std::string> goal_names_of(const RecognitionTask& task) {
  if (!task.goal_names.empty()) return task.goal_names;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < task.goals.size(); ++i) names.push_back("g" + std::to_string(i + 1));
  return names;
}

}  // namespace detail

inline RecognitionTrace recognize_online_rg(const RecognitionTask& task, const RecognitionConfig& cfg) {
  task.check();
  const auto start = std::chrono::steady_clock::now();
  RecognitionTrace trace;
  trace.method = "rg";
  trace.goal_names = detail::goal_names_of(task);
  trace.steps.push_back(detail::prior_step(task));
  std::uint64_t calls = 0;
  const std::size_t T = task.observations.size();
  for (std::size_t t = 1; t <= T; ++t) {
    RgCompilation comp = compile_rg(*task.problem, task.observations.prefix(t));
    Planner planner(comp.problem);
    TraceStep step;
    step.t = t;
    std::vector<double> deltas;
    for (const auto& g : task.goals) {
      const CachedSolve w = detail::run_solver(planner, comp.problem.init, comp.with_obs(g), cfg);
      const CachedSolve wo = detail::run_solver(planner, comp.problem.init, comp.without_obs(g), cfg);
      calls += 2;
      GoalCell cell{{w.cost, wo.cost}, w.outcome, wo.outcome};
      deltas.push_back(cell.costs.delta());
      step.cells.push_back(cell);
    }
    step.posterior = posterior(deltas, task.priors, cfg.beta);
    step.planner_calls = calls;
    step.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

// cache may be null. Cached answers still count as planner calls.
inline RecognitionTrace recognize_online_gm(const RecognitionTask& task, const RecognitionConfig& cfg,
                                            SolveCache* cache = nullptr,
                                            const Planner* shared_planner = nullptr) {
  task.check();
  const auto start = std::chrono::steady_clock::now();
  std::unique_ptr<Planner> own;
  if (!shared_planner) own = std::make_unique<Planner>(*task.problem);
  const Planner& planner = shared_planner ? *shared_planner : *own;

  auto solve = [&](const State& s, std::size_t gi) {
    auto run = [&] { return detail::run_solver(planner, s, task.goals[gi], cfg); };
    if (!cache) return run();
    return cache->get_or_solve(&planner.problem(), task.goals[gi], s, run);
  };

  RecognitionTrace trace;
  trace.method = "gm";
  trace.goal_names = detail::goal_names_of(task);
  std::uint64_t calls = 0;
  for (std::size_t gi = 0; gi < task.goals.size(); ++gi) {
    const CachedSolve b = solve(task.problem->init, gi);
    ++calls;
    trace.baselines.push_back(b.cost);
    trace.baseline_outcomes.push_back(b.outcome);
  }
  TraceStep first = detail::prior_step(task);
  first.planner_calls = calls;
  trace.steps.push_back(std::move(first));

  GmProgress pr{task.problem->init, 0.0};
  const std::size_t T = task.observations.size();
  for (std::size_t t = 1; t <= T; ++t) {
    const GroundAction& a = task.problem->action(task.observations.actions[t - 1]);
    if (!cfg.force_apply && !applicable(pr.state, a)) throw InapplicableActionError(t - 1, a.name);
    pr.state = apply_unchecked(pr.state, a);
    pr.prefix_cost += a.cost;

    TraceStep step;
    step.t = t;
    std::vector<double> deltas;
    for (std::size_t gi = 0; gi < task.goals.size(); ++gi) {
      const CachedSolve s = solve(pr.state, gi);
      ++calls;
      const double with = s.cost == kInfiniteCost ? kInfiniteCost : pr.prefix_cost + s.cost;
      GoalCell cell{{with, trace.baselines[gi]}, s.outcome, trace.baseline_outcomes[gi]};
      deltas.push_back(cell.costs.delta());
      step.cells.push_back(cell);
    }
    step.posterior = posterior(deltas, task.priors, cfg.beta);
    step.planner_calls = calls;
    step.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

// Goals that no step could reach, with or without the observations.
inline std::vector<std::size_t> unsolvable_goals(const RecognitionTrace& trace) {
  std::vector<std::size_t> out;
  const std::size_t G = trace.goal_names.size();
  for (std::size_t g = 0; g < G; ++g) {
    bool dead;
    if (!trace.baselines.empty()) {
      dead = trace.baselines[g] == kInfiniteCost;
    } else {
      dead = trace.steps.size() > 1;
      for (std::size_t t = 1; t < trace.steps.size() && dead; ++t) {
        const auto& c = trace.steps[t].cells[g].costs;
        dead = c.with_obs == kInfiniteCost && c.without_obs == kInfiniteCost;
      }
    }
    if (dead) out.push_back(g);
  }
  return out;
}

// --- Serialization --------------------------------------------------------------

inline nlohmann::ordered_json cost_json(double c) {
  if (c == kInfiniteCost) return nullptr;
  return c;
}

inline nlohmann::ordered_json delta_json(double d) {
  if (d == kInfiniteCost) return "+inf";
  if (d == -kInfiniteCost) return "-inf";
  return d;
}

inline nlohmann::ordered_json trace_to_json(const RecognitionTrace& trace, double tie_epsilon = 1e-9,
                                            bool include_timing = true) {
  nlohmann::ordered_json j;
  j["method"] = trace.method;
  j["goals"] = trace.goal_names;
  j["planner_calls"] = trace.planner_calls();
  if (!trace.baselines.empty()) {
    auto& b = j["baselines"] = nlohmann::ordered_json::array();
    for (std::size_t g = 0; g < trace.baselines.size(); ++g)
      b.push_back({{"goal", trace.goal_names[g]},
                   {"cost", cost_json(trace.baselines[g])},
                   {"outcome", to_string(trace.baseline_outcomes[g])}});
  }
  auto& steps = j["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : trace.steps) {
    nlohmann::ordered_json r;
    r["t"] = s.t;
    nlohmann::ordered_json probs;
    for (std::size_t g = 0; g < s.posterior.probs.size(); ++g)
      probs[trace.goal_names[g]] = s.posterior.probs[g];
    r["probs"] = probs;
    auto& am = r["argmax"] = nlohmann::ordered_json::array();
    for (std::size_t g : argmax_set(s.posterior, tie_epsilon)) am.push_back(trace.goal_names[g]);
    r["normalizer"] = s.posterior.normalizer;
    r["uniform_fallback"] = s.posterior.uniform_fallback;
    auto& cells = r["costs"] = nlohmann::ordered_json::array();
    for (std::size_t g = 0; g < s.cells.size(); ++g) {
      const auto& c = s.cells[g];
      cells.push_back({{"goal", trace.goal_names[g]},
                       {"with_obs", cost_json(c.costs.with_obs)},
                       {"without_obs", cost_json(c.costs.without_obs)},
                       {"delta", delta_json(c.costs.delta())},
                       {"with_outcome", to_string(c.with_outcome)},
                       {"without_outcome", to_string(c.without_outcome)}});
    }
    r["planner_calls"] = s.planner_calls;
    if (include_timing) r["elapsed_s"] = s.elapsed_seconds;
    steps.push_back(std::move(r));
  }
  return j;
}

}  // namespace planrec
