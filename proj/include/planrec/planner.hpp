#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "planrec/model.hpp"

namespace planrec {

enum class SearchMode { Optimal, Satisficing };

inline const char* to_string(SearchMode m) {
  return m == SearchMode::Optimal ? "optimal" : "satisficing";
}

struct SearchBudget {
  std::chrono::duration<double> wall_time_limit{30.0};
  std::optional<std::uint64_t> expansion_limit;

  static SearchBudget seconds(double s) { return {std::chrono::duration<double>(s), std::nullopt}; }
  static SearchBudget expansions(std::uint64_t n) {
    return {std::chrono::duration<double>(std::numeric_limits<double>::infinity()), n};
  }
  static SearchBudget unlimited() {
    return {std::chrono::duration<double>(std::numeric_limits<double>::infinity()), std::nullopt};
  }
};

enum class PlanOutcome { Solved, Unsolvable, BudgetExhausted };

inline const char* to_string(PlanOutcome o) {
  switch (o) {
    case PlanOutcome::Solved: return "solved";
    case PlanOutcome::Unsolvable: return "unsolvable";
    case PlanOutcome::BudgetExhausted: return "budget_exhausted";
  }
  return "?";
}

struct PlanResult {
  PlanOutcome outcome = PlanOutcome::Unsolvable;
  std::optional<Plan> plan;
  std::uint64_t expansions = 0;
  std::chrono::duration<double> elapsed{0.0};

  bool solved() const noexcept { return outcome == PlanOutcome::Solved; }
  double cost() const noexcept { return solved() ? plan->cost : kInfiniteCost; }
};

struct ValidationResult {
  bool valid = false;
  double cost = 0.0;
  std::size_t step = 0;  // failing step; equals plan length when the goal is missed
  std::string reason;
};

inline ValidationResult validate(const PlanningProblem& p, const Plan& plan) {
  State s = p.init;
  double cost = 0.0;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const ActionId id = plan.steps[i];
    if (id >= p.actions.size()) return {false, cost, i, "unknown action id " + std::to_string(id)};
    const GroundAction& a = p.actions[id];
    if (!applicable(s, a)) return {false, cost, i, a.name + " is not applicable"};
    s = apply_unchecked(s, a);
    cost += a.cost;
  }
  if (!satisfies(s, p.goal)) return {false, cost, plan.steps.size(), "goal not satisfied"};
  return {true, cost, plan.steps.size(), {}};
}

// Precomputes successor and relaxation structures for one action set; solve()
// may then be called concurrently with different initial states and goals.
class Planner {
 public:
  explicit Planner(const PlanningProblem& p) : problem_(p), n_(p.fluent_count()) {
    by_first_pre_.resize(n_);
    fluent_ops_.resize(n_);
    adders_.resize(n_);
    for (const auto& a : p.actions) {
      for (FluentId f : a.add) adders_[f].push_back({a.id, kUnconditional});
      for (std::uint32_t k = 0; k < a.cond_effects.size(); ++k)
        adders_[a.cond_effects[k].effect].push_back({a.id, k});
      if (a.pre.empty())
        no_pre_.push_back(a.id);
      else
        by_first_pre_[a.pre.front()].push_back(a.id);
      if (!a.add.empty()) add_relaxed(a.id, a.pre, a.add, a.cost);
      for (const auto& ce : a.cond_effects) {
        std::vector<FluentId> pre = a.pre;
        pre.push_back(ce.condition);
        detail::sort_unique(pre);
        add_relaxed(a.id, pre, {ce.effect}, a.cost);
      }
      if (!(a.cost >= 0.0 && a.cost == std::floor(a.cost) && a.cost < 1e6)) integral_costs_ = false;
    }
  }

  const PlanningProblem& problem() const noexcept { return problem_; }

  PlanResult solve(const State& init, const GoalDescription& goal, SearchMode mode,
                   const SearchBudget& budget) const {
    Search s(*this, goal, budget);
    return mode == SearchMode::Optimal ? s.astar(init) : s.anytime_gbfs(init);
  }

  PlanResult solve(SearchMode mode, const SearchBudget& budget) const {
    return solve(problem_.init, problem_.goal, mode, budget);
  }

  enum class Heuristic { Max, Add };

  // Delete-relaxation estimate; negative goal literals are ignored.
  double heuristic(const State& s, const GoalDescription& goal, Heuristic kind) const {
    Scratch scratch;
    GoalDescription g = goal;
    detail::sort_unique(g.positive);
    std::vector<char> is_goal(n_, 0);
    for (FluentId f : g.positive) is_goal[f] = 1;
    return relaxed_cost(s, g, is_goal, kind, scratch, nullptr);
  }

  // Actions that can contribute to the goal by backward chaining over add
  // effects and preconditions. Without negative goal literals, dropping the
  // rest keeps every optimal plan: preconditions are positive and conditional
  // effects only add, so removing an action never falsifies a relevant fluent.
  std::vector<char> relevant_actions(const GoalDescription& goal) const {
    std::vector<char> act(problem_.actions.size(), goal.negative.empty() ? 0 : 1);
    if (!goal.negative.empty()) return act;
    std::vector<char> flu(n_, 0);
    std::vector<FluentId> work;
    auto mark = [&](FluentId f) {
      if (!flu[f]) {
        flu[f] = 1;
        work.push_back(f);
      }
    };
    for (FluentId f : goal.positive) mark(f);
    while (!work.empty()) {
      const FluentId f = work.back();
      work.pop_back();
      for (const auto& [a, k] : adders_[f]) {
        const GroundAction& ga = problem_.actions[a];
        if (k != kUnconditional) mark(ga.cond_effects[k].condition);
        if (act[a]) continue;
        act[a] = 1;
        for (FluentId q : ga.pre) mark(q);
      }
    }
    return act;
  }

 private:
  static constexpr std::uint32_t kUnconditional = std::numeric_limits<std::uint32_t>::max();

  struct RelaxedOp {
    ActionId action = 0;
    std::vector<FluentId> pre;
    std::vector<FluentId> eff;
    double cost = 0.0;
  };

  void add_relaxed(ActionId action, const std::vector<FluentId>& pre, std::vector<FluentId> eff,
                   double cost) {
    const auto id = static_cast<std::uint32_t>(ops_.size());
    ops_.push_back({action, pre, std::move(eff), cost});
    if (pre.empty()) free_ops_.push_back(id);
    for (FluentId f : pre) fluent_ops_[f].push_back(id);
  }

  struct Scratch {
    std::vector<double> value;
    std::vector<char> done;
    std::vector<std::uint32_t> missing;
    std::vector<double> op_value;
    using Item = std::pair<double, FluentId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    std::vector<std::vector<FluentId>> buckets;
  };

  // Monotone priority queue: integer buckets when every cost is a small
  // non-negative integer, a binary heap otherwise.
  class RelaxedQueue {
   public:
    RelaxedQueue(Scratch& w, bool bucketed) : w_(w), bucketed_(bucketed) {
      if (bucketed_)
        for (auto& b : w_.buckets) b.clear();
      else
        while (!w_.queue.empty()) w_.queue.pop();
    }
    void push(double v, FluentId f) {
      if (!bucketed_) {
        w_.queue.emplace(v, f);
        return;
      }
      const auto k = static_cast<std::size_t>(v);
      if (k >= w_.buckets.size()) w_.buckets.resize(k + 1);
      w_.buckets[k].push_back(f);
      ++size_;
    }
    bool pop(double& v, FluentId& f) {
      if (!bucketed_) {
        if (w_.queue.empty()) return false;
        std::tie(v, f) = w_.queue.top();
        w_.queue.pop();
        return true;
      }
      if (size_ == 0) return false;
      while (w_.buckets[cur_].empty()) ++cur_;
      f = w_.buckets[cur_].back();
      w_.buckets[cur_].pop_back();
      --size_;
      v = static_cast<double>(cur_);
      return true;
    }

   private:
    Scratch& w_;
    bool bucketed_;
    std::size_t cur_ = 0;
    std::size_t size_ = 0;
  };

  // Generalized Dijkstra over relaxed operators (h_max or h_add).
  double relaxed_cost(const State& s, const GoalDescription& goal, const std::vector<char>& is_goal,
                      Heuristic kind, Scratch& w, const std::vector<char>* allowed) const {
    if (goal.positive.empty()) return 0.0;
    w.value.assign(n_, kInfiniteCost);
    w.done.assign(n_, 0);
    w.missing.resize(ops_.size());
    w.op_value.assign(ops_.size(), 0.0);
    for (std::size_t i = 0; i < ops_.size(); ++i)
      w.missing[i] = static_cast<std::uint32_t>(ops_[i].pre.size());
    RelaxedQueue queue(w, integral_costs_);

    for (FluentId f : s.members()) {
      w.value[f] = 0.0;
      queue.push(0.0, f);
    }
    auto relax_op = [&](std::uint32_t id) {
      const RelaxedOp& op = ops_[id];
      const double v = w.op_value[id] + op.cost;
      for (FluentId q : op.eff) {
        if (v < w.value[q]) {
          w.value[q] = v;
          queue.push(v, q);
        }
      }
    };
    auto usable = [&](std::uint32_t id) { return !allowed || (*allowed)[ops_[id].action]; };
    for (std::uint32_t id : free_ops_)
      if (usable(id)) relax_op(id);

    std::size_t goals_left = goal.positive.size();
    double total = 0.0;
    double v = 0.0;
    FluentId f = 0;
    while (queue.pop(v, f)) {
      if (w.done[f] || v > w.value[f]) continue;
      w.done[f] = 1;
      if (is_goal[f]) {
        total = kind == Heuristic::Max ? std::max(total, v) : total + v;
        if (--goals_left == 0) return total;
      }
      for (std::uint32_t id : fluent_ops_[f]) {
        w.op_value[id] = kind == Heuristic::Max ? std::max(w.op_value[id], v) : w.op_value[id] + v;
        if (--w.missing[id] == 0 && usable(id)) relax_op(id);
      }
    }
    return kInfiniteCost;
  }

  class Search {
   public:
    Search(const Planner& p, const GoalDescription& goal, const SearchBudget& budget)
        : pl_(p), goal_(goal), budget_(budget), start_(std::chrono::steady_clock::now()) {
      detail::sort_unique(goal_.positive);
      detail::sort_unique(goal_.negative);
      is_goal_.assign(p.n_, 0);
      for (FluentId f : goal.positive) is_goal_[f] = 1;
      relevant_ = p.relevant_actions(goal_);
    }

    PlanResult astar(const State& init) {
      if (satisfies(init, goal_)) return finish_solved(node(init, 0.0, kNone, kNone));
      if (out_of_budget()) return finish(PlanOutcome::BudgetExhausted);
      const double h0 = h(init, Heuristic::Max);
      if (h0 == kInfiniteCost) return finish(PlanOutcome::Unsolvable);
      const std::uint32_t root = node(init, 0.0, kNone, kNone);
      push(h0, 0.0, kNone, root, true);

      while (!open_.empty()) {
        const OpenEntry e = open_.top();
        open_.pop();
        Node& n = nodes_[e.node];
        if (n.closed || e.g > n.g) continue;
        if (satisfies(states_[e.node], goal_)) return finish_solved(e.node);
        if (out_of_budget()) return finish(PlanOutcome::BudgetExhausted);
        n.closed = true;
        ++expansions_;
        const State parent = states_[e.node];
        const double g = n.g;
        for_each_successor(parent, [&](ActionId a, State&& child) {
          const double g2 = g + pl_.problem_.actions[a].cost;
          auto [id, fresh] = lookup(std::move(child), g2, e.node, a);
          if (!fresh) {
            Node& c = nodes_[id];
            if (g2 >= c.g) return;
            c.g = g2;
            c.parent = e.node;
            c.action = a;
            c.closed = false;
          }
          Node& c = nodes_[id];
          if (c.h < 0) c.h = h(states_[id], Heuristic::Max);
          if (c.h == kInfiniteCost) return;
          push(g2 + c.h, g2, a, id, true);
        });
      }
      return finish(PlanOutcome::Unsolvable);
    }

    // Greedy best-first on h_add with deferred evaluation, continued as a
    // branch-and-bound search after the first solution.
    PlanResult anytime_gbfs(const State& init) {
      if (satisfies(init, goal_)) return finish_solved(node(init, 0.0, kNone, kNone));
      if (out_of_budget()) return finish(PlanOutcome::BudgetExhausted);
      const std::uint32_t root = node(init, 0.0, kNone, kNone);
      push(0.0, 0.0, kNone, root, false);

      while (!open_.empty()) {
        const OpenEntry e = open_.top();
        open_.pop();
        Node& n = nodes_[e.node];
        if (e.g > n.g || (n.closed && e.g >= n.g)) continue;
        if (incumbent_ && n.g >= incumbent_cost_) continue;
        if (satisfies(states_[e.node], goal_)) {
          incumbent_ = e.node;
          incumbent_cost_ = n.g;
          incumbent_steps_ = extract(e.node);
          continue;
        }
        if (out_of_budget()) break;
        const double hadd = h(states_[e.node], Heuristic::Add);
        if (hadd == kInfiniteCost) {
          nodes_[e.node].closed = true;
          continue;
        }
        if (incumbent_ && nodes_[e.node].g + h(states_[e.node], Heuristic::Max) >= incumbent_cost_)
          continue;
        nodes_[e.node].closed = true;
        ++expansions_;
        const State parent = states_[e.node];
        const double g = nodes_[e.node].g;
        for_each_successor(parent, [&](ActionId a, State&& child) {
          const double g2 = g + pl_.problem_.actions[a].cost;
          if (incumbent_ && g2 >= incumbent_cost_) return;
          auto [id, fresh] = lookup(std::move(child), g2, e.node, a);
          if (!fresh) {
            Node& c = nodes_[id];
            if (g2 >= c.g) return;
            c.g = g2;
            c.parent = e.node;
            c.action = a;
            c.closed = false;
          }
          push(hadd, g2, a, id, false);
        });
      }
      if (incumbent_) {
        PlanResult r = finish(PlanOutcome::Solved);
        r.plan = Plan{incumbent_steps_, plan_cost(pl_.problem_, incumbent_steps_)};
        return r;
      }
      return finish(open_.empty() ? PlanOutcome::Unsolvable : PlanOutcome::BudgetExhausted);
    }

   private:
    static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

    struct Node {
      double g = 0.0;
      double h = -1.0;  // cached h_max; negative means not computed
      std::uint32_t parent = kNone;
      ActionId action = kNone;
      bool closed = false;
    };

    struct OpenEntry {
      double key = 0.0;
      double g = 0.0;
      ActionId action = 0;
      std::uint64_t seq = 0;
      std::uint32_t node = 0;
      bool prefer_high_g = true;
    };

    // Priority order: key, then g (direction depends on mode), then action id,
    // then insertion order.
    struct Worse {
      bool operator()(const OpenEntry& a, const OpenEntry& b) const {
        if (a.key != b.key) return a.key > b.key;
        if (a.g != b.g) return a.prefer_high_g ? a.g < b.g : a.g > b.g;
        if (a.action != b.action) return a.action > b.action;
        return a.seq > b.seq;
      }
    };

    struct StateHash {
      const std::vector<State>* states;
      std::size_t operator()(std::uint32_t id) const noexcept { return (*states)[id].hash(); }
    };
    struct StateEq {
      const std::vector<State>* states;
      bool operator()(std::uint32_t a, std::uint32_t b) const noexcept {
        return (*states)[a] == (*states)[b];
      }
    };

    using Heuristic = Planner::Heuristic;

    double h(const State& s, Heuristic kind) {
      return pl_.relaxed_cost(s, goal_, is_goal_, kind, scratch_, &relevant_);
    }

    std::uint32_t node(State s, double g, std::uint32_t parent, ActionId a) {
      return lookup(std::move(s), g, parent, a).first;
    }

    // Returns the node id for s, creating it when unseen.
    std::pair<std::uint32_t, bool> lookup(State&& s, double g, std::uint32_t parent, ActionId a) {
      const auto id = static_cast<std::uint32_t>(states_.size());
      states_.push_back(std::move(s));
      auto [it, inserted] = index_.insert(id);
      if (!inserted) {
        states_.pop_back();
        return {*it, false};
      }
      nodes_.push_back({g, -1.0, parent, a, false});
      return {id, true};
    }

    void push(double key, double g, ActionId a, std::uint32_t id, bool high_g) {
      open_.push({key, g, a, seq_++, id, high_g});
    }

    template <class F>
    void for_each_successor(const State& s, F&& f) {
      const auto& actions = pl_.problem_.actions;
      auto consider = [&](ActionId a) {
        const GroundAction& act = actions[a];
        if (!relevant_[a] || !s.contains_all(act.pre)) return;
        f(a, apply_unchecked(s, act));
      };
      candidates_.clear();
      for (ActionId a : pl_.no_pre_) candidates_.push_back(a);
      for (FluentId fl : s.members())
        for (ActionId a : pl_.by_first_pre_[fl]) candidates_.push_back(a);
      std::sort(candidates_.begin(), candidates_.end());
      for (ActionId a : candidates_) consider(a);
    }

    bool out_of_budget() {
      if (budget_.expansion_limit && expansions_ >= *budget_.expansion_limit) return true;
      if ((expansions_ & 255U) == 0 && budget_.wall_time_limit.count() != kInfiniteCost &&
          std::chrono::steady_clock::now() - start_ >= budget_.wall_time_limit)
        return true;
      return false;
    }

    std::vector<ActionId> extract(std::uint32_t id) const {
      std::vector<ActionId> steps;
      while (nodes_[id].parent != kNone) {
        steps.push_back(nodes_[id].action);
        id = nodes_[id].parent;
      }
      std::reverse(steps.begin(), steps.end());
      return steps;
    }

    PlanResult finish(PlanOutcome o) const {
      PlanResult r;
      r.outcome = o;
      r.expansions = expansions_;
      r.elapsed = std::chrono::steady_clock::now() - start_;
      return r;
    }

    PlanResult finish_solved(std::uint32_t id) const {
      PlanResult r = finish(PlanOutcome::Solved);
      auto steps = extract(id);
      const double c = plan_cost(pl_.problem_, steps);
      r.plan = Plan{std::move(steps), c};
      return r;
    }

    const Planner& pl_;
    GoalDescription goal_;
    SearchBudget budget_;
    std::chrono::steady_clock::time_point start_;
    std::vector<char> is_goal_;
    std::vector<char> relevant_;
    Scratch scratch_;

    std::vector<State> states_;
    std::vector<Node> nodes_;
    std::unordered_set<std::uint32_t, StateHash, StateEq> index_{1024, StateHash{&states_},
                                                                  StateEq{&states_}};
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, Worse> open_;
    std::vector<ActionId> candidates_;
    std::uint64_t seq_ = 0;
    std::uint64_t expansions_ = 0;

    std::optional<std::uint32_t> incumbent_;
    double incumbent_cost_ = kInfiniteCost;
    std::vector<ActionId> incumbent_steps_;
  };

  const PlanningProblem& problem_;
  std::size_t n_;
  bool integral_costs_ = true;
  std::vector<ActionId> no_pre_;
  std::vector<std::vector<ActionId>> by_first_pre_;
  std::vector<RelaxedOp> ops_;
  std::vector<std::uint32_t> free_ops_;
  std::vector<std::vector<std::uint32_t>> fluent_ops_;
  std::vector<std::vector<std::pair<ActionId, std::uint32_t>>> adders_;
};

inline PlanResult plan_optimal(const PlanningProblem& p, const SearchBudget& b) {
  return Planner(p).solve(SearchMode::Optimal, b);
}

inline PlanResult plan_satisficing(const PlanningProblem& p, const SearchBudget& b) {
  return Planner(p).solve(SearchMode::Satisficing, b);
}

}  // namespace planrec
