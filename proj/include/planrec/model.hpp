#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "planrec/error.hpp"
#include "planrec/fluent_set.hpp"

namespace planrec {

struct Fluent {
  FluentId id = 0;
  std::string name;  // "(pred obj1 obj2)"
};

// Single-fluent conditional effect: `effect` is added when `condition` held
// in the state before the action.
struct ConditionalEffect {
  FluentId condition = 0;
  FluentId effect = 0;
  friend bool operator==(const ConditionalEffect&, const ConditionalEffect&) = default;
};

struct GroundAction {
  ActionId id = 0;
  std::string name;               // "(schema obj1 obj2)"
  std::string schema;             // lifted schema name
  std::vector<std::string> args;  // argument objects
  std::vector<FluentId> pre;      // sorted, unique
  std::vector<FluentId> add;      // sorted, unique
  std::vector<FluentId> del;      // sorted, unique, disjoint from add
  std::vector<ConditionalEffect> cond_effects;
  double cost = 1.0;

  friend bool operator==(const GroundAction&, const GroundAction&) = default;
};

using State = FluentSet;

struct GoalDescription {
  std::vector<FluentId> positive;
  std::vector<FluentId> negative;

  bool empty() const noexcept { return positive.empty() && negative.empty(); }
  friend bool operator==(const GoalDescription&, const GoalDescription&) = default;
};

struct Plan {
  std::vector<ActionId> steps;
  double cost = 0.0;
};

// Grounded problem <F, s0, A, G>. Immutable once built; safe to share.
struct PlanningProblem {
  std::vector<Fluent> fluents;
  std::vector<GroundAction> actions;
  State init;
  GoalDescription goal;

  std::size_t fluent_count() const noexcept { return fluents.size(); }

  const GroundAction& action(ActionId id) const { return actions.at(id); }

  // Linear lookups; callers that resolve many names should build an index.
  std::optional<FluentId> find_fluent(std::string_view name) const {
    for (const auto& f : fluents)
      if (f.name == name) return f.id;
    return std::nullopt;
  }
  std::optional<ActionId> find_action(std::string_view name) const {
    for (const auto& a : actions)
      if (a.name == name) return a.id;
    return std::nullopt;
  }
};

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

inline bool applicable(const State& s, const GroundAction& a) noexcept {
  return s.contains_all(a.pre);
}

// Applies effects without checking preconditions. Conditional effects read the
// pre-action state.
inline State apply_unchecked(const State& s, const GroundAction& a) {
  State next = s;
  for (const auto& ce : a.cond_effects)
    if (s.test(ce.condition)) next.set(ce.effect);
  for (FluentId f : a.add) next.set(f);
  for (FluentId f : a.del) next.reset(f);
  return next;
}

inline State apply(const State& s, const GroundAction& a) {
  if (!applicable(s, a)) throw InapplicableActionError(0, a.name);
  return apply_unchecked(s, a);
}

inline bool satisfies(const State& s, const GoalDescription& g) noexcept {
  return s.contains_all(g.positive) && s.contains_none(g.negative);
}

inline double plan_cost(const PlanningProblem& p, const std::vector<ActionId>& steps) {
  double c = 0.0;
  for (ActionId a : steps) c += p.action(a).cost;
  return c;
}

// Name -> id index for fluents and actions of one problem.
class NameIndex {
 public:
  explicit NameIndex(const PlanningProblem& p) {
    fluents_.reserve(p.fluents.size());
    for (const auto& f : p.fluents) fluents_.emplace(f.name, f.id);
    actions_.reserve(p.actions.size());
    for (const auto& a : p.actions) actions_.emplace(a.name, a.id);
  }

  std::optional<FluentId> fluent(const std::string& name) const {
    auto it = fluents_.find(name);
    if (it == fluents_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<ActionId> action(const std::string& name) const {
    auto it = actions_.find(name);
    if (it == actions_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::unordered_map<std::string, FluentId> fluents_;
  std::unordered_map<std::string, ActionId> actions_;
};

namespace detail {

inline void sort_unique(std::vector<FluentId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace detail

}  // namespace planrec
