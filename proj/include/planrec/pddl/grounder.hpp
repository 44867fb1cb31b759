#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "planrec/error.hpp"
#include "planrec/model.hpp"
#include "planrec/pddl/ast.hpp"

namespace planrec::pddl {

struct GroundOptions {
  std::size_t max_actions = 5'000'000;
  // Atoms forced into the fluent universe even when unreachable, e.g. the
  // literals of alternative goals evaluated against the same grounding.
  std::vector<std::string> extra_fluents;
};

namespace detail {

// An atom argument inside a schema: either a parameter slot or a constant.
struct ArgRef {
  int param = -1;
  std::string constant;
};

struct LiftedAtom {
  std::string predicate;
  std::vector<ArgRef> args;
  int depends_on = -1;  // highest parameter index referenced

  std::string instantiate(const std::vector<const std::string*>& binding) const {
    std::string s = "(" + predicate;
    for (const auto& a : args) {
      s += ' ';
      s += a.param >= 0 ? *binding[static_cast<std::size_t>(a.param)] : a.constant;
    }
    return s + ")";
  }
};

struct Candidate {
  std::string name;
  std::size_t schema = 0;
  std::vector<std::string> args;
  std::vector<int> pre;  // atom ids
  std::vector<int> add;
  std::vector<int> del;
  std::vector<std::pair<int, int>> cond;
  double cost = 1.0;
};

class Grounder {
 public:
  Grounder(const DomainAst& d, const ProblemAst& p, const GroundOptions& opt)
      : domain_(d), problem_(p), options_(opt) {}

  PlanningProblem run() {
    build_types();
    find_static_predicates();
    for (const auto& a : problem_.init) {
      const std::string s = a.str();
      if (static_preds_.count(a.predicate))
        static_facts_.insert(s);
      else
        init_atoms_.push_back(atom_id(s));
    }
    for (const auto& v : problem_.init_values) function_values_[v.term.str()] = v.value;

    for (std::size_t i = 0; i < domain_.actions.size(); ++i) instantiate(i);
    reachability();
    return assemble();
  }

 private:
  int atom_id(const std::string& s) {
    auto [it, inserted] = atom_ids_.emplace(s, static_cast<int>(atom_names_.size()));
    if (inserted) atom_names_.push_back(s);
    return it->second;
  }

  void build_types() {
    for (const auto& t : domain_.types) parent_[t.name] = t.type;
    auto add_object = [&](const TypedName& o) {
      std::string t = o.type;
      std::set<std::string> seen;
      for (;;) {
        objects_of_type_[t].push_back(o.name);
        if (t == "object" || !seen.insert(t).second) break;
        auto it = parent_.find(t);
        t = it == parent_.end() ? "object" : it->second;
      }
    };
    std::set<std::string> names;
    for (const auto& c : domain_.constants)
      if (names.insert(c.name).second) add_object(c);
    for (const auto& o : problem_.objects)
      if (names.insert(o.name).second) add_object(o);
    for (auto& [type, objs] : objects_of_type_) std::sort(objs.begin(), objs.end());
  }

  void find_static_predicates() {
    std::unordered_set<std::string> dynamic;
    for (const auto& a : domain_.actions) {
      for (const auto& x : a.effect.add) dynamic.insert(x.predicate);
      for (const auto& x : a.effect.del) dynamic.insert(x.predicate);
      for (const auto& w : a.effect.conditional) dynamic.insert(w.effect.predicate);
    }
    for (const auto& p : domain_.predicates)
      if (!dynamic.count(p.name)) static_preds_.insert(p.name);
  }

  static LiftedAtom lift(const Atom& a, const std::unordered_map<std::string, int>& params) {
    LiftedAtom out;
    out.predicate = a.predicate;
    for (const auto& arg : a.args) {
      ArgRef r;
      auto it = params.find(arg);
      if (it != params.end()) {
        r.param = it->second;
        out.depends_on = std::max(out.depends_on, it->second);
      } else {
        r.constant = arg;
      }
      out.args.push_back(std::move(r));
    }
    return out;
  }

  void instantiate(std::size_t schema_index) {
    const ActionSchema& s = domain_.actions[schema_index];
    std::unordered_map<std::string, int> params;
    for (std::size_t i = 0; i < s.parameters.size(); ++i)
      params[s.parameters[i].name] = static_cast<int>(i);

    std::vector<LiftedAtom> static_pre;
    std::vector<LiftedAtom> dyn_pre;
    for (const auto& p : s.precondition) {
      (static_preds_.count(p.predicate) ? static_pre : dyn_pre).push_back(lift(p, params));
    }
    std::vector<LiftedAtom> add, del;
    std::vector<std::pair<LiftedAtom, LiftedAtom>> cond;
    for (const auto& a : s.effect.add) add.push_back(lift(a, params));
    for (const auto& a : s.effect.del) del.push_back(lift(a, params));
    for (const auto& w : s.effect.conditional)
      cond.emplace_back(lift(w.condition, params), lift(w.effect, params));

    std::vector<const std::vector<std::string>*> domains;
    for (const auto& p : s.parameters) {
      auto it = objects_of_type_.find(p.type);
      if (it == objects_of_type_.end() || it->second.empty()) return;
      domains.push_back(&it->second);
    }

    // static_by_level[k] holds checks that become decidable once parameter k is bound.
    std::vector<std::vector<const LiftedAtom*>> static_by_level(s.parameters.size() + 1);
    for (const auto& a : static_pre)
      static_by_level[static_cast<std::size_t>(a.depends_on + 1)].push_back(&a);

    std::vector<const std::string*> binding(s.parameters.size(), nullptr);
    auto static_ok = [&](std::size_t level) {
      for (const LiftedAtom* a : static_by_level[level])
        if (!static_facts_.count(a->instantiate(binding))) return false;
      return true;
    };
    if (!static_ok(0)) return;

    auto emit = [&] {
      if (++instantiated_ > options_.max_actions)
        throw GroundingError("grounding exceeds the cap of " +
                             std::to_string(options_.max_actions) + " actions");
      Candidate c;
      c.schema = schema_index;
      c.name = "(" + s.name;
      for (const auto* b : binding) {
        c.name += ' ';
        c.name += *b;
        c.args.push_back(*b);
      }
      c.name += ')';
      for (const auto& a : dyn_pre) c.pre.push_back(atom_id(a.instantiate(binding)));
      for (const auto& a : add) c.add.push_back(atom_id(a.instantiate(binding)));
      for (const auto& a : del) c.del.push_back(atom_id(a.instantiate(binding)));
      for (const auto& [pc, pe] : cond) {
        const std::string cs = pc.instantiate(binding);
        const int e = atom_id(pe.instantiate(binding));
        if (static_preds_.count(pc.predicate)) {
          if (static_facts_.count(cs)) c.add.push_back(e);
        } else {
          c.cond.emplace_back(atom_id(cs), e);
        }
      }
      std::sort(c.pre.begin(), c.pre.end());
      c.pre.erase(std::unique(c.pre.begin(), c.pre.end()), c.pre.end());
      c.cost = cost_of(s, binding);
      candidates_.push_back(std::move(c));
    };

    std::vector<std::size_t> cursor(s.parameters.size(), 0);
    if (s.parameters.empty()) {
      emit();
      return;
    }
    // Iterative depth-first enumeration with static pruning at each level.
    std::size_t level = 0;
    for (;;) {
      if (cursor[level] == domains[level]->size()) {
        if (level == 0) break;
        cursor[level] = 0;
        --level;
        ++cursor[level];
        continue;
      }
      binding[level] = &(*domains[level])[cursor[level]];
      if (!static_ok(level + 1)) {
        ++cursor[level];
        continue;
      }
      if (level + 1 == s.parameters.size()) {
        emit();
        ++cursor[level];
      } else {
        ++level;
      }
    }
  }

  double cost_of(const ActionSchema& s, const std::vector<const std::string*>& binding) const {
    if (!s.effect.cost) return 1.0;
    const CostExpr& c = *s.effect.cost;
    if (c.constant) return *c.constant;
    std::unordered_map<std::string, int> params;
    for (std::size_t i = 0; i < s.parameters.size(); ++i)
      params[s.parameters[i].name] = static_cast<int>(i);
    const std::string term = lift(*c.function, params).instantiate(binding);
    auto it = function_values_.find(term);
    if (it == function_values_.end())
      throw GroundingError("no initial value for cost term " + term + " used by " + s.name);
    if (it->second < 0) throw GroundingError("negative cost " + term);
    return it->second;
  }

  void reachability() {
    const std::size_t n_atoms = atom_names_.size();
    reached_.assign(n_atoms, false);
    std::vector<std::vector<std::size_t>> watchers(n_atoms);
    std::vector<std::vector<int>> pending_cond(n_atoms);
    std::vector<std::size_t> missing(candidates_.size());
    live_.assign(candidates_.size(), false);

    std::vector<int> queue;
    auto reach = [&](int a) {
      if (!reached_[static_cast<std::size_t>(a)]) {
        reached_[static_cast<std::size_t>(a)] = true;
        queue.push_back(a);
      }
    };
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      missing[i] = candidates_[i].pre.size();
      for (int p : candidates_[i].pre) watchers[static_cast<std::size_t>(p)].push_back(i);
      if (missing[i] == 0) ready.push_back(i);
    }
    auto fire = [&](std::size_t i) {
      live_[i] = true;
      const Candidate& c = candidates_[i];
      for (int a : c.add) reach(a);
      for (const auto& [p, q] : c.cond) {
        if (reached_[static_cast<std::size_t>(p)])
          reach(q);
        else
          pending_cond[static_cast<std::size_t>(p)].push_back(q);
      }
    };
    for (int a : init_atoms_) reach(a);
    for (std::size_t i : ready) fire(i);
    while (!queue.empty()) {
      const int a = queue.back();
      queue.pop_back();
      for (int q : pending_cond[static_cast<std::size_t>(a)]) reach(q);
      pending_cond[static_cast<std::size_t>(a)].clear();
      for (std::size_t i : watchers[static_cast<std::size_t>(a)])
        if (--missing[i] == 0) fire(i);
    }
  }

  PlanningProblem assemble() {
    std::set<std::string> names;
    for (std::size_t a = 0; a < atom_names_.size(); ++a)
      if (reached_[a]) names.insert(atom_names_[a]);
    std::vector<std::string> forced = options_.extra_fluents;
    if (problem_.goal) {
      for (const auto& g : problem_.goal->positive) forced.push_back(g.str());
      for (const auto& g : problem_.goal->negative) forced.push_back(g.str());
    }
    for (const auto& f : forced) names.insert(f);

    PlanningProblem out;
    std::unordered_map<std::string, FluentId> fid;
    for (const auto& n : names) {
      const auto id = static_cast<FluentId>(out.fluents.size());
      fid.emplace(n, id);
      out.fluents.push_back({id, n});
    }
    const std::size_t n_fluents = out.fluents.size();
    out.init = State(n_fluents);
    for (int a : init_atoms_) out.init.set(fid.at(atom_names_[static_cast<std::size_t>(a)]));
    for (const auto& f : forced)
      if (static_facts_.count(f)) out.init.set(fid.at(f));

    auto lookup = [&](int atom) -> std::optional<FluentId> {
      if (!reached_[static_cast<std::size_t>(atom)]) return std::nullopt;
      return fid.at(atom_names_[static_cast<std::size_t>(atom)]);
    };

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < candidates_.size(); ++i)
      if (live_[i]) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return candidates_[a].name < candidates_[b].name;
    });
    for (std::size_t i : order) {
      const Candidate& c = candidates_[i];
      GroundAction a;
      a.id = static_cast<ActionId>(out.actions.size());
      a.name = c.name;
      a.schema = domain_.actions[c.schema].name;
      a.args = c.args;
      for (int p : c.pre) a.pre.push_back(*lookup(p));
      for (int p : c.add) a.add.push_back(*lookup(p));
      for (int p : c.del)
        if (auto f = lookup(p)) a.del.push_back(*f);
        else if (auto it = fid.find(atom_names_[static_cast<std::size_t>(p)]); it != fid.end())
          a.del.push_back(it->second);
      for (const auto& [p, q] : c.cond)
        if (auto fp = lookup(p)) a.cond_effects.push_back({*fp, *lookup(q)});
      planrec::detail::sort_unique(a.pre);
      planrec::detail::sort_unique(a.add);
      planrec::detail::sort_unique(a.del);
      // A fluent both added and deleted ends up true.
      std::vector<FluentId> del;
      std::set_difference(a.del.begin(), a.del.end(), a.add.begin(), a.add.end(),
                          std::back_inserter(del));
      a.del = std::move(del);
      std::sort(a.cond_effects.begin(), a.cond_effects.end(), [](const auto& x, const auto& y) {
        return std::pair(x.condition, x.effect) < std::pair(y.condition, y.effect);
      });
      a.cond_effects.erase(std::unique(a.cond_effects.begin(), a.cond_effects.end()),
                           a.cond_effects.end());
      a.cost = c.cost;
      out.actions.push_back(std::move(a));
    }

    if (problem_.goal) out.goal = resolve(*problem_.goal, fid);
    return out;
  }

 public:
  static GoalDescription resolve(const GoalAst& g,
                                 const std::unordered_map<std::string, FluentId>& fid) {
    GoalDescription out;
    for (const auto& a : g.positive) out.positive.push_back(fid.at(a.str()));
    for (const auto& a : g.negative) out.negative.push_back(fid.at(a.str()));
    planrec::detail::sort_unique(out.positive);
    planrec::detail::sort_unique(out.negative);
    return out;
  }

 private:
  const DomainAst& domain_;
  const ProblemAst& problem_;
  const GroundOptions& options_;

  std::unordered_map<std::string, std::string> parent_;
  std::map<std::string, std::vector<std::string>> objects_of_type_;
  std::unordered_set<std::string> static_preds_;
  std::unordered_set<std::string> static_facts_;
  std::unordered_map<std::string, double> function_values_;

  std::unordered_map<std::string, int> atom_ids_;
  std::vector<std::string> atom_names_;
  std::vector<int> init_atoms_;
  std::vector<Candidate> candidates_;
  std::vector<bool> reached_;
  std::vector<bool> live_;
  std::size_t instantiated_ = 0;
};

}  // namespace detail

inline PlanningProblem ground(const DomainAst& domain, const ProblemAst& problem,
                              const GroundOptions& options = {}) {
  return detail::Grounder(domain, problem, options).run();
}

// Maps a goal formula onto fluent ids of an existing grounding. Atoms outside
// the universe are an error; pass them via GroundOptions::extra_fluents.
inline GoalDescription resolve_goal(const PlanningProblem& p, const GoalAst& g) {
  GoalDescription out;
  NameIndex index(p);
  auto id = [&](const Atom& a) {
    auto f = index.fluent(a.str());
    if (!f) throw GroundingError("goal atom " + a.str() + " is not in the fluent universe");
    return *f;
  };
  for (const auto& a : g.positive) out.positive.push_back(id(a));
  for (const auto& a : g.negative) out.negative.push_back(id(a));
  planrec::detail::sort_unique(out.positive);
  planrec::detail::sort_unique(out.negative);
  for (FluentId f : out.positive)
    if (std::binary_search(out.negative.begin(), out.negative.end(), f))
      throw GroundingError("goal requires " + p.fluents[f].name + " to be both true and false");
  return out;
}

// Every atom mentioned by a goal formula, for GroundOptions::extra_fluents.
inline std::vector<std::string> goal_atoms(const GoalAst& g) {
  std::vector<std::string> out;
  for (const auto& a : g.positive) out.push_back(a.str());
  for (const auto& a : g.negative) out.push_back(a.str());
  return out;
}

}  // namespace planrec::pddl
