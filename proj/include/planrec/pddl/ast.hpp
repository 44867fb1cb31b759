#pragma once

#include <optional>
#include <string>
#include <vector>

namespace planrec::pddl {

struct TypedName {
  std::string name;
  std::string type = "object";
  friend bool operator==(const TypedName&, const TypedName&) = default;
};

// Predicate or function application. Arguments starting with '?' are variables.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  std::string str() const {
    std::string s = "(" + predicate;
    for (const auto& a : args) s += " " + a;
    return s + ")";
  }
  friend bool operator==(const Atom&, const Atom&) = default;
};

// `(increase (total-cost) <constant | function term>)`
struct CostExpr {
  std::optional<double> constant;
  std::optional<Atom> function;
  friend bool operator==(const CostExpr&, const CostExpr&) = default;
};

struct WhenEffect {
  Atom condition;
  Atom effect;
  friend bool operator==(const WhenEffect&, const WhenEffect&) = default;
};

struct EffectAst {
  std::vector<Atom> add;
  std::vector<Atom> del;
  std::vector<WhenEffect> conditional;
  std::optional<CostExpr> cost;
  friend bool operator==(const EffectAst&, const EffectAst&) = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> parameters;
  std::vector<Atom> precondition;
  EffectAst effect;
  std::size_t line = 0;
  friend bool operator==(const ActionSchema& a, const ActionSchema& b) {
    return a.name == b.name && a.parameters == b.parameters &&
           a.precondition == b.precondition && a.effect == b.effect;
  }
};

struct PredicateDecl {
  std::string name;
  std::vector<TypedName> parameters;
  friend bool operator==(const PredicateDecl&, const PredicateDecl&) = default;
};

struct DomainAst {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<TypedName> types;  // name with parent type
  std::vector<TypedName> constants;
  std::vector<PredicateDecl> predicates;
  std::vector<PredicateDecl> functions;
  std::vector<ActionSchema> actions;

  const PredicateDecl* find_predicate(const std::string& n) const {
    for (const auto& p : predicates)
      if (p.name == n) return &p;
    return nullptr;
  }
  const PredicateDecl* find_function(const std::string& n) const {
    for (const auto& p : functions)
      if (p.name == n) return &p;
    return nullptr;
  }
  friend bool operator==(const DomainAst&, const DomainAst&) = default;
};

struct FunctionValue {
  Atom term;
  double value = 0.0;
  friend bool operator==(const FunctionValue&, const FunctionValue&) = default;
};

struct GoalAst {
  std::vector<Atom> positive;
  std::vector<Atom> negative;
  friend bool operator==(const GoalAst&, const GoalAst&) = default;
};

struct ProblemAst {
  std::string name;
  std::string domain;
  std::vector<TypedName> objects;
  std::vector<Atom> init;
  std::vector<FunctionValue> init_values;
  std::optional<GoalAst> goal;
  bool minimize_total_cost = false;
  friend bool operator==(const ProblemAst&, const ProblemAst&) = default;
};

}  // namespace planrec::pddl
