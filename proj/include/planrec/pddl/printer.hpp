#pragma once

#include <charconv>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "planrec/pddl/ast.hpp"

namespace planrec::pddl {

// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

namespace detail {

inline void print_typed(std::ostream& os, const std::vector<TypedName>& names) {
  bool first = true;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!first) os << ' ';
    first = false;
    os << names[i].name;
    const bool last_of_group = i + 1 == names.size() || names[i + 1].type != names[i].type;
    if (last_of_group) os << " - " << names[i].type;
  }
}

inline void print_conjunction(std::ostream& os, const std::vector<std::string>& parts) {
  if (parts.size() == 1) {
    os << parts[0];
    return;
  }
  os << "(and";
  for (const auto& p : parts) os << ' ' << p;
  os << ')';
}

}  // namespace detail

inline std::string print_domain(const DomainAst& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    os << "  (:requirements";
    for (const auto& r : d.requirements) os << ' ' << r;
    os << ")\n";
  }
  if (!d.types.empty()) {
    os << "  (:types ";
    detail::print_typed(os, d.types);
    os << ")\n";
  }
  if (!d.constants.empty()) {
    os << "  (:constants ";
    detail::print_typed(os, d.constants);
    os << ")\n";
  }
  os << "  (:predicates";
  for (const auto& p : d.predicates) {
    os << "\n    (" << p.name;
    if (!p.parameters.empty()) {
      os << ' ';
      detail::print_typed(os, p.parameters);
    }
    os << ')';
  }
  os << ")\n";
  if (!d.functions.empty()) {
    os << "  (:functions";
    for (const auto& f : d.functions) {
      os << " (" << f.name;
      if (!f.parameters.empty()) {
        os << ' ';
        detail::print_typed(os, f.parameters);
      }
      os << ") - number";
    }
    os << ")\n";
  }
  for (const auto& a : d.actions) {
    os << "  (:action " << a.name << "\n    :parameters (";
    detail::print_typed(os, a.parameters);
    os << ")\n";
    if (!a.precondition.empty()) {
      std::vector<std::string> parts;
      for (const auto& p : a.precondition) parts.push_back(p.str());
      os << "    :precondition ";
      detail::print_conjunction(os, parts);
      os << '\n';
    }
    std::vector<std::string> eff;
    for (const auto& p : a.effect.add) eff.push_back(p.str());
    for (const auto& p : a.effect.del) eff.push_back("(not " + p.str() + ")");
    for (const auto& w : a.effect.conditional)
      eff.push_back("(when " + w.condition.str() + " " + w.effect.str() + ")");
    if (a.effect.cost) {
      const auto& c = *a.effect.cost;
      eff.push_back("(increase (total-cost) " +
                    (c.constant ? format_number(*c.constant) : c.function->str()) + ")");
    }
    os << "    :effect ";
    if (eff.empty())
      os << "(and)";
    else
      detail::print_conjunction(os, eff);
    os << ")\n";
  }
  os << ")\n";
  return os.str();
}

inline std::string print_goal(const GoalAst& g) {
  std::vector<std::string> parts;
  for (const auto& p : g.positive) parts.push_back(p.str());
  for (const auto& p : g.negative) parts.push_back("(not " + p.str() + ")");
  if (parts.empty()) return "(and)";
  std::ostringstream os;
  detail::print_conjunction(os, parts);
  return os.str();
}

inline std::string print_problem(const ProblemAst& p) {
  std::ostringstream os;
  os << "(define (problem " << p.name << ")\n";
  os << "  (:domain " << p.domain << ")\n";
  if (!p.objects.empty()) {
    os << "  (:objects ";
    detail::print_typed(os, p.objects);
    os << ")\n";
  }
  os << "  (:init";
  for (const auto& a : p.init) os << "\n    " << a.str();
  for (const auto& v : p.init_values)
    os << "\n    (= " << v.term.str() << ' ' << format_number(v.value) << ')';
  os << ")\n";
  if (p.goal) os << "  (:goal " << print_goal(*p.goal) << ")\n";
  if (p.minimize_total_cost) os << "  (:metric minimize (total-cost))\n";
  os << ")\n";
  return os.str();
}

}  // namespace planrec::pddl
