#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "planrec/error.hpp"
#include "planrec/pddl/ast.hpp"

namespace planrec::pddl {

struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t line = 0;
  std::size_t column = 0;

  bool is(std::string_view s) const { return !is_list && atom == s; }
  bool is_keyword() const { return !is_list && !atom.empty() && atom.front() == ':'; }
};

// Reads whitespace-separated s-expressions. Atoms are lowercased because PDDL
// identifiers are case-insensitive; `;` starts a comment.
class SExprReader {
 public:
  SExprReader(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read_one());
      skip_space();
    }
    return out;
  }

 private:
  SourceLocation here() const { return {file_, line_, col_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read_one() {
    SExpr e;
    e.line = line_;
    e.column = col_;
    const char c = text_[pos_];
    if (c == ')') throw SyntaxError(here(), "unexpected ')'");
    if (c == '(') {
      e.is_list = true;
      advance();
      for (;;) {
        skip_space();
        if (pos_ >= text_.size())
          throw SyntaxError({file_, e.line, e.column}, "unbalanced '(' (missing ')')");
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read_one());
      }
      return e;
    }
    while (pos_ < text_.size()) {
      const char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      e.atom.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(d))));
      advance();
    }
    return e;
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

namespace detail {

inline const std::set<std::string>& supported_requirements() {
  static const std::set<std::string> reqs = {":strips", ":typing", ":negative-preconditions",
                                             ":conditional-effects", ":action-costs"};
  return reqs;
}

inline bool is_variable(const std::string& s) { return !s.empty() && s.front() == '?'; }

inline std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

class Parser {
 public:
  explicit Parser(std::string file) : file_(std::move(file)) {}

  SourceLocation at(const SExpr& e) const { return {file_, e.line, e.column}; }

  [[noreturn]] void unsupported(const SExpr& e, const std::string& feature) const {
    throw UnsupportedFeatureError(at(e), feature);
  }
  [[noreturn]] void syntax(const SExpr& e, const std::string& msg) const {
    throw SyntaxError(at(e), msg);
  }
  [[noreturn]] void semantic(const SExpr& e, const std::string& msg) const {
    throw SemanticError(at(e), msg);
  }

  const std::string& expect_name(const SExpr& e, const char* what) const {
    if (e.is_list || e.atom.empty()) syntax(e, std::string("expected ") + what);
    return e.atom;
  }

  // `a b - t c - u d` ; untyped trailing names default to `object`.
  std::vector<TypedName> typed_list(const std::vector<SExpr>& items, std::size_t begin) const {
    std::vector<TypedName> out;
    std::vector<std::string> pending;
    for (std::size_t i = begin; i < items.size(); ++i) {
      const SExpr& e = items[i];
      if (e.is("-")) {
        if (i + 1 >= items.size()) syntax(e, "missing type after '-'");
        const SExpr& t = items[i + 1];
        if (t.is_list) {
          if (!t.items.empty() && t.items[0].is("either")) unsupported(t, "either");
          syntax(t, "expected type name");
        }
        if (pending.empty()) syntax(e, "type annotation without names");
        for (auto& n : pending) out.push_back({std::move(n), t.atom});
        pending.clear();
        ++i;
        continue;
      }
      pending.push_back(expect_name(e, "name"));
    }
    for (auto& n : pending) out.push_back({std::move(n), "object"});
    return out;
  }

  std::string file_;
};

// Validation context while parsing one action schema.
struct SchemaScope {
  const DomainAst* domain = nullptr;
  std::unordered_map<std::string, std::string> variables;  // var -> type
  std::unordered_set<std::string> constants;
};

class DomainParser : public Parser {
 public:
  using Parser::Parser;

  DomainAst parse(std::string_view text) {
    auto top = SExprReader(text, file_).read_all();
    if (top.size() != 1 || !top[0].is_list) {
      if (top.empty()) throw SyntaxError({file_, 1, 1}, "empty domain file");
      syntax(top.size() > 1 ? top[1] : top[0], "expected a single (define ...) form");
    }
    const SExpr& def = top[0];
    if (def.items.size() < 2 || !def.items[0].is("define")) syntax(def, "expected (define ...)");
    const SExpr& head = def.items[1];
    if (!head.is_list || head.items.size() != 2 || !head.items[0].is("domain"))
      syntax(head, "expected (domain <name>)");

    DomainAst d;
    d.name = expect_name(head.items[1], "domain name");
    for (std::size_t i = 2; i < def.items.size(); ++i) section(d, def.items[i]);
    for (auto& a : pending_actions_) d.actions.push_back(action(d, *a));
    return d;
  }

 private:
  void section(DomainAst& d, const SExpr& s) {
    if (!s.is_list || s.items.empty() || !s.items[0].is_keyword())
      syntax(s, "expected a domain section");
    const std::string& kw = s.items[0].atom;
    if (kw == ":requirements") {
      for (std::size_t i = 1; i < s.items.size(); ++i) {
        const std::string& r = expect_name(s.items[i], "requirement");
        if (!supported_requirements().count(r)) unsupported(s.items[i], r);
        d.requirements.push_back(r);
      }
    } else if (kw == ":types") {
      d.types = typed_list(s.items, 1);
    } else if (kw == ":constants") {
      d.constants = typed_list(s.items, 1);
    } else if (kw == ":predicates") {
      for (std::size_t i = 1; i < s.items.size(); ++i) {
        const SExpr& p = s.items[i];
        if (!p.is_list || p.items.empty()) syntax(p, "expected predicate declaration");
        PredicateDecl decl{expect_name(p.items[0], "predicate name"), typed_list(p.items, 1)};
        if (d.find_predicate(decl.name)) semantic(p, "duplicate predicate " + decl.name);
        d.predicates.push_back(std::move(decl));
      }
    } else if (kw == ":functions") {
      for (std::size_t i = 1; i < s.items.size(); ++i) {
        const SExpr& f = s.items[i];
        if (f.is("-")) {
          if (i + 1 >= s.items.size() || !s.items[i + 1].is("number"))
            unsupported(f, "non-numeric function type");
          ++i;
          continue;
        }
        if (!f.is_list || f.items.empty()) syntax(f, "expected function declaration");
        d.functions.push_back({expect_name(f.items[0], "function name"), typed_list(f.items, 1)});
      }
    } else if (kw == ":action") {
      pending_actions_.push_back(&s);
    } else if (kw == ":durative-action") {
      unsupported(s.items[0], ":durative-action");
    } else if (kw == ":derived") {
      unsupported(s.items[0], ":derived");
    } else {
      unsupported(s.items[0], kw);
    }
  }

  void check_type(const DomainAst& d, const SExpr& where, const std::string& t) const {
    if (t == "object") return;
    for (const auto& decl : d.types)
      if (decl.name == t) return;
    semantic(where, "undeclared type " + t);
  }

  ActionSchema action(const DomainAst& d, const SExpr& s) {
    ActionSchema a;
    a.line = s.line;
    if (s.items.size() < 2) syntax(s, "action without a name");
    a.name = expect_name(s.items[1], "action name");
    SchemaScope scope;
    scope.domain = &d;
    for (const auto& c : d.constants) scope.constants.insert(c.name);

    std::size_t i = 2;
    while (i < s.items.size()) {
      const SExpr& key = s.items[i];
      if (!key.is_keyword()) syntax(key, "expected :parameters, :precondition or :effect");
      if (i + 1 >= s.items.size()) syntax(key, "missing value for " + key.atom);
      const SExpr& val = s.items[i + 1];
      if (key.atom == ":parameters") {
        if (!val.is_list) syntax(val, "expected parameter list");
        a.parameters = typed_list(val.items, 0);
        for (const auto& p : a.parameters) {
          if (!is_variable(p.name)) syntax(val, "parameter " + p.name + " must start with '?'");
          check_type(d, val, p.type);
          scope.variables[p.name] = p.type;
        }
      } else if (key.atom == ":precondition") {
        precondition(scope, val, a.precondition);
      } else if (key.atom == ":effect") {
        effect(scope, val, a.effect, false);
      } else {
        unsupported(key, key.atom);
      }
      i += 2;
    }
    return a;
  }

  Atom atom(const SchemaScope& scope, const SExpr& e, bool function = false) const {
    if (!e.is_list || e.items.empty()) syntax(e, "expected an atom");
    Atom out;
    out.predicate = expect_name(e.items[0], "predicate");
    const PredicateDecl* decl = function ? scope.domain->find_function(out.predicate)
                                         : scope.domain->find_predicate(out.predicate);
    if (!decl)
      semantic(e, std::string(function ? "undeclared function " : "undeclared predicate ") +
                      out.predicate);
    if (decl->parameters.size() + 1 != e.items.size())
      semantic(e, "wrong number of arguments for " + out.predicate);
    for (std::size_t k = 1; k < e.items.size(); ++k) {
      const std::string& arg = expect_name(e.items[k], "argument");
      if (is_variable(arg)) {
        if (!scope.variables.count(arg)) semantic(e.items[k], "unbound variable " + arg);
      } else if (!scope.constants.count(arg)) {
        semantic(e.items[k], "undeclared constant " + arg);
      }
      out.args.push_back(arg);
    }
    return out;
  }

  void precondition(const SchemaScope& scope, const SExpr& e, std::vector<Atom>& out) const {
    if (!e.is_list) syntax(e, "expected a precondition formula");
    if (e.items.empty()) return;
    const SExpr& head = e.items[0];
    if (head.is("and")) {
      for (std::size_t i = 1; i < e.items.size(); ++i) precondition(scope, e.items[i], out);
      return;
    }
    if (head.is("not")) unsupported(head, "negative precondition");
    if (head.is("or") || head.is("imply") || head.is("exists") || head.is("forall") ||
        head.is("="))
      unsupported(head, head.atom);
    out.push_back(atom(scope, e));
  }

  void effect(const SchemaScope& scope, const SExpr& e, EffectAst& out, bool nested_when) const {
    if (!e.is_list) syntax(e, "expected an effect");
    if (e.items.empty()) return;
    const SExpr& head = e.items[0];
    if (head.is("and")) {
      for (std::size_t i = 1; i < e.items.size(); ++i) effect(scope, e.items[i], out, nested_when);
    } else if (head.is("not")) {
      if (e.items.size() != 2) syntax(e, "(not ...) takes one atom");
      out.del.push_back(atom(scope, e.items[1]));
    } else if (head.is("when")) {
      if (e.items.size() != 3) syntax(e, "(when <condition> <effect>) expected");
      out.conditional.push_back(
          {single_literal(scope, e.items[1], "conditional effect with compound condition"),
           single_literal(scope, e.items[2], "conditional effect with compound effect")});
    } else if (head.is("increase")) {
      out.cost = cost(scope, e);
    } else if (head.is("forall")) {
      unsupported(head, "forall");
    } else if (head.is("decrease") || head.is("assign") || head.is("scale-up") ||
               head.is("scale-down")) {
      unsupported(head, "numeric effect " + head.atom);
    } else {
      out.add.push_back(atom(scope, e));
    }
  }

  // A positive atom, optionally wrapped in a one-element (and ...).
  Atom single_literal(const SchemaScope& scope, const SExpr& e, const char* feature) const {
    if (!e.is_list || e.items.empty()) syntax(e, "expected an atom");
    if (e.items[0].is("and")) {
      if (e.items.size() != 2) unsupported(e, feature);
      return single_literal(scope, e.items[1], feature);
    }
    if (e.items[0].is("not") || e.items[0].is("or") || e.items[0].is("forall") ||
        e.items[0].is("exists"))
      unsupported(e.items[0], feature);
    return atom(scope, e);
  }

  CostExpr cost(const SchemaScope& scope, const SExpr& e) const {
    if (e.items.size() != 3) syntax(e, "(increase (total-cost) <value>) expected");
    const SExpr& target = e.items[1];
    if (!target.is_list || target.items.size() != 1 || !target.items[0].is("total-cost"))
      unsupported(e.items[0], "numeric fluents other than total-cost");
    const SExpr& val = e.items[2];
    CostExpr c;
    if (!val.is_list) {
      auto num = parse_number(val.atom);
      if (!num) syntax(val, "expected a number");
      if (*num < 0) semantic(val, "negative action cost");
      c.constant = *num;
    } else {
      c.function = atom(scope, val, true);
    }
    return c;
  }

  std::vector<const SExpr*> pending_actions_;
};

class ProblemParser : public Parser {
 public:
  ProblemParser(std::string file, const DomainAst& domain)
      : Parser(std::move(file)), domain_(domain) {}

  ProblemAst parse(std::string_view text) {
    auto top = SExprReader(text, file_).read_all();
    if (top.size() != 1 || !top[0].is_list) {
      if (top.empty()) throw SyntaxError({file_, 1, 1}, "empty problem file");
      syntax(top.size() > 1 ? top[1] : top[0], "expected a single (define ...) form");
    }
    const SExpr& def = top[0];
    if (def.items.size() < 2 || !def.items[0].is("define")) syntax(def, "expected (define ...)");
    const SExpr& head = def.items[1];
    if (!head.is_list || head.items.size() != 2 || !head.items[0].is("problem"))
      syntax(head, "expected (problem <name>)");

    ProblemAst p;
    p.name = expect_name(head.items[1], "problem name");
    for (const auto& c : domain_.constants) declared_.insert(c.name);

    // Objects first so that :init may precede :objects textually.
    for (std::size_t i = 2; i < def.items.size(); ++i) {
      const SExpr& s = def.items[i];
      if (s.is_list && !s.items.empty() && s.items[0].is(":objects")) {
        p.objects = typed_list(s.items, 1);
        for (const auto& o : p.objects) {
          check_type(s, o.type);
          declared_.insert(o.name);
        }
      }
    }
    for (std::size_t i = 2; i < def.items.size(); ++i) section(p, def.items[i]);
    return p;
  }

  GoalAst goal_formula(const SExpr& e) const {
    GoalAst g;
    goal(e, g, false);
    return g;
  }

  void declare(const std::string& object) { declared_.insert(object); }

 private:
  void check_type(const SExpr& where, const std::string& t) const {
    if (t == "object") return;
    for (const auto& decl : domain_.types)
      if (decl.name == t) return;
    semantic(where, "undeclared type " + t);
  }

  void section(ProblemAst& p, const SExpr& s) {
    if (!s.is_list || s.items.empty() || !s.items[0].is_keyword())
      syntax(s, "expected a problem section");
    const std::string& kw = s.items[0].atom;
    if (kw == ":domain") {
      if (s.items.size() != 2) syntax(s, "expected (:domain <name>)");
      p.domain = expect_name(s.items[1], "domain name");
      if (p.domain != domain_.name)
        semantic(s.items[1], "problem refers to domain " + p.domain + ", expected " + domain_.name);
    } else if (kw == ":objects") {
      // handled in the first pass
    } else if (kw == ":requirements") {
      for (std::size_t i = 1; i < s.items.size(); ++i) {
        const std::string& r = expect_name(s.items[i], "requirement");
        if (!supported_requirements().count(r)) unsupported(s.items[i], r);
      }
    } else if (kw == ":init") {
      for (std::size_t i = 1; i < s.items.size(); ++i) init_item(p, s.items[i]);
    } else if (kw == ":goal") {
      if (s.items.size() != 2) syntax(s, "expected (:goal <formula>)");
      GoalAst g;
      goal(s.items[1], g, false);
      p.goal = std::move(g);
    } else if (kw == ":metric") {
      if (s.items.size() == 3 && s.items[1].is("minimize") && s.items[2].is_list &&
          s.items[2].items.size() == 1 && s.items[2].items[0].is("total-cost")) {
        p.minimize_total_cost = true;
      } else {
        unsupported(s.items[0], ":metric other than (minimize (total-cost))");
      }
    } else {
      unsupported(s.items[0], kw);
    }
  }

  Atom ground_atom(const SExpr& e, bool function) const {
    if (!e.is_list || e.items.empty()) syntax(e, "expected a ground atom");
    Atom a;
    a.predicate = expect_name(e.items[0], "predicate");
    const PredicateDecl* decl =
        function ? domain_.find_function(a.predicate) : domain_.find_predicate(a.predicate);
    if (!decl && !(function && a.predicate == "total-cost"))
      semantic(e, std::string(function ? "undeclared function " : "undeclared predicate ") +
                      a.predicate);
    const std::size_t arity = decl ? decl->parameters.size() : 0;
    if (arity + 1 != e.items.size()) semantic(e, "wrong number of arguments for " + a.predicate);
    for (std::size_t k = 1; k < e.items.size(); ++k) {
      const std::string& arg = expect_name(e.items[k], "object");
      if (is_variable(arg)) semantic(e.items[k], "variable " + arg + " in a ground atom");
      if (!declared_.count(arg)) semantic(e.items[k], "undeclared object " + arg);
      a.args.push_back(arg);
    }
    return a;
  }

  void init_item(ProblemAst& p, const SExpr& e) {
    if (!e.is_list || e.items.empty()) syntax(e, "expected an init atom");
    if (e.items[0].is("=")) {
      if (e.items.size() != 3 || e.items[2].is_list) syntax(e, "expected (= (<function> ...) <number>)");
      auto v = parse_number(e.items[2].atom);
      if (!v) syntax(e.items[2], "expected a number");
      p.init_values.push_back({ground_atom(e.items[1], true), *v});
      return;
    }
    if (e.items[0].is("not")) unsupported(e.items[0], "negative literal in :init");
    p.init.push_back(ground_atom(e, false));
  }

  void goal(const SExpr& e, GoalAst& g, bool negated) const {
    if (!e.is_list) syntax(e, "expected a goal formula");
    if (e.items.empty()) return;
    const SExpr& head = e.items[0];
    if (head.is("and")) {
      if (negated) unsupported(head, "negated conjunction in goal");
      for (std::size_t i = 1; i < e.items.size(); ++i) goal(e.items[i], g, false);
      return;
    }
    if (head.is("not")) {
      if (negated) unsupported(head, "double negation in goal");
      if (e.items.size() != 2) syntax(e, "(not ...) takes one atom");
      goal(e.items[1], g, true);
      return;
    }
    if (head.is("or") || head.is("imply") || head.is("exists") || head.is("forall") ||
        head.is("="))
      unsupported(head, head.atom + " in goal");
    (negated ? g.negative : g.positive).push_back(ground_atom(e, false));
  }

  const DomainAst& domain_;
  std::unordered_set<std::string> declared_;
};

}  // namespace detail

inline DomainAst parse_domain(std::string_view text, const std::string& file = "<domain>") {
  return detail::DomainParser(file).parse(text);
}

// Semantic checks (declared predicates and objects, arities) need the domain.
inline ProblemAst parse_problem(std::string_view text, const DomainAst& domain,
                                const std::string& file = "<problem>") {
  return detail::ProblemParser(file, domain).parse(text);
}

// Parses a stand-alone goal formula such as "(and (f a) (not (g b)))" against a
// problem's objects.
inline GoalAst parse_goal(std::string_view text, const DomainAst& domain, const ProblemAst& problem,
                          const std::string& file = "<goal>") {
  auto exprs = SExprReader(text, file).read_all();
  if (exprs.size() != 1) throw SyntaxError({file, 1, 1}, "expected exactly one goal formula");
  detail::ProblemParser parser(file, domain);
  for (const auto& c : domain.constants) parser.declare(c.name);
  for (const auto& o : problem.objects) parser.declare(o.name);
  return parser.goal_formula(exprs[0]);
}

}  // namespace planrec::pddl
