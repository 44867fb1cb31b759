#pragma once

#include <array>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "planrec/nbm.hpp"
#include "planrec/pddl/grounder.hpp"
#include "planrec/pddl/parser.hpp"

namespace planrec::benchkit {

struct GoalSpec {
  std::string name;
  std::string formula;  // PDDL goal formula
};

// A flat with living room, kitchen, hallway, bathroom and bedroom on an
// 8-connected grid, plus the beer scenario observed in it.
struct BucBundle {
  std::string domain;
  std::string problem;
  std::vector<GoalSpec> goals;
  std::vector<std::string> e1;  // 28 beer actions followed by the 6-action suffix
  std::vector<std::string> e2;  // the suffix alone
  NaiveBayesModel nbm_fixture;
  std::size_t true_goal = 3;
};

namespace detail {

// '#' is a wall; every other cell carries a name in kCellNames.
inline constexpr std::array<const char*, 8> kBucMap = {
    "##########",  //
    "##LLL.KKK#",  //
    "#LLLL.KKK#",  //
    "#LLLL#.###",  //
    "#HHHHHHHH#",  //
    "#E.#.#BBB#",  //
    "#EE#.BBBB#",  //
    "##########",
};

inline const std::map<std::pair<int, int>, std::string>& buc_cell_names() {
  static const std::map<std::pair<int, int>, std::string> names = [] {
    std::map<std::pair<int, int>, std::string> m;
    const char* rows[8][10] = {
        {},
        {nullptr, nullptr, "l1", "l2", "l3", "lk1", "k1", "k2", "k3", nullptr},
        {nullptr, "l4", "l5", "l6", "l7", "lk2", "k4", "k5", "k6", nullptr},
        {nullptr, "l8", "l9", "l10", "l11", nullptr, "kh1", nullptr, nullptr, nullptr},
        {nullptr, "h1", "h2", "h3", "h4", "h5", "h6", "h7", "h8", nullptr},
        {nullptr, "be1", "be2", nullptr, "ba1", nullptr, "ba3", "ba4", "ba5", nullptr},
        {nullptr, "be3", "be4", nullptr, "ba2", "ba6", "ba7", "ba8", "ba9", nullptr},
        {},
    };
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 10; ++x)
        if (rows[y][x]) m[{x, y}] = rows[y][x];
    return m;
  }();
  return names;
}

inline bool buc_free(int x, int y) {
  if (y < 0 || y >= 8 || x < 0 || x >= 10) return false;
  return kBucMap[static_cast<std::size_t>(y)][x] != '#';
}

}  // namespace detail

inline constexpr const char* kBucDomain = R"((define (domain beer-use-case)
  (:requirements :strips :typing)
  (:types cell beer)
  (:predicates
    (at ?c - cell)
    (adjacent ?a ?b - cell)
    (standing)
    (sitting)
    (couch-at ?c - cell)
    (fridge-at ?c - cell)
    (stove-at ?c - cell)
    (toilet-at ?c - cell)
    (shower-at ?c - cell)
    (tv-on)
    (tv-off)
    (in-fridge ?b - beer)
    (holding ?b - beer)
    (hand-empty)
    (opened ?b - beer)
    (drunk ?b - beer)
    (meal-prepared)
    (toilet-used)
    (showered))
  (:action move
    :parameters (?from ?to - cell)
    :precondition (and (at ?from) (adjacent ?from ?to) (standing))
    :effect (and (at ?to) (not (at ?from))))
  (:action sit-down
    :parameters (?c - cell)
    :precondition (and (at ?c) (couch-at ?c) (standing))
    :effect (and (sitting) (not (standing))))
  (:action stand-up
    :parameters ()
    :precondition (sitting)
    :effect (and (standing) (not (sitting))))
  (:action turn-on-tv
    :parameters ()
    :precondition (and (sitting) (tv-off))
    :effect (and (tv-on) (not (tv-off))))
  (:action turn-off-tv
    :parameters ()
    :precondition (and (sitting) (tv-on))
    :effect (and (tv-off) (not (tv-on))))
  (:action take-beer
    :parameters (?b - beer ?c - cell)
    :precondition (and (at ?c) (fridge-at ?c) (in-fridge ?b) (hand-empty) (standing))
    :effect (and (holding ?b) (not (in-fridge ?b)) (not (hand-empty))))
  (:action open-beer
    :parameters (?b - beer)
    :precondition (holding ?b)
    :effect (opened ?b))
  (:action drink-beer
    :parameters (?b - beer)
    :precondition (and (holding ?b) (opened ?b))
    :effect (and (drunk ?b) (hand-empty) (not (holding ?b))))
  (:action prepare-meal
    :parameters (?c - cell)
    :precondition (and (at ?c) (stove-at ?c) (standing))
    :effect (meal-prepared))
  (:action use-toilet
    :parameters (?c - cell)
    :precondition (and (at ?c) (toilet-at ?c) (standing))
    :effect (toilet-used))
  (:action take-shower
    :parameters (?c - cell)
    :precondition (and (at ?c) (shower-at ?c) (standing))
    :effect (showered))
)
)";

inline std::string buc_problem_text() {
  const auto& names = detail::buc_cell_names();
  std::ostringstream os;
  os << "(define (problem beer-use-case-flat)\n  (:domain beer-use-case)\n  (:objects";
  for (const auto& [xy, n] : names) os << ' ' << n;
  os << " - cell\n    beer1 beer2 - beer)\n  (:init\n";
  os << "    (at l3) (standing) (tv-off) (hand-empty)\n";
  os << "    (couch-at l3) (fridge-at k3) (stove-at k4) (toilet-at ba3) (shower-at ba9)\n";
  os << "    (in-fridge beer1) (in-fridge beer2)\n";
  for (const auto& [xy, from] : names) {
    const auto [x, y] = xy;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        if (!detail::buc_free(x + dx, y + dy)) continue;
        // Diagonal steps may not cut a wall corner.
        if (dx != 0 && dy != 0 && (!detail::buc_free(x + dx, y) || !detail::buc_free(x, y + dy)))
          continue;
        os << "    (adjacent " << from << ' ' << names.at({x + dx, y + dy}) << ")\n";
      }
  }
  os << "  )\n  (:goal (toilet-used))\n)\n";
  return os.str();
}

inline std::vector<std::string> buc_beer_prefix() {
  std::vector<std::string> out;
  const std::vector<std::string> there = {"(move l3 lk1)", "(move lk1 k1)", "(move k1 k2)",
                                          "(move k2 k3)"};
  const std::vector<std::string> back = {"(move k3 k2)", "(move k2 k1)", "(move k1 lk1)",
                                         "(move lk1 l3)"};
  auto add = [&](const std::vector<std::string>& v) { out.insert(out.end(), v.begin(), v.end()); };
  add(there);
  out.push_back("(take-beer beer1 k3)");
  add(back);
  add({"(sit-down l3)", "(turn-on-tv)", "(open-beer beer1)", "(drink-beer beer1)", "(stand-up)"});
  add(there);
  out.push_back("(take-beer beer2 k3)");
  add(back);
  add({"(sit-down l3)", "(open-beer beer2)", "(drink-beer beer2)", "(turn-off-tv)", "(stand-up)"});
  return out;
}

inline std::vector<std::string> buc_suffix() {
  return {"(move l3 lk1)", "(move lk1 k4)", "(move k4 kh1)",
          "(move kh1 h6)", "(move h6 ba3)", "(use-toilet ba3)"};
}

inline std::vector<GoalSpec> buc_goals() {
  return {{"g_prepare_meal", "(meal-prepared)"},
          {"g_watch_TV", "(and (sitting) (tv-on))"},
          {"g_use_shower", "(showered)"},
          {"g_use_toilet", "(toilet-used)"}};
}

// Hand-set parameters: every P(F|g) is 1/2 except the couch position, which
// marks watching TV, and the drunk beers, which point to the toilet.
inline NaiveBayesModel buc_nbm_fixture(const PlanningProblem& grounded) {
  NaiveBayesModel m;
  m.alpha = 1.0;
  for (const auto& g : buc_goals()) m.goal_names.push_back(g.name);
  for (const auto& f : grounded.fluents) m.fluent_names.push_back(f.name);
  const std::size_t G = m.goal_names.size();
  const std::size_t N = m.fluent_names.size();
  m.class_counts.assign(G, 0);
  m.log_p_true.assign(G, std::vector<double>(N, std::log(0.5)));
  m.log_p_false.assign(G, std::vector<double>(N, std::log(0.5)));
  auto set = [&](const std::string& fluent, std::size_t goal, double p) {
    for (std::size_t f = 0; f < N; ++f)
      if (m.fluent_names[f] == fluent) {
        m.log_p_true[goal][f] = std::log(p);
        m.log_p_false[goal][f] = std::log(1.0 - p);
        return;
      }
    throw Error("fixture fluent " + fluent + " is missing from the grounding");
  };
  for (std::size_t g = 0; g < G; ++g) {
    set("(at l3)", g, g == 1 ? 0.9 : 0.1);
    set("(drunk beer1)", g, g == 3 ? 0.8 : 0.3);
    set("(drunk beer2)", g, g == 3 ? 0.8 : 0.3);
  }
  return m;
}

inline std::vector<std::string> goal_atoms_of(const pddl::DomainAst& d, const pddl::ProblemAst& p,
                                              const std::vector<GoalSpec>& goals) {
  std::vector<std::string> atoms;
  for (const auto& g : goals) {
    auto ga = pddl::parse_goal(g.formula, d, p);
    for (auto& a : pddl::goal_atoms(ga)) atoms.push_back(std::move(a));
  }
  return atoms;
}

inline BucBundle gen_buc() {
  BucBundle b;
  b.domain = kBucDomain;
  b.problem = buc_problem_text();
  b.goals = buc_goals();
  b.e2 = buc_suffix();
  b.e1 = buc_beer_prefix();
  b.e1.insert(b.e1.end(), b.e2.begin(), b.e2.end());

  const auto d = pddl::parse_domain(b.domain, "domain.pddl");
  const auto p = pddl::parse_problem(b.problem, d, "problem.pddl");
  pddl::GroundOptions opt;
  opt.extra_fluents = goal_atoms_of(d, p, b.goals);
  b.nbm_fixture = buc_nbm_fixture(pddl::ground(d, p, opt));
  return b;
}

}  // namespace planrec::benchkit
