#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "planrec/planrec.hpp"

namespace planrec::testing_support {

inline PlanningProblem ground_text(const std::string& domain, const std::string& problem) {
  const auto d = pddl::parse_domain(domain, "domain.pddl");
  const auto p = pddl::parse_problem(problem, d, "problem.pddl");
  return pddl::ground(d, p);
}

// n x n grid with 4-connected moves, agent at (0,0), goal at (n-1,n-1).
inline std::string grid_domain() {
  return R"((define (domain grid)
  (:requirements :strips :typing)
  (:types cell)
  (:predicates (at ?c - cell) (adj ?a ?b - cell))
  (:action move
    :parameters (?a ?b - cell)
    :precondition (and (at ?a) (adj ?a ?b))
    :effect (and (at ?b) (not (at ?a)))))
)";
}

inline std::string cell(int x, int y) { return "c" + std::to_string(x) + "_" + std::to_string(y); }

inline std::string grid_problem(int n, const std::vector<std::pair<int, int>>& walls = {}) {
  auto wall = [&](int x, int y) {
    for (auto [wx, wy] : walls)
      if (wx == x && wy == y) return true;
    return false;
  };
  std::string s = "(define (problem g) (:domain grid) (:objects";
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) s += " " + cell(x, y);
  s += " - cell) (:init (at " + cell(0, 0) + ")";
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      if (wall(x, y)) continue;
      const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        if (nx < 0 || ny < 0 || nx >= n || ny >= n || wall(nx, ny)) continue;
        s += " (adj " + cell(x, y) + " " + cell(nx, ny) + ")";
      }
    }
  s += ") (:goal (at " + cell(n - 1, n - 1) + ")))";
  return s;
}

// Breadth-first distance on the same grid, computed on coordinates.
inline int grid_bfs(int n, const std::vector<std::pair<int, int>>& walls = {}) {
  std::vector<int> dist(static_cast<std::size_t>(n * n), -1);
  auto blocked = [&](int x, int y) {
    for (auto [wx, wy] : walls)
      if (wx == x && wy == y) return true;
    return false;
  };
  std::queue<std::pair<int, int>> q;
  dist[0] = 0;
  q.push({0, 0});
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop();
    const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int nx = x + dx[k], ny = y + dy[k];
      if (nx < 0 || ny < 0 || nx >= n || ny >= n || blocked(nx, ny)) continue;
      auto& d = dist[static_cast<std::size_t>(ny * n + nx)];
      if (d >= 0) continue;
      d = dist[static_cast<std::size_t>(y * n + x)] + 1;
      q.push({nx, ny});
    }
  }
  return dist.back();
}

// Corridor of `len` cells; the agent walks from the first to the last cell.
inline std::string corridor_domain() {
  return R"((define (domain corridor)
  (:requirements :strips :typing)
  (:types cell)
  (:predicates (at ?c - cell) (next ?a ?b - cell) (visited ?c - cell))
  (:action step
    :parameters (?a ?b - cell)
    :precondition (and (at ?a) (next ?a ?b))
    :effect (and (at ?b) (visited ?b) (not (at ?a))))
  (:action wait
    :parameters (?a - cell)
    :precondition (at ?a)
    :effect (visited ?a)))
)";
}

inline std::string corridor_problem(int len) {
  std::string s = "(define (problem c) (:domain corridor) (:objects";
  for (int i = 0; i < len; ++i) s += " p" + std::to_string(i);
  s += " - cell) (:init (at p0)";
  for (int i = 0; i + 1 < len; ++i) {
    s += " (next p" + std::to_string(i) + " p" + std::to_string(i + 1) + ")";
    s += " (next p" + std::to_string(i + 1) + " p" + std::to_string(i) + ")";
  }
  s += ") (:goal (at p" + std::to_string(len - 1) + ")))";
  return s;
}

// --- Random small problems with a bitmask oracle ---------------------------------

struct MaskAction {
  std::uint32_t pre = 0, add = 0, del = 0;
  std::vector<std::pair<int, int>> cond;
  double cost = 1.0;
};

struct MaskProblem {
  int n = 0;
  std::uint32_t init = 0, goal_pos = 0, goal_neg = 0;
  std::vector<MaskAction> actions;
};

inline std::uint32_t mask_apply(std::uint32_t s, const MaskAction& a) {
  std::uint32_t out = s | a.add;
  for (auto [p, q] : a.cond)
    if (s & (1U << p)) out |= 1U << q;
  return out & ~a.del;
}

inline MaskProblem random_mask_problem(std::mt19937_64& rng, bool with_extras) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  MaskProblem p;
  p.n = pick(3, 12);
  auto subset = [&](int k) {
    std::uint32_t m = 0;
    for (int i = 0; i < k; ++i) m |= 1U << pick(0, p.n - 1);
    return m;
  };
  p.init = subset(pick(1, 3));
  p.goal_pos = subset(pick(1, 3)) & ~p.init;
  if (p.goal_pos == 0) p.goal_pos = 1U << pick(0, p.n - 1);
  if (with_extras && pick(0, 3) == 0) {
    const std::uint32_t neg = (1U << pick(0, p.n - 1)) & ~p.goal_pos;
    p.goal_neg = neg;
  }
  const int m = pick(3, 16);
  for (int i = 0; i < m; ++i) {
    MaskAction a;
    a.pre = subset(pick(0, 2));
    a.add = subset(pick(1, 2));
    a.del = subset(pick(0, 2)) & ~a.add;
    if (with_extras && pick(0, 4) == 0) a.cond.push_back({pick(0, p.n - 1), pick(0, p.n - 1)});
    const int c = pick(0, 6);
    a.cost = c == 0 ? 0.0 : (c == 6 && with_extras ? 1.5 : static_cast<double>(1 + c % 3));
    p.actions.push_back(a);
  }
  return p;
}

inline std::vector<FluentId> mask_ids(std::uint32_t m) {
  std::vector<FluentId> out;
  for (FluentId i = 0; i < 32; ++i)
    if (m & (1U << i)) out.push_back(i);
  return out;
}

inline PlanningProblem to_problem(const MaskProblem& mp) {
  PlanningProblem p;
  for (int i = 0; i < mp.n; ++i)
    p.fluents.push_back({static_cast<FluentId>(i), "(f" + std::string(i < 10 ? "0" : "") + std::to_string(i) + ")"});
  for (std::size_t i = 0; i < mp.actions.size(); ++i) {
    const auto& ma = mp.actions[i];
    GroundAction a;
    a.id = static_cast<ActionId>(i);
    a.name = "(a" + std::string(i < 10 ? "0" : "") + std::to_string(i) + ")";
    a.schema = "a";
    a.pre = mask_ids(ma.pre);
    a.add = mask_ids(ma.add);
    a.del = mask_ids(ma.del);
    for (auto [c, e] : ma.cond) a.cond_effects.push_back({static_cast<FluentId>(c), static_cast<FluentId>(e)});
    a.cost = ma.cost;
    p.actions.push_back(std::move(a));
  }
  p.init = State(static_cast<std::size_t>(mp.n), mask_ids(mp.init));
  p.goal.positive = mask_ids(mp.goal_pos);
  p.goal.negative = mask_ids(mp.goal_neg);
  return p;
}

// Dijkstra over the explicit state graph; +inf when the goal is unreachable.
inline double mask_dijkstra(const MaskProblem& p) {
  const std::size_t N = std::size_t{1} << p.n;
  std::vector<double> dist(N, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  dist[p.init] = 0.0;
  q.push({0.0, p.init});
  while (!q.empty()) {
    auto [d, s] = q.top();
    q.pop();
    if (d > dist[s]) continue;
    if ((s & p.goal_pos) == p.goal_pos && (s & p.goal_neg) == 0) return d;
    for (const auto& a : p.actions) {
      if ((s & a.pre) != a.pre) continue;
      const std::uint32_t t = mask_apply(s, a);
      if (d + a.cost < dist[t]) {
        dist[t] = d + a.cost;
        q.push({dist[t], t});
      }
    }
  }
  return std::numeric_limits<double>::infinity();
}

inline bool is_subsequence(const std::vector<ActionId>& needle, const std::vector<ActionId>& hay) {
  std::size_t i = 0;
  for (ActionId a : hay)
    if (i < needle.size() && needle[i] == a) ++i;
  return i == needle.size();
}

inline ObservationSequence resolve(const PlanningProblem& p, const std::vector<std::string>& names) {
  return resolve_observations(p, names);
}

inline const benchkit::LoadedProblem& buc_loaded() {
  static const benchkit::LoadedProblem lp = [] {
    const auto b = benchkit::gen_buc();
    return benchkit::load_problem_text(b.domain, b.problem, benchkit::GoalSet{b.goals, {}});
  }();
  return lp;
}

inline RecognitionTask buc_task(const std::vector<std::string>& obs) {
  const auto& lp = buc_loaded();
  return RecognitionTask{lp.problem, lp.goal_names, lp.goals, lp.priors, resolve(*lp.problem, obs)};
}

inline RecognitionConfig optimal_config() {
  RecognitionConfig cfg;
  cfg.mode = SearchMode::Optimal;
  cfg.budget = SearchBudget::unlimited();
  return cfg;
}

// Goal indices 0..3: prepare meal, watch TV, shower, toilet.
inline const std::vector<std::vector<std::size_t>>& buc_expected_argmax() {
  static const std::vector<std::vector<std::size_t>> v = {
      {0, 1, 2, 3}, {0, 2, 3}, {0, 2, 3}, {2, 3}, {2, 3}, {3}, {3}};
  return v;
}

}  // namespace planrec::testing_support
