#pragma once

#include <atomic>
#include <cstdio>
#include <functional>
#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "planrec/benchkit/dataset.hpp"
#include "planrec/benchkit/metrics.hpp"
#include "planrec/hybrid.hpp"
#include "planrec/nbm.hpp"
#include "planrec/recognizer.hpp"

namespace planrec::benchkit {

enum class Method { Rg, Gm, Nbm, Ws, Tb };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Rg: return "rg";
    case Method::Gm: return "gm";
    case Method::Nbm: return "nbm";
    case Method::Ws: return "ws";
    case Method::Tb: return "tb";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "rg") return Method::Rg;
  if (s == "gm") return Method::Gm;
  if (s == "nbm") return Method::Nbm;
  if (s == "ws") return Method::Ws;
  if (s == "tb") return Method::Tb;
  throw Error("unknown method '" + s + "' (expected rg, gm, nbm, ws or tb)");
}

struct ExperimentConfig {
  std::vector<Method> methods = {Method::Gm, Method::Nbm, Method::Ws, Method::Tb};
  std::vector<std::size_t> n_grid = {1, 3, 5};
  WeightSchedule schedule = parse_schedule("log");
  std::uint64_t seed = 7;
  RecognitionConfig recognition = [] {
    RecognitionConfig c;
    c.mode = SearchMode::Optimal;
    c.budget = SearchBudget::expansions(200'000);
    return c;
  }();
  double alpha = 1.0;
  std::size_t jobs = 1;
};

struct ReportRow {
  Method method = Method::Gm;
  std::size_t n = 0;
  int lambda_percent = 0;
  double accuracy = 0.0;
  std::size_t fold_count = 0;
};

struct ReportFailure {
  std::string method;
  std::size_t n = 0;  // 0 when the failure is not tied to a training size
  std::string item;
  std::string message;
};

struct ExperimentReport {
  std::string dataset;
  std::vector<ReportRow> rows;
  std::vector<ReportFailure> failures;
  std::uint64_t planner_calls = 0;
  std::size_t items = 0;

  // Accuracy for one cell; throws when the cell was not produced.
  double at(Method m, std::size_t n, int percent) const {
    for (const auto& r : rows)
      if (r.method == m && r.n == n && r.lambda_percent == percent) return r.accuracy;
    throw Error(std::string("no report row for ") + to_string(m) + " n=" + std::to_string(n) +
                " lambda=" + std::to_string(percent) + "%");
  }
};

inline std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string report_csv(const ExperimentReport& r) {
  std::string out = "method,n,lambda,accuracy,fold_count\n";
  for (const auto& row : r.rows) {
    out += to_string(row.method);
    out += ',' + std::to_string(row.n) + ',' + format_fixed6(row.lambda_percent / 100.0) + ',' +
           format_fixed6(row.accuracy) + ',' + std::to_string(row.fold_count) + '\n';
  }
  return out;
}

inline std::string report_json(const ExperimentReport& r, const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["format"] = "planrec-report/1";
  j["dataset"] = r.dataset;
  j["items"] = r.items;
  auto& c = j["config"];
  std::vector<std::string> methods;
  for (auto m : cfg.methods) methods.push_back(to_string(m));
  c["methods"] = methods;
  c["n"] = cfg.n_grid;
  c["schedule"] = cfg.schedule.name;
  c["seed"] = cfg.seed;
  c["mode"] = to_string(cfg.recognition.mode);
  c["beta"] = cfg.recognition.beta;
  c["tie_epsilon"] = cfg.recognition.tie_epsilon;
  if (cfg.recognition.budget.expansion_limit) c["expansion_limit"] = *cfg.recognition.budget.expansion_limit;
  if (cfg.recognition.budget.wall_time_limit.count() != kInfiniteCost)
    c["timeout_s"] = cfg.recognition.budget.wall_time_limit.count();
  c["alpha"] = cfg.alpha;
  j["planner_calls"] = r.planner_calls;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"method", to_string(row.method)},
                    {"n", row.n},
                    {"lambda", row.lambda_percent / 100.0},
                    {"accuracy", row.accuracy},
                    {"fold_count", row.fold_count}});
  auto& fails = j["failures"] = nlohmann::ordered_json::array();
  for (const auto& f : r.failures)
    fails.push_back({{"method", f.method}, {"n", f.n}, {"item", f.item}, {"message", f.message}});
  return j.dump(2) + "\n";
}

namespace detail {

inline void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(jobs, count); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

inline bool wants(const ExperimentConfig& cfg, Method m) {
  return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
}

// Posteriors of one method on one item; empty when recognition failed.
using Series = std::vector<GoalPosterior>;

struct PrapResults {
  std::vector<Series> series;
  std::vector<std::string> errors;  // per item, empty on success
};

inline PrapResults run_prap(const Dataset& ds, const ExperimentConfig& cfg, Method m,
                            std::uint64_t& calls) {
  PrapResults out;
  const std::size_t D = ds.items.size();
  out.series.resize(D);
  out.errors.resize(D);
  std::vector<std::uint64_t> item_calls(D, 0);
  std::vector<std::unique_ptr<Planner>> planners;
  for (const auto& lp : ds.problems) planners.push_back(std::make_unique<Planner>(*lp.problem));
  SolveCache cache;
  parallel_for(D, cfg.jobs, [&](std::size_t i) {
    const DatasetItem& item = ds.items[i];
    const LoadedProblem& lp = ds.problems[item.problem];
    RecognitionTask task{lp.problem, lp.goal_names, lp.goals, lp.priors, item.observations};
    try {
      RecognitionTrace tr = m == Method::Rg ? recognize_online_rg(task, cfg.recognition)
                                            : recognize_online_gm(task, cfg.recognition, &cache,
                                                                  planners[item.problem].get());
      for (auto& s : tr.steps) out.series[i].push_back(std::move(s.posterior));
      item_calls[i] = tr.planner_calls();
    } catch (const std::exception& e) {
      out.errors[i] = e.what();
    }
  });
  for (auto c : item_calls) calls += c;
  return out;
}

struct NbmSpace {
  std::vector<std::string> goal_names;
  std::vector<std::string> fluent_names;             // sorted union over problems
  std::vector<std::vector<FluentId>> column;         // per problem: fluent -> union id
  std::vector<std::vector<State>> item_states;       // per item, t = 0..T
};

inline NbmSpace build_nbm_space(const Dataset& ds) {
  NbmSpace sp;
  if (ds.problems.empty()) throw Error("dataset without problems");
  sp.goal_names = ds.problems.front().goal_names;
  for (const auto& lp : ds.problems)
    if (lp.goal_names != sp.goal_names)
      throw Error("the learned model needs every problem to share one goal set");
  std::set<std::string> names;
  for (const auto& lp : ds.problems)
    for (const auto& f : lp.problem->fluents) names.insert(f.name);
  sp.fluent_names.assign(names.begin(), names.end());
  std::map<std::string, FluentId> index;
  for (std::size_t i = 0; i < sp.fluent_names.size(); ++i)
    index.emplace(sp.fluent_names[i], static_cast<FluentId>(i));
  for (const auto& lp : ds.problems) {
    std::vector<FluentId> col;
    for (const auto& f : lp.problem->fluents) col.push_back(index.at(f.name));
    sp.column.push_back(std::move(col));
  }
  for (const auto& item : ds.items)
    sp.item_states.push_back(states_along(*ds.problems[item.problem].problem, item.observations.actions));
  return sp;
}

inline State to_union(const NbmSpace& sp, std::size_t problem, const State& s) {
  State out(sp.fluent_names.size());
  for (FluentId f : s.members()) out.set(sp.column[problem][f]);
  return out;
}

}  // namespace detail

// Fits one model on every sequence of the dataset.
inline NaiveBayesModel train_nbm_on_dataset(const Dataset& ds, double alpha = 1.0) {
  const detail::NbmSpace sp = detail::build_nbm_space(ds);
  std::vector<TrainingSequence> train;
  for (std::size_t i = 0; i < ds.items.size(); ++i) {
    TrainingSequence ts;
    ts.goal_label = ds.items[i].true_goal;
    for (const State& s : sp.item_states[i]) ts.states.push_back(detail::to_union(sp, ds.items[i].problem, s));
    train.push_back(std::move(ts));
  }
  return fit_nbm(train, sp.goal_names, sp.fluent_names, alpha);
}

// Cross-validated accuracy for every requested (method, n, lambda). PRAP
// traces are computed once per item; the learned model is refit per fold.
inline ExperimentReport run_experiment(const Dataset& ds, const ExperimentConfig& cfg) {
  if (cfg.methods.empty()) throw Error("no methods requested");
  if (cfg.n_grid.empty()) throw Error("no training sizes requested");
  ExperimentReport report;
  report.dataset = ds.name;
  report.items = ds.items.size();
  const std::size_t D = ds.items.size();
  if (D == 0) throw Error("dataset without observation sequences");
  const double eps = cfg.recognition.tie_epsilon;

  const bool need_gm = detail::wants(cfg, Method::Gm) || detail::wants(cfg, Method::Ws) ||
                       detail::wants(cfg, Method::Tb);
  const bool need_nbm = detail::wants(cfg, Method::Nbm) || detail::wants(cfg, Method::Ws) ||
                        detail::wants(cfg, Method::Tb);

  std::map<Method, detail::PrapResults> prap;
  if (detail::wants(cfg, Method::Rg)) prap[Method::Rg] = detail::run_prap(ds, cfg, Method::Rg, report.planner_calls);
  if (need_gm) prap[Method::Gm] = detail::run_prap(ds, cfg, Method::Gm, report.planner_calls);
  for (const auto& [m, res] : prap)
    for (std::size_t i = 0; i < D; ++i)
      if (!res.errors[i].empty()) report.failures.push_back({to_string(m), 0, ds.items[i].source, res.errors[i]});

  std::optional<detail::NbmSpace> space;
  if (need_nbm) {
    try {
      space = detail::build_nbm_space(ds);
    } catch (const std::exception& e) {
      for (auto m : cfg.methods)
        if (m == Method::Nbm || m == Method::Ws || m == Method::Tb)
          report.failures.push_back({to_string(m), 0, "", e.what()});
    }
  }

  const auto grid = lambda_grid_percent();
  for (std::size_t n : cfg.n_grid) {
    CvPlan plan;
    try {
      plan = make_cv_plan(D, n, cfg.seed + n);
    } catch (const std::exception& e) {
      for (auto m : cfg.methods) report.failures.push_back({to_string(m), n, "", e.what()});
      continue;
    }
    // sums[method][lambda index]
    std::map<Method, std::vector<double>> sums;
    std::map<Method, bool> usable;
    for (auto m : cfg.methods) {
      sums[m].assign(grid.size(), 0.0);
      const bool learned = m == Method::Nbm || m == Method::Ws || m == Method::Tb;
      usable[m] = !learned || space.has_value();
    }

    for (const auto& fold : plan.folds) {
      std::optional<NaiveBayesModel> model;
      if (space) {
        std::vector<TrainingSequence> train;
        for (std::size_t i : fold.train) {
          TrainingSequence ts;
          ts.goal_label = ds.items[i].true_goal;
          for (const State& s : space->item_states[i]) ts.states.push_back(detail::to_union(*space, ds.items[i].problem, s));
          train.push_back(std::move(ts));
        }
        model = fit_nbm(train, space->goal_names, space->fluent_names, cfg.alpha);
      }

      for (auto m : cfg.methods) {
        if (!usable[m]) continue;
        std::vector<ScoredSeries> scored;
        for (std::size_t i : fold.validation) {
          const DatasetItem& item = ds.items[i];
          const LoadedProblem& lp = ds.problems[item.problem];
          ScoredSeries ss;
          ss.true_goal = item.true_goal;
          if (m == Method::Rg || m == Method::Gm) {
            for (const auto& p : prap.at(m).series[i]) ss.probs.push_back(p.probs);
          } else {
            const NbmPredictor predictor(*model, *lp.problem);
            const auto& states = space->item_states[i];
            const detail::Series* gm = m == Method::Nbm ? nullptr : &prap.at(Method::Gm).series[i];
            if (gm && gm->empty()) {
              scored.push_back(std::move(ss));
              continue;
            }
            for (std::size_t t = 0; t < states.size(); ++t) {
              GoalPosterior pd = predictor.predict(states[t], lp.priors);
              if (m == Method::Nbm) {
                ss.probs.push_back(std::move(pd.probs));
                continue;
              }
              const double wd = cfg.schedule.nbm(static_cast<double>(n), static_cast<double>(t));
              GoalPosterior comb = m == Method::Ws ? combine_ws((*gm)[t], pd, wd)
                                                   : combine_tb((*gm)[t], pd, wd, eps);
              ss.probs.push_back(std::move(comb.probs));
            }
          }
          scored.push_back(std::move(ss));
        }
        for (std::size_t k = 0; k < grid.size(); ++k) sums[m][k] += accuracy(scored, grid[k], eps);
      }
    }

    for (auto m : cfg.methods) {
      if (!usable[m]) continue;
      for (std::size_t k = 0; k < grid.size(); ++k)
        report.rows.push_back({m, n, grid[k], sums[m][k] / static_cast<double>(plan.folds.size()),
                               plan.folds.size()});
    }
  }
  return report;
}

}  // namespace planrec::benchkit
