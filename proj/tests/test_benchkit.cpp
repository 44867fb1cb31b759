#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "test_support.hpp"

using namespace planrec;
using namespace planrec::benchkit;
using namespace planrec::testing_support;

namespace {

ScoredSeries constant_series(std::vector<double> probs, std::size_t truth, std::size_t T = 10) {
  ScoredSeries s;
  s.true_goal = truth;
  s.probs.assign(T + 1, probs);
  return s;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("planrec_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// The flat scenario written as a two-item dataset.
fs::path write_buc_dataset(const std::string& name) {
  const fs::path d = scratch_dir(name);
  const auto b = gen_buc();
  write_file(d / "domain.pddl", b.domain);
  write_file(d / "problem.pddl", b.problem);
  write_file(d / "goals.json", goals_to_json(GoalSet{b.goals, {}}));
  auto lines = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += x + "\n";
    return s;
  };
  write_file(d / "e1.txt", lines(b.e1));
  write_file(d / "e2.txt", lines(b.e2));
  DatasetManifest m;
  m.name = "buc";
  m.domain = "domain.pddl";
  m.problems = {{"problem.pddl", "goals.json", b.true_goal, "e1.txt"},
                {"problem.pddl", "goals.json", b.true_goal, "e2.txt"}};
  write_file(d / "manifest.json", manifest_to_json(m));
  return d / "manifest.json";
}

}  // namespace

TEST(Accuracy, TieAtEvaluationPointScoresZero) {
  std::vector<ScoredSeries> s = {constant_series({0.4, 0.4, 0.2}, 0)};
  EXPECT_DOUBLE_EQ(accuracy(s, 50), 0.0);
}

TEST(Accuracy, ThreeOfFourUniquelyCorrect) {
  std::vector<ScoredSeries> s = {
      constant_series({0.7, 0.2, 0.1}, 0),
      constant_series({0.1, 0.8, 0.1}, 1),
      constant_series({0.2, 0.2, 0.6}, 2),
      constant_series({0.5, 0.5, 0.0}, 1),
  };
  EXPECT_EQ(accuracy(s, 50), 0.75);
}

TEST(Accuracy, ReadsThePosteriorAtTheFlooredIndex) {
  ScoredSeries s;
  s.true_goal = 1;
  for (int t = 0; t <= 10; ++t) s.probs.push_back(t == 3 ? std::vector<double>{0.1, 0.9} : std::vector<double>{0.9, 0.1});
  EXPECT_DOUBLE_EQ(accuracy({s}, 30), 1.0);
  EXPECT_DOUBLE_EQ(accuracy({s}, 35), 1.0);
  EXPECT_DOUBLE_EQ(accuracy({s}, 40), 0.0);
  EXPECT_DOUBLE_EQ(accuracy({s}, 25), 0.0);
}

TEST(Accuracy, EvalIndexAndGrid) {
  EXPECT_EQ(eval_index(10, 95), 9u);
  EXPECT_EQ(eval_index(3, 50), 1u);
  EXPECT_EQ(eval_index(7, 1), 0u);
  EXPECT_EQ(eval_index(100, 5), 5u);
  const auto g = lambda_grid_percent();
  ASSERT_EQ(g.size(), 23u);
  EXPECT_EQ(g.front(), 1);
  EXPECT_EQ(g[5], 10);
  EXPECT_EQ(g.back(), 95);
}

TEST(CrossValidation, EvenSplit) {
  const CvPlan p = make_cv_plan(12, 3, 1);
  ASSERT_EQ(p.folds.size(), 4u);
  std::multiset<std::size_t> seen;
  for (const auto& f : p.folds) {
    EXPECT_EQ(f.train.size(), 3u);
    EXPECT_TRUE(f.padding.empty());
    EXPECT_EQ(f.validation.size(), 9u);
    seen.insert(f.train.begin(), f.train.end());
  }
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(seen.count(i), 1u);
}

TEST(CrossValidation, ShortPartitionIsPadded) {
  const CvPlan p = make_cv_plan(10, 3, 2);
  ASSERT_EQ(p.folds.size(), 4u);
  EXPECT_EQ(p.folds.back().padding.size(), 2u);
  for (const auto& f : p.folds) {
    EXPECT_EQ(f.train.size(), 3u);
    std::set<std::size_t> train(f.train.begin(), f.train.end());
    EXPECT_EQ(train.size(), 3u);
    for (std::size_t v : f.validation) EXPECT_EQ(train.count(v), 0u);
    EXPECT_EQ(f.validation.size() + train.size(), 10u);
  }
  EXPECT_EQ(make_cv_plan(10, 3, 2).folds.back().train, p.folds.back().train);
}

TEST(CrossValidation, TrainingSizeMustLeaveValidationData) {
  EXPECT_THROW(make_cv_plan(5, 5, 0), Error);
  EXPECT_THROW(make_cv_plan(5, 0, 0), Error);
}

TEST(Stats, LengthStatistics) {
  const auto s = length_stats({4, 1, 3, 2});
  EXPECT_EQ(s.count, 4u);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.stddev, std::sqrt(1.25));
  const auto by_goal = sequence_stats({{0, 5}, {1, 2}, {0, 7}, {0, 6}});
  ASSERT_EQ(by_goal.size(), 2u);
  EXPECT_DOUBLE_EQ(by_goal.at(0).median, 6.0);
  EXPECT_DOUBLE_EQ(by_goal.at(1).stddev, 0.0);
}

TEST(Logistics, SizeAndDeterminism) {
  const auto a = gen_logistics(10, 3), b = gen_logistics(10, 3), c = gen_logistics(10, 4);
  EXPECT_EQ(a.problem, b.problem);
  EXPECT_NE(a.problem, c.problem);
  ASSERT_EQ(a.goals.size(), 10u);
  std::set<std::string> formulas;
  for (const auto& g : a.goals) formulas.insert(g.formula);
  EXPECT_EQ(formulas.size(), 10u);
  const auto lp = load_problem_text(a.domain, a.problem, GoalSet{a.goals, {}});
  EXPECT_GE(lp.problem->actions.size(), 300u);
  EXPECT_LE(lp.problem->actions.size(), 410u);
  const Planner planner(*lp.problem);
  for (const auto& g : lp.goals)
    EXPECT_TRUE(planner.solve(lp.problem->init, g, SearchMode::Optimal, SearchBudget::expansions(200000)).solved());
}

TEST(Dataset, ManifestRoundTrip) {
  DatasetManifest m;
  m.name = "x";
  m.seed = 17;
  m.domain = "d.pddl";
  m.problems = {{"p.pddl", "g.json", 2, "obs/a.txt"}, {"p.pddl", "g.json", 0, "obs/b.txt"}};
  const DatasetManifest back = manifest_from_json(manifest_to_json(m));
  EXPECT_EQ(back.name, "x");
  EXPECT_EQ(back.seed, 17u);
  EXPECT_EQ(back.problems, m.problems);
  EXPECT_THROW(manifest_from_json("{\"format\":\"planrec-manifest/2\",\"domain\":\"d\",\"problems\":[]}"),
               VersionError);
}

TEST(Dataset, GoalFileRoundTrip) {
  GoalSet gs{{{"a", "(x)"}, {"b", "(and (y) (not (z)))"}}, {0.25, 0.75}};
  const GoalSet back = goals_from_json(goals_to_json(gs));
  ASSERT_EQ(back.goals.size(), 2u);
  EXPECT_EQ(back.goals[1].formula, gs.goals[1].formula);
  EXPECT_EQ(back.priors, gs.priors);
  EXPECT_THROW(goals_from_json("{\"goals\":[]}"), FormatError);
}

TEST(Experiment, LearnedOnlyRunNeedsNoPlanner) {
  const Dataset ds = load_dataset(write_buc_dataset("nbm_only"));
  ExperimentConfig cfg;
  cfg.methods = {Method::Nbm};
  cfg.n_grid = {1};
  const ExperimentReport r = run_experiment(ds, cfg);
  EXPECT_EQ(r.planner_calls, 0u);
  EXPECT_EQ(r.rows.size(), lambda_grid_percent().size());
  EXPECT_TRUE(r.failures.empty());
  // Both items share the true goal, so the model trained on one always finds it.
  for (const auto& row : r.rows) EXPECT_DOUBLE_EQ(row.accuracy, 1.0);
}

TEST(Experiment, ZeroLearnedWeightReducesToGm) {
  const Dataset ds = load_dataset(write_buc_dataset("ws_zero"));
  ExperimentConfig cfg;
  cfg.methods = {Method::Gm, Method::Ws, Method::Tb};
  cfg.n_grid = {1};
  cfg.schedule = parse_schedule("fixed:0");
  const ExperimentReport r = run_experiment(ds, cfg);
  EXPECT_EQ(r.planner_calls, 4u * (34 + 1) + 4u * (6 + 1));
  for (int pct : lambda_grid_percent()) {
    EXPECT_DOUBLE_EQ(r.at(Method::Ws, 1, pct), r.at(Method::Gm, 1, pct)) << pct;
    EXPECT_GE(r.at(Method::Tb, 1, pct), r.at(Method::Gm, 1, pct)) << pct;
  }
  EXPECT_THROW(r.at(Method::Nbm, 1, 50), Error);
}

TEST(Experiment, ImpossibleSplitIsReportedNotFatal) {
  const Dataset ds = load_dataset(write_buc_dataset("bad_n"));
  ExperimentConfig cfg;
  cfg.methods = {Method::Nbm};
  cfg.n_grid = {1, 2};
  const ExperimentReport r = run_experiment(ds, cfg);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].n, 2u);
  const std::string csv = report_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,n,lambda,accuracy,fold_count");
  EXPECT_NE(csv.find("nbm,1,0.010000,1.000000,2\n"), std::string::npos);
  EXPECT_NE(report_json(r, cfg).find("\"failures\""), std::string::npos);
}
