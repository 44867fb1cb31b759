#pragma once

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "planrec/planrec.hpp"

namespace planrec::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kDomainError = 1, kUsageError = 2 };

// Logger on standard error; PLANRECOG_LOG selects the level (default warn).
inline std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> log = [] {
    auto l = spdlog::stderr_color_mt("planrec");
    l->set_pattern("[%l] %v");
    const char* env = std::getenv("PLANRECOG_LOG");
    l->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
    return l;
  }();
  return log;
}

struct SearchOptions {
  std::string mode = "satisficing";
  double timeout = 30.0;
  std::uint64_t expansions = 0;

  SearchMode search_mode() const {
    return mode == "optimal" ? SearchMode::Optimal : SearchMode::Satisficing;
  }
  SearchBudget budget() const {
    SearchBudget b = timeout > 0 ? SearchBudget::seconds(timeout) : SearchBudget::unlimited();
    if (expansions > 0) b.expansion_limit = expansions;
    return b;
  }
};

inline void add_search_options(CLI::App* cmd, SearchOptions& o, const std::string& default_mode) {
  o.mode = default_mode;
  cmd->add_option("--mode", o.mode, "Planner mode")
      ->check(CLI::IsMember({"optimal", "satisficing"}))
      ->capture_default_str();
  cmd->add_option("--timeout", o.timeout, "Wall-clock limit per planner call in seconds (0: none)")
      ->capture_default_str();
  cmd->add_option("--expansions", o.expansions, "Expansion limit per planner call (0: none)")
      ->capture_default_str();
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    benchkit::write_file(path, text);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// --- plan ---------------------------------------------------------------------

struct PlanArgs {
  std::string domain, problem, out;
  SearchOptions search;
};

inline int run_plan(const PlanArgs& a, std::ostream& out, std::ostream& err) {
  const auto d = pddl::parse_domain(benchkit::read_file(a.domain), a.domain);
  const auto p = pddl::parse_problem(benchkit::read_file(a.problem), d, a.problem);
  const PlanningProblem grounded = pddl::ground(d, p);
  logger()->info("grounded {} fluents and {} actions", grounded.fluent_count(), grounded.actions.size());
  const PlanResult r = Planner(grounded).solve(a.search.search_mode(), a.search.budget());
  logger()->info("{} after {} expansions", to_string(r.outcome), r.expansions);
  if (!r.solved()) {
    err << "no plan found: " << to_string(r.outcome) << "\n";
    return kDomainError;
  }
  std::ostringstream os;
  for (ActionId id : r.plan->steps) os << grounded.action(id).name << '\n';
  os << "; cost = " << pddl::format_number(r.plan->cost) << '\n';
  write_output(a.out, os.str(), out);
  return kOk;
}

// --- recognize ------------------------------------------------------------------

struct RecognizeArgs {
  std::string method = "gm";
  std::string domain, problem, goals, obs, out, model;
  std::string schedule = "cmu";
  std::optional<double> n;
  double beta = 1.0;
  double tie_epsilon = 1e-9;
  bool force_apply = false;
  SearchOptions search;
};

inline int run_recognize(const RecognizeArgs& a, std::ostream& out, std::ostream& err) {
  benchkit::LoadedProblem lp = benchkit::load_problem(a.domain, a.problem, a.goals);
  RecognitionTask task{lp.problem, lp.goal_names, lp.goals, lp.priors,
                       load_observations(*lp.problem, a.obs)};
  RecognitionConfig cfg;
  cfg.beta = a.beta;
  cfg.mode = a.search.search_mode();
  cfg.budget = a.search.budget();
  cfg.tie_epsilon = a.tie_epsilon;
  cfg.force_apply = a.force_apply;

  const bool hybrid = a.method == "ws" || a.method == "tb";
  if (hybrid && a.model.empty()) throw Error("--method " + a.method + " needs --nbm-model");
  RecognitionTrace trace = a.method == "rg" ? recognize_online_rg(task, cfg) : recognize_online_gm(task, cfg);
  logger()->info("{} planner calls", trace.planner_calls());

  nlohmann::ordered_json extra = nlohmann::ordered_json::array();
  if (hybrid) {
    const NaiveBayesModel model = deserialize_nbm(benchkit::read_file(a.model));
    if (model.goal_names != lp.goal_names)
      throw Error("model goals do not match the goal set in " + a.goals);
    const WeightSchedule sched = parse_schedule(a.schedule);
    const double n = a.n.value_or(static_cast<double>(model.training_sequences));
    const NbmPredictor predictor(model, *lp.problem);
    const auto states = states_along(*lp.problem, task.observations.actions);
    trace.method = a.method;
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
      const GoalPosterior pd = predictor.predict(states[t], lp.priors);
      const double wd = sched.nbm(n, static_cast<double>(t));
      const GoalPosterior& ps = trace.steps[t].posterior;
      nlohmann::ordered_json e;
      e["t"] = t;
      e["nbm_weight"] = wd;
      e["prap_probs"] = ps.probs;
      e["nbm_probs"] = pd.probs;
      extra.push_back(std::move(e));
      trace.steps[t].posterior =
          a.method == "ws" ? combine_ws(ps, pd, wd) : combine_tb(ps, pd, wd, a.tie_epsilon);
    }
  }
  nlohmann::ordered_json j = trace_to_json(trace, a.tie_epsilon, true);
  if (hybrid) {
    j["schedule"] = a.schedule;
    j["components"] = std::move(extra);
  }
  write_output(a.out, j.dump(2) + "\n", out);

  const auto dead = unsolvable_goals(trace);
  if (!dead.empty()) {
    for (std::size_t g : dead) {
      err << "goal " << trace.goal_names[g] << " is unsolvable";
      if (!trace.baseline_outcomes.empty()) err << " (" << to_string(trace.baseline_outcomes[g]) << ")";
      err << "\n";
    }
    return kDomainError;
  }
  return kOk;
}

// --- train-nbm --------------------------------------------------------------------

struct TrainArgs {
  std::string dataset, out;
  double alpha = 1.0;
};

inline int run_train(const TrainArgs& a, std::ostream& out) {
  const benchkit::Dataset ds = benchkit::load_dataset(a.dataset);
  const NaiveBayesModel m = benchkit::train_nbm_on_dataset(ds, a.alpha);
  logger()->info("trained on {} sequences over {} fluents", m.training_sequences, m.fluent_count());
  write_output(a.out, serialize_nbm(m), out);
  return kOk;
}

// --- sample ------------------------------------------------------------------------

struct SampleArgs {
  std::string domain, problem, goals, out_dir;
  std::size_t goal_index = 0;
  double p = 0.5;
  std::uint64_t seed = 0;
  std::size_t count = 1;
  std::size_t max_length = 0;
  std::size_t satisficing_threshold = 10'000;
  SearchOptions search;
};

inline std::string relative_to(const fs::path& target, const fs::path& base) {
  return fs::relative(fs::absolute(target), fs::absolute(base)).generic_string();
}

inline int run_sample(const SampleArgs& a, std::ostream& out, std::ostream& err) {
  benchkit::LoadedProblem lp = benchkit::load_problem(a.domain, a.problem, a.goals);
  if (a.goal_index >= lp.goals.size())
    throw Error("goal index " + std::to_string(a.goal_index) + " is outside the goal set");
  const GoalDescription& goal = lp.goals[a.goal_index];
  const SamplerModel model = init_sampler_model(*lp.problem, goal, derive_seed(a.seed, a.goal_index));
  SamplerConfig cfg;
  cfg.p_plan_action = a.p;
  cfg.satisficing_threshold = a.satisficing_threshold;
  cfg.budget = a.search.budget();
  if (a.max_length > 0) cfg.max_length = a.max_length;

  fs::create_directories(a.out_dir);
  const fs::path manifest_path = fs::path(a.out_dir) / "manifest.json";
  benchkit::DatasetManifest manifest;
  const std::string domain_rel = relative_to(a.domain, a.out_dir);
  if (fs::exists(manifest_path)) {
    manifest = benchkit::load_manifest(manifest_path);
    if (manifest.domain != domain_rel)
      throw Error(manifest_path.string() + " belongs to domain " + manifest.domain);
  } else {
    manifest.name = fs::path(a.out_dir).filename().string();
    manifest.seed = a.seed;
    manifest.domain = domain_rel;
  }

  std::size_t truncated = 0;
  for (std::size_t i = 0; i < a.count; ++i) {
    cfg.seed = derive_seed(a.seed, a.goal_index, i + 1);
    const std::string file =
        "seq_" + std::to_string(a.goal_index) + "_" + std::to_string(a.seed) + "_" + std::to_string(i) + ".txt";
    try {
      const ObservationSequence seq = sample_sequence(*lp.problem, goal, model, cfg);
      std::ostringstream os;
      write_observations(os, *lp.problem, seq);
      benchkit::write_file(fs::path(a.out_dir) / file, os.str());
      benchkit::ManifestEntry e{relative_to(a.problem, a.out_dir), relative_to(a.goals, a.out_dir),
                                a.goal_index, file};
      auto it = std::find(manifest.problems.begin(), manifest.problems.end(), e);
      if (it == manifest.problems.end()) manifest.problems.push_back(std::move(e));
      out << file << ' ' << seq.size() << '\n';
    } catch (const TruncatedError& e) {
      ++truncated;
      err << file << ": " << e.what() << "\n";
    }
  }
  benchkit::write_file(manifest_path, benchkit::manifest_to_json(manifest));
  return truncated == 0 ? kOk : kDomainError;
}

// --- eval --------------------------------------------------------------------------

struct EvalArgs {
  std::string manifest, methods = "gm,nbm,ws,tb", n = "1,3,5,7,9,11", schedule = "log", out, report;
  std::uint64_t seed = 7;
  std::size_t jobs = 1;
  double beta = 1.0;
  double alpha = 1.0;
  SearchOptions search;
};

inline int run_eval(const EvalArgs& a, std::ostream& out) {
  benchkit::ExperimentConfig cfg;
  cfg.methods.clear();
  for (const auto& m : split_list(a.methods)) cfg.methods.push_back(benchkit::parse_method(m));
  cfg.n_grid.clear();
  for (const auto& s : split_list(a.n)) {
    std::size_t used = 0;
    const unsigned long v = std::stoul(s, &used);
    if (used != s.size() || v == 0) throw Error("invalid training size '" + s + "'");
    cfg.n_grid.push_back(v);
  }
  cfg.schedule = parse_schedule(a.schedule);
  cfg.seed = a.seed;
  cfg.jobs = a.jobs;
  cfg.alpha = a.alpha;
  cfg.recognition.beta = a.beta;
  cfg.recognition.mode = a.search.search_mode();
  cfg.recognition.budget = a.search.budget();

  const benchkit::Dataset ds = benchkit::load_dataset(a.manifest);
  logger()->info("loaded {} sequences over {} problems", ds.items.size(), ds.problems.size());
  const benchkit::ExperimentReport rep = benchkit::run_experiment(ds, cfg);
  for (const auto& f : rep.failures)
    logger()->warn("{} n={} {}: {}", f.method, f.n, f.item, f.message);
  write_output(a.out, benchkit::report_csv(rep), out);
  std::string report_path = a.report;
  if (report_path.empty() && !a.out.empty() && a.out != "-")
    report_path = fs::path(a.out).replace_extension(".json").string();
  if (!report_path.empty()) benchkit::write_file(report_path, benchkit::report_json(rep, cfg));
  return kOk;
}

// --- gen-domain ----------------------------------------------------------------------

struct GenArgs {
  std::string which, out_dir;
  std::size_t goals = 10;
  std::uint64_t seed = 1;
};

inline int run_gen(const GenArgs& a, std::ostream& out) {
  const fs::path dir(a.out_dir);
  if (a.which == "buc") {
    const benchkit::BucBundle b = benchkit::gen_buc();
    benchkit::write_file(dir / "domain.pddl", b.domain);
    benchkit::write_file(dir / "problem.pddl", b.problem);
    benchkit::write_file(dir / "goals.json", benchkit::goals_to_json({b.goals, {}}));
    auto lines = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& x : v) s += x + "\n";
      return s;
    };
    benchkit::write_file(dir / "e1.txt", lines(b.e1));
    benchkit::write_file(dir / "e2.txt", lines(b.e2));
    benchkit::write_file(dir / "nbm_fixture.json", serialize_nbm(b.nbm_fixture));
    benchkit::DatasetManifest m;
    m.name = "buc";
    m.domain = "domain.pddl";
    m.problems = {{"problem.pddl", "goals.json", b.true_goal, "e1.txt"},
                  {"problem.pddl", "goals.json", b.true_goal, "e2.txt"}};
    benchkit::write_file(dir / "manifest.json", benchkit::manifest_to_json(m));
  } else {
    const benchkit::LogisticsBundle b = benchkit::gen_logistics(a.goals, a.seed);
    benchkit::write_file(dir / "domain.pddl", b.domain);
    benchkit::write_file(dir / "problem.pddl", b.problem);
    benchkit::write_file(dir / "goals.json", benchkit::goals_to_json({b.goals, {}}));
  }
  out << "wrote " << a.which << " benchmark to " << dir.string() << '\n';
  return kOk;
}

// --- dispatch ------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Goal recognition toolkit: planning-based, learned and hybrid recognizers", "planrec"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* c_plan = app.add_subcommand("plan", "Solve a PDDL problem and print the plan and its cost");
  c_plan->add_option("--domain", plan.domain, "Domain file")->required()->check(CLI::ExistingFile);
  c_plan->add_option("--problem", plan.problem, "Problem file")->required()->check(CLI::ExistingFile);
  c_plan->add_option("--out", plan.out, "Output file (default: standard output)");
  add_search_options(c_plan, plan.search, "optimal");

  RecognizeArgs rec;
  auto* c_rec = app.add_subcommand("recognize", "Online goal recognition over an observation file");
  c_rec->add_option("--method", rec.method, "Recognizer")
      ->check(CLI::IsMember({"rg", "gm", "ws", "tb"}))
      ->capture_default_str();
  c_rec->add_option("--domain", rec.domain, "Domain file")->required()->check(CLI::ExistingFile);
  c_rec->add_option("--problem-template,--problem", rec.problem, "Problem file; its goal is ignored")
      ->required()
      ->check(CLI::ExistingFile);
  c_rec->add_option("--goals", rec.goals, "Goal set (JSON)")->required()->check(CLI::ExistingFile);
  c_rec->add_option("--obs", rec.obs, "Observation file")->required()->check(CLI::ExistingFile);
  c_rec->add_option("--beta", rec.beta, "Rationality parameter")->capture_default_str()->check(CLI::PositiveNumber);
  c_rec->add_option("--tie-epsilon", rec.tie_epsilon, "Tie tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  c_rec->add_option("--nbm-model", rec.model, "Model file for ws and tb")->check(CLI::ExistingFile);
  c_rec->add_option("--schedule", rec.schedule, "cmu, acmu, log or fixed:W")->capture_default_str();
  c_rec->add_option("--n", rec.n, "Training size used by the weight schedule (default: from the model)");
  c_rec->add_flag("--force-apply", rec.force_apply, "Apply inapplicable observations instead of failing");
  c_rec->add_option("--out", rec.out, "Trace file (default: standard output)");
  add_search_options(c_rec, rec.search, "satisficing");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train-nbm", "Fit the Naive Bayes fluent model on a dataset");
  c_train->add_option("--dataset", train.dataset, "Dataset manifest")->required()->check(CLI::ExistingFile);
  c_train->add_option("--alpha", train.alpha, "Laplace smoothing")->capture_default_str()->check(CLI::PositiveNumber);
  c_train->add_option("--out", train.out, "Model file (default: standard output)");

  SampleArgs smp;
  auto* c_smp = app.add_subcommand("sample", "Sample observation sequences towards one goal");
  c_smp->add_option("--domain", smp.domain, "Domain file")->required()->check(CLI::ExistingFile);
  c_smp->add_option("--problem", smp.problem, "Problem file")->required()->check(CLI::ExistingFile);
  c_smp->add_option("--goals", smp.goals, "Goal set (JSON)")->required()->check(CLI::ExistingFile);
  c_smp->add_option("--goal-index", smp.goal_index, "Zero-based goal index")->required();
  c_smp->add_option("--p", smp.p, "Probability of taking the next plan action")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  c_smp->add_option("--seed", smp.seed, "Seed")->capture_default_str();
  c_smp->add_option("--count", smp.count, "Number of sequences")->capture_default_str();
  c_smp->add_option("--max-length", smp.max_length, "Length limit (0: ten times the plan length)");
  c_smp->add_option("--satisficing-threshold", smp.satisficing_threshold,
                    "Action count above which replanning is satisficing")
      ->capture_default_str();
  c_smp->add_option("--out-dir", smp.out_dir, "Output directory")->required();
  add_search_options(c_smp, smp.search, "optimal");

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("eval", "Cross-validated accuracy over a dataset");
  c_ev->add_option("--manifest", ev.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  c_ev->add_option("--methods", ev.methods, "Comma-separated subset of rg,gm,nbm,ws,tb")->capture_default_str();
  c_ev->add_option("--n", ev.n, "Comma-separated training sizes")->capture_default_str();
  c_ev->add_option("--schedule", ev.schedule, "cmu, acmu, log or fixed:W")->capture_default_str();
  c_ev->add_option("--seed", ev.seed, "Seed")->capture_default_str();
  c_ev->add_option("--jobs", ev.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  c_ev->add_option("--beta", ev.beta, "Rationality parameter")->capture_default_str()->check(CLI::PositiveNumber);
  c_ev->add_option("--alpha", ev.alpha, "Laplace smoothing")->capture_default_str()->check(CLI::PositiveNumber);
  c_ev->add_option("--out", ev.out, "CSV file (default: standard output)");
  c_ev->add_option("--report", ev.report, "JSON report (default: next to --out)");
  ev.search.timeout = 0;
  ev.search.expansions = 200'000;
  add_search_options(c_ev, ev.search, "optimal");

  GenArgs gen;
  auto* c_gen = app.add_subcommand("gen-domain", "Write a built-in benchmark");
  c_gen->add_option("which", gen.which, "buc or logistics")->required()->check(CLI::IsMember({"buc", "logistics"}));
  c_gen->add_option("--goals", gen.goals, "Number of goals (logistics)")->capture_default_str();
  c_gen->add_option("--seed", gen.seed, "Seed (logistics)")->capture_default_str();
  c_gen->add_option("--out-dir", gen.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    app.exit(e, err, err);
    return kUsageError;
  }

  try {
    if (*c_plan) return run_plan(plan, out, err);
    if (*c_rec) return run_recognize(rec, out, err);
    if (*c_train) return run_train(train, out);
    if (*c_smp) return run_sample(smp, out, err);
    if (*c_ev) return run_eval(ev, out);
    if (*c_gen) return run_gen(gen, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kUsageError;
}

}  // namespace planrec::cli
