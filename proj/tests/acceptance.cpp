// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
// Usage: acceptance [work-dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>

#include "cli.hpp"
#include "test_support.hpp"

using namespace planrec;
using namespace planrec::testing_support;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (!failures_.empty()) failures_ += "; ";
      failures_ += what;
    }
  }
  void note(const std::string& s) {
    if (!notes_.empty()) notes_ += ", ";
    notes_ += s;
  }
  Outcome done() const { return {pass_, pass_ ? notes_ : failures_}; }

 private:
  bool pass_ = true;
  std::string failures_, notes_;
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// --- 1 -----------------------------------------------------------------------------

Outcome posterior_math() {
  Check c;
  const GoalPosterior u = posterior({0, 0, 0, 0}, uniform_priors(4), 1.0);
  for (double p : u.probs) c.expect(std::abs(p - 0.25) <= 1e-5, "uniform case gave " + fmt(p));

  // Independent evaluation in extended precision.
  const long double a = 0.5L, b = std::exp(-2.0L) / (1.0L + std::exp(-2.0L));
  const long double w0 = a / (a + b), w1 = b / (a + b);
  const GoalPosterior p = posterior({0, 2}, {0.5, 0.5}, 1.0);
  c.expect(std::abs(p.probs[0] - static_cast<double>(w0)) <= 1e-5 &&
               std::abs(p.probs[1] - static_cast<double>(w1)) <= 1e-5,
           "two-goal case gave (" + fmt(p.probs[0]) + ", " + fmt(p.probs[1]) + ")");
  c.note("two-goal case (" + fmt(p.probs[0], 7) + ", " + fmt(p.probs[1], 7) + ") vs oracle (" +
         fmt(static_cast<double>(w0), 7) + ", " + fmt(static_cast<double>(w1), 7) +
         "); quoted literal 0.80750 differs from the oracle by " +
         fmt(std::abs(0.80750 - static_cast<double>(w0)), 7));
  return c.done();
}

// --- 2 -----------------------------------------------------------------------------

std::string set_str(const std::vector<std::size_t>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::string("g") + std::to_string(v[i] + 1);
  return s + "}";
}

void pattern(Check& c, const RecognitionTrace& tr, std::size_t offset, const std::string& label) {
  const auto& want = buc_expected_argmax();
  if (tr.steps.size() < offset + want.size()) {
    c.expect(false, label + " trace too short");
    return;
  }
  for (std::size_t k = 0; k < want.size(); ++k) {
    const auto got = argmax_set(tr.steps[offset + k].posterior, 1e-9);
    c.expect(got == want[k], label + " step " + std::to_string(k) + " argmax " + set_str(got) + " expected " +
                                 set_str(want[k]));
  }
}

Outcome buc_prap_pattern() {
  Check c;
  const auto b = benchkit::gen_buc();
  const RecognitionConfig cfg = optimal_config();
  const auto t0 = std::chrono::steady_clock::now();
  pattern(c, recognize_online_rg(buc_task(b.e2), cfg), 0, "RG/E2");
  pattern(c, recognize_online_gm(buc_task(b.e2), cfg), 0, "GM/E2");
  pattern(c, recognize_online_rg(buc_task(b.e1), cfg), 28, "RG/E1");
  pattern(c, recognize_online_gm(buc_task(b.e1), cfg), 28, "GM/E1");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < 120.0, "took " + fmt(secs, 1) + " s");
  c.note("RG and GM on E1 (steps 28..34) and E2 (steps 0..6), " + fmt(secs, 2) + " s");
  return c.done();
}

// --- 3 -----------------------------------------------------------------------------

Outcome buc_hybrid_pattern() {
  Check c;
  const auto b = benchkit::gen_buc();
  const auto& lp = buc_loaded();
  const auto task = buc_task(b.e1);
  const auto t0 = std::chrono::steady_clock::now();
  const auto tr = recognize_online_gm(task, optimal_config());
  const NbmPredictor nbm(b.nbm_fixture, *lp.problem);
  const auto states = states_along(*lp.problem, task.observations.actions);
  std::size_t tied = 0;
  for (std::size_t k = 0; k <= 6; ++k) {
    const std::size_t t = 28 + k;
    const GoalPosterior& ps = tr.steps[t].posterior;
    const GoalPosterior pd = nbm.predict(states[t], lp.priors);
    const GoalPosterior ws = combine_ws(ps, pd, 0.5), tb = combine_tb(ps, pd, 0.5, 1e-9);
    const std::vector<std::size_t> want = {k == 0 ? std::size_t{1} : std::size_t{3}};
    c.expect(argmax_set(ws) == want, "WS step " + std::to_string(k) + " argmax " + set_str(argmax_set(ws)));
    c.expect(argmax_set(tb) == want, "TB step " + std::to_string(k) + " argmax " + set_str(argmax_set(tb)));
    if (argmax_set(ps).size() > 1) {
      ++tied;
      c.expect(ws.probs == tb.probs, "WS and TB differ at tied step " + std::to_string(k));
    }
  }
  c.expect(tied == 5, "expected PRAP ties at steps 0..4, found " + std::to_string(tied));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < 120.0, "took " + fmt(secs, 1) + " s");
  c.note(std::to_string(tied) + " tied steps with WS == TB");
  return c.done();
}

// --- 4 -----------------------------------------------------------------------------

Outcome call_accounting() {
  Check c;
  const RecognitionConfig cfg = optimal_config();
  auto check_task = [&](const RecognitionTask& task, const std::string& label) {
    const auto rg = recognize_online_rg(task, cfg).planner_calls();
    const auto gm = recognize_online_gm(task, cfg).planner_calls();
    c.expect(rg == 48, label + " RG issued " + std::to_string(rg));
    c.expect(gm == 28, label + " GM issued " + std::to_string(gm));
  };
  check_task(buc_task(benchkit::buc_suffix()), "BUC");

  auto grid = std::make_shared<PlanningProblem>(ground_text(grid_domain(), grid_problem(4)));
  RecognitionTask t;
  t.problem = grid;
  for (auto [x, y] : std::vector<std::pair<int, int>>{{3, 3}, {0, 3}, {3, 0}, {2, 2}}) {
    t.goal_names.push_back(cell(x, y));
    t.goals.push_back({{*grid->find_fluent("(at " + cell(x, y) + ")")}, {}});
  }
  t.priors = uniform_priors(4);
  t.observations = resolve(*grid, {"(move c0_0 c1_0)", "(move c1_0 c1_1)", "(move c1_1 c2_1)",
                                   "(move c2_1 c2_2)", "(move c2_2 c3_2)", "(move c3_2 c3_3)"});
  check_task(t, "grid");
  c.note("RG 48 and GM 28 on two |G|=4, T=6 tasks");
  return c.done();
}

// --- 5 -----------------------------------------------------------------------------

Outcome planner_optimality() {
  Check c;
  std::mt19937_64 rng(20240501);
  int match = 0, solvable = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 200; ++i) {
    const MaskProblem mp = random_mask_problem(rng, i % 2 == 1);
    const double want = mask_dijkstra(mp);
    const PlanningProblem p = to_problem(mp);
    const PlanResult r = plan_optimal(p, SearchBudget::unlimited());
    bool ok;
    if (std::isinf(want)) {
      ok = r.outcome == PlanOutcome::Unsolvable;
    } else {
      ++solvable;
      ok = r.solved() && std::abs(r.cost() - want) < 1e-9 && validate(p, *r.plan).valid;
    }
    match += ok;
    c.expect(ok, "problem " + std::to_string(i) + " mismatched");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < 60.0, "took " + fmt(secs, 1) + " s");
  c.note(std::to_string(match) + "/200 match (" + std::to_string(solvable) + " solvable), " + fmt(secs, 2) + " s");
  return c.done();
}

// --- 6 -----------------------------------------------------------------------------

Outcome rg_embedding() {
  Check c;
  std::mt19937_64 rng(777);
  int found = 0, embedded = 0;
  for (int trial = 0; trial < 5000 && found < 50; ++trial) {
    const MaskProblem mp = random_mask_problem(rng, trial % 2 == 0);
    const PlanningProblem p = to_problem(mp);
    ObservationSequence obs;
    State s = p.init;
    const int len = std::uniform_int_distribution<int>(1, 5)(rng);
    for (int k = 0; k < len; ++k) {
      std::vector<ActionId> ok;
      for (const auto& a : p.actions)
        if (applicable(s, a)) ok.push_back(a.id);
      if (ok.empty()) break;
      const ActionId pick = ok[std::uniform_int_distribution<std::size_t>(0, ok.size() - 1)(rng)];
      obs.actions.push_back(pick);
      s = apply_unchecked(s, p.actions[pick]);
    }
    if (obs.empty()) continue;
    const RgCompilation comp = compile_rg(p, obs);
    PlanningProblem with = comp.problem;
    with.goal = comp.with_obs(p.goal);
    const PlanResult r = plan_optimal(with, SearchBudget::unlimited());
    if (!r.solved()) continue;
    ++found;
    std::vector<ActionId> mapped;
    for (ActionId a : r.plan->steps) mapped.push_back(comp.origin[a]);
    const bool ok = is_subsequence(obs.actions, mapped) && validate(with, *r.plan).valid;
    embedded += ok;
    c.expect(ok, "trial " + std::to_string(trial) + " lost the observations");
  }
  c.expect(found == 50, "only " + std::to_string(found) + " solvable pairs generated");
  c.note(std::to_string(embedded) + "/" + std::to_string(found) + " plans embed the observations");
  return c.done();
}

// --- 7 -----------------------------------------------------------------------------

Outcome sampler() {
  Check c;
  {
    const PlanningProblem p = ground_text(grid_domain(), grid_problem(5, {{1, 1}, {2, 1}, {3, 3}}));
    const PlanResult opt = plan_optimal(p, SearchBudget::unlimited());
    SamplerConfig cfg;
    cfg.p_plan_action = 1.0;
    cfg.seed = 3;
    const auto seq = sample_sequence(p, p.goal, init_sampler_model(p, p.goal, 3), cfg);
    c.expect(opt.solved() && seq.actions == opt.plan->steps, "p=1 deviates from the optimal plan");
  }
  const PlanningProblem p = ground_text(corridor_domain(), corridor_problem(6));
  const double optimal = plan_optimal(p, SearchBudget::unlimited()).cost();
  auto batch = [&] {
    std::vector<ObservationSequence> out;
    const auto model = init_sampler_model(p, p.goal, derive_seed(11, 0));
    SamplerConfig cfg;
    cfg.p_plan_action = 0.5;
    for (std::uint64_t i = 0; i < 100; ++i) {
      cfg.seed = derive_seed(11, 0, i + 1);
      out.push_back(sample_sequence(p, p.goal, model, cfg));
    }
    return out;
  };
  const auto first = batch();
  int valid = 0;
  double total = 0.0;
  for (const auto& seq : first) {
    State s = p.init;
    bool ok = true;
    for (ActionId a : seq.actions) {
      ok = ok && applicable(s, p.action(a));
      s = apply_unchecked(s, p.action(a));
    }
    valid += ok && satisfies(s, p.goal);
    total += static_cast<double>(seq.size());
  }
  const double mean = total / static_cast<double>(first.size());
  c.expect(valid == 100, std::to_string(valid) + "/100 sequences reach the goal");
  c.expect(mean >= optimal, "mean length " + fmt(mean, 2) + " below optimal " + fmt(optimal, 0));
  c.expect(batch() == first, "same seed produced a different batch");
  c.note("p=1 matches the optimal plan, " + std::to_string(valid) + "/100 valid, mean length " + fmt(mean, 2) +
         " vs optimal " + fmt(optimal, 0) + ", batches identical");
  return c.done();
}

// --- 8 -----------------------------------------------------------------------------

Outcome nbm() {
  Check c;
  State on(1), off(1);
  on.set(0);
  const NaiveBayesModel m = fit_nbm({{{on, on}, 0}, {{off, off}, 1}}, 1, 2, 1.0);
  c.expect(std::abs(m.probability(0, 0) - 0.75) <= 1e-9, "P(f|g1) = " + fmt(m.probability(0, 0), 12));
  c.expect(std::abs(m.probability(1, 0) - 0.25) <= 1e-9, "P(f|g2) = " + fmt(m.probability(1, 0), 12));
  const GoalPosterior post = predict_nbm(m, on, {0.5, 0.5});
  c.expect(std::abs(post.probs[0] - 0.75) <= 1e-9 && std::abs(post.probs[1] - 0.25) <= 1e-9,
           "posterior (" + fmt(post.probs[0], 12) + ", " + fmt(post.probs[1], 12) + ")");

  const NaiveBayesModel fixture = benchkit::gen_buc().nbm_fixture;
  for (const NaiveBayesModel* model : {&m, &fixture}) {
    const std::string text = serialize_nbm(*model);
    const NaiveBayesModel back = deserialize_nbm(text);
    bool bits = back == *model;
    for (std::size_t g = 0; bits && g < model->goal_count(); ++g)
      bits = std::memcmp(back.log_p_true[g].data(), model->log_p_true[g].data(),
                         sizeof(double) * model->fluent_count()) == 0 &&
             std::memcmp(back.log_p_false[g].data(), model->log_p_false[g].data(),
                         sizeof(double) * model->fluent_count()) == 0;
    c.expect(bits && serialize_nbm(back) == text, "serialization is not bit-exact");
  }
  c.note("3/4, 1/4 and (0.75, 0.25) within 1e-9, round trip bit-exact");
  return c.done();
}

// --- 9 -----------------------------------------------------------------------------

Outcome schedule() {
  Check c;
  const double log0 = nbm_weight(presets::kLog, 1, 0.0);
  const double cmu = nbm_weight(presets::kCmu, 3, 14.5);
  c.expect(std::abs(log0 - 0.1) <= 1e-12, "LOG(t=0) = " + fmt(log0, 15));
  c.expect(std::abs(cmu - 0.25) <= 1e-12, "CMU(n=3, t=14.5) = " + fmt(cmu, 15));
  c.note("LOG(0) = " + fmt(log0, 12) + ", CMU(3, 14.5) = " + fmt(cmu, 12));
  return c.done();
}

// --- 10 ----------------------------------------------------------------------------

Outcome metric() {
  Check c;
  auto series = [](std::vector<double> probs, std::size_t truth) {
    benchkit::ScoredSeries s;
    s.true_goal = truth;
    s.probs.assign(11, probs);
    return s;
  };
  const double tie = benchkit::accuracy({series({0.4, 0.4, 0.2}, 0)}, 50);
  c.expect(tie == 0.0, "tied true goal scored " + fmt(tie));
  const double acc = benchkit::accuracy({series({0.7, 0.2, 0.1}, 0), series({0.1, 0.8, 0.1}, 1),
                                         series({0.2, 0.2, 0.6}, 2), series({0.45, 0.45, 0.1}, 0)},
                                        50);
  c.expect(acc == 0.75, "four-problem fixture scored " + fmt(acc, 12));
  c.note("tie -> " + fmt(tie, 2) + ", fixture -> " + fmt(acc, 2));
  return c.done();
}

// --- 11 ----------------------------------------------------------------------------

int invoke(const std::vector<std::string>& args, std::ostream& out) {
  std::vector<const char*> argv{"planrec"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, std::cerr);
}

Outcome end_to_end(const fs::path& work) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  fs::remove_all(work);
  const fs::path gen = work / "gen", data = work / "data";
  std::ostringstream sink;
  if (invoke({"gen-domain", "logistics", "--goals", "10", "--seed", "7", "--out-dir", gen.string()}, sink) != 0) {
    c.expect(false, "gen-domain failed");
    return c.done();
  }
  for (int g = 0; g < 10; ++g) {
    const int code = invoke({"sample", "--domain", (gen / "domain.pddl").string(), "--problem",
                             (gen / "problem.pddl").string(), "--goals", (gen / "goals.json").string(),
                             "--goal-index", std::to_string(g), "--p", "0.7", "--seed", "11", "--count", "30",
                             "--out-dir", data.string()},
                            sink);
    c.expect(code == 0, "sampling goal " + std::to_string(g) + " exited " + std::to_string(code));
  }
  const double sample_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  auto eval = [&](const std::string& tag) {
    return invoke({"eval", "--manifest", (data / "manifest.json").string(), "--methods", "gm,nbm,ws", "--n",
                   "1,3,5", "--seed", "7", "--out", (work / (tag + ".csv")).string()},
                  sink);
  };
  c.expect(eval("run1") == 0, "first eval failed");
  c.expect(eval("run2") == 0, "second eval failed");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!c.done().pass) return c.done();

  // (a)
  const std::string csv1 = benchkit::read_file(work / "run1.csv"), csv2 = benchkit::read_file(work / "run2.csv");
  const std::string js1 = benchkit::read_file(work / "run1.json"), js2 = benchkit::read_file(work / "run2.json");
  c.expect(csv1 == csv2 && js1 == js2, "(a) reports differ between runs");

  const auto report = nlohmann::json::parse(js1);
  c.expect(report["failures"].empty(), "(a) report lists failures: " + report["failures"].dump());
  auto acc = [&](const std::string& m, int n, int pct) {
    for (const auto& r : report["rows"])
      if (r["method"] == m && r["n"] == n && std::lround(r["lambda"].get<double>() * 100) == pct)
        return r["accuracy"].get<double>();
    throw Error("missing row " + m);
  };

  // (b) With one training sequence the learned model can only single out the
  // trained goal, so its accuracy is bounded by how often a validation item
  // shares that goal.
  const benchkit::Dataset ds = benchkit::load_dataset(data / "manifest.json");
  const auto plan = benchkit::make_cv_plan(ds.items.size(), 1, 7 + 1);
  double chance = 0.0;
  for (const auto& f : plan.folds) {
    std::size_t same = 0;
    for (std::size_t v : f.validation) same += ds.items[v].true_goal == ds.items[f.train[0]].true_goal;
    chance += static_cast<double>(same) / static_cast<double>(f.validation.size());
  }
  chance /= static_cast<double>(plan.folds.size());
  double nbm_max = 0.0, gm_min = 1.0, ws_margin = 1.0;
  for (int pct : benchkit::lambda_grid_percent()) {
    const double nb = acc("nbm", 1, pct), gm = acc("gm", 1, pct);
    nbm_max = std::max(nbm_max, nb);
    c.expect(nb <= chance + 1e-9, "(b) NBM n=1 at " + std::to_string(pct) + "% is " + fmt(nb) + " above chance " +
                                      fmt(chance));
    if (pct >= 50) {
      gm_min = std::min(gm_min, gm);
      c.expect(gm > nb, "(b) GM " + fmt(gm) + " does not exceed NBM " + fmt(nb) + " at " + std::to_string(pct) + "%");
    }
    // (c)
    const double ws5 = acc("ws", 5, pct), best = std::max(acc("gm", 5, pct), acc("nbm", 5, pct));
    ws_margin = std::min(ws_margin, ws5 - best);
    c.expect(ws5 >= best - 0.05, "(c) WS n=5 at " + std::to_string(pct) + "% is " + fmt(ws5) + " vs " + fmt(best));
  }
  c.expect(secs < 1800.0, "took " + fmt(secs, 0) + " s");
  c.note("(a) identical reports; (b) NBM n=1 max " + fmt(nbm_max, 3) + " <= chance " + fmt(chance, 3) +
         ", GM n=1 min over lambda>=0.5 " + fmt(gm_min, 3) + "; (c) min WS - max(GM,NBM) at n=5 " +
         fmt(ws_margin, 3) + "; " + std::to_string(ds.items.size()) + " sequences, sampling " +
         fmt(sample_secs, 0) + " s, total " + fmt(secs, 0) + " s");
  return c.done();
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "planrec_acceptance";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"posterior math", posterior_math},
      {"BUC PRAP argmax pattern", buc_prap_pattern},
      {"BUC hybrid pattern", buc_hybrid_pattern},
      {"planner call accounting", call_accounting},
      {"planner optimality vs Dijkstra", planner_optimality},
      {"RG observation embedding", rg_embedding},
      {"sampler", sampler},
      {"naive Bayes fit, predict and serialization", nbm},
      {"weight schedule midpoints", schedule},
      {"metric strictness", metric},
      {"end-to-end logistics benchmark", [&] { return end_to_end(work); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
              << o.detail << ")" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
