#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "planrec/error.hpp"
#include "planrec/model.hpp"
#include "planrec/posterior.hpp"

namespace planrec {

struct TrainingSequence {
  std::vector<State> states;
  std::optional<std::size_t> goal_label;
};

inline constexpr const char* kNbmFormat = "planrec-nbm/1";

// Bernoulli Naive Bayes over fluents. Parameters are stored as
// log P(F_i = 1 | g) and log P(F_i = 0 | g).
struct NaiveBayesModel {
  double alpha = 1.0;
  std::vector<std::string> goal_names;
  std::vector<std::string> fluent_names;
  std::vector<std::uint64_t> class_counts;  // training states per goal
  std::uint64_t training_sequences = 0;
  std::vector<std::vector<double>> log_p_true;
  std::vector<std::vector<double>> log_p_false;

  std::size_t goal_count() const noexcept { return goal_names.size(); }
  std::size_t fluent_count() const noexcept { return fluent_names.size(); }

  double probability(std::size_t goal, std::size_t fluent) const {
    return std::exp(log_p_true.at(goal).at(fluent));
  }

  friend bool operator==(const NaiveBayesModel& a, const NaiveBayesModel& b) {
    return a.alpha == b.alpha && a.goal_names == b.goal_names && a.fluent_names == b.fluent_names &&
           a.class_counts == b.class_counts && a.training_sequences == b.training_sequences &&
           a.log_p_true == b.log_p_true && a.log_p_false == b.log_p_false;
  }
};

inline NaiveBayesModel fit_nbm(const std::vector<TrainingSequence>& sequences,
                               std::vector<std::string> goal_names,
                               std::vector<std::string> fluent_names, double alpha = 1.0) {
  if (!(alpha > 0.0)) throw Error("smoothing alpha must be positive");
  if (sequences.empty()) throw Error("at least one training sequence is required");
  if (goal_names.empty()) throw Error("at least one goal is required");
  const std::size_t G = goal_names.size();
  const std::size_t N = fluent_names.size();

  std::vector<std::vector<std::uint64_t>> ones(G, std::vector<std::uint64_t>(N, 0));
  std::vector<std::uint64_t> rows(G, 0);
  for (const auto& seq : sequences) {
    if (!seq.goal_label) throw Error("training sequence without a goal label");
    const std::size_t g = *seq.goal_label;
    if (g >= G) throw Error("training sequence refers to unknown goal " + std::to_string(g));
    if (seq.states.empty()) throw Error("training sequence without states");
    for (const State& s : seq.states) {
      if (s.universe() != N) throw Error("training state does not match the fluent universe");
      ++rows[g];
      for (FluentId f : s.members()) ++ones[g][f];
    }
  }

  NaiveBayesModel m;
  m.alpha = alpha;
  m.goal_names = std::move(goal_names);
  m.fluent_names = std::move(fluent_names);
  m.class_counts = rows;
  m.training_sequences = sequences.size();
  m.log_p_true.assign(G, std::vector<double>(N));
  m.log_p_false.assign(G, std::vector<double>(N));
  for (std::size_t g = 0; g < G; ++g) {
    const double denom = static_cast<double>(rows[g]) + 2.0 * alpha;
    for (std::size_t f = 0; f < N; ++f) {
      const double num1 = static_cast<double>(ones[g][f]) + alpha;
      const double num0 = static_cast<double>(rows[g] - ones[g][f]) + alpha;
      m.log_p_true[g][f] = std::log(num1 / denom);
      m.log_p_false[g][f] = std::log(num0 / denom);
    }
  }
  return m;
}

// Goals and fluents named by index.
inline NaiveBayesModel fit_nbm(const std::vector<TrainingSequence>& sequences, std::size_t universe,
                               std::size_t goal_count, double alpha = 1.0) {
  std::vector<std::string> goals, fluents;
  for (std::size_t g = 0; g < goal_count; ++g) goals.push_back("g" + std::to_string(g + 1));
  for (std::size_t f = 0; f < universe; ++f) fluents.push_back("f" + std::to_string(f));
  return fit_nbm(sequences, std::move(goals), std::move(fluents), alpha);
}

// States visited by a sequence, including the initial state.
inline std::vector<State> states_along(const PlanningProblem& p, const std::vector<ActionId>& actions) {
  std::vector<State> out{p.init};
  for (ActionId a : actions) out.push_back(apply_unchecked(out.back(), p.action(a)));
  return out;
}

// Scores states of one planning problem against a model, matching fluents by
// name. Fluents unknown to the model are ignored; model fluents missing from
// the problem count as false.
class NbmPredictor {
 public:
  NbmPredictor(const NaiveBayesModel& m, const PlanningProblem& p) : model_(m) {
    const std::size_t G = m.goal_count();
    base_.assign(G, 0.0);
    for (std::size_t g = 0; g < G; ++g)
      for (double lp0 : m.log_p_false[g]) base_[g] += lp0;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t f = 0; f < m.fluent_count(); ++f) index.emplace(m.fluent_names[f], f);
    column_.assign(p.fluent_count(), kAbsent);
    for (const auto& fl : p.fluents) {
      auto it = index.find(fl.name);
      if (it != index.end()) column_[fl.id] = it->second;
    }
  }

  // Uses positions directly; the state must share the model's universe.
  explicit NbmPredictor(const NaiveBayesModel& m) : model_(m) {
    const std::size_t G = m.goal_count();
    base_.assign(G, 0.0);
    for (std::size_t g = 0; g < G; ++g)
      for (double lp0 : m.log_p_false[g]) base_[g] += lp0;
    column_.resize(m.fluent_count());
    for (std::size_t f = 0; f < column_.size(); ++f) column_[f] = f;
  }

  std::vector<double> log_likelihoods(const State& s) const {
    std::vector<double> out = base_;
    for (FluentId f : s.members()) {
      if (f >= column_.size() || column_[f] == kAbsent) continue;
      const std::size_t c = column_[f];
      for (std::size_t g = 0; g < out.size(); ++g)
        out[g] += model_.log_p_true[g][c] - model_.log_p_false[g][c];
    }
    return out;
  }

  GoalPosterior predict(const State& s, const std::vector<double>& priors) const {
    if (priors.size() != model_.goal_count()) throw Error("one prior per model goal is required");
    std::vector<double> lr = log_likelihoods(s);
    for (std::size_t g = 0; g < lr.size(); ++g)
      lr[g] += priors[g] > 0 ? std::log(priors[g]) : -std::numeric_limits<double>::infinity();
    return normalize_log(lr);
  }

 private:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  const NaiveBayesModel& model_;
  std::vector<double> base_;
  std::vector<std::size_t> column_;
};

inline GoalPosterior predict_nbm(const NaiveBayesModel& m, const State& s,
                                 const std::vector<double>& priors) {
  if (s.universe() != m.fluent_count()) throw Error("state does not match the model's fluent universe");
  return NbmPredictor(m).predict(s, priors);
}

// --- Serialization ------------------------------------------------------------

inline nlohmann::ordered_json nbm_to_json(const NaiveBayesModel& m) {
  nlohmann::ordered_json j;
  j["format"] = kNbmFormat;
  j["alpha"] = m.alpha;
  j["goals"] = m.goal_names;
  j["fluents"] = m.fluent_names;
  j["class_counts"] = m.class_counts;
  j["training_sequences"] = m.training_sequences;
  j["log_p_true"] = m.log_p_true;
  j["log_p_false"] = m.log_p_false;
  return j;
}

inline std::string serialize_nbm(const NaiveBayesModel& m) { return nbm_to_json(m).dump(1) + "\n"; }

inline NaiveBayesModel deserialize_nbm(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format") || !j["format"].is_string())
    throw FormatError("model file lacks a format tag");
  const std::string fmt = j["format"].get<std::string>();
  if (fmt != kNbmFormat) {
    if (fmt.rfind("planrec-nbm/", 0) == 0)
      throw VersionError("unsupported model version " + fmt + " (expected " + kNbmFormat + ")");
    throw FormatError("not a model file: format " + fmt);
  }
  NaiveBayesModel m;
  try {
    m.alpha = j.at("alpha").get<double>();
    m.goal_names = j.at("goals").get<std::vector<std::string>>();
    m.fluent_names = j.at("fluents").get<std::vector<std::string>>();
    m.class_counts = j.at("class_counts").get<std::vector<std::uint64_t>>();
    m.training_sequences = j.at("training_sequences").get<std::uint64_t>();
    m.log_p_true = j.at("log_p_true").get<std::vector<std::vector<double>>>();
    m.log_p_false = j.at("log_p_false").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
  const std::size_t G = m.goal_names.size();
  const std::size_t N = m.fluent_names.size();
  bool ok = m.class_counts.size() == G && m.log_p_true.size() == G && m.log_p_false.size() == G &&
            m.alpha > 0;
  for (std::size_t g = 0; ok && g < G; ++g)
    ok = m.log_p_true[g].size() == N && m.log_p_false[g].size() == N;
  if (!ok) throw FormatError("model file has inconsistent dimensions");
  return m;
}

}  // namespace planrec
