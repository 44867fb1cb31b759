#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "planrec/benchkit/buc.hpp"
#include "planrec/error.hpp"
#include "planrec/observations.hpp"
#include "planrec/pddl/grounder.hpp"
#include "planrec/pddl/parser.hpp"
#include "planrec/posterior.hpp"

namespace planrec::benchkit {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

// --- Goal set files ---------------------------------------------------------------

struct GoalSet {
  std::vector<GoalSpec> goals;
  std::vector<double> priors;  // empty means uniform
};

inline std::string goals_to_json(const GoalSet& gs) {
  nlohmann::ordered_json j;
  j["format"] = "planrec-goals/1";
  auto& arr = j["goals"] = nlohmann::ordered_json::array();
  for (const auto& g : gs.goals) arr.push_back({{"name", g.name}, {"goal", g.formula}});
  if (!gs.priors.empty()) j["priors"] = gs.priors;
  return j.dump(2) + "\n";
}

inline GoalSet goals_from_json(const std::string& text, const std::string& file = "<goals>") {
  GoalSet gs;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("format") && j["format"] != "planrec-goals/1")
      throw VersionError(file + ": unsupported goal file format " + j["format"].dump());
    for (const auto& g : j.at("goals")) gs.goals.push_back({g.at("name").get<std::string>(), g.at("goal").get<std::string>()});
    if (j.contains("priors")) gs.priors = j["priors"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(file + ": malformed goal file: " + e.what());
  }
  if (gs.goals.empty()) throw FormatError(file + ": goal file lists no goals");
  if (!gs.priors.empty() && gs.priors.size() != gs.goals.size())
    throw FormatError(file + ": one prior per goal is required");
  return gs;
}

// --- Grounded recognition problem ---------------------------------------------------

struct LoadedProblem {
  pddl::DomainAst domain;
  pddl::ProblemAst ast;
  std::shared_ptr<const PlanningProblem> problem;
  std::vector<std::string> goal_names;
  std::vector<GoalDescription> goals;
  std::vector<double> priors;
};

inline LoadedProblem load_problem_text(const std::string& domain_text, const std::string& problem_text,
                                       const GoalSet& gs, const std::string& domain_file = "<domain>",
                                       const std::string& problem_file = "<problem>") {
  LoadedProblem lp;
  lp.domain = pddl::parse_domain(domain_text, domain_file);
  lp.ast = pddl::parse_problem(problem_text, lp.domain, problem_file);
  std::vector<pddl::GoalAst> asts;
  pddl::GroundOptions opt;
  for (const auto& g : gs.goals) {
    asts.push_back(pddl::parse_goal(g.formula, lp.domain, lp.ast, g.name));
    for (auto& a : pddl::goal_atoms(asts.back())) opt.extra_fluents.push_back(std::move(a));
  }
  auto grounded = std::make_shared<PlanningProblem>(pddl::ground(lp.domain, lp.ast, opt));
  grounded->goal = {};
  for (std::size_t i = 0; i < gs.goals.size(); ++i) {
    lp.goal_names.push_back(gs.goals[i].name);
    lp.goals.push_back(pddl::resolve_goal(*grounded, asts[i]));
  }
  lp.priors = gs.priors.empty() ? uniform_priors(gs.goals.size()) : gs.priors;
  check_priors(lp.priors);
  lp.problem = std::move(grounded);
  return lp;
}

inline LoadedProblem load_problem(const fs::path& domain, const fs::path& problem, const fs::path& goals) {
  return load_problem_text(read_file(domain), read_file(problem),
                           goals_from_json(read_file(goals), goals.string()), domain.string(),
                           problem.string());
}

// --- Manifest ------------------------------------------------------------------

inline constexpr const char* kManifestFormat = "planrec-manifest/1";

struct ManifestEntry {
  std::string problem;       // paths relative to the manifest
  std::string goals;
  std::size_t true_goal = 0;
  std::string observations;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::string name = "dataset";
  std::uint64_t seed = 0;
  std::string domain;
  std::vector<ManifestEntry> problems;
};

inline std::string manifest_to_json(const DatasetManifest& m) {
  nlohmann::ordered_json j;
  j["format"] = kManifestFormat;
  j["name"] = m.name;
  j["seed"] = m.seed;
  j["domain"] = m.domain;
  auto& arr = j["problems"] = nlohmann::ordered_json::array();
  for (const auto& e : m.problems)
    arr.push_back({{"problem", e.problem},
                   {"goals", e.goals},
                   {"true_goal", e.true_goal},
                   {"observations", e.observations}});
  return j.dump(2) + "\n";
}

inline DatasetManifest manifest_from_json(const std::string& text, const std::string& file = "<manifest>") {
  DatasetManifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    const std::string fmt = j.at("format").get<std::string>();
    if (fmt != kManifestFormat) throw VersionError(file + ": unsupported manifest format " + fmt);
    m.name = j.value("name", std::string("dataset"));
    m.seed = j.value("seed", std::uint64_t{0});
    m.domain = j.at("domain").get<std::string>();
    for (const auto& e : j.at("problems"))
      m.problems.push_back({e.at("problem").get<std::string>(), e.at("goals").get<std::string>(),
                            e.at("true_goal").get<std::size_t>(), e.at("observations").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(file + ": malformed manifest: " + e.what());
  }
  return m;
}

inline DatasetManifest load_manifest(const fs::path& path) {
  return manifest_from_json(read_file(path), path.string());
}

// --- Dataset --------------------------------------------------------------------

struct DatasetItem {
  std::size_t problem = 0;  // index into Dataset::problems
  std::size_t true_goal = 0;
  ObservationSequence observations;
  std::string source;
};

struct Dataset {
  std::string name;
  std::vector<LoadedProblem> problems;
  std::vector<DatasetItem> items;
};

// Grounds each distinct (problem, goals) pair once.
inline Dataset load_dataset(const fs::path& manifest_path) {
  const DatasetManifest m = load_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();
  Dataset ds;
  ds.name = m.name;
  const std::string domain_text = read_file(base / m.domain);
  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  for (const auto& e : m.problems) {
    const auto key = std::make_pair(e.problem, e.goals);
    auto it = seen.find(key);
    if (it == seen.end()) {
      ds.problems.push_back(load_problem_text(domain_text, read_file(base / e.problem),
                                              goals_from_json(read_file(base / e.goals), e.goals),
                                              m.domain, e.problem));
      it = seen.emplace(key, ds.problems.size() - 1).first;
    }
    const LoadedProblem& lp = ds.problems[it->second];
    if (e.true_goal >= lp.goals.size())
      throw FormatError(manifest_path.string() + ": true goal index " + std::to_string(e.true_goal) +
                        " is outside the goal set of " + e.problem);
    DatasetItem item;
    item.problem = it->second;
    item.true_goal = e.true_goal;
    item.observations = load_observations(*lp.problem, (base / e.observations).string());
    item.source = e.observations;
    ds.items.push_back(std::move(item));
  }
  return ds;
}

}  // namespace planrec::benchkit
