#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "planrec/error.hpp"
#include "planrec/model.hpp"

namespace planrec {

struct ObservationSequence {
  std::vector<ActionId> actions;

  std::size_t size() const noexcept { return actions.size(); }
  bool empty() const noexcept { return actions.empty(); }

  // The first t observations.
  ObservationSequence prefix(std::size_t t) const {
    return {std::vector<ActionId>(actions.begin(), actions.begin() + static_cast<std::ptrdiff_t>(t))};
  }
  friend bool operator==(const ObservationSequence&, const ObservationSequence&) = default;
};

namespace detail {
inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}
}  // namespace detail

// Non-empty, non-comment lines of an observation file.
inline std::vector<std::string> read_observation_lines(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.push_back(t);
  }
  return out;
}

inline ObservationSequence resolve_observations(const PlanningProblem& p,
                                                const std::vector<std::string>& names,
                                                const std::string& file = "<observations>") {
  NameIndex index(p);
  ObservationSequence seq;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto id = index.action(names[i]);
    if (!id)
      throw FormatError(file + ": observation " + std::to_string(i) + " '" + names[i] +
                        "' is not a ground action of the problem");
    seq.actions.push_back(*id);
  }
  return seq;
}

inline ObservationSequence parse_observations(const PlanningProblem& p, const std::string& text,
                                              const std::string& file = "<observations>") {
  std::istringstream in(text);
  return resolve_observations(p, read_observation_lines(in), file);
}

inline ObservationSequence load_observations(const PlanningProblem& p, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open observation file " + path);
  return resolve_observations(p, read_observation_lines(in), path);
}

inline void write_observations(std::ostream& os, const PlanningProblem& p,
                               const ObservationSequence& seq) {
  for (ActionId a : seq.actions) os << p.action(a).name << '\n';
}

}  // namespace planrec
