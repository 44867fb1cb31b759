#pragma once

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "planrec/benchkit/buc.hpp"
#include "planrec/sampler.hpp"

namespace planrec::benchkit {

struct LogisticsParams {
  std::size_t cities = 3;
  std::size_t locations_per_city = 7;  // one of them is the airport
  std::size_t airplanes = 2;
  std::size_t packages = 4;
  std::size_t max_packages_per_goal = 1;
};

struct LogisticsBundle {
  std::string domain;
  std::string problem;
  std::vector<GoalSpec> goals;
};

inline constexpr const char* kLogisticsDomain = R"((define (domain logistics)
  (:requirements :strips :typing)
  (:types truck airplane - vehicle
          package vehicle - physobj
          airport - location
          location city - object)
  (:predicates
    (in-city ?l - location ?c - city)
    (at ?o - physobj ?l - location)
    (in ?p - package ?v - vehicle)
    (distinct ?a ?b - location))
  (:action load-truck
    :parameters (?p - package ?t - truck ?l - location)
    :precondition (and (at ?t ?l) (at ?p ?l))
    :effect (and (in ?p ?t) (not (at ?p ?l))))
  (:action load-airplane
    :parameters (?p - package ?a - airplane ?l - airport)
    :precondition (and (at ?p ?l) (at ?a ?l))
    :effect (and (in ?p ?a) (not (at ?p ?l))))
  (:action unload-truck
    :parameters (?p - package ?t - truck ?l - location)
    :precondition (and (at ?t ?l) (in ?p ?t))
    :effect (and (at ?p ?l) (not (in ?p ?t))))
  (:action unload-airplane
    :parameters (?p - package ?a - airplane ?l - airport)
    :precondition (and (in ?p ?a) (at ?a ?l))
    :effect (and (at ?p ?l) (not (in ?p ?a))))
  (:action drive-truck
    :parameters (?t - truck ?from ?to - location ?c - city)
    :precondition (and (at ?t ?from) (in-city ?from ?c) (in-city ?to ?c) (distinct ?from ?to))
    :effect (and (at ?t ?to) (not (at ?t ?from))))
  (:action fly-airplane
    :parameters (?a - airplane ?from ?to - airport)
    :precondition (and (at ?a ?from) (distinct ?from ?to))
    :effect (and (at ?a ?to) (not (at ?a ?from))))
)
)";

inline LogisticsBundle gen_logistics(std::size_t num_goals, std::uint64_t seed,
                                     const LogisticsParams& prm = {}) {
  if (num_goals == 0) throw Error("at least one goal is required");
  if (prm.cities == 0 || prm.locations_per_city == 0 || prm.packages == 0)
    throw Error("logistics parameters must be positive");
  Rng rng(seed);
  LogisticsBundle b;
  b.domain = kLogisticsDomain;

  auto loc = [](std::size_t c, std::size_t i) {
    return i == 0 ? "apt" + std::to_string(c + 1)
                  : "loc" + std::to_string(c + 1) + "-" + std::to_string(i);
  };
  std::vector<std::string> all_locs;
  for (std::size_t c = 0; c < prm.cities; ++c)
    for (std::size_t i = 0; i < prm.locations_per_city; ++i) all_locs.push_back(loc(c, i));

  std::ostringstream os;
  os << "(define (problem logistics-" << seed << ")\n  (:domain logistics)\n  (:objects\n";
  os << "   ";
  for (std::size_t c = 0; c < prm.cities; ++c) os << " city" << c + 1;
  os << " - city\n   ";
  for (std::size_t c = 0; c < prm.cities; ++c) os << ' ' << loc(c, 0);
  os << " - airport\n   ";
  for (std::size_t c = 0; c < prm.cities; ++c)
    for (std::size_t i = 1; i < prm.locations_per_city; ++i) os << ' ' << loc(c, i);
  os << " - location\n   ";
  for (std::size_t c = 0; c < prm.cities; ++c) os << " truck" << c + 1;
  os << " - truck\n   ";
  for (std::size_t a = 0; a < prm.airplanes; ++a) os << " plane" << a + 1;
  os << " - airplane\n   ";
  for (std::size_t p = 0; p < prm.packages; ++p) os << " pkg" << p + 1;
  os << " - package)\n  (:init\n";
  for (std::size_t c = 0; c < prm.cities; ++c)
    for (std::size_t i = 0; i < prm.locations_per_city; ++i)
      os << "    (in-city " << loc(c, i) << " city" << c + 1 << ")\n";
  for (const auto& a : all_locs)
    for (const auto& c : all_locs)
      if (a != c) os << "    (distinct " << a << ' ' << c << ")\n";
  for (std::size_t c = 0; c < prm.cities; ++c)
    os << "    (at truck" << c + 1 << ' ' << loc(c, rng.below(prm.locations_per_city)) << ")\n";
  for (std::size_t a = 0; a < prm.airplanes; ++a)
    os << "    (at plane" << a + 1 << ' ' << loc(rng.below(prm.cities), 0) << ")\n";
  std::vector<std::size_t> start(prm.packages);
  for (std::size_t p = 0; p < prm.packages; ++p) {
    start[p] = rng.below(all_locs.size());
    os << "    (at pkg" << p + 1 << ' ' << all_locs[start[p]] << ")\n";
  }
  os << "  )\n";

  // Each goal delivers one or more packages away from their start.
  std::set<std::string> formulas;
  std::size_t attempts = 0;
  while (b.goals.size() < num_goals) {
    if (++attempts > 100000) throw Error("cannot generate enough distinct logistics goals");
    const std::size_t count = 1 + rng.below(std::min(prm.max_packages_per_goal, prm.packages));
    std::vector<std::size_t> pkgs;
    while (pkgs.size() < count) {
      const auto p = static_cast<std::size_t>(rng.below(prm.packages));
      if (std::find(pkgs.begin(), pkgs.end(), p) == pkgs.end()) pkgs.push_back(p);
    }
    std::sort(pkgs.begin(), pkgs.end());
    std::vector<std::string> atoms;
    for (std::size_t p : pkgs) {
      std::size_t dest = rng.below(all_locs.size() - 1);
      if (dest >= start[p]) ++dest;
      atoms.push_back("(at pkg" + std::to_string(p + 1) + " " + all_locs[dest] + ")");
    }
    std::string f = atoms.size() == 1 ? atoms[0] : "(and";
    if (atoms.size() > 1) {
      for (const auto& a : atoms) f += " " + a;
      f += ")";
    }
    if (!formulas.insert(f).second) continue;
    b.goals.push_back({"g" + std::to_string(b.goals.size() + 1), f});
  }
  os << "  (:goal " << b.goals.front().formula << ")\n)\n";
  b.problem = os.str();
  return b;
}

}  // namespace planrec::benchkit
