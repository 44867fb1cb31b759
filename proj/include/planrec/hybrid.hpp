#pragma once

#include <cmath>
#include <string>

#include "planrec/error.hpp"
#include "planrec/posterior.hpp"

namespace planrec {

struct WeightScheduleParams {
  double a = 0.5;
  double b = -0.15;
  double c = 4.0;
  double d = 2.5;
};

namespace presets {
inline constexpr WeightScheduleParams kCmu{0.5, -0.15, 4.0, 2.5};
inline constexpr WeightScheduleParams kAcmu{0.5, -0.15, 5.0, 1.0};
inline constexpr WeightScheduleParams kLog{0.2, -0.15, 0.0, 0.0};
}  // namespace presets

// NBM weight after t observations with n training sequences.
inline double nbm_weight(const WeightScheduleParams& p, double n, double t) {
  return p.a / (1.0 + std::exp(-p.b * (t - (p.c * n + p.d))));
}

// Either a logistic schedule or a constant NBM weight.
struct WeightSchedule {
  bool fixed = false;
  double fixed_weight = 0.5;
  WeightScheduleParams params = presets::kCmu;
  std::string name = "cmu";

  double nbm(double n, double t) const { return fixed ? fixed_weight : nbm_weight(params, n, t); }
  double prap(double n, double t) const { return 1.0 - nbm(n, t); }
};

// Accepts cmu, acmu, log or fixed:W.
inline WeightSchedule parse_schedule(const std::string& text) {
  WeightSchedule s;
  s.name = text;
  if (text == "cmu") {
    s.params = presets::kCmu;
  } else if (text == "acmu") {
    s.params = presets::kAcmu;
  } else if (text == "log") {
    s.params = presets::kLog;
  } else if (text.rfind("fixed:", 0) == 0) {
    s.fixed = true;
    try {
      std::size_t used = 0;
      s.fixed_weight = std::stod(text.substr(6), &used);
      if (used != text.size() - 6) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw Error("invalid fixed schedule weight in '" + text + "'");
    }
    if (!(s.fixed_weight >= 0.0 && s.fixed_weight <= 1.0))
      throw Error("fixed schedule weight must lie in [0, 1]");
  } else {
    throw Error("unknown schedule '" + text + "' (expected cmu, acmu, log or fixed:W)");
  }
  return s;
}

// P = (1 - w_d) P_s + w_d P_d
inline GoalPosterior combine_ws(const GoalPosterior& p_s, const GoalPosterior& p_d, double w_d) {
  if (p_s.size() != p_d.size()) throw Error("posteriors over different goal sets");
  if (!(w_d >= 0.0 && w_d <= 1.0)) throw Error("weight must lie in [0, 1]");
  GoalPosterior out;
  out.probs.resize(p_s.size());
  const double w_s = 1.0 - w_d;
  for (std::size_t i = 0; i < p_s.size(); ++i) out.probs[i] = w_s * p_s.probs[i] + w_d * p_d.probs[i];
  return out;
}

// Keeps P_s when its maximum is unique, otherwise falls back to the weighted sum.
inline GoalPosterior combine_tb(const GoalPosterior& p_s, const GoalPosterior& p_d, double w_d,
                                double tie_epsilon = 1e-9) {
  if (!(tie_epsilon > 0.0)) throw Error("tie_epsilon must be positive");
  if (argmax_set(p_s, tie_epsilon).size() == 1) {
    if (p_s.size() != p_d.size()) throw Error("posteriors over different goal sets");
    return p_s;
  }
  return combine_ws(p_s, p_d, w_d);
}

}  // namespace planrec
