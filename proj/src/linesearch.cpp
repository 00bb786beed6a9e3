#include "pnopt/linesearch.hpp"

#include <algorithm>

namespace pnopt {

void LineSearchConfig::validate() const {
  require(alpha > 0.0 && alpha < 0.5, "line search: alpha must lie in (0, 0.5)");
  require(beta > 0.0 && beta < 1.0, "line search: beta must lie in (0, 1)");
  require(t_min > 0.0, "line search: t_min must be positive");
  require(nonmonotone_memory >= 1, "line search: nonmonotone memory must be at least 1");
}

namespace {

LineSearchResult search(const CompositeProblem& problem, const Vector& x, double reference,
                        const Vector& direction, double predicted_decrease,
                        const LineSearchConfig& cfg, EvalCounters& counters,
                        double initial_step) {
  cfg.validate();
  require_dim(direction.size(), x.size(), "line search direction");
  require(predicted_decrease < 0.0, "line search: direction is not a descent direction");
  require(initial_step > 0.0, "line search: initial step must be positive");

  LineSearchResult best;
  double t = initial_step;
  int backtracks = 0;
  while (t >= cfg.t_min) {
    Vector trial = x + t * direction;
    const double value = eval_f(problem, trial, counters);
    if (value <= reference + cfg.alpha * t * predicted_decrease) {
      return {LineSearchStatus::Accepted, t, std::move(trial), value, backtracks};
    }
    if (value < best.value) {
      best.step = t;
      best.point = trial;
      best.value = value;
    }
    t *= cfg.beta;
    ++backtracks;
  }
  best.status = LineSearchStatus::Failed;
  best.backtracks = backtracks;
  if (best.point.size() == 0) best.point = x;
  return best;
}

}  // namespace

LineSearchResult backtrack(const CompositeProblem& problem, const Vector& x, double fx,
                           const Vector& direction, double predicted_decrease,
                           const LineSearchConfig& cfg, EvalCounters& counters,
                           double initial_step) {
  return search(problem, x, fx, direction, predicted_decrease, cfg, counters, initial_step);
}

LineSearchResult nonmonotone_backtrack(const CompositeProblem& problem, const Vector& x,
                                       const Vector& direction, double predicted_decrease,
                                       const std::deque<double>& history,
                                       const LineSearchConfig& cfg, EvalCounters& counters,
                                       double initial_step) {
  require(!history.empty(), "nonmonotone_backtrack: empty history");
  const double reference = *std::max_element(history.begin(), history.end());
  return search(problem, x, reference, direction, predicted_decrease, cfg, counters,
                initial_step);
}

}  // namespace pnopt
