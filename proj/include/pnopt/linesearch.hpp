#pragma once

#include <deque>

#include "pnopt/composite_problem.hpp"

namespace pnopt {

struct LineSearchConfig {
  double alpha = 1e-4;  // sufficient decrease fraction, in (0, 0.5)
  double beta = 0.5;    // backtracking factor, in (0, 1)
  double t_min = 1e-12;
  int nonmonotone_memory = 10;

  void validate() const;
};

enum class LineSearchStatus { Accepted, Failed };

/// On failure, step/point/value hold the best trial seen.
struct LineSearchResult {
  LineSearchStatus status = LineSearchStatus::Failed;
  double step = 0.0;
  Vector point;
  double value = kInf;
  int backtracks = 0;

  bool accepted() const { return status == LineSearchStatus::Accepted; }
};

/// Largest t in {t0, t0 beta, t0 beta^2, ...} >= t_min with
///   f(x + t dx) <= f(x) + alpha t predicted_decrease.
/// +inf trial values are rejections.
LineSearchResult backtrack(const CompositeProblem& problem, const Vector& x, double fx,
                           const Vector& direction, double predicted_decrease,
                           const LineSearchConfig& cfg, EvalCounters& counters,
                           double initial_step = 1.0);

/// Same with the reference value max(history) (Grippo-Lampariello-Lucidi).
LineSearchResult nonmonotone_backtrack(const CompositeProblem& problem, const Vector& x,
                                       const Vector& direction, double predicted_decrease,
                                       const std::deque<double>& history,
                                       const LineSearchConfig& cfg, EvalCounters& counters,
                                       double initial_step = 1.0);

}  // namespace pnopt
