#include "pnopt/subproblem.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace pnopt {

LocalModel::LocalModel(Vector anchor_point, Vector anchor_gradient, const CurvatureModel& model,
                       const NonsmoothOracle& penalty, double upper_bound)
    : anchor(std::move(anchor_point)),
      gradient(std::move(anchor_gradient)),
      curvature(model),
      nonsmooth(penalty),
      curvature_bound(upper_bound) {
  require_dim(gradient.size(), anchor.size(), "LocalModel gradient");
  require_dim(curvature.dim(), anchor.size(), "LocalModel curvature");
}

double LocalModel::value(const Vector& d, const Vector& hd) const {
  return gradient.dot(d) + 0.5 * d.dot(hd) + nonsmooth.value(anchor + d) - nonsmooth.value(anchor);
}

SubproblemPolicy SubproblemPolicy::adaptive(int max_inner) {
  require(max_inner >= 1, "adaptive policy: max_inner must be at least 1");
  SubproblemPolicy p;
  p.kind = PolicyKind::Adaptive;
  p.max_inner = max_inner;
  return p;
}

SubproblemPolicy SubproblemPolicy::exact(double tol, int max_inner) {
  require(tol > 0.0, "exact policy: tol must be positive");
  require(max_inner >= 1, "exact policy: max_inner must be at least 1");
  SubproblemPolicy p;
  p.kind = PolicyKind::Exact;
  p.tol = tol;
  p.max_inner = max_inner;
  return p;
}

SubproblemPolicy SubproblemPolicy::fixed(int count) {
  require(count >= 1, "fixed policy: count must be at least 1");
  SubproblemPolicy p;
  p.kind = PolicyKind::FixedIterations;
  p.count = count;
  p.max_inner = count;
  return p;
}

std::string to_string(const SubproblemPolicy& policy) {
  switch (policy.kind) {
    case PolicyKind::Adaptive: return "adaptive";
    case PolicyKind::Exact: return "exact";
    case PolicyKind::FixedIterations: return "fixed:" + std::to_string(policy.count);
  }
  return "unknown";
}

std::optional<SubproblemPolicy> parse_policy(const std::string& text) {
  if (text == "adaptive") return SubproblemPolicy::adaptive();
  if (text == "exact") return SubproblemPolicy::exact();
  constexpr std::string_view prefix = "fixed:";
  if (text.rfind(prefix, 0) == 0) {
    int count = 0;
    const char* first = text.data() + prefix.size();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, count);
    if (ec != std::errc() || ptr != last || first == last || count < 1) return std::nullopt;
    return SubproblemPolicy::fixed(count);
  }
  return std::nullopt;
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::TargetReached: return "target-reached";
    case StopReason::IterationCount: return "iteration-count";
    case StopReason::InnerBudgetExhausted: return "inner-budget-exhausted";
  }
  return "unknown";
}

void ForcingState::record(const Vector& anchor, const Vector& gradient,
                          const CurvatureModel& curvature) {
  previous_anchor = anchor;
  previous_gradient = gradient;
  previous_curvature = curvature;
}

double compute_forcing_term(const ForcingState& state, const Vector& x, const Vector& gradient) {
  if (!state.previous_anchor || !state.previous_gradient || !state.previous_curvature) {
    return state.eta_cap;
  }
  const double denom = state.previous_gradient->norm();
  if (denom < 1e-300) return state.eta_min;
  const Vector predicted =
      *state.previous_gradient + state.previous_curvature->apply(x - *state.previous_anchor);
  const double eta = std::min(0.1, (predicted - gradient).norm() / denom);
  return std::clamp(eta, state.eta_min, state.eta_cap);
}

double model_composite_gradient_norm(const LocalModel& model, const Vector& d, const Vector& hd,
                                     double bound, Vector* prox_point, EvalCounters* counters) {
  require(bound > 0.0, "model_composite_gradient_norm: bound must be positive");
  const Vector point = model.anchor + d;
  const double step = 1.0 / bound;
  if (counters) ++counters->prox_evals;
  Vector next = model.nonsmooth.prox(point - step * (model.gradient + hd), step);
  const double norm = bound * (point - next).norm();
  if (prox_point) *prox_point = std::move(next);
  return norm;
}

SubproblemResult solve_subproblem(const LocalModel& model, const SubproblemPolicy& policy,
                                  double target, InnerSolver solver, EvalCounters* counters) {
  const Eigen::Index n = model.anchor.size();
  double bound = model.curvature_bound;
  if (bound <= 0.0) bound = eigen_bounds_probe(model.curvature, 50).upper;
  require(bound > 0.0 && std::isfinite(bound), "solve_subproblem: curvature bound must be positive");
  const double step = 1.0 / bound;

  const bool fixed = policy.kind == PolicyKind::FixedIterations;
  const double threshold = policy.kind == PolicyKind::Exact ? policy.tol : target;
  const int budget = fixed ? policy.count : policy.max_inner;

  SubproblemResult result;
  result.curvature_bound = bound;

  Vector d = Vector::Zero(n);
  Vector hd = Vector::Zero(n);
  Vector d_prev = d;
  Vector hd_prev = hd;
  double value = 0.0;
  double momentum = 1.0;

  auto prox_step = [&](const Vector& y, const Vector& hy) {
    if (counters) ++counters->prox_evals;
    const Vector point = model.anchor + y;
    return Vector(model.nonsmooth.prox(point - step * (model.gradient + hy), step) - model.anchor);
  };

  int it = 0;
  for (;; ++it) {
    if (!fixed) {
      Vector refined;
      result.residual = model_composite_gradient_norm(model, d, hd, bound, &refined, counters);
      if (result.residual <= threshold) {
        result.direction = refined - model.anchor;
        result.inner_iterations = it;
        result.stop_reason = StopReason::TargetReached;
        result.model_decrease = model.value(result.direction);
        return result;
      }
    }
    if (it >= budget) break;

    double beta = 0.0;
    double next_momentum = 1.0;
    if (solver == InnerSolver::Fista) {
      next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      beta = (momentum - 1.0) / next_momentum;
    }
    const Vector y = d + beta * (d - d_prev);
    const Vector hy = hd + beta * (hd - hd_prev);
    Vector d_next = prox_step(y, hy);
    Vector hd_next = model.curvature.apply(d_next);
    const double next_value = model.value(d_next, hd_next);

    if (next_value > value && beta != 0.0) {
      // Restart: drop the extrapolated step and the momentum.
      d_prev = d;
      hd_prev = hd;
      momentum = 1.0;
      continue;
    }
    d_prev = std::move(d);
    hd_prev = std::move(hd);
    d = std::move(d_next);
    hd = std::move(hd_next);
    value = next_value;
    momentum = next_momentum;
  }

  result.direction = d;
  result.inner_iterations = it;
  result.model_decrease = value;
  if (fixed) {
    result.residual = model_composite_gradient_norm(model, d, hd, bound, nullptr, counters);
    result.stop_reason = StopReason::IterationCount;
  } else {
    result.stop_reason = StopReason::InnerBudgetExhausted;
  }
  return result;
}

DirectionQuality direction_quality_check(const LocalModel& model, const Vector& direction) {
  require_dim(direction.size(), model.anchor.size(), "direction_quality_check");
  DirectionQuality q;
  q.predicted_decrease = model.gradient.dot(direction) +
                         model.nonsmooth.value(model.anchor + direction) -
                         model.nonsmooth.value(model.anchor);
  q.descent_ok = q.predicted_decrease < 0.0;
  q.exact_bound_ok =
      q.predicted_decrease <= -direction.dot(model.curvature.apply(direction)) + 1e-8;
  return q;
}

}  // namespace pnopt
