#pragma once

#include <optional>
#include <string>

#include "pnopt/composite_problem.hpp"
#include "pnopt/hessian_models.hpp"

namespace pnopt {

/// Quadratic model of f around an anchor:
///   fhat(x_k + d) - f(x_k) = grad' d + 1/2 d' H d + h(x_k + d) - h(x_k).
struct LocalModel {
  Vector anchor;
  Vector gradient;  // grad g(anchor)
  const CurvatureModel& curvature;
  const NonsmoothOracle& nonsmooth;
  /// Upper curvature estimate M used as the inner step 1/M. Probed when <= 0.
  double curvature_bound = 0.0;

  LocalModel(Vector anchor_point, Vector anchor_gradient, const CurvatureModel& model,
             const NonsmoothOracle& penalty, double upper_bound = 0.0);

  /// fhat(x_k + d) - fhat(x_k), given Hd.
  double value(const Vector& d, const Vector& hd) const;
  double value(const Vector& d) const { return value(d, curvature.apply(d)); }
  /// grad ghat(x_k + d) = grad + H d.
  Vector smooth_gradient(const Vector& d) const { return gradient + curvature.apply(d); }
};

enum class PolicyKind { Adaptive, Exact, FixedIterations };

struct SubproblemPolicy {
  PolicyKind kind = PolicyKind::Adaptive;
  double eta_min = 1e-10;
  double eta_cap = 0.1;
  double tol = 1e-10;
  int max_inner = 1000;
  int count = 10;

  static SubproblemPolicy adaptive(int max_inner = 1000);
  static SubproblemPolicy exact(double tol = 1e-10, int max_inner = 20000);
  static SubproblemPolicy fixed(int count = 10);
};

/// "adaptive", "exact", "fixed:N".
std::string to_string(const SubproblemPolicy& policy);
std::optional<SubproblemPolicy> parse_policy(const std::string& text);

enum class InnerSolver { Fista, Ista };

enum class StopReason { TargetReached, IterationCount, InnerBudgetExhausted };

const char* to_string(StopReason reason);

struct SubproblemResult {
  Vector direction;
  int inner_iterations = 0;
  /// Composite gradient norm of the model with step 1/M at the point that was
  /// compared against the stopping threshold.
  double residual = 0.0;
  StopReason stop_reason = StopReason::IterationCount;
  double model_decrease = 0.0;  // fhat(x_k + d) - fhat(x_k)
  double curvature_bound = 0.0;
};

/// Data from the previous outer iteration needed to measure how well the
/// previous model predicted the gradient at the new anchor.
struct ForcingState {
  std::optional<Vector> previous_anchor;
  std::optional<Vector> previous_gradient;
  std::optional<CurvatureModel> previous_curvature;
  double eta_min = 1e-10;
  double eta_cap = 0.1;

  void record(const Vector& anchor, const Vector& gradient, const CurvatureModel& curvature);
};

/// eta_k = min{0.1, ||grad ghat_{k-1}(x_k) - grad g(x_k)|| / ||grad g(x_{k-1})||},
/// clamped to [eta_min, eta_cap]. Returns eta_cap without history.
double compute_forcing_term(const ForcingState& state, const Vector& x, const Vector& gradient);

/// ||G_{fhat/M}(x_k + d)|| = M ||x_k + d - prox_{h/M}(x_k + d - (grad + Hd)/M)||.
/// Writes the prox point to *prox_point when non-null.
double model_composite_gradient_norm(const LocalModel& model, const Vector& d, const Vector& hd,
                                     double bound, Vector* prox_point = nullptr,
                                     EvalCounters* counters = nullptr);

/// Minimizes the local model from d = 0 with FISTA (restarting on objective
/// increase) or ISTA, using step 1/M.
///   Adaptive: stop when ||G_{fhat/M}(x_k + d)|| <= target.
///   Exact:    stop when ||G_{fhat/M}(x_k + d)|| <= policy.tol.
///   FixedIterations: exactly policy.count iterations.
/// When a residual test passes the returned direction is the prox point of
/// that test, whose residual is no larger.
SubproblemResult solve_subproblem(const LocalModel& model, const SubproblemPolicy& policy,
                                  double target, InnerSolver solver = InnerSolver::Fista,
                                  EvalCounters* counters = nullptr);

struct DirectionQuality {
  double predicted_decrease = 0.0;  // grad' dx + h(x + dx) - h(x)
  bool descent_ok = false;          // predicted_decrease < 0
  /// predicted_decrease <= -dx' H dx + 1e-8 (holds for exact model minimizers).
  bool exact_bound_ok = false;
};

DirectionQuality direction_quality_check(const LocalModel& model, const Vector& direction);

}  // namespace pnopt
