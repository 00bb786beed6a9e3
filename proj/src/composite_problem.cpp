#include "pnopt/composite_problem.hpp"

#include <cmath>

namespace pnopt {

double eval_g(const CompositeProblem& problem, const Vector& x, EvalCounters& counters) {
  require_dim(x.size(), problem.dim(), "eval_g");
  ++counters.value_evals;
  return problem.smooth->value(x);
}

Vector eval_grad(const CompositeProblem& problem, const Vector& x, EvalCounters& counters) {
  require_dim(x.size(), problem.dim(), "eval_grad");
  ++counters.gradient_evals;
  return problem.smooth->gradient(x);
}

double eval_h(const CompositeProblem& problem, const Vector& x) {
  return problem.nonsmooth->value(x);
}

Vector eval_prox(const CompositeProblem& problem, const Vector& x, double t,
                 EvalCounters& counters) {
  require(t > 0.0, "prox: step must be positive");
  ++counters.prox_evals;
  return problem.nonsmooth->prox(x, t);
}

double eval_f(const CompositeProblem& problem, const Vector& x, EvalCounters& counters) {
  const double h = eval_h(problem, x);
  if (h == kInf) {
    ++counters.value_evals;
    return kInf;
  }
  const double g = eval_g(problem, x, counters);
  if (!std::isfinite(g)) return kInf;
  return g + h;
}

double eval_f(const CompositeProblem& problem, const Vector& x) {
  EvalCounters scratch;
  return eval_f(problem, x, scratch);
}

Vector composite_gradient_step_from(const CompositeProblem& problem, const Vector& x,
                                    const Vector& grad, double t, EvalCounters& counters) {
  require(t > 0.0, "composite_gradient_step: step must be positive");
  require_dim(grad.size(), x.size(), "composite_gradient_step");
  const Vector next = eval_prox(problem, x - t * grad, t, counters);
  return (x - next) / t;
}

Vector composite_gradient_step(const CompositeProblem& problem, const Vector& x, double t,
                               EvalCounters& counters) {
  require(t > 0.0, "composite_gradient_step: step must be positive");
  return composite_gradient_step_from(problem, x, eval_grad(problem, x, counters), t, counters);
}

Vector composite_gradient_step(const CompositeProblem& problem, const Vector& x, double t) {
  EvalCounters scratch;
  return composite_gradient_step(problem, x, t, scratch);
}

double optimality_measure(const CompositeProblem& problem, const Vector& x,
                          EvalCounters& counters) {
  return composite_gradient_step(problem, x, 1.0, counters).norm();
}

double optimality_measure(const CompositeProblem& problem, const Vector& x) {
  EvalCounters scratch;
  return optimality_measure(problem, x, scratch);
}

bool subgradient_membership_check(const CompositeProblem& problem, const Vector& x,
                                  const Vector& composite_gradient, double t, double tol) {
  require(t > 0.0, "subgradient_membership_check: step must be positive");
  const Vector grad = problem.smooth->gradient(x);
  const Vector next = x - t * composite_gradient;
  const auto inside =
      problem.nonsmooth->subdifferential_contains(next, composite_gradient - grad, tol);
  if (!inside) throw Unavailable("membership check unavailable");
  return *inside;
}

bool subgradient_membership_check(const CompositeProblem& problem, const Vector& x, double t,
                                  double tol) {
  return subgradient_membership_check(problem, x, composite_gradient_step(problem, x, t), t, tol);
}

}  // namespace pnopt
