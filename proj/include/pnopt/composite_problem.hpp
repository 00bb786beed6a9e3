#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "pnopt/types.hpp"

namespace pnopt {

/// Per-solve oracle accounting. Owned by a single solve and passed explicitly
/// so the oracles themselves stay pure.
struct EvalCounters {
  std::int64_t value_evals = 0;     // g evaluations
  std::int64_t gradient_evals = 0;  // grad g evaluations
  std::int64_t hessian_evals = 0;   // Hessian actions / dense Hessians
  std::int64_t prox_evals = 0;
};

/// The smooth part g. Implementations must be immutable after construction.
class SmoothOracle {
 public:
  virtual ~SmoothOracle() = default;

  virtual Eigen::Index dim() const = 0;
  /// May return +inf outside the domain of g.
  virtual double value(const Vector& x) const = 0;
  /// Throws DomainError outside the domain.
  virtual Vector gradient(const Vector& x) const = 0;

  virtual bool has_hessian() const { return false; }
  virtual Vector hessian_action(const Vector& /*x*/, const Vector& /*v*/) const {
    throw Unavailable("hessian action not provided by this oracle");
  }
  virtual std::optional<Matrix> hessian_dense(const Vector& /*x*/) const { return std::nullopt; }

  virtual std::optional<double> lipschitz_grad_hint() const { return std::nullopt; }
  virtual std::optional<double> strong_convexity_hint() const { return std::nullopt; }
  virtual std::optional<double> lipschitz_hessian_hint() const { return std::nullopt; }
};

/// The nonsmooth part h, accessed through its value and proximal mapping.
class NonsmoothOracle {
 public:
  virtual ~NonsmoothOracle() = default;

  /// Extended real valued: +inf outside dom h.
  virtual double value(const Vector& x) const = 0;
  /// argmin_y h(y) + 1/(2t) ||y - x||^2, for t > 0.
  virtual Vector prox(const Vector& x, double t) const = 0;
  /// Whether v is in the subdifferential of h at y (coordinatewise slack tol).
  /// nullopt when the penalty has no explicit subdifferential.
  virtual std::optional<bool> subdifferential_contains(const Vector& /*y*/, const Vector& /*v*/,
                                                       double /*tol*/) const {
    return std::nullopt;
  }
};

struct KnownOptimum {
  Vector x;
  double f = 0.0;
};

/// f = g + h.
struct CompositeProblem {
  std::shared_ptr<const SmoothOracle> smooth;
  std::shared_ptr<const NonsmoothOracle> nonsmooth;
  std::optional<KnownOptimum> known_optimum;
  /// Default starting point; zero when absent.
  std::optional<Vector> initial_point;

  Eigen::Index dim() const { return smooth->dim(); }
};

// Counted oracle access. Each call increments exactly one counter once.
double eval_g(const CompositeProblem& problem, const Vector& x, EvalCounters& counters);
Vector eval_grad(const CompositeProblem& problem, const Vector& x, EvalCounters& counters);
double eval_h(const CompositeProblem& problem, const Vector& x);
Vector eval_prox(const CompositeProblem& problem, const Vector& x, double t,
                 EvalCounters& counters);

/// g(x) + h(x); +inf when either part is outside its domain.
double eval_f(const CompositeProblem& problem, const Vector& x, EvalCounters& counters);
double eval_f(const CompositeProblem& problem, const Vector& x);

/// G_{tf}(x) = (x - prox_{th}(x - t grad g(x))) / t.
Vector composite_gradient_step(const CompositeProblem& problem, const Vector& x, double t,
                               EvalCounters& counters);
Vector composite_gradient_step(const CompositeProblem& problem, const Vector& x, double t);

/// Same, with grad g(x) already available.
Vector composite_gradient_step_from(const CompositeProblem& problem, const Vector& x,
                                    const Vector& grad, double t, EvalCounters& counters);

/// ||G_f(x)|| with unit step.
double optimality_measure(const CompositeProblem& problem, const Vector& x,
                          EvalCounters& counters);
double optimality_measure(const CompositeProblem& problem, const Vector& x);

/// Checks G_{tf}(x) - grad g(x) in dh(x - t G_{tf}(x)) within tol.
/// Throws Unavailable if the penalty has no explicit subdifferential.
bool subgradient_membership_check(const CompositeProblem& problem, const Vector& x, double t,
                                  double tol = 1e-9);

/// Membership test for a caller-supplied composite gradient (used to check
/// deliberately corrupted steps).
bool subgradient_membership_check(const CompositeProblem& problem, const Vector& x,
                                  const Vector& composite_gradient, double t, double tol);

}  // namespace pnopt
