#include "pnopt/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

namespace pnopt {

const char* to_string(Method method) {
  switch (method) {
    case Method::ProxNewton: return "prox-newton";
    case Method::ProxBfgs: return "prox-bfgs";
    case Method::ProxLbfgs: return "prox-lbfgs";
    case Method::Fista: return "fista";
    case Method::Sparsa: return "sparsa";
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& text) {
  for (Method m : {Method::ProxNewton, Method::ProxBfgs, Method::ProxLbfgs, Method::Fista,
                   Method::Sparsa}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::LineSearchFailed: return "line-search-failed";
  }
  return "unknown";
}

const char* to_string(RateClass rate) {
  switch (rate) {
    case RateClass::Unclassifiable: return "unclassifiable";
    case RateClass::Sublinear: return "sublinear";
    case RateClass::Linear: return "linear";
    case RateClass::Superlinear: return "superlinear";
  }
  return "unknown";
}

void SolverOptions::validate() const {
  require(tol > 0.0, "solver options: tol must be positive");
  require(max_outer >= 1, "solver options: max_outer must be at least 1");
  require(lbfgs_memory >= 1, "solver options: memory must be at least 1");
  require(eigen_probes >= 1, "solver options: eigen_probes must be at least 1");
  linesearch.validate();
}

namespace {

using Clock = std::chrono::steady_clock;

// Predicted decreases below this fraction of |f| cannot be resolved by
// comparing function values.
constexpr double kRoundoff = 1e-14;

class Recorder {
 public:
  Recorder(const SolverOptions& options, SolveReport& report)
      : options_(options), report_(report), start_(Clock::now()) {}

  double elapsed() const {
    if (!options_.record_timing) return 0.0;
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

  void row(TraceRecord rec, const EvalCounters& counters) {
    rec.iter = static_cast<int>(report_.trace.size()) + 1;
    rec.cum_fev = counters.value_evals;
    rec.cum_gev = counters.gradient_evals;
    rec.cum_prox = counters.prox_evals;
    rec.elapsed_sec = elapsed();
    report_.diagnostics.total_inner_iterations += rec.inner_iterations;
    report_.trace.push_back(rec);
  }

  void iterate(const Vector& x) {
    if (options_.record_iterates) report_.iterates.push_back(x);
  }

  void finish(SolveStatus status, const Vector& x, double f, double norm_gf,
              const EvalCounters& counters) {
    report_.status = status;
    report_.x_final = x;
    report_.f_final = f;
    report_.norm_gf_final = norm_gf;
    report_.counters = counters;
    report_.wall_sec = elapsed();

    std::optional<int> from;
    for (auto it = report_.trace.rbegin(); it != report_.trace.rend(); ++it) {
      if (it->step != 1.0) break;
      from = it->iter;
    }
    report_.diagnostics.unit_step_from = from;

    if (options_.reference_solution && options_.record_iterates) {
      const auto errors = error_sequence(report_, *options_.reference_solution);
      report_.diagnostics.rate = rate_estimate(errors);
    }
  }

 private:
  const SolverOptions& options_;
  SolveReport& report_;
  Clock::time_point start_;
};

Vector starting_point(const CompositeProblem& problem, const SolverOptions& options) {
  Vector x = options.x0              ? *options.x0
             : problem.initial_point ? *problem.initial_point
                                     : Vector::Zero(problem.dim());
  require_dim(x.size(), problem.dim(), "starting point");
  return x;
}

CurvatureModel initial_model(const CompositeProblem& problem, const SolverOptions& options) {
  switch (options.method) {
    case Method::ProxNewton: return CurvatureModel::exact_hessian(problem.smooth);
    case Method::ProxBfgs: return CurvatureModel::dense_bfgs(problem.dim(), options.bfgs_initial_scaling);
    case Method::ProxLbfgs:
      return CurvatureModel::limited_memory_bfgs(problem.dim(), options.lbfgs_memory);
    default: break;
  }
  throw ContractViolation("initial_model: not a proximal Newton-type method");
}

SolveReport prepare(const SolverOptions& options) {
  options.validate();
  SolveReport report;
  report.method = to_string(options.method);
  report.policy = options.method == Method::Fista || options.method == Method::Sparsa
                      ? "none"
                      : to_string(options.policy);
  report.seed = options.seed;
  return report;
}

double initial_value(const CompositeProblem& problem, const Vector& x, EvalCounters& counters) {
  const double f = eval_f(problem, x, counters);
  require(std::isfinite(f), "starting point is outside dom f");
  return f;
}

SolveReport run_proximal_newton(const CompositeProblem& problem, const SolverOptions& options) {
  SolveReport report = prepare(options);
  Recorder rec(options, report);
  EvalCounters counters;

  Vector x = starting_point(problem, options);
  double f = initial_value(problem, x, counters);
  Vector grad = eval_grad(problem, x, counters);
  double norm_gf = composite_gradient_step_from(problem, x, grad, 1.0, counters).norm();
  rec.iterate(x);

  CurvatureModel model = initial_model(problem, options);
  const bool adaptive = options.policy.kind == PolicyKind::Adaptive;
  ForcingState forcing;
  forcing.eta_min = options.policy.eta_min;
  forcing.eta_cap = options.policy.eta_cap;

  std::optional<Matrix> reference_hessian;
  if (options.reference_solution && problem.smooth->has_hessian()) {
    reference_hessian = problem.smooth->hessian_dense(*options.reference_solution);
  }

  const NonsmoothOracle& penalty = *problem.nonsmooth;
  SolveStatus status = SolveStatus::MaxIterations;

  for (int k = 0;; ++k) {
    if (norm_gf <= options.tol) {
      status = SolveStatus::Converged;
      break;
    }
    if (k >= options.max_outer) break;

    model.set_anchor(x, counters);
    const std::uint64_t probe_seed = options.seed + static_cast<std::uint64_t>(k);

    auto attempt = [&](const CurvatureModel& curvature, double& eta, SubproblemResult& sub,
                       DirectionQuality& quality) {
      const double bound = eigen_bounds_probe(curvature, options.eigen_probes, probe_seed).upper;
      eta = 0.0;
      double target = 0.0;
      if (adaptive) {
        eta = compute_forcing_term(forcing, x, grad);
        target = eta * composite_gradient_step_from(problem, x, grad, 1.0 / bound, counters).norm();
      }
      LocalModel local(x, grad, curvature, penalty, bound);
      sub = solve_subproblem(local, options.policy, target, options.inner_solver, &counters);
      quality = direction_quality_check(local, sub.direction);
      if (!quality.descent_ok) return LineSearchResult{};
      return backtrack(problem, x, f, sub.direction, quality.predicted_decrease,
                       options.linesearch, counters);
    };

    double eta = 0.0;
    SubproblemResult sub;
    DirectionQuality quality;
    LineSearchResult ls = attempt(model, eta, sub, quality);
    const CurvatureModel* used = &model;
    std::optional<CurvatureModel> fallback;

    if (!ls.accepted() || ls.step < 1.0) {
      // Roundoff rule: the decrease is below what f values can resolve.
      const double scale = kRoundoff * std::max(1.0, std::abs(f));
      if (std::abs(quality.predicted_decrease) <= scale) {
        const Vector trial = x + sub.direction;
        const double value = eval_f(problem, trial, counters);
        if (value <= f + scale) {
          ls = LineSearchResult{LineSearchStatus::Accepted, 1.0, trial, value, 0};
          ++report.diagnostics.roundoff_steps;
        }
      }
    }
    if (!ls.accepted()) {
      double tau = eigen_bounds_probe(model, options.eigen_probes, probe_seed).upper;
      if (auto hint = problem.smooth->lipschitz_grad_hint()) tau = std::max(tau, *hint);
      fallback = CurvatureModel::scaled_identity(problem.dim(), std::max(tau, 1e-10));
      ++report.diagnostics.curvature_resets;
      ls = attempt(*fallback, eta, sub, quality);
      used = &*fallback;
      if (!ls.accepted()) {
        status = SolveStatus::LineSearchFailed;
        break;
      }
    }

    Vector grad_next = eval_grad(problem, ls.point, counters);
    if (reference_hessian && sub.direction.norm() > 0.0) {
      const Vector dx = sub.direction;
      report.diagnostics.dennis_more_ratios.push_back(
          (used->apply(dx) - (*reference_hessian) * dx).norm() / dx.norm());
    }
    if (adaptive) forcing.record(x, grad, *used);

    const SecantPair pair{ls.point - x, grad_next - grad};
    if (fallback) {
      model = initial_model(problem, options);
    }
    model.update(pair);

    x = std::move(ls.point);
    f = ls.value;
    grad = std::move(grad_next);
    norm_gf = composite_gradient_step_from(problem, x, grad, 1.0, counters).norm();
    rec.iterate(x);

    TraceRecord row;
    row.step = ls.step;
    row.f = f;
    row.norm_gf = norm_gf;
    row.predicted_decrease = quality.predicted_decrease;
    row.eta = eta;
    row.inner_iterations = sub.inner_iterations;
    row.backtracks = ls.backtracks;
    rec.row(row, counters);
  }

  report.diagnostics.skipped_updates = model.skipped_updates();
  rec.finish(status, x, f, norm_gf, counters);
  return report;
}

}  // namespace

SolveReport solve(const CompositeProblem& problem, const SolverOptions& options) {
  switch (options.method) {
    case Method::Fista: return run_fista(problem, options);
    case Method::Sparsa: return run_sparsa(problem, options);
    default: return run_proximal_newton(problem, options);
  }
}

SolveReport run_fista(const CompositeProblem& problem, const SolverOptions& options) {
  SolveReport report = prepare(options);
  report.method = to_string(Method::Fista);
  report.policy = "none";
  Recorder rec(options, report);
  EvalCounters counters;

  Vector x = starting_point(problem, options);
  double f = initial_value(problem, x, counters);
  Vector grad = eval_grad(problem, x, counters);
  double norm_gf = composite_gradient_step_from(problem, x, grad, 1.0, counters).norm();
  rec.iterate(x);

  double lipschitz = problem.smooth->lipschitz_grad_hint().value_or(1.0);
  if (!(lipschitz > 0.0)) lipschitz = 1.0;
  Vector y = x;
  double momentum = 1.0;
  SolveStatus status = SolveStatus::MaxIterations;

  for (int k = 0;; ++k) {
    if (norm_gf <= options.tol) {
      status = SolveStatus::Converged;
      break;
    }
    if (k >= options.max_outer) break;

    int backtracks = 0;
    auto prox_gradient_from = [&](const Vector& point, const Vector& grad_point, double& g_out) {
      const double g_point = eval_g(problem, point, counters);
      for (;;) {
        Vector candidate =
            eval_prox(problem, point - grad_point / lipschitz, 1.0 / lipschitz, counters);
        const Vector diff = candidate - point;
        g_out = eval_g(problem, candidate, counters);
        if (std::isfinite(g_out) &&
            g_out <= g_point + grad_point.dot(diff) + 0.5 * lipschitz * diff.squaredNorm() +
                         kRoundoff * std::max(1.0, std::abs(g_point))) {
          return candidate;
        }
        lipschitz *= 2.0;
        ++backtracks;
        require(lipschitz < 1e300, "run_fista: Lipschitz estimate diverged");
      }
    };

    double g_next = kInf;
    Vector next = y == x ? prox_gradient_from(x, grad, g_next)
                         : prox_gradient_from(y, eval_grad(problem, y, counters), g_next);
    double f_next = g_next + eval_h(problem, next);
    if (options.fista_restart && f_next > f && y != x) {
      // Function-value restart: drop the momentum and step from x instead.
      y = x;
      momentum = 1.0;
      next = prox_gradient_from(x, grad, g_next);
      f_next = g_next + eval_h(problem, next);
    }

    const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = next + ((momentum - 1.0) / momentum_next) * (next - x);
    momentum = momentum_next;
    const double predicted =
        grad.dot(next - x) + eval_h(problem, next) - eval_h(problem, x);
    x = std::move(next);
    f = f_next;
    grad = eval_grad(problem, x, counters);
    norm_gf = composite_gradient_step_from(problem, x, grad, 1.0, counters).norm();
    rec.iterate(x);

    TraceRecord row;
    row.step = 1.0 / lipschitz;
    row.f = f;
    row.norm_gf = norm_gf;
    row.predicted_decrease = predicted;
    row.backtracks = backtracks;
    rec.row(row, counters);
  }

  rec.finish(status, x, f, norm_gf, counters);
  return report;
}

SolveReport run_sparsa(const CompositeProblem& problem, const SolverOptions& options) {
  SolveReport report = prepare(options);
  report.method = to_string(Method::Sparsa);
  report.policy = "none";
  Recorder rec(options, report);
  EvalCounters counters;

  Vector x = starting_point(problem, options);
  double f = initial_value(problem, x, counters);
  Vector grad = eval_grad(problem, x, counters);
  double norm_gf = composite_gradient_step_from(problem, x, grad, 1.0, counters).norm();
  rec.iterate(x);

  CurvatureModel model = CurvatureModel::scaled_identity(problem.dim(), 1.0);
  std::deque<double> history{f};
  SolveStatus status = SolveStatus::MaxIterations;

  for (int k = 0;; ++k) {
    if (norm_gf <= options.tol) {
      status = SolveStatus::Converged;
      break;
    }
    if (k >= options.max_outer) break;

    const double tau = model.tau();
    const Vector direction = eval_prox(problem, x - grad / tau, 1.0 / tau, counters) - x;
    const double predicted =
        grad.dot(direction) + eval_h(problem, x + direction) - eval_h(problem, x);

    LineSearchResult ls;
    if (predicted < 0.0) {
      ls = nonmonotone_backtrack(problem, x, direction, predicted, history, options.linesearch,
                                 counters);
    }
    if (!ls.accepted()) {
      const double scale = kRoundoff * std::max(1.0, std::abs(f));
      const Vector trial = x + direction;
      if (std::abs(predicted) <= scale) {
        const double value = eval_f(problem, trial, counters);
        if (value <= f + scale) {
          ls = LineSearchResult{LineSearchStatus::Accepted, 1.0, trial, value, 0};
          ++report.diagnostics.roundoff_steps;
        }
      }
      if (!ls.accepted()) {
        status = SolveStatus::LineSearchFailed;
        break;
      }
    }

    Vector grad_next = eval_grad(problem, ls.point, counters);
    model.update(SecantPair{ls.point - x, grad_next - grad});
    x = std::move(ls.point);
    f = ls.value;
    grad = std::move(grad_next);
    norm_gf = composite_gradient_step_from(problem, x, grad, 1.0, counters).norm();
    rec.iterate(x);

    history.push_back(f);
    while (static_cast<int>(history.size()) > options.linesearch.nonmonotone_memory)
      history.pop_front();

    TraceRecord row;
    row.step = ls.step;
    row.f = f;
    row.norm_gf = norm_gf;
    row.predicted_decrease = predicted;
    row.backtracks = ls.backtracks;
    rec.row(row, counters);
  }

  report.diagnostics.skipped_updates = model.skipped_updates();
  rec.finish(status, x, f, norm_gf, counters);
  return report;
}

double dennis_more_ratio(const CompositeProblem& problem, const Vector& reference,
                         const CurvatureModel& model, const Vector& direction) {
  if (!problem.smooth->has_hessian()) throw Unavailable("dennis_more_ratio: no Hessian oracle");
  const double norm = direction.norm();
  if (norm == 0.0) return 0.0;
  const Vector exact = problem.smooth->hessian_action(reference, direction);
  return (model.apply(direction) - exact).norm() / norm;
}

RateEstimate rate_estimate(std::span<const double> errors, double floor) {
  std::vector<double> kept;
  for (double e : errors) {
    if (!(e > floor)) break;
    kept.push_back(e);
  }
  if (kept.size() < 5) return {RateClass::Unclassifiable, 0.0};

  std::vector<double> ratios;
  for (std::size_t i = 0; i + 1 < kept.size(); ++i) ratios.push_back(kept[i + 1] / kept[i]);
  const std::size_t n = ratios.size();

  bool superlinear = true;
  for (std::size_t j = n - 3; j < n; ++j) {
    if (!(ratios[j] < 0.5 * ratios[j - 1] && ratios[j] < 0.1)) superlinear = false;
  }
  if (superlinear) return {RateClass::Superlinear, 0.0};

  const std::size_t window = std::min<std::size_t>(n, 5);
  std::vector<double> tail(ratios.end() - static_cast<std::ptrdiff_t>(window), ratios.end());
  std::vector<double> sorted = tail;
  std::sort(sorted.begin(), sorted.end());
  const double median = window % 2 == 1
                            ? sorted[window / 2]
                            : 0.5 * (sorted[window / 2 - 1] + sorted[window / 2]);
  const bool stable = std::all_of(tail.begin(), tail.end(), [&](double r) {
    return std::abs(r - median) <= 0.2 * median;
  });
  if (median < 1.0 && stable) return {RateClass::Linear, median};
  return {RateClass::Sublinear, 0.0};
}

std::vector<double> error_sequence(const SolveReport& report, const Vector& reference) {
  std::vector<double> out;
  out.reserve(report.iterates.size());
  for (const auto& x : report.iterates) out.push_back((x - reference).norm());
  return out;
}

double relative_suboptimality(double f, double fstar) {
  return (f - fstar) / std::max(1.0, std::abs(fstar));
}

std::optional<SuboptimalityHit> first_reaching(const SolveReport& report, double fstar,
                                               double level) {
  std::int64_t inner = 0;
  for (const auto& row : report.trace) {
    inner += row.inner_iterations;
    if (relative_suboptimality(row.f, fstar) <= level) {
      return SuboptimalityHit{row.iter, inner, row.cum_fev};
    }
  }
  return std::nullopt;
}

}  // namespace pnopt
