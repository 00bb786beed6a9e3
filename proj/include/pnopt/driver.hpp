#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pnopt/composite_problem.hpp"
#include "pnopt/hessian_models.hpp"
#include "pnopt/linesearch.hpp"
#include "pnopt/subproblem.hpp"

namespace pnopt {

enum class Method { ProxNewton, ProxBfgs, ProxLbfgs, Fista, Sparsa };

/// "prox-newton", "prox-bfgs", "prox-lbfgs", "fista", "sparsa".
const char* to_string(Method method);
std::optional<Method> parse_method(const std::string& text);

struct SolverOptions {
  Method method = Method::ProxNewton;
  int lbfgs_memory = 50;
  /// Dense BFGS starts from (y'y / s'y) I at the first accepted pair instead of I.
  bool bfgs_initial_scaling = false;
  SubproblemPolicy policy = SubproblemPolicy::adaptive();
  InnerSolver inner_solver = InnerSolver::Fista;
  double tol = 1e-8;  // on ||G_f(x)||
  int max_outer = 500;
  LineSearchConfig linesearch;
  std::uint64_t seed = 0;
  int eigen_probes = 50;
  /// Function-value restart for the outer FISTA baseline (plain momentum when false).
  bool fista_restart = false;

  /// Starting point; falls back to the problem's default, then to zero.
  std::optional<Vector> x0;
  /// Enables Dennis-More ratios and the rate classification.
  std::optional<Vector> reference_solution;
  bool record_iterates = false;
  /// When false, elapsed times are reported as zero (byte-stable traces).
  bool record_timing = true;

  void validate() const;
};

/// One row per outer iteration, describing the step that produced x_iter.
struct TraceRecord {
  int iter = 0;
  double step = 0.0;
  double f = 0.0;
  double norm_gf = 0.0;
  double predicted_decrease = 0.0;
  double eta = 0.0;
  int inner_iterations = 0;
  std::int64_t cum_fev = 0;
  std::int64_t cum_gev = 0;
  std::int64_t cum_prox = 0;
  double elapsed_sec = 0.0;
  int backtracks = 0;
};

enum class SolveStatus { Converged, MaxIterations, LineSearchFailed };
const char* to_string(SolveStatus status);

enum class RateClass { Unclassifiable, Sublinear, Linear, Superlinear };
const char* to_string(RateClass rate);

struct RateEstimate {
  RateClass rate = RateClass::Unclassifiable;
  double rho = 0.0;  // median tail ratio when linear
};

struct SolveDiagnostics {
  /// ||(H_k - hess g(x_ref)) dx_k|| / ||dx_k|| per outer iteration.
  std::vector<double> dennis_more_ratios;
  /// First iter after which every step length is 1.
  std::optional<int> unit_step_from;
  std::optional<RateEstimate> rate;
  std::int64_t skipped_updates = 0;
  int curvature_resets = 0;
  /// Steps taken under the roundoff rule (predicted decrease below f resolution).
  int roundoff_steps = 0;
  std::int64_t total_inner_iterations = 0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIterations;
  Vector x_final;
  double f_final = 0.0;
  double norm_gf_final = 0.0;
  std::vector<TraceRecord> trace;
  SolveDiagnostics diagnostics;
  /// x_0, x_1, ... when SolverOptions::record_iterates is set.
  std::vector<Vector> iterates;
  EvalCounters counters;
  double wall_sec = 0.0;
  std::string method;
  std::string policy;
  std::uint64_t seed = 0;
};

/// Dispatches on options.method. The proximal Newton-type loop: solve the
/// local model for dx_k, backtrack, update the curvature from the accepted
/// secant pair; stop when ||G_f(x_k)|| <= tol or max_outer is reached.
SolveReport solve(const CompositeProblem& problem, const SolverOptions& options);

/// Accelerated proximal gradient with a backtracked Lipschitz estimate and
/// function-value restart.
SolveReport run_fista(const CompositeProblem& problem, const SolverOptions& options);

/// Barzilai-Borwein scaled proximal gradient with nonmonotone backtracking.
SolveReport run_sparsa(const CompositeProblem& problem, const SolverOptions& options);

/// ||(H - hess g(x_ref)) dx|| / ||dx||, 0 for dx = 0. Throws Unavailable
/// without a Hessian oracle.
double dennis_more_ratio(const CompositeProblem& problem, const Vector& reference,
                         const CurvatureModel& model, const Vector& direction);

/// Classifies successive error ratios e_{k+1}/e_k over the errors above floor
/// (needs at least five):
///   superlinear: each of the last three ratios is below half its predecessor and below 0.1;
///   linear(rho): the last five ratios lie within 20% of their median rho < 1;
///   sublinear otherwise.
RateEstimate rate_estimate(std::span<const double> errors, double floor = 1e-13);

/// ||x_k - reference|| over recorded iterates.
std::vector<double> error_sequence(const SolveReport& report, const Vector& reference);

/// (f - fstar) / max(1, |fstar|).
double relative_suboptimality(double f, double fstar);

/// First trace iter at which (f - fstar)/max(1,|fstar|) <= level, and the
/// cumulative inner iterations up to it.
struct SuboptimalityHit {
  int iter = 0;
  std::int64_t cumulative_inner = 0;
  std::int64_t cumulative_fev = 0;
};
std::optional<SuboptimalityHit> first_reaching(const SolveReport& report, double fstar,
                                               double level);

}  // namespace pnopt
