// Runs every primary acceptance criterion and prints one PASS/FAIL line each.
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pnopt/cli.hpp"
#include "pnopt/io.hpp"
#include "pnopt/penalties.hpp"

using namespace pnopt;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// Random instances shared by criteria 2, 4 and 9.

struct Instance {
  CompositeProblem problem;
  Vector x;
  CurvatureModel model;
  double lipschitz = 0.0;
};

CompositeProblem random_problem(Rng& rng, int which, std::uint64_t seed, double* lipschitz) {
  SyntheticSpec spec;
  spec.seed = seed;
  switch (which) {
    case 0: {
      spec.dim = rng.index(3, 12);
      spec.samples = 3 * spec.dim;
      spec.condition_target = rng.uniform(1.0, 5.0);
      auto p = make_lasso(spec, rng.uniform(0.01, 0.5));
      *lipschitz = p.lipschitz;
      return p.composite;
    }
    case 1: {
      spec.dim = rng.index(3, 12);
      spec.samples = 4 * spec.dim;
      auto p = make_logistic(spec, rng.uniform(0.001, 0.05), rng.uniform(1e-3, 1e-1));
      *lipschitz = *p.composite.smooth->lipschitz_grad_hint();
      return p.composite;
    }
    default: {
      spec.dim = rng.index(3, 5);
      spec.samples = 40;
      auto p = make_inverse_covariance(spec, rng.uniform(0.05, 0.3));
      *lipschitz = 0.0;
      return p.composite;
    }
  }
}

Vector random_point(Rng& rng, const CompositeProblem& problem, int which) {
  if (which != 2) return rng.normal_vector(problem.dim());
  const auto p = static_cast<Eigen::Index>(std::lround(std::sqrt(double(problem.dim()))));
  Matrix e = 0.1 * rng.normal_matrix(p, p);
  return vec(Matrix::Identity(p, p) + 0.5 * (e + e.transpose()));
}

CurvatureModel random_model(Rng& rng, const CompositeProblem& problem, const Vector& x,
                            int which, int flavor) {
  const auto n = problem.dim();
  const auto p = which == 2 ? static_cast<Eigen::Index>(std::lround(std::sqrt(double(n)))) : 0;
  auto pairs = [&](CurvatureModel m, int count) {
    const Vector gx = problem.smooth->gradient(x);
    for (int i = 0; i < count; ++i) {
      const Vector s = (which == 2 ? 0.05 : 0.5) * oracles::random_direction(rng, n, p);
      m.update({s, problem.smooth->gradient(x + s) - gx});
    }
    return m;
  };
  switch (flavor) {
    case 0: {
      auto m = CurvatureModel::exact_hessian(problem.smooth);
      EvalCounters c;
      m.set_anchor(x, c);
      return m;
    }
    case 1: return pairs(CurvatureModel::dense_bfgs(n), 4);
    case 2: return pairs(CurvatureModel::limited_memory_bfgs(n, 5), 7);
    default: return CurvatureModel::scaled_identity(n, rng.uniform(0.2, 5.0));
  }
}

struct SuiteTwo {
  int instances = 0;
  int descent_violations = 0;
  int solved = 0;
  int membership_violations = 0;
  double worst_slack = -kInf;
};

SuiteTwo run_suite_two() {
  SuiteTwo out;
  Rng rng(2024);
  const auto policy = SubproblemPolicy::exact();
  for (int k = 0; k < 100; ++k) {
    const int which = k % 3;
    double lipschitz = 0.0;
    const auto problem = random_problem(rng, which, 1000 + k, &lipschitz);
    const Vector x = random_point(rng, problem, which);
    const auto model = random_model(rng, problem, x, which, (k / 3) % 4);
    const Vector grad = problem.smooth->gradient(x);
    const LocalModel local(x, grad, model, *problem.nonsmooth);
    EvalCounters counters;
    const auto sub = solve_subproblem(local, policy, 0.0, InnerSolver::Fista, &counters);
    ++out.instances;
    const Vector& d = sub.direction;
    const auto quality = direction_quality_check(local, d);
    out.worst_slack = std::max(out.worst_slack,
                               quality.predicted_decrease + d.dot(model.apply(d)));
    if (!quality.exact_bound_ok) ++out.descent_violations;
    if (sub.stop_reason == StopReason::TargetReached) {
      ++out.solved;
      const Vector v = -(grad + model.apply(d));
      if (!problem.nonsmooth->subdifferential_contains(x + d, v, 10.0 * policy.tol).value_or(false))
        ++out.membership_violations;
    }
  }
  return out;
}

const SuiteTwo& suite_two() {
  static const SuiteTwo s = run_suite_two();
  return s;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Rng rng(1);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-5.0, 5.0), t = rng.uniform(0.01, 3.0), lam = rng.uniform(0.01, 2.0);
    const double got = soft_threshold(Vector::Constant(1, x), t, lam)[0];
    worst = std::max(worst, std::abs(got - oracles::brute_force_l1_prox(x, t, lam)));
  }
  int idempotence = 0, firm = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vector lo = rng.uniform_vector(6, -2.0, 0.0), hi = lo + rng.uniform_vector(6, 0.0, 3.0);
    const Vector a = 3.0 * rng.normal_vector(6), b = 3.0 * rng.normal_vector(6);
    const Vector pa = box_project(a, lo, hi);
    if (box_project(pa, lo, hi) != pa) ++idempotence;
    const double t = rng.uniform(0.01, 3.0), lam = rng.uniform(0.01, 2.0);
    const Vector sa = soft_threshold(a, t, lam), sb = soft_threshold(b, t, lam);
    const Vector ba = pa, bb = box_project(b, lo, hi);
    if ((sa - sb).squaredNorm() > (sa - sb).dot(a - b) + 1e-12) ++firm;
    if ((ba - bb).squaredNorm() > (ba - bb).dot(a - b) + 1e-12) ++firm;
  }
  return {worst <= 1e-6 && idempotence == 0 && firm == 0,
          "max prox error " + fmt(worst) + ", idempotence failures " + std::to_string(idempotence) +
              ", firm nonexpansiveness failures " + std::to_string(firm)};
}

Outcome criterion2() {
  const auto& s = suite_two();
  return {s.descent_violations == 0,
          std::to_string(s.instances) + " instances, " + std::to_string(s.descent_violations) +
              " violations, max lambda_pred + dx'H dx = " + fmt(s.worst_slack)};
}

Outcome criterion3() {
  Rng rng(3);
  int violations = 0, points = 0;
  double worst = 0.0;
  for (const auto& def : {fixtures::lasso_small(), fixtures::lasso()}) {
    const auto lasso = make_lasso(def.spec, def.lambda);
    const auto frozen = fixtures::load(def);
    const double bound = lasso.lipschitz + 1.0;
    for (int i = 0; i < 100; ++i, ++points) {
      const double scale = std::pow(10.0, rng.uniform(-6.0, 1.0));
      const Vector x = frozen.x_star + scale * rng.normal_vector(def.spec.dim);
      const double lhs = optimality_measure(lasso.composite, x);
      const double rhs = bound * (x - frozen.x_star).norm();
      worst = std::max(worst, lhs / rhs);
      if (lhs > rhs + 1e-8) ++violations;
    }
  }
  return {violations == 0, std::to_string(points) + " points, " + std::to_string(violations) +
                               " violations, max ||G_f|| / ((L+1)||x-x*||) = " + fmt(worst)};
}

Outcome criterion4() {
  Rng rng(4);
  const LineSearchConfig cfg;
  int rejected = 0;
  for (int k = 0; k < 100; ++k) {
    const int which = k % 2;
    double lipschitz = 0.0;
    const auto problem = random_problem(rng, which, 4000 + k, &lipschitz);
    const Vector x = random_point(rng, problem, which);
    const auto model = random_model(rng, problem, x, which, (k / 2) % 4);
    const double m = Eigen::SelfAdjointEigenSolver<Matrix>(model.to_dense()).eigenvalues().minCoeff();
    const double t0 = std::min(1.0, 2.0 * m / lipschitz * (1.0 - cfg.alpha));
    const Vector grad = problem.smooth->gradient(x);
    const LocalModel local(x, grad, model, *problem.nonsmooth);
    const auto sub = solve_subproblem(local, SubproblemPolicy::exact(), 0.0);
    const auto quality = direction_quality_check(local, sub.direction);
    EvalCounters counters;
    const auto ls = backtrack(problem, x, eval_f(problem, x), sub.direction,
                              quality.predicted_decrease, cfg, counters, t0);
    if (!ls.accepted() || ls.backtracks != 0) ++rejected;
  }
  return {rejected == 0, "100 instances, " + std::to_string(rejected) + " first trials rejected"};
}

Outcome criterion5() {
  std::string detail;
  bool pass = true;
  for (const auto& def : {fixtures::lasso_small(), fixtures::lasso()}) {
    SolverOptions opt;
    opt.method = Method::ProxNewton;
    opt.policy = SubproblemPolicy::exact();
    opt.tol = 1e-8;
    const auto r = solve(fixtures::build(def), opt);
    pass = pass && r.status == SolveStatus::Converged && r.trace.size() <= 3;
    detail += def.name + ": " + std::to_string(r.trace.size()) + " iterations, ||G_f|| " +
              fmt(r.norm_gf_final) + "; ";
  }
  return {pass, detail};
}

SolverOptions rate_options(Method method, SubproblemPolicy policy, const Vector& x_star) {
  SolverOptions opt;
  opt.method = method;
  opt.policy = policy;
  opt.max_outer = 500;
  opt.reference_solution = x_star;
  opt.record_iterates = true;
  opt.record_timing = false;
  return opt;
}

std::string rate_text(const SolveReport& r) {
  if (!r.diagnostics.rate) return "none";
  std::string s = to_string(r.diagnostics.rate->rate);
  if (r.diagnostics.rate->rate == RateClass::Linear) s += "(" + fmt(r.diagnostics.rate->rho) + ")";
  return s;
}

bool superlinear(const SolveReport& r) {
  return r.diagnostics.rate && r.diagnostics.rate->rate == RateClass::Superlinear;
}

struct FixtureSix {
  SolveReport newton;
  SolveReport bfgs;
  int max_outer = 0;
};

const FixtureSix& fixture_six() {
  static const FixtureSix runs = [] {
    const auto def = fixtures::logistic();
    const auto problem = fixtures::build(def);
    const auto frozen = fixtures::load(def);
    FixtureSix out;
    auto newton = rate_options(Method::ProxNewton, SubproblemPolicy::exact(), frozen.x_star);
    auto bfgs = rate_options(Method::ProxBfgs, SubproblemPolicy::adaptive(), frozen.x_star);
    out.newton = solve(problem, newton);
    out.bfgs = solve(problem, bfgs);
    out.max_outer = bfgs.max_outer;
    return out;
  }();
  return runs;
}

Outcome criterion6() {
  const auto& six = fixture_six();
  const auto& dm = six.bfgs.diagnostics.dennis_more_ratios;
  const std::size_t first = dm.size() >= 5 ? dm.size() - 5 : 0;
  bool dm_decreasing = dm.size() >= 5;
  std::string tail;
  for (std::size_t i = first; i < dm.size(); ++i) {
    if (i > first && !(dm[i] < dm[i - 1])) dm_decreasing = false;
    tail += fmt(dm[i]) + (i + 1 < dm.size() ? " " : "");
  }
  return {superlinear(six.newton) && superlinear(six.bfgs) && dm_decreasing,
          "prox-newton+exact " + rate_text(six.newton) + " (" +
              std::to_string(six.newton.trace.size()) + " iters), prox-bfgs+adaptive " +
              rate_text(six.bfgs) + " (" + std::to_string(six.bfgs.trace.size()) +
              " iters), final Dennis-More ratios [" + tail + "]"};
}

Outcome criterion7() {
  const auto def = fixtures::inverse_covariance();
  const auto problem = fixtures::build(def);
  const auto frozen = fixtures::load(def);
  auto run = [&](SubproblemPolicy policy, Method method = Method::ProxNewton) {
    return solve(problem, rate_options(method, policy, frozen.x_star));
  };
  const auto adaptive = run(SubproblemPolicy::adaptive());
  const auto exact = run(SubproblemPolicy::exact());
  const auto fixed = run(SubproblemPolicy::fixed(10));
  const auto hit_a = first_reaching(adaptive, frozen.f_star, 1e-6);
  const auto hit_e = first_reaching(exact, frozen.f_star, 1e-6);
  const bool a = superlinear(adaptive) && superlinear(exact) && fixed.diagnostics.rate &&
                 fixed.diagnostics.rate->rate == RateClass::Linear;
  const bool b = hit_a && hit_e && hit_a->cumulative_inner < hit_e->cumulative_inner;
  auto inner = [](const std::optional<SuboptimalityHit>& h) {
    return h ? std::to_string(h->cumulative_inner) : std::string("never");
  };
  // Reported, not scored.
  std::string bfgs;
  for (const auto& policy :
       {SubproblemPolicy::adaptive(), SubproblemPolicy::exact(), SubproblemPolicy::fixed(10)}) {
    bfgs += " " + to_string(policy) + " " + rate_text(run(policy, Method::ProxBfgs));
  }
  return {a && b, "prox-newton: adaptive " + rate_text(adaptive) + ", exact " + rate_text(exact) +
                      ", fixed:10 " + rate_text(fixed) + "; inner iterations to 1e-6: adaptive " +
                      inner(hit_a) + ", exact " + inner(hit_e) + "; prox-bfgs, not scored:" + bfgs};
}

Outcome criterion8() {
  const auto def = fixtures::lasso();
  const auto problem = fixtures::build(def);
  std::vector<std::pair<Method, SolveReport>> runs;
  for (Method m : {Method::ProxNewton, Method::ProxBfgs, Method::ProxLbfgs, Method::Fista,
                   Method::Sparsa}) {
    SolverOptions opt;
    opt.method = m;
    opt.lbfgs_memory = 50;
    opt.tol = 1e-8;
    opt.max_outer = 100000;
    runs.emplace_back(m, solve(problem, opt));
  }
  double lo = kInf, hi = -kInf;
  std::size_t fista_iters = 0, newton_type_max = 0;
  bool converged = true;
  std::string detail;
  for (const auto& [m, r] : runs) {
    lo = std::min(lo, r.f_final);
    hi = std::max(hi, r.f_final);
    converged = converged && r.status == SolveStatus::Converged;
    if (m == Method::Fista) fista_iters = r.trace.size();
    if (m == Method::ProxNewton || m == Method::ProxBfgs || m == Method::ProxLbfgs)
      newton_type_max = std::max(newton_type_max, r.trace.size());
    detail += std::string(to_string(m)) + " " + std::to_string(r.trace.size()) + ", ";
  }
  return {converged && hi - lo <= 1e-7 && 4 * newton_type_max <= fista_iters,
          "outer iterations: " + detail + "spread of final f " + fmt(hi - lo)};
}

Outcome criterion9() {
  const auto& s = suite_two();
  return {s.solved > 0 && s.membership_violations == 0,
          std::to_string(s.solved) + " exactly solved subproblems, " +
              std::to_string(s.membership_violations) + " violations"};
}

Outcome criterion10() {
  const auto& six = fixture_six();
  auto k = [](const SolveReport& r) { return r.diagnostics.unit_step_from; };
  const int limit = six.max_outer / 2;
  const bool pass = k(six.newton) && *k(six.newton) < limit && k(six.bfgs) && *k(six.bfgs) < limit;
  auto text = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("none"); };
  return {pass, "K = " + text(k(six.newton)) + " (prox-newton), " + text(k(six.bfgs)) +
                    " (prox-bfgs), limit " + std::to_string(limit)};
}

Outcome criterion11() {
  Rng rng(11);
  double worst_g = 0.0, worst_h = 0.0;
  int failures = 0, checks = 0;
  const std::vector<std::pair<std::string, CompositeProblem>> problems = {
      {"lasso", fixtures::build(fixtures::lasso())},
      {"logistic", fixtures::build(fixtures::logistic())},
      {"invcov", make_inverse_covariance(fixtures::make_spec(5, 6, 50), 0.1).composite}};
  for (const auto& [name, problem] : problems) {
    const bool matrix = name == "invcov";
    const auto order = matrix ? static_cast<Eigen::Index>(6) : 0;
    for (int i = 0; i < 20; ++i) {
      const Vector x = random_point(rng, problem, matrix ? 2 : 0);
      for (int j = 0; j < 3; ++j, ++checks) {
        const Vector v = oracles::random_direction(rng, problem.dim(), order);
        const auto e = oracles::finite_difference_errors(*problem.smooth, x, v);
        worst_g = std::max(worst_g, e.gradient);
        worst_h = std::max(worst_h, e.hessian);
        if (e.gradient > 1e-5 || e.hessian > 1e-4) ++failures;
      }
    }
  }
  return {failures == 0, std::to_string(checks) + " directional checks, max gradient error " +
                             fmt(worst_g) + ", max Hessian-action error " + fmt(worst_h)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome criterion12() {
  Rng rng(12);
  Matrix design = Matrix::Zero(30, 12);
  Vector labels(30);
  for (Eigen::Index i = 0; i < 30; ++i) {
    labels[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    for (Eigen::Index j = 0; j < 12; ++j)
      if (rng.uniform() < 0.3) design(i, j) = rng.normal() * std::pow(10.0, rng.uniform(-8, 8));
  }
  std::ostringstream first;
  write_libsvm(first, labels, design);
  std::istringstream in(first.str());
  const auto parsed = parse_libsvm(in, 12);
  std::ostringstream second;
  write_libsvm(second, parsed.labels, parsed.design);
  const bool roundtrip = parsed.design == design && parsed.labels == labels && first.str() == second.str();

  const auto dir = std::filesystem::temp_directory_path() / "pnopt_acceptance";
  std::filesystem::create_directories(dir);
  auto run_cli = [&](const std::string& file) {
    std::ostringstream out, err;
    const std::vector<std::string> args = {
        "solve", "--problem", "logistic", "--synthetic", "42,50,200", "--lambda", "0.01",
        "--ridge", "1e-3", "--method", "prox-lbfgs", "--subproblem-stop", "adaptive",
        "--no-timing", "--trace", (dir / file).string()};
    return cli_main(args, out, err);
  };
  const int c1 = run_cli("a.csv"), c2 = run_cli("b.csv");
  const bool deterministic = c1 == 0 && c2 == 0 && slurp(dir / "a.csv") == slurp(dir / "b.csv") &&
                             slurp(dir / "a.json") == slurp(dir / "b.json");

  std::vector<TraceRecord> rows(3);
  rows[0] = {1, 1.0, 0.5, 0.25, -0.125, 0.1, 10, 3, 2, 11, 0.0, 0};
  rows[1] = {2, 0.5, 0.375, 1e-3, -2.5e-4, 0.05, 7, 6, 3, 19, 0.0, 1};
  rows[2] = {3, 1.0, 1.0 / 3.0, 1e-9, -1e-17, 1e-10, 12, 7, 4, 32, 0.0, 0};
  std::ostringstream trace;
  write_trace_csv(trace, rows);
  const bool golden = trace.str() == slurp(std::filesystem::path(PNOPT_FIXTURE_DIR) / "golden_trace.csv");
  return {roundtrip && deterministic && golden,
          std::string("LIBSVM round-trip ") + (roundtrip ? "ok" : "mismatch") + ", CLI determinism " +
              (deterministic ? "ok" : "mismatch") + ", golden trace " + (golden ? "ok" : "mismatch")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double budget_sec;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, 5, criterion1},    {2, 30, criterion2},   {3, 60, criterion3},  {4, 60, criterion4},
      {5, 1, criterion5},    {6, 30, criterion6},   {7, 120, criterion7}, {8, 60, criterion8},
      {9, 30, criterion9},   {10, 30, criterion10}, {11, 60, criterion11}, {12, 60, criterion12}};
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = sec <= c.budget_sec;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << "  " << o.detail
              << " [" << fmt(sec) << " s" << (in_time ? "" : ", over budget") << "]\n";
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
