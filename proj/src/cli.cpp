#include "pnopt/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "pnopt/driver.hpp"
#include "pnopt/io.hpp"
#include "pnopt/problems.hpp"

namespace pnopt {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::string problem;
  std::string data;
  std::string synthetic;
  double lambda = 0.0;
  double ridge = 0.0;
  double sparsity = 0.2;
  double noise = 0.1;
  double condition = 0.0;  // 0: per-problem default
  int memory = 50;
  double tol = 1e-8;
  int max_outer = 500;
  double alpha = 1e-4;
  double beta = 0.5;
  std::string inner = "fista";
  std::optional<std::uint64_t> seed;
  bool no_timing = false;
  bool fista_restart = false;
};

void add_common(CLI::App& cmd, CommonArgs& a) {
  cmd.add_option("--problem", a.problem, "lasso | logistic | invcov")
      ->required()
      ->check(CLI::IsMember({"lasso", "logistic", "invcov"}));
  auto* data = cmd.add_option("--data", a.data,
                              "LIBSVM file (lasso, logistic) or dense CSV covariance (invcov)");
  auto* synth = cmd.add_option("--synthetic", a.synthetic, "SEED,n,s synthetic instance");
  data->excludes(synth);
  cmd.add_option("--lambda", a.lambda, "l1 weight")->required()->check(CLI::PositiveNumber);
  cmd.add_option("--ridge", a.ridge, "ridge term added to the logistic loss")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--sparsity", a.sparsity, "synthetic generator sparsity");
  cmd.add_option("--noise", a.noise, "synthetic noise level");
  cmd.add_option("--condition", a.condition, "synthetic conditioning target");
  cmd.add_option("--memory", a.memory, "L-BFGS memory")->check(CLI::PositiveNumber);
  cmd.add_option("--tol", a.tol, "stop when ||G_f(x)|| <= tol")->check(CLI::PositiveNumber);
  cmd.add_option("--max-outer", a.max_outer, "outer iteration budget")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--alpha", a.alpha, "sufficient decrease fraction in (0, 0.5)")
      ->check(CLI::Range(0.0, 0.5));
  cmd.add_option("--beta", a.beta, "backtracking factor in (0, 1)")->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--inner", a.inner, "subproblem solver")
      ->check(CLI::IsMember({"fista", "ista"}));
  cmd.add_option("--seed", a.seed, "seed for eigenvalue probes (default: synthetic seed)");
  cmd.add_flag("--no-timing", a.no_timing, "write zero elapsed times for byte-stable traces");
  cmd.add_flag("--fista-restart", a.fista_restart, "function-value restart in the FISTA baseline");
}

struct SyntheticArgs {
  std::uint64_t seed = 0;
  Eigen::Index n = 0;
  Eigen::Index s = 0;
};

SyntheticArgs parse_synthetic(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) parts.push_back(part);
  if (parts.size() != 3) throw UsageError("--synthetic expects SEED,n,s");
  try {
    std::size_t pos = 0;
    SyntheticArgs out;
    out.seed = std::stoull(parts[0], &pos);
    if (pos != parts[0].size()) throw UsageError("bad seed");
    out.n = std::stoll(parts[1], &pos);
    if (pos != parts[1].size() || out.n <= 0) throw UsageError("bad n");
    out.s = std::stoll(parts[2], &pos);
    if (pos != parts[2].size() || out.s <= 0) throw UsageError("bad s");
    return out;
  } catch (const std::logic_error&) {
    throw UsageError("--synthetic expects SEED,n,s with nonnegative integers");
  }
}

struct BuiltProblem {
  CompositeProblem problem;
  std::uint64_t seed = 0;
};

BuiltProblem build_problem(const CommonArgs& a) {
  if (a.data.empty() == a.synthetic.empty()) {
    throw UsageError("exactly one of --data or --synthetic is required");
  }
  BuiltProblem out;
  if (!a.synthetic.empty()) {
    const auto syn = parse_synthetic(a.synthetic);
    SyntheticSpec spec;
    spec.seed = syn.seed;
    spec.dim = syn.n;
    spec.samples = syn.s;
    spec.sparsity = a.sparsity;
    spec.noise = a.noise;
    out.seed = syn.seed;
    if (a.problem == "lasso") {
      spec.condition_target = a.condition > 0.0 ? a.condition : 1.0;
      out.problem = make_lasso(spec, a.lambda).composite;
    } else if (a.problem == "logistic") {
      out.problem = make_logistic(spec, a.lambda, a.ridge).composite;
    } else {
      if (spec.dim < 2) throw UsageError("invcov needs p >= 2");
      if (spec.samples < 2) throw UsageError("invcov needs at least two samples");
      spec.condition_target = a.condition > 0.0 ? a.condition : 5.0;
      out.problem = make_inverse_covariance(spec, a.lambda).composite;
    }
  } else if (a.problem == "invcov") {
    out.problem = make_inverse_covariance(read_dense_csv(a.data), a.lambda).composite;
  } else {
    auto data = read_libsvm(a.data);
    if (a.problem == "lasso") {
      out.problem = make_lasso(std::move(data.design), std::move(data.labels), a.lambda).composite;
    } else {
      out.problem = make_logistic(std::move(data.design), data.labels, a.lambda, a.ridge).composite;
    }
  }
  if (a.seed) out.seed = *a.seed;
  return out;
}

SolverOptions base_options(const CommonArgs& a, std::uint64_t seed) {
  SolverOptions opt;
  opt.lbfgs_memory = a.memory;
  opt.tol = a.tol;
  opt.max_outer = a.max_outer;
  opt.linesearch.alpha = a.alpha;
  opt.linesearch.beta = a.beta;
  opt.inner_solver = a.inner == "ista" ? InnerSolver::Ista : InnerSolver::Fista;
  opt.seed = seed;
  opt.record_timing = !a.no_timing;
  opt.fista_restart = a.fista_restart;
  try {
    opt.validate();
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }
  return opt;
}

int exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return kExitConverged;
    case SolveStatus::MaxIterations: return kExitMaxIterations;
    case SolveStatus::LineSearchFailed: return kExitLineSearchFailed;
  }
  return kExitFailure;
}

Method method_or_throw(const std::string& text) {
  auto m = parse_method(text);
  if (!m) throw UsageError("unknown method '" + text + "'");
  return *m;
}

SubproblemPolicy policy_or_throw(const std::string& text) {
  auto p = parse_policy(text);
  if (!p) throw UsageError("unknown subproblem stop '" + text + "'");
  return *p;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::string cell_name(const std::string& method, const std::string& policy) {
  std::string name = method + "_" + policy;
  std::replace(name.begin(), name.end(), ':', '-');
  return name;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Proximal Newton-type methods for composite convex minimization", "pnopt"};
  app.require_subcommand(1);

  CommonArgs solve_args;
  std::string method;
  std::string stop;
  std::string trace_path;
  auto* solve_cmd = app.add_subcommand("solve", "run one method and write its trace");
  add_common(*solve_cmd, solve_args);
  solve_cmd->add_option("--method", method, "prox-newton | prox-bfgs | prox-lbfgs | fista | sparsa")
      ->required();
  solve_cmd->add_option("--subproblem-stop", stop, "adaptive | exact | fixed:N")->required();
  solve_cmd->add_option("--trace", trace_path, "trace CSV path (summary JSON written alongside)")
      ->required();

  CommonArgs bench_args;
  std::string methods;
  std::string policies;
  std::string out_dir;
  auto* bench_cmd = app.add_subcommand("bench", "run a method x stopping-rule grid");
  add_common(*bench_cmd, bench_args);
  bench_cmd->add_option("--methods", methods, "comma separated methods");
  bench_cmd->add_option("--policies", policies, "comma separated stopping rules");
  bench_cmd->add_option("--out-dir", out_dir, "directory for traces and summary.csv")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitConverged;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitConverged;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) {
      auto options = base_options(solve_args, 0);
      options.method = method_or_throw(method);
      options.policy = policy_or_throw(stop);
      const auto built = build_problem(solve_args);
      options.seed = built.seed;
      const auto report = solve(built.problem, options);
      write_trace(report, trace_path);
      out << report.method << " " << report.policy << ": " << to_string(report.status)
          << " after " << report.trace.size() << " iterations, f = " << format_real(report.f_final)
          << ", ||G_f|| = " << format_real(report.norm_gf_final) << "\n";
      return exit_code(report.status);
    }

    const auto built = build_problem(bench_args);
    std::vector<std::string> method_list = split_list(methods);
    std::vector<std::string> policy_list = split_list(policies);
    if (method_list.empty()) {
      if (bench_args.problem == "invcov") method_list = {"prox-bfgs"};
      else if (bench_args.problem == "logistic") method_list = {"prox-lbfgs", "fista", "sparsa"};
      else method_list = {"prox-newton", "prox-bfgs", "prox-lbfgs", "fista", "sparsa"};
    }
    if (policy_list.empty()) {
      policy_list = bench_args.problem == "invcov"
                        ? std::vector<std::string>{"adaptive", "exact", "fixed:10"}
                        : std::vector<std::string>{"adaptive"};
    }

    std::filesystem::create_directories(out_dir);
    struct Cell {
      SolveReport report;
      std::string name;
    };
    std::vector<Cell> cells;
    for (const auto& m : method_list) {
      const Method parsed = method_or_throw(m);
      const bool first_order = parsed == Method::Fista || parsed == Method::Sparsa;
      for (const auto& p : policy_list) {
        auto options = base_options(bench_args, built.seed);
        options.method = parsed;
        options.policy = policy_or_throw(p);
        auto report = solve(built.problem, options);
        const std::string name = cell_name(m, first_order ? std::string("none") : p);
        write_trace(report, std::filesystem::path(out_dir) / (name + ".csv"));
        cells.push_back({std::move(report), name});
        if (first_order) break;
      }
    }

    double fstar = kInf;
    for (const auto& c : cells) fstar = std::min(fstar, c.report.f_final);
    const auto summary_file = std::filesystem::path(out_dir) / "summary.csv";
    std::ofstream summary(summary_file, std::ios::binary);
    if (!summary) throw IoError("cannot write " + summary_file.string());
    summary << "method,policy,status,outer_iters,inner_iters,cum_fev,f_final,norm_Gf_final,"
               "rel_subopt_final,wall_sec\n";
    int code = kExitConverged;
    for (const auto& c : cells) {
      const auto& r = c.report;
      summary << r.method << ',' << r.policy << ',' << to_string(r.status) << ','
              << r.trace.size() << ',' << r.diagnostics.total_inner_iterations << ','
              << r.counters.value_evals << ',' << format_real(r.f_final) << ','
              << format_real(r.norm_gf_final) << ','
              << format_real(relative_suboptimality(r.f_final, fstar)) << ','
              << format_real(r.wall_sec) << '\n';
      out << c.name << ": " << to_string(r.status) << ", " << r.trace.size() << " iterations\n";
      code = std::max(code, exit_code(r.status));
    }
    return code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace pnopt
