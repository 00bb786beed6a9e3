#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pnopt/driver.hpp"
#include "pnopt/problems.hpp"

namespace pnopt::fixtures {

enum class Kind { Lasso, Logistic, InverseCovariance };

struct Definition {
  std::string name;
  Kind kind = Kind::Lasso;
  SyntheticSpec spec;
  double lambda = 0.0;
  double ridge = 0.0;
};

inline SyntheticSpec make_spec(std::uint64_t seed, Eigen::Index dim, Eigen::Index samples,
                               double condition = 1.0) {
  SyntheticSpec s;
  s.seed = seed;
  s.dim = dim;
  s.samples = samples;
  s.condition_target = condition;
  return s;
}

inline Definition lasso_small() { return {"lasso_small", Kind::Lasso, make_spec(42, 5, 20), 0.1}; }
inline Definition lasso() { return {"lasso", Kind::Lasso, make_spec(7, 40, 100), 0.1}; }
inline Definition logistic() {
  return {"logistic", Kind::Logistic, make_spec(42, 50, 200), 0.01, 1e-3};
}
inline Definition inverse_covariance() {
  return {"invcov", Kind::InverseCovariance, make_spec(42, 30, 100, 10.0), 0.1};
}

inline std::vector<Definition> all() {
  return {lasso_small(), lasso(), logistic(), inverse_covariance()};
}

inline CompositeProblem build(const Definition& def) {
  switch (def.kind) {
    case Kind::Lasso: return make_lasso(def.spec, def.lambda).composite;
    case Kind::Logistic: return make_logistic(def.spec, def.lambda, def.ridge).composite;
    case Kind::InverseCovariance: return make_inverse_covariance(def.spec, def.lambda).composite;
  }
  throw std::logic_error("unknown fixture kind");
}

struct Frozen {
  Vector x_star;
  double f_star = 0.0;
  double norm_gf = 0.0;
};

/// Proximal Newton with tightly solved subproblems, run to ||G_f|| <= 1e-12.
inline Frozen compute(const Definition& def) {
  const auto problem = build(def);
  SolverOptions opt;
  opt.method = Method::ProxNewton;
  opt.policy = SubproblemPolicy::exact(1e-15, 100000);
  opt.tol = 1e-12;
  opt.max_outer = 200;
  opt.record_timing = false;
  const auto report = solve(problem, opt);
  if (!(report.norm_gf_final <= 1e-12)) {
    throw std::runtime_error(def.name + ": reference solve stalled at ||G_f|| = " +
                             std::to_string(report.norm_gf_final));
  }
  return {report.x_final, report.f_final, report.norm_gf_final};
}

inline std::filesystem::path path_for(const std::filesystem::path& dir, const Definition& def) {
  return dir / (def.name + ".json");
}

inline void save(const std::filesystem::path& path, const Definition& def, const Frozen& frozen) {
  nlohmann::json j;
  j["name"] = def.name;
  j["seed"] = def.spec.seed;
  j["dim"] = def.spec.dim;
  j["samples"] = def.spec.samples;
  j["lambda"] = def.lambda;
  j["ridge"] = def.ridge;
  j["f_star"] = frozen.f_star;
  j["norm_gf"] = frozen.norm_gf;
  j["x_star"] = std::vector<double>(frozen.x_star.data(), frozen.x_star.data() + frozen.x_star.size());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

inline Frozen load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing fixture " + path.string());
  const auto j = nlohmann::json::parse(in);
  const auto xs = j.at("x_star").get<std::vector<double>>();
  Frozen f;
  f.x_star = Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  f.f_star = j.at("f_star").get<double>();
  f.norm_gf = j.at("norm_gf").get<double>();
  return f;
}

inline Frozen load(const Definition& def) {
  return load(path_for(PNOPT_FIXTURE_DIR, def));
}

}  // namespace pnopt::fixtures
