#include "pnopt/hessian_models.hpp"

#include <algorithm>
#include <cmath>

#include "pnopt/random.hpp"

namespace pnopt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kSkipThreshold = 1e-8;
constexpr double kTauMin = 1e-10;
constexpr double kTauMax = 1e10;

}  // namespace

bool secant_pair_acceptable(const SecantPair& pair) {
  const double sy = pair.s.dot(pair.y);
  return sy > kSkipThreshold * pair.s.norm() * pair.y.norm() && sy > 0.0;
}

const char* to_string(CurvatureKind kind) {
  switch (kind) {
    case CurvatureKind::ExactHessian: return "exact-hessian";
    case CurvatureKind::DenseBfgs: return "bfgs";
    case CurvatureKind::LimitedMemoryBfgs: return "lbfgs";
    case CurvatureKind::ScaledIdentity: return "scaled-identity";
  }
  return "unknown";
}

CurvatureModel CurvatureModel::exact_hessian(std::shared_ptr<const SmoothOracle> oracle) {
  require(oracle != nullptr, "exact_hessian: null oracle");
  require(oracle->has_hessian(), "exact_hessian: oracle has no Hessian");
  const Eigen::Index n = oracle->dim();
  return CurvatureModel(n, Exact{std::move(oracle), Vector::Zero(n), std::nullopt});
}

CurvatureModel CurvatureModel::dense_bfgs(Eigen::Index dim, bool scale_initial) {
  require(dim > 0, "dense_bfgs: dim must be positive");
  return CurvatureModel(dim, DenseBfgs{Matrix::Identity(dim, dim), scale_initial});
}

CurvatureModel CurvatureModel::limited_memory_bfgs(Eigen::Index dim, int memory,
                                                   bool adaptive_scaling) {
  require(dim > 0, "limited_memory_bfgs: dim must be positive");
  require(memory >= 1, "limited_memory_bfgs: memory must be at least 1");
  Lbfgs state;
  state.memory = memory;
  state.adaptive_scaling = adaptive_scaling;
  state.w = Matrix(dim, 0);
  return CurvatureModel(dim, std::move(state));
}

CurvatureModel CurvatureModel::scaled_identity(Eigen::Index dim, double tau) {
  require(dim > 0, "scaled_identity: dim must be positive");
  require(tau > 0.0, "scaled_identity: tau must be positive");
  return CurvatureModel(dim, Scaled{tau});
}

CurvatureKind CurvatureModel::kind() const {
  return std::visit(overloaded{
                        [](const Exact&) { return CurvatureKind::ExactHessian; },
                        [](const DenseBfgs&) { return CurvatureKind::DenseBfgs; },
                        [](const Lbfgs&) { return CurvatureKind::LimitedMemoryBfgs; },
                        [](const Scaled&) { return CurvatureKind::ScaledIdentity; },
                    },
                    state_);
}

void CurvatureModel::set_anchor(const Vector& x, EvalCounters& counters) {
  if (auto* exact = std::get_if<Exact>(&state_)) {
    require_dim(x.size(), dim_, "CurvatureModel::set_anchor");
    exact->anchor = x;
    exact->dense = exact->oracle->hessian_dense(x);
    if (exact->dense) ++counters.hessian_evals;
  }
}

void CurvatureModel::Lbfgs::rebuild() {
  const auto m = static_cast<Eigen::Index>(pairs.size());
  if (m == 0) {
    w.resize(w.rows(), 0);
    return;
  }
  const Eigen::Index n = pairs.front().s.size();
  Matrix s(n, m);
  Matrix y(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    s.col(j) = pairs[static_cast<std::size_t>(j)].s;
    y.col(j) = pairs[static_cast<std::size_t>(j)].y;
  }
  if (adaptive_scaling) {
    const auto& newest = pairs.back();
    delta = newest.y.squaredNorm() / newest.s.dot(newest.y);
  }
  const Matrix sy = s.transpose() * y;
  Matrix mid(2 * m, 2 * m);
  mid.topLeftCorner(m, m) = delta * (s.transpose() * s);
  Matrix lower = Matrix::Zero(m, m);
  lower.triangularView<Eigen::StrictlyLower>() = sy;
  mid.topRightCorner(m, m) = lower;
  mid.bottomLeftCorner(m, m) = lower.transpose();
  mid.bottomRightCorner(m, m) = -Matrix(sy.diagonal().asDiagonal());
  w.resize(n, 2 * m);
  w.leftCols(m) = delta * s;
  w.rightCols(m) = y;
  middle.compute(mid);
}

Vector CurvatureModel::apply(const Vector& d) const {
  require_dim(d.size(), dim_, "CurvatureModel::apply");
  return std::visit(overloaded{
                        [&](const Exact& e) -> Vector {
                          if (e.dense) return (*e.dense) * d;
                          ++oracle_actions_;
                          return e.oracle->hessian_action(e.anchor, d);
                        },
                        [&](const DenseBfgs& b) -> Vector { return b.b * d; },
                        [&](const Lbfgs& l) -> Vector {
                          Vector out = l.delta * d;
                          if (l.w.cols() == 0) return out;
                          const Vector coeffs = l.middle.solve(l.w.transpose() * d);
                          out.noalias() -= l.w * coeffs;
                          return out;
                        },
                        [&](const Scaled& sc) -> Vector { return sc.tau * d; },
                    },
                    state_);
}

bool CurvatureModel::update(const SecantPair& pair) {
  require_dim(pair.s.size(), dim_, "CurvatureModel::update s");
  require_dim(pair.y.size(), dim_, "CurvatureModel::update y");
  if (std::holds_alternative<Exact>(state_)) return false;
  if (!secant_pair_acceptable(pair)) {
    ++skipped_;
    return false;
  }
  std::visit(overloaded{
                 [](Exact&) {},
                 [&](DenseBfgs& b) {
                   if (b.scale_initial && accepted_ == 0) {
                     b.b = (pair.y.squaredNorm() / pair.y.dot(pair.s)) *
                           Matrix::Identity(dim_, dim_);
                   }
                   const Vector bs = b.b * pair.s;
                   const double sbs = pair.s.dot(bs);
                   const double ys = pair.y.dot(pair.s);
                   b.b.noalias() -= (bs / sbs) * bs.transpose();
                   b.b.noalias() += (pair.y / ys) * pair.y.transpose();
                 },
                 [&](Lbfgs& l) {
                   l.pairs.push_back(pair);
                   while (static_cast<int>(l.pairs.size()) > l.memory) l.pairs.pop_front();
                   l.rebuild();
                 },
                 [&](Scaled& sc) {
                   sc.tau = std::clamp(pair.s.dot(pair.y) / pair.s.squaredNorm(), kTauMin, kTauMax);
                 },
             },
             state_);
  ++accepted_;
  return true;
}

double CurvatureModel::tau() const {
  const auto* sc = std::get_if<Scaled>(&state_);
  require(sc != nullptr, "tau() is only defined for scaled-identity models");
  return sc->tau;
}

std::size_t CurvatureModel::stored_pairs() const {
  const auto* l = std::get_if<Lbfgs>(&state_);
  return l ? l->pairs.size() : 0;
}

Matrix CurvatureModel::to_dense() const {
  if (const auto* b = std::get_if<DenseBfgs>(&state_)) return b->b;
  if (const auto* e = std::get_if<Exact>(&state_); e && e->dense) return *e->dense;
  Matrix out(dim_, dim_);
  for (Eigen::Index j = 0; j < dim_; ++j) out.col(j) = apply(Vector::Unit(dim_, j));
  return out;
}

EigenBounds eigen_bounds_probe(const CurvatureModel& model, int probes, std::uint64_t seed) {
  require(probes >= 1, "eigen_bounds_probe: probes must be at least 1");
  if (model.kind() == CurvatureKind::ScaledIdentity) return {model.tau(), model.tau()};

  Rng rng(seed);
  const Eigen::Index n = model.dim();

  Vector v = rng.normal_vector(n).normalized();
  double upper = 0.0;
  for (int it = 0; it < probes; ++it) {
    Vector hv = model.apply(v);
    upper = v.dot(hv);
    const double norm = hv.norm();
    if (norm == 0.0) break;
    v = hv / norm;
  }

  double lower = kInf;
  for (int it = 0; it < probes; ++it) {
    const Vector d = rng.normal_vector(n);
    lower = std::min(lower, d.dot(model.apply(d)) / d.squaredNorm());
  }
  return {lower, upper};
}

}  // namespace pnopt
