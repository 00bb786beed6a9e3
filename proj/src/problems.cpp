#include "pnopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pnopt/penalties.hpp"
#include "pnopt/random.hpp"

namespace pnopt {

namespace {

// log(1 + exp(u)) without overflow.
double softplus(double u) {
  if (u > 0.0) return u + std::log1p(std::exp(-u));
  return std::log1p(std::exp(u));
}

// 1 / (1 + exp(-u))
double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

std::vector<Eigen::Index> sparse_support(Rng& rng, Eigen::Index n, double sparsity) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  rng.shuffle(idx);
  const auto k = std::clamp<Eigen::Index>(
      static_cast<Eigen::Index>(std::lround(sparsity * static_cast<double>(n))), 1, n);
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Vector sparse_generator(Rng& rng, Eigen::Index n, double sparsity) {
  Vector x = Vector::Zero(n);
  for (Eigen::Index i : sparse_support(rng, n, sparsity)) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    x[i] = sign * (1.0 + rng.uniform());
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// Lasso

QuadraticLoss::QuadraticLoss(Matrix design, Vector response)
    : design_(std::move(design)), response_(std::move(response)) {
  require_dim(response_.size(), design_.rows(), "QuadraticLoss response");
  gram_ = design_.transpose() * design_;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram_, Eigen::EigenvaluesOnly);
  lipschitz_ = eig.eigenvalues().maxCoeff();
  strong_convexity_ = std::max(0.0, eig.eigenvalues().minCoeff());
}

double QuadraticLoss::value(const Vector& x) const {
  require_dim(x.size(), dim(), "QuadraticLoss::value");
  return 0.5 * (design_ * x - response_).squaredNorm();
}

Vector QuadraticLoss::gradient(const Vector& x) const {
  require_dim(x.size(), dim(), "QuadraticLoss::gradient");
  return design_.transpose() * (design_ * x - response_);
}

Vector QuadraticLoss::hessian_action(const Vector& /*x*/, const Vector& v) const {
  require_dim(v.size(), dim(), "QuadraticLoss::hessian_action");
  return gram_ * v;
}

std::optional<Matrix> QuadraticLoss::hessian_dense(const Vector& /*x*/) const { return gram_; }

QuadraticL1Problem make_lasso(Matrix design, Vector response, double lambda) {
  require(lambda > 0.0, "make_lasso: lambda must be positive");
  auto loss = std::make_shared<QuadraticLoss>(design, response);
  QuadraticL1Problem out;
  out.design = std::move(design);
  out.response = std::move(response);
  out.lambda = lambda;
  out.lipschitz = *loss->lipschitz_grad_hint();
  out.strong_convexity = *loss->strong_convexity_hint();
  out.composite.smooth = std::move(loss);
  out.composite.nonsmooth = std::make_shared<L1Penalty>(lambda);
  return out;
}

QuadraticL1Problem make_lasso(const SyntheticSpec& spec, double lambda) {
  require(spec.dim > 0 && spec.samples > 0, "make_lasso: dimensions must be positive");
  Rng rng(spec.seed);
  const Eigen::Index n = spec.dim;
  const Eigen::Index s = spec.samples;
  Matrix design = rng.normal_matrix(s, n) / std::sqrt(static_cast<double>(s));
  if (spec.condition_target > 1.0 && n > 1) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double frac = static_cast<double>(j) / static_cast<double>(n - 1);
      design.col(j) *= std::pow(spec.condition_target, -0.5 * frac);
    }
  }
  Vector generator = sparse_generator(rng, n, spec.sparsity);
  Vector response = design * generator + spec.noise * rng.normal_vector(s);
  auto out = make_lasso(std::move(design), std::move(response), lambda);
  out.generator = std::move(generator);
  return out;
}

// ---------------------------------------------------------------------------
// Logistic

LogisticLoss::LogisticLoss(Matrix samples, Vector labels, double ridge)
    : samples_(std::move(samples)), labels_(std::move(labels)), ridge_(ridge) {
  require_dim(labels_.size(), samples_.rows(), "LogisticLoss labels");
  require(samples_.rows() > 0, "LogisticLoss: need at least one sample");
  require(ridge_ >= 0.0, "LogisticLoss: ridge must be nonnegative");
  const double spectral = samples_.rows() * samples_.cols() > 0
                              ? Eigen::JacobiSVD<Matrix>(samples_).singularValues()(0)
                              : 0.0;
  lipschitz_ = spectral * spectral / (4.0 * static_cast<double>(samples_.rows())) + ridge_;
}

double LogisticLoss::value(const Vector& w) const {
  require_dim(w.size(), dim(), "LogisticLoss::value");
  const Vector margins = labels_.cwiseProduct(samples_ * w);
  double total = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) total += softplus(-margins[i]);
  return total / static_cast<double>(samples_.rows()) + 0.5 * ridge_ * w.squaredNorm();
}

Vector LogisticLoss::gradient(const Vector& w) const {
  require_dim(w.size(), dim(), "LogisticLoss::gradient");
  const Vector margins = labels_.cwiseProduct(samples_ * w);
  Vector weights(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i)
    weights[i] = -labels_[i] * sigmoid(-margins[i]);
  return samples_.transpose() * weights / static_cast<double>(samples_.rows()) + ridge_ * w;
}

Vector LogisticLoss::hessian_action(const Vector& w, const Vector& v) const {
  require_dim(w.size(), dim(), "LogisticLoss::hessian_action");
  require_dim(v.size(), dim(), "LogisticLoss::hessian_action");
  const Vector margins = labels_.cwiseProduct(samples_ * w);
  Vector curvature(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const double p = sigmoid(margins[i]);
    curvature[i] = p * (1.0 - p);
  }
  const Vector xv = samples_ * v;
  return samples_.transpose() * curvature.cwiseProduct(xv) /
             static_cast<double>(samples_.rows()) +
         ridge_ * v;
}

std::optional<Matrix> LogisticLoss::hessian_dense(const Vector& w) const {
  require_dim(w.size(), dim(), "LogisticLoss::hessian_dense");
  const Vector margins = labels_.cwiseProduct(samples_ * w);
  Vector curvature(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const double p = sigmoid(margins[i]);
    curvature[i] = p * (1.0 - p);
  }
  Matrix h = samples_.transpose() * curvature.asDiagonal() * samples_ /
             static_cast<double>(samples_.rows());
  h.diagonal().array() += ridge_;
  return h;
}

Vector remap_labels(const Vector& labels) {
  const bool zero_one =
      (labels.array() == 0.0 || labels.array() == 1.0).all() && (labels.array() == 0.0).any();
  Vector out(labels.size());
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (zero_one) {
      out[i] = labels[i] == 0.0 ? -1.0 : 1.0;
    } else {
      require(labels[i] != 0.0, "remap_labels: zero label in a +-1 labelling");
      out[i] = labels[i] > 0.0 ? 1.0 : -1.0;
    }
  }
  return out;
}

LogisticL1Problem make_logistic(Matrix samples, const Vector& labels, double lambda,
                                double ridge) {
  require(lambda > 0.0, "make_logistic: lambda must be positive");
  LogisticL1Problem out;
  out.samples = std::move(samples);
  out.labels = remap_labels(labels);
  out.lambda = lambda;
  out.ridge = ridge;
  out.composite.smooth = std::make_shared<LogisticLoss>(out.samples, out.labels, ridge);
  out.composite.nonsmooth = std::make_shared<L1Penalty>(lambda);
  return out;
}

LogisticL1Problem make_logistic(const SyntheticSpec& spec, double lambda, double ridge) {
  require(spec.dim > 0 && spec.samples > 0, "make_logistic: dimensions must be positive");
  Rng rng(spec.seed);
  Matrix samples = rng.normal_matrix(spec.samples, spec.dim);
  const Vector generator = sparse_generator(rng, spec.dim, spec.sparsity);
  const auto support = std::max<Eigen::Index>(1, (generator.array() != 0.0).count());
  samples /= std::sqrt(static_cast<double>(support));
  Vector labels(spec.samples);
  for (Eigen::Index i = 0; i < spec.samples; ++i) {
    const double margin = samples.row(i).dot(generator) + spec.noise * rng.normal();
    labels[i] = rng.uniform() < sigmoid(margin) ? 1.0 : -1.0;
  }
  return make_logistic(samples, labels, lambda, ridge);
}

ValueGrad logistic_value_grad(const LogisticL1Problem& problem, const Vector& w) {
  return {problem.composite.smooth->value(w), problem.composite.smooth->gradient(w)};
}

// ---------------------------------------------------------------------------
// Inverse covariance

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, Eigen::Index p) {
  require_dim(v.size(), p * p, "unvec");
  return Eigen::Map<const Matrix>(v.data(), p, p);
}

LogDetLoss::LogDetLoss(Matrix sample_cov) : sample_cov_(std::move(sample_cov)) {
  require(sample_cov_.rows() == sample_cov_.cols(), "LogDetLoss: covariance must be square");
  p_ = sample_cov_.rows();
}

double LogDetLoss::value(const Vector& theta) const {
  require_dim(theta.size(), dim(), "LogDetLoss::value");
  const Matrix t = unvec(theta, p_);
  Eigen::LLT<Matrix> llt(t);
  if (llt.info() != Eigen::Success) return kInf;
  const Vector diag = llt.matrixL().toDenseMatrix().diagonal();
  if ((diag.array() <= 0.0).any() || !diag.allFinite()) return kInf;
  const double logdet = 2.0 * diag.array().log().sum();
  return sample_cov_.cwiseProduct(t).sum() - logdet;
}

Vector LogDetLoss::gradient(const Vector& theta) const {
  require_dim(theta.size(), dim(), "LogDetLoss::gradient");
  Eigen::LLT<Matrix> llt(unvec(theta, p_));
  if (llt.info() != Eigen::Success) throw DomainError("Theta is not positive definite");
  const Matrix inv = llt.solve(Matrix::Identity(p_, p_));
  return vec(sample_cov_ - inv);
}

Vector LogDetLoss::hessian_action(const Vector& theta, const Vector& v) const {
  require_dim(v.size(), dim(), "LogDetLoss::hessian_action");
  Eigen::LLT<Matrix> llt(unvec(theta, p_));
  if (llt.info() != Eigen::Success) throw DomainError("Theta is not positive definite");
  const Matrix inv = llt.solve(Matrix::Identity(p_, p_));
  return vec(inv * unvec(v, p_) * inv);
}

std::optional<Matrix> LogDetLoss::hessian_dense(const Vector& theta) const {
  Eigen::LLT<Matrix> llt(unvec(theta, p_));
  if (llt.info() != Eigen::Success) throw DomainError("Theta is not positive definite");
  const Matrix inv = llt.solve(Matrix::Identity(p_, p_));
  const Eigen::Index n = p_ * p_;
  Matrix h(n, n);
  // H[i + j p, k + l p] = inv(i, k) * inv(l, j)
  for (Eigen::Index l = 0; l < p_; ++l)
    for (Eigen::Index k = 0; k < p_; ++k)
      for (Eigen::Index j = 0; j < p_; ++j)
        for (Eigen::Index i = 0; i < p_; ++i) h(i + j * p_, k + l * p_) = inv(i, k) * inv(l, j);
  return h;
}

SymmetricMatrixL1::SymmetricMatrixL1(double weight, Eigen::Index order)
    : weight_(weight), p_(order) {
  require(weight > 0.0, "SymmetricMatrixL1: weight must be positive");
}

double SymmetricMatrixL1::value(const Vector& x) const { return weight_ * x.lpNorm<1>(); }

Vector SymmetricMatrixL1::prox(const Vector& x, double t) const {
  const Matrix shrunk = unvec(soft_threshold(x, t, weight_), p_);
  return vec(0.5 * (shrunk + shrunk.transpose()));
}

std::optional<bool> SymmetricMatrixL1::subdifferential_contains(const Vector& y, const Vector& v,
                                                                double tol) const {
  return L1Penalty(weight_).subdifferential_contains(y, v, tol);
}

LogDetEval logdet_value_grad_hess(const InverseCovarianceProblem& problem, const Matrix& theta) {
  const Eigen::Index p = problem.sample_cov.rows();
  require(theta.rows() == p && theta.cols() == p, "logdet_value_grad_hess: shape mismatch");
  Eigen::LLT<Matrix> llt(theta);
  if (llt.info() != Eigen::Success) throw DomainError("Theta is not positive definite");
  const Matrix l = llt.matrixL();
  auto inv = std::make_shared<const Matrix>(llt.solve(Matrix::Identity(p, p)));
  LogDetEval out;
  out.value = problem.sample_cov.cwiseProduct(theta).sum() -
              2.0 * l.diagonal().array().log().sum();
  out.gradient = problem.sample_cov - *inv;
  out.hessian_action = [inv](const Matrix& v) -> Matrix { return (*inv) * v * (*inv); };
  return out;
}

Matrix standardized_covariance(const Matrix& draws) {
  require(draws.rows() >= 2, "standardized_covariance: need at least two samples");
  Matrix centered = draws.rowwise() - draws.colwise().mean();
  const double m = static_cast<double>(draws.rows());
  for (Eigen::Index j = 0; j < centered.cols(); ++j) {
    const double sd = std::sqrt(centered.col(j).squaredNorm() / m);
    if (sd > 0.0) centered.col(j) /= sd;
  }
  Matrix cov = centered.transpose() * centered / m;
  return 0.5 * (cov + cov.transpose());
}

InverseCovarianceProblem make_inverse_covariance(Matrix sample_cov, double lambda) {
  require(lambda > 0.0, "make_inverse_covariance: lambda must be positive");
  require(sample_cov.rows() == sample_cov.cols() && sample_cov.rows() >= 1,
          "make_inverse_covariance: covariance must be square");
  const Eigen::Index p = sample_cov.rows();
  InverseCovarianceProblem out;
  out.sample_cov = std::move(sample_cov);
  out.lambda = lambda;
  out.composite.smooth = std::make_shared<LogDetLoss>(out.sample_cov);
  out.composite.nonsmooth = std::make_shared<SymmetricMatrixL1>(lambda, p);
  Vector diag = out.sample_cov.diagonal().array() + lambda;
  out.composite.initial_point = vec(diag.cwiseInverse().asDiagonal().toDenseMatrix());
  return out;
}

InverseCovarianceProblem make_inverse_covariance(const SyntheticSpec& spec, double lambda) {
  require(spec.dim >= 2, "make_inverse_covariance: p must be at least 2");
  require(spec.samples >= 2, "make_inverse_covariance: need at least two samples");
  Rng rng(spec.seed);
  const Eigen::Index p = spec.dim;
  // Chain graph with unit diagonal. The tridiagonal spectrum lies in
  // [1 - 2c, 1 + 2c], so c = (k - 1) / (2 (k + 1)) targets condition number k.
  const double kappa = std::max(1.0, spec.condition_target);
  const double coupling = (kappa - 1.0) / (2.0 * (kappa + 1.0));
  Matrix precision = Matrix::Identity(p, p);
  for (Eigen::Index i = 0; i + 1 < p; ++i) {
    precision(i, i + 1) = -coupling;
    precision(i + 1, i) = -coupling;
  }
  // x = L^{-T} z has covariance (L L^T)^{-1} = precision^{-1}.
  const Matrix l = Eigen::LLT<Matrix>(precision).matrixL();
  const Matrix z = rng.normal_matrix(p, spec.samples);
  const Matrix draws = l.transpose().triangularView<Eigen::Upper>().solve(z).transpose();
  auto out = make_inverse_covariance(standardized_covariance(draws), lambda);
  out.true_precision = std::move(precision);
  return out;
}

}  // namespace pnopt
