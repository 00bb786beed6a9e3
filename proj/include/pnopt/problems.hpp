#pragma once

#include <cstdint>
#include <functional>

#include "pnopt/composite_problem.hpp"

namespace pnopt {

/// Parameters for the seeded synthetic instance generators. The same spec
/// always produces a bit-identical instance.
struct SyntheticSpec {
  std::uint64_t seed = 0;
  Eigen::Index dim = 0;      // n features, or p for inverse covariance
  Eigen::Index samples = 0;  // s rows, or m Gaussian draws
  double sparsity = 0.2;     // fraction of nonzeros in the ground-truth generator
  double noise = 0.1;
  double condition_target = 1.0;  // lasso column spread, or precision conditioning
};

// ---------------------------------------------------------------------------
// Lasso: g(x) = 1/2 ||Ax - b||^2

class QuadraticLoss final : public SmoothOracle {
 public:
  QuadraticLoss(Matrix design, Vector response);

  Eigen::Index dim() const override { return design_.cols(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  bool has_hessian() const override { return true; }
  Vector hessian_action(const Vector& x, const Vector& v) const override;
  std::optional<Matrix> hessian_dense(const Vector& x) const override;
  std::optional<double> lipschitz_grad_hint() const override { return lipschitz_; }
  std::optional<double> strong_convexity_hint() const override { return strong_convexity_; }
  std::optional<double> lipschitz_hessian_hint() const override { return 0.0; }

  const Matrix& gram() const { return gram_; }

 private:
  Matrix design_;
  Vector response_;
  Matrix gram_;
  double lipschitz_ = 0.0;
  double strong_convexity_ = 0.0;
};

struct QuadraticL1Problem {
  Matrix design;
  Vector response;
  double lambda = 0.0;
  double lipschitz = 0.0;         // largest eigenvalue of A^T A
  double strong_convexity = 0.0;  // smallest eigenvalue of A^T A
  Vector generator;               // sparse ground truth used to synthesize b (may be empty)
  CompositeProblem composite;
};

QuadraticL1Problem make_lasso(Matrix design, Vector response, double lambda);
QuadraticL1Problem make_lasso(const SyntheticSpec& spec, double lambda);

// ---------------------------------------------------------------------------
// l1-regularized logistic regression:
//   g(w) = (1/s) sum_i log(1 + exp(-y_i w^T x_i)) + (ridge/2) ||w||^2

class LogisticLoss final : public SmoothOracle {
 public:
  /// labels must already be in {-1, +1}.
  LogisticLoss(Matrix samples, Vector labels, double ridge);

  Eigen::Index dim() const override { return samples_.cols(); }
  double value(const Vector& w) const override;
  Vector gradient(const Vector& w) const override;
  bool has_hessian() const override { return true; }
  Vector hessian_action(const Vector& w, const Vector& v) const override;
  std::optional<Matrix> hessian_dense(const Vector& w) const override;
  std::optional<double> lipschitz_grad_hint() const override { return lipschitz_; }
  std::optional<double> strong_convexity_hint() const override { return ridge_; }

 private:
  Matrix samples_;
  Vector labels_;
  double ridge_;
  double lipschitz_;
};

struct LogisticL1Problem {
  Matrix samples;
  Vector labels;  // in {-1, +1}
  double lambda = 0.0;
  double ridge = 0.0;
  CompositeProblem composite;
};

/// {0, 1} labels become {-1, +1}; any other value is kept by sign.
/// Throws ContractViolation for a zero label outside a {0,1} labelling.
Vector remap_labels(const Vector& labels);

LogisticL1Problem make_logistic(Matrix samples, const Vector& labels, double lambda,
                                double ridge = 0.0);
LogisticL1Problem make_logistic(const SyntheticSpec& spec, double lambda, double ridge = 0.0);

struct ValueGrad {
  double value = 0.0;
  Vector gradient;
};

/// Overflow-free value and gradient (softplus form).
ValueGrad logistic_value_grad(const LogisticL1Problem& problem, const Vector& w);

// ---------------------------------------------------------------------------
// Sparse inverse covariance:
//   g(Theta) = trace(S Theta) - log det Theta,  h(Theta) = lambda ||vec Theta||_1
// Iterates are column-major vec(Theta) of length p*p.

Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Eigen::Index p);

class LogDetLoss final : public SmoothOracle {
 public:
  explicit LogDetLoss(Matrix sample_cov);

  Eigen::Index dim() const override { return p_ * p_; }
  Eigen::Index order() const { return p_; }
  /// +inf when Theta is not positive definite.
  double value(const Vector& theta) const override;
  Vector gradient(const Vector& theta) const override;
  bool has_hessian() const override { return true; }
  Vector hessian_action(const Vector& theta, const Vector& v) const override;
  /// Theta^{-1} (x) Theta^{-1}, p^2 x p^2.
  std::optional<Matrix> hessian_dense(const Vector& theta) const override;

 private:
  Matrix sample_cov_;
  Eigen::Index p_;
};

/// Entrywise l1 on vec(Theta); each prox result is re-symmetrized by averaging
/// with its transpose.
class SymmetricMatrixL1 final : public NonsmoothOracle {
 public:
  SymmetricMatrixL1(double weight, Eigen::Index order);

  double value(const Vector& x) const override;
  Vector prox(const Vector& x, double t) const override;
  std::optional<bool> subdifferential_contains(const Vector& y, const Vector& v,
                                               double tol) const override;

 private:
  double weight_;
  Eigen::Index p_;
};

struct InverseCovarianceProblem {
  Matrix sample_cov;
  double lambda = 0.0;
  Matrix true_precision;  // synthetic instances only
  CompositeProblem composite;
};

struct LogDetEval {
  double value = 0.0;
  Matrix gradient;
  /// V -> Theta^{-1} V Theta^{-1}, reusing the factorization of Theta.
  std::function<Matrix(const Matrix&)> hessian_action;
};

/// Throws DomainError when Theta is not positive definite.
LogDetEval logdet_value_grad_hess(const InverseCovarianceProblem& problem, const Matrix& theta);

InverseCovarianceProblem make_inverse_covariance(Matrix sample_cov, double lambda);
/// Chain-structured sparse precision, Gaussian draws, standardized features.
InverseCovarianceProblem make_inverse_covariance(const SyntheticSpec& spec, double lambda);

/// Sample covariance of standardized (zero mean, unit variance) columns.
Matrix standardized_covariance(const Matrix& draws);

}  // namespace pnopt
