#pragma once

#include <optional>

#include "pnopt/composite_problem.hpp"

namespace pnopt {

/// sign(x_i) * max(|x_i| - t*lambda, 0); ties map to exactly zero.
Vector soft_threshold(const Vector& x, double t, double lambda);
/// Per-coordinate thresholds t*lambda*weights_i.
Vector soft_threshold(const Vector& x, double t, double lambda, const Vector& weights);

/// Coordinatewise clamp onto [lower, upper]. Bounds may be +-inf.
Vector box_project(const Vector& x, const Vector& lower, const Vector& upper);

/// h(x) = lambda * sum_i w_i |x_i|, with w = 1 unless per-coordinate weights are given.
class L1Penalty final : public NonsmoothOracle {
 public:
  explicit L1Penalty(double weight);
  L1Penalty(double weight, Vector coordinate_weights);

  double weight() const { return weight_; }
  const std::optional<Vector>& coordinate_weights() const { return coordinate_weights_; }

  double value(const Vector& x) const override;
  Vector prox(const Vector& x, double t) const override;
  std::optional<bool> subdifferential_contains(const Vector& y, const Vector& v,
                                               double tol) const override;

 private:
  double threshold(Eigen::Index i) const;

  double weight_;
  std::optional<Vector> coordinate_weights_;
};

/// Indicator of {x : lower <= x <= upper}.
class BoxIndicator final : public NonsmoothOracle {
 public:
  BoxIndicator(Vector lower, Vector upper);

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  double value(const Vector& x) const override;
  Vector prox(const Vector& x, double t) const override;
  std::optional<bool> subdifferential_contains(const Vector& y, const Vector& v,
                                               double tol) const override;

 private:
  Vector lower_;
  Vector upper_;
};

/// h = 0, so the composite problem reduces to smooth minimization.
class ZeroPenalty final : public NonsmoothOracle {
 public:
  double value(const Vector& x) const override;
  Vector prox(const Vector& x, double t) const override;
  std::optional<bool> subdifferential_contains(const Vector& y, const Vector& v,
                                               double tol) const override;
};

}  // namespace pnopt
