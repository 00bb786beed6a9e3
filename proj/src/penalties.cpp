#include "pnopt/penalties.hpp"

#include <cmath>

namespace pnopt {

namespace {

double shrink(double x, double threshold) {
  const double mag = std::abs(x) - threshold;
  if (mag <= 0.0) return 0.0;
  return std::copysign(mag, x);
}

}  // namespace

Vector soft_threshold(const Vector& x, double t, double lambda) {
  require(t > 0.0, "soft_threshold: t must be positive");
  require(lambda > 0.0, "soft_threshold: lambda must be positive");
  const double level = t * lambda;
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = shrink(x[i], level);
  return out;
}

Vector soft_threshold(const Vector& x, double t, double lambda, const Vector& weights) {
  require(t > 0.0, "soft_threshold: t must be positive");
  require(lambda > 0.0, "soft_threshold: lambda must be positive");
  require_dim(weights.size(), x.size(), "soft_threshold weights");
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = shrink(x[i], t * lambda * weights[i]);
  return out;
}

Vector box_project(const Vector& x, const Vector& lower, const Vector& upper) {
  require_dim(lower.size(), x.size(), "box_project lower");
  require_dim(upper.size(), x.size(), "box_project upper");
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (lower[i] > upper[i]) throw ContractViolation("box_project: lower > upper");
    out[i] = std::min(std::max(x[i], lower[i]), upper[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// L1Penalty

L1Penalty::L1Penalty(double weight) : weight_(weight) {
  require(weight > 0.0, "L1Penalty: weight must be positive");
}

L1Penalty::L1Penalty(double weight, Vector coordinate_weights)
    : weight_(weight), coordinate_weights_(std::move(coordinate_weights)) {
  require(weight > 0.0, "L1Penalty: weight must be positive");
  require((coordinate_weights_->array() >= 0.0).all(),
          "L1Penalty: coordinate weights must be nonnegative");
}

double L1Penalty::threshold(Eigen::Index i) const {
  return coordinate_weights_ ? weight_ * (*coordinate_weights_)[i] : weight_;
}

double L1Penalty::value(const Vector& x) const {
  if (!coordinate_weights_) return weight_ * x.lpNorm<1>();
  require_dim(coordinate_weights_->size(), x.size(), "L1Penalty");
  return weight_ * coordinate_weights_->cwiseProduct(x.cwiseAbs()).sum();
}

Vector L1Penalty::prox(const Vector& x, double t) const {
  if (!coordinate_weights_) return soft_threshold(x, t, weight_);
  return soft_threshold(x, t, weight_, *coordinate_weights_);
}

std::optional<bool> L1Penalty::subdifferential_contains(const Vector& y, const Vector& v,
                                                        double tol) const {
  require_dim(v.size(), y.size(), "L1Penalty subdifferential");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double level = threshold(i);
    if (y[i] == 0.0) {
      if (std::abs(v[i]) > level + tol) return false;
    } else if (std::abs(v[i] - std::copysign(level, y[i])) > tol) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// BoxIndicator

BoxIndicator::BoxIndicator(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  require_dim(upper_.size(), lower_.size(), "BoxIndicator");
  require((lower_.array() <= upper_.array()).all(), "BoxIndicator: lower > upper");
}

double BoxIndicator::value(const Vector& x) const {
  require_dim(x.size(), lower_.size(), "BoxIndicator");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < lower_[i] || x[i] > upper_[i]) return kInf;
  }
  return 0.0;
}

Vector BoxIndicator::prox(const Vector& x, double t) const {
  require(t > 0.0, "BoxIndicator::prox: t must be positive");
  return box_project(x, lower_, upper_);
}

std::optional<bool> BoxIndicator::subdifferential_contains(const Vector& y, const Vector& v,
                                                           double tol) const {
  require_dim(v.size(), y.size(), "BoxIndicator subdifferential");
  if (value(y) == kInf) return false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const bool at_lower = y[i] == lower_[i];
    const bool at_upper = y[i] == upper_[i];
    if (at_lower && at_upper) continue;
    if (at_lower) {
      if (v[i] > tol) return false;
    } else if (at_upper) {
      if (v[i] < -tol) return false;
    } else if (std::abs(v[i]) > tol) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// ZeroPenalty

double ZeroPenalty::value(const Vector& /*x*/) const { return 0.0; }

Vector ZeroPenalty::prox(const Vector& x, double t) const {
  require(t > 0.0, "ZeroPenalty::prox: t must be positive");
  return x;
}

std::optional<bool> ZeroPenalty::subdifferential_contains(const Vector& y, const Vector& v,
                                                          double tol) const {
  require_dim(v.size(), y.size(), "ZeroPenalty subdifferential");
  return v.size() == 0 || v.cwiseAbs().maxCoeff() <= tol;
}

}  // namespace pnopt
