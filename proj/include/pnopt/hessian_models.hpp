#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <variant>

#include "pnopt/composite_problem.hpp"

namespace pnopt {

/// s = x_{k+1} - x_k, y = grad g(x_{k+1}) - grad g(x_k).
struct SecantPair {
  Vector s;
  Vector y;
};

/// Curvature condition for accepting a pair: s'y > 1e-8 ||s|| ||y||.
bool secant_pair_acceptable(const SecantPair& pair);

enum class CurvatureKind { ExactHessian, DenseBfgs, LimitedMemoryBfgs, ScaledIdentity };

const char* to_string(CurvatureKind kind);

/// Positive definite model H_k of the Hessian of g, applied as d -> H_k d.
class CurvatureModel {
 public:
  static CurvatureModel exact_hessian(std::shared_ptr<const SmoothOracle> oracle);
  /// B_0 = I. With scale_initial, B_0 is replaced by (y'y / s'y) I just
  /// before the first accepted update.
  static CurvatureModel dense_bfgs(Eigen::Index dim, bool scale_initial = false);
  /// Compact (direct, not inverse) representation. With adaptive scaling the
  /// initial matrix is gamma^{-1} I with gamma = s'y / y'y from the newest pair.
  static CurvatureModel limited_memory_bfgs(Eigen::Index dim, int memory = 50,
                                            bool adaptive_scaling = true);
  static CurvatureModel scaled_identity(Eigen::Index dim, double tau = 1.0);

  CurvatureKind kind() const;
  Eigen::Index dim() const { return dim_; }

  /// Re-linearizes an exact-Hessian model at x; no-op for the other variants.
  void set_anchor(const Vector& x, EvalCounters& counters);

  Vector apply(const Vector& d) const;

  /// Returns false when the pair is skipped (model left unchanged).
  /// ExactHessian ignores pairs; ScaledIdentity takes the Barzilai-Borwein
  /// value s'y / s's clamped to [1e-10, 1e10].
  bool update(const SecantPair& pair);

  std::int64_t skipped_updates() const { return skipped_; }
  std::int64_t accepted_updates() const { return accepted_; }
  /// Hessian-vector products taken through the oracle (action-only exact models).
  std::int64_t oracle_actions() const { return oracle_actions_; }

  /// tau for ScaledIdentity; throws ContractViolation for other kinds.
  double tau() const;
  /// Stored pair count for L-BFGS, 0 otherwise.
  std::size_t stored_pairs() const;

  /// Explicit matrix, assembled from apply() for the implicit variants.
  Matrix to_dense() const;

 private:
  struct Exact {
    std::shared_ptr<const SmoothOracle> oracle;
    Vector anchor;
    std::optional<Matrix> dense;
  };
  struct DenseBfgs {
    Matrix b;
    bool scale_initial = false;
  };
  struct Lbfgs {
    int memory = 50;
    bool adaptive_scaling = true;
    double delta = 1.0;  // B_0 = delta * I, delta = 1 / gamma
    std::deque<SecantPair> pairs;
    Matrix w;  // [delta S, Y]
    Eigen::PartialPivLU<Matrix> middle;
    void rebuild();
  };
  struct Scaled {
    double tau = 1.0;
  };

  CurvatureModel(Eigen::Index dim, std::variant<Exact, DenseBfgs, Lbfgs, Scaled> state)
      : dim_(dim), state_(std::move(state)) {}

  Eigen::Index dim_;
  std::variant<Exact, DenseBfgs, Lbfgs, Scaled> state_;
  std::int64_t skipped_ = 0;
  std::int64_t accepted_ = 0;
  mutable std::int64_t oracle_actions_ = 0;
};

struct EigenBounds {
  double lower = 0.0;  // min Rayleigh quotient over random probes
  double upper = 0.0;  // power iteration
};

/// Estimates of the extreme eigenvalues of the model. These are estimates,
/// not certified bounds.
EigenBounds eigen_bounds_probe(const CurvatureModel& model, int probes, std::uint64_t seed = 7);

}  // namespace pnopt
