#pragma once

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "pnopt/types.hpp"

namespace pnopt {

// Seeded mt19937_64 with Boost distributions; a seed fixes the stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo = 0.0, double hi = 1.0) {
    return boost::random::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  Eigen::Index index(Eigen::Index lo, Eigen::Index hi) {
    return boost::random::uniform_int_distribution<Eigen::Index>(lo, hi)(engine_);
  }

  Vector normal_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }
  Vector uniform_vector(Eigen::Index n, double lo, double hi) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }
  /// Filled column by column.
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }

  /// Fisher-Yates.
  template <class Container>
  void shuffle(Container& c) {
    for (Eigen::Index i = static_cast<Eigen::Index>(c.size()) - 1; i > 0; --i) {
      std::swap(c[i], c[index(0, i)]);
    }
  }

 private:
  boost::random::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace pnopt
