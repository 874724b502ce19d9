#pragma once

#include <cstdint>
#include <random>

#include "bernstein/linalg.hpp"

namespace testing_support {

using bernstein::Matrix;
using bernstein::Vector;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }

inline int uniform_int(std::mt19937_64& g, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }

inline Vector random_vector(std::mt19937_64& g, std::size_t n, double lo = -1.0, double hi = 1.0) {
  Vector v(n);
  for (double& x : v) x = uniform(g, lo, hi);
  return v;
}

inline Matrix random_matrix(std::mt19937_64& g, std::size_t r, std::size_t c, double scale = 1.0) {
  Matrix A(r, c);
  for (double& x : A.data()) x = uniform(g, -scale, scale);
  return A;
}

inline Matrix random_symmetric(std::mt19937_64& g, std::size_t n, double scale = 1.0) {
  const Matrix A = random_matrix(g, n, n, scale);
  return bernstein::symmetrized(A);
}

}  // namespace testing_support
