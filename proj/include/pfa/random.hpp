// Copyright (c) 2026 The pfa authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

#include "pfa/timeseries.hpp"

namespace pfa {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Order-insensitive stream seed: master seed XOR'd with scrambled counters.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> counters) {
  std::uint64_t s = splitmix64(master);
  std::uint64_t salt = 0x5851F42D4C957F2DULL;
  for (std::uint64_t c : counters) {
    s ^= splitmix64(c ^ salt);
    salt = splitmix64(salt);
  }
  return splitmix64(s);
}

/// Standard-normal stream over mt19937_64 bits via Box-Muller. The mapping is
/// pinned here rather than through std::normal_distribution, whose deviate
/// sequence is implementation-defined.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Column-major fill (all components of one time step, then the next).
  Matrix matrix(Index rows, Index cols) {
    Matrix out(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) out(i, j) = (*this)();
    return out;
  }

 private:
  double uniform01() {  // strictly inside (0, 1)
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Orthogonal matrix from QR of a seeded Gaussian matrix, sign-fixed so that
/// R's diagonal is positive (Haar-distributed given the fix).
inline Matrix random_orthogonal(std::uint64_t seed, Index n) {
  if (n == 0) return Matrix(0, 0);
  NormalSampler rng(seed);
  const Matrix g = rng.matrix(n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  return q;
}

/// Member of O(r, s): block-diagonal pair of orthogonal transformations.
inline Matrix random_block_orthogonal(std::uint64_t seed, Index r, Index s) {
  Matrix out = Matrix::Zero(r + s, r + s);
  out.topLeftCorner(r, r) = random_orthogonal(derive_seed(seed, {1}), r);
  out.bottomRightCorner(s, s) = random_orthogonal(derive_seed(seed, {2}), s);
  return out;
}

}  // namespace pfa
