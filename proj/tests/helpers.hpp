// Copyright (c) 2026 The pfa authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

#include "pfa/preprocessing.hpp"
#include "pfa/random.hpp"
#include "pfa/timeseries.hpp"

namespace pfa::test {

// Sine sampled on a window centered at t = 0, so the sample mean vanishes by
// odd symmetry and the series stays exactly AR(2) after mean removal.
inline Vector centered_sine(double omega, Index t_count, double phase = 0.0) {
  Vector out(t_count);
  const double center = (static_cast<double>(t_count) - 1.0) / 2.0;
  for (Index j = 0; j < t_count; ++j)
    out(j) = std::sin(omega * (static_cast<double>(j) - center) + phase);
  return out;
}

// Gaussian signal with lag-1 structure, sphered; generic full-rank test input.
inline TimeSeries random_sphered(std::uint64_t seed, Index n, Index t, double smooth = 0.5) {
  NormalSampler rng(seed);
  Matrix data = rng.matrix(n, t);
  for (Index c = 1; c < t; ++c) data.col(c) += smooth * data.col(c - 1);
  return sphere(TimeSeries(std::move(data)));
}

// Two exactly-AR(2) sines plus noise dimensions, orthogonally mixed and
// sphered: the canonical lossless-subspace instance. Outputs the mixing and
// sphering pieces needed to build subspace oracles.
struct LosslessInstance {
  TimeSeries z;
  Matrix mix;        // orthogonal Q applied to [sines; noise]
  Matrix whitening;  // S from the sphering fit
};

inline LosslessInstance lossless_pair_instance(std::uint64_t seed, Index noise_dims, Index t,
                                               double omega1 = 0.1, double omega2 = 0.2) {
  const Index n = 2 + noise_dims;
  Matrix data(n, t);
  data.row(0) = centered_sine(omega1, t).transpose();
  data.row(1) = centered_sine(omega2, t).transpose();
  NormalSampler rng(derive_seed(seed, {0xD0}));
  data.bottomRows(noise_dims) = rng.matrix(noise_dims, t);
  const Matrix q = random_orthogonal(derive_seed(seed, {0xD1}), n);
  const TimeSeries mixed{Matrix(q * data)};
  const SpheringTransform transform = fit_sphering(mixed);
  return {apply_sphering(transform, mixed), q, transform.whitening};
}

// Largest principal angle between the column spaces of two orthonormal-column
// matrices of equal rank.
inline double largest_principal_angle(const Matrix& u, const Matrix& v) {
  Eigen::JacobiSVD<Matrix> svd(u.transpose() * v);
  const double smin = svd.singularValues().minCoeff();
  return std::acos(std::min(1.0, std::max(-1.0, smin)));
}

// The subspace of extraction functionals yielding noise-free outputs: the
// orthogonal complement of the sphered images of the noise axes.
inline Matrix noise_free_plane(const LosslessInstance& inst, Index signal_dims = 2) {
  const Index n = inst.mix.rows();
  const Matrix noise_images = inst.whitening * inst.mix.rightCols(n - signal_dims);
  Eigen::HouseholderQR<Matrix> qr(noise_images);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q.rightCols(signal_dims);
}

}  // namespace pfa::test
