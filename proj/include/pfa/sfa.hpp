// Copyright (c) 2026 The pfa authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

#include "pfa/preprocessing.hpp"
#include "pfa/timeseries.hpp"

namespace pfa {

/// Slow feature extraction from a sphered signal. slowness holds the
/// temporal-derivative variances of the extracted components, ascending
/// (slowest first).
struct SfaResult {
  Matrix A_r;
  Vector slowness;
};

/// Diagonalizes <z' z'^T> with z'(t) = z(t) - z(t-1) and selects the r
/// eigenvectors of smallest slowness. The eigenproblem is restricted to the
/// variance-bearing subspace of <z z^T> so that directions annihilated by a
/// rank-deficient sphering (identically zero, hence spuriously "slow") are
/// never emitted.
inline SfaResult solve_sfa(const TimeSeries& z, int r, const ThresholdPolicy& policy = {}) {
  if (z.samples() < 3) throw std::invalid_argument("insufficient samples");
  if (r < 1 || r > z.dim()) throw std::invalid_argument("r must lie in [1, n]");
  policy.validate();

  const Matrix dz = z.data.rightCols(z.samples() - 1) - z.data.leftCols(z.samples() - 1);
  const Matrix d = average_gram(dz);
  const Matrix cov = average_gram(z.data);

  const SymmetricEig cov_eig = eig_symmetric(cov);
  const double lmax = cov_eig.values(cov_eig.values.size() - 1);
  const double cutoff = policy.relative_cutoff * std::max(lmax, 0.0);
  Index kept = 0;
  for (Index i = 0; i < cov_eig.values.size(); ++i)
    if (cov_eig.values(i) > cutoff && cov_eig.values(i) > 0.0) ++kept;
  if (r > kept) throw std::invalid_argument("r exceeds the signal's non-degenerate dimension");
  const Matrix basis = cov_eig.vectors.rightCols(kept);

  const Matrix d_proj = basis.transpose() * d * basis;
  const SymmetricEig eig = eig_symmetric((d_proj + d_proj.transpose()) / 2.0);

  Matrix a_r = basis * eig.vectors.leftCols(r);
  for (Index j = 0; j < a_r.cols(); ++j) {
    Index imax = 0;
    a_r.col(j).cwiseAbs().maxCoeff(&imax);
    if (a_r(imax, j) < 0) a_r.col(j) = -a_r.col(j);
  }
  return {std::move(a_r), eig.values.head(r)};
}

}  // namespace pfa
