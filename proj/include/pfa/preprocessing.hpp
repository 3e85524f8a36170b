// Copyright (c) 2026 The pfa authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "pfa/timeseries.hpp"

namespace pfa {

/// Relative eigenvalue cutoff used by every symmetric pseudo-inverse in the
/// pipeline. Eigenvalues below relative_cutoff * lambda_max are treated as
/// exact zeros and their eigenspaces are annihilated.
struct ThresholdPolicy {
  double relative_cutoff = 1e-10;

  void validate() const {
    if (!(relative_cutoff >= 0.0 && relative_cutoff < 1.0))
      throw std::invalid_argument("relative cutoff must lie in [0, 1)");
  }
};

/// Eigenvalues ascending; each eigenvector's largest-magnitude entry is made
/// positive so decompositions are reproducible.
struct SymmetricEig {
  Vector values;
  Matrix vectors;
};

inline SymmetricEig eig_symmetric(const Matrix& c) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(c);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  SymmetricEig out{solver.eigenvalues(), solver.eigenvectors()};
  for (Index j = 0; j < out.vectors.cols(); ++j) {
    Index imax = 0;
    out.vectors.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.vectors(imax, j) < 0) out.vectors.col(j) = -out.vectors.col(j);
  }
  return out;
}

namespace detail {

inline Matrix check_symmetric(const Matrix& c) {
  if (!c.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
  if (c.rows() != c.cols()) throw std::invalid_argument("matrix not square");
  const double scale = c.cwiseAbs().maxCoeff();
  const double asym = (c - c.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(scale, 1.0)) throw std::invalid_argument("matrix not symmetric");
  return (c + c.transpose()) / 2.0;
}

}  // namespace detail

struct ThresholdedInverse {
  Matrix inverse;
  Index kept_rank = 0;
};

/// Eigendecomposition-based pseudo-inverse: eigenvalues at or below the
/// relative cutoff become 0, the rest are inverted.
inline ThresholdedInverse thresholded_inverse_full(const Matrix& c, const ThresholdPolicy& policy) {
  policy.validate();
  const SymmetricEig eig = eig_symmetric(detail::check_symmetric(c));
  const double lmax = eig.values.size() ? eig.values(eig.values.size() - 1) : 0.0;
  const double cutoff = policy.relative_cutoff * std::max(lmax, 0.0);
  Vector inv = Vector::Zero(eig.values.size());
  Index kept = 0;
  for (Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > cutoff && eig.values(i) > 0.0) {
      inv(i) = 1.0 / eig.values(i);
      ++kept;
    }
  }
  Matrix out = eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
  return {Matrix((out + out.transpose()) / 2.0), kept};
}

inline Matrix thresholded_inverse(const Matrix& c, const ThresholdPolicy& policy = {}) {
  return thresholded_inverse_full(c, policy).inverse;
}

/// Affine transform taking the expanded signal to zero mean and (up to the
/// kept rank) identity covariance: z(t) = whitening * (x(t) - mean).
struct SpheringTransform {
  Vector mean;
  Matrix whitening;  // symmetric PSD, C^(-1/2) on the kept eigenspaces
  Index kept_rank = 0;
};

inline SpheringTransform fit_sphering(const TimeSeries& x, const ThresholdPolicy& policy = {}) {
  policy.validate();
  const Vector mean = average_columns(x.data, 0, x.samples() - 1);
  const Matrix centered = x.data.colwise() - mean;
  const Matrix cov = average_gram(centered);
  const SymmetricEig eig = eig_symmetric(cov);
  const double lmax = eig.values(eig.values.size() - 1);
  const double cutoff = policy.relative_cutoff * std::max(lmax, 0.0);
  Vector scale = Vector::Zero(eig.values.size());
  Index kept = 0;
  for (Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > cutoff && eig.values(i) > 0.0) {
      scale(i) = 1.0 / std::sqrt(eig.values(i));
      ++kept;
    }
  }
  if (kept == 0) throw std::runtime_error("degenerate signal");
  Matrix s = eig.vectors * scale.asDiagonal() * eig.vectors.transpose();
  return {mean, Matrix((s + s.transpose()) / 2.0), kept};
}

inline TimeSeries apply_sphering(const SpheringTransform& t, const TimeSeries& x) {
  if (x.dim() != t.whitening.cols()) throw std::invalid_argument("sphering dimension mismatch");
  return TimeSeries(t.whitening * (x.data.colwise() - t.mean));
}

inline TimeSeries sphere(const TimeSeries& x, const ThresholdPolicy& policy = {}) {
  return apply_sphering(fit_sphering(x, policy), x);
}

}  // namespace pfa
