// Copyright (c) 2026 The pfa authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "pfa/preprocessing.hpp"
#include "pfa/timeseries.hpp"

namespace pfa {

/// Linear autoregressive predictor: z(t) ~ B * zeta(t) with
/// B = (B_1, ..., B_p) of shape q x q*p for a q-dimensional signal.
struct ArPredictor {
  Matrix coefficients;
  int p = 1;
  int delta = 1;
  Index zeta_rank = 0;  // kept rank of <zeta zeta^T> after thresholding

  Index dim() const { return coefficients.rows(); }

  Vector predict(const Vector& zeta) const {
    if (zeta.size() != coefficients.cols()) throw std::invalid_argument("history dimension mismatch");
    return coefficients * zeta;
  }

  Matrix predict(const Matrix& zetas) const {
    if (zetas.rows() != coefficients.cols()) throw std::invalid_argument("history dimension mismatch");
    return coefficients * zetas;
  }
};

/// Training moments over t in {p*delta, ..., T-1}: cross = <z zeta^T>,
/// gram = <zeta zeta^T>.
struct LaggedMoments {
  Matrix cross;
  Matrix gram;
  Index count = 0;
};

inline LaggedMoments lagged_moments(const TimeSeries& z, int p, int delta) {
  const Matrix zeta = history_matrix(z, p, delta);
  const Matrix now = z.data.rightCols(zeta.cols());
  return {average_outer(now, zeta), average_gram(zeta), zeta.cols()};
}

/// W = <z zeta^T> <zeta zeta^T>^-1 with the thresholded pseudo-inverse.
inline ArPredictor fit_full(const TimeSeries& z, int p, int delta, const ThresholdPolicy& policy = {}) {
  if (p < 1 || delta < 1) throw std::invalid_argument("prediction order and lag step must be positive");
  if (z.samples() <= static_cast<Index>(p) * delta) throw std::invalid_argument("insufficient samples");
  const LaggedMoments mom = lagged_moments(z, p, delta);
  const ThresholdedInverse inv = thresholded_inverse_full(mom.gram, policy);
  return {mom.cross * inv.inverse, p, delta, inv.kept_rank};
}

namespace detail {

inline void require_orthonormal_columns(const Matrix& a_r, double tol = 1e-8) {
  const Matrix gram = a_r.transpose() * a_r;
  if ((gram - Matrix::Identity(a_r.cols(), a_r.cols())).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("non-orthonormal extraction matrix");
}

}  // namespace detail

/// Reduced-model coefficients
///   B_z(A_r) = A_r^T <z zeta^T> A_r_  (A_r_^T <zeta zeta^T> A_r_)^-1
/// where A_r_ = I_p (x) A_r. The inner inverse uses the same threshold policy.
inline ArPredictor fit_reduced(const TimeSeries& z, const Matrix& a_r, int p, int delta,
                               const ThresholdPolicy& policy = {}) {
  if (a_r.rows() != z.dim() || a_r.cols() < 1 || a_r.cols() > z.dim())
    throw std::invalid_argument("extraction matrix shape mismatch");
  detail::require_orthonormal_columns(a_r);
  const LaggedMoments mom = lagged_moments(z, p, delta);
  const Matrix blocks = kron_block(a_r, p);
  const Matrix cross_r = a_r.transpose() * mom.cross * blocks;
  const Matrix gram_r = blocks.transpose() * mom.gram * blocks;
  const ThresholdedInverse inv = thresholded_inverse_full((gram_r + gram_r.transpose()) / 2.0, policy);
  return {cross_r * inv.inverse, p, delta, inv.kept_rank};
}

/// Average squared prediction error
///   < || target(t) - P * predictor(zeta(t)) ||^2 >  over t in {p*delta, ..., T-1},
/// with histories embedded from `histories_from` and P an optional projector.
inline double prediction_error(const ArPredictor& predictor, const TimeSeries& target,
                               const TimeSeries& histories_from, const Matrix* projector = nullptr) {
  if (target.samples() != histories_from.samples())
    throw std::invalid_argument("target and history series must share the valid range");
  const Matrix zeta = history_matrix(histories_from, predictor.p, predictor.delta);
  Matrix predicted = predictor.predict(zeta);
  if (projector) {
    if (projector->cols() != predicted.rows()) throw std::invalid_argument("projector dimension mismatch");
    predicted = *projector * predicted;
  }
  if (target.dim() != predicted.rows()) throw std::invalid_argument("target dimension mismatch");
  const Matrix diff = target.data.rightCols(zeta.cols()) - predicted;
  return diff.squaredNorm() / static_cast<double>(zeta.cols());
}

/// One-step history propagator V = <zeta(t+1) zeta^T(t)> <zeta zeta^T>^-1,
/// defined for unit lag step. Both averages run over the histories that have
/// a successor, t in {p, ..., T-2}; with a shared range V is the exact
/// least-squares propagator and reproduces noiseless linear dynamics exactly.
struct ShiftPredictor {
  Matrix v;
  int p = 1;
};

inline ShiftPredictor fit_shift(const TimeSeries& z, int p, const ThresholdPolicy& policy = {}) {
  if (p < 1) throw std::invalid_argument("prediction order must be positive");
  if (z.samples() < static_cast<Index>(p) + 2) throw std::invalid_argument("insufficient samples");
  const Matrix zeta = history_matrix(z, p, 1);
  const Index m = zeta.cols();
  const Matrix cross = average_outer(zeta.rightCols(m - 1), zeta.leftCols(m - 1));
  const Matrix gram = average_gram(zeta.leftCols(m - 1));
  return {cross * thresholded_inverse(gram, policy), p};
}

/// i-step iterated prediction W V^i zeta, with V^i formed by repeated
/// multiplication (i stays small).
inline Vector iterated_prediction(const ArPredictor& w, const ShiftPredictor& v, const Vector& zeta, int i) {
  if (i < 0) throw std::invalid_argument("iteration count must be nonnegative");
  if (w.p != v.p) throw std::invalid_argument("prediction order mismatch");
  Matrix power = Matrix::Identity(v.v.rows(), v.v.cols());
  for (int j = 0; j < i; ++j) power = v.v * power;
  return w.predict(Vector(power * zeta));
}

}  // namespace pfa
