// Copyright (c) 2026 The pfa authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

#include "pfa/pfa.hpp"
#include "pfa/preprocessing.hpp"
#include "pfa/timeseries.hpp"

namespace pfa {

// Single-component extraction under the per-component AR model: find a unit-
// variance direction a and coefficients b with a^T z(t) ~ a^T hist(t) b,
// optimized by alternating exact conditional minimizers.

namespace detail {

// Lagged component matrices z(t-j), j = 1..p, columns aligned with t = p..T-1.
inline std::vector<Matrix> lag_slices(const TimeSeries& z, int p) {
  if (p < 1) throw std::invalid_argument("prediction order must be positive");
  if (z.samples() <= p) throw std::invalid_argument("insufficient samples");
  const Index m = z.samples() - p;
  std::vector<Matrix> lags;
  lags.reserve(p);
  for (int j = 1; j <= p; ++j) lags.push_back(z.data.middleCols(p - j, m));
  return lags;
}

inline Matrix hist_times_b(const std::vector<Matrix>& lags, const Vector& b) {
  Matrix q = Matrix::Zero(lags.front().rows(), lags.front().cols());
  for (size_t j = 0; j < lags.size(); ++j) q += b(static_cast<Index>(j)) * lags[j];
  return q;
}

}  // namespace detail

/// < (a^T (z - hist b))^2 > over t in {p, ..., T-1}.
inline double single_component_error(const TimeSeries& z, const Vector& a, const Vector& b, int p) {
  const auto lags = detail::lag_slices(z, p);
  const Index m = lags.front().cols();
  const Eigen::RowVectorXd s = a.transpose() * z.data.rightCols(m);
  const Eigen::RowVectorXd q = a.transpose() * detail::hist_times_b(lags, b);
  return (s - q).squaredNorm() / static_cast<double>(m);
}

/// Starting coefficients: the single b that best predicts every component of
/// z on average, b^T = <z^T hist> <hist^T hist>^-1.
inline Vector init_b(const TimeSeries& z, int p, const ThresholdPolicy& policy = {}) {
  const auto lags = detail::lag_slices(z, p);
  const Index m = lags.front().cols();
  const Matrix now = z.data.rightCols(m);
  Vector rhs(p);
  Matrix gram(p, p);
  for (int i = 0; i < p; ++i) {
    rhs(i) = now.cwiseProduct(lags[i]).sum() / static_cast<double>(m);
    for (int j = 0; j <= i; ++j) {
      gram(i, j) = lags[i].cwiseProduct(lags[j]).sum() / static_cast<double>(m);
      gram(j, i) = gram(i, j);
    }
  }
  return thresholded_inverse(gram, policy) * rhs;
}

struct DirectionUpdate {
  Vector a;
  Vector eigenvalues;  // ascending, of the residual-covariance pencil
  bool degenerate = false;
};

/// For fixed b, the error-minimizing direction: the smallest eigenvector of
/// <(z - hist b)(z - hist b)^T> under the constraint a^T <z z^T> a = 1.
/// Solved as a generalized symmetric eigenproblem so the step is an exact
/// conditional minimizer even when the sample covariance is only
/// approximately the identity.
inline DirectionUpdate update_a_full(const TimeSeries& z, const Vector& b, int p) {
  if (!b.allFinite()) throw std::invalid_argument("coefficients have non-finite entries");
  const auto lags = detail::lag_slices(z, p);
  const Index m = lags.front().cols();
  const Matrix residual = z.data.rightCols(m) - detail::hist_times_b(lags, b);
  const Matrix e = average_gram(residual);
  const Matrix cov = average_gram(z.data);
  if (!e.allFinite()) throw std::invalid_argument("residual matrix has non-finite entries");

  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(e, cov);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  DirectionUpdate out;
  out.eigenvalues = solver.eigenvalues();
  Vector a = solver.eigenvectors().col(0);
  const double variance = a.dot(cov * a);
  if (!(variance > 0)) throw std::runtime_error("degenerate signal");
  a /= std::sqrt(variance);
  Index imax = 0;
  a.cwiseAbs().maxCoeff(&imax);
  if (a(imax) < 0) a = -a;
  out.a = std::move(a);
  const Index n = out.eigenvalues.size();
  const double scale = std::abs(out.eigenvalues(n - 1));
  out.degenerate = n > 1 && (out.eigenvalues(1) - out.eigenvalues(0)) <= 1e-9 * scale;
  return out;
}

inline Vector update_a(const TimeSeries& z, const Vector& b, int p) {
  return update_a_full(z, b, p).a;
}

/// For fixed a, the error-minimizing coefficients:
/// b^T = <z^T a a^T hist> <hist^T a a^T hist>^-1 (the scalar AR fit of a^T z).
inline Vector update_b(const TimeSeries& z, const Vector& a, int p, const ThresholdPolicy& policy = {}) {
  if (!a.allFinite()) throw std::invalid_argument("direction has non-finite entries");
  const auto lags = detail::lag_slices(z, p);
  const Index m = lags.front().cols();
  const Eigen::RowVectorXd s = a.transpose() * z.data.rightCols(m);
  Matrix sl(p, m);
  for (int j = 0; j < p; ++j) sl.row(j) = a.transpose() * lags[j];
  const Matrix gram = average_gram(sl);
  const Vector rhs = sl * s.transpose() / static_cast<double>(m);
  return thresholded_inverse(gram, policy) * rhs;
}

struct AlternationState {
  Vector a;
  Vector b;
  double error = 0.0;
  int iterations = 0;
  bool converged = false;
  bool ambiguous = false;  // degenerate direction eigenvalue encountered
};

/// Alternates update_a / update_b from the init_b starting point until the
/// error change falls below tol (relative, with a small absolute floor) or
/// max_iter rounds. The error is nonincreasing; the result may still be a
/// local optimum.
inline AlternationState extract_alternating(const TimeSeries& z, int p, int max_iter = 500,
                                            double tol = 1e-9, const ThresholdPolicy& policy = {}) {
  AlternationState state;
  state.b = init_b(z, p, policy);
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    const DirectionUpdate dir = update_a_full(z, state.b, p);
    state.ambiguous = state.ambiguous || dir.degenerate;
    state.a = dir.a;
    state.b = update_b(z, state.a, p, policy);
    state.error = single_component_error(z, state.a, state.b, p);
    state.iterations = it;
    if (std::isfinite(prev) && std::abs(prev - state.error) < tol * std::max(prev, 1e-12)) {
      state.converged = true;
      break;
    }
    prev = state.error;
  }
  return state;
}

enum class DeflationMode { kAlternating, kPfaRankOne };

struct DeflatedComponent {
  Vector a;  // direction in the original signal space
  Vector b;
  double error = 0.0;
  bool converged = true;
  bool ambiguous = false;
};

namespace detail {

// Orthonormal basis of the complement of the unit vector a (n x n-1).
inline Matrix complement_basis(const Vector& a) {
  Eigen::HouseholderQR<Matrix> qr{Matrix(a)};
  const Matrix q = qr.householderQ() * Matrix::Identity(a.size(), a.size());
  return q.rightCols(a.size() - 1);
}

}  // namespace detail

/// Repeatedly extracts one component and projects the signal onto the
/// orthogonal complement of the extracted direction (orthogonality equals
/// uncorrelatedness on a sphered signal); the returned directions are
/// mutually orthogonal.
inline std::vector<DeflatedComponent> extract_deflated(const TimeSeries& z, int p, int count,
                                                       DeflationMode mode,
                                                       const ThresholdPolicy& policy = {},
                                                       int max_iter = 500, double tol = 1e-9) {
  if (count < 1 || count > z.dim()) throw std::invalid_argument("count exceeds remaining rank");
  std::vector<DeflatedComponent> out;
  out.reserve(count);
  Matrix ambient = Matrix::Identity(z.dim(), z.dim());  // maps current space -> original
  TimeSeries current = z;
  for (int round = 0; round < count; ++round) {
    DeflatedComponent comp;
    Vector local;
    if (mode == DeflationMode::kAlternating) {
      const AlternationState st = extract_alternating(current, p, max_iter, tol, policy);
      local = st.a;
      comp.b = st.b;
      comp.error = st.error;
      comp.converged = st.converged;
      comp.ambiguous = st.ambiguous;
    } else {
      PfaConfig cfg;
      cfg.r = 1;
      cfg.p = p;
      cfg.threshold = policy;
      const ExtractionResult res = solve_relaxation(current, cfg);
      local = res.A.col(0);
      comp.b = update_b(current, local, p, policy);
      comp.error = single_component_error(current, local, comp.b, p);
      comp.ambiguous = res.degenerate_boundary;
    }
    local.normalize();
    comp.a = ambient * local;
    out.push_back(std::move(comp));
    if (round + 1 == count) break;
    const Matrix basis = detail::complement_basis(local);
    ambient = ambient * basis;
    current = TimeSeries(basis.transpose() * current.data);
  }
  return out;
}

}  // namespace pfa
