// Copyright (c) 2026 The pfa authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

namespace pfa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Equidistant multivariate signal, one column per time step.
/// Timestamps are implicit: 0, 1, ..., T-1.
struct TimeSeries {
  Matrix data;  // n rows (components) x T columns (samples)

  TimeSeries() = default;
  explicit TimeSeries(Matrix d) : data(std::move(d)) {
    if (data.rows() < 1 || data.cols() < 2)
      throw std::invalid_argument("time series needs n >= 1 components and T >= 2 samples");
    if (!data.allFinite())
      throw std::invalid_argument("time series has non-finite entries");
  }

  Index dim() const { return data.rows(); }
  Index samples() const { return data.cols(); }
};

/// Mean of the columns s(:, first..last) (inclusive), summed in ascending order.
inline Vector average_columns(const Matrix& s, Index first, Index last) {
  if (first > last || first < 0 || last >= s.cols())
    throw std::invalid_argument("empty averaging domain");
  Vector acc = Vector::Zero(s.rows());
  for (Index t = first; t <= last; ++t) acc += s.col(t);
  return acc / static_cast<double>(last - first + 1);
}

/// <X Y^T> over aligned columns: X * Y^T / m.
inline Matrix average_outer(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols() || x.cols() == 0)
    throw std::invalid_argument("empty averaging domain");
  return x * y.transpose() / static_cast<double>(x.cols());
}

/// <X X^T> over columns, exactly symmetric (rank update on the lower triangle).
inline Matrix average_gram(const Matrix& x) {
  if (x.cols() == 0) throw std::invalid_argument("empty averaging domain");
  Matrix g = Matrix::Zero(x.rows(), x.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / static_cast<double>(x.cols()));
  return g.selfadjointView<Eigen::Lower>();
}

/// History vector zeta(t) = [z(t-d); z(t-2d); ...; z(t-pd)], dimension n*p.
inline Vector embed_history(const TimeSeries& z, int p, int delta, Index t) {
  if (p < 1 || delta < 1) throw std::invalid_argument("prediction order and lag step must be positive");
  if (t < static_cast<Index>(p) * delta) throw std::invalid_argument("insufficient history");
  if (t >= z.samples()) throw std::invalid_argument("history index past end of series");
  const Index n = z.dim();
  Vector out(n * p);
  for (int i = 1; i <= p; ++i) out.segment(n * (i - 1), n) = z.data.col(t - static_cast<Index>(i) * delta);
  return out;
}

/// All valid history vectors as columns: column j is zeta(p*delta + j), j = 0..T-1-p*delta.
inline Matrix history_matrix(const TimeSeries& z, int p, int delta) {
  if (p < 1 || delta < 1) throw std::invalid_argument("prediction order and lag step must be positive");
  const Index n = z.dim();
  const Index t0 = static_cast<Index>(p) * delta;
  if (z.samples() <= t0) throw std::invalid_argument("insufficient samples");
  const Index m = z.samples() - t0;
  Matrix out(n * p, m);
  for (int i = 1; i <= p; ++i)
    out.middleRows(n * (i - 1), n) = z.data.middleCols(t0 - static_cast<Index>(i) * delta, m);
  return out;
}

/// Block-diagonal matrix with p copies of M (I_p (x) M). For any history,
/// vec(M^T hist(t)) == kron_block(M, p)^T zeta(t).
inline Matrix kron_block(const Matrix& m, int p) {
  if (p < 1) throw std::invalid_argument("block count must be positive");
  Matrix out = Matrix::Zero(m.rows() * p, m.cols() * p);
  for (int i = 0; i < p; ++i) out.block(m.rows() * i, m.cols() * i, m.rows(), m.cols()) = m;
  return out;
}

/// Monomial expansion map. Degree 1 is the identity; degree 2 appends all
/// products x_i*x_j with i <= j, so n = n0 + n0*(n0+1)/2.
struct Expansion {
  int degree = 1;
  Index input_dim = 0;

  Index output_dim() const {
    if (degree == 1) return input_dim;
    return input_dim + input_dim * (input_dim + 1) / 2;
  }
};

inline TimeSeries expand(const TimeSeries& x, const Expansion& e) {
  if (e.degree != 1 && e.degree != 2) throw std::invalid_argument("expansion degree must be 1 or 2");
  if (x.dim() != e.input_dim) throw std::invalid_argument("expansion dimension mismatch");
  if (e.degree == 1) return x;
  const Index n0 = e.input_dim;
  Matrix out(e.output_dim(), x.samples());
  out.topRows(n0) = x.data;
  Index row = n0;
  for (Index i = 0; i < n0; ++i)
    for (Index j = i; j < n0; ++j)
      out.row(row++) = x.data.row(i).cwiseProduct(x.data.row(j));
  return TimeSeries(std::move(out));
}

}  // namespace pfa
