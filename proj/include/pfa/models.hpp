// Copyright (c) 2026 The pfa authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "pfa/ar_model.hpp"
#include "pfa/preprocessing.hpp"
#include "pfa/timeseries.hpp"

namespace pfa {

/// A prediction model fitted to one signal. Predictions and one-step history
/// extensions operate column-wise on batches of history vectors.
class FittedPredictor {
 public:
  virtual ~FittedPredictor() = default;

  virtual Index dim() const = 0;
  virtual int order() const = 0;
  virtual int lag_step() const = 0;

  /// Predicted z(t) for each history column.
  virtual Matrix predict(const Matrix& zetas) const = 0;

  /// Maps zeta(t) to an estimate of zeta(t+1). The default predicts the new
  /// block and copies the remaining p-1 blocks down; models with a matrix
  /// propagator override this. Requires unit lag step.
  virtual Matrix extend(const Matrix& zetas) const {
    if (lag_step() != 1) throw std::logic_error("iterated prediction requires unit lag step");
    const Index n = dim();
    Matrix out(zetas.rows(), zetas.cols());
    out.topRows(n) = predict(zetas);
    out.bottomRows(zetas.rows() - n) = zetas.topRows(zetas.rows() - n);
    return out;
  }
};

/// Model class in the sense of the solver contract: fit() returns the
/// least-squares-optimal member for the given signal. Admissible classes are
/// orthogonal-agnostic and information-consistent; verify_agnosticity()
/// measures both empirically.
class PredictionModel {
 public:
  virtual ~PredictionModel() = default;
  virtual std::string name() const = 0;
  /// with_shift requests the machinery needed by extend() (for iterated
  /// prediction); models that do not need extra state may ignore it.
  virtual std::unique_ptr<FittedPredictor> fit(const TimeSeries& z, int p, int delta,
                                               const ThresholdPolicy& policy, bool with_shift) const = 0;
};

namespace detail {

class LinearArFitted final : public FittedPredictor {
 public:
  LinearArFitted(ArPredictor w, Matrix v, bool has_v)
      : w_(std::move(w)), v_(std::move(v)), has_v_(has_v) {}

  Index dim() const override { return w_.dim(); }
  int order() const override { return w_.p; }
  int lag_step() const override { return w_.delta; }

  Matrix predict(const Matrix& zetas) const override { return w_.predict(zetas); }

  Matrix extend(const Matrix& zetas) const override {
    if (!has_v_) throw std::logic_error("predictor was fitted without the shift operator");
    return v_ * zetas;
  }

  const ArPredictor& predictor() const { return w_; }
  const Matrix& shift() const { return v_; }

 private:
  ArPredictor w_;
  Matrix v_;
  bool has_v_;
};

}  // namespace detail

/// The default model: unconstrained coefficient matrices, fitted by the
/// thresholded regression formula; extension through the fitted shift
/// operator V.
class LinearArModel final : public PredictionModel {
 public:
  explicit LinearArModel(ThresholdPolicy policy = {}) : policy_(policy) {}

  std::string name() const override { return "linear"; }

  std::unique_ptr<FittedPredictor> fit(const TimeSeries& z, int p, int delta,
                                       const ThresholdPolicy& policy, bool with_shift) const override {
    ArPredictor w = fit_full(z, p, delta, policy);
    Matrix v;
    if (with_shift) {
      if (delta != 1) throw std::invalid_argument("iterated prediction requires delta == 1");
      v = fit_shift(z, p, policy).v;
    }
    return std::make_unique<detail::LinearArFitted>(std::move(w), std::move(v), with_shift);
  }

 private:
  ThresholdPolicy policy_;
};

namespace detail {

class DiagonalArFitted final : public FittedPredictor {
 public:
  DiagonalArFitted(Matrix coeffs, int p, int delta) : coeffs_(std::move(coeffs)), p_(p), delta_(delta) {}

  Index dim() const override { return coeffs_.rows(); }
  int order() const override { return p_; }
  int lag_step() const override { return delta_; }

  Matrix predict(const Matrix& zetas) const override {
    const Index n = coeffs_.rows();
    Matrix out = Matrix::Zero(n, zetas.cols());
    for (int j = 0; j < p_; ++j)
      out += coeffs_.col(j).asDiagonal() * zetas.middleRows(n * j, n);
    return out;
  }

 private:
  Matrix coeffs_;  // n x p, row i holds component i's AR coefficients
  int p_;
  int delta_;
};

}  // namespace detail

/// Per-component scalar AR model (diagonal coefficient matrices). Not
/// orthogonal-agnostic for n > 1; useful as the contract counterexample.
class DiagonalArModel final : public PredictionModel {
 public:
  std::string name() const override { return "diagonal"; }

  std::unique_ptr<FittedPredictor> fit(const TimeSeries& z, int p, int delta,
                                       const ThresholdPolicy& policy, bool) const override {
    const Index n = z.dim();
    Matrix coeffs(n, p);
    for (Index i = 0; i < n; ++i) {
      const TimeSeries comp{Matrix(z.data.row(i))};
      coeffs.row(i) = fit_full(comp, p, delta, policy).coefficients;
    }
    return std::make_unique<detail::DiagonalArFitted>(std::move(coeffs), p, delta);
  }
};

namespace detail {

class ZeroFitted final : public FittedPredictor {
 public:
  ZeroFitted(Index n, int p, int delta) : n_(n), p_(p), delta_(delta) {}
  Index dim() const override { return n_; }
  int order() const override { return p_; }
  int lag_step() const override { return delta_; }
  Matrix predict(const Matrix& zetas) const override { return Matrix::Zero(n_, zetas.cols()); }

 private:
  Index n_;
  int p_;
  int delta_;
};

class MeanHistoryFitted final : public FittedPredictor {
 public:
  MeanHistoryFitted(Index n, int p, int delta) : n_(n), p_(p), delta_(delta) {}
  Index dim() const override { return n_; }
  int order() const override { return p_; }
  int lag_step() const override { return delta_; }
  Matrix predict(const Matrix& zetas) const override {
    Matrix out = Matrix::Zero(n_, zetas.cols());
    for (int j = 0; j < p_; ++j) out += zetas.middleRows(n_ * j, n_);
    return out / static_cast<double>(p_);
  }

 private:
  Index n_;
  int p_;
  int delta_;
};

}  // namespace detail

/// Predicts zero always. Trivially agnostic; its residual covariance is the
/// signal covariance itself.
class ZeroModel final : public PredictionModel {
 public:
  std::string name() const override { return "zero"; }
  std::unique_ptr<FittedPredictor> fit(const TimeSeries& z, int p, int delta, const ThresholdPolicy&,
                                       bool) const override {
    return std::make_unique<detail::ZeroFitted>(z.dim(), p, delta);
  }
};

/// Predicts the mean of the p lagged values. Parameter-free, agnostic.
class MeanHistoryModel final : public PredictionModel {
 public:
  std::string name() const override { return "mean-history"; }
  std::unique_ptr<FittedPredictor> fit(const TimeSeries& z, int p, int delta, const ThresholdPolicy&,
                                       bool) const override {
    return std::make_unique<detail::MeanHistoryFitted>(z.dim(), p, delta);
  }
};

}  // namespace pfa
