// Copyright (c) 2026 The pfa authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfa/ar_model.hpp"
#include "pfa/models.hpp"
#include "pfa/preprocessing.hpp"
#include "pfa/random.hpp"
#include "pfa/timeseries.hpp"

namespace pfa {

struct PfaConfig {
  int r = 1;          // number of extracted components
  int p = 1;          // prediction order
  int delta = 1;      // lag step
  int k = 0;          // iterated-prediction horizon; 0 = plain relaxation
  ThresholdPolicy threshold;
  int expansion_degree = 1;
  double holdout_fraction = 0.0;  // 0 = evaluate on the training range

  void validate(Index n) const {
    if (r < 1 || r > n) throw std::invalid_argument("r must lie in [1, n]");
    if (p < 1) throw std::invalid_argument("prediction order must be positive");
    if (delta < 1) throw std::invalid_argument("lag step must be positive");
    if (k < 0) throw std::invalid_argument("horizon must be nonnegative");
    if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0))
      throw std::invalid_argument("holdout fraction must lie in [0, 1)");
    threshold.validate();
  }
};

/// Output of one extraction. Columns of A pair with residual_eigenvalues
/// (ascending; smallest = most predictable); the first r columns are the
/// extraction matrix A_r. achieved_error is the refitted reduced model's
/// error on the extracted signal; objective is the solved eigenproblem's
/// value (sum of the r smallest eigenvalues).
struct ExtractionResult {
  Matrix A;
  int r = 1;
  Vector residual_eigenvalues;
  std::optional<ArPredictor> refitted;  // reduced-formula refit (linear solvers)
  double achieved_error = 0.0;
  double objective = 0.0;
  bool degenerate_boundary = false;
  std::vector<std::string> warnings;

  Matrix extraction() const { return A.leftCols(r); }
};

namespace detail {

enum class RefitMode { kReducedFormula, kModelOnReduced };

inline TimeSeries train_slice(const TimeSeries& z, const PfaConfig& cfg) {
  if (cfg.holdout_fraction == 0.0) return z;
  const Index t_train = static_cast<Index>(std::floor(z.samples() * (1.0 - cfg.holdout_fraction)));
  if (t_train < 2) throw std::invalid_argument("holdout leaves no training data");
  return TimeSeries(z.data.leftCols(t_train));
}

/// Extracted signal slice used for error evaluation: the training range, or
/// the holdout tail padded with just enough history to predict its samples.
inline TimeSeries evaluation_series(const TimeSeries& z, const Matrix& a_r, const PfaConfig& cfg,
                                    Index t_train) {
  if (cfg.holdout_fraction == 0.0) return TimeSeries(a_r.transpose() * z.data.leftCols(t_train));
  const Index warmup = static_cast<Index>(cfg.p) * cfg.delta;
  const Index start = t_train - warmup;
  if (start < 0 || z.samples() - start < warmup + 1)
    throw std::invalid_argument("holdout too small for the prediction order");
  return TimeSeries(a_r.transpose() * z.data.rightCols(z.samples() - start));
}

inline double model_error(const FittedPredictor& g, const TimeSeries& z) {
  const Matrix zeta = history_matrix(z, g.order(), g.lag_step());
  const Matrix diff = z.data.rightCols(zeta.cols()) - g.predict(zeta);
  return diff.squaredNorm() / static_cast<double>(zeta.cols());
}

/// Core residual-PCA engine shared by every solver entry point. Builds, for
/// each requested horizon k,
///   M_k = sum_{i=0..k} < rho_i(t) rho_i(t)^T >,  rho_i(t) = z(t) - g(ext^i(zeta(t-i))),
/// over the common range t in {p*delta + k, ..., T-1}, diagonalizes it and
/// refits the reduced model.
inline std::vector<ExtractionResult> solve_with_model(const TimeSeries& z, const PfaConfig& cfg,
                                                      const std::vector<int>& horizons,
                                                      const PredictionModel& model, RefitMode refit) {
  cfg.validate(z.dim());
  if (horizons.empty()) return {};
  int kmax = 0;
  for (int k : horizons) {
    if (k < 0) throw std::invalid_argument("horizon must be nonnegative");
    kmax = std::max(kmax, k);
  }
  if (kmax > 0 && cfg.delta != 1) throw std::invalid_argument("iterated prediction requires delta == 1");

  const TimeSeries train = train_slice(z, cfg);
  const Index n = train.dim();
  const Index warmup = static_cast<Index>(cfg.p) * cfg.delta;
  if (train.samples() <= warmup + kmax) throw std::invalid_argument("insufficient samples for horizon k");

  const auto fitted = model.fit(train, cfg.p, cfg.delta, cfg.threshold, kmax > 0);
  const Matrix zeta = history_matrix(train, cfg.p, cfg.delta);
  const Index m0 = zeta.cols();

  // residuals[i] holds z(t) - prediction for t = warmup+i .. T-1 (width m0-i)
  std::vector<Matrix> residuals;
  residuals.reserve(kmax + 1);
  Matrix extended = zeta;
  for (int i = 0; i <= kmax; ++i) {
    if (i > 0) extended = fitted->extend(extended);
    const Index width = m0 - i;
    residuals.push_back(train.data.middleCols(warmup + i, width) - fitted->predict(extended.leftCols(width)));
  }

  std::vector<ExtractionResult> out;
  out.reserve(horizons.size());
  for (int k : horizons) {
    const Index mk = m0 - k;
    Matrix accum = Matrix::Zero(n, n);
    for (int i = 0; i <= k; ++i)
      accum.selfadjointView<Eigen::Lower>().rankUpdate(residuals[i].middleCols(k - i, mk),
                                                       1.0 / static_cast<double>(mk));
    const SymmetricEig eig = eig_symmetric(Matrix(accum.selfadjointView<Eigen::Lower>()));

    ExtractionResult res;
    res.A = eig.vectors;
    res.r = cfg.r;
    // the summed residual covariance is PSD; negative outputs are eigensolver
    // roundoff
    res.residual_eigenvalues = eig.values.cwiseMax(0.0);
    res.objective = res.residual_eigenvalues.head(cfg.r).sum();
    const double lmax = res.residual_eigenvalues(n - 1);
    if (cfg.r < n &&
        res.residual_eigenvalues(cfg.r) - res.residual_eigenvalues(cfg.r - 1) <= 1e-9 * lmax) {
      res.degenerate_boundary = true;
      res.warnings.push_back("residual eigenvalues are degenerate at the extraction boundary");
    }

    const Matrix a_r = res.extraction();
    const TimeSeries eval = evaluation_series(z, a_r, cfg, train.samples());
    if (refit == RefitMode::kReducedFormula) {
      ArPredictor reduced = fit_reduced(train, a_r, cfg.p, cfg.delta, cfg.threshold);
      res.achieved_error = prediction_error(reduced, eval, eval);
      res.refitted = std::move(reduced);
    } else {
      const TimeSeries reduced_train(a_r.transpose() * train.data);
      const auto refit_model = model.fit(reduced_train, cfg.p, cfg.delta, cfg.threshold, false);
      res.achieved_error = model_error(*refit_model, eval);
    }
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace detail

/// Solves several horizons on one signal, sharing the fitted model and the
/// residual chain. Element i corresponds to horizons[i].
inline std::vector<ExtractionResult> solve_pfa_k_multi(const TimeSeries& z, const PfaConfig& cfg,
                                                       const std::vector<int>& horizons) {
  return detail::solve_with_model(z, cfg, horizons, LinearArModel(cfg.threshold),
                                  detail::RefitMode::kReducedFormula);
}

/// PFA(k): residual PCA over the summed iterated-prediction residuals.
inline ExtractionResult solve_pfa_k(const TimeSeries& z, const PfaConfig& cfg) {
  return std::move(solve_pfa_k_multi(z, cfg, {cfg.k}).front());
}

/// Plain relaxation (horizon 0): PCA on the one-step residuals.
inline ExtractionResult solve_relaxation(const TimeSeries& z, const PfaConfig& cfg) {
  PfaConfig c = cfg;
  c.k = 0;
  return solve_pfa_k(z, c);
}

/// Same scheme for any admissible prediction model; the model's one-step
/// extension plays the role of V.
inline ExtractionResult solve_general(const TimeSeries& z, const PfaConfig& cfg,
                                      const PredictionModel& model) {
  return std::move(
      detail::solve_with_model(z, cfg, {cfg.k}, model, detail::RefitMode::kModelOnReduced).front());
}

/// Empirical check of the model-contract criteria on one signal: orthogonal
/// agnosticity, its projective variant, and information consistency, each
/// probed with seeded random rotations (and random r for the latter two).
struct AgnosticityReport {
  int trials = 0;
  double max_agnosticity_violation = 0.0;   // relative |err(z) - err(A^T z)|
  double max_projective_violation = 0.0;    // relative equality gap
  double max_consistency_violation = 0.0;   // relative inequality breach (0 if held)

  bool passes(double tol = 1e-8) const {
    return max_agnosticity_violation <= tol && max_projective_violation <= tol &&
           max_consistency_violation <= tol;
  }
};

inline AgnosticityReport verify_agnosticity(const PredictionModel& model, const TimeSeries& z,
                                            int trials, std::uint64_t seed, int p = 1, int delta = 1,
                                            const ThresholdPolicy& policy = {}) {
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  const Index n = z.dim();
  const auto g_z = model.fit(z, p, delta, policy, false);
  const double base_err = detail::model_error(*g_z, z);
  const Matrix zeta = history_matrix(z, p, delta);
  const Matrix predicted = g_z->predict(zeta);
  const Matrix residual = z.data.rightCols(zeta.cols()) - predicted;

  AgnosticityReport report;
  report.trials = trials;
  std::mt19937_64 pick(derive_seed(seed, {0xA11}));
  for (int trial = 0; trial < trials; ++trial) {
    const Matrix a = random_orthogonal(derive_seed(seed, {0xA0, static_cast<std::uint64_t>(trial)}), n);
    const int r = 1 + static_cast<int>(pick() % static_cast<std::uint64_t>(n));
    const Matrix a_r = a.leftCols(r);

    const TimeSeries rotated(a.transpose() * z.data);
    const auto g_rot = model.fit(rotated, p, delta, policy, false);
    const double rot_err = detail::model_error(*g_rot, rotated);
    report.max_agnosticity_violation = std::max(
        report.max_agnosticity_violation, std::abs(base_err - rot_err) / std::max(1.0, base_err));

    // Right side shared by both criteria: the projected full fit,
    // < || A_r^T (z - g_z(zeta)) ||^2 >.
    const double projected_full = (a_r.transpose() * residual).squaredNorm() /
                                  static_cast<double>(residual.cols());

    // Projective agnosticity: fitting on the rotated signal and projecting
    // the prediction must match the projected full fit.
    const Matrix zeta_rot = history_matrix(rotated, p, delta);
    const Matrix top = g_rot->predict(zeta_rot).topRows(r);
    const double lhs_proj =
        (rotated.data.topRows(r).rightCols(zeta_rot.cols()) - top).squaredNorm() /
        static_cast<double>(zeta_rot.cols());
    report.max_projective_violation =
        std::max(report.max_projective_violation,
                 std::abs(lhs_proj - projected_full) / std::max(1.0, projected_full));

    // Information consistency: fitting on the reduced signal alone can never
    // beat the projected full fit.
    const TimeSeries reduced(a_r.transpose() * z.data);
    const auto g_red = model.fit(reduced, p, delta, policy, false);
    const double reduced_err = detail::model_error(*g_red, reduced);
    report.max_consistency_violation =
        std::max(report.max_consistency_violation,
                 (projected_full - reduced_err) / std::max(1.0, projected_full));
  }
  report.max_consistency_violation = std::max(report.max_consistency_violation, 0.0);
  return report;
}

}  // namespace pfa
