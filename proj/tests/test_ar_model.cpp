// Copyright (c) 2026 The pfa authors.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "pfa/ar_model.hpp"
#include "pfa/preprocessing.hpp"
#include "pfa/random.hpp"

using namespace pfa;

TEST_CASE("sphered sine recovers the trigonometric recurrence") {
  // sin(w t) = 2 cos(w) sin(w (t-1)) - sin(w (t-2)); the coefficients are
  // scale-invariant, so sphering only has to preserve the zero mean.
  Matrix data(1, 1000);
  data.row(0) = test::centered_sine(0.1, 1000).transpose();
  const TimeSeries z = sphere(TimeSeries(std::move(data)));
  const ArPredictor w = fit_full(z, 2, 1);
  CHECK(w.coefficients(0, 0) == Catch::Approx(2.0 * std::cos(0.1)).margin(1e-6));
  CHECK(w.coefficients(0, 1) == Catch::Approx(-1.0).margin(1e-6));
}

TEST_CASE("white-noise coefficient matches the sample autocorrelation and vanishes") {
  const Index t_count = 10000;
  NormalSampler rng(17);
  const TimeSeries z = sphere(TimeSeries(rng.matrix(1, t_count)));
  const ArPredictor w = fit_full(z, 1, 1);

  // oracle: lag-1 cross moment over t = 1..T-1 divided by the lagged moment,
  // accumulated in ascending order
  double cross = 0.0, gram = 0.0;
  for (Index t = 1; t < t_count; ++t) {
    cross += z.data(0, t) * z.data(0, t - 1);
    gram += z.data(0, t - 1) * z.data(0, t - 1);
  }
  const double oracle = (cross / (t_count - 1)) / (gram / (t_count - 1));
  CHECK(w.coefficients(0, 0) == Catch::Approx(oracle).margin(1e-12));
  CHECK(std::abs(w.coefficients(0, 0)) < 5.0 / std::sqrt(static_cast<double>(t_count)));
}

TEST_CASE("constant-in-time signals") {
  // 1-D: the identity recurrence is recovered exactly
  const TimeSeries one(Matrix::Constant(1, 20, 3.0));
  CHECK(fit_full(one, 1, 1).coefficients(0, 0) == Catch::Approx(1.0).margin(1e-12));

  // n-D: <zeta zeta^T> is rank one and the thresholded regression returns the
  // projector onto the constant, which still reproduces the signal exactly.
  Matrix data(2, 20);
  data.row(0).setConstant(1.0);
  data.row(1).setConstant(2.0);
  const TimeSeries z{std::move(data)};
  const ArPredictor w = fit_full(z, 1, 1);
  Vector c(2);
  c << 1, 2;
  const Matrix projector = c * c.transpose() / c.squaredNorm();
  CHECK((w.coefficients - projector).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((w.predict(Vector(c)) - c).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(w.zeta_rank == 1);
}

TEST_CASE("reduced fit specializes to the full fit at A = I") {
  const TimeSeries z = test::random_sphered(23, 3, 200);
  const ArPredictor full = fit_full(z, 2, 1);
  const ArPredictor reduced = fit_reduced(z, Matrix::Identity(3, 3), 2, 1);
  CHECK((full.coefficients - reduced.coefficients).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("reduced fit commutes with orthogonal transformations") {
  const TimeSeries z = test::random_sphered(31, 4, 300);
  const ArPredictor w = fit_full(z, 2, 1);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Matrix a = random_orthogonal(derive_seed(77, {s}), 4);
    const Matrix expected = a.transpose() * w.coefficients * kron_block(a, 2);
    const ArPredictor rotated = fit_reduced(z, a, 2, 1);
    CHECK((rotated.coefficients - expected).norm() <= 1e-8 * std::max(1.0, expected.norm()));
    // fitting on the rotated signal gives the same thing
    const ArPredictor refit = fit_full(TimeSeries(a.transpose() * z.data), 2, 1);
    CHECK((refit.coefficients - expected).norm() <= 1e-8 * std::max(1.0, expected.norm()));
  }
}

TEST_CASE("unit-vector extraction on a block system equals the component fit") {
  NormalSampler rng(41);
  Matrix data(2, 400);
  data.row(0) = test::centered_sine(0.3, 400).transpose() + 0.1 * rng.matrix(1, 400);
  data.row(1) = rng.matrix(1, 400);
  const TimeSeries z{std::move(data)};
  Matrix e1 = Matrix::Zero(2, 1);
  e1(0, 0) = 1.0;
  const ArPredictor reduced = fit_reduced(z, e1, 2, 1);
  const ArPredictor component = fit_full(TimeSeries(Matrix(z.data.topRows(1))), 2, 1);
  CHECK((reduced.coefficients - component.coefficients).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reduced fit rejects non-orthonormal extraction matrices") {
  const TimeSeries z = test::random_sphered(2, 3, 100);
  Matrix bad = Matrix::Identity(3, 2);
  bad(0, 0) = 1.5;
  CHECK_THROWS_WITH(fit_reduced(z, bad, 1, 1), Catch::Matchers::ContainsSubstring("non-orthonormal"));
}

TEST_CASE("prediction error on lossless and noise signals") {
  Matrix data(1, 800);
  data.row(0) = test::centered_sine(0.2, 800).transpose();
  const TimeSeries sine = sphere(TimeSeries(std::move(data)));
  const ArPredictor w = fit_full(sine, 2, 1);
  CHECK(prediction_error(w, sine, sine) < 1e-10);

  NormalSampler rng(3);
  const TimeSeries noise = sphere(TimeSeries(rng.matrix(1, 10000)));
  const ArPredictor wn = fit_full(noise, 1, 1);
  CHECK(prediction_error(wn, noise, noise) == Catch::Approx(1.0).margin(0.1));
}

TEST_CASE("prediction error validates dimensions") {
  const TimeSeries z = test::random_sphered(13, 2, 60);
  const ArPredictor w = fit_full(z, 1, 1);
  CHECK_THROWS_AS(prediction_error(w, test::random_sphered(13, 3, 60), z), std::invalid_argument);
  const Matrix proj = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(prediction_error(w, z, z, &proj), std::invalid_argument);
}

TEST_CASE("fit requires enough samples") {
  const TimeSeries z = test::random_sphered(1, 2, 4);
  CHECK_THROWS_WITH(fit_full(z, 4, 1), Catch::Matchers::ContainsSubstring("insufficient samples"));
  CHECK_THROWS_WITH(fit_full(z, 2, 2), Catch::Matchers::ContainsSubstring("insufficient samples"));
}

TEST_CASE("shift operator reproduces exact dynamics") {
  Matrix data(1, 600);
  data.row(0) = test::centered_sine(0.3, 600).transpose();
  const TimeSeries z = sphere(TimeSeries(std::move(data)));
  const ShiftPredictor v = fit_shift(z, 2);
  const Matrix zeta = history_matrix(z, 2, 1);
  for (Index j = 0; j + 1 < zeta.cols(); ++j)
    CHECK((v.v * zeta.col(j) - zeta.col(j + 1)).cwiseAbs().maxCoeff() < 1e-8);
  // copy-down block: rows n..2n reproduce the top block of zeta
  Matrix copy = Matrix::Zero(1, 2);
  copy(0, 0) = 1.0;
  CHECK((v.v.bottomRows(1) - copy).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("shift operator on white noise has a vanishing prediction block") {
  NormalSampler rng(8);
  const TimeSeries z = sphere(TimeSeries(rng.matrix(1, 20000)));
  const ShiftPredictor v = fit_shift(z, 2);
  CHECK(v.v.topRows(1).cwiseAbs().maxCoeff() < 5.0 / std::sqrt(20000.0));
}

TEST_CASE("iterated prediction") {
  Matrix data(1, 500);
  data.row(0) = test::centered_sine(0.4, 500).transpose();
  const TimeSeries z = sphere(TimeSeries(std::move(data)));
  const ArPredictor w = fit_full(z, 2, 1);
  const ShiftPredictor v = fit_shift(z, 2);

  const Vector zeta = embed_history(z, 2, 1, 40);
  CHECK((iterated_prediction(w, v, zeta, 0) - w.predict(zeta)).cwiseAbs().maxCoeff() == 0.0);

  for (int i = 0; i <= 10; ++i) {
    const Index t = 40 + i;
    const Vector pred = iterated_prediction(w, v, embed_history(z, 2, 1, t - i), i);
    CHECK((pred - z.data.col(t)).cwiseAbs().maxCoeff() < 1e-6);
  }

  // two-step hand-rolled oracle: advance twice, then predict
  const TimeSeries zn = test::random_sphered(55, 2, 300);
  const ArPredictor wn = fit_full(zn, 2, 1);
  const ShiftPredictor vn = fit_shift(zn, 2);
  const Vector zeta_n = embed_history(zn, 2, 1, 100);
  const Vector stepwise = wn.predict(Vector(vn.v * (vn.v * zeta_n)));
  const Vector direct = iterated_prediction(wn, vn, zeta_n, 2);
  CHECK((stepwise - direct).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("full fit is orthogonal-agnostic") {
  const TimeSeries z = test::random_sphered(61, 3, 250);
  const ArPredictor w = fit_full(z, 2, 1);
  const double base = prediction_error(w, z, z);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const TimeSeries rotated(random_orthogonal(derive_seed(5, {s}), 3).transpose() * z.data);
    const double err = prediction_error(fit_full(rotated, 2, 1), rotated, rotated);
    CHECK(std::abs(err - base) <= 1e-8 * std::max(1.0, base));
  }
}

TEST_CASE("full fit is optimal against random coefficient perturbations") {
  const TimeSeries z = test::random_sphered(71, 2, 300);
  const ArPredictor w = fit_full(z, 2, 1);
  const double base = prediction_error(w, z, z);
  NormalSampler rng(72);
  for (int trial = 0; trial < 100; ++trial) {
    ArPredictor perturbed = w;
    perturbed.coefficients += 1e-3 * rng.matrix(w.coefficients.rows(), w.coefficients.cols());
    CHECK(prediction_error(perturbed, z, z) >= base - 1e-12);
  }
}

TEST_CASE("projected full fit bounds the reduced fit from below") {
  // information consistency, Eq.-level check on random extractions
  const TimeSeries z = test::random_sphered(81, 4, 350);
  const ArPredictor w = fit_full(z, 2, 1);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Matrix a = random_orthogonal(derive_seed(91, {s}), 4);
    const int r = 1 + static_cast<int>(s % 4);
    const Matrix a_r = a.leftCols(r);
    const Matrix proj = a_r.transpose();
    const TimeSeries m(a_r.transpose() * z.data);
    const double projected_full = prediction_error(w, m, z, &proj);
    const ArPredictor reduced = fit_reduced(z, a_r, 2, 1);
    const double reduced_err = prediction_error(reduced, m, m);
    CHECK(reduced_err >= projected_full - 1e-8);
  }
}
