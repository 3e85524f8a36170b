// Copyright (c) 2026 The pfa authors.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "helpers.hpp"
#include "pfa/sfa.hpp"

using namespace pfa;

namespace {

double correlation(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  const Eigen::RowVectorXd ac = a.array() - a.mean();
  const Eigen::RowVectorXd bc = b.array() - b.mean();
  return ac.dot(bc) / std::sqrt(ac.squaredNorm() * bc.squaredNorm());
}

TimeSeries two_sine_signal(Index t_count) {
  Matrix data(2, t_count);
  data.row(0) = test::centered_sine(0.05, t_count).transpose();
  data.row(1) = test::centered_sine(0.5, t_count, 0.4).transpose();
  const Matrix q = random_orthogonal(77, 2);
  return sphere(TimeSeries(q * data));
}

}  // namespace

TEST_CASE("slowest feature tracks the slow sine") {
  const Index t_count = 2000;
  const TimeSeries z = two_sine_signal(t_count);
  const SfaResult res = solve_sfa(z, 2);
  const Eigen::RowVectorXd slow = res.A_r.col(0).transpose() * z.data;
  const Eigen::RowVectorXd reference = test::centered_sine(0.05, t_count).transpose();
  CHECK(std::abs(correlation(slow, reference)) > 0.99);
  CHECK(res.slowness(0) < res.slowness(1));
}

TEST_CASE("extracted features satisfy the optimization constraints") {
  const TimeSeries z = two_sine_signal(1500);
  const SfaResult res = solve_sfa(z, 2);
  CHECK((res.A_r.transpose() * res.A_r - Matrix::Identity(2, 2)).norm() <= 1e-10);
  const Matrix m = res.A_r.transpose() * z.data;
  CHECK(average_columns(m, 0, m.cols() - 1).cwiseAbs().maxCoeff() <= 1e-8);
  const Matrix cov = average_gram(m);
  CHECK(cov(0, 0) == Catch::Approx(1.0).margin(1e-6));
  CHECK(cov(1, 1) == Catch::Approx(1.0).margin(1e-6));
  CHECK(std::abs(cov(0, 1)) <= 1e-6);
}

TEST_CASE("slowness values are the derivative variances of the outputs") {
  const TimeSeries z = test::random_sphered(3, 4, 500);
  const SfaResult res = solve_sfa(z, 4);
  const Matrix m = res.A_r.transpose() * z.data;
  const Matrix dm = m.rightCols(m.cols() - 1) - m.leftCols(m.cols() - 1);
  for (Index i = 0; i < 4; ++i) {
    const double variance = dm.row(i).squaredNorm() / static_cast<double>(dm.cols());
    CHECK(std::abs(res.slowness(i) - variance) <= 1e-9);
  }
  // full extraction: eigenvalue sum equals the derivative covariance trace
  const Matrix dz = z.data.rightCols(z.samples() - 1) - z.data.leftCols(z.samples() - 1);
  CHECK(res.slowness.sum() == Catch::Approx(average_gram(dz).trace()).margin(1e-9));
}

TEST_CASE("annihilated directions are never emitted as features") {
  // a constant component dies in the sphering; the slowest feature must be a
  // real signal direction, not the zero function
  NormalSampler rng(9);
  Matrix data(2, 400);
  data.row(0) = test::centered_sine(0.1, 400).transpose() + 0.01 * rng.matrix(1, 400);
  data.row(1).setConstant(4.0);
  const TimeSeries x{std::move(data)};
  const SpheringTransform t = fit_sphering(x);
  REQUIRE(t.kept_rank == 1);
  const TimeSeries z = apply_sphering(t, x);
  const SfaResult res = solve_sfa(z, 1);
  const Matrix m = res.A_r.transpose() * z.data;
  CHECK(average_gram(m)(0, 0) == Catch::Approx(1.0).margin(1e-6));
  CHECK_THROWS_WITH(solve_sfa(z, 2), Catch::Matchers::ContainsSubstring("non-degenerate"));
}

TEST_CASE("input validation") {
  const TimeSeries z = test::random_sphered(1, 2, 50);
  CHECK_THROWS_AS(solve_sfa(z, 3), std::invalid_argument);
  CHECK_THROWS_AS(solve_sfa(z, 0), std::invalid_argument);
  Matrix tiny(1, 2);
  tiny << 0.0, 1.0;
  CHECK_THROWS_WITH(solve_sfa(TimeSeries(std::move(tiny)), 1),
                    Catch::Matchers::ContainsSubstring("insufficient samples"));
}
