// Copyright 2026 The dbmmd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "doctest.h"

#include "dbmmd/error.hpp"
#include "dbmmd/linalg.hpp"
#include "oracles.hpp"

using namespace dbmmd;
using namespace dbmmd::linalg;

TEST_CASE("pairwise distances") {
  Matrix same(2, 2);
  same << 1, 1, 2, 2;
  CHECK(pairwise_sq_dists(same).isZero(0.0));

  Matrix tri(2, 2);
  tri << 0, 3, 0, 4;
  const Matrix d = pairwise_sq_dists(tri);
  CHECK(d(0, 1) == 25.0);
  CHECK(d(1, 0) == 25.0);

  synth::Rng rng(11);
  const Matrix x = oracle::random_matrix(rng, 5, 6);
  const Matrix got = pairwise_sq_dists(x);
  const Matrix want = oracle::sq_dists_loop(x);
  CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(got == got.transpose());
  CHECK(got.minCoeff() >= 0.0);
}

TEST_CASE("median distance") {
  Matrix x(1, 4);
  x << 0, 1, 3, 6;
  // distances 1 3 6 2 5 3 -> sorted 1 2 3 3 5 6
  CHECK(median_distance(x) == doctest::Approx(3.0));
  Matrix y(1, 3);
  y << 0, 1, 3;
  CHECK(median_distance(y) == doctest::Approx(2.0));
  CHECK_THROWS_AS(median_distance(Matrix::Zero(2, 3)), BandwidthError);
}

TEST_CASE("kernel matrices") {
  CHECK(kernel_matrix(Matrix::Identity(2, 2), KernelKind::linear()).isApprox(Matrix::Identity(2, 2)));

  Matrix twin(2, 2);
  twin << 1, 1, -2, -2;
  CHECK(kernel_matrix(twin, KernelKind::rbf(0.7)).isApprox(Matrix::Ones(2, 2)));

  synth::Rng rng(5);
  const Matrix x = oracle::random_matrix(rng, 2, 12);
  const double sigma = median_distance(x);
  const Matrix k = kernel_matrix(x, KernelKind::rbf(sigma));
  const Matrix d = oracle::sq_dists_loop(x);
  double err = 0.0;
  for (Eigen::Index i = 0; i < 12; ++i) {
    for (Eigen::Index j = 0; j < 12; ++j) {
      err = std::max(err, std::abs(k(i, j) - std::exp(-d(i, j) / (2 * sigma * sigma))));
    }
  }
  CHECK(err <= 1e-12);

  const Matrix lin = kernel_matrix(x, KernelKind::linear());
  CHECK((lin - x.transpose() * x).cwiseAbs().maxCoeff() <= 1e-14);

  const Matrix poly = kernel_matrix(x, KernelKind::poly(3));
  CHECK(poly(2, 5) == doctest::Approx(std::pow(x.col(2).dot(x.col(5)) + 1.0, 3)));
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);

  CHECK_THROWS_AS(kernel_matrix(x, KernelKind::rbf(0.0)), ParameterError);
  CHECK_THROWS_AS(kernel_matrix(x, KernelKind::rbf(-1.0)), ParameterError);
  CHECK_THROWS_AS(kernel_matrix(x, KernelKind::poly(0)), ParameterError);
}

TEST_CASE("centering matrix") {
  CHECK(centering_matrix(1)(0, 0) == 0.0);
  Matrix h2(2, 2);
  h2 << 0.5, -0.5, -0.5, 0.5;
  CHECK(centering_matrix(2) == h2);
  const Matrix h = centering_matrix(4);
  CHECK((h * Vector::Ones(4)).norm() <= 1e-14);
  CHECK((h * h - h).cwiseAbs().maxCoeff() <= 1e-14);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  CHECK(std::abs(es.eigenvalues()(0)) <= 1e-14);
  for (int i = 1; i < 4; ++i) CHECK(es.eigenvalues()(i) == doctest::Approx(1.0));
  CHECK_THROWS_AS(centering_matrix(0), ParameterError);
}

TEST_CASE("generalized eigensolver: small cases") {
  Matrix a = Vector::Map(std::vector<double>{3, 1, 2}.data(), 3).asDiagonal();
  auto p = gen_eig_smallest(a, Matrix::Identity(3, 3), 1, 0.0);
  REQUIRE(p.size() == 1);
  CHECK(p[0].value == doctest::Approx(1.0));
  CHECK((p[0].vector - Vector::Unit(3, 1)).norm() <= 1e-14);

  synth::Rng rng(3);
  const Matrix b = oracle::random_psd(rng, 5, 5, 1.0);
  for (const auto& e : gen_eig_smallest(b, b, 5, 0.0)) CHECK(e.value == doctest::Approx(1.0));

  CHECK_THROWS_AS(gen_eig_smallest(b, b, 6, 0.0), ParameterError);
  CHECK_THROWS_AS(gen_eig_smallest(b, b, 2, -1.0), ParameterError);
  CHECK_THROWS_AS(gen_eig_smallest(b, Matrix::Identity(4, 4), 2, 0.0), DimensionError);
  CHECK_THROWS_AS(gen_eig_smallest(b, -Matrix::Identity(5, 5), 2, 0.0), NumericError);
  CHECK(gen_eig_smallest(b, b, 0, 0.0).empty());
}

TEST_CASE("generalized eigensolver: residuals, orthonormality, sign") {
  synth::Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = oracle::uniform_int(rng, 2, 20);
    const Matrix a = oracle::random_symmetric(rng, n);
    const Matrix b = oracle::random_psd(rng, n, n - 1, 0.0);
    const double ridge = default_ridge(b) + 1e-3;
    const auto k = static_cast<std::size_t>(oracle::uniform_int(rng, 1, static_cast<int>(n)));
    const auto pairs = gen_eig_smallest(a, b, k, ridge);
    REQUIRE(pairs.size() == k);
    Matrix bp = b + ridge * Matrix::Identity(n, n);
    const Matrix v = eigvec_matrix(pairs);
    CHECK(((v.transpose() * bp * v) - Matrix::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)))
              .cwiseAbs()
              .maxCoeff() <= 1e-8);
    for (std::size_t i = 0; i < k; ++i) {
      const auto& e = pairs[i];
      const double tol = 1e-8 * (a.norm() + std::abs(e.value) * bp.norm());
      CHECK((a * e.vector - e.value * bp * e.vector).norm() <= tol);
      if (i > 0) CHECK(pairs[i - 1].value <= e.value);
      Eigen::Index pivot = 0;
      e.vector.cwiseAbs().maxCoeff(&pivot);
      CHECK(e.vector(pivot) > 0.0);
    }
  }
}

TEST_CASE("generalized eigensolver matches the characteristic polynomial") {
  synth::Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = oracle::random_symmetric(rng, 4);
    const Matrix b = oracle::random_psd(rng, 4, 4, 0.5);
    const auto roots = oracle::pencil_roots(a, b);
    REQUIRE(roots.size() == 4);
    const auto pairs = gen_eig_smallest(a, b, 4, 0.0);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(pairs[static_cast<std::size_t>(i)].value - roots[static_cast<std::size_t>(i)]) <= 1e-6);
  }
}

TEST_CASE("symmetrized and finiteness") {
  Matrix m(2, 2);
  m << 1, 2, 4, 3;
  const Matrix s = symmetrized(m);
  CHECK(s(0, 1) == 3.0);
  CHECK(s(1, 0) == 3.0);
  CHECK(all_finite(s));
  m(0, 0) = std::nan("");
  CHECK_FALSE(all_finite(m));
}
