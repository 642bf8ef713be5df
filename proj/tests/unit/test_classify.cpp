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

#include "dbmmd/classify.hpp"
#include "dbmmd/error.hpp"
#include "oracles.hpp"

using namespace dbmmd;
using namespace dbmmd::classify;

TEST_CASE("nearest neighbour") {
  Matrix train(1, 3);
  train << 0, 2, 4;
  Matrix q(1, 3);
  q << 2, 1, 3.1;
  CHECK(nn_classify(train, {5, 6, 7}, q) == Labels{6, 5, 7});

  synth::Rng rng(41);
  const Matrix tr = oracle::random_matrix(rng, 3, 25);
  const Matrix qu = oracle::random_matrix(rng, 3, 40);
  const Labels tl = oracle::random_labels(rng, 25, 4, true);
  const Matrix d = oracle::sq_dists_loop((Matrix(3, 65) << tr, qu).finished());
  Labels want;
  for (int j = 25; j < 65; ++j) {
    int best = 0;
    for (int i = 1; i < 25; ++i) {
      if (d(i, j) < d(best, j)) best = i;
    }
    want.push_back(tl[static_cast<std::size_t>(best)]);
  }
  const Labels got = nn_classify(tr, tl, qu);
  CHECK(got == want);

  // Invariant under a common rotation.
  const Eigen::HouseholderQR<Matrix> qr(oracle::random_matrix(rng, 3, 3));
  const Matrix rot = qr.householderQ();
  CHECK(nn_classify(rot * tr, tl, rot * qu) == got);

  CHECK_THROWS_AS(nn_classify(Matrix(3, 0), {}, qu), ParameterError);
  CHECK_THROWS_AS(nn_classify(tr, {0}, qu), DimensionError);
}

TEST_CASE("one-hot and argmax") {
  const Matrix y = one_hot({1, -1, 0}, 3);
  CHECK(y.row(0) == Eigen::RowVector3d(0, 1, 0));
  CHECK(y.row(1).isZero(0.0));
  Matrix s(2, 3);
  s << 0.2, 0.5, 0.5, 0.9, 0.1, 0.0;
  CHECK(argmax_rows(s) == Labels{1, 0});
  CHECK_THROWS_AS(one_hot({3}, 3), ParameterError);
}

TEST_CASE("label propagation on a 3-node path") {
  Matrix l(3, 3);
  l << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  Matrix y0(3, 2);
  y0 << 1, 0, 0, 0, 0, 0;
  const auto p = propagate_labels(l, y0, 1.0);
  CHECK(std::abs(p.raw(0, 0) - 5.0 / 8.0) <= 1e-10);
  CHECK(std::abs(p.raw(1, 0) - 1.0 / 4.0) <= 1e-10);
  CHECK(std::abs(p.raw(2, 0) - 1.0 / 8.0) <= 1e-10);
  CHECK(p.labels[1] == 0);

  const auto hard = propagate_labels(l, y0, 1e9);
  CHECK((hard.raw - y0).cwiseAbs().maxCoeff() <= 1e-6);

  const auto flat = propagate_labels(Matrix::Zero(3, 3), y0, 0.3);
  CHECK((flat.raw - y0).cwiseAbs().maxCoeff() <= 1e-14);

  const auto clamped = propagate_labels(l, y0, 1.0, 1);
  CHECK(clamped.raw(0, 0) == 1.0);
  CHECK(clamped.raw(1, 0) == doctest::Approx(0.25));

  CHECK_THROWS_AS(propagate_labels(l, y0, 0.0), ParameterError);
  CHECK_THROWS_AS(propagate_labels(l, Matrix::Zero(2, 2), 1.0), DimensionError);
}

TEST_CASE("propagated rows stay in the simplex") {
  synth::Rng rng(42);
  const Matrix x = oracle::random_matrix(rng, 2, 30);
  Matrix w = Matrix::Zero(30, 30);
  const Matrix d = oracle::sq_dists_loop(x);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 30; ++j) w(i, j) = i == j ? 0.0 : std::exp(-d(i, j));
  }
  Vector dinv = w.rowwise().sum().array().rsqrt();
  Matrix l = Matrix::Identity(30, 30) - dinv.asDiagonal() * w * dinv.asDiagonal();
  const Matrix y0 = one_hot(oracle::random_labels(rng, 30, 3, true), 3);
  const auto p = propagate_labels(l, y0, 0.1, 10);
  CHECK(p.normalized.allFinite());
  for (int i = 0; i < 30; ++i) {
    CHECK(std::abs(p.normalized.row(i).sum() - 1.0) <= 1e-10);
    CHECK(p.normalized.row(i).minCoeff() >= -1e-10);
  }
  for (int i = 0; i < 10; ++i) CHECK(p.raw.row(i) == y0.row(i));
}

TEST_CASE("accuracy") {
  CHECK(accuracy({1, 2, 3}, {1, 2, 3}) == 1.0);
  CHECK(accuracy({1, 2, 3, 4}, {1, 2, 3, 0}) == 0.75);
  CHECK_THROWS_AS(accuracy({}, {}), ParameterError);
  CHECK_THROWS_AS(accuracy({1}, {1, 2}), DimensionError);
}
