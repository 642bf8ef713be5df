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


#include "dbmmd/classify.hpp"

#include <cmath>
#include <limits>

#include "dbmmd/error.hpp"

namespace dbmmd::classify {

Labels nn_classify(const Matrix& train, const Labels& train_labels, const Matrix& query) {
  if (train.cols() == 0) throw ParameterError("nearest-neighbour training set is empty");
  if (train_labels.size() != static_cast<std::size_t>(train.cols())) {
    throw DimensionError("training label count differs from training sample count");
  }
  if (train.rows() != query.rows()) {
    throw DimensionError("training and query feature dimensions differ");
  }
  Labels out(static_cast<std::size_t>(query.cols()));
  for (Eigen::Index q = 0; q < query.cols(); ++q) {
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < train.cols(); ++t) {
      const double d = (train.col(t) - query.col(q)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = t;
      }
    }
    out[static_cast<std::size_t>(q)] = train_labels[static_cast<std::size_t>(best)];
  }
  return out;
}

LabelDistribution one_hot(const Labels& labels, int class_count) {
  LabelDistribution y = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= class_count) throw ParameterError("label exceeds class count");
    if (labels[i] >= 0) y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return y;
}

Labels argmax_rows(const LabelDistribution& scores) {
  Labels out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c) {
      if (scores(i, c) > scores(i, best)) best = c;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

Propagation propagate_labels(const Matrix& laplacian, const LabelDistribution& y0, double mu,
                             std::size_t clamp_rows) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("mu must be > 0");
  if (laplacian.rows() != laplacian.cols() || laplacian.rows() != y0.rows()) {
    throw DimensionError("Laplacian and label matrix sizes differ");
  }
  if (clamp_rows > static_cast<std::size_t>(y0.rows())) {
    throw DimensionError("more clamped rows than samples");
  }
  if (!y0.allFinite()) throw ParameterError("initial label matrix has non-finite entries");

  Matrix system = laplacian;
  system.diagonal().array() += mu;
  Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) {
    throw NumericError("mu I + L is not positive definite; is L a Laplacian?");
  }
  Propagation out;
  out.raw = mu * llt.solve(y0);
  const auto clamp = static_cast<Eigen::Index>(clamp_rows);
  out.raw.topRows(clamp) = y0.topRows(clamp);

  out.normalized = out.raw;
  for (Eigen::Index i = 0; i < out.normalized.rows(); ++i) {
    const double s = out.normalized.row(i).sum();
    if (s > 0.0) out.normalized.row(i) /= s;
  }
  out.labels = argmax_rows(out.normalized);
  return out;
}

double accuracy(const Labels& pred, const Labels& truth) {
  if (pred.size() != truth.size()) {
    throw DimensionError("prediction and ground-truth lengths differ");
  }
  if (pred.empty()) throw ParameterError("accuracy of an empty label set is undefined");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

}  // namespace dbmmd::classify
