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


#pragma once

#include <cstddef>

#include "dbmmd/datamodel.hpp"

namespace dbmmd::classify {

/// n x C score matrix; one-hot rows for hard labels.
using LabelDistribution = Matrix;

/// Label of the nearest (Euclidean) training column for every query column.
/// Ties go to the lowest training index.
Labels nn_classify(const Matrix& train, const Labels& train_labels, const Matrix& query);

/// One-hot rows for `labels`; rows with a negative label stay zero.
LabelDistribution one_hot(const Labels& labels, int class_count);

/// Row argmax, ties to the lowest class index.
Labels argmax_rows(const LabelDistribution& scores);

struct Propagation {
  LabelDistribution raw;         // mu (mu I + L)^-1 Y0, clamped rows restored
  LabelDistribution normalized;  // rows rescaled to sum 1
  Labels labels;
};

/// Closed-form stationary point of mu |F - Y0|_F^2 + tr(F^T L F).
///
/// The first `clamp_rows` rows are labelled samples; after solving they are
/// reset to their rows in `y0`.
Propagation propagate_labels(const Matrix& laplacian, const LabelDistribution& y0, double mu,
                             std::size_t clamp_rows = 0);

/// Fraction of positions where pred equals truth.
double accuracy(const Labels& pred, const Labels& truth);

}  // namespace dbmmd::classify
