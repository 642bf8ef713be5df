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
#include "dbmmd/mmd.hpp"

namespace dbmmd::graph {

/// Floor applied to affinities before they are inverted.
inline constexpr double kAffinityFloor = 1e-6;

struct AffinityMatrix {
  Matrix entries;  // symmetric, zero diagonal
  double sigma = 0.0;
  std::size_t neighborhood_p = 0;  // 0 = dense
};

struct BoundaryGraphs {
  Matrix g_cg;  // compacting graph, nonzero on cross-domain same-class pairs
  Matrix g_sg;  // separation graph, nonzero on cross-domain different-class pairs
  GraphMode mode = GraphMode::Spirit;
};

/// Gaussian affinity exp(-|xi - xj|^2 / 2 sigma^2) over the columns of `x`.
///
/// With p > 0 an entry is kept only when one sample is among the p nearest
/// neighbours of the other (ties resolved by lower index); p = 0 keeps every
/// pair. The median mode uses the median nonzero pairwise distance as sigma.
AffinityMatrix build_affinity(const Matrix& x, const SigmaMode& sigma_mode,
                              std::size_t neighborhood_p);

/// Dense affinity with every off-diagonal entry equal to `value`.
AffinityMatrix constant_affinity(std::size_t n, double value);

/// Compacting and separation graphs over the masks of the current labelling.
///
/// Literal: both graphs hold -1/max(w, floor) on their masks.
/// Spirit:  g_cg = 1/max(w, floor) on same-class cross pairs,
///          g_sg = w on different-class cross pairs.
BoundaryGraphs build_graphs(const mmd::ClassMasks& masks, const AffinityMatrix& w,
                            GraphMode mode);

/// Combines a graph with an MMD matrix.
///
/// Literal mode is the plain elementwise product. Spirit mode multiplies the
/// entries on the graph's mask and, when keep_off_mask is set, leaves every
/// other entry of `m` as is (otherwise they are zeroed).
Matrix reweight(const Matrix& graph, const Matrix& m, const mmd::ClassMasks& masks,
                bool same_class_mask, GraphMode mode, bool keep_off_mask);

/// L = D - W, or D^-1/2 (D - W) D^-1/2 when `normalized`. Zero-degree vertices
/// use kAffinityFloor as their degree in the normalized form.
Matrix build_laplacian(const AffinityMatrix& w, bool normalized);

}  // namespace dbmmd::graph
