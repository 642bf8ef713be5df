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
#include <vector>

#include "dbmmd/datamodel.hpp"

namespace dbmmd::mmd {

enum class Direction { SourceToTarget, TargetToSource };

/// Class membership over the packed order [source | target], used to locate
/// the cross-domain same-class and different-class positions.
struct ClassMasks {
  Labels packed_labels;
  std::size_t n_source = 0;
  std::vector<std::size_t> source_counts;
  std::vector<std::size_t> target_counts;

  std::size_t size() const { return packed_labels.size(); }
  bool is_source(std::size_t i) const { return i < n_source; }
  bool cross_domain(std::size_t i, std::size_t j) const {
    return is_source(i) != is_source(j);
  }
  /// (i, j) lie in different domains and share a label.
  bool same_class_cross(std::size_t i, std::size_t j) const {
    return cross_domain(i, j) && packed_labels[i] == packed_labels[j];
  }
  /// (i, j) lie in different domains and carry different labels.
  bool diff_class_cross(std::size_t i, std::size_t j) const {
    return cross_domain(i, j) && packed_labels[i] != packed_labels[j];
  }
  /// False for classes that are empty on either side.
  bool class_present(int c) const;
};

ClassMasks make_masks(const DomainPair& pair);

struct MmdMatrices {
  Matrix m0;
  Matrix mc_sum;
  Matrix m_st;
  Matrix m_ts;
  ClassMasks masks;
};

/// Marginal MMD matrix M0 = e e^T, e = 1/n_s on source and -1/n_t on target.
Matrix build_marginal(const DomainPair& pair);

/// Sum of the per-class conditional MMD matrices. Classes absent on either
/// side contribute nothing. Requires pseudo-labels (StateError otherwise).
Matrix build_conditional(const DomainPair& pair);

/// Repulsive-force matrix between each source (resp. target) sub-domain and
/// the differently labelled sub-domains of the other domain.
///
/// Literal mode assigns each entry once from the piecewise rule; rank-one-sum
/// mode accumulates e_{c,r} e_{c,r}^T over all ordered class pairs c != r.
Matrix build_repulsive(const DomainPair& pair, Direction direction, MatrixMode mode);

MmdMatrices build_all(const DomainPair& pair, MatrixMode mode);

}  // namespace dbmmd::mmd
