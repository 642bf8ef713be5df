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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dbmmd/linalg.hpp"

namespace dbmmd {

using Labels = std::vector<int>;

/// Source domain: features (l x m) with one ground-truth class per column.
struct LabeledDomain {
  Matrix features;
  Labels labels;
  std::string name;
};

/// Target domain: features (l x m) and, once assigned, one pseudo-label per column.
struct UnlabeledDomain {
  Matrix features;
  std::optional<Labels> pseudo_labels;
  std::string name;
};

/// Validated source/target bundle. Treated as immutable; pseudo-labels are
/// replaced through with_pseudo_labels(), which returns a new pair.
class DomainPair {
 public:
  DomainPair(LabeledDomain source, UnlabeledDomain target, int class_count);

  const LabeledDomain& source() const { return source_; }
  const UnlabeledDomain& target() const { return target_; }
  int class_count() const { return class_count_; }

  std::size_t n_source() const { return static_cast<std::size_t>(source_.features.cols()); }
  std::size_t n_target() const { return static_cast<std::size_t>(target_.features.cols()); }
  std::size_t n_total() const { return n_source() + n_target(); }
  std::size_t dim() const { return static_cast<std::size_t>(source_.features.rows()); }

  bool has_pseudo_labels() const { return target_.pseudo_labels.has_value(); }

  /// [X_S, X_T], l x (n_s + n_t).
  Matrix packed_features() const;

  /// Source labels followed by target pseudo-labels. Throws StateError when the
  /// target has none.
  Labels packed_labels() const;

  /// Per-class sample counts in the source and in the pseudo-labelled target.
  std::vector<std::size_t> source_counts() const;
  std::vector<std::size_t> target_counts() const;

  /// True for classes with at least one target pseudo-label.
  std::vector<bool> target_presence() const;

  DomainPair with_pseudo_labels(Labels labels) const;
  DomainPair without_pseudo_labels() const;

 private:
  LabeledDomain source_;
  UnlabeledDomain target_;
  int class_count_ = 0;
};

/// Builds a pair with C inferred as max source label + 1.
/// Throws DimensionError on feature-dimension or label-count mismatch,
/// EmptyClassError when some class in [0, C) has no source sample.
DomainPair make_pair(LabeledDomain source, UnlabeledDomain target);

/// Dense remapping of arbitrary integer labels to 0..C-1 (ascending order of
/// the original values).
class LabelMap {
 public:
  static LabelMap from_labels(const std::vector<std::int64_t>& raw);

  int to_dense(std::int64_t raw) const;  // throws ParameterError if unknown
  std::int64_t to_raw(int dense) const;
  bool contains(std::int64_t raw) const { return forward_.count(raw) != 0; }
  int size() const { return static_cast<int>(backward_.size()); }
  const std::vector<std::int64_t>& raw_values() const { return backward_; }

  Labels apply(const std::vector<std::int64_t>& raw) const;

 private:
  std::map<std::int64_t, int> forward_;
  std::vector<std::int64_t> backward_;
};

enum class KernelChoice { Primal, Linear, Rbf, Poly };

/// How the graph affinity bandwidth is chosen.
struct SigmaMode {
  bool median = true;
  double fixed = 1.0;

  static SigmaMode median_heuristic() { return {true, 1.0}; }
  static SigmaMode fixed_value(double sigma) { return {false, sigma}; }
};

enum class GraphMode { Literal, Spirit };
enum class MatrixMode { Literal, RankOneSum };

struct MedaParams {
  double alpha = 10.0;  // weight of the MMD term
  double rho = 0.1;     // weight of the manifold term
  double eta = 1.0;     // RKHS norm weight
};

struct AdaptConfig {
  std::size_t k = 100;
  double lambda = 1.0;
  double mu = 0.01;
  std::size_t max_iterations = 10;
  KernelChoice kernel = KernelChoice::Primal;
  double kernel_sigma = 0.0;  // <= 0 selects the median heuristic for rbf
  int kernel_degree = 2;
  SigmaMode sigma_mode = SigmaMode::median_heuristic();
  std::size_t neighborhood_p = 5;  // Laplacian neighbourhood, 0 = dense
  GraphMode graph_mode = GraphMode::Spirit;
  MatrixMode matrix_mode = MatrixMode::Literal;
  bool keep_off_mask = true;
  bool normalized_laplacian = true;
  MedaParams meda;
  std::uint64_t seed = 7;
  /// Replace the boundary-graph affinity by W = 1 everywhere. Diagnostic switch
  /// used to check that unit reweighting reproduces the unweighted models.
  bool unit_affinity = false;

  /// Throws ParameterError on an invalid combination.
  void validate() const;
};

std::string to_string(KernelChoice k);
std::string to_string(GraphMode m);
std::string to_string(MatrixMode m);
KernelChoice parse_kernel_choice(const std::string& s);
GraphMode parse_graph_mode(const std::string& s);
MatrixMode parse_matrix_mode(const std::string& s);

}  // namespace dbmmd
