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


#include "dbmmd/datamodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "dbmmd/error.hpp"

namespace dbmmd {

namespace {

void check_labels(const Labels& labels, int class_count, const char* what) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= class_count) {
      throw ParameterError(std::string(what) + " label " + std::to_string(labels[i]) +
                           " at column " + std::to_string(i) + " outside [0, " +
                           std::to_string(class_count) + ")");
    }
  }
}

std::vector<std::size_t> count_labels(const Labels& labels, int class_count) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(class_count), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

}  // namespace

DomainPair::DomainPair(LabeledDomain source, UnlabeledDomain target, int class_count)
    : source_(std::move(source)), target_(std::move(target)), class_count_(class_count) {
  if (class_count_ < 1) throw ParameterError("class count must be >= 1");
  if (source_.features.rows() != target_.features.rows()) {
    throw DimensionError("feature dimension mismatch: source has " +
                         std::to_string(source_.features.rows()) + ", target has " +
                         std::to_string(target_.features.rows()));
  }
  if (source_.features.cols() == 0 || target_.features.cols() == 0) {
    throw DimensionError("both domains need at least one sample");
  }
  if (source_.labels.size() != static_cast<std::size_t>(source_.features.cols())) {
    throw DimensionError("source label count " + std::to_string(source_.labels.size()) +
                         " differs from sample count " +
                         std::to_string(source_.features.cols()));
  }
  if (!source_.features.allFinite() || !target_.features.allFinite()) {
    throw ParameterError("features contain non-finite entries");
  }
  check_labels(source_.labels, class_count_, "source");
  const auto counts = count_labels(source_.labels, class_count_);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw EmptyClassError("source domain has no sample of class " + std::to_string(c));
    }
  }
  if (target_.pseudo_labels) {
    if (target_.pseudo_labels->size() != static_cast<std::size_t>(target_.features.cols())) {
      throw DimensionError("pseudo-label count differs from target sample count");
    }
    check_labels(*target_.pseudo_labels, class_count_, "target pseudo");
  }
}

Matrix DomainPair::packed_features() const {
  Matrix x(source_.features.rows(), source_.features.cols() + target_.features.cols());
  x << source_.features, target_.features;
  return x;
}

Labels DomainPair::packed_labels() const {
  if (!target_.pseudo_labels) throw StateError("target domain has no pseudo-labels");
  Labels out = source_.labels;
  out.insert(out.end(), target_.pseudo_labels->begin(), target_.pseudo_labels->end());
  return out;
}

std::vector<std::size_t> DomainPair::source_counts() const {
  return count_labels(source_.labels, class_count_);
}

std::vector<std::size_t> DomainPair::target_counts() const {
  if (!target_.pseudo_labels) throw StateError("target domain has no pseudo-labels");
  return count_labels(*target_.pseudo_labels, class_count_);
}

std::vector<bool> DomainPair::target_presence() const {
  const auto counts = target_counts();
  std::vector<bool> present(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) present[c] = counts[c] > 0;
  return present;
}

DomainPair DomainPair::with_pseudo_labels(Labels labels) const {
  UnlabeledDomain t{target_.features, std::move(labels), target_.name};
  return DomainPair(source_, std::move(t), class_count_);
}

DomainPair DomainPair::without_pseudo_labels() const {
  UnlabeledDomain t{target_.features, std::nullopt, target_.name};
  return DomainPair(source_, std::move(t), class_count_);
}

DomainPair make_pair(LabeledDomain source, UnlabeledDomain target) {
  if (source.features.rows() != target.features.rows()) {
    throw DimensionError("feature dimension mismatch: source has " +
                         std::to_string(source.features.rows()) + ", target has " +
                         std::to_string(target.features.rows()));
  }
  if (source.labels.empty()) throw DimensionError("source domain has no labels");
  const int max_label = *std::max_element(source.labels.begin(), source.labels.end());
  return DomainPair(std::move(source), std::move(target), max_label + 1);
}

LabelMap LabelMap::from_labels(const std::vector<std::int64_t>& raw) {
  LabelMap m;
  std::set<std::int64_t> uniq(raw.begin(), raw.end());
  for (std::int64_t v : uniq) {
    m.forward_.emplace(v, static_cast<int>(m.backward_.size()));
    m.backward_.push_back(v);
  }
  return m;
}

int LabelMap::to_dense(std::int64_t raw) const {
  auto it = forward_.find(raw);
  if (it == forward_.end()) {
    throw ParameterError("label " + std::to_string(raw) + " does not occur in the source domain");
  }
  return it->second;
}

std::int64_t LabelMap::to_raw(int dense) const {
  if (dense < 0 || dense >= size()) throw ParameterError("dense label out of range");
  return backward_[static_cast<std::size_t>(dense)];
}

Labels LabelMap::apply(const std::vector<std::int64_t>& raw) const {
  Labels out;
  out.reserve(raw.size());
  for (std::int64_t v : raw) out.push_back(to_dense(v));
  return out;
}

void AdaptConfig::validate() const {
  if (k < 1) throw ParameterError("k must be >= 1");
  if (max_iterations < 1) throw ParameterError("T must be >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be > 0");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("mu must be > 0");
  if (!sigma_mode.median && !(sigma_mode.fixed > 0.0)) {
    throw ParameterError("fixed affinity sigma must be > 0");
  }
  if (kernel == KernelChoice::Poly && kernel_degree < 1) {
    throw ParameterError("poly kernel degree must be >= 1");
  }
  if (meda.eta < 0.0 || meda.alpha < 0.0 || meda.rho < 0.0) {
    throw ParameterError("MEDA weights must be >= 0");
  }
}

std::string to_string(KernelChoice k) {
  switch (k) {
    case KernelChoice::Primal: return "primal";
    case KernelChoice::Linear: return "linear";
    case KernelChoice::Rbf: return "rbf";
    case KernelChoice::Poly: return "poly";
  }
  return "?";
}

std::string to_string(GraphMode m) { return m == GraphMode::Literal ? "literal" : "spirit"; }

std::string to_string(MatrixMode m) {
  return m == MatrixMode::Literal ? "literal" : "rank_one_sum";
}

KernelChoice parse_kernel_choice(const std::string& s) {
  if (s == "primal") return KernelChoice::Primal;
  if (s == "linear") return KernelChoice::Linear;
  if (s == "rbf") return KernelChoice::Rbf;
  if (s == "poly") return KernelChoice::Poly;
  throw ParameterError("unknown kernel '" + s + "'");
}

GraphMode parse_graph_mode(const std::string& s) {
  if (s == "literal") return GraphMode::Literal;
  if (s == "spirit") return GraphMode::Spirit;
  throw ParameterError("unknown graph mode '" + s + "'");
}

MatrixMode parse_matrix_mode(const std::string& s) {
  if (s == "literal") return MatrixMode::Literal;
  if (s == "rank_one_sum") return MatrixMode::RankOneSum;
  throw ParameterError("unknown matrix mode '" + s + "'");
}

}  // namespace dbmmd
