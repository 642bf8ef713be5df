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


#include "dbmmd/mmd.hpp"

#include "dbmmd/error.hpp"

namespace dbmmd::mmd {

namespace {

using Index = std::vector<Eigen::Index>;

// Writes (or adds) the quadratic form of e with e = +1/na on `a`, -1/nb on `b`.
void put_pair_block(Matrix& m, const Index& a, const Index& b, bool accumulate) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double aa = 1.0 / (na * na);
  const double bb = 1.0 / (nb * nb);
  const double ab = -1.0 / (na * nb);
  auto put = [&](Eigen::Index i, Eigen::Index j, double v) {
    if (accumulate) {
      m(i, j) += v;
    } else {
      m(i, j) = v;
    }
  };
  for (Eigen::Index i : a) {
    for (Eigen::Index j : a) put(i, j, aa);
  }
  for (Eigen::Index i : b) {
    for (Eigen::Index j : b) put(i, j, bb);
  }
  for (Eigen::Index i : a) {
    for (Eigen::Index j : b) {
      put(i, j, ab);
      put(j, i, ab);
    }
  }
}

struct SubDomains {
  std::vector<Index> source;
  std::vector<Index> target;
};

SubDomains split_by_class(const DomainPair& pair) {
  const auto labels = pair.packed_labels();
  const auto c = static_cast<std::size_t>(pair.class_count());
  SubDomains sd{std::vector<Index>(c), std::vector<Index>(c)};
  const std::size_t ns = pair.n_source();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& bucket = i < ns ? sd.source : sd.target;
    bucket[static_cast<std::size_t>(labels[i])].push_back(static_cast<Eigen::Index>(i));
  }
  return sd;
}

}  // namespace

bool ClassMasks::class_present(int c) const {
  const auto idx = static_cast<std::size_t>(c);
  return source_counts[idx] > 0 && target_counts[idx] > 0;
}

ClassMasks make_masks(const DomainPair& pair) {
  return ClassMasks{pair.packed_labels(), pair.n_source(), pair.source_counts(),
                    pair.target_counts()};
}

Matrix build_marginal(const DomainPair& pair) {
  const auto n = static_cast<Eigen::Index>(pair.n_total());
  const auto ns = static_cast<Eigen::Index>(pair.n_source());
  Index src(static_cast<std::size_t>(ns));
  Index tgt(static_cast<std::size_t>(n - ns));
  for (Eigen::Index i = 0; i < ns; ++i) src[static_cast<std::size_t>(i)] = i;
  for (Eigen::Index i = ns; i < n; ++i) tgt[static_cast<std::size_t>(i - ns)] = i;
  Matrix m = Matrix::Zero(n, n);
  put_pair_block(m, src, tgt, false);
  return m;
}

Matrix build_conditional(const DomainPair& pair) {
  const auto sd = split_by_class(pair);
  const auto n = static_cast<Eigen::Index>(pair.n_total());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t c = 0; c < sd.source.size(); ++c) {
    if (sd.source[c].empty() || sd.target[c].empty()) continue;
    put_pair_block(m, sd.source[c], sd.target[c], false);
  }
  return m;
}

Matrix build_repulsive(const DomainPair& pair, Direction direction, MatrixMode mode) {
  const auto sd = split_by_class(pair);
  const auto n = static_cast<Eigen::Index>(pair.n_total());
  const bool accumulate = mode == MatrixMode::RankOneSum;
  const auto& near = direction == Direction::SourceToTarget ? sd.source : sd.target;
  const auto& far = direction == Direction::SourceToTarget ? sd.target : sd.source;
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t c = 0; c < near.size(); ++c) {
    if (near[c].empty()) continue;
    for (std::size_t r = 0; r < far.size(); ++r) {
      if (r == c || far[r].empty()) continue;
      put_pair_block(m, near[c], far[r], accumulate);
    }
  }
  return m;
}

MmdMatrices build_all(const DomainPair& pair, MatrixMode mode) {
  return MmdMatrices{build_marginal(pair), build_conditional(pair),
                     build_repulsive(pair, Direction::SourceToTarget, mode),
                     build_repulsive(pair, Direction::TargetToSource, mode), make_masks(pair)};
}

}  // namespace dbmmd::mmd
