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

#include "dbmmd/datamodel.hpp"
#include "dbmmd/error.hpp"
#include "oracles.hpp"

using namespace dbmmd;

namespace {

LabeledDomain src(Eigen::Index dim, Labels labels) {
  synth::Rng rng(1);
  return {oracle::random_matrix(rng, dim, static_cast<Eigen::Index>(labels.size())), std::move(labels), "s"};
}

UnlabeledDomain tgt(Eigen::Index dim, Eigen::Index n) {
  synth::Rng rng(2);
  return {oracle::random_matrix(rng, dim, n), std::nullopt, "t"};
}

}  // namespace

TEST_CASE("make_pair infers the class count") {
  const auto p = make_pair(src(3, {0, 1, 0, 1}), tgt(3, 4));
  CHECK(p.class_count() == 2);
  CHECK(p.n_source() == 4);
  CHECK(p.n_target() == 4);
  CHECK(p.dim() == 3);
  CHECK_FALSE(p.has_pseudo_labels());
  CHECK(p.packed_features().cols() == 8);
  CHECK(p.source_counts() == std::vector<std::size_t>{2, 2});
}

TEST_CASE("make_pair rejects bad input") {
  CHECK_THROWS_AS(make_pair(src(3, {0, 2, 0}), tgt(3, 2)), EmptyClassError);
  CHECK_THROWS_AS(make_pair(src(3, {0, 1}), tgt(4, 2)), DimensionError);
  auto s = src(2, {0, 1});
  s.labels.pop_back();
  CHECK_THROWS_AS(make_pair(s, tgt(2, 2)), DimensionError);
  auto bad = src(2, {0, 1});
  bad.features(0, 0) = std::nan("");
  CHECK_THROWS_AS(make_pair(bad, tgt(2, 2)), ParameterError);
  CHECK_THROWS_AS(DomainPair(src(2, {0, 1}), tgt(2, 2), 0), ParameterError);
  CHECK_THROWS_AS(DomainPair(src(2, {0, -1}), tgt(2, 2), 2), ParameterError);
}

TEST_CASE("pseudo-labels are replaced, not edited") {
  const auto p = make_pair(src(2, {0, 1, 1}), tgt(2, 3));
  CHECK_THROWS_AS(p.packed_labels(), StateError);
  const auto q = p.with_pseudo_labels({1, 1, 1});
  CHECK_FALSE(p.has_pseudo_labels());
  CHECK(q.packed_labels() == Labels{0, 1, 1, 1, 1, 1});
  CHECK(q.target_counts() == std::vector<std::size_t>{0, 3});
  CHECK(q.target_presence() == std::vector<bool>{false, true});
  CHECK_THROWS_AS(p.with_pseudo_labels({0, 1}), DimensionError);
  CHECK_THROWS_AS(p.with_pseudo_labels({0, 1, 2}), ParameterError);
  CHECK_FALSE(q.without_pseudo_labels().has_pseudo_labels());
  CHECK(q.source().features == p.source().features);
}

TEST_CASE("label map") {
  const auto m = LabelMap::from_labels({40, -3, 40, 7});
  CHECK(m.size() == 3);
  CHECK(m.to_dense(-3) == 0);
  CHECK(m.to_dense(7) == 1);
  CHECK(m.to_dense(40) == 2);
  CHECK(m.to_raw(2) == 40);
  CHECK(m.apply({7, 40}) == Labels{1, 2});
  CHECK_FALSE(m.contains(5));
  CHECK_THROWS_AS(m.to_dense(5), ParameterError);
  CHECK_THROWS_AS(m.to_raw(3), ParameterError);
}

TEST_CASE("config validation and enum parsing") {
  AdaptConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.k == 100);
  CHECK(cfg.max_iterations == 10);
  CHECK(cfg.graph_mode == GraphMode::Spirit);
  CHECK(cfg.matrix_mode == MatrixMode::Literal);
  auto bad = cfg;
  bad.k = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = cfg;
  bad.max_iterations = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = cfg;
  bad.lambda = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = cfg;
  bad.sigma_mode = SigmaMode::fixed_value(-1.0);
  CHECK_THROWS_AS(bad.validate(), ParameterError);

  for (auto k : {KernelChoice::Primal, KernelChoice::Linear, KernelChoice::Rbf, KernelChoice::Poly}) {
    CHECK(parse_kernel_choice(to_string(k)) == k);
  }
  for (auto g : {GraphMode::Literal, GraphMode::Spirit}) CHECK(parse_graph_mode(to_string(g)) == g);
  for (auto m : {MatrixMode::Literal, MatrixMode::RankOneSum}) CHECK(parse_matrix_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_kernel_choice("sigmoid"), ParameterError);
  CHECK_THROWS_AS(parse_graph_mode("x"), ParameterError);
  CHECK_THROWS_AS(parse_matrix_mode("x"), ParameterError);
}
