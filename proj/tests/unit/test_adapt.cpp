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

#include "dbmmd/adapt.hpp"
#include "dbmmd/classify.hpp"
#include "dbmmd/error.hpp"
#include "oracles.hpp"

using namespace dbmmd;
using namespace dbmmd::adapt;

namespace {

synth::SyntheticData golden() {
  synth::SyntheticRecipe r;
  return synth::generate_synthetic(r);
}

AdaptConfig rbf_config() {
  AdaptConfig cfg;
  cfg.kernel = KernelChoice::Rbf;
  cfg.k = 20;
  return cfg;
}

std::vector<Labels> trajectory(const AdaptationReport& r) {
  std::vector<Labels> out;
  for (const auto& it : r.iterations) out.push_back(it.pseudo_labels);
  return out;
}

}  // namespace

TEST_CASE("model kinds") {
  for (const char* name : {"JDA", "JDA+CG", "JDA+DB", "CDDA", "CDDA+CG", "CDDA+DB", "DGA-DA",
                           "DGA-DA+CG", "DGA-DA+DB", "MEDA", "MEDA+CG"}) {
    CHECK(ModelKind::parse(name).name() == name);
  }
  CHECK(ModelKind::parse("DGA_DA+DB") == ModelKind{BaseModel::DGA_DA, Boundary::DB});
  CHECK_THROWS_AS(ModelKind::parse("MEDA+DB"), UnsupportedModelError);
  CHECK_THROWS_AS(ModelKind::parse("TCA"), ParameterError);
  CHECK_THROWS_AS(ModelKind::parse("JDA+XX"), ParameterError);
  CHECK(ModelKind::parse("CDDA+DB").baseline() == ModelKind::parse("CDDA"));
}

TEST_CASE("DB matrix assembly") {
  synth::Rng rng(51);
  const auto p = oracle::random_pair(rng, 12, 9, 3, 2, true);
  const auto mm = mmd::build_all(p, MatrixMode::RankOneSum);
  const auto masks = mm.masks;

  const Matrix jda = assemble_db(mm, nullptr, ModelKind::parse("JDA")).entries;
  CHECK((jda - (mm.m0 + mm.mc_sum)).cwiseAbs().maxCoeff() == 0.0);
  const Matrix cdda = assemble_db(mm, nullptr, ModelKind::parse("CDDA")).entries;
  CHECK((cdda - jda + mm.m_st + mm.m_ts).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(cdda == cdda.transpose());

  const auto unit = graph::build_graphs(masks, graph::constant_affinity(21, 1.0), GraphMode::Spirit);
  CHECK(assemble_db(mm, &unit, ModelKind::parse("CDDA+DB")).entries == cdda);
  CHECK(assemble_db(mm, &unit, ModelKind::parse("JDA+CG")).entries == jda);
  CHECK_THROWS_AS(assemble_db(mm, nullptr, ModelKind::parse("CDDA+DB")), StateError);
  CHECK_THROWS_AS(assemble_db(mm, &unit, ModelKind{BaseModel::MEDA, Boundary::DB}), UnsupportedModelError);

  // Block decomposition of the quadratic form.
  const Matrix z = oracle::random_matrix(rng, 2, 21);
  const double want = oracle::marginal_gap(z, p) + oracle::conditional_gap(z, p) -
                      oracle::repulsive_gap(z, p, true) - oracle::repulsive_gap(z, p, false);
  CHECK(std::abs((z * cdda * z.transpose()).trace() - want) <= 1e-10);

  // JDA+DB has no separation term.
  const auto w = graph::build_affinity(p.packed_features(), SigmaMode::median_heuristic(), 0);
  const auto g = graph::build_graphs(masks, w, GraphMode::Spirit);
  CHECK(assemble_db(mm, &g, ModelKind::parse("JDA+DB")).entries ==
        assemble_db(mm, &g, ModelKind::parse("JDA+CG")).entries);
}

TEST_CASE("projection with a zero DB matrix is PCA") {
  synth::Rng rng(52);
  Matrix x = oracle::random_matrix(rng, 5, 40);
  for (int j = 0; j < 40; ++j) {
    x(0, j) *= 4.0;
    x(3, j) *= 2.5;
  }
  const auto p = solve_projection(x, DbMatrix{Matrix::Zero(40, 40)}, 2, 1.0);
  const Matrix centered = x.colwise() - x.rowwise().mean();
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinU);
  CHECK(oracle::max_principal_angle(p.a, svd.matrixU().leftCols(2)) < 1e-6);
  CHECK(p.z.rows() == 2);
  CHECK(p.z.cols() == 40);
}

TEST_CASE("projection residuals and full basis") {
  synth::Rng rng(53);
  const auto pair = oracle::random_pair(rng, 10, 8, 2, 4, true);
  const auto mm = mmd::build_all(pair, MatrixMode::Literal);
  const auto db = assemble_db(mm, nullptr, ModelKind::parse("CDDA"));
  const Matrix s = pair.packed_features();
  const auto p = solve_projection(s, db, 4, 0.5);
  Matrix lhs = s * db.entries * s.transpose() + 0.5 * Matrix::Identity(4, 4);
  const Matrix c = s.colwise() - s.rowwise().mean();
  Matrix rhs = c * c.transpose();
  rhs += linalg::default_ridge(rhs) * Matrix::Identity(4, 4);
  for (int i = 0; i < 4; ++i) {
    const Vector v = p.a.col(i);
    CHECK((lhs * v - p.eigenvalues[static_cast<std::size_t>(i)] * rhs * v).norm() <= 1e-8 * (lhs.norm() + std::abs(p.eigenvalues[static_cast<std::size_t>(i)]) * rhs.norm()));
  }
  CHECK((p.a.transpose() * rhs * p.a - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(p.objective == doctest::Approx((p.a.transpose() * lhs * p.a).trace()));
  CHECK_THROWS_AS(solve_projection(s, db, 4, 0.0), ParameterError);
  CHECK_THROWS_AS(solve_projection(s, DbMatrix{Matrix::Zero(3, 3)}, 1, 1.0), DimensionError);
}

TEST_CASE("MEDA coefficients reduce to kernel ridge regression") {
  synth::Rng rng(54);
  const Matrix x = oracle::random_matrix(rng, 2, 14);
  const Matrix k = linalg::kernel_matrix(x, linalg::KernelKind::rbf(1.3));
  const Matrix ys = classify::one_hot(oracle::random_labels(rng, 8, 3, true), 3);
  MedaParams params{0.0, 0.0, 0.7};
  const Matrix beta = meda_coefficients(k, Matrix::Zero(14, 14), Matrix::Zero(14, 14), ys, params);
  const Matrix kss = k.topLeftCorner(8, 8);
  const Matrix ridge = (kss + 0.7 * Matrix::Identity(8, 8)).colPivHouseholderQr().solve(ys);
  CHECK((k.topRows(8) * beta - kss * ridge).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(beta.bottomRows(6).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("adaptation without shift is exact") {
  const auto g = golden();
  const auto& s = g.pair.source();
  UnlabeledDomain t{s.features, std::nullopt, "copy"};
  const DomainPair same(s, t, 3);
  for (const char* m : {"JDA", "CDDA", "CDDA+DB", "JDA+CG"}) {
    const auto r = run_adaptation(same, rbf_config(), ModelKind::parse(m), s.labels);
    REQUIRE_FALSE(r.iterations.empty());
    CHECK(*r.iterations.front().accuracy == 1.0);
  }
  // Propagation smooths labels across overlapping classes unless mu is large.
  auto cfg = rbf_config();
  cfg.mu = 1e6;
  const auto dga = run_adaptation(same, cfg, ModelKind::parse("DGA-DA"), s.labels);
  CHECK(*dga.iterations.front().accuracy == 1.0);
}

TEST_CASE("adaptation report contents and determinism") {
  const auto g = golden();
  const auto cfg = rbf_config();
  const auto a = run_adaptation(g.pair, cfg, ModelKind::parse("DGA-DA+DB"), g.target_truth);
  const auto b = run_adaptation(g.pair, cfg, ModelKind::parse("DGA-DA+DB"), g.target_truth);
  CHECK(a.predicted == b.predicted);
  CHECK(trajectory(a) == trajectory(b));
  CHECK(a.embedding == b.embedding);
  CHECK(a.projection == b.projection);
  REQUIRE(a.iterations.size() == b.iterations.size());
  for (std::size_t i = 0; i < a.iterations.size(); ++i) {
    CHECK(a.iterations[i].objective == b.iterations[i].objective);
    CHECK(a.iterations[i].eigenvalues == b.iterations[i].eigenvalues);
    CHECK(std::isfinite(a.iterations[i].objective));
    CHECK(*a.iterations[i].accuracy >= 0.0);
    CHECK(*a.iterations[i].accuracy <= 1.0);
  }
  CHECK(a.iterations.size() <= cfg.max_iterations);
  CHECK(a.embedding.rows() == 20);
  CHECK(a.embedding.cols() == 300);
  CHECK(a.fixed_point_iteration.has_value());
  CHECK(a.iterations.back().churn == 0);
}

TEST_CASE("iteration cap") {
  const auto g = golden();
  auto cfg = rbf_config();
  cfg.max_iterations = 1;
  const auto r = run_adaptation(g.pair, cfg, ModelKind::parse("CDDA"), g.target_truth);
  CHECK(r.iterations.size() == 1);
}

TEST_CASE("unit affinity reproduces the unweighted models") {
  const auto g = golden();
  auto cfg = rbf_config();
  cfg.unit_affinity = true;
  const auto plain = run_adaptation(g.pair, cfg, ModelKind::parse("CDDA"), g.target_truth);
  const auto db = run_adaptation(g.pair, cfg, ModelKind::parse("CDDA+DB"), g.target_truth);
  CHECK(trajectory(plain) == trajectory(db));
  CHECK(plain.embedding == db.embedding);

  const auto meda = run_adaptation(g.pair, cfg, ModelKind::parse("MEDA"), g.target_truth);
  const auto meda_cg = run_meda_cg(g.pair, cfg, g.target_truth);
  CHECK(trajectory(meda) == trajectory(meda_cg));
  CHECK(meda_cg.model == "MEDA+CG");
}

TEST_CASE("MEDA+CG does not degrade MEDA on the synthetic pair") {
  const auto g = golden();
  const auto cfg = rbf_config();
  const auto meda = run_adaptation(g.pair, cfg, ModelKind::parse("MEDA"), g.target_truth);
  const auto cg = run_meda_cg(g.pair, cfg, g.target_truth);
  CHECK(*cg.final_accuracy >= *meda.final_accuracy - 0.005);
}

TEST_CASE("rescaling the features keeps the primal trajectory") {
  synth::SyntheticRecipe r;
  r.dim = 4;
  const auto g = synth::generate_synthetic(r);
  AdaptConfig cfg;
  cfg.k = 3;
  cfg.lambda = 1e-6;
  for (const char* m : {"JDA", "CDDA+DB"}) {
    const auto base = run_adaptation(g.pair, cfg, ModelKind::parse(m), g.target_truth);
    for (double scale : {0.5, 4.0}) {
      LabeledDomain s{g.pair.source().features * scale, g.pair.source().labels, "s"};
      UnlabeledDomain t{g.pair.target().features * scale, std::nullopt, "t"};
      const DomainPair scaled(s, t, 3);
      const auto out = run_adaptation(scaled, cfg, ModelKind::parse(m), g.target_truth);
      CHECK(trajectory(out) == trajectory(base));
    }
  }
}

TEST_CASE("configuration errors") {
  const auto g = golden();
  AdaptConfig cfg;
  cfg.k = 3;
  CHECK_THROWS_AS(run_adaptation(g.pair, cfg, ModelKind::parse("JDA")), ParameterError);
  cfg.k = 2;
  CHECK_THROWS_AS(run_adaptation(g.pair, cfg, ModelKind::parse("MEDA")), ParameterError);
  CHECK_THROWS_AS(run_adaptation(g.pair, cfg, ModelKind::parse("JDA"), Labels{0, 1}), DimensionError);
  CHECK_NOTHROW(run_adaptation(g.pair, cfg, ModelKind::parse("JDA")));
  CHECK(solver_features(g.pair.packed_features(), cfg).rows() == 2);
}

TEST_CASE("custom initial labeler") {
  const auto g = golden();
  auto cfg = rbf_config();
  cfg.max_iterations = 1;
  std::size_t calls = 0;
  const auto r = run_adaptation(g.pair, cfg, ModelKind::parse("JDA"), g.target_truth,
                                [&](const DomainPair& p) {
                                  ++calls;
                                  return Labels(p.n_target(), 0);
                                });
  CHECK(calls == 1);
  CHECK(r.iterations.front().churn > 0);
}
