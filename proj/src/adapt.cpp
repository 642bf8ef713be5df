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


#include "dbmmd/adapt.hpp"

#include <chrono>
#include <cmath>

#include "dbmmd/classify.hpp"
#include "dbmmd/error.hpp"

namespace dbmmd::adapt {

namespace {

std::string base_name(BaseModel b) {
  switch (b) {
    case BaseModel::JDA: return "JDA";
    case BaseModel::CDDA: return "CDDA";
    case BaseModel::DGA_DA: return "DGA-DA";
    case BaseModel::MEDA: return "MEDA";
  }
  return "?";
}

std::size_t count_changes(const Labels& a, const Labels& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i] ? 1 : 0;
  return n;
}

Labels tail(const Labels& l, std::size_t from) {
  return Labels(l.begin() + static_cast<std::ptrdiff_t>(from), l.end());
}

graph::AffinityMatrix boundary_affinity(const Matrix& x, const AdaptConfig& cfg) {
  if (cfg.unit_affinity) return graph::constant_affinity(static_cast<std::size_t>(x.cols()), 1.0);
  return graph::build_affinity(x, cfg.sigma_mode, 0);
}

}  // namespace

void ModelKind::validate() const {
  if (base == BaseModel::MEDA && boundary == Boundary::DB) {
    throw UnsupportedModelError("MEDA+DB is not defined: MEDA has no repulsive term");
  }
}

std::string ModelKind::name() const {
  switch (boundary) {
    case Boundary::None: return base_name(base);
    case Boundary::CG: return base_name(base) + "+CG";
    case Boundary::DB: return base_name(base) + "+DB";
  }
  return base_name(base);
}

ModelKind ModelKind::parse(const std::string& text) {
  std::string head = text;
  Boundary boundary = Boundary::None;
  if (const auto plus = text.rfind('+'); plus != std::string::npos) {
    head = text.substr(0, plus);
    const std::string suffix = text.substr(plus + 1);
    if (suffix == "CG") {
      boundary = Boundary::CG;
    } else if (suffix == "DB") {
      boundary = Boundary::DB;
    } else {
      throw ParameterError("unknown model suffix in '" + text + "'");
    }
  }
  BaseModel base;
  if (head == "JDA") {
    base = BaseModel::JDA;
  } else if (head == "CDDA") {
    base = BaseModel::CDDA;
  } else if (head == "DGA-DA" || head == "DGA_DA") {
    base = BaseModel::DGA_DA;
  } else if (head == "MEDA") {
    base = BaseModel::MEDA;
  } else {
    throw ParameterError("unknown model '" + text + "'");
  }
  ModelKind kind{base, boundary};
  kind.validate();
  return kind;
}

DbMatrix assemble_db(const mmd::MmdMatrices& mmd, const graph::BoundaryGraphs* graphs,
                     const ModelKind& kind, bool keep_off_mask) {
  kind.validate();
  if (kind.boundary != Boundary::None && graphs == nullptr) {
    throw StateError(kind.name() + " needs boundary graphs");
  }
  Matrix compact = mmd.mc_sum;
  if (kind.boundary != Boundary::None) {
    compact = graph::reweight(graphs->g_cg, mmd.mc_sum, mmd.masks, true, graphs->mode,
                              keep_off_mask);
  }
  Matrix db = mmd.m0 + compact;
  if (kind.uses_repulsion()) {
    Matrix repulsive = mmd.m_st + mmd.m_ts;
    if (kind.boundary == Boundary::DB) {
      repulsive = graph::reweight(graphs->g_sg, repulsive, mmd.masks, false, graphs->mode,
                                  keep_off_mask);
    }
    db -= repulsive;
  }
  return DbMatrix{linalg::symmetrized(db)};
}

Projection solve_projection(const Matrix& s, const DbMatrix& db, std::size_t k, double lambda,
                            double ridge) {
  if (db.entries.rows() != s.cols() || db.entries.cols() != s.cols()) {
    throw DimensionError("DB matrix size does not match the sample count");
  }
  if (!(lambda > 0.0)) throw ParameterError("lambda must be > 0");

  Matrix lhs = s * db.entries * s.transpose();
  lhs.diagonal().array() += lambda;
  lhs = linalg::symmetrized(lhs);

  // s H s^T with H idempotent: center the columns once.
  const Matrix centered = s.colwise() - s.rowwise().mean();
  const Matrix rhs = linalg::symmetrized(centered * centered.transpose());

  const double r = ridge < 0.0 ? linalg::default_ridge(rhs) : ridge;
  const auto pairs = linalg::gen_eig_smallest(lhs, rhs, k, r);

  Projection p;
  p.a = linalg::eigvec_matrix(pairs);
  p.z = p.a.transpose() * s;
  for (const auto& e : pairs) p.eigenvalues.push_back(e.value);
  p.objective = (p.a.transpose() * lhs * p.a).trace();
  return p;
}

Matrix meda_coefficients(const Matrix& kernel, const Matrix& mmd, const Matrix& laplacian,
                         const Matrix& y_labeled, const MedaParams& params) {
  const Eigen::Index n = kernel.rows();
  if (kernel.cols() != n || mmd.rows() != n || laplacian.rows() != n) {
    throw DimensionError("MEDA operands must share the sample count");
  }
  if (y_labeled.rows() > n) throw DimensionError("more labelled rows than samples");

  Matrix ey = Matrix::Zero(n, y_labeled.cols());
  ey.topRows(y_labeled.rows()) = y_labeled;
  Matrix core = params.alpha * mmd + params.rho * laplacian;
  core.diagonal().head(y_labeled.rows()).array() += 1.0;
  const Matrix base = core * kernel;

  double extra = 0.0;
  const double scale = std::max(1.0, base.cwiseAbs().maxCoeff());
  for (int attempt = 0; attempt < 6; ++attempt) {
    Matrix system = base;
    system.diagonal().array() += params.eta + extra;
    Eigen::PartialPivLU<Matrix> lu(system);
    if (lu.rcond() > 1e-13) {
      Matrix beta = lu.solve(ey);
      if (beta.allFinite()) return beta;
    }
    extra = extra == 0.0 ? 1e-10 * scale : extra * 100.0;
  }
  throw NumericError("MEDA linear system stays singular after ridge escalation");
}

Labels nn_initial_labels(const DomainPair& pair) {
  return classify::nn_classify(pair.source().features, pair.source().labels,
                               pair.target().features);
}

Matrix solver_features(const Matrix& packed, const AdaptConfig& cfg) {
  switch (cfg.kernel) {
    case KernelChoice::Primal: return packed;
    case KernelChoice::Linear: return linalg::kernel_matrix(packed, linalg::KernelKind::linear());
    case KernelChoice::Rbf: {
      const double sigma =
          cfg.kernel_sigma > 0.0 ? cfg.kernel_sigma : linalg::median_distance(packed);
      return linalg::kernel_matrix(packed, linalg::KernelKind::rbf(sigma));
    }
    case KernelChoice::Poly:
      return linalg::kernel_matrix(packed, linalg::KernelKind::poly(cfg.kernel_degree));
  }
  throw ParameterError("unknown kernel choice");
}

namespace {

struct StepResult {
  Labels target_labels;
  Matrix projection;
  Matrix embedding;
  std::vector<double> eigenvalues;
  double objective = 0.0;
};

// One projection-based iteration (JDA, CDDA, DGA-DA and their variants).
StepResult projection_step(const DomainPair& current, const Matrix& s,
                           const graph::AffinityMatrix& w, const AdaptConfig& cfg,
                           const ModelKind& kind) {
  const auto mm = mmd::build_all(current, cfg.matrix_mode);
  std::optional<graph::BoundaryGraphs> graphs;
  if (kind.boundary != Boundary::None) graphs = graph::build_graphs(mm.masks, w, cfg.graph_mode);
  const auto db = assemble_db(mm, graphs ? &*graphs : nullptr, kind, cfg.keep_off_mask);
  auto proj = solve_projection(s, db, cfg.k, cfg.lambda);

  const auto ns = static_cast<Eigen::Index>(current.n_source());
  const auto nt = static_cast<Eigen::Index>(current.n_target());
  Labels pred = classify::nn_classify(proj.z.leftCols(ns), current.source().labels,
                                      proj.z.rightCols(nt));
  if (kind.base == BaseModel::DGA_DA) {
    const auto zw = graph::build_affinity(proj.z, SigmaMode::median_heuristic(), cfg.neighborhood_p);
    const Matrix lap = graph::build_laplacian(zw, cfg.normalized_laplacian);
    Labels all = current.source().labels;
    all.insert(all.end(), pred.begin(), pred.end());
    const auto prop = classify::propagate_labels(lap, classify::one_hot(all, current.class_count()),
                                                 cfg.mu, current.n_source());
    pred = tail(prop.labels, current.n_source());
  }
  return StepResult{std::move(pred), std::move(proj.a), std::move(proj.z),
                    std::move(proj.eigenvalues), proj.objective};
}

// One MEDA iteration: closed-form kernel labeler.
StepResult meda_step(const DomainPair& current, const Matrix& k, const Matrix& lap,
                     const graph::AffinityMatrix& w, const AdaptConfig& cfg,
                     const ModelKind& kind) {
  const auto masks = mmd::make_masks(current);
  mmd::MmdMatrices mm{mmd::build_marginal(current), mmd::build_conditional(current),
                      Matrix(), Matrix(), masks};
  std::optional<graph::BoundaryGraphs> graphs;
  if (kind.boundary != Boundary::None) graphs = graph::build_graphs(masks, w, cfg.graph_mode);
  const Matrix m = assemble_db(mm, graphs ? &*graphs : nullptr, kind, cfg.keep_off_mask).entries;

  const Matrix ys = classify::one_hot(current.source().labels, current.class_count());
  const Matrix beta = meda_coefficients(k, m, lap, ys, cfg.meda);
  const Matrix f = k * beta;

  const auto ns = static_cast<Eigen::Index>(current.n_source());
  const Matrix resid = ys - f.topRows(ns);
  const Matrix kb = k * beta;
  const double objective = resid.squaredNorm() + cfg.meda.eta * (beta.transpose() * kb).trace() +
                           (kb.transpose() * (cfg.meda.alpha * m + cfg.meda.rho * lap) * kb).trace();

  Labels pred = classify::argmax_rows(f.bottomRows(f.rows() - ns));
  return StepResult{std::move(pred), beta, f.transpose(), {}, objective};
}

}  // namespace

AdaptationReport run_adaptation(const DomainPair& pair, const AdaptConfig& cfg,
                                const ModelKind& kind, const std::optional<Labels>& truth,
                                const InitialLabeler& initial) {
  cfg.validate();
  kind.validate();
  if (truth && truth->size() != pair.n_target()) {
    throw DimensionError("ground-truth length differs from target sample count");
  }
  const bool meda = kind.base == BaseModel::MEDA;
  if (meda && cfg.kernel == KernelChoice::Primal) {
    throw ParameterError("MEDA requires a kernel (set kernel to linear, rbf or poly)");
  }

  const auto start = std::chrono::steady_clock::now();
  AdaptationReport report;
  report.model = kind.name();
  report.threads = Eigen::nbThreads();

  const Matrix x = pair.packed_features();
  const Matrix s = solver_features(x, cfg);
  if (!meda && cfg.k > static_cast<std::size_t>(s.rows())) {
    throw ParameterError("k = " + std::to_string(cfg.k) + " exceeds the solver dimension " +
                         std::to_string(s.rows()));
  }
  graph::AffinityMatrix w;
  if (kind.boundary != Boundary::None) w = boundary_affinity(x, cfg);
  Matrix meda_lap;
  if (meda) {
    meda_lap = graph::build_laplacian(
        graph::build_affinity(x, cfg.sigma_mode, cfg.neighborhood_p), cfg.normalized_laplacian);
  }

  Labels labels = pair.has_pseudo_labels() ? *pair.target().pseudo_labels : initial(pair);

  for (std::size_t t = 1; t <= cfg.max_iterations; ++t) {
    StepResult step;
    try {
      const DomainPair current = pair.with_pseudo_labels(labels);
      step = meda ? meda_step(current, s, meda_lap, w, cfg, kind)
                  : projection_step(current, s, w, cfg, kind);
    } catch (const Error& e) {
      throw IterationError(report.model + " iteration " + std::to_string(t) + ": " + e.what());
    }
    if (!std::isfinite(step.objective)) {
      throw IterationError(report.model + " iteration " + std::to_string(t) +
                           ": objective is not finite");
    }

    IterationRecord rec;
    rec.iteration = t;
    rec.churn = count_changes(step.target_labels, labels);
    rec.objective = step.objective;
    rec.eigenvalues = step.eigenvalues;
    if (truth) rec.accuracy = classify::accuracy(step.target_labels, *truth);
    rec.pseudo_labels = step.target_labels;
    report.iterations.push_back(rec);

    labels = std::move(step.target_labels);
    report.projection = std::move(step.projection);
    report.embedding = std::move(step.embedding);
    if (rec.churn == 0) {
      report.fixed_point_iteration = t;
      break;
    }
  }

  report.predicted = labels;
  if (truth) report.final_accuracy = classify::accuracy(labels, *truth);
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

AdaptationReport run_meda_cg(const DomainPair& pair, const AdaptConfig& cfg,
                             const std::optional<Labels>& truth) {
  return run_adaptation(pair, cfg, ModelKind{BaseModel::MEDA, Boundary::CG}, truth);
}

}  // namespace dbmmd::adapt
