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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dbmmd/boundary_graph.hpp"
#include "dbmmd/datamodel.hpp"
#include "dbmmd/mmd.hpp"

namespace dbmmd::adapt {

enum class BaseModel { JDA, CDDA, DGA_DA, MEDA };
enum class Boundary { None, CG, DB };

struct ModelKind {
  BaseModel base = BaseModel::JDA;
  Boundary boundary = Boundary::None;

  /// Throws UnsupportedModelError for MEDA+DB.
  void validate() const;
  std::string name() const;
  /// Same base without boundary awareness.
  ModelKind baseline() const { return {base, Boundary::None}; }
  bool uses_repulsion() const { return base == BaseModel::CDDA || base == BaseModel::DGA_DA; }

  /// Parses names such as "JDA", "CDDA+DB", "DGA-DA+CG", "MEDA+CG".
  static ModelKind parse(const std::string& text);

  friend bool operator==(const ModelKind&, const ModelKind&) = default;
};

/// Coefficient matrix of the trace objective, M0 + compact - separation.
struct DbMatrix {
  Matrix entries;
};

/// JDA:  M0 + sum Mc
/// CDDA / DGA-DA: M0 + sum Mc - (M_st + M_ts)
/// MEDA: M0 + sum Mc
/// +CG reweights sum Mc with the compacting graph, +DB additionally reweights
/// the repulsive sum with the separation graph. `graphs` may be null only for
/// boundary = None.
DbMatrix assemble_db(const mmd::MmdMatrices& mmd, const graph::BoundaryGraphs* graphs,
                     const ModelKind& kind, bool keep_off_mask = true);

struct Projection {
  Matrix a;  // dim x k, dim = l (primal) or n (kernel)
  Matrix z;  // k x n embedding, a^T s
  std::vector<double> eigenvalues;
  double objective = 0.0;  // tr(a^T (s db s^T + lambda I) a)
};

/// k smallest generalized eigenvectors of (s db s^T + lambda I, s H s^T), where
/// s is the feature matrix (primal) or the kernel matrix. A negative ridge
/// selects linalg::default_ridge of the right-hand operand.
Projection solve_projection(const Matrix& s, const DbMatrix& db, std::size_t k, double lambda,
                            double ridge = -1.0);

/// Kernel expansion coefficients of the structural-risk labeler
///   beta = ((E + alpha M + rho L) K + eta I)^-1 E Y
/// where E selects the first `n_labeled` rows and Y holds their one-hot labels.
/// Escalates eta by a small ridge when the system is numerically singular and
/// throws NumericError if that does not help.
Matrix meda_coefficients(const Matrix& kernel, const Matrix& mmd, const Matrix& laplacian,
                         const Matrix& y_labeled, const MedaParams& params);

struct IterationRecord {
  std::size_t iteration = 0;  // 1-based
  Labels pseudo_labels;
  std::optional<double> accuracy;
  double objective = 0.0;
  std::size_t churn = 0;
  std::vector<double> eigenvalues;
};

struct AdaptationReport {
  std::string model;
  std::vector<IterationRecord> iterations;
  Matrix projection;
  Matrix embedding;
  Labels predicted;
  std::optional<double> final_accuracy;
  std::optional<std::size_t> fixed_point_iteration;  // first iteration with zero churn
  double wall_time_seconds = 0.0;
  int threads = 1;
};

/// Classifier used when the target has no pseudo-labels yet. Defaults to 1-NN
/// in the input space.
using InitialLabeler = std::function<Labels(const DomainPair&)>;

Labels nn_initial_labels(const DomainPair& pair);

/// Iterative adaptation: build the MMD matrices and graphs for the current
/// pseudo-labels, solve for the projection (or MEDA coefficients), relabel the
/// target, and repeat until the labels stop changing or the iteration cap is hit.
/// `truth`, when given, is used only to score each iteration.
AdaptationReport run_adaptation(const DomainPair& pair, const AdaptConfig& cfg,
                                const ModelKind& kind,
                                const std::optional<Labels>& truth = std::nullopt,
                                const InitialLabeler& initial = nn_initial_labels);

/// MEDA with the compacting graph applied to its MMD term. Requires a kernel.
AdaptationReport run_meda_cg(const DomainPair& pair, const AdaptConfig& cfg,
                             const std::optional<Labels>& truth = std::nullopt);

/// Feature matrix the projection acts on: X in primal mode, K(X) otherwise.
Matrix solver_features(const Matrix& packed, const AdaptConfig& cfg);

}  // namespace dbmmd::adapt
