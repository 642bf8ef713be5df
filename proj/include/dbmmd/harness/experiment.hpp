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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dbmmd/adapt.hpp"
#include "dbmmd/harness/io.hpp"
#include "dbmmd/harness/synthetic.hpp"
#include "json.hpp"

namespace dbmmd::experiment {

struct DatasetSource {
  std::optional<synth::SyntheticRecipe> synthetic;
  std::filesystem::path source_path;
  std::filesystem::path target_path;
  io::FeatureFormat format = io::FeatureFormat::Csv;
};

struct ExperimentSpec {
  std::vector<adapt::ModelKind> models;
  DatasetSource dataset;
  AdaptConfig config;
  std::filesystem::path output_dir = "out";
  std::size_t repeat = 1;
  bool dump_embeddings = false;

  void validate() const;
};

/// Config-file schema (see README). Relative dataset paths resolve against
/// `base_dir`. Throws ParameterError on unknown keys or bad values.
ExperimentSpec spec_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentSpec load_spec(const std::filesystem::path& path);

AdaptConfig config_from_json(const nlohmann::json& j, AdaptConfig base = {});
nlohmann::json config_to_json(const AdaptConfig& cfg);
synth::SyntheticRecipe recipe_from_json(const nlohmann::json& j);
nlohmann::json recipe_to_json(const synth::SyntheticRecipe& r);

/// Outcome of one (model, repeat) cell, as persisted under reports/.
struct CellReport {
  std::string model;
  std::size_t model_index = 0;  // position in the spec's model list
  std::size_t repeat_index = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::optional<double> accuracy;
  std::optional<double> baseline_nn_accuracy;
  std::optional<std::size_t> fixed_point_iteration;
  std::size_t iterations_run = 0;
  std::vector<std::optional<double>> accuracy_trace;
  std::vector<double> objective_trace;
  std::vector<std::size_t> churn_trace;
  Labels predicted;
  double wall_time_seconds = 0.0;
};

nlohmann::json cell_to_json(const CellReport& c);
CellReport cell_from_json(const nlohmann::json& j);
CellReport cell_from_report(const adapt::AdaptationReport& r, std::size_t model_index,
                            std::size_t repeat_index, std::uint64_t seed,
                            std::optional<double> baseline);

struct SummaryRow {
  std::string model;
  bool failed = false;
  std::optional<double> accuracy;  // mean over repeats
  std::optional<double> accuracy_min;
  std::optional<double> accuracy_max;
  std::optional<double> delta_vs_base;
  std::optional<double> nn_baseline;  // unadapted 1-NN accuracy, mean over repeats
  std::optional<std::size_t> fixed_point_iteration;  // worst over repeats
  std::size_t repeats = 0;
  double wall_time_seconds = 0.0;  // total over repeats
};

/// Groups cells by model in first-seen order. Delta = accuracy minus the
/// accuracy of the same base model without boundary terms, when present.
std::vector<SummaryRow> summarize(const std::vector<CellReport>& cells);

/// Deterministic CSV (no timing columns).
std::string render_summary_csv(const std::vector<SummaryRow>& rows);
/// Plain-text markdown table including wall time.
std::string render_summary_markdown(const std::vector<SummaryRow>& rows);
std::string render_timing_csv(const std::vector<CellReport>& cells);

struct ExperimentResult {
  std::vector<CellReport> cells;
  std::vector<SummaryRow> rows;
  bool any_failed = false;
};

/// Runs every (model, repeat) cell, persisting per-cell JSON reports,
/// summary.csv, summary.md and timing.csv under spec.output_dir. A failing
/// cell is recorded and does not stop the others.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Re-renders the summaries from the JSON reports stored in `dir`.
ExperimentResult rerender_reports(const std::filesystem::path& dir);

}  // namespace dbmmd::experiment
