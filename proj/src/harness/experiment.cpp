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


#include "dbmmd/harness/experiment.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "dbmmd/classify.hpp"
#include "dbmmd/error.hpp"

namespace dbmmd::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ParameterError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (allowed.count(it.key()) == 0) {
      throw ParameterError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

template <typename T>
T get_as(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParameterError(where + "." + key + ": " + e.what());
  }
}

std::size_t get_count(const json& j, const std::string& key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ParameterError(where + "." + key + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string opt_double(const std::optional<double>& v) {
  return v ? io::format_double(*v) : std::string();
}

std::string pct(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * *v);
  return buf;
}

std::string signed_pct(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+.2f", 100.0 * *v);
  return buf;
}

std::string cell_file_name(const CellReport& c) {
  return std::to_string(c.model_index) + "_" + c.model + ".r" + std::to_string(c.repeat_index) +
         ".json";
}

}  // namespace

void ExperimentSpec::validate() const {
  if (models.empty()) throw ParameterError("experiment lists no models");
  if (repeat < 1) throw ParameterError("repeat must be >= 1");
  for (const auto& m : models) m.validate();
  config.validate();
  if (!dataset.synthetic && (dataset.source_path.empty() || dataset.target_path.empty())) {
    throw ParameterError("dataset needs either a synthetic recipe or source and target files");
  }
  if (dataset.synthetic) dataset.synthetic->validate();
}

AdaptConfig config_from_json(const json& j, AdaptConfig cfg) {
  static const std::set<std::string> keys = {
      "k", "lambda", "mu", "T", "kernel", "kernel_sigma", "kernel_degree", "sigma",
      "neighborhood_p", "graph_mode", "matrix_mode", "keep_off_mask", "normalized_laplacian",
      "meda_alpha", "meda_rho", "meda_eta", "seed", "unit_affinity"};
  const std::string where = "config";
  reject_unknown(j, keys, where);
  if (j.contains("k")) cfg.k = get_count(j, "k", where);
  if (j.contains("lambda")) cfg.lambda = get_as<double>(j, "lambda", where);
  if (j.contains("mu")) cfg.mu = get_as<double>(j, "mu", where);
  if (j.contains("T")) cfg.max_iterations = get_count(j, "T", where);
  if (j.contains("kernel")) cfg.kernel = parse_kernel_choice(get_as<std::string>(j, "kernel", where));
  if (j.contains("kernel_sigma")) cfg.kernel_sigma = get_as<double>(j, "kernel_sigma", where);
  if (j.contains("kernel_degree")) cfg.kernel_degree = get_as<int>(j, "kernel_degree", where);
  if (j.contains("sigma")) {
    const auto& s = j.at("sigma");
    if (s.is_string() && s.get<std::string>() == "median") {
      cfg.sigma_mode = SigmaMode::median_heuristic();
    } else if (s.is_number()) {
      cfg.sigma_mode = SigmaMode::fixed_value(s.get<double>());
    } else {
      throw ParameterError("config.sigma must be \"median\" or a positive number");
    }
  }
  if (j.contains("neighborhood_p")) cfg.neighborhood_p = get_count(j, "neighborhood_p", where);
  if (j.contains("graph_mode")) cfg.graph_mode = parse_graph_mode(get_as<std::string>(j, "graph_mode", where));
  if (j.contains("matrix_mode")) cfg.matrix_mode = parse_matrix_mode(get_as<std::string>(j, "matrix_mode", where));
  if (j.contains("keep_off_mask")) cfg.keep_off_mask = get_as<bool>(j, "keep_off_mask", where);
  if (j.contains("normalized_laplacian")) cfg.normalized_laplacian = get_as<bool>(j, "normalized_laplacian", where);
  if (j.contains("meda_alpha")) cfg.meda.alpha = get_as<double>(j, "meda_alpha", where);
  if (j.contains("meda_rho")) cfg.meda.rho = get_as<double>(j, "meda_rho", where);
  if (j.contains("meda_eta")) cfg.meda.eta = get_as<double>(j, "meda_eta", where);
  if (j.contains("seed")) cfg.seed = get_as<std::uint64_t>(j, "seed", where);
  if (j.contains("unit_affinity")) cfg.unit_affinity = get_as<bool>(j, "unit_affinity", where);
  return cfg;
}

json config_to_json(const AdaptConfig& cfg) {
  json j;
  j["k"] = cfg.k;
  j["lambda"] = cfg.lambda;
  j["mu"] = cfg.mu;
  j["label_propagation_alpha"] = 1.0 / (1.0 + cfg.mu);
  j["T"] = cfg.max_iterations;
  j["kernel"] = to_string(cfg.kernel);
  j["kernel_sigma"] = cfg.kernel_sigma;
  j["kernel_degree"] = cfg.kernel_degree;
  if (cfg.sigma_mode.median) {
    j["sigma"] = "median";
  } else {
    j["sigma"] = cfg.sigma_mode.fixed;
  }
  j["neighborhood_p"] = cfg.neighborhood_p;
  j["graph_mode"] = to_string(cfg.graph_mode);
  j["matrix_mode"] = to_string(cfg.matrix_mode);
  j["keep_off_mask"] = cfg.keep_off_mask;
  j["normalized_laplacian"] = cfg.normalized_laplacian;
  j["meda_alpha"] = cfg.meda.alpha;
  j["meda_rho"] = cfg.meda.rho;
  j["meda_eta"] = cfg.meda.eta;
  j["seed"] = cfg.seed;
  j["unit_affinity"] = cfg.unit_affinity;
  return j;
}

synth::SyntheticRecipe recipe_from_json(const json& j) {
  static const std::set<std::string> keys = {"class_count", "per_class", "dim", "shift",
                                             "angle_deg", "translation", "scale", "noise",
                                             "center_radius", "seed"};
  const std::string where = "dataset.synthetic";
  reject_unknown(j, keys, where);
  synth::SyntheticRecipe r;
  if (j.contains("class_count")) r.class_count = get_as<int>(j, "class_count", where);
  if (j.contains("per_class")) r.per_class = get_count(j, "per_class", where);
  if (j.contains("dim")) r.dim = get_count(j, "dim", where);
  if (j.contains("shift")) r.shift = synth::parse_shift(get_as<std::string>(j, "shift", where));
  if (j.contains("angle_deg")) r.angle_deg = get_as<double>(j, "angle_deg", where);
  if (j.contains("translation")) r.translation = get_as<std::vector<double>>(j, "translation", where);
  if (j.contains("scale")) r.scale = get_as<double>(j, "scale", where);
  if (j.contains("noise")) r.noise = get_as<double>(j, "noise", where);
  if (j.contains("center_radius")) r.center_radius = get_as<double>(j, "center_radius", where);
  if (j.contains("seed")) r.seed = get_as<std::uint64_t>(j, "seed", where);
  return r;
}

json recipe_to_json(const synth::SyntheticRecipe& r) {
  return json{{"class_count", r.class_count}, {"per_class", r.per_class},
              {"dim", r.dim},                 {"shift", synth::to_string(r.shift)},
              {"angle_deg", r.angle_deg},     {"translation", r.translation},
              {"scale", r.scale},             {"noise", r.noise},
              {"center_radius", r.center_radius}, {"seed", r.seed}};
}

ExperimentSpec spec_from_json(const json& j, const fs::path& base_dir) {
  reject_unknown(j, {"models", "dataset", "config", "output_dir", "repeat", "dump_embeddings"},
                 "experiment");
  ExperimentSpec spec;
  if (!j.contains("models") || !j["models"].is_array()) {
    throw ParameterError("experiment.models must be an array of model names");
  }
  for (const auto& m : j["models"]) {
    if (!m.is_string()) throw ParameterError("model names must be strings");
    spec.models.push_back(adapt::ModelKind::parse(m.get<std::string>()));
  }
  if (j.contains("config")) spec.config = config_from_json(j["config"]);
  if (!j.contains("dataset")) throw ParameterError("experiment.dataset is required");
  const auto& d = j["dataset"];
  reject_unknown(d, {"synthetic", "source", "target", "format"}, "dataset");
  if (d.contains("synthetic")) {
    auto recipe = recipe_from_json(d["synthetic"]);
    if (!d["synthetic"].contains("seed")) recipe.seed = spec.config.seed;
    spec.dataset.synthetic = recipe;
  } else {
    auto resolve = [&](const std::string& key) {
      fs::path p = get_as<std::string>(d, key, "dataset");
      return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };
    spec.dataset.source_path = resolve("source");
    spec.dataset.target_path = resolve("target");
    if (d.contains("format")) spec.dataset.format = io::parse_format(get_as<std::string>(d, "format", "dataset"));
  }
  if (j.contains("output_dir")) {
    fs::path p = get_as<std::string>(j, "output_dir", "experiment");
    spec.output_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  if (j.contains("repeat")) spec.repeat = get_count(j, "repeat", "experiment");
  if (j.contains("dump_embeddings")) spec.dump_embeddings = get_as<bool>(j, "dump_embeddings", "experiment");
  spec.validate();
  return spec;
}

ExperimentSpec load_spec(const fs::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
  return spec_from_json(j, path.parent_path());
}

json cell_to_json(const CellReport& c) {
  json j;
  j["model"] = c.model;
  j["model_index"] = c.model_index;
  j["repeat_index"] = c.repeat_index;
  j["seed"] = c.seed;
  j["failed"] = c.failed;
  j["error"] = c.error;
  j["accuracy"] = c.accuracy ? json(*c.accuracy) : json(nullptr);
  j["nn_baseline"] = c.baseline_nn_accuracy ? json(*c.baseline_nn_accuracy) : json(nullptr);
  j["fixed_point_iteration"] = c.fixed_point_iteration ? json(*c.fixed_point_iteration) : json(nullptr);
  j["iterations_run"] = c.iterations_run;
  json acc = json::array();
  for (const auto& a : c.accuracy_trace) acc.push_back(a ? json(*a) : json(nullptr));
  j["accuracy_trace"] = acc;
  j["objective_trace"] = c.objective_trace;
  j["churn_trace"] = c.churn_trace;
  j["predicted"] = c.predicted;
  j["wall_time_seconds"] = c.wall_time_seconds;
  return j;
}

CellReport cell_from_json(const json& j) {
  CellReport c;
  try {
    c.model = j.at("model").get<std::string>();
    c.model_index = j.at("model_index").get<std::size_t>();
    c.repeat_index = j.at("repeat_index").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.failed = j.at("failed").get<bool>();
    c.error = j.at("error").get<std::string>();
    if (!j.at("accuracy").is_null()) c.accuracy = j["accuracy"].get<double>();
    if (!j.at("nn_baseline").is_null()) c.baseline_nn_accuracy = j["nn_baseline"].get<double>();
    if (!j.at("fixed_point_iteration").is_null()) {
      c.fixed_point_iteration = j["fixed_point_iteration"].get<std::size_t>();
    }
    c.iterations_run = j.at("iterations_run").get<std::size_t>();
    for (const auto& a : j.at("accuracy_trace")) {
      c.accuracy_trace.push_back(a.is_null() ? std::nullopt : std::optional<double>(a.get<double>()));
    }
    c.objective_trace = j.at("objective_trace").get<std::vector<double>>();
    c.churn_trace = j.at("churn_trace").get<std::vector<std::size_t>>();
    c.predicted = j.at("predicted").get<Labels>();
    c.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  } catch (const json::exception& e) {
    throw ParameterError(std::string("malformed cell report: ") + e.what());
  }
  return c;
}

CellReport cell_from_report(const adapt::AdaptationReport& r, std::size_t model_index,
                            std::size_t repeat_index, std::uint64_t seed,
                            std::optional<double> baseline) {
  CellReport c;
  c.model = r.model;
  c.model_index = model_index;
  c.repeat_index = repeat_index;
  c.seed = seed;
  c.accuracy = r.final_accuracy;
  c.baseline_nn_accuracy = baseline;
  c.fixed_point_iteration = r.fixed_point_iteration;
  c.iterations_run = r.iterations.size();
  for (const auto& it : r.iterations) {
    c.accuracy_trace.push_back(it.accuracy);
    c.objective_trace.push_back(it.objective);
    c.churn_trace.push_back(it.churn);
  }
  c.predicted = r.predicted;
  c.wall_time_seconds = r.wall_time_seconds;
  return c;
}

std::vector<SummaryRow> summarize(const std::vector<CellReport>& input) {
  std::vector<CellReport> cells = input;
  std::stable_sort(cells.begin(), cells.end(), [](const CellReport& a, const CellReport& b) {
    if (a.model_index != b.model_index) return a.model_index < b.model_index;
    return a.repeat_index < b.repeat_index;
  });

  std::vector<SummaryRow> rows;
  std::map<std::string, std::size_t> index;
  std::map<std::string, std::vector<const CellReport*>> groups;
  for (const auto& c : cells) {
    if (index.emplace(c.model, rows.size()).second) {
      SummaryRow row;
      row.model = c.model;
      rows.push_back(row);
    }
    groups[c.model].push_back(&c);
  }

  for (auto& row : rows) {
    const auto& g = groups[row.model];
    row.repeats = g.size();
    double sum = 0.0;
    double base_sum = 0.0;
    std::size_t scored = 0;
    std::size_t base_scored = 0;
    bool converged_all = true;
    std::size_t worst = 0;
    for (const auto* c : g) {
      row.wall_time_seconds += c->wall_time_seconds;
      if (c->failed) {
        row.failed = true;
        continue;
      }
      if (c->accuracy) {
        sum += *c->accuracy;
        ++scored;
        row.accuracy_min = row.accuracy_min ? std::min(*row.accuracy_min, *c->accuracy) : *c->accuracy;
        row.accuracy_max = row.accuracy_max ? std::max(*row.accuracy_max, *c->accuracy) : *c->accuracy;
      }
      if (c->baseline_nn_accuracy) {
        base_sum += *c->baseline_nn_accuracy;
        ++base_scored;
      }
      if (c->fixed_point_iteration) {
        worst = std::max(worst, *c->fixed_point_iteration);
      } else {
        converged_all = false;
      }
    }
    if (row.failed) {
      row.accuracy_min.reset();
      row.accuracy_max.reset();
      continue;
    }
    if (scored > 0) row.accuracy = sum / static_cast<double>(scored);
    if (base_scored > 0) row.nn_baseline = base_sum / static_cast<double>(base_scored);
    if (converged_all && !g.empty()) row.fixed_point_iteration = worst;
  }

  for (auto& row : rows) {
    const auto kind = adapt::ModelKind::parse(row.model);
    if (kind.boundary == adapt::Boundary::None || !row.accuracy) continue;
    auto it = index.find(kind.baseline().name());
    if (it == index.end()) continue;
    const auto& base = rows[it->second];
    if (base.accuracy) row.delta_vs_base = *row.accuracy - *base.accuracy;
  }
  return rows;
}

std::string render_summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out =
      "model,accuracy,accuracy_min,accuracy_max,delta_vs_base,nn_baseline,fixed_point_iteration,"
      "repeats,status\n";
  for (const auto& r : rows) {
    out += r.model + ",";
    out += (r.failed ? std::string("FAILED") : opt_double(r.accuracy)) + ",";
    out += opt_double(r.accuracy_min) + "," + opt_double(r.accuracy_max) + ",";
    out += opt_double(r.delta_vs_base) + "," + opt_double(r.nn_baseline) + ",";
    out += (r.fixed_point_iteration ? std::to_string(*r.fixed_point_iteration) : std::string()) + ",";
    out += std::to_string(r.repeats) + "," + (r.failed ? "failed" : "ok") + "\n";
  }
  return out;
}

std::string render_summary_markdown(const std::vector<SummaryRow>& rows) {
  std::string out =
      "| model | accuracy (%) | range (%) | delta vs base | 1-NN baseline (%) | "
      "iterations to fixed point | wall time (s) |\n"
      "|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    char wall[32];
    std::snprintf(wall, sizeof(wall), "%.3f", r.wall_time_seconds);
    const std::string range =
        r.accuracy_min ? pct(r.accuracy_min) + " .. " + pct(r.accuracy_max) : std::string("-");
    out += "| " + r.model + " | " + (r.failed ? std::string("FAILED") : pct(r.accuracy)) + " | " +
           range + " | " + signed_pct(r.delta_vs_base) + " | " + pct(r.nn_baseline) + " | " +
           (r.fixed_point_iteration ? std::to_string(*r.fixed_point_iteration) : std::string("-")) +
           " | " + wall + " |\n";
  }
  return out;
}

std::string render_timing_csv(const std::vector<CellReport>& cells) {
  std::string out = "model,repeat,wall_time_seconds\n";
  for (const auto& c : cells) {
    out += c.model + "," + std::to_string(c.repeat_index) + "," + io::format_double(c.wall_time_seconds) + "\n";
  }
  return out;
}

namespace {

struct PreparedData {
  DomainPair pair;
  std::optional<Labels> truth;
};

PreparedData prepare(const ExperimentSpec& spec, std::size_t repeat, std::uint64_t& seed) {
  if (spec.dataset.synthetic) {
    auto recipe = *spec.dataset.synthetic;
    recipe.seed += repeat;
    seed = recipe.seed;
    auto data = synth::generate_synthetic(recipe);
    return PreparedData{std::move(data.pair), std::move(data.target_truth)};
  }
  seed = spec.config.seed + repeat;
  auto loaded = io::make_loaded_pair(io::load_features(spec.dataset.source_path, spec.dataset.format),
                                     io::load_features(spec.dataset.target_path, spec.dataset.format));
  return PreparedData{std::move(loaded.pair), std::move(loaded.target_truth)};
}

void write_embedding(const fs::path& path, const adapt::AdaptationReport& r, const DomainPair& pair) {
  std::string out;
  const Matrix& z = r.embedding;
  for (Eigen::Index d = 0; d < z.rows(); ++d) out += "z" + std::to_string(d) + ",";
  out += "domain,label\n";
  const auto ns = static_cast<Eigen::Index>(pair.n_source());
  for (Eigen::Index i = 0; i < z.cols(); ++i) {
    for (Eigen::Index d = 0; d < z.rows(); ++d) out += io::format_double(z(d, i)) + ",";
    const bool src = i < ns;
    const int label = src ? pair.source().labels[static_cast<std::size_t>(i)]
                          : r.predicted[static_cast<std::size_t>(i - ns)];
    out += std::string(src ? "source" : "target") + "," + std::to_string(label) + "\n";
  }
  io::write_file_atomic(path, out);
}

void write_outputs(const fs::path& dir, const ExperimentResult& result) {
  io::write_file_atomic(dir / "summary.csv", render_summary_csv(result.rows));
  io::write_file_atomic(dir / "summary.md", render_summary_markdown(result.rows));
  io::write_file_atomic(dir / "timing.csv", render_timing_csv(result.cells));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  const fs::path reports = spec.output_dir / "reports";
  fs::create_directories(reports);

  for (std::size_t r = 0; r < spec.repeat; ++r) {
    std::uint64_t seed = 0;
    std::optional<PreparedData> data;
    std::string data_error;
    try {
      data = prepare(spec, r, seed);
    } catch (const std::exception& e) {
      data_error = e.what();
    }
    std::optional<double> baseline;
    if (data && data->truth) {
      baseline = classify::accuracy(adapt::nn_initial_labels(data->pair), *data->truth);
    }
    for (std::size_t m = 0; m < spec.models.size(); ++m) {
      const auto& kind = spec.models[m];
      CellReport cell;
      if (!data) {
        cell.model = kind.name();
        cell.model_index = m;
        cell.repeat_index = r;
        cell.seed = seed;
        cell.failed = true;
        cell.error = data_error;
      } else {
        try {
          const auto report = adapt::run_adaptation(data->pair, spec.config, kind, data->truth);
          cell = cell_from_report(report, m, r, seed, baseline);
          if (spec.dump_embeddings) {
            write_embedding(spec.output_dir / "embeddings" /
                                (std::to_string(m) + "_" + kind.name() + ".r" + std::to_string(r) + ".csv"),
                            report, data->pair);
          }
        } catch (const std::exception& e) {
          cell = CellReport{};
          cell.model = kind.name();
          cell.model_index = m;
          cell.repeat_index = r;
          cell.seed = seed;
          cell.failed = true;
          cell.error = e.what();
        }
      }
      result.any_failed = result.any_failed || cell.failed;
      io::write_file_atomic(reports / cell_file_name(cell), cell_to_json(cell).dump(2) + "\n");
      result.cells.push_back(std::move(cell));
    }
  }

  json meta{{"models", json::array()}, {"config", config_to_json(spec.config)},
            {"repeat", spec.repeat}};
  for (const auto& m : spec.models) meta["models"].push_back(m.name());
  if (spec.dataset.synthetic) meta["synthetic"] = recipe_to_json(*spec.dataset.synthetic);
  io::write_file_atomic(spec.output_dir / "experiment.json", meta.dump(2) + "\n");

  result.rows = summarize(result.cells);
  write_outputs(spec.output_dir, result);
  return result;
}

ExperimentResult rerender_reports(const fs::path& dir) {
  const fs::path reports = dir / "reports";
  if (!fs::is_directory(reports)) throw ParameterError("no reports directory under " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(reports)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  ExperimentResult result;
  for (const auto& f : files) {
    json j;
    try {
      j = json::parse(io::read_file(f));
    } catch (const json::exception& e) {
      throw ParameterError(f.string() + ": " + e.what());
    }
    result.cells.push_back(cell_from_json(j));
    result.any_failed = result.any_failed || result.cells.back().failed;
  }
  std::stable_sort(result.cells.begin(), result.cells.end(), [](const CellReport& a, const CellReport& b) {
    if (a.repeat_index != b.repeat_index) return a.repeat_index < b.repeat_index;
    return a.model_index < b.model_index;
  });
  result.rows = summarize(result.cells);
  write_outputs(dir, result);
  return result;
}

}  // namespace dbmmd::experiment
