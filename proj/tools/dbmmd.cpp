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


#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dbmmd/error.hpp"
#include "dbmmd/harness/experiment.hpp"
#include "dbmmd/harness/io.hpp"
#include "dbmmd/harness/synthetic.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitFailedCell = 1;
constexpr int kExitConfig = 2;

struct ConfigFlags {
  std::optional<std::size_t> k;
  std::optional<double> lambda;
  std::optional<double> mu;
  std::optional<std::size_t> t;
  std::optional<std::string> kernel;
  std::optional<double> kernel_sigma;
  std::optional<int> kernel_degree;
  std::optional<std::string> sigma;
  std::optional<std::size_t> neighborhood_p;
  std::optional<std::string> graph_mode;
  std::optional<std::string> matrix_mode;
  std::optional<bool> keep_off_mask;
  std::optional<bool> normalized_laplacian;
  std::optional<double> meda_alpha;
  std::optional<double> meda_rho;
  std::optional<double> meda_eta;
  std::optional<std::uint64_t> seed;
  std::optional<bool> unit_affinity;

  void attach(CLI::App* app) {
    app->add_option("--k", k, "Subspace dimension");
    app->add_option("--lambda", lambda, "Projection regularizer");
    app->add_option("--mu", mu, "Label-propagation fidelity weight");
    app->add_option("--T", t, "Maximum number of iterations");
    app->add_option("--kernel", kernel, "primal, linear, rbf or poly");
    app->add_option("--kernel-sigma", kernel_sigma, "RBF kernel width (<= 0: median heuristic)");
    app->add_option("--kernel-degree", kernel_degree, "Polynomial kernel degree");
    app->add_option("--sigma", sigma, "Graph affinity width: median or a positive number");
    app->add_option("--neighborhood-p", neighborhood_p, "Laplacian neighbourhood size (0: dense)");
    app->add_option("--graph-mode", graph_mode, "literal or spirit");
    app->add_option("--matrix-mode", matrix_mode, "literal or rank_one_sum");
    app->add_option("--keep-off-mask", keep_off_mask, "Keep MMD entries outside the graph masks");
    app->add_option("--normalized-laplacian", normalized_laplacian, "Use the normalized Laplacian");
    app->add_option("--meda-alpha", meda_alpha, "MEDA MMD weight");
    app->add_option("--meda-rho", meda_rho, "MEDA manifold weight");
    app->add_option("--meda-eta", meda_eta, "MEDA RKHS norm weight");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--unit-affinity", unit_affinity, "Use W = 1 for the boundary graphs");
  }

  void overlay(json& cfg) const {
    auto put = [&](const char* key, const auto& v) {
      if (v) cfg[key] = *v;
    };
    put("k", k);
    put("lambda", lambda);
    put("mu", mu);
    put("T", t);
    put("kernel", kernel);
    put("kernel_sigma", kernel_sigma);
    put("kernel_degree", kernel_degree);
    if (sigma) {
      if (*sigma == "median") {
        cfg["sigma"] = "median";
      } else {
        try {
          cfg["sigma"] = std::stod(*sigma);
        } catch (const std::exception&) {
          throw dbmmd::ParameterError("--sigma expects 'median' or a number");
        }
      }
    }
    put("neighborhood_p", neighborhood_p);
    put("graph_mode", graph_mode);
    put("matrix_mode", matrix_mode);
    put("keep_off_mask", keep_off_mask);
    put("normalized_laplacian", normalized_laplacian);
    put("meda_alpha", meda_alpha);
    put("meda_rho", meda_rho);
    put("meda_eta", meda_eta);
    put("seed", seed);
    put("unit_affinity", unit_affinity);
  }
};

struct RecipeFlags {
  dbmmd::synth::SyntheticRecipe recipe;
  std::string shift = "rotation";

  void attach(CLI::App* app) {
    app->add_option("--classes", recipe.class_count, "Number of classes")->capture_default_str();
    app->add_option("--per-class", recipe.per_class, "Samples per class and domain")->capture_default_str();
    app->add_option("--dim", recipe.dim, "Feature dimension")->capture_default_str();
    app->add_option("--shift", shift, "rotation, translation or covariance-scale")->capture_default_str();
    app->add_option("--angle", recipe.angle_deg, "Rotation angle in degrees")->capture_default_str();
    app->add_option("--translation", recipe.translation, "Translation vector");
    app->add_option("--scale", recipe.scale, "Covariance scale factor")->capture_default_str();
    app->add_option("--noise", recipe.noise, "Per-coordinate noise deviation")->capture_default_str();
    app->add_option("--radius", recipe.center_radius, "Radius of the class-centre ring")->capture_default_str();
    app->add_option("--seed", recipe.seed, "Random seed")->capture_default_str();
  }

  dbmmd::synth::SyntheticRecipe resolved() const {
    auto r = recipe;
    r.shift = dbmmd::synth::parse_shift(shift);
    return r;
  }
};

int cmd_synth(const RecipeFlags& flags, const std::string& out_dir, const std::string& format) {
  const auto recipe = flags.resolved();
  const auto fmt = dbmmd::io::parse_format(format);
  const auto data = dbmmd::synth::generate_synthetic(recipe);
  const std::string ext = fmt == dbmmd::io::FeatureFormat::Csv ? ".csv" : ".f64";

  auto widen = [](const dbmmd::Labels& l) { return std::vector<std::int64_t>(l.begin(), l.end()); };
  dbmmd::io::FeatureFile src{data.pair.source().features, widen(data.pair.source().labels), "source"};
  dbmmd::io::FeatureFile tgt{data.pair.target().features, widen(data.target_truth), "target"};
  const fs::path dir(out_dir);
  dbmmd::io::write_features(dir / ("source" + ext), src, fmt);
  dbmmd::io::write_features(dir / ("target" + ext), tgt, fmt);

  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(
                    dbmmd::synth::feature_hash(data.pair.packed_features())));
  std::cout << "wrote " << (dir / ("source" + ext)).string() << " and "
            << (dir / ("target" + ext)).string() << "\nfeature hash " << hash << "\n";
  return kExitOk;
}

void print_result(const dbmmd::experiment::ExperimentResult& result) {
  std::cout << dbmmd::experiment::render_summary_markdown(result.rows);
  for (const auto& c : result.cells) {
    if (c.failed) {
      std::cerr << "cell " << c.model << " repeat " << c.repeat_index << " failed: " << c.error << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision-boundary aware domain adaptation experiments"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "Write a synthetic source/target pair");
  RecipeFlags synth_flags;
  synth_flags.attach(synth);
  std::string synth_out = ".";
  std::string synth_format = "csv";
  synth->add_option("-o,--out-dir", synth_out, "Output directory")->capture_default_str();
  synth->add_option("--format", synth_format, "csv or raw-f64")->capture_default_str();

  auto* run = app.add_subcommand("run", "Run an experiment spec");
  std::string spec_path;
  std::vector<std::string> models;
  std::string output_dir;
  std::optional<std::size_t> repeat;
  std::string source_path;
  std::string target_path;
  std::string format;
  bool synthetic = false;
  bool dump_embeddings = false;
  ConfigFlags cfg_flags;
  run->add_option("spec", spec_path, "Experiment spec (JSON)");
  run->add_option("--models", models, "Model list, e.g. JDA CDDA+DB");
  run->add_option("-o,--output-dir", output_dir, "Output directory");
  run->add_option("--repeat", repeat, "Number of seeded repeats");
  run->add_option("--source", source_path, "Source feature file");
  run->add_option("--target", target_path, "Target feature file");
  run->add_option("--format", format, "csv or raw-f64");
  run->add_flag("--synthetic", synthetic, "Use the default synthetic recipe");
  run->add_flag("--dump-embeddings", dump_embeddings, "Write embeddings under embeddings/");
  cfg_flags.attach(run);

  auto* report = app.add_subcommand("report", "Re-render summaries from stored reports");
  std::string report_dir;
  report->add_option("dir", report_dir, "Experiment output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_flags, synth_out, synth_format);

    if (run->parsed()) {
      json j = json::object();
      fs::path base;
      if (!spec_path.empty()) {
        j = json::parse(dbmmd::io::read_file(spec_path));
        base = fs::path(spec_path).parent_path();
      }
      if (!models.empty()) j["models"] = models;
      if (!output_dir.empty()) j["output_dir"] = fs::absolute(output_dir).string();
      if (repeat) j["repeat"] = *repeat;
      if (dump_embeddings) j["dump_embeddings"] = true;
      if (synthetic) {
        j["dataset"] = json{{"synthetic", json::object()}};
      } else if (!source_path.empty() || !target_path.empty()) {
        j["dataset"] = json{{"source", fs::absolute(source_path).string()},
                            {"target", fs::absolute(target_path).string()}};
      }
      if (!format.empty()) {
        if (!j.contains("dataset")) throw dbmmd::ParameterError("--format needs a dataset");
        j["dataset"]["format"] = format;
      }
      if (!j.contains("config")) j["config"] = json::object();
      cfg_flags.overlay(j["config"]);
      const auto spec = dbmmd::experiment::spec_from_json(j, base);
      const auto result = dbmmd::experiment::run_experiment(spec);
      print_result(result);
      return result.any_failed ? kExitFailedCell : kExitOk;
    }

    const auto result = dbmmd::experiment::rerender_reports(report_dir);
    print_result(result);
    return result.any_failed ? kExitFailedCell : kExitOk;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dbmmd::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
