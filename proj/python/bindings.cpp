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


#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dbmmd/adapt.hpp"
#include "dbmmd/classify.hpp"
#include "dbmmd/error.hpp"
#include "dbmmd/harness/experiment.hpp"
#include "dbmmd/harness/synthetic.hpp"
#include "dbmmd/mmd.hpp"

namespace py = pybind11;
using dbmmd::Labels;
using dbmmd::Matrix;

namespace {

// Python callers pass one sample per row; the core stores one per column.
dbmmd::DomainPair make_pair(const Matrix& xs, const Labels& ys, const Matrix& xt,
                            std::optional<Labels> yt_pseudo, int class_count) {
  if (class_count <= 0) {
    class_count = ys.empty() ? 0 : *std::max_element(ys.begin(), ys.end()) + 1;
  }
  dbmmd::LabeledDomain s{xs.transpose(), ys, "source"};
  dbmmd::UnlabeledDomain t{xt.transpose(), std::move(yt_pseudo), "target"};
  return dbmmd::DomainPair(std::move(s), std::move(t), class_count);
}

dbmmd::AdaptConfig parse_config(const std::string& config_json) {
  if (config_json.empty()) return {};
  auto cfg = dbmmd::experiment::config_from_json(nlohmann::json::parse(config_json));
  cfg.validate();
  return cfg;
}

py::dict report_to_dict(const dbmmd::adapt::AdaptationReport& r) {
  py::dict d;
  d["model"] = r.model;
  d["predicted"] = r.predicted;
  d["accuracy"] = r.final_accuracy;
  d["fixed_point_iteration"] = r.fixed_point_iteration;
  d["embedding"] = Matrix(r.embedding.transpose());
  d["projection"] = r.projection;
  py::list iters;
  for (const auto& it : r.iterations) {
    py::dict e;
    e["iteration"] = it.iteration;
    e["accuracy"] = it.accuracy;
    e["objective"] = it.objective;
    e["churn"] = it.churn;
    e["pseudo_labels"] = it.pseudo_labels;
    iters.append(e);
  }
  d["iterations"] = iters;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Decision-boundary aware domain adaptation";

  py::register_exception<dbmmd::Error>(m, "DbmmdError", PyExc_ValueError);

  m.def(
      "generate_synthetic",
      [](int class_count, std::size_t per_class, std::size_t dim, const std::string& shift,
         double angle_deg, std::vector<double> translation, double scale, double noise,
         std::uint64_t seed) {
        dbmmd::synth::SyntheticRecipe r;
        r.class_count = class_count;
        r.per_class = per_class;
        r.dim = dim;
        r.shift = dbmmd::synth::parse_shift(shift);
        r.angle_deg = angle_deg;
        r.translation = std::move(translation);
        r.scale = scale;
        r.noise = noise;
        r.seed = seed;
        auto data = dbmmd::synth::generate_synthetic(r);
        return py::make_tuple(Matrix(data.pair.source().features.transpose()),
                              data.pair.source().labels,
                              Matrix(data.pair.target().features.transpose()), data.target_truth,
                              dbmmd::synth::feature_hash(data.pair.packed_features()));
      },
      py::arg("class_count") = 3, py::arg("per_class") = 50, py::arg("dim") = 2,
      py::arg("shift") = "rotation", py::arg("angle_deg") = 30.0,
      py::arg("translation") = std::vector<double>{}, py::arg("scale") = 1.5,
      py::arg("noise") = 1.0, py::arg("seed") = 7,
      "Returns (xs, ys, xt, yt, feature_hash); rows are samples.");

  m.def(
      "mmd_matrices",
      [](const Matrix& xs, const Labels& ys, const Matrix& xt, const Labels& yt_pseudo,
         const std::string& matrix_mode) {
        auto pair = make_pair(xs, ys, xt, yt_pseudo, 0);
        auto all = dbmmd::mmd::build_all(pair, dbmmd::parse_matrix_mode(matrix_mode));
        py::dict d;
        d["m0"] = all.m0;
        d["mc_sum"] = all.mc_sum;
        d["m_st"] = all.m_st;
        d["m_ts"] = all.m_ts;
        return d;
      },
      py::arg("xs"), py::arg("ys"), py::arg("xt"), py::arg("yt_pseudo"),
      py::arg("matrix_mode") = "literal");

  m.def(
      "gen_eig_smallest",
      [](const Matrix& a, const Matrix& b, std::size_t k, double ridge) {
        auto pairs = dbmmd::linalg::gen_eig_smallest(a, b, k, ridge);
        Eigen::VectorXd values(static_cast<Eigen::Index>(pairs.size()));
        for (std::size_t i = 0; i < pairs.size(); ++i) values(static_cast<Eigen::Index>(i)) = pairs[i].value;
        return py::make_tuple(values, dbmmd::linalg::eigvec_matrix(pairs));
      },
      py::arg("a"), py::arg("b"), py::arg("k"), py::arg("ridge") = 0.0);

  m.def(
      "propagate_labels",
      [](const Matrix& laplacian, const Matrix& y0, double mu, std::size_t clamp_rows) {
        auto p = dbmmd::classify::propagate_labels(laplacian, y0, mu, clamp_rows);
        return py::make_tuple(p.raw, p.normalized, p.labels);
      },
      py::arg("laplacian"), py::arg("y0"), py::arg("mu"), py::arg("clamp_rows") = 0);

  m.def("_adapt",
        [](const Matrix& xs, const Labels& ys, const Matrix& xt, const std::string& model,
           const std::string& config_json, std::optional<Labels> yt_truth) {
          auto pair = make_pair(xs, ys, xt, std::nullopt, 0);
          auto cfg = parse_config(config_json);
          auto kind = dbmmd::adapt::ModelKind::parse(model);
          dbmmd::adapt::AdaptationReport r;
          {
            py::gil_scoped_release release;
            r = dbmmd::adapt::run_adaptation(pair, cfg, kind, yt_truth);
          }
          return report_to_dict(r);
        });

  m.def("_run_experiment", [](const std::string& spec_json, const std::string& base_dir) {
    auto spec = dbmmd::experiment::spec_from_json(nlohmann::json::parse(spec_json), base_dir);
    auto result = dbmmd::experiment::run_experiment(spec);
    return py::make_tuple(dbmmd::experiment::render_summary_csv(result.rows), result.any_failed);
  });
}
