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


#include "dbmmd/harness/synthetic.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "dbmmd/error.hpp"

namespace dbmmd::synth {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ShiftKind parse_shift(const std::string& s) {
  if (s == "rotation") return ShiftKind::Rotation;
  if (s == "translation") return ShiftKind::Translation;
  if (s == "covariance-scale" || s == "covariance_scale") return ShiftKind::CovarianceScale;
  throw ParameterError("unknown shift kind '" + s + "'");
}

std::string to_string(ShiftKind s) {
  switch (s) {
    case ShiftKind::Rotation: return "rotation";
    case ShiftKind::Translation: return "translation";
    case ShiftKind::CovarianceScale: return "covariance-scale";
  }
  return "?";
}

void SyntheticRecipe::validate() const {
  if (class_count < 1) throw ParameterError("class_count must be >= 1");
  if (per_class < 1) throw ParameterError("per_class must be >= 1");
  if (dim < 1) throw ParameterError("dim must be >= 1");
  if (shift == ShiftKind::Rotation && dim < 2) throw ParameterError("rotation needs dim >= 2");
  if (translation.size() > dim) throw ParameterError("translation longer than dim");
  if (!(noise >= 0.0)) throw ParameterError("noise must be >= 0");
  if (!(scale > 0.0)) throw ParameterError("scale must be > 0");
}

SyntheticData generate_synthetic(const SyntheticRecipe& recipe) {
  recipe.validate();
  Rng rng(recipe.seed);
  const auto dim = static_cast<Eigen::Index>(recipe.dim);
  const int classes = recipe.class_count;
  const auto per = static_cast<Eigen::Index>(recipe.per_class);

  Matrix centers(dim, classes);
  for (int c = 0; c < classes; ++c) {
    const double jitter = (rng.uniform() - 0.5) * 0.6;
    const double theta = 2.0 * std::numbers::pi * c / classes + jitter;
    for (Eigen::Index d = 0; d < dim; ++d) centers(d, c) = rng.normal();
    centers(0, c) = recipe.center_radius * std::cos(theta);
    if (dim > 1) centers(1, c) = recipe.center_radius * std::sin(theta);
  }

  const Eigen::Index m = per * classes;
  Matrix source(dim, m);
  Matrix target(dim, m);
  Labels source_labels(static_cast<std::size_t>(m));
  Labels target_labels(static_cast<std::size_t>(m));

  for (int c = 0; c < classes; ++c) {
    for (Eigen::Index i = 0; i < per; ++i) {
      const Eigen::Index col = c * per + i;
      for (Eigen::Index d = 0; d < dim; ++d) source(d, col) = centers(d, c) + recipe.noise * rng.normal();
      source_labels[static_cast<std::size_t>(col)] = c;
    }
  }

  const double a = recipe.angle_deg * std::numbers::pi / 180.0;
  for (int c = 0; c < classes; ++c) {
    for (Eigen::Index i = 0; i < per; ++i) {
      const Eigen::Index col = c * per + i;
      Vector x(dim);
      for (Eigen::Index d = 0; d < dim; ++d) x(d) = recipe.noise * rng.normal();
      switch (recipe.shift) {
        case ShiftKind::Rotation: {
          x += centers.col(c);
          const double x0 = x(0);
          const double x1 = x(1);
          x(0) = std::cos(a) * x0 - std::sin(a) * x1;
          x(1) = std::sin(a) * x0 + std::cos(a) * x1;
          break;
        }
        case ShiftKind::Translation:
          x += centers.col(c);
          for (std::size_t d = 0; d < recipe.translation.size(); ++d) {
            x(static_cast<Eigen::Index>(d)) += recipe.translation[d];
          }
          break;
        case ShiftKind::CovarianceScale:
          x = centers.col(c) + recipe.scale * x;
          break;
      }
      target.col(col) = x;
      target_labels[static_cast<std::size_t>(col)] = c;
    }
  }

  LabeledDomain src{std::move(source), std::move(source_labels), "synthetic-source"};
  UnlabeledDomain tgt{std::move(target), std::nullopt, "synthetic-target"};
  return SyntheticData{DomainPair(std::move(src), std::move(tgt), classes),
                       std::move(target_labels)};
}

std::uint64_t feature_hash(const Matrix& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto word = std::bit_cast<std::uint64_t>(m(i, j));
      for (int b = 0; b < 8; ++b) {
        h ^= (word >> (8 * b)) & 0xffU;
        h *= 0x100000001b3ULL;
      }
    }
  }
  return h;
}

}  // namespace dbmmd::synth
