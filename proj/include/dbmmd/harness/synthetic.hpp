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

#include <cstdint>
#include <random>
#include <vector>

#include "dbmmd/datamodel.hpp"

namespace dbmmd::synth {

enum class ShiftKind { Rotation, Translation, CovarianceScale };

ShiftKind parse_shift(const std::string& s);
std::string to_string(ShiftKind s);

struct SyntheticRecipe {
  int class_count = 3;
  std::size_t per_class = 50;  // samples per class in each domain
  std::size_t dim = 2;
  ShiftKind shift = ShiftKind::Rotation;
  double angle_deg = 30.0;          // rotation in the plane of the first two coordinates
  std::vector<double> translation;  // padded with zeros to `dim`
  double scale = 1.5;               // covariance-scale factor for the target noise
  double noise = 1.0;               // per-coordinate standard deviation
  double center_radius = 3.0;
  std::uint64_t seed = 7;

  void validate() const;
};

struct SyntheticData {
  DomainPair pair;      // target carries no pseudo-labels
  Labels target_truth;  // evaluation only
};

/// Gaussian classes around seeded centres on a ring (radius center_radius,
/// angles 2 pi c / C plus a seeded jitter; extra coordinates drawn N(0, 1)).
/// Source samples are drawn around the centres; target samples are drawn
/// afresh and then shifted. Output is identical for identical recipes on any
/// platform: the generator only uses mt19937_64 bits and its own transforms.
SyntheticData generate_synthetic(const SyntheticRecipe& recipe);

/// FNV-1a over the little-endian bytes of the matrix entries (column-major).
std::uint64_t feature_hash(const Matrix& m);

/// Platform-independent uniform and normal draws on top of mt19937_64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double normal();   // Box-Muller, one draw per call

 private:
  std::mt19937_64 engine_;
};

}  // namespace dbmmd::synth
