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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dbmmd/datamodel.hpp"
#include "dbmmd/error.hpp"

namespace dbmmd::io {

enum class FeatureFormat { Csv, RawF64 };

FeatureFormat parse_format(const std::string& s);
std::string to_string(FeatureFormat f);

/// Feature file contents: one sample per column, optional raw labels.
struct FeatureFile {
  Matrix features;  // l x m
  std::optional<std::vector<std::int64_t>> labels;
  std::string name;
};

class FormatError : public Error {
 public:
  enum class Kind { Io, Malformed, NonFinite, LabelOutOfRange, ShapeMismatch };

  FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// CSV: a header row, then one sample per row; a column named "label" holds
/// non-negative integer classes, all others are features.
///
/// raw-f64: little-endian doubles in row-major order (one sample per row)
/// plus a JSON sidecar "<path>.json" holding {"rows", "cols", "labels"?}.
FeatureFile load_features(const std::filesystem::path& path, FeatureFormat format);

/// Writes `file` in the given format. Values are written so that loading them
/// back reproduces every double bit for bit.
void write_features(const std::filesystem::path& path, const FeatureFile& file,
                    FeatureFormat format);

std::filesystem::path sidecar_path(const std::filesystem::path& raw_path);

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Source and target files turned into a validated pair. Source labels are
/// remapped to 0..C-1; the target's labels, if any, are mapped the same way and
/// returned as ground truth.
struct LoadedPair {
  DomainPair pair;
  std::optional<Labels> target_truth;
  LabelMap label_map;
};

LoadedPair make_loaded_pair(FeatureFile source, FeatureFile target);

}  // namespace dbmmd::io
