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


#include "dbmmd/harness/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace dbmmd::io {

namespace fs = std::filesystem;
using Kind = FormatError::Kind;

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

double parse_value(const std::string& cell, const fs::path& path, std::size_t line) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || cell.empty()) {
    throw FormatError(Kind::Malformed, where(path, line) + "cannot parse '" + cell + "' as a number");
  }
  if (!std::isfinite(v)) {
    throw FormatError(Kind::NonFinite, where(path, line) + "non-finite feature value '" + cell + "'");
  }
  return v;
}

std::int64_t parse_label(const std::string& cell, const fs::path& path, std::size_t line) {
  std::int64_t v = 0;
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), last, v);
  if (ec != std::errc() || ptr != last || cell.empty()) {
    throw FormatError(Kind::Malformed, where(path, line) + "label '" + cell + "' is not an integer");
  }
  if (v < 0 || v > std::numeric_limits<int>::max()) {
    throw FormatError(Kind::LabelOutOfRange, where(path, line) + "label " + cell + " out of range");
  }
  return v;
}

FeatureFile load_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(Kind::Io, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw FormatError(Kind::Malformed, path.string() + ": missing header row");

  std::ptrdiff_t label_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "label") {
      if (label_col >= 0) throw FormatError(Kind::Malformed, path.string() + ": two label columns");
      label_col = static_cast<std::ptrdiff_t>(i);
    }
  }
  const std::size_t n_features = header.size() - (label_col >= 0 ? 1 : 0);

  std::vector<double> values;
  std::vector<std::int64_t> labels;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw FormatError(Kind::Malformed, where(path, line_no) + "expected " +
                                             std::to_string(header.size()) + " cells, found " +
                                             std::to_string(cells.size()));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (static_cast<std::ptrdiff_t>(i) == label_col) {
        labels.push_back(parse_label(cells[i], path, line_no));
      } else {
        values.push_back(parse_value(cells[i], path, line_no));
      }
    }
    ++rows;
  }

  FeatureFile f;
  f.name = path.stem().string();
  f.features.resize(static_cast<Eigen::Index>(n_features), static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < n_features; ++c) {
      f.features(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) =
          values[r * n_features + c];
    }
  }
  if (label_col >= 0) f.labels = std::move(labels);
  return f;
}

FeatureFile load_raw(const fs::path& path) {
  const fs::path side = sidecar_path(path);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(side));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(Kind::Malformed, side.string() + ": " + e.what());
  }
  if (!meta.contains("rows") || !meta.contains("cols") || !meta["rows"].is_number_unsigned() ||
      !meta["cols"].is_number_unsigned()) {
    throw FormatError(Kind::Malformed, side.string() + ": needs unsigned 'rows' and 'cols'");
  }
  const auto rows = meta["rows"].get<std::size_t>();
  const auto cols = meta["cols"].get<std::size_t>();

  const std::string bytes = read_file(path);
  if (bytes.size() != rows * cols * sizeof(double)) {
    throw FormatError(Kind::ShapeMismatch,
                      path.string() + ": " + std::to_string(bytes.size()) + " bytes but sidecar says " +
                          std::to_string(rows) + "x" + std::to_string(cols) + " doubles");
  }

  FeatureFile f;
  f.name = path.stem().string();
  f.features.resize(static_cast<Eigen::Index>(cols), static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      std::uint64_t word = 0;
      std::memcpy(&word, bytes.data() + (r * cols + c) * sizeof(double), sizeof(double));
      if constexpr (std::endian::native == std::endian::big) word = __builtin_bswap64(word);
      const double v = std::bit_cast<double>(word);
      if (!std::isfinite(v)) {
        throw FormatError(Kind::NonFinite, path.string() + ": non-finite value at row " +
                                               std::to_string(r) + ", column " + std::to_string(c));
      }
      f.features(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = v;
    }
  }
  if (meta.contains("labels") && !meta["labels"].is_null()) {
    const auto& jl = meta["labels"];
    if (!jl.is_array() || jl.size() != rows) {
      throw FormatError(Kind::ShapeMismatch, side.string() + ": labels must be an array of length rows");
    }
    std::vector<std::int64_t> labels;
    for (const auto& v : jl) {
      if (!v.is_number_integer()) throw FormatError(Kind::Malformed, side.string() + ": non-integer label");
      const auto l = v.get<std::int64_t>();
      if (l < 0 || l > std::numeric_limits<int>::max()) {
        throw FormatError(Kind::LabelOutOfRange, side.string() + ": label " + std::to_string(l) + " out of range");
      }
      labels.push_back(l);
    }
    f.labels = std::move(labels);
  }
  return f;
}

}  // namespace

FeatureFormat parse_format(const std::string& s) {
  if (s == "csv") return FeatureFormat::Csv;
  if (s == "raw" || s == "raw-f64") return FeatureFormat::RawF64;
  throw ParameterError("unknown feature format '" + s + "' (expected csv or raw-f64)");
}

std::string to_string(FeatureFormat f) { return f == FeatureFormat::Csv ? "csv" : "raw-f64"; }

fs::path sidecar_path(const fs::path& raw_path) {
  fs::path p = raw_path;
  p += ".json";
  return p;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(Kind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(Kind::Io, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw FormatError(Kind::Io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw FormatError(Kind::Io, "cannot format double");
  return std::string(buf, ptr);
}

FeatureFile load_features(const fs::path& path, FeatureFormat format) {
  FeatureFile f = format == FeatureFormat::Csv ? load_csv(path) : load_raw(path);
  if (f.features.cols() == 0) throw FormatError(Kind::Malformed, path.string() + ": no samples");
  return f;
}

void write_features(const fs::path& path, const FeatureFile& file, FeatureFormat format) {
  const Eigen::Index dim = file.features.rows();
  const Eigen::Index m = file.features.cols();
  if (file.labels && file.labels->size() != static_cast<std::size_t>(m)) {
    throw DimensionError("label count differs from sample count");
  }
  if (format == FeatureFormat::Csv) {
    std::string out;
    for (Eigen::Index c = 0; c < dim; ++c) {
      if (c > 0) out += ',';
      out += "f" + std::to_string(c);
    }
    if (file.labels) out += dim > 0 ? ",label" : "label";
    out += '\n';
    for (Eigen::Index r = 0; r < m; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) {
        if (c > 0) out += ',';
        out += format_double(file.features(c, r));
      }
      if (file.labels) {
        if (dim > 0) out += ',';
        out += std::to_string((*file.labels)[static_cast<std::size_t>(r)]);
      }
      out += '\n';
    }
    write_file_atomic(path, out);
    return;
  }

  std::string bytes(static_cast<std::size_t>(dim * m) * sizeof(double), '\0');
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      auto word = std::bit_cast<std::uint64_t>(file.features(c, r));
      if constexpr (std::endian::native == std::endian::big) word = __builtin_bswap64(word);
      std::memcpy(bytes.data() + static_cast<std::size_t>(r * dim + c) * sizeof(double), &word,
                  sizeof(double));
    }
  }
  nlohmann::json meta{{"rows", m}, {"cols", dim}};
  if (file.labels) meta["labels"] = *file.labels;
  write_file_atomic(path, bytes);
  write_file_atomic(sidecar_path(path), meta.dump(2) + "\n");
}

LoadedPair make_loaded_pair(FeatureFile source, FeatureFile target) {
  if (!source.labels) {
    throw FormatError(Kind::Malformed, "source file '" + source.name + "' has no label column");
  }
  LabelMap map = LabelMap::from_labels(*source.labels);
  Labels src_labels = map.apply(*source.labels);
  std::optional<Labels> truth;
  if (target.labels) {
    Labels t;
    t.reserve(target.labels->size());
    for (std::int64_t raw : *target.labels) {
      if (!map.contains(raw)) {
        throw FormatError(Kind::LabelOutOfRange, "target label " + std::to_string(raw) +
                                                     " does not occur in the source domain");
      }
      t.push_back(map.to_dense(raw));
    }
    truth = std::move(t);
  }
  LabeledDomain s{std::move(source.features), std::move(src_labels), source.name};
  UnlabeledDomain u{std::move(target.features), std::nullopt, target.name};
  DomainPair pair(std::move(s), std::move(u), map.size());
  return LoadedPair{std::move(pair), std::move(truth), std::move(map)};
}

}  // namespace dbmmd::io
