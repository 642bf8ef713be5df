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


#include "dbmmd/boundary_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dbmmd/error.hpp"

namespace dbmmd::graph {

AffinityMatrix build_affinity(const Matrix& x, const SigmaMode& sigma_mode,
                              std::size_t neighborhood_p) {
  const Eigen::Index n = x.cols();
  if (n < 2) throw ParameterError("affinity needs at least two samples");
  const double sigma = sigma_mode.median ? linalg::median_distance(x) : sigma_mode.fixed;
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw BandwidthError("affinity bandwidth must be > 0");
  }

  const Matrix d2 = linalg::pairwise_sq_dists(x);
  const double scale = -1.0 / (2.0 * sigma * sigma);

  const auto p = static_cast<Eigen::Index>(neighborhood_p);
  const bool dense = neighborhood_p == 0 || p >= n - 1;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> keep;
  if (!dense) {
    keep.setConstant(n, n, false);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      order.erase(order.begin() + j);
      std::partial_sort(order.begin(), order.begin() + p, order.end(),
                        [&](Eigen::Index a, Eigen::Index b) {
                          if (d2(a, j) != d2(b, j)) return d2(a, j) < d2(b, j);
                          return a < b;
                        });
      for (Eigen::Index q = 0; q < p; ++q) {
        keep(order[static_cast<std::size_t>(q)], j) = true;
        keep(j, order[static_cast<std::size_t>(q)]) = true;
      }
      order.resize(static_cast<std::size_t>(n));
    }
  }

  Matrix w = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      if (!dense && !keep(i, j)) continue;
      const double v = std::exp(d2(i, j) * scale);
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return AffinityMatrix{std::move(w), sigma, dense ? 0 : neighborhood_p};
}

AffinityMatrix constant_affinity(std::size_t n, double value) {
  const auto sz = static_cast<Eigen::Index>(n);
  Matrix w = Matrix::Constant(sz, sz, value);
  w.diagonal().setZero();
  return AffinityMatrix{std::move(w), 0.0, 0};
}

BoundaryGraphs build_graphs(const mmd::ClassMasks& masks, const AffinityMatrix& w,
                            GraphMode mode) {
  const auto n = static_cast<Eigen::Index>(masks.size());
  if (w.entries.rows() != n || w.entries.cols() != n) {
    throw DimensionError("affinity size does not match the packed sample count");
  }
  Matrix cg = Matrix::Zero(n, n);
  Matrix sg = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      if (!masks.cross_domain(ui, uj)) continue;
      const double wij = w.entries(i, j);
      const double inv = 1.0 / std::max(wij, kAffinityFloor);
      if (masks.same_class_cross(ui, uj)) {
        cg(i, j) = mode == GraphMode::Literal ? -inv : inv;
      } else {
        sg(i, j) = mode == GraphMode::Literal ? -inv : wij;
      }
    }
  }
  return BoundaryGraphs{std::move(cg), std::move(sg), mode};
}

Matrix reweight(const Matrix& graph, const Matrix& m, const mmd::ClassMasks& masks,
                bool same_class_mask, GraphMode mode, bool keep_off_mask) {
  if (graph.rows() != m.rows() || graph.cols() != m.cols()) {
    throw DimensionError("graph and MMD matrix sizes differ");
  }
  if (mode == GraphMode::Literal) return graph.cwiseProduct(m);
  const Eigen::Index n = m.rows();
  Matrix out = keep_off_mask ? m : Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      const bool on_mask =
          same_class_mask ? masks.same_class_cross(ui, uj) : masks.diff_class_cross(ui, uj);
      if (on_mask) out(i, j) = graph(i, j) * m(i, j);
    }
  }
  return out;
}

Matrix build_laplacian(const AffinityMatrix& w, bool normalized) {
  const Matrix& a = w.entries;
  const Vector degree = a.rowwise().sum();
  Matrix l = -a;
  l.diagonal() += degree;
  if (!normalized) return l;
  Vector inv_sqrt(degree.size());
  for (Eigen::Index i = 0; i < degree.size(); ++i) {
    inv_sqrt(i) = 1.0 / std::sqrt(std::max(degree(i), kAffinityFloor));
  }
  Matrix out = inv_sqrt.asDiagonal() * l * inv_sqrt.asDiagonal();
  return linalg::symmetrized(out);
}

}  // namespace dbmmd::graph
