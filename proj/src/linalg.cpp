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


#include "dbmmd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dbmmd/error.hpp"

namespace dbmmd::linalg {

Matrix pairwise_sq_dists(const Matrix& x) {
  const Eigen::Index n = x.cols();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = (x.col(i) - x.col(j)).squaredNorm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

double median_distance(const Matrix& x) {
  const Eigen::Index n = x.cols();
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = (x.col(i) - x.col(j)).norm();
      if (v > 0.0) dists.push_back(v);
    }
  }
  if (dists.empty()) {
    throw BandwidthError("median bandwidth is zero: all samples coincide");
  }
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid), dists.end());
  const double upper = dists[mid];
  if (dists.size() % 2 == 1) return upper;
  const double lower = *std::max_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

Matrix kernel_matrix(const Matrix& x, const KernelKind& kind) {
  switch (kind.type) {
    case KernelType::Linear:
      return symmetrized(x.transpose() * x);
    case KernelType::Rbf: {
      if (!(kind.sigma > 0.0) || !std::isfinite(kind.sigma)) {
        throw ParameterError("rbf kernel requires sigma > 0, got " + std::to_string(kind.sigma));
      }
      const double scale = -1.0 / (2.0 * kind.sigma * kind.sigma);
      Matrix k = pairwise_sq_dists(x);
      k = (k * scale).array().exp().matrix();
      return k;
    }
    case KernelType::Poly: {
      if (kind.degree < 1) {
        throw ParameterError("poly kernel requires degree >= 1, got " + std::to_string(kind.degree));
      }
      Matrix g = symmetrized(x.transpose() * x);
      return (g.array() + 1.0).pow(static_cast<double>(kind.degree)).matrix();
    }
  }
  throw ParameterError("unknown kernel type");
}

Matrix centering_matrix(std::size_t n) {
  if (n == 0) throw ParameterError("centering matrix needs n >= 1");
  const auto sz = static_cast<Eigen::Index>(n);
  Matrix h = Matrix::Constant(sz, sz, -1.0 / static_cast<double>(n));
  h.diagonal().array() += 1.0;
  return h;
}

double default_ridge(const Matrix& b) {
  if (b.rows() == 0) return 0.0;
  return 1e-9 * b.trace() / static_cast<double>(b.rows());
}

std::vector<EigPair> gen_eig_smallest(const Matrix& a, const Matrix& b, std::size_t k,
                                      double ridge) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionError("generalized eigenproblem needs square operands of equal size");
  }
  const auto n = static_cast<std::size_t>(a.rows());
  if (k > n) {
    throw ParameterError("requested " + std::to_string(k) + " eigenpairs of a " +
                         std::to_string(n) + "x" + std::to_string(n) + " pencil");
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw ParameterError("ridge must be finite and >= 0");
  }
  if (!all_finite(a) || !all_finite(b)) {
    throw NumericError("generalized eigenproblem operands contain non-finite entries");
  }
  if (k == 0) return {};

  Matrix bp = symmetrized(b);
  bp.diagonal().array() += ridge;
  Eigen::LLT<Matrix> llt(bp);
  if (llt.info() != Eigen::Success) {
    throw NumericError("right-hand operand plus ridge is not positive definite");
  }
  const auto lower = llt.matrixL();

  // c = L^-1 a L^-T
  Matrix y = lower.solve(symmetrized(a));
  Matrix c = lower.solve(y.transpose());
  c = symmetrized(c);

  Eigen::SelfAdjointEigenSolver<Matrix> solver(c);
  if (solver.info() != Eigen::Success) {
    throw NumericError("symmetric eigensolver did not converge");
  }
  const Vector& values = solver.eigenvalues();
  const Matrix& vectors = solver.eigenvectors();

  std::vector<EigPair> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    Vector v = lower.transpose().solve(vectors.col(col));
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v(pivot) < 0.0) v = -v;
    out.push_back({values(col), std::move(v)});
  }
  return out;
}

Matrix eigvec_matrix(const std::vector<EigPair>& pairs) {
  if (pairs.empty()) return Matrix(0, 0);
  Matrix m(pairs.front().vector.size(), static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)) = pairs[i].vector;
  }
  return m;
}

Matrix symmetrized(const Matrix& m) {
  Matrix s = m;
  const Eigen::Index n = m.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace dbmmd::linalg
