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

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace dbmmd {

/// Dense real matrix. Feature matrices store one sample per column with the
/// source samples first, followed by the target samples.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

enum class KernelType { Linear, Rbf, Poly };

struct KernelKind {
  KernelType type = KernelType::Linear;
  double sigma = 1.0;  // rbf bandwidth
  int degree = 2;      // poly degree, k(x,y) = (x.y + 1)^degree

  static KernelKind linear() { return {KernelType::Linear, 1.0, 2}; }
  static KernelKind rbf(double sigma) { return {KernelType::Rbf, sigma, 2}; }
  static KernelKind poly(int degree) { return {KernelType::Poly, 1.0, degree}; }
};

struct EigPair {
  double value = 0.0;
  Vector vector;
};

/// Squared Euclidean distances between all pairs of columns of `x`.
/// The result is exactly symmetric with a zero diagonal.
Matrix pairwise_sq_dists(const Matrix& x);

/// Median of the nonzero pairwise Euclidean distances between the columns
/// of `x`. Throws BandwidthError when every column coincides.
double median_distance(const Matrix& x);

/// Gram matrix of the columns of `x` under the given kernel.
Matrix kernel_matrix(const Matrix& x, const KernelKind& kind);

/// H = I - (1/n) 11^T.
Matrix centering_matrix(std::size_t n);

/// Ridge used by default on the right-hand pencil operand: 1e-9 * trace(b) / n.
double default_ridge(const Matrix& b);

/// Smallest-k solutions of a v = lambda (b + ridge I) v for symmetric `a` and
/// symmetric positive semidefinite `b`.
///
/// The pencil is reduced to a standard symmetric problem through the Cholesky
/// factor of b + ridge I. Pairs are returned in ascending eigenvalue order;
/// every vector is normalized to v^T (b + ridge I) v = 1 and its largest
/// magnitude component (lowest index on ties) is made positive. Repeated
/// eigenvalues keep the order of the reduced problem, so only the spanned
/// subspace is meaningful across platforms.
///
/// Throws ParameterError for k > n or ridge < 0, DimensionError for shape
/// mismatches and NumericError when b + ridge I is not positive definite.
std::vector<EigPair> gen_eig_smallest(const Matrix& a, const Matrix& b, std::size_t k,
                                      double ridge);

/// Columns of the eigenpairs packed into an n x k matrix.
Matrix eigvec_matrix(const std::vector<EigPair>& pairs);

/// Copy of `m` with (m + m^T) / 2 written into both triangles.
Matrix symmetrized(const Matrix& m);

bool all_finite(const Matrix& m);

}  // namespace linalg
}  // namespace dbmmd
