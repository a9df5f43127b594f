// Copyright 2026 The diskpca Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace diskpca {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// A dataset or sketch stored column by column: each column is one data
/// point. Storage is either a dense column-major array or compressed sparse
/// columns. Sparse storage is never densified implicitly.
class ColumnMatrix {
 public:
  ColumnMatrix() = default;
  explicit ColumnMatrix(Matrix dense);
  /// Takes ownership of a sparse matrix; it is compressed and explicit
  /// zeros are kept as stored entries.
  explicit ColumnMatrix(SparseMatrix sparse);

  /// Builds sparse storage from per-column (row, value) lists. Rows must be
  /// < n_rows and strictly increasing within each column.
  static ColumnMatrix from_sparse_columns(
      Index n_rows, const std::vector<std::vector<std::pair<Index, double>>>& columns);

  static ColumnMatrix hconcat(std::span<const ColumnMatrix> parts);

  Index rows() const;
  Index cols() const;
  /// Exact count of stored nonzeros (dense storage counts nonzero entries).
  Index nnz() const;
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(storage_); }
  bool empty() const { return rows() == 0 || cols() == 0; }

  const Matrix& dense() const;
  const SparseMatrix& sparse() const;
  Matrix to_dense() const;

  double column_squared_norm(Index j) const;
  double dot_columns(Index i, const ColumnMatrix& other, Index j) const;
  double squared_distance(Index i, const ColumnMatrix& other, Index j) const;
  /// Column j as a dense vector.
  Vector column(Index j) const;

  ColumnMatrix select_columns(std::span<const Index> indices) const;

  /// Same shape, same storage kind, bit-identical stored values.
  bool identical(const ColumnMatrix& other) const;

  std::string shape_string() const;

 private:
  std::variant<Matrix, SparseMatrix> storage_{Matrix()};
};

enum class Transpose { kNo, kYes };

/// op(A)·B with op(A) = A or Aᵀ. The result is dense. Accumulation runs over
/// the inner index in increasing order for every output entry, skipping
/// exact zeros, so sparse and densified inputs give bit-identical output.
Matrix matmul(const ColumnMatrix& a, const ColumnMatrix& b, Transpose ta = Transpose::kNo);

struct SvdResult {
  Matrix U;
  Vector singular_values;  // nonincreasing, nonnegative
  Matrix Vt;
};

/// Top min(k, numerical rank) singular triplets. Each left singular vector
/// is sign-normalized so its largest-magnitude entry is positive.
SvdResult truncated_svd(const Matrix& m, Index k);
SvdResult truncated_svd(const ColumnMatrix& m, Index k);

/// Upper-triangular factor over a subset of numerically independent pivots.
///
/// `R` is rank×rank and upper triangular in pivot order; `full_rows` is the
/// rank×dim factor over the original ordering, so that for a PSD factor
/// full_rowsᵀ·full_rows approximates the whole input and
/// R = full_rows(:, pivots).
struct TriangularFactor {
  Matrix R;
  Matrix full_rows;
  std::vector<Index> pivots;
  std::vector<Index> dropped;
  Index dim = 0;
  double tolerance = 0.0;

  Index rank() const { return static_cast<Index>(pivots.size()); }
};

inline constexpr double kDefaultRankTolerance = 1e-10;

struct QrResult {
  Matrix Q;  // n_rows × rank, orthonormal columns
  TriangularFactor R;
};

/// Thin QR, M(:, pivots) = Q·R. Full-rank inputs keep the natural column
/// order; rank-deficient ones fall back to column pivoting and report the
/// dropped columns. Diagonal of R is nonnegative.
QrResult qr_thin(const Matrix& m, double tol = kDefaultRankTolerance);

/// Pivoted Cholesky of a symmetric PSD matrix: RᵀR = K(pivots, pivots).
/// Pivots whose residual diagonal falls to tol·max-diagonal or below are
/// dropped.
TriangularFactor psd_factor(const Matrix& k, double tol = kDefaultRankTolerance);

/// Solves R·X = B (or Rᵀ·X = B). A B with `rank` rows is taken to be in
/// pivot order; otherwise B must have `dim` rows and its pivot rows are used.
Matrix tri_solve(const TriangularFactor& factor, const Matrix& b, Transpose transpose);

/// Flips column signs so the largest-magnitude entry of each column of `u`
/// is positive; the matching rows of `vt` are flipped too when given.
void normalize_signs(Matrix& u, Matrix* vt = nullptr);

}  // namespace diskpca
