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

#include "diskpca/matrix.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "diskpca/errors.hpp"

namespace diskpca {

namespace {

std::string shape(Index r, Index c) {
  std::ostringstream os;
  os << r << "x" << c;
  return os.str();
}

}  // namespace

ColumnMatrix::ColumnMatrix(Matrix dense) : storage_(std::move(dense)) {}

ColumnMatrix::ColumnMatrix(SparseMatrix sparse) {
  sparse.makeCompressed();
  storage_ = std::move(sparse);
}

ColumnMatrix ColumnMatrix::from_sparse_columns(
    Index n_rows, const std::vector<std::vector<std::pair<Index, double>>>& columns) {
  if (n_rows > std::numeric_limits<SparseMatrix::StorageIndex>::max()) {
    throw DataError("sparse matrix with " + std::to_string(n_rows) + " rows exceeds the index range");
  }
  SparseMatrix m(n_rows, static_cast<Index>(columns.size()));
  Eigen::VectorXi sizes(static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) sizes(static_cast<Index>(j)) = static_cast<int>(columns[j].size());
  m.reserve(sizes);
  for (std::size_t j = 0; j < columns.size(); ++j) {
    Index prev = -1;
    for (const auto& [row, value] : columns[j]) {
      if (row < 0 || row >= n_rows) {
        throw DataError("sparse column " + std::to_string(j) + ": row index " +
                        std::to_string(row) + " out of range for " +
                        std::to_string(n_rows) + " rows");
      }
      if (row <= prev) {
        throw DataError("sparse column " + std::to_string(j) +
                        ": row indices must be strictly increasing");
      }
      prev = row;
      m.insert(row, static_cast<Index>(j)) = value;
    }
  }
  m.makeCompressed();
  return ColumnMatrix(std::move(m));
}

ColumnMatrix ColumnMatrix::hconcat(std::span<const ColumnMatrix> parts) {
  if (parts.empty()) return ColumnMatrix();
  const Index rows = parts.front().rows();
  Index cols = 0;
  bool any_sparse = false;
  for (const auto& p : parts) {
    if (p.rows() != rows) {
      throw DimensionError("hconcat: row mismatch " + p.shape_string() + " vs " +
                           std::to_string(rows) + " rows");
    }
    cols += p.cols();
    any_sparse = any_sparse || p.is_sparse();
  }
  if (!any_sparse) {
    Matrix out(rows, cols);
    Index at = 0;
    for (const auto& p : parts) {
      out.middleCols(at, p.cols()) = p.dense();
      at += p.cols();
    }
    return ColumnMatrix(std::move(out));
  }
  std::vector<Eigen::Triplet<double>> triplets;
  Index at = 0;
  for (const auto& p : parts) {
    if (p.is_sparse()) {
      const auto& s = p.sparse();
      for (Index j = 0; j < s.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(s, j); it; ++it) {
          triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(at + j), it.value());
        }
      }
    } else {
      const auto& d = p.dense();
      for (Index j = 0; j < d.cols(); ++j) {
        for (Index i = 0; i < d.rows(); ++i) {
          if (d(i, j) != 0.0) {
            triplets.emplace_back(static_cast<int>(i), static_cast<int>(at + j), d(i, j));
          }
        }
      }
    }
    at += p.cols();
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return ColumnMatrix(std::move(m));
}

Index ColumnMatrix::rows() const {
  return std::visit([](const auto& m) -> Index { return m.rows(); }, storage_);
}

Index ColumnMatrix::cols() const {
  return std::visit([](const auto& m) -> Index { return m.cols(); }, storage_);
}

Index ColumnMatrix::nnz() const {
  if (is_sparse()) return sparse().nonZeros();
  const auto& d = dense();
  return static_cast<Index>((d.array() != 0.0).count());
}

const Matrix& ColumnMatrix::dense() const {
  if (is_sparse()) throw ArgumentError("ColumnMatrix: dense() on sparse storage");
  return std::get<Matrix>(storage_);
}

const SparseMatrix& ColumnMatrix::sparse() const {
  if (!is_sparse()) throw ArgumentError("ColumnMatrix: sparse() on dense storage");
  return std::get<SparseMatrix>(storage_);
}

Matrix ColumnMatrix::to_dense() const {
  if (is_sparse()) return Matrix(sparse());
  return dense();
}

double ColumnMatrix::column_squared_norm(Index j) const {
  if (is_sparse()) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(sparse(), j); it; ++it) s += it.value() * it.value();
    return s;
  }
  const auto& d = dense();
  double s = 0.0;
  for (Index i = 0; i < d.rows(); ++i) s += d(i, j) * d(i, j);
  return s;
}

double ColumnMatrix::dot_columns(Index i, const ColumnMatrix& other, Index j) const {
  if (rows() != other.rows()) {
    throw DimensionError("dot_columns: " + shape_string() + " vs " + other.shape_string());
  }
  if (!is_sparse() && !other.is_sparse()) {
    const auto& a = dense();
    const auto& b = other.dense();
    double s = 0.0;
    for (Index r = 0; r < a.rows(); ++r) s += a(r, i) * b(r, j);
    return s;
  }
  if (is_sparse() && other.is_sparse()) {
    SparseMatrix::InnerIterator a(sparse(), i);
    SparseMatrix::InnerIterator b(other.sparse(), j);
    double s = 0.0;
    while (a && b) {
      if (a.row() < b.row()) {
        ++a;
      } else if (b.row() < a.row()) {
        ++b;
      } else {
        s += a.value() * b.value();
        ++a;
        ++b;
      }
    }
    return s;
  }
  const ColumnMatrix& sp = is_sparse() ? *this : other;
  const ColumnMatrix& dn = is_sparse() ? other : *this;
  const Index sc = is_sparse() ? i : j;
  const Index dc = is_sparse() ? j : i;
  double s = 0.0;
  for (SparseMatrix::InnerIterator it(sp.sparse(), sc); it; ++it) {
    s += it.value() * dn.dense()(it.row(), dc);
  }
  return s;
}

double ColumnMatrix::squared_distance(Index i, const ColumnMatrix& other, Index j) const {
  if (rows() != other.rows()) {
    throw DimensionError("squared_distance: " + shape_string() + " vs " + other.shape_string());
  }
  if (!is_sparse() && !other.is_sparse()) {
    const auto& a = dense();
    const auto& b = other.dense();
    double s = 0.0;
    for (Index r = 0; r < a.rows(); ++r) {
      const double diff = a(r, i) - b(r, j);
      s += diff * diff;
    }
    return s;
  }
  if (is_sparse() && other.is_sparse()) {
    // Merge walk over the union of supports.
    SparseMatrix::InnerIterator a(sparse(), i);
    SparseMatrix::InnerIterator b(other.sparse(), j);
    double s = 0.0;
    while (a || b) {
      double diff;
      if (b && (!a || b.row() < a.row())) {
        diff = -b.value();
        ++b;
      } else if (a && (!b || a.row() < b.row())) {
        diff = a.value();
        ++a;
      } else {
        diff = a.value() - b.value();
        ++a;
        ++b;
      }
      s += diff * diff;
    }
    return s;
  }
  return (column(i) - other.column(j)).squaredNorm();
}

Vector ColumnMatrix::column(Index j) const {
  if (is_sparse()) return Vector(sparse().col(j));
  return dense().col(j);
}

ColumnMatrix ColumnMatrix::select_columns(std::span<const Index> indices) const {
  for (Index c : indices) {
    if (c < 0 || c >= cols()) {
      throw DimensionError("select_columns: index " + std::to_string(c) + " out of range for " +
                           shape_string());
    }
  }
  if (!is_sparse()) {
    Matrix out(rows(), static_cast<Index>(indices.size()));
    for (std::size_t k = 0; k < indices.size(); ++k) out.col(static_cast<Index>(k)) = dense().col(indices[k]);
    return ColumnMatrix(std::move(out));
  }
  const auto& s = sparse();
  SparseMatrix out(rows(), static_cast<Index>(indices.size()));
  Index total = 0;
  for (Index c : indices) total += s.col(c).nonZeros();
  out.reserve(total);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.startVec(static_cast<Index>(k));
    for (SparseMatrix::InnerIterator it(s, indices[k]); it; ++it) {
      out.insertBack(it.row(), static_cast<Index>(k)) = it.value();
    }
  }
  out.finalize();
  return ColumnMatrix(std::move(out));
}

bool ColumnMatrix::identical(const ColumnMatrix& other) const {
  if (is_sparse() != other.is_sparse() || rows() != other.rows() || cols() != other.cols()) {
    return false;
  }
  if (!is_sparse()) {
    const auto& a = dense();
    const auto& b = other.dense();
    return std::equal(a.data(), a.data() + a.size(), b.data(),
                      [](double x, double y) { return std::bit_cast<std::uint64_t>(x) ==
                                                      std::bit_cast<std::uint64_t>(y); });
  }
  const auto& a = sparse();
  const auto& b = other.sparse();
  if (a.nonZeros() != b.nonZeros()) return false;
  for (Index j = 0; j < a.outerSize(); ++j) {
    SparseMatrix::InnerIterator x(a, j);
    SparseMatrix::InnerIterator y(b, j);
    for (; x && y; ++x, ++y) {
      if (x.row() != y.row() ||
          std::bit_cast<std::uint64_t>(x.value()) != std::bit_cast<std::uint64_t>(y.value())) {
        return false;
      }
    }
    if (x || y) return false;
  }
  return true;
}

std::string ColumnMatrix::shape_string() const {
  return shape(rows(), cols()) + (is_sparse() ? " (sparse)" : " (dense)");
}

Matrix matmul(const ColumnMatrix& a, const ColumnMatrix& b, Transpose ta) {
  const bool t = ta == Transpose::kYes;
  const Index m = t ? a.cols() : a.rows();
  const Index inner = t ? a.rows() : a.cols();
  if (inner != b.rows()) {
    throw DimensionError(std::string("matmul: inner dimensions disagree: op(A) is ") +
                         shape(m, inner) + ", B is " + shape(b.rows(), b.cols()));
  }
  const Index n = b.cols();
  Matrix c = Matrix::Zero(m, n);
  if (m == 0 || n == 0) return c;

  // Nonzeros of B's column j, in increasing row order.
  auto for_each_b = [&](Index j, auto&& fn) {
    if (b.is_sparse()) {
      for (SparseMatrix::InnerIterator it(b.sparse(), j); it; ++it) fn(it.row(), it.value());
    } else {
      const auto& bd = b.dense();
      for (Index l = 0; l < inner; ++l) {
        const double v = bd(l, j);
        if (v != 0.0) fn(l, v);
      }
    }
  };

  if (!t) {
    for (Index j = 0; j < n; ++j) {
      for_each_b(j, [&](Index l, double bv) {
        if (a.is_sparse()) {
          for (SparseMatrix::InnerIterator it(a.sparse(), l); it; ++it) {
            if (it.value() != 0.0) c(it.row(), j) += it.value() * bv;
          }
        } else {
          const auto& ad = a.dense();
          for (Index i = 0; i < m; ++i) {
            const double av = ad(i, l);
            if (av != 0.0) c(i, j) += av * bv;
          }
        }
      });
    }
    return c;
  }

  // Aᵀ·B: c(i, j) = Σ_l A(l, i)·B(l, j), l increasing.
  const Matrix bd = b.to_dense();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) {
      double s = 0.0;
      if (a.is_sparse()) {
        for (SparseMatrix::InnerIterator it(a.sparse(), i); it; ++it) {
          const double bv = bd(it.row(), j);
          if (it.value() != 0.0 && bv != 0.0) s += it.value() * bv;
        }
      } else {
        const auto& ad = a.dense();
        for (Index l = 0; l < inner; ++l) {
          const double av = ad(l, i);
          const double bv = bd(l, j);
          if (av != 0.0 && bv != 0.0) s += av * bv;
        }
      }
      c(i, j) = s;
    }
  }
  return c;
}

void normalize_signs(Matrix& u, Matrix* vt) {
  for (Index j = 0; j < u.cols(); ++j) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < u.rows(); ++i) {
      const double mag = std::abs(u(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (u.rows() > 0 && u(arg, j) < 0.0) {
      u.col(j) = -u.col(j);
      if (vt != nullptr && j < vt->rows()) vt->row(j) = -vt->row(j);
    }
  }
}

SvdResult truncated_svd(const Matrix& m, Index k) {
  if (k < 1) throw ArgumentError("truncated_svd: k must be >= 1");
  if (m.rows() == 0 || m.cols() == 0) throw ArgumentError("truncated_svd: empty matrix");
  if (!m.allFinite()) throw NumericalError("truncated_svd: non-finite input");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cut = sv.size() > 0 ? sv(0) * static_cast<double>(std::max(m.rows(), m.cols())) *
                                         std::numeric_limits<double>::epsilon()
                                   : 0.0;
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > cut) ++rank;
  const Index keep = std::min(k, rank);
  SvdResult out;
  out.U = svd.matrixU().leftCols(keep);
  out.singular_values = sv.head(keep);
  out.Vt = svd.matrixV().leftCols(keep).transpose();
  normalize_signs(out.U, &out.Vt);
  return out;
}

SvdResult truncated_svd(const ColumnMatrix& m, Index k) { return truncated_svd(m.to_dense(), k); }

QrResult qr_thin(const Matrix& m, double tol) {
  const Index rows = m.rows();
  const Index cols = m.cols();
  if (rows < cols) {
    throw DimensionError("qr_thin: needs n_rows >= n_cols, got " + shape(rows, cols));
  }
  if (!m.allFinite()) throw NumericalError("qr_thin: non-finite input");

  QrResult out;
  out.R.dim = cols;
  out.R.tolerance = tol;

  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  const double max_diag = cols > 0 ? r.diagonal().cwiseAbs().maxCoeff() : 0.0;
  bool full_rank = max_diag > 0.0;
  for (Index i = 0; i < cols && full_rank; ++i) {
    if (std::abs(r(i, i)) <= tol * max_diag) full_rank = false;
  }

  if (full_rank) {
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    for (Index i = 0; i < cols; ++i) {
      if (r(i, i) < 0.0) {
        r.row(i) = -r.row(i);
        q.col(i) = -q.col(i);
      }
    }
    out.Q = std::move(q);
    out.R.R = r;
    out.R.full_rows = r;
    out.R.pivots.resize(static_cast<std::size_t>(cols));
    for (Index i = 0; i < cols; ++i) out.R.pivots[static_cast<std::size_t>(i)] = i;
    return out;
  }

  Eigen::ColPivHouseholderQR<Matrix> cp(m);
  const Matrix rr = cp.matrixR().topRows(cols).triangularView<Eigen::Upper>();
  const double top = cols > 0 ? std::abs(rr(0, 0)) : 0.0;
  Index rank = 0;
  while (rank < cols && std::abs(rr(rank, rank)) > tol * top) ++rank;
  if (rank == 0) throw NumericalError("qr_thin: matrix is numerically zero");
  const auto& perm = cp.colsPermutation().indices();
  Matrix q = cp.householderQ() * Matrix::Identity(rows, rank);
  Matrix rk = rr.topLeftCorner(rank, rank);
  for (Index i = 0; i < rank; ++i) {
    if (rk(i, i) < 0.0) {
      rk.row(i) = -rk.row(i);
      q.col(i) = -q.col(i);
    }
  }
  for (Index i = 0; i < cols; ++i) {
    (i < rank ? out.R.pivots : out.R.dropped).push_back(perm(i));
  }
  out.R.full_rows = q.transpose() * m;
  out.R.R = std::move(rk);
  out.Q = std::move(q);
  return out;
}

TriangularFactor psd_factor(const Matrix& k, double tol) {
  const Index n = k.rows();
  if (k.cols() != n) throw DimensionError("psd_factor: matrix is " + shape(n, k.cols()));
  if (n == 0) throw ArgumentError("psd_factor: empty matrix");
  if (!k.allFinite()) throw NumericalError("psd_factor: non-finite input");
  const double scale = k.cwiseAbs().maxCoeff();
  if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(scale, 1.0)) {
    throw NumericalError("psd_factor: matrix is not symmetric");
  }
  const double max_diag = k.diagonal().maxCoeff();
  for (Index i = 0; i < n; ++i) {
    if (k(i, i) < -tol * std::max(std::abs(max_diag), 1e-300)) {
      throw NumericalError("psd_factor: negative diagonal at pivot " + std::to_string(i) +
                           " (value " + std::to_string(k(i, i)) + "); input is not PSD");
    }
  }

  TriangularFactor f;
  f.dim = n;
  f.tolerance = tol;
  const double cut = tol * max_diag;
  Vector residual = k.diagonal();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  Matrix rows(n, n);
  Index rank = 0;
  while (rank < n) {
    Index p = -1;
    double best = cut;
    for (Index i = 0; i < n; ++i) {
      if (!used[static_cast<std::size_t>(i)] && residual(i) > best) {
        best = residual(i);
        p = i;
      }
    }
    if (p < 0) break;
    const double pivot = std::sqrt(residual(p));
    used[static_cast<std::size_t>(p)] = true;
    // Row `rank` of the factor: (K(p, :) - Σ_prev r_l(p)·r_l(:)) / pivot.
    Vector row = k.row(p).transpose();
    for (Index l = 0; l < rank; ++l) row -= rows(l, p) * rows.row(l).transpose();
    row /= pivot;
    // Entries at earlier pivots are structurally zero.
    for (std::size_t i = 0; i < used.size(); ++i) {
      if (used[i]) row(static_cast<Index>(i)) = 0.0;
    }
    row(p) = pivot;
    rows.row(rank) = row.transpose();
    for (Index i = 0; i < n; ++i) {
      if (!used[static_cast<std::size_t>(i)]) residual(i) -= row(i) * row(i);
    }
    f.pivots.push_back(p);
    ++rank;
  }
  if (rank == 0) throw NumericalError("psd_factor: matrix is numerically zero");
  for (Index i = 0; i < n; ++i) {
    if (!used[static_cast<std::size_t>(i)]) f.dropped.push_back(i);
  }
  f.full_rows = rows.topRows(rank);
  f.R.resize(rank, rank);
  for (Index l = 0; l < rank; ++l) f.R.col(l) = f.full_rows.col(f.pivots[static_cast<std::size_t>(l)]);
  return f;
}

Matrix tri_solve(const TriangularFactor& factor, const Matrix& b, Transpose transpose) {
  const Index r = factor.rank();
  Matrix rhs;
  if (b.rows() == r) {
    rhs = b;
  } else if (b.rows() == factor.dim) {
    rhs.resize(r, b.cols());
    for (Index l = 0; l < r; ++l) rhs.row(l) = b.row(factor.pivots[static_cast<std::size_t>(l)]);
  } else {
    throw DimensionError("tri_solve: right-hand side has " + std::to_string(b.rows()) +
                         " rows; factor has rank " + std::to_string(r) + " over dimension " +
                         std::to_string(factor.dim));
  }
  for (Index i = 0; i < r; ++i) {
    const double d = factor.R(i, i);
    if (d == 0.0 || !std::isfinite(d)) {
      throw NumericalError("tri_solve: zero pivot at position " + std::to_string(i));
    }
  }
  if (transpose == Transpose::kYes) {
    factor.R.transpose().triangularView<Eigen::Lower>().solveInPlace(rhs);
  } else {
    factor.R.triangularView<Eigen::Upper>().solveInPlace(rhs);
  }
  return rhs;
}

}  // namespace diskpca
