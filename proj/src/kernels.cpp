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

#include "diskpca/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "diskpca/errors.hpp"
#include "diskpca/random.hpp"

namespace diskpca {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double int_pow(double base, int exponent) {
  double out = 1.0;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

double arccos_value(int degree, double norm_x, double norm_y, double dot) {
  if (norm_x == 0.0 || norm_y == 0.0) {
    // θ = π/2 by convention; only degree 0 is nonzero.
    return degree == 0 ? 0.5 : 0.0;
  }
  const double cos_t = std::clamp(dot / (norm_x * norm_y), -1.0, 1.0);
  const double theta = std::acos(cos_t);
  const double sin_t = std::sin(theta);
  const double rest = std::numbers::pi - theta;
  double j = 0.0;
  switch (degree) {
    case 0:
      j = rest;
      break;
    case 1:
      j = sin_t + rest * cos_t;
      break;
    default:
      j = 3.0 * sin_t * cos_t + rest * (1.0 + 2.0 * cos_t * cos_t);
      break;
  }
  return int_pow(norm_x * norm_y, degree) * j / std::numbers::pi;
}

// Kernel value from the pairwise primitives. `sq_dist` is only read by the
// Gaussian kernel.
double from_primitives(const KernelSpec& spec, double sq_norm_x, double sq_norm_y, double dot,
                       double sq_dist) {
  return std::visit(
      Overloaded{
          [&](const PolynomialKernel& p) { return int_pow(dot, p.degree); },
          [&](const GaussianKernel& g) {
            return std::exp(-std::max(sq_dist, 0.0) / (2.0 * g.bandwidth * g.bandwidth));
          },
          [&](const ArcCosKernel& a) {
            return arccos_value(a.degree, std::sqrt(sq_norm_x), std::sqrt(sq_norm_y), dot);
          }},
      spec);
}

Vector column_sq_norms(const ColumnMatrix& x) {
  Vector out(x.cols());
  for (Index j = 0; j < x.cols(); ++j) out(j) = x.column_squared_norm(j);
  return out;
}

// Xᵀ·Y for any storage combination.
Matrix cross_products(const ColumnMatrix& x, const ColumnMatrix& y) {
  if (!x.is_sparse() && !y.is_sparse()) return x.dense().transpose() * y.dense();
  if (x.is_sparse() && y.is_sparse()) {
    SparseMatrix p = SparseMatrix(x.sparse().transpose()) * y.sparse();
    return Matrix(p);
  }
  if (x.is_sparse()) return x.sparse().transpose() * y.dense();
  return (y.sparse().transpose() * x.dense()).transpose();
}

void check_rows(const ColumnMatrix& x, const ColumnMatrix& y, const char* what) {
  if (x.rows() != y.rows()) {
    throw DimensionError(std::string(what) + ": dimension mismatch " + x.shape_string() + " vs " +
                         y.shape_string());
  }
}

}  // namespace

void validate(const KernelSpec& spec) {
  std::visit(Overloaded{[](const PolynomialKernel& p) {
                          if (p.degree < 1) throw ArgumentError("polynomial degree must be >= 1");
                        },
                        [](const GaussianKernel& g) {
                          if (!(g.bandwidth > 0.0) || !std::isfinite(g.bandwidth)) {
                            throw ArgumentError("gaussian bandwidth must be positive");
                          }
                        },
                        [](const ArcCosKernel& a) {
                          if (a.degree < 0 || a.degree > 2) {
                            throw ArgumentError("arc-cos degree must be 0, 1 or 2");
                          }
                        }},
             spec);
}

std::string describe(const KernelSpec& spec) {
  std::ostringstream os;
  std::visit(Overloaded{[&](const PolynomialKernel& p) { os << "polynomial(q=" << p.degree << ")"; },
                        [&](const GaussianKernel& g) { os << "gaussian(sigma=" << g.bandwidth << ")"; },
                        [&](const ArcCosKernel& a) { os << "arccos(degree=" << a.degree << ")"; }},
             spec);
  return os.str();
}

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw DimensionError("kernel_eval: dimension mismatch " + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
  }
  validate(spec);
  return from_primitives(spec, x.squaredNorm(), y.squaredNorm(), x.dot(y), (x - y).squaredNorm());
}

double kernel_eval(const KernelSpec& spec, const ColumnMatrix& x, Index i, const ColumnMatrix& y,
                   Index j) {
  check_rows(x, y, "kernel_eval");
  const bool gaussian = std::holds_alternative<GaussianKernel>(spec);
  return from_primitives(spec, x.column_squared_norm(i), y.column_squared_norm(j),
                         x.dot_columns(i, y, j), gaussian ? x.squared_distance(i, y, j) : 0.0);
}

Matrix gram(const KernelSpec& spec, const ColumnMatrix& x, const ColumnMatrix& y) {
  check_rows(x, y, "gram");
  validate(spec);
  Matrix k = cross_products(x, y);
  const Vector nx = column_sq_norms(x);
  const Vector ny = column_sq_norms(y);
  for (Index j = 0; j < k.cols(); ++j) {
    for (Index i = 0; i < k.rows(); ++i) {
      const double dot = k(i, j);
      k(i, j) = from_primitives(spec, nx(i), ny(j), dot, nx(i) + ny(j) - 2.0 * dot);
    }
  }
  return k;
}

Matrix gram(const KernelSpec& spec, const ColumnMatrix& x) {
  validate(spec);
  Matrix k = cross_products(x, x);
  const Vector n = column_sq_norms(x);
  for (Index j = 0; j < k.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      const double dot = k(i, j);
      k(i, j) = from_primitives(spec, n(i), n(j), dot, n(i) + n(j) - 2.0 * dot);
      k(j, i) = k(i, j);
    }
    k(j, j) = from_primitives(spec, n(j), n(j), n(j), 0.0);
  }
  return k;
}

Vector kernel_diagonal(const KernelSpec& spec, const ColumnMatrix& x) {
  validate(spec);
  Vector d(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double n = x.column_squared_norm(j);
    d(j) = from_primitives(spec, n, n, n, 0.0);
  }
  return d;
}

SpanBasis build_span_basis(const KernelSpec& spec, const ColumnMatrix& y, double tol) {
  if (y.cols() == 0) throw ArgumentError("build_span_basis: no points");
  SpanBasis basis;
  basis.points = y;
  try {
    basis.factor = psd_factor(gram(spec, y), tol);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("build_span_basis: no independent points: ") + e.what());
  }
  basis.retained = basis.factor.pivots;
  basis.retained_points = y.select_columns(basis.retained);
  return basis;
}

Matrix project_coeffs(const SpanBasis& basis, const KernelSpec& spec, const ColumnMatrix& a) {
  return tri_solve(basis.factor, gram(spec, basis.retained_points, a), Transpose::kYes);
}

Vector residual_sq_distances(const SpanBasis& basis, const KernelSpec& spec,
                             const ColumnMatrix& a) {
  const Matrix pi = project_coeffs(basis, spec, a);
  Vector r = kernel_diagonal(spec, a) - pi.colwise().squaredNorm().transpose();
  return r.cwiseMax(0.0);
}

bool is_orthonormal(const KernelSpec& spec, const KpcaSolution& sol, double tol) {
  if (sol.coeffs.cols() == 0) return true;
  if (sol.coeffs.rows() != sol.points.cols()) return false;
  const Matrix g = sol.coeffs.transpose() * gram(spec, sol.points) * sol.coeffs;
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() <= tol;
}

double subspace_error(const KernelSpec& spec, const ColumnMatrix& a, const KpcaSolution& sol) {
  const double trace = kernel_diagonal(spec, a).sum();
  if (sol.coeffs.cols() == 0) return trace;
  if (sol.coeffs.rows() != sol.points.cols()) {
    throw DimensionError("subspace_error: coefficient rows " + std::to_string(sol.coeffs.rows()) +
                         " vs " + std::to_string(sol.points.cols()) + " points");
  }
  if (!is_orthonormal(spec, sol)) {
    throw NumericalError("subspace_error: solution basis is not orthonormal (LᵀL != I)");
  }
  const Matrix proj = sol.coeffs.transpose() * gram(spec, sol.points, a);
  return std::max(trace - proj.squaredNorm(), 0.0);
}

double median_bandwidth(const ColumnMatrix& x, double factor, std::uint64_t seed,
                        std::size_t max_points, std::size_t max_pairs) {
  const auto n = static_cast<std::size_t>(x.cols());
  if (n < 2) throw ArgumentError("median_bandwidth: need at least two points");
  Rng rng(lane(seed, "median-bandwidth"));
  std::vector<Index> pick;
  if (n > max_points) {
    for (std::size_t i : rng.sample_without_replacement(n, max_points)) pick.push_back(static_cast<Index>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) pick.push_back(static_cast<Index>(i));
  }
  const std::size_t m = pick.size();
  const std::size_t all_pairs = m * (m - 1) / 2;
  std::vector<double> dist;
  if (all_pairs <= max_pairs) {
    dist.reserve(all_pairs);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        dist.push_back(std::sqrt(x.squared_distance(pick[i], x, pick[j])));
      }
    }
  } else {
    dist.reserve(max_pairs);
    while (dist.size() < max_pairs) {
      const auto i = static_cast<std::size_t>(rng.below(m));
      const auto j = static_cast<std::size_t>(rng.below(m));
      if (i == j) continue;
      dist.push_back(std::sqrt(x.squared_distance(pick[i], x, pick[j])));
    }
  }
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
  double median = dist[mid];
  if (dist.size() % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  if (!(median > 0.0)) throw DataError("median_bandwidth: median pairwise distance is zero");
  return factor * median;
}

}  // namespace diskpca
