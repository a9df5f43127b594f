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
#include <string>
#include <variant>
#include <vector>

#include "diskpca/matrix.hpp"

namespace diskpca {

/// κ(x, y) = (⟨x, y⟩)^degree.
struct PolynomialKernel {
  int degree = 2;
};

/// κ(x, y) = exp(−‖x − y‖² / 2σ²).
struct GaussianKernel {
  double bandwidth = 1.0;
};

/// Arc-cosine kernel of degree 0, 1 or 2 (Cho & Saul closed form).
struct ArcCosKernel {
  int degree = 1;
};

using KernelSpec = std::variant<PolynomialKernel, GaussianKernel, ArcCosKernel>;

/// Throws ArgumentError if the parameters are outside their domain.
void validate(const KernelSpec& spec);
std::string describe(const KernelSpec& spec);

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y);
double kernel_eval(const KernelSpec& spec, const ColumnMatrix& x, Index i, const ColumnMatrix& y,
                   Index j);

/// K(i, j) = κ(X(:, i), Y(:, j)).
Matrix gram(const KernelSpec& spec, const ColumnMatrix& x, const ColumnMatrix& y);
/// Symmetric Gram matrix of X with itself; exactly symmetric.
Matrix gram(const KernelSpec& spec, const ColumnMatrix& x);
/// κ(x_j, x_j) for every column.
Vector kernel_diagonal(const KernelSpec& spec, const ColumnMatrix& x);

/// Orthonormal basis of span φ(Y), represented implicitly through the
/// kernel trick: Q = φ(Y_retained)·R⁻¹ with RᵀR = K(Y_retained, Y_retained).
struct SpanBasis {
  ColumnMatrix points;
  TriangularFactor factor;
  /// Columns of `points` kept by the factorization, in pivot order.
  std::vector<Index> retained;
  ColumnMatrix retained_points;

  Index rank() const { return factor.rank(); }
};

SpanBasis build_span_basis(const KernelSpec& spec, const ColumnMatrix& y,
                           double tol = kDefaultRankTolerance);

/// Π = Qᵀφ(A) = R⁻ᵀ·K(Y_retained, A), rank × n_cols(A).
Matrix project_coeffs(const SpanBasis& basis, const KernelSpec& spec, const ColumnMatrix& a);

/// r_j = κ(a_j, a_j) − ‖Π(:, j)‖², clamped at zero.
Vector residual_sq_distances(const SpanBasis& basis, const KernelSpec& spec,
                             const ColumnMatrix& a);

/// A rank-k subspace L = φ(points)·coeffs of the feature space.
struct KpcaSolution {
  ColumnMatrix points;
  /// Global column index of each point, when known.
  std::vector<Index> global_indices;
  Matrix coeffs;  // n_cols(points) × k
  Index k = 0;
};

/// Checks LᵀL = I_k, i.e. Cᵀ·K(points, points)·C = I within `tol`.
bool is_orthonormal(const KernelSpec& spec, const KpcaSolution& sol, double tol = 1e-6);

/// ‖φ(A) − LLᵀφ(A)‖²_F = tr(K_AA) − ‖Cᵀ·K(points, A)‖²_F. Throws
/// NumericalError if L is not orthonormal.
double subspace_error(const KernelSpec& spec, const ColumnMatrix& a, const KpcaSolution& sol);

/// σ = factor × median pairwise distance over min(n, max_points) columns
/// drawn uniformly with the given seed. At most `max_pairs` pairs are used;
/// beyond that, pairs are sampled.
double median_bandwidth(const ColumnMatrix& x, double factor, std::uint64_t seed,
                        std::size_t max_points = 20000, std::size_t max_pairs = 2000000);

}  // namespace diskpca
