// Copyright 2026 The repgeo Authors
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
#include <span>
#include <vector>

namespace repgeo {

/// Dense real vector whose entries are all finite.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0);
  explicit Vector(std::vector<double> values);
  Vector(std::initializer_list<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  std::span<const double> span() const noexcept { return values_; }
  std::span<double> span() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double norm() const noexcept;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> values_;
};

/// d x L matrix whose columns are token representations. Stored column-major
/// so each representation is contiguous.
class ReprMatrix {
 public:
  ReprMatrix() = default;
  // `column_major` holds d*L finite values; requires d >= 2 and L >= 2.
  ReprMatrix(std::size_t d, std::size_t L, std::vector<double> column_major);
  static ReprMatrix from_columns(const std::vector<std::vector<double>>& columns);

  std::size_t dim() const noexcept { return d_; }
  std::size_t tokens() const noexcept { return L_; }

  double operator()(std::size_t j, std::size_t i) const noexcept { return data_[i * d_ + j]; }
  std::span<const double> column(std::size_t i) const noexcept { return {data_.data() + i * d_, d_}; }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const ReprMatrix&, const ReprMatrix&) = default;

 private:
  std::size_t d_ = 0;
  std::size_t L_ = 0;
  std::vector<double> data_;
};

/// Symmetric n x n matrix. Entries are written pairwise through `set`, so
/// M(i, j) and M(j, i) are always the same stored value.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n);
  // Rejects input that is not exactly symmetric or not finite.
  static SymMatrix from_dense(std::size_t n, std::span<const double> row_major);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double value) noexcept {
    data_[i * n_ + j] = value;
    data_[j * n_ + i] = value;
  }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }

  void multiply(std::span<const double> x, std::span<double> y) const noexcept;
  SymMatrix scaled(double factor) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct EigenPair {
  double value = 0.0;
  Vector vector;
  int iterations = 0;
  bool converged = false;
};

inline constexpr double kDefaultEigenTol = 1e-10;
inline constexpr int kDefaultMaxIter = 10000;
inline constexpr std::size_t kJacobiMaxSize = 512;

double cosine(std::span<const double> u, std::span<const double> v);
inline double cosine(const Vector& u, const Vector& v) { return cosine(u.span(), v.span()); }

// Flips the sign so the first nonzero coordinate is positive.
void canonicalize_sign(std::span<double> v) noexcept;

/// Dominant eigenpair (largest |lambda|) by power iteration from the all-ones
/// start. If the iterate collapses or the Rayleigh quotient stalls before
/// convergence, the start is perturbed once by adding 1e-6 to its first
/// coordinate.
EigenPair top_eigenpair(const SymMatrix& m, double tol = kDefaultEigenTol, int max_iter = kDefaultMaxIter);

/// All eigenpairs by cyclic Jacobi rotations, sorted by descending eigenvalue.
std::vector<EigenPair> full_symmetric_eigen(const SymMatrix& m);

enum class Centering { none, per_column_mean };

// Subtracts from every column its own mean over the d entries.
ReprMatrix center_columns(const ReprMatrix& r);

/// L x L matrix R^T R / (d - 1), optionally after column centering.
SymMatrix token_covariance(const ReprMatrix& r, Centering center);

/// d x d sample covariance of all columns pooled across the corpus
/// (per-dimension mean subtracted, divisor D - 1).
SymMatrix feature_covariance(std::span<const ReprMatrix> corpus, std::size_t jobs = 1);

}  // namespace repgeo
