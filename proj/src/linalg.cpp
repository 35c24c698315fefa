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

#include "repgeo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "repgeo/error.hpp"
#include "repgeo/kernels.hpp"
#include "repgeo/parallel.hpp"

namespace repgeo {
namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) fail(Errc::invalid_argument, std::string(what) + " contains a non-finite entry");
  }
}

double norm2(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

}  // namespace

Vector::Vector(std::size_t n, double fill) : values_(n, fill) { require_finite(values_, "vector"); }

Vector::Vector(std::vector<double> values) : values_(std::move(values)) { require_finite(values_, "vector"); }

Vector::Vector(std::initializer_list<double> values) : values_(values) { require_finite(values_, "vector"); }

double Vector::norm() const noexcept { return norm2(values_); }

ReprMatrix::ReprMatrix(std::size_t d, std::size_t L, std::vector<double> column_major)
    : d_(d), L_(L), data_(std::move(column_major)) {
  if (d_ < 2 || L_ < 2) {
    fail(Errc::invalid_argument,
         "representation matrix needs d >= 2 and L >= 2, got " + std::to_string(d_) + "x" + std::to_string(L_));
  }
  if (data_.size() != d_ * L_) fail(Errc::length_mismatch, "representation matrix payload size != d*L");
  require_finite(data_, "representation matrix");
}

ReprMatrix ReprMatrix::from_columns(const std::vector<std::vector<double>>& columns) {
  if (columns.empty()) fail(Errc::invalid_argument, "no columns");
  const std::size_t d = columns.front().size();
  std::vector<double> data;
  data.reserve(d * columns.size());
  for (const auto& c : columns) {
    if (c.size() != d) fail(Errc::dimension_mismatch, "columns have different lengths");
    data.insert(data.end(), c.begin(), c.end());
  }
  return ReprMatrix(d, columns.size(), std::move(data));
}

SymMatrix::SymMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

SymMatrix SymMatrix::from_dense(std::size_t n, std::span<const double> row_major) {
  if (row_major.size() != n * n) fail(Errc::length_mismatch, "dense payload size != n*n");
  require_finite(row_major, "symmetric matrix");
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (row_major[i * n + j] != row_major[j * n + i]) {
        fail(Errc::invalid_argument, "matrix is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      m.set(i, j, row_major[i * n + j]);
    }
  }
  return m;
}

void SymMatrix::multiply(std::span<const double> x, std::span<double> y) const noexcept {
  for (std::size_t i = 0; i < n_; ++i) y[i] = kernels::dot(row(i), x);
}

SymMatrix SymMatrix::scaled(double factor) const {
  SymMatrix out = *this;
  kernels::scale(factor, out.data_);
  return out;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    fail(Errc::length_mismatch, "cosine of vectors with lengths " + std::to_string(u.size()) + " and " +
                                    std::to_string(v.size()));
  }
  const double nu = norm2(u);
  const double nv = norm2(v);
  if (nu == 0.0 || nv == 0.0) fail(Errc::zero_vector, "cosine with a zero vector");
  return std::clamp(kernels::dot(u, v) / (nu * nv), -1.0, 1.0);
}

void canonicalize_sign(std::span<double> v) noexcept {
  for (double x : v) {
    if (x == 0.0) continue;
    if (x < 0.0) {
      for (double& y : v) y = -y;
    }
    return;
  }
}

EigenPair top_eigenpair(const SymMatrix& m, double tol, int max_iter) {
  if (!(tol > 0.0)) fail(Errc::invalid_argument, "tolerance must be positive");
  const std::size_t n = m.size();
  if (n == 0) fail(Errc::invalid_argument, "empty matrix");
  bool all_zero = true;
  for (std::size_t i = 0; i < n && all_zero; ++i) {
    for (double x : m.row(i)) {
      if (x != 0.0) {
        all_zero = false;
        break;
      }
    }
  }
  if (all_zero) fail(Errc::degenerate, "power iteration on the zero matrix");

  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> mv(n);
  bool perturbed = false;
  auto perturb = [&] {
    perturbed = true;
    std::fill(v.begin(), v.end(), 1.0);
    v[0] += 1e-6;
    kernels::scale(1.0 / norm2(v), v);
  };

  EigenPair out;
  bool start_hit = false;
  double start_value = 0.0;
  std::vector<double> start_vector;
  double rayleigh_prev = 0.0;
  int stalled = 0;
  for (int it = 1; it <= max_iter; ++it) {
    m.multiply(v, mv);
    const double rayleigh = kernels::dot(v, mv);
    // residual of the current iterate
    double res2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = mv[i] - rayleigh * v[i];
      res2 += r * r;
    }
    out.value = rayleigh;
    out.iterations = it;
    if (std::sqrt(res2) <= tol) {
      if (it == 1 && !perturbed) {
        // The start is itself an eigenvector, possibly not the dominant one.
        start_hit = true;
        start_value = rayleigh;
        start_vector = v;
        perturb();
        continue;
      }
      out.converged = true;
      break;
    }
    const double mv_norm = norm2(mv);
    if (mv_norm == 0.0 || !std::isfinite(mv_norm)) {
      if (perturbed) break;
      perturb();
      continue;
    }
    if (!perturbed && it > 1 && std::abs(rayleigh - rayleigh_prev) <= 1e-15 * std::abs(rayleigh)) {
      if (++stalled >= 3) {
        perturb();
        stalled = 0;
        rayleigh_prev = rayleigh;
        continue;
      }
    } else {
      stalled = 0;
    }
    rayleigh_prev = rayleigh;
    for (std::size_t i = 0; i < n; ++i) v[i] = mv[i] / mv_norm;
  }
  if (start_hit &&
      (!out.converged || std::abs(out.value) <= std::abs(start_value) + 1e-12 * std::max(1.0, std::abs(start_value)))) {
    out.value = start_value;
    out.converged = true;
    v = std::move(start_vector);
  }
  canonicalize_sign(v);
  out.vector = Vector(std::move(v));
  return out;
}

std::vector<EigenPair> full_symmetric_eigen(const SymMatrix& m) {
  const std::size_t n = m.size();
  if (n > kJacobiMaxSize) {
    fail(Errc::size_exceeded, "Jacobi solver limited to n <= " + std::to_string(kJacobiMaxSize) + ", got " +
                                  std::to_string(n));
  }
  // a: working copy (row-major), q: accumulated rotations, columns are eigenvectors
  std::vector<double> a(n * n), q(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(m.row(i).begin(), m.row(i).end(), a.begin() + static_cast<std::ptrdiff_t>(i * n));
    q[i * n + i] = 1.0;
  }
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

  int sweeps = 0;
  for (; sweeps < 100; ++sweeps) {
    double off = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        total += A(i, j) * A(i, j);
        if (i != j) off += A(i, j) * A(i, j);
      }
    }
    if (off == 0.0 || off <= 1e-32 * total) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const double apr = A(p, r);
        if (apr == 0.0) continue;
        const double theta = (A(r, r) - A(p, p)) / (2.0 * apr);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = A(k, p), akr = A(k, r);
          A(k, p) = c * akp - s * akr;
          A(k, r) = s * akp + c * akr;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = A(p, k), ark = A(r, k);
          A(p, k) = c * apk - s * ark;
          A(r, k) = s * apk + c * ark;
        }
        A(p, r) = 0.0;
        A(r, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double qkp = q[k * n + p], qkr = q[k * n + r];
          q[k * n + p] = c * qkp - s * qkr;
          q[k * n + r] = s * qkp + c * qkr;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return A(x, x) > A(y, y); });

  std::vector<EigenPair> pairs;
  pairs.reserve(n);
  for (std::size_t idx : order) {
    std::vector<double> vec(n);
    for (std::size_t k = 0; k < n; ++k) vec[k] = q[k * n + idx];
    canonicalize_sign(vec);
    EigenPair pair;
    pair.value = A(idx, idx);
    pair.vector = Vector(std::move(vec));
    pair.iterations = sweeps;
    pair.converged = true;
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

ReprMatrix center_columns(const ReprMatrix& r) {
  const std::size_t d = r.dim(), L = r.tokens();
  std::vector<double> data(r.data().begin(), r.data().end());
  for (std::size_t i = 0; i < L; ++i) {
    std::span<double> col(data.data() + i * d, d);
    const double mean = kernels::sum(col) / static_cast<double>(d);
    for (double& x : col) x -= mean;
  }
  return ReprMatrix(d, L, std::move(data));
}

SymMatrix token_covariance(const ReprMatrix& r, Centering center) {
  const ReprMatrix centered = center == Centering::per_column_mean ? center_columns(r) : r;
  const std::size_t L = centered.tokens();
  const double inv = 1.0 / static_cast<double>(centered.dim() - 1);
  SymMatrix c(L);
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = i; j < L; ++j) c.set(i, j, kernels::dot(centered.column(i), centered.column(j)) * inv);
  }
  return c;
}

SymMatrix feature_covariance(std::span<const ReprMatrix> corpus, std::size_t jobs) {
  if (corpus.empty()) fail(Errc::insufficient_data, "feature covariance of an empty corpus");
  const std::size_t d = corpus.front().dim();
  std::size_t total = 0;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    if (corpus[s].dim() != d) {
      fail(Errc::dimension_mismatch, "matrix " + std::to_string(s) + " has d=" + std::to_string(corpus[s].dim()) +
                                         ", expected " + std::to_string(d));
    }
    total += corpus[s].tokens();
  }
  if (total < 2) fail(Errc::insufficient_data, "need at least two representations");

  // rows[j] holds dimension j over all pooled representations, mean-shifted
  std::vector<std::vector<double>> rows(d, std::vector<double>(total));
  std::size_t offset = 0;
  for (const auto& m : corpus) {
    for (std::size_t i = 0; i < m.tokens(); ++i) {
      const auto col = m.column(i);
      for (std::size_t j = 0; j < d; ++j) rows[j][offset + i] = col[j];
    }
    offset += m.tokens();
  }
  for (auto& row : rows) {
    const double mean = kernels::sum(row) / static_cast<double>(total);
    for (double& x : row) x -= mean;
  }
  const double inv = 1.0 / static_cast<double>(total - 1);
  SymMatrix cov(d);
  std::vector<std::vector<double>> upper(d);
  parallel_for(d, jobs, [&](std::size_t j) {
    upper[j].resize(d - j);
    for (std::size_t k = j; k < d; ++k) upper[j][k - j] = kernels::dot(rows[j], rows[k]) * inv;
  });
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = j; k < d; ++k) cov.set(j, k, upper[j][k - j]);
  }
  return cov;
}

}  // namespace repgeo
