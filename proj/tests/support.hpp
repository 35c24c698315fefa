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

// Helpers shared by the unit tests. Oracles here use std::mt19937_64 and
// naive loops so they stay independent of the library's own machinery.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "repgeo/linalg.hpp"

namespace repgeo::test {

inline std::vector<double> gaussian_values(std::size_t n, std::uint64_t seed, double mu = 0.0, double sigma = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(mu, sigma);
  std::vector<double> out(n);
  for (double& v : out) v = dist(gen);
  return out;
}

inline ReprMatrix gaussian_matrix(std::size_t d, std::size_t L, std::uint64_t seed, double mu = 0.0,
                                  double sigma = 1.0) {
  return ReprMatrix(d, L, gaussian_values(d * L, seed, mu, sigma));
}

// Row-major n x n symmetric PSD matrix A A^T with A n x k.
inline std::vector<double> random_psd(std::size_t n, std::size_t k, std::uint64_t seed) {
  const auto a = gaussian_values(n * k, seed);
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += a[i * k + t] * a[j * k + t];
      m[i * n + j] = s;
    }
  }
  return m;
}

inline double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double naive_abs_cos(const std::vector<double>& a, const std::vector<double>& b) {
  return std::abs(naive_dot(a, b)) / std::sqrt(naive_dot(a, a) * naive_dot(b, b));
}

// Plain power iteration on a row-major PSD matrix, long fixed iteration count.
struct OracleEig {
  double value = 0.0;
  std::vector<double> vector;
};

inline OracleEig oracle_top_eigen(const std::vector<double>& m, std::size_t n, int iterations = 20000) {
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<double> v(n), w(n);
  for (double& x : v) x = u(gen);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += m[i * n + j] * v[j];
      w[i] = s;
    }
    const double norm = std::sqrt(naive_dot(w, w));
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    lambda = norm;
  }
  return {lambda, v};
}

inline std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("repgeo_test_" + name)).string();
}

}  // namespace repgeo::test
