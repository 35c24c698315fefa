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

// Data-parallel inner loops. Every routine has a scalar reference
// implementation; SIMD variants (AVX2+FMA on x86-64, NEON on AArch64) are
// selected once at startup when the CPU supports them. Set REPGEO_ISA=scalar
// in the environment to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace repgeo::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

struct MomentSums {
  double s2 = 0.0;
  double s3 = 0.0;
  double s4 = 0.0;
};

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  // sum of (x - center)^2
  double (*sum_sq_dev)(const double* x, std::size_t n, double center);
  // sums of (x - center)^k for k = 2, 3, 4
  MomentSums (*moment_sums)(const double* x, std::size_t n, double center);
  void (*scale)(double alpha, double* x, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

// nullptr when no SIMD variant was compiled in or the CPU lacks it.
const KernelTable* simd_table() noexcept;

const KernelTable& active() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }
inline double sum_sq_dev(std::span<const double> x, double center) {
  return active().sum_sq_dev(x.data(), x.size(), center);
}
inline MomentSums moment_sums(std::span<const double> x, double center) {
  return active().moment_sums(x.data(), x.size(), center);
}
inline void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }

}  // namespace repgeo::kernels
