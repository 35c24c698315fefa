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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "repgeo/kernels.hpp"
#include "support.hpp"

using namespace repgeo;

namespace {

void check_close(double a, double b, double scale) { CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, scale)); }

void compare_tables(const kernels::KernelTable& ref, const kernels::KernelTable& simd) {
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 67u, 1000u}) {
    CAPTURE(n);
    const auto a = test::gaussian_values(n, 100 + n, 0.3, 2.0);
    const auto b = test::gaussian_values(n, 200 + n, -0.1, 1.5);
    double mag = 0.0;
    for (double x : a) mag += x * x;
    check_close(ref.dot(a.data(), b.data(), n), simd.dot(a.data(), b.data(), n), mag + 1.0);
    check_close(ref.sum(a.data(), n), simd.sum(a.data(), n), std::sqrt(mag) * 10 + 1.0);
    check_close(ref.sum_sq_dev(a.data(), n, 0.25), simd.sum_sq_dev(a.data(), n, 0.25), mag + 1.0);
    const auto mr = ref.moment_sums(a.data(), n, 0.1);
    const auto ms = simd.moment_sums(a.data(), n, 0.1);
    check_close(mr.s2, ms.s2, mr.s2);
    check_close(mr.s3, ms.s3, std::abs(mr.s4) + 1.0);
    check_close(mr.s4, ms.s4, mr.s4);

    std::vector<double> y1 = b, y2 = b;
    ref.axpy(-0.7, a.data(), y1.data(), n);
    simd.axpy(-0.7, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) check_close(y1[i], y2[i], std::abs(y1[i]) + 1.0);
    std::vector<double> s1 = a, s2 = a;
    ref.scale(3.5, s1.data(), n);
    simd.scale(3.5, s2.data(), n);
    CHECK(s1 == s2);
  }
}

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
  const auto& t = kernels::scalar_table();
  CHECK(t.isa == kernels::Isa::scalar);
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> y{2.0, 0.0, -1.0, 0.5, 1.0};
  CHECK(t.dot(x.data(), y.data(), 5) == doctest::Approx(2.0 - 3.0 + 2.0 + 5.0));
  CHECK(t.sum(x.data(), 5) == 15.0);
  CHECK(t.sum_sq_dev(x.data(), 5, 3.0) == 10.0);
  const auto m = t.moment_sums(x.data(), 5, 3.0);
  CHECK(m.s2 == 10.0);
  CHECK(m.s3 == 0.0);
  CHECK(m.s4 == 34.0);
}

TEST_CASE("SIMD kernels agree with the scalar reference") {
  const auto* simd = kernels::simd_table();
  if (simd == nullptr) {
    MESSAGE("no SIMD variant on this machine");
    return;
  }
  MESSAGE("comparing against " << kernels::isa_name(simd->isa));
  compare_tables(kernels::scalar_table(), *simd);
}

TEST_CASE("active table is one of the compiled variants") {
  const auto& a = kernels::active();
  CHECK((&a == &kernels::scalar_table() || &a == kernels::simd_table()));
  CHECK(!kernels::isa_name(a.isa).empty());
}
