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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "repgeo/error.hpp"
#include "repgeo/stats.hpp"
#include "support.hpp"

using namespace repgeo;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<Errc>(-1);
}

std::vector<double> exponential_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> dist(1.0);
  std::vector<double> out(n);
  for (double& v : out) v = dist(gen);
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

}  // namespace

TEST_CASE("standardize two-point sample") {
  const auto s = standardize(std::vector<double>{0.0, 2.0});
  CHECK(s.values == std::vector<double>{-1.0, 1.0});
  CHECK(s.mean == 1.0);
  CHECK(s.sd == 1.0);
  CHECK(code_of([] { standardize(std::vector<double>{3.0, 3.0, 3.0}); }) == Errc::constant_dimension);
}

TEST_CASE("standardize output, inverse and idempotence") {
  const auto raw = test::gaussian_values(1000, 5, 4.0, 3.0);
  const auto s = standardize(raw);
  const double m = mean_of(s.values);
  double v = 0.0;
  for (double x : s.values) v += (x - m) * (x - m);
  CHECK(std::abs(m) <= 1e-10);
  CHECK(std::sqrt(v / s.values.size()) == doctest::Approx(1.0).epsilon(1e-10));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CHECK(s.values[i] * s.sd + s.mean == doctest::Approx(raw[i]).epsilon(1e-13));
  }
  const auto again = standardize(s.values);
  for (std::size_t i = 0; i < raw.size(); ++i) CHECK(std::abs(again.values[i] - s.values[i]) <= 1e-10);
}

TEST_CASE("moments examples") {
  const auto m = moments(std::vector<double>{-1.0, 1.0, -1.0, 1.0});
  CHECK(m.skewness == 0.0);
  CHECK(m.kurtosis == 1.0);

  const auto z = standardize(test::gaussian_values(200000, 17)).values;
  const auto n = moments(z);
  CHECK(std::abs(n.skewness) <= 0.05);
  CHECK(std::abs(n.kurtosis - 3.0) <= 0.1);

  const auto e = moments(standardize(exponential_values(400000, 3)).values);
  CHECK(e.skewness == doctest::Approx(2.0).epsilon(0.05));
  CHECK(e.kurtosis == doctest::Approx(9.0).epsilon(0.1));

  CHECK(code_of([] { moments(std::vector<double>{1.0, 2.0, 3.0}); }) == Errc::not_standardized);
}

TEST_CASE("moment invariants: permutation, negation, kurtosis bounds") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto z = standardize(exponential_values(500, seed)).values;
    const auto base = moments(z);
    CHECK(base.kurtosis >= 1.0);
    CHECK(base.kurtosis >= base.skewness * base.skewness + 1.0 - 1e-12);
    std::reverse(z.begin(), z.end());
    const auto perm = moments(z);
    CHECK(perm.skewness == doctest::Approx(base.skewness).epsilon(1e-12));
    for (double& x : z) x = -x;
    const auto neg = moments(z);
    CHECK(neg.skewness == doctest::Approx(-base.skewness).epsilon(1e-12));
    CHECK(neg.kurtosis == doctest::Approx(base.kurtosis).epsilon(1e-12));
  }
}

TEST_CASE("moment sweep over a synthetic normal corpus") {
  std::vector<ReprMatrix> corpus;
  for (std::uint64_t s = 0; s < 50; ++s) {
    std::vector<std::vector<double>> cols;
    const auto z = test::gaussian_values(16 * 40, 900 + s);
    for (std::size_t i = 0; i < 40; ++i) {
      std::vector<double> c(16);
      for (std::size_t j = 0; j < 16; ++j) c[j] = 0.5 * j - 2.0 + (0.2 + 0.1 * j) * z[i * 16 + j];
      cols.push_back(c);
    }
    corpus.push_back(ReprMatrix::from_columns(cols));
  }
  const auto sweep = per_dimension_moment_sweep(std::span<const ReprMatrix>(corpus), 3);
  CHECK(sweep.per_dim.size() == 16);
  CHECK(std::abs(sweep.skew_mean) < 0.05);
  CHECK(std::abs(sweep.kurt_mean - 3.0) < 0.1);
  const auto serial = per_dimension_moment_sweep(std::span<const ReprMatrix>(corpus), 1);
  CHECK(serial.kurt_mean == sweep.kurt_mean);
  CHECK(serial.skew_std == sweep.skew_std);
  CHECK(sweep.per_dim[3].mean == doctest::Approx(-0.5).epsilon(0.05));
}

TEST_CASE("moment sweep of one dimension equals its MomentReport") {
  const std::vector<std::vector<double>> dims{exponential_values(300, 8)};
  const auto sweep = per_dimension_moment_sweep(dims);
  const auto direct = moments(standardize(dims[0]).values);
  CHECK(sweep.skew_mean == direct.skewness);
  CHECK(sweep.kurt_mean == direct.kurtosis);
  CHECK(sweep.skew_std == 0.0);
}

TEST_CASE("moment sweep names the constant dimension") {
  const std::vector<std::vector<double>> dims{{1, 2, 3}, {4, 4, 4}};
  try {
    per_dimension_moment_sweep(dims);
    FAIL("expected ConstantDimension");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::constant_dimension);
    CHECK(std::string(e.what()).find("dimension 1") != std::string::npos);
  }
}

TEST_CASE("dimension_samples pools rows in corpus order") {
  const std::vector<ReprMatrix> corpus{ReprMatrix::from_columns({{1, 2}, {3, 4}}),
                                       ReprMatrix::from_columns({{5, 6}, {7, 8}, {9, 10}})};
  const auto dims = dimension_samples(corpus);
  CHECK(dims[0] == std::vector<double>{1, 3, 5, 7, 9});
  CHECK(dims[1] == std::vector<double>{2, 4, 6, 8, 10});
}

TEST_CASE("normal_quantile agrees with reference values") {
  // reference: scipy.stats.norm.ppf
  const std::vector<std::pair<double, double>> ref{
      {1e-12, -7.034483825301131},     {1e-06, -4.753424308822899},     {0.001, -3.090232306167813},
      {0.02425, -1.972961051311885},   {0.1, -1.2815515655446004},      {0.3, -0.5244005127080409},
      {0.5, 0.0},                      {0.7, 0.5244005127080407},       {0.9, 1.2815515655446004},
      {0.975, 1.959963984540054},      {0.999, 3.090232306167813},      {0.999999999, 5.997807019601637}};
  for (const auto& [p, x] : ref) {
    CAPTURE(p);
    CHECK(std::abs(normal_quantile(p) - x) <= 1e-9 * std::max(1.0, std::abs(x)));
    CHECK(std::abs(normal_quantile(p) - x) <= 1e-13 * std::max(1.0, std::abs(x)));
  }
  CHECK(normal_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-14));
  CHECK(normal_cdf(2.0) == doctest::Approx(0.9772498680518208).epsilon(1e-14));
  CHECK(code_of([] { normal_quantile(0.0); }) == Errc::invalid_argument);
  CHECK(code_of([] { normal_quantile(1.0); }) == Errc::invalid_argument);
}

TEST_CASE("qq_points examples") {
  const std::size_t k = 50;
  std::vector<double> exact(k);
  for (std::size_t m = 0; m < k; ++m) exact[m] = normal_quantile((m + 0.5) / k);
  const auto qq = qq_points(exact, k);
  for (const auto& [t, e] : qq.points) CHECK(e == doctest::Approx(t).epsilon(1e-12));
  CHECK(qq.correlation == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t m = 1; m < k; ++m) CHECK(qq.points[m].first > qq.points[m - 1].first);

  const auto normal = test::gaussian_values(50000, 21);
  const auto qn = qq_points(normal, 200);
  CHECK(qn.correlation >= 0.999);

  // heavy tails: mixture of N(0,1) and N(0, 25)
  auto heavy = test::gaussian_values(50000, 22);
  for (std::size_t i = 0; i < heavy.size(); i += 10) heavy[i] *= 5.0;
  const auto qh = qq_points(heavy, 200);
  CHECK(qh.correlation < qn.correlation);
  CHECK(qh.points.back().second > qn.points.back().second + 0.5);

  CHECK(code_of([&] { qq_points(normal, 1); }) == Errc::insufficient_data);
  CHECK(code_of([] { qq_points(std::vector<double>{1, 2, 3}, 4); }) == Errc::insufficient_data);
}

TEST_CASE("qq_points subsampling is seeded and affine-invariant in correlation") {
  const auto raw = test::gaussian_values(20000, 33);
  const auto a = qq_points(raw, 100, 0.1, 4);
  const auto b = qq_points(raw, 100, 0.1, 4);
  const auto c = qq_points(raw, 100, 0.1, 5);
  CHECK(a.points == b.points);
  CHECK(a.points != c.points);
  std::vector<double> affine(raw);
  for (double& x : affine) x = 3.0 * x - 7.0;
  CHECK(qq_points(affine, 100, 0.1, 4).correlation == doctest::Approx(a.correlation).epsilon(1e-12));
}

TEST_CASE("offdiag_spread examples") {
  SymMatrix id(4);
  for (std::size_t i = 0; i < 4; ++i) id.set(i, i, 1.0);
  const auto s0 = offdiag_spread(id);
  CHECK(s0.mean == 0.0);
  CHECK(s0.std == 0.0);
  const auto s1 = offdiag_spread(SymMatrix::from_dense(2, std::vector<double>{1, 0.5, 0.5, 1}));
  CHECK(s1.mean == 0.5);
  CHECK(s1.std == 0.0);
}

TEST_CASE("offdiag_spread of independent dimensions is small") {
  std::vector<ReprMatrix> corpus;
  for (std::uint64_t s = 0; s < 20; ++s) corpus.push_back(test::gaussian_matrix(6, 10000, 60 + s));
  const auto spread = offdiag_spread(feature_covariance(corpus, 2));
  // D = 200,000: off-diagonal entries ~ N(0, 1/D)
  CHECK(std::abs(spread.mean) < 3.0 / std::sqrt(200000.0));
  CHECK(spread.std < 4.0 / std::sqrt(200000.0));
}
