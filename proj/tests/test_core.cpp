// Copyright 2026 The Authors.
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

#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "sfw/core.hpp"
#include "sfw/rng.hpp"
#include "test_util.hpp"

using sfw::RngStream;
using sfw::Vector;

TEST_CASE("norms of small vectors") {
  auto n = sfw::ComputeNorms(Vec({3, -4}));
  CHECK(n.l1 == 7);
  CHECK(n.l2 == 5);
  CHECK(n.linf == 4);
  n = sfw::ComputeNorms(Vector::Zero(3));
  CHECK(n.l1 == 0);
  CHECK(n.l2 == 0);
  CHECK(n.linf == 0);
  n = sfw::ComputeNorms(Vec({1, 1, 1, 1}));
  CHECK(n.l1 == 4);
  CHECK(n.l2 == 2);
  CHECK(n.linf == 1);
}

TEST_CASE("finite checks") {
  Vector x = Vec({1, 2});
  CHECK(sfw::AllFinite(x));
  x[1] = std::nan("");
  CHECK_FALSE(sfw::AllFinite(x));
  CHECK_ERRC(sfw::RequireFinite(x, "x"), sfw::Errc::kNumerical);
  CHECK_ERRC(sfw::RequireSameDim(Vec({1}), Vec({1, 2}), "ctx"), sfw::Errc::kDimensionMismatch);
}

TEST_CASE("streams reproduce and split independently of position") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.NextU64() == b.NextU64());

  RngStream fresh(42, 7);
  RngStream used(42, 7);
  for (int i = 0; i < 13; ++i) used.Normal();
  RngStream c1 = fresh.Split(5, 3), c2 = used.Split(5, 3);
  for (int i = 0; i < 20; ++i) CHECK(c1.Uniform() == c2.Uniform());

  RngStream other(42, 8);
  RngStream first(42, 7);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += first.NextU64() == other.NextU64();
  CHECK(equal == 0);
  CHECK(fresh.Split(1).stream_id() != fresh.Split(2).stream_id());
  CHECK(fresh.Split(1, 0).stream_id() != fresh.Split(1, 1).stream_id());
}

TEST_CASE("uniform draws lie in range") {
  RngStream r(1, 1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.Uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double o = r.UniformOpen();
    CHECK(o > 0.0);
    CHECK(o < 1.0);
    CHECK(r.UniformIndex(7) < 7u);
  }
  CHECK_ERRC(r.UniformIndex(0), sfw::Errc::kInvalidArgument);
}

TEST_CASE("normal draws have unit variance") {
  RngStream r(9, 2);
  const int n = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.Normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 3.0 / std::sqrt(n) * 1.5);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("sphere sampler") {
  RngStream r(3, 0);
  std::set<double> seen;
  for (int i = 0; i < 200; ++i) {
    Vector u = sfw::SampleUnitSphere(r, 1);
    CHECK(std::abs(u[0]) == 1.0);
    seen.insert(u[0]);
  }
  CHECK(seen.size() == 2);
  for (int i = 0; i < 1000; ++i) CHECK(std::abs(sfw::SampleUnitSphere(r, 5).norm() - 1.0) <= 1e-12);

  const int n = 100000;
  Vector mean = Vector::Zero(3);
  for (int i = 0; i < n; ++i) {
    Vector u = sfw::SampleUnitSphere(r, 3);
    CHECK(std::abs(u.norm() - 1.0) <= 1e-12);
    mean += u;
  }
  mean /= n;
  // Each coordinate has variance 1/3; the band is 3 sigma and the example's 0.01.
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(mean[i]) < 0.01);
    CHECK(std::abs(mean[i]) < 3.0 * std::sqrt(1.0 / 3.0 / n));
  }
  CHECK_ERRC(sfw::SampleUnitSphere(r, 0), sfw::Errc::kInvalidDimension);
}

TEST_CASE("ball sampler") {
  RngStream r(4, 0);
  for (int i = 0; i < 1000; ++i) {
    Vector v = sfw::SampleUnitBall(r, 1);
    CHECK(v[0] >= -1.0);
    CHECK(v[0] <= 1.0);
  }
  const int n = 100000;
  double mean_norm = 0;
  for (int i = 0; i < n; ++i) {
    Vector v = sfw::SampleUnitBall(r, 2);
    CHECK(v.norm() <= 1.0 + 1e-12);
    mean_norm += v.norm();
  }
  CHECK(std::abs(mean_norm / n - 2.0 / 3.0) < 0.01);
  CHECK_ERRC(sfw::SampleUnitBall(r, 0), sfw::Errc::kInvalidDimension);
}

TEST_CASE("vector hash") {
  CHECK(sfw::HashVector(Vec({1, 2})) == sfw::HashVector(Vec({1, 2})));
  CHECK(sfw::HashVector(Vec({1, 2})) != sfw::HashVector(Vec({2, 1})));
}
