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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "oracles.hpp"
#include "sfw/problems.hpp"
#include "sfw/set_function.hpp"
#include "test_util.hpp"

using sfw::Matrix;
using sfw::RngStream;
using sfw::Sample;
using sfw::Vector;

namespace {

Vector RandomIn01(RngStream& r, int d, double lo = 0.0, double hi = 1.0) {
  Vector x(d);
  for (int i = 0; i < d; ++i) x[i] = lo + (hi - lo) * r.Uniform();
  return x;
}

std::vector<sfw::SetFunctionPtr> MonotoneFamily(RngStream& r, int d) {
  return {sfw::FacilityLocation::Random(6, d, r), sfw::Coverage::Random(5, d, r),
          sfw::ConcaveModular::Random(6, d, r), sfw::LogDet::Random(d, 3, r),
          std::make_shared<sfw::Modular>(RandomIn01(r, d))};
}

double SupAbs(const sfw::SetFunction& f) {
  double m = 0.0;
  for (std::uint64_t mask = 0; mask < (1ULL << f.ground_size()); ++mask)
    m = std::max(m, std::abs(f.EvalMask(mask)));
  return m;
}

std::string WriteTemp(const std::string& name, const std::string& body) {
  const std::string path = "/tmp/sfw_test_" + name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("quadratic oracle") {
  const Vector target = Vec({0.2, -0.1, 0.4});
  sfw::QuadraticProblem p(target, 0.5);
  CHECK(p.mode() == sfw::ProblemMode::kOblivious);
  Sample zero;
  zero.noise = Vector::Zero(3);
  CHECK(p.Gradient(target, zero).norm() == 0.0);
  CHECK(p.HessianVec(Vec({1, 2, 3}), zero, Vec({1, 0, 0})) == Vec({1, 0, 0}));

  RngStream r(1, 0);
  const Vector x = Vec({0.5, 0.5, -0.2});
  Vector mean = Vector::Zero(3);
  const int n = 40000;
  for (int i = 0; i < n; ++i) mean += p.Gradient(x, p.SampleZ(x, r));
  mean /= n;
  for (int i = 0; i < 3; ++i) CHECK(std::abs(mean[i] - (x - target)[i]) < 3.5 * 0.5 / std::sqrt(n));
}

TEST_CASE("modular multilinear extension") {
  auto f = std::make_shared<sfw::Modular>(Vector::Ones(3));
  sfw::MultilinearProblem p(f, 0.05);
  const Vector x = Vec({0.2, 0.5, 0.9});
  CHECK(p.ExactValue(x) == doctest::Approx(1.6));
  CHECK((p.ExactGradient(x) - Vector::Ones(3)).norm() < 1e-12);
  auto ex = sfw::MultilinearExact(*f, x);
  CHECK(ex.hess.cwiseAbs().maxCoeff() < 1e-12);

  sfw::Modular two(Vector::Ones(2));
  auto e2 = sfw::MultilinearExact(two, Vec({0.3, 0.7}));
  CHECK(e2.value == doctest::Approx(1.0));
  CHECK((e2.grad - Vector::Ones(2)).norm() < 1e-12);
  CHECK(e2.hess.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("coverage with one topic") {
  Matrix probs(1, 2);
  probs << 1, 1;
  sfw::Coverage f(probs, Vec({1.0}));
  const Vector x = Vec({0.5, 0.5});
  CHECK(sfw::MultilinearExact(f, x).value == doctest::Approx(0.75));
  CHECK(*f.MultilinearValue(x) == doctest::Approx(0.75));
  CHECK(oracle::MultilinearValue(f, x) == doctest::Approx(0.75));
}

TEST_CASE("multilinear exact against enumeration and finite differences") {
  RngStream r(2, 0);
  for (int trial = 0; trial < 5; ++trial) {
    auto f = sfw::TableSetFunction::Random(8, 1.0, r);
    const Vector x = RandomIn01(r, 8, 0.05, 0.95);
    auto ex = sfw::MultilinearExact(*f, x);
    CHECK(ex.value == doctest::Approx(oracle::MultilinearValue(*f, x)).epsilon(1e-12));
    CHECK((ex.grad - oracle::MultilinearGradFd(*f, x)).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK((ex.hess - oracle::MultilinearHessian(*f, x)).lpNorm<Eigen::Infinity>() < 1e-10);
  }
  for (const auto& f : MonotoneFamily(r, 7)) {
    const Vector x = RandomIn01(r, 7);
    if (auto closed = f->MultilinearValue(x)) {
      CHECK(*closed == doctest::Approx(oracle::MultilinearValue(*f, x)).epsilon(1e-12));
    }
  }
  auto big = sfw::FacilityLocation::Random(3, 21, r);
  CHECK_ERRC(sfw::MultilinearOracle(*big), sfw::Errc::kBudget);
}

TEST_CASE("gradient and Hessian bounds of multilinear extensions") {
  RngStream r(3, 0);
  for (int k = 0; k < 20; ++k) {
    const int d = 2 + static_cast<int>(r.UniformIndex(9));
    auto f = sfw::TableSetFunction::Random(d, 1.0 + 4.0 * r.Uniform(), r);
    const double M = SupAbs(*f);
    for (int j = 0; j < 20; ++j) {
      const Vector x = RandomIn01(r, d);
      const Vector g = oracle::MultilinearGradFd(*f, x);
      const Matrix h = oracle::MultilinearHessian(*f, x);
      CHECK(g.norm() <= 2 * M * std::sqrt(d) + 1e-9);
      Eigen::JacobiSVD<Matrix> svd(h);
      CHECK(svd.singularValues()(0) <= 4 * M * std::sqrt(d * (d - 1.0)) + 1e-9);
    }
  }
}

TEST_CASE("monotone instances: chains and the DR property") {
  RngStream r(4, 0);
  for (const auto& f : MonotoneFamily(r, 6)) {
    CHECK(f->monotone());
    CHECK(f->EvalMask(0) >= 0.0);
    for (int probe = 0; probe < 1000; ++probe) {
      std::vector<int> perm(6);
      std::iota(perm.begin(), perm.end(), 0);
      for (int i = 5; i > 0; --i) std::swap(perm[i], perm[r.UniformIndex(i + 1)]);
      std::uint64_t mask = 0;
      double prev = f->EvalMask(0);
      for (int e : perm) {
        mask |= 1ULL << e;
        const double cur = f->EvalMask(mask);
        CHECK(cur >= prev - 1e-12);
        prev = cur;
      }
    }
    sfw::MultilinearOracle ml(*f);
    for (int pair = 0; pair < 100; ++pair) {
      const Vector x = RandomIn01(r, 6, 0.0, 0.6);
      const Vector y = x + RandomIn01(r, 6, 0.0, 0.4);
      CHECK(ml.Value(x) <= ml.Value(y) + 1e-12);
      CHECK(((ml.Gradient(x) - ml.Gradient(y)).array() >= -1e-12).all());
    }
  }
}

TEST_CASE("multilinear sampling law") {
  auto f = std::make_shared<sfw::Modular>(Vector::Ones(4));
  sfw::MultilinearProblem p(f, 0.05);
  RngStream r(5, 0);
  const Vector near_one = Vector::Constant(4, 1.0 - 1e-9);
  int all = 0;
  for (int i = 0; i < 1000; ++i) {
    auto z = p.SampleZ(near_one, r);
    all += std::all_of(z.subset.begin(), z.subset.end(), [](auto b) { return b == 1; });
  }
  CHECK(all >= 999);

  sfw::MultilinearProblem p2(std::make_shared<sfw::Modular>(Vector::Ones(2)), 0.05);
  const int n = 100000;
  int both = 0;
  for (int i = 0; i < n; ++i) {
    auto z = p2.SampleZ(Vec({0.5, 0.5}), r);
    both += z.subset[0] && z.subset[1];
  }
  CHECK(std::abs(static_cast<double>(both) / n - 0.25) < 0.005);

  CHECK_ERRC(p.SampleZ(Vec({0.5, 1.2, 0.5, 0.5}), r), sfw::Errc::kDomain);
  auto z = p.SampleZ(Vec({0.5, 0.5, 0.5, 0.5}), r);
  CHECK(p.Gradient(Vec({0.3, 0.3, 0.3, 0.3}), z).norm() == 0.0);
}

TEST_CASE("multilinear log-density derivatives") {
  auto f = std::make_shared<sfw::Modular>(Vector::Ones(1));
  sfw::MultilinearProblem one(f, 0.05);
  Sample z;
  z.subset = {1};
  CHECK(one.LogpHessVec(Vec({0.5}), z, Vec({1})) == Vec({-4}));

  RngStream r(6, 0);
  auto fl = sfw::FacilityLocation::Random(4, 5, r);
  sfw::MultilinearProblem p(fl, 0.05);
  for (int k = 0; k < 50; ++k) {
    const Vector x = RandomIn01(r, 5, 0.1, 0.9);
    const Sample s = p.SampleZ(x, r);
    auto logp = [&](const Vector& y) { return p.LogDensity(y, s); };
    CHECK((p.LogpGrad(x, s) - oracle::FiniteDiffGrad(logp, x)).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK((s.logp_grad - p.LogpGrad(x, s)).norm() == 0.0);
    const Vector u = RandomIn01(r, 5, -1, 1);
    auto dir = [&](const Vector& y) { return p.LogpGrad(y, s).dot(u); };
    CHECK((p.LogpHessVec(x, s, u) - oracle::FiniteDiffGrad(dir, x)).lpNorm<Eigen::Infinity>() <
          1e-5);
  }
}

TEST_CASE("logistic regression oracle") {
  Matrix a(1, 2);
  a << 1.0, -2.0;
  sfw::LogisticL1Problem p(a, Vec({1.0}));
  const Sample z = p.Component(0);
  const Vector x = Vec({0.3, 0.4});
  auto val = [&](const Vector& y) { return p.Value(y, z); };
  // Hand value: log(1 + exp(-(0.3 - 0.8))) = log(1 + e^{0.5}).
  CHECK(p.Value(x, z) == doctest::Approx(std::log1p(std::exp(0.5))));
  CHECK((p.Gradient(x, z) - oracle::FiniteDiffGrad(val, x)).norm() < 1e-6);
  auto gdir = [&](const Vector& y) { return p.Gradient(y, z).dot(Vec({0.7, -0.2})); };
  CHECK((p.HessianVec(x, z, Vec({0.7, -0.2})) - oracle::FiniteDiffGrad(gdir, x)).norm() < 1e-6);

  RngStream r(7, 0);
  auto syn = sfw::LogisticL1Problem::Synthetic(10, 3, 0.1, r);
  std::vector<int> counts(10, 0);
  const int n = 50000;
  for (int i = 0; i < n; ++i) ++counts[syn->SampleZ(Vector::Zero(3), r).index];
  const double sd = std::sqrt(n * 0.1 * 0.9);
  for (int c : counts) CHECK(std::abs(c - n * 0.1) < 4 * sd);
}

TEST_CASE("oblivious sample law does not depend on x") {
  RngStream r(8, 0);
  auto syn = sfw::LogisticL1Problem::Synthetic(8, 3, 0.1, r);
  const int n = 20000;
  std::vector<double> c1(8, 0), c2(8, 0);
  RngStream ra = r.Split(1), rb = r.Split(2);
  for (int i = 0; i < n; ++i) {
    c1[syn->SampleZ(Vec({1, 0, 0}), ra).index] += 1;
    c2[syn->SampleZ(Vec({0, 0, -1}), rb).index] += 1;
  }
  double chi2 = 0;
  for (int k = 0; k < 8; ++k) {
    const double e = (c1[k] + c2[k]) / 2;
    chi2 += (c1[k] - e) * (c1[k] - e) / e + (c2[k] - e) * (c2[k] - e) / e;
  }
  boost::math::chi_squared dist(7);
  CHECK(1.0 - boost::math::cdf(dist, chi2) > 0.001);
}

TEST_CASE("robust loss") {
  sfw::RobustLrmrProblem p(2, 2, {{0, 0, 1.0}, {1, 1, -1.0}}, 1.0);
  CHECK(p.Psi(0.0) == 0.0);
  CHECK(p.PsiPrime(0.0) == 0.0);
  CHECK(p.Psi(50.0) == doctest::Approx(1.0));
  CHECK(p.Psi(1.0) == doctest::Approx(1.0 - std::exp(-0.5)));
  const Vector x = Vec({0.3, -0.2, 0.5, 0.1});
  const Sample z = p.Component(1);
  auto val = [&](const Vector& y) { return p.Value(y, z); };
  CHECK((p.Gradient(x, z) - oracle::FiniteDiffGrad(val, x)).norm() < 1e-6);
  auto exact = [&](const Vector& y) { return p.ExactValue(y); };
  CHECK((p.ExactGradient(x) - oracle::FiniteDiffGrad(exact, x)).norm() < 1e-6);
}

TEST_CASE("nqp validation and gradient") {
  Matrix h(2, 2);
  h << -1, 0.5, -0.5, -1;
  CHECK_ERRC(sfw::NqpProblem(h, Vec({1, 1}), 0.0), sfw::Errc::kInvalidArgument);
  RngStream r(9, 0);
  auto p = sfw::NqpProblem::Random(5, 0.0, r);
  CHECK((p->h().array() <= 0).all());
  CHECK((p->b() + p->h().transpose() * Vector::Ones(5)).norm() < 1e-12);
  const Vector x = RandomIn01(r, 5);
  auto val = [&](const Vector& y) { return p->ExactValue(y); };
  CHECK((p->ExactGradient(x) - oracle::FiniteDiffGrad(val, x)).norm() < 1e-6);
}

TEST_CASE("advertised constants bound random probes") {
  RngStream r(10, 0);
  std::vector<std::pair<sfw::ProblemPtr, std::function<Vector()>>> cases;
  cases.push_back({std::make_shared<sfw::QuadraticProblem>(Vec({0.3, -0.3, 0.1}), 0.2),
                   [&] {
                     Vector x = RandomIn01(r, 3, -1, 1);
                     return Vector(x / std::max(1.0, x.lpNorm<1>()));
                   }});
  cases.push_back({sfw::NqpProblem::Random(4, 0.0, r), [&] { return RandomIn01(r, 4); }});
  cases.push_back({sfw::LogisticL1Problem::Synthetic(20, 3, 0.1, r), [&] {
                     Vector x = RandomIn01(r, 3, -1, 1);
                     return Vector(x / std::max(1.0, x.lpNorm<1>()));
                   }});
  cases.push_back({sfw::RobustLrmrProblem::Synthetic(3, 3, 1, 6, 0.2, 1.0, r),
                   [&] { return RandomIn01(r, 9, -2, 2); }});
  cases.push_back({std::make_shared<sfw::MultilinearProblem>(sfw::Coverage::Random(4, 5, r), 0.1),
                   [&] { return RandomIn01(r, 5, 0.1, 0.9); }});
  for (auto& [p, draw] : cases) {
    const auto c = p->constants();
    for (int k = 0; k < 10000; ++k) {
      const Vector x = draw();
      const Sample z = p->SampleZ(x, r);
      if (std::isfinite(c.B)) CHECK(std::abs(p->Value(x, z)) <= c.B + 1e-9);
      if (std::isfinite(c.G)) {
        CHECK(p->Gradient(x, z).norm() <= c.G + 1e-9);
        if (p->mode() == sfw::ProblemMode::kNonOblivious) CHECK(p->LogpGrad(x, z).norm() <= c.G + 1e-9);
      }
    }
  }
  CHECK(std::isfinite(sfw::LBar(cases[1].first->constants())));
}

TEST_CASE("csv loaders") {
  const auto logit = WriteTemp("logit.csv", "1,0.5,-1\n0,1.0,2.0\n-1,0.0,1\n");
  auto p = sfw::LogisticL1Problem::FromCsv(logit);
  CHECK(p->num_components() == 3);
  CHECK(p->dim() == 2);
  CHECK(p->labels()[0] == 1.0);
  CHECK(p->labels()[1] == -1.0);
  CHECK(p->labels()[2] == -1.0);

  const auto ratings = WriteTemp("ratings.csv", "0,0,4\n1,2,1.5\n");
  auto q = sfw::RobustLrmrProblem::FromCsv(ratings, 1.0);
  CHECK(q->rows() == 2);
  CHECK(q->cols() == 3);
  CHECK(q->num_components() == 2);

  CHECK_ERRC(sfw::LogisticL1Problem::FromCsv("/tmp/definitely_missing.csv"), sfw::Errc::kIo);
  const auto bad = WriteTemp("bad.csv", "1,abc\n");
  CHECK_ERRC(sfw::LogisticL1Problem::FromCsv(bad), sfw::Errc::kIo);
  const auto ragged = WriteTemp("ragged.csv", "1,2,3\n1,2\n");
  CHECK_ERRC(sfw::LogisticL1Problem::FromCsv(ragged), sfw::Errc::kIo);
  const auto bad_triplet = WriteTemp("badtrip.csv", "0,1\n");
  CHECK_ERRC(sfw::RobustLrmrProblem::FromCsv(bad_triplet, 1.0), sfw::Errc::kIo);
}

TEST_CASE("problem builder") {
  sfw::ProblemSpec spec;
  spec.name = "MultilinearFacilityLocation";
  spec.params = {{"dim", "6"}, {"users", "5"}};
  spec.seed = 3;
  auto a = sfw::BuildProblem(spec), b = sfw::BuildProblem(spec);
  CHECK(a->dim() == 6);
  CHECK(a->mode() == sfw::ProblemMode::kNonOblivious);
  CHECK(a->ExactValue(Vector::Constant(6, 0.5)) == b->ExactValue(Vector::Constant(6, 0.5)));
  CHECK(a->Has(sfw::kCapLogpGrad | sfw::kCapLogpHessVec | sfw::kCapExactReference));

  for (std::string name : {"Quadratic", "NQP", "LogisticL1", "RobustLRMR", "MultilinearCoverage",
                           "MultilinearConcaveModular", "MultilinearLogDet", "MultilinearModular"}) {
    sfw::ProblemSpec s;
    s.name = name;
    if (name != "RobustLRMR") s.params["dim"] = "4";
    auto p = sfw::BuildProblem(s);
    CHECK(p->dim() > 0);
    CHECK(p->Has(sfw::kCapValue | sfw::kCapGradient));
  }
  spec.params["bogus"] = "1";
  CHECK_ERRC(sfw::BuildProblem(spec), sfw::Errc::kConfig);
  sfw::ProblemSpec unknown;
  unknown.name = "Nope";
  CHECK_ERRC(sfw::BuildProblem(unknown), sfw::Errc::kConfig);
}

TEST_CASE("finite sum view") {
  RngStream r(12, 0);
  auto base = std::make_shared<sfw::QuadraticProblem>(Vec({0.1, 0.2}), 1.0);
  std::vector<Sample> samples;
  for (int i = 0; i < 5; ++i) samples.push_back(base->SampleZ(Vector::Zero(2), r));
  sfw::FiniteSumProblem fs(base, samples);
  const Vector x = Vec({0.3, -0.1});
  double v = 0;
  Vector g = Vector::Zero(2);
  for (const auto& s : samples) {
    v += base->Value(x, s) / 5;
    g += base->Gradient(x, s) / 5;
  }
  CHECK(fs.ExactValue(x) == doctest::Approx(v).epsilon(1e-12));
  CHECK((fs.ExactGradient(x) - g).norm() < 1e-12);
  CHECK(fs.Value(x, fs.Component(3)) == doctest::Approx(base->Value(x, samples[3])));
  auto ml = std::make_shared<sfw::MultilinearProblem>(
      std::make_shared<sfw::Modular>(Vector::Ones(2)), 0.1);
  CHECK_ERRC(sfw::FiniteSumProblem(ml, samples), sfw::Errc::kMode);
}
