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
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sfw/estimators.hpp"
#include "sfw/problems.hpp"
#include "sfw/set_function.hpp"
#include "test_util.hpp"

using sfw::Matrix;
using sfw::RngStream;
using sfw::Sample;
using sfw::Vector;

namespace {

// F~(x; z) = sum_i c_i x_i^3 / 3 * (1 + z), oblivious, with z in {0} only. Used
// to probe the gradient-difference approximation on a polynomial.
class CubicProblem : public sfw::StochasticProblem {
 public:
  explicit CubicProblem(int d) : d_(d) {}
  std::string name() const override { return "Cubic"; }
  int dim() const override { return d_; }
  sfw::ProblemMode mode() const override { return sfw::ProblemMode::kOblivious; }
  unsigned capabilities() const override {
    return sfw::kCapValue | sfw::kCapGradient | sfw::kCapHessianVec;
  }
  sfw::ProblemConstants constants() const override { return {}; }
  Sample SampleZ(const Vector&, RngStream&) const override { return {}; }
  double Value(const Vector& x, const Sample&) const override { return x.array().cube().sum(); }
  Vector Gradient(const Vector& x, const Sample&) const override {
    return 3.0 * x.array().square();
  }
  Vector HessianVec(const Vector& x, const Sample&, const Vector& u) const override {
    return (6.0 * x.array() * u.array()).matrix();
  }

 private:
  int d_;
};

Vector RandomIn(RngStream& r, int d, double lo, double hi) {
  Vector x(d);
  for (int i = 0; i < d; ++i) x[i] = lo + (hi - lo) * r.Uniform();
  return x;
}

Sample SubsetSample(const sfw::MultilinearProblem& p, const Vector& x, std::uint64_t mask) {
  Sample s;
  s.subset = sfw::SubsetFromMask(p.dim(), mask);
  s.logp_grad = p.LogpGrad(x, s);
  return s;
}

// E_z[HessianEstimateApply] by enumeration of all subsets.
Vector ExpectedHessianApply(const sfw::MultilinearProblem& p, const Vector& x, const Vector& u) {
  Vector e = Vector::Zero(p.dim());
  for (std::uint64_t mask = 0; mask < (1ULL << p.dim()); ++mask)
    e += oracle::SubsetProb(x, mask) * sfw::HessianEstimateApply(p, x, SubsetSample(p, x, mask), u);
  return e;
}

Vector ExpectedScoreGradient(const sfw::MultilinearProblem& p, const Vector& x) {
  Vector e = Vector::Zero(p.dim());
  for (std::uint64_t mask = 0; mask < (1ULL << p.dim()); ++mask)
    e += oracle::SubsetProb(x, mask) * sfw::ScoreGradient(p, x, SubsetSample(p, x, mask));
  return e;
}

}  // namespace

TEST_CASE("momentum update") {
  sfw::GradEstimatorState s;
  s.d = Vec({7, -3});
  sfw::MomentumUpdate(s, Vec({1, 1}), Vec({4, 5}), 1.0);
  CHECK(s.d == Vec({4, 5}));
  CHECK(s.t == 1);
  s.d = Vec({2, 0});
  sfw::MomentumUpdate(s, Vec({0, 2}), Vec({4, 4}), 0.5);
  CHECK(s.d == Vec({3, 3}));
  sfw::MomentumUpdate(s, Vec({0, 0}), Vec({100, 100}), 0.0);
  CHECK(s.d == Vec({3, 3}));
  CHECK_ERRC(sfw::MomentumUpdate(s, Vec({0, 0}), Vec({1, 1}), 1.5), sfw::Errc::kInvalidArgument);
  sfw::GradEstimatorState empty;
  sfw::MomentumUpdate(empty, Vec({1, 1}), Vec({2, 2}), 0.25);
  CHECK(empty.d == Vec({0.75 + 0.5, 0.75 + 0.5}));
}

TEST_CASE("hessian estimator expectations") {
  sfw::MultilinearProblem card(std::make_shared<sfw::Modular>(Vector::Ones(3)), 0.05);
  const Vector half = Vector::Constant(3, 0.5);
  CHECK(ExpectedHessianApply(card, half, Vector::Ones(3)).norm() < 1e-10);

  RngStream r(1, 0);
  auto fl = sfw::FacilityLocation::Random(5, 4, r);
  sfw::MultilinearProblem p(fl, 0.05);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = RandomIn(r, 4, 0.05, 0.95);
    const Vector u = RandomIn(r, 4, -1, 1);
    const Sample z = p.SampleZ(x, r);
    CHECK(sfw::HessianEstimateApply(p, x, z, Vector::Zero(4)).norm() == 0.0);
    const Vector expect = oracle::MultilinearHessian(*fl, x) * u;
    CHECK((ExpectedHessianApply(p, x, u) - expect).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK((ExpectedScoreGradient(p, x) - oracle::MultilinearGradFd(*fl, x)).lpNorm<Eigen::Infinity>() <
          1e-6);
  }
}

TEST_CASE("unbiased chain over one step") {
  RngStream r(2, 0);
  auto fl = sfw::FacilityLocation::Random(5, 4, r);
  sfw::MultilinearProblem p(fl, 0.05);
  const Vector x1 = RandomIn(r, 4, 0.1, 0.5);
  const Vector x2 = x1 + RandomIn(r, 4, 0.0, 0.4);
  const Vector u = x2 - x1;
  // E[d1], E_a E_z[delta_tilde] on a 101-point trapezoid grid, and the rho-term.
  const Vector ed1 = ExpectedScoreGradient(p, x1);
  Vector edelta = Vector::Zero(4);
  for (int k = 0; k <= 100; ++k) {
    const double a = k / 100.0, w = (k == 0 || k == 100) ? 0.5 / 100 : 1.0 / 100;
    edelta += w * ExpectedHessianApply(p, a * x2 + (1 - a) * x1, u);
  }
  const double rho = 0.3;
  const Vector ed2 = (1 - rho) * (ed1 + edelta) + rho * ExpectedScoreGradient(p, x2);
  const Vector truth = sfw::MultilinearExact(*fl, x2).grad;
  CHECK((ed2 - truth).lpNorm<Eigen::Infinity>() < 1e-3);
}

TEST_CASE("variation with exact Hessian") {
  RngStream r(3, 0);
  auto fl = sfw::FacilityLocation::Random(5, 6, r);
  sfw::MultilinearProblem p(fl, 0.05);
  const Vector xp = RandomIn(r, 6, 0.1, 0.6);
  const Vector xt = xp + RandomIn(r, 6, 0.0, 0.3);
  CHECK(sfw::VariationExactHessian(p, xt, xt, r.Split(1)).delta_tilde.norm() == 0.0);

  sfw::QuadraticProblem q(Vec({0.1, 0.2}), 1.0);
  const Vector qa = Vec({0.3, -0.2}), qb = Vec({0.0, 0.5});
  for (int i = 0; i < 5; ++i)
    CHECK((sfw::VariationExactHessian(q, qa, qb, r.Split(2, i)).delta_tilde - (qa - qb)).norm() <
          1e-15);

  const int n = 100000;
  Vector sum = Vector::Zero(6), sq = Vector::Zero(6);
  for (int i = 0; i < n; ++i) {
    const Vector v = sfw::VariationExactHessian(p, xt, xp, r.Split(3, i)).delta_tilde;
    sum += v;
    sq += v.array().square().matrix();
  }
  const Vector mean = sum / n;
  const Vector se = ((sq / n - mean.array().square().matrix()) / n).cwiseSqrt();
  const Vector truth = sfw::MultilinearExact(*fl, xt).grad - sfw::MultilinearExact(*fl, xp).grad;
  for (int i = 0; i < 6; ++i) CHECK(std::abs(mean[i] - truth[i]) <= 3 * se[i]);
}

TEST_CASE("variation with gradient differences") {
  CubicProblem cubic(1);
  // psi(x) = x^3: (psi'(1.1) - psi'(0.9)) / 0.2 = (3.63 - 2.43) / 0.2 = 6.
  // The central difference of a quadratic gradient is exact.
  const Vector one = Vec({1.0});
  const double phi = (cubic.Gradient(Vec({1.1}), {})[0] - cubic.Gradient(Vec({0.9}), {})[0]) / 0.2;
  CHECK(phi == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(std::abs(phi - 6.0) <= 1.0 * 6.0 * 0.1);

  RngStream r(4, 0);
  CubicProblem c3(3);
  for (int i = 0; i < 20; ++i) {
    const Vector xt = RandomIn(r, 3, -1, 1), xp = RandomIn(r, 3, -1, 1);
    const RngStream it = r.Split(5, i);
    const auto gd = sfw::VariationGradDiff(c3, xt, xp, 0.1, it);
    const auto ex = sfw::VariationExactHessian(c3, xt, xp, it);
    CHECK(gd.a == ex.a);
    CHECK((gd.delta_tilde - ex.delta_tilde).norm() < 1e-12);
  }

  sfw::QuadraticProblem q(Vec({0.5, 0.5}), 0.3);
  const auto qd = sfw::VariationGradDiff(q, Vec({0.2, 0.1}), Vec({0.0, 0.4}), 0.37, r.Split(6));
  CHECK((qd.delta_tilde - Vec({0.2, -0.3})).norm() < 1e-14);

  auto fl = sfw::FacilityLocation::Random(4, 5, r);
  sfw::MultilinearProblem p(fl, 0.05);
  const auto c = p.constants();
  for (int i = 0; i < 50; ++i) {
    const Vector xp = RandomIn(r, 5, 0.2, 0.8);
    const Vector xt = (xp + RandomIn(r, 5, -0.05, 0.05)).cwiseMax(0.1).cwiseMin(0.9);
    const double delta = 1e-3 * (1 + i % 5);
    const RngStream it = r.Split(7, i);
    const auto gd = sfw::VariationGradDiff(p, xt, xp, delta, it);
    const auto ex = sfw::VariationExactHessian(p, xt, xp, it);
    const double D = (xt - xp).norm();
    CHECK((gd.delta_tilde - ex.delta_tilde).norm() <= (1 + c.B) * D * D * c.L2 * delta + 1e-9);
  }
  CHECK(sfw::VariationGradDiff(p, Vector::Constant(5, 0.3), Vector::Constant(5, 0.3), 0.01, r)
            .delta_tilde.norm() == 0.0);
  CHECK_ERRC(sfw::VariationGradDiff(p, Vector::Constant(5, 0.3), Vector::Constant(5, 0.3), 0.0, r),
             sfw::Errc::kInvalidArgument);
}

TEST_CASE("oblivious variation") {
  sfw::QuadraticProblem q(Vec({0.1, 0.2}), 2.0);
  RngStream r(5, 0);
  const Sample z = q.SampleZ(Vector::Zero(2), r);
  CHECK(sfw::VariationOblivious(q, Vec({1, 1}), Vec({1, 1}), z).delta_tilde.norm() == 0.0);
  CHECK((sfw::VariationOblivious(q, Vec({0.4, 0.1}), Vec({0.0, 0.3}), z).delta_tilde -
         Vec({0.4, -0.2}))
            .norm() < 1e-15);

  Matrix a(2, 2);
  a << 1.0, 2.0, -0.5, 0.3;
  sfw::LogisticL1Problem lr(a, Vec({1.0, -1.0}));
  const Vector xt = Vec({0.2, -0.4}), xp = Vec({-0.1, 0.3});
  const Vector avg = 0.5 * (sfw::VariationOblivious(lr, xt, xp, lr.Component(0)).delta_tilde +
                            sfw::VariationOblivious(lr, xt, xp, lr.Component(1)).delta_tilde);
  CHECK((avg - (lr.ExactGradient(xt) - lr.ExactGradient(xp))).norm() < 1e-12);

  sfw::MultilinearProblem p(std::make_shared<sfw::Modular>(Vector::Ones(2)), 0.05);
  CHECK_ERRC(sfw::VariationOblivious(p, Vec({0.5, 0.5}), Vec({0.2, 0.2}), z), sfw::Errc::kMode);
}

TEST_CASE("gradient-difference step size") {
  sfw::ProblemConstants c;
  c.B = 2;
  c.G = 3;
  c.L = 4;
  c.L2 = 5;
  const double lbar = std::sqrt(4 * 4 * 81 + 16 * 81 + 4 * 16 + 4 * 4 * 16);
  CHECK(sfw::LBar(c) == doctest::Approx(lbar));
  CHECK(sfw::GradDiffDelta(0.1, c, 2.0) == doctest::Approx(std::sqrt(3.0) * 0.1 * lbar / (2 * 5 * 3)));
  c.L2 = 0;
  CHECK_ERRC(sfw::GradDiffDelta(0.1, c, 2.0), sfw::Errc::kInvalidArgument);
}

TEST_CASE("two-point estimator") {
  RngStream r(6, 0);
  const Vector c = Vec({1.0, -2.0, 0.5});
  const sfw::ValueOracle linear = [&](const Vector& y, RngStream&) { return c.dot(y); };
  const Vector x = Vec({0.1, 0.2, 0.3});
  const int n = 100000;
  Vector sum = Vector::Zero(3), sq = Vector::Zero(3);
  for (int i = 0; i < n; ++i) {
    const Vector g = sfw::TwoPointGradient(linear, x, 0.05, 1, r);
    sum += g;
    sq += g.array().square().matrix();
  }
  const Vector mean = sum / n;
  const Vector se = ((sq / n - mean.array().square().matrix()) / n).cwiseSqrt();
  for (int i = 0; i < 3; ++i) CHECK(std::abs(mean[i] - c[i]) <= 3 * se[i]);

  const sfw::ValueOracle constant = [](const Vector&, RngStream&) { return 4.2; };
  for (int i = 0; i < 100; ++i) CHECK(sfw::TwoPointGradient(constant, x, 0.1, 3, r).norm() == 0.0);

  const sfw::ValueOracle sq1 = [](const Vector& y, RngStream&) { return y[0] * y[0]; };
  for (int i = 0; i < 10; ++i) CHECK(sfw::TwoPointGradient(sq1, Vec({0.0}), 0.5, 1, r)[0] == 0.0);

  // Batched calls are order independent: the same key reproduces the same batch.
  RngStream r1(7, 7), r2(7, 7);
  CHECK((sfw::TwoPointGradient(linear, x, 0.05, 8, r1) -
         sfw::TwoPointGradient(linear, x, 0.05, 8, r2))
            .norm() == 0.0);
  CHECK_ERRC(sfw::TwoPointGradient(linear, x, 0.0, 1, r), sfw::Errc::kInvalidArgument);
  CHECK_ERRC(sfw::TwoPointGradient(linear, x, 0.1, 0, r), sfw::Errc::kInvalidArgument);
}

TEST_CASE("two-point second moment scales with d") {
  RngStream r(8, 0);
  std::vector<double> fitted;
  for (int d : {2, 4, 8}) {
    const double G = 1.5;
    const Vector x0 = Vector::Constant(d, 0.3);
    // G-Lipschitz: G times the distance to x0.
    const sfw::ValueOracle f = [&](const Vector& y, RngStream&) { return G * (y - x0).norm(); };
    const Vector x = Vector::Zero(d);
    const int n = 40000;
    std::vector<Vector> gs;
    Vector mean = Vector::Zero(d);
    for (int i = 0; i < n; ++i) {
      gs.push_back(sfw::TwoPointGradient(f, x, 0.05, 1, r));
      mean += gs.back() / n;
    }
    double second = 0;
    for (const auto& g : gs) second += (g - mean).squaredNorm() / n;
    fitted.push_back(second / (d * G * G));
  }
  for (double c : fitted) CHECK(c <= 1.0);
  const auto [lo, hi] = std::minmax_element(fitted.begin(), fitted.end());
  CHECK(*hi / *lo < 2.0);
}

TEST_CASE("smoothed value") {
  RngStream r(9, 0);
  const Vector c = Vec({0.3, -0.7, 1.1, 0.2});
  const sfw::ValueOracle linear = [&](const Vector& y, RngStream&) { return c.dot(y); };
  const Vector x = Vec({0.5, 0.1, -0.2, 0.0});
  auto est = sfw::SmoothedValueMc(linear, x, 0.3, 20000, r);
  CHECK(std::abs(est.mean - c.dot(x)) <= 3 * est.se);
  auto exact = sfw::SmoothedValueMc(linear, x, 0.0, 10, r);
  CHECK(exact.mean == c.dot(x));

  const double G = 2.0;
  const sfw::ValueOracle lip = [&](const Vector& y, RngStream&) {
    return G * y.lpNorm<1>() / 2.0 + std::sin(G * y[0]) / 2.0;
  };
  for (int i = 0; i < 20; ++i) {
    const Vector y = RandomIn(r, 4, -1, 1);
    // Lipschitz constant of the l1 half is G sqrt(d) / 2 = G and of the sine half G / 2.
    const double g_const = G + G / 2;
    auto e = sfw::SmoothedValueMc(lip, y, 0.1, 4000, r);
    CHECK(std::abs(e.mean - lip(y, r)) <= 0.1 * g_const + 3 * e.se);
  }
}
