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

// Reference implementations used as ground truth in tests. Nothing here
// calls the library routine it checks.

#ifndef SFW_TESTS_ORACLES_HPP_
#define SFW_TESTS_ORACLES_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "sfw/core.hpp"
#include "sfw/problems.hpp"
#include "sfw/set_function.hpp"

namespace oracle {

using sfw::Matrix;
using sfw::Vector;

// All vertices of small sets.
inline std::vector<Vector> L1Vertices(int d, double r) {
  std::vector<Vector> v;
  for (int i = 0; i < d; ++i) {
    for (double s : {1.0, -1.0}) {
      Vector e = Vector::Zero(d);
      e[i] = s * r;
      v.push_back(e);
    }
  }
  return v;
}

inline std::vector<Vector> BoxVertices(const Vector& lo, const Vector& hi) {
  const int d = static_cast<int>(lo.size());
  std::vector<Vector> v;
  for (std::uint64_t mask = 0; mask < (1ULL << d); ++mask) {
    Vector c(d);
    for (int i = 0; i < d; ++i) c[i] = (mask >> i) & 1 ? hi[i] : lo[i];
    v.push_back(c);
  }
  return v;
}

inline std::vector<Vector> SimplexVertices(int d, double scale) {
  std::vector<Vector> v;
  for (int i = 0; i < d; ++i) {
    Vector e = Vector::Zero(d);
    e[i] = scale;
    v.push_back(e);
  }
  return v;
}

// Indicators of all independent sets of a partition matroid (the vertices of
// its polytope).
inline std::vector<Vector> MatroidVertices(int d, const std::vector<std::vector<int>>& blocks,
                                           const std::vector<int>& budgets) {
  std::vector<Vector> v;
  for (std::uint64_t mask = 0; mask < (1ULL << d); ++mask) {
    bool ok = true;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      int c = 0;
      for (int e : blocks[b]) c += (mask >> e) & 1;
      if (c > budgets[b]) ok = false;
    }
    if (!ok) continue;
    Vector x(d);
    for (int i = 0; i < d; ++i) x[i] = (mask >> i) & 1;
    v.push_back(x);
  }
  return v;
}

// Bases only: every block at its budget.
inline std::vector<Vector> MatroidBaseVertices(int d, const std::vector<std::vector<int>>& blocks,
                                               const std::vector<int>& budgets) {
  std::vector<Vector> v;
  for (const auto& x : MatroidVertices(d, blocks, budgets)) {
    bool base = true;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      double c = 0;
      for (int e : blocks[b]) c += x[e];
      if (c != budgets[b]) base = false;
    }
    if (base) v.push_back(x);
  }
  return v;
}

inline double MinOver(const std::vector<Vector>& verts, const Vector& g) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : verts) best = std::min(best, v.dot(g));
  return best;
}

inline double MaxOver(const std::vector<Vector>& verts, const Vector& g) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : verts) best = std::max(best, v.dot(g));
  return best;
}

inline double TopSingularValue(const Matrix& g) {
  Eigen::JacobiSVD<Matrix> svd(g);
  return svd.singularValues()(0);
}

// Central differences.
inline Vector FiniteDiffGrad(const std::function<double(const Vector&)>& f, const Vector& x,
                             double h = 1e-5) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

// Probability of subset `mask` under the product-Bernoulli law at x.
inline double SubsetProb(const Vector& x, std::uint64_t mask) {
  double p = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) p *= (mask >> i) & 1 ? x[i] : 1.0 - x[i];
  return p;
}

// F(x) = sum_S f(S) prod x prod (1 - x), straight from the definition.
inline double MultilinearValue(const sfw::SetFunction& f, const Vector& x) {
  const int d = f.ground_size();
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (1ULL << d); ++mask) total += f.EvalMask(mask) * SubsetProb(x, mask);
  return total;
}

inline Vector MultilinearGradFd(const sfw::SetFunction& f, const Vector& x, double h = 1e-5) {
  return FiniteDiffGrad([&](const Vector& y) { return MultilinearValue(f, y); }, x, h);
}

// Hessian from the definition: d2F/dxi dxj = sum over pinned corners.
inline Matrix MultilinearHessian(const sfw::SetFunction& f, const Vector& x) {
  const int d = f.ground_size();
  Matrix h = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      auto pinned = [&](double xi, double xj) {
        Vector y = x;
        y[i] = xi;
        y[j] = xj;
        return MultilinearValue(f, y);
      };
      h(i, j) = pinned(1, 1) - pinned(1, 0) - pinned(0, 1) + pinned(0, 0);
    }
  }
  return h;
}

// 32 + d * (bits for s + 1), counting bits by shifting.
inline std::int64_t BitsFormula(int d, std::uint32_t s) {
  int z = 0;
  while ((1ULL << z) < static_cast<std::uint64_t>(s) + 1) ++z;
  return 32 + static_cast<std::int64_t>(d) * (z + 1);
}

// Sequential SPIDER-FW for a finite sum on one machine, unquantized, with
// the convex finite-sum schedule: period i has 2^{i-1} steps, the anchor
// uses the full gradient, later steps sample ceil(2^{i-1}) components with
// replacement and add the averaged gradient difference, and the step is
// 2 / (2^{i-1} + k). `draw(t)` yields the component sampler of round t.
struct SpiderStep {
  Vector x_next;
  double objective;
};

inline std::vector<SpiderStep> SpiderFwReference(
    const sfw::StochasticProblem& p, const std::function<Vector(const Vector&)>& lmo,
    const Vector& x1, int T, const std::function<std::function<std::int64_t()>(int)>& draw) {
  const std::int64_t n = p.num_components();
  std::vector<SpiderStep> out;
  Vector x = x1, x_prev = x1, v_est = Vector::Zero(x1.size());
  int i = 1, k = 1;
  for (int t = 1; t <= T; ++t) {
    const std::int64_t period = 1LL << (i - 1);
    if (k == 1) {
      v_est.setZero();
      for (std::int64_t j = 0; j < n; ++j) v_est += p.Gradient(x, p.Component(j));
      v_est /= static_cast<double>(n);
    } else {
      const std::int64_t S = period;
      auto sampler = draw(t);
      Vector diff = Vector::Zero(x.size());
      for (std::int64_t b = 0; b < S; ++b) {
        const sfw::Sample z = p.Component(sampler());
        diff += p.Gradient(x, z) - p.Gradient(x_prev, z);
      }
      v_est += diff / static_cast<double>(S);
    }
    const Vector v = lmo(v_est);
    const double eta = 2.0 / (static_cast<double>(period) + k);
    x_prev = x;
    x = x + eta * (v - x);
    out.push_back({x, p.ExactValue(x)});
    if (++k > period) {
      ++i;
      k = 1;
    }
  }
  return out;
}

// Least-squares slope of log(y) against log(x).
inline double LogLogSlope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double lx = std::log(xs[k]), ly = std::log(ys[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle

#endif  // SFW_TESTS_ORACLES_HPP_
