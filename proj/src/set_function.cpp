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

#include "sfw/set_function.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace sfw {
namespace {

void CheckSubset(const Subset& s, int d, const char* who) {
  if (static_cast<int>(s.size()) != d) {
    Fail(Errc::kDimensionMismatch, std::string(who) + ": subset indicator has size " +
                                       std::to_string(s.size()) + ", expected " +
                                       std::to_string(d));
  }
}

double FullValue(const SetFunction& f) {
  return f.Eval(Subset(f.ground_size(), 1));
}

}  // namespace

Subset SubsetFromIndices(int d, const std::vector<int>& indices) {
  Subset s(d, 0);
  for (int i : indices) {
    if (i < 0 || i >= d) Fail(Errc::kInvalidArgument, "subset index out of range");
    s[i] = 1;
  }
  return s;
}

std::vector<int> IndicesFromSubset(const Subset& s) {
  std::vector<int> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

Subset SubsetFromMask(int d, std::uint64_t mask) {
  Subset s(d, 0);
  for (int i = 0; i < d; ++i) s[i] = (mask >> i) & 1u;
  return s;
}

int PopCount(std::uint64_t mask) { return std::popcount(mask); }

SetFunction::SetFunction(int ground_size, double bound, bool monotone)
    : ground_size_(ground_size), bound_(bound), monotone_(monotone) {
  if (ground_size <= 0) Fail(Errc::kInvalidDimension, "set function: empty ground set");
}

double SetFunction::EvalIndices(const std::vector<int>& indices) const {
  return Eval(SubsetFromIndices(ground_size_, indices));
}

double SetFunction::EvalMask(std::uint64_t mask) const {
  return Eval(SubsetFromMask(ground_size_, mask));
}

// ---------------------------------------------------------------------------

FacilityLocation::FacilityLocation(Matrix weights)
    : SetFunction(static_cast<int>(weights.cols()), 0.0, true), weights_(std::move(weights)) {
  if (weights_.rows() == 0) Fail(Errc::kInvalidArgument, "FacilityLocation: no users");
  if (!weights_.allFinite() || weights_.minCoeff() < 0.0) {
    Fail(Errc::kInvalidArgument, "FacilityLocation: weights must be finite and >= 0");
  }
  set_bound(FullValue(*this));
}

std::shared_ptr<FacilityLocation> FacilityLocation::Random(int users, int d, RngStream& rng) {
  Matrix w(users, d);
  for (int j = 0; j < d; ++j) {
    for (int u = 0; u < users; ++u) w(u, j) = rng.Uniform();
  }
  return std::make_shared<FacilityLocation>(std::move(w));
}

double FacilityLocation::Eval(const Subset& s) const {
  CheckSubset(s, ground_size(), "FacilityLocation");
  double total = 0.0;
  for (Eigen::Index u = 0; u < weights_.rows(); ++u) {
    double best = 0.0;
    for (int j = 0; j < ground_size(); ++j) {
      if (s[j]) best = std::max(best, weights_(u, j));
    }
    total += best;
  }
  return total / static_cast<double>(weights_.rows());
}

// ---------------------------------------------------------------------------

Coverage::Coverage(Matrix probs, Vector topic_weights)
    : SetFunction(static_cast<int>(probs.cols()), 0.0, true),
      probs_(std::move(probs)),
      topic_weights_(std::move(topic_weights)) {
  if (probs_.rows() == 0 || probs_.rows() != topic_weights_.size()) {
    Fail(Errc::kInvalidArgument, "Coverage: topic weights must match topic count");
  }
  if (!probs_.allFinite() || probs_.minCoeff() < 0.0 || probs_.maxCoeff() > 1.0) {
    Fail(Errc::kInvalidArgument, "Coverage: probabilities must lie in [0, 1]");
  }
  if (!topic_weights_.allFinite() || topic_weights_.minCoeff() < 0.0) {
    Fail(Errc::kInvalidArgument, "Coverage: topic weights must be >= 0");
  }
  set_bound(FullValue(*this));
}

std::shared_ptr<Coverage> Coverage::Random(int topics, int d, RngStream& rng) {
  Matrix p(topics, d);
  for (int a = 0; a < d; ++a) {
    for (int j = 0; j < topics; ++j) p(j, a) = rng.Uniform();
  }
  Vector w(topics);
  for (int j = 0; j < topics; ++j) w[j] = 0.5 + rng.Uniform();
  return std::make_shared<Coverage>(std::move(p), std::move(w));
}

double Coverage::Eval(const Subset& s) const {
  CheckSubset(s, ground_size(), "Coverage");
  double total = 0.0;
  for (Eigen::Index j = 0; j < probs_.rows(); ++j) {
    double miss = 1.0;
    for (int a = 0; a < ground_size(); ++a) {
      if (s[a]) miss *= 1.0 - probs_(j, a);
    }
    total += topic_weights_[j] * (1.0 - miss);
  }
  return total;
}

std::optional<double> Coverage::MultilinearValue(const Vector& x) const {
  if (x.size() != ground_size()) Fail(Errc::kDimensionMismatch, "Coverage: x dim");
  double total = 0.0;
  for (Eigen::Index j = 0; j < probs_.rows(); ++j) {
    double miss = 1.0;
    for (int a = 0; a < ground_size(); ++a) miss *= 1.0 - probs_(j, a) * x[a];
    total += topic_weights_[j] * (1.0 - miss);
  }
  return total;
}

// ---------------------------------------------------------------------------

ConcaveModular::ConcaveModular(Matrix ratings)
    : SetFunction(static_cast<int>(ratings.cols()), 0.0, true), ratings_(std::move(ratings)) {
  if (ratings_.rows() == 0) Fail(Errc::kInvalidArgument, "ConcaveModular: no users");
  if (!ratings_.allFinite() || ratings_.minCoeff() < 0.0) {
    Fail(Errc::kInvalidArgument, "ConcaveModular: ratings must be finite and >= 0");
  }
  set_bound(FullValue(*this));
}

std::shared_ptr<ConcaveModular> ConcaveModular::Random(int users, int d, RngStream& rng) {
  Matrix r(users, d);
  for (int j = 0; j < d; ++j) {
    for (int u = 0; u < users; ++u) r(u, j) = rng.Uniform();
  }
  return std::make_shared<ConcaveModular>(std::move(r));
}

double ConcaveModular::Eval(const Subset& s) const {
  CheckSubset(s, ground_size(), "ConcaveModular");
  double total = 0.0;
  for (Eigen::Index u = 0; u < ratings_.rows(); ++u) {
    double sum = 0.0;
    for (int j = 0; j < ground_size(); ++j) {
      if (s[j]) sum += ratings_(u, j);
    }
    total += std::sqrt(sum);
  }
  return total;
}

// ---------------------------------------------------------------------------

LogDet::LogDet(Matrix kernel)
    : SetFunction(static_cast<int>(kernel.cols()), 0.0, true), kernel_(std::move(kernel)) {
  if (kernel_.rows() != kernel_.cols()) Fail(Errc::kInvalidArgument, "LogDet: kernel not square");
  if (!kernel_.allFinite() || (kernel_ - kernel_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    Fail(Errc::kInvalidArgument, "LogDet: kernel must be finite and symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(kernel_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    Fail(Errc::kInvalidArgument, "LogDet: kernel must be positive semidefinite");
  }
  set_bound(FullValue(*this));
}

std::shared_ptr<LogDet> LogDet::Random(int d, int rank, RngStream& rng) {
  Matrix a(d, rank);
  for (int j = 0; j < rank; ++j) {
    for (int i = 0; i < d; ++i) a(i, j) = rng.Normal();
  }
  Matrix k = a * a.transpose() / static_cast<double>(rank);
  k = 0.5 * (k + k.transpose());
  return std::make_shared<LogDet>(std::move(k));
}

double LogDet::Eval(const Subset& s) const {
  CheckSubset(s, ground_size(), "LogDet");
  const std::vector<int> idx = IndicesFromSubset(s);
  if (idx.empty()) return 0.0;
  const int k = static_cast<int>(idx.size());
  Matrix sub(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) sub(a, b) = kernel_(idx[a], idx[b]);
  }
  sub += Matrix::Identity(k, k);
  Eigen::LLT<Matrix> llt(sub);
  if (llt.info() != Eigen::Success) Fail(Errc::kNumerical, "LogDet: Cholesky failed");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

// ---------------------------------------------------------------------------

Modular::Modular(Vector weights)
    : SetFunction(static_cast<int>(weights.size()), 0.0,
                  weights.size() > 0 && weights.minCoeff() >= 0.0),
      weights_(std::move(weights)) {
  RequireFinite(weights_, "Modular weights");
  const double pos = weights_.cwiseMax(0.0).sum();
  const double neg = -weights_.cwiseMin(0.0).sum();
  set_bound(std::max(pos, neg));
}

double Modular::Eval(const Subset& s) const {
  CheckSubset(s, ground_size(), "Modular");
  double total = 0.0;
  for (int i = 0; i < ground_size(); ++i) {
    if (s[i]) total += weights_[i];
  }
  return total;
}

std::optional<double> Modular::MultilinearValue(const Vector& x) const {
  if (x.size() != ground_size()) Fail(Errc::kDimensionMismatch, "Modular: x dim");
  return weights_.dot(x);
}

// ---------------------------------------------------------------------------

TableSetFunction::TableSetFunction(int d, std::vector<double> values, bool monotone)
    : SetFunction(d, 0.0, monotone), values_(std::move(values)) {
  if (d > kMaxEnumerationDim) Fail(Errc::kBudget, "Table: d exceeds enumeration budget");
  if (values_.size() != (std::size_t{1} << d)) {
    Fail(Errc::kInvalidArgument, "Table: expected 2^d values");
  }
  double m = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v)) Fail(Errc::kInvalidArgument, "Table: non-finite value");
    m = std::max(m, std::abs(v));
  }
  set_bound(m);
}

std::shared_ptr<TableSetFunction> TableSetFunction::Random(int d, double scale, RngStream& rng) {
  std::vector<double> v(std::size_t{1} << d);
  for (double& x : v) x = scale * (2.0 * rng.Uniform() - 1.0);
  return std::make_shared<TableSetFunction>(d, std::move(v), false);
}

double TableSetFunction::Eval(const Subset& s) const {
  CheckSubset(s, ground_size(), "Table");
  std::uint64_t mask = 0;
  for (int i = 0; i < ground_size(); ++i) {
    if (s[i]) mask |= std::uint64_t{1} << i;
  }
  return values_[mask];
}

// ---------------------------------------------------------------------------

MultilinearOracle::MultilinearOracle(const SetFunction& f) : d_(f.ground_size()) {
  if (d_ > kMaxEnumerationDim) {
    Fail(Errc::kBudget, "multilinear enumeration: d = " + std::to_string(d_) + " exceeds " +
                            std::to_string(kMaxEnumerationDim));
  }
  const std::uint64_t n = std::uint64_t{1} << d_;
  table_.resize(n);
  for (std::uint64_t m = 0; m < n; ++m) table_[m] = f.EvalMask(m);
}

void MultilinearOracle::Weights(const Vector& x, std::uint64_t pinned,
                                std::vector<double>& w) const {
  w.assign(std::size_t{1} << d_, 0.0);
  w[0] = 1.0;
  for (int i = 0; i < d_; ++i) {
    const std::size_t half = std::size_t{1} << i;
    const bool pin = (pinned >> i) & 1u;
    const double p1 = pin ? 0.0 : x[i];
    const double p0 = pin ? 1.0 : 1.0 - x[i];
    for (std::size_t m = 0; m < half; ++m) {
      w[m + half] = w[m] * p1;
      w[m] *= p0;
    }
  }
}

double MultilinearOracle::Value(const Vector& x) const {
  if (x.size() != d_) Fail(Errc::kDimensionMismatch, "multilinear value: x dim");
  std::vector<double> w;
  Weights(x, 0, w);
  double v = 0.0;
  for (std::size_t m = 0; m < w.size(); ++m) v += w[m] * table_[m];
  return v;
}

Vector MultilinearOracle::Gradient(const Vector& x) const {
  if (x.size() != d_) Fail(Errc::kDimensionMismatch, "multilinear gradient: x dim");
  Vector g = Vector::Zero(d_);
  std::vector<double> w;
  for (int i = 0; i < d_; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    Weights(x, bit, w);
    double acc = 0.0;
    for (std::uint64_t m = 0; m < w.size(); ++m) {
      if (m & bit) continue;
      acc += w[m] * (table_[m | bit] - table_[m]);
    }
    g[i] = acc;
  }
  return g;
}

Matrix MultilinearOracle::Hessian(const Vector& x) const {
  if (x.size() != d_) Fail(Errc::kDimensionMismatch, "multilinear Hessian: x dim");
  Matrix h = Matrix::Zero(d_, d_);
  std::vector<double> w;
  for (int i = 0; i < d_; ++i) {
    for (int j = i + 1; j < d_; ++j) {
      const std::uint64_t bi = std::uint64_t{1} << i;
      const std::uint64_t bj = std::uint64_t{1} << j;
      Weights(x, bi | bj, w);
      double acc = 0.0;
      for (std::uint64_t m = 0; m < w.size(); ++m) {
        if (m & (bi | bj)) continue;
        acc += w[m] * (table_[m | bi | bj] - table_[m | bi] - table_[m | bj] + table_[m]);
      }
      h(i, j) = acc;
      h(j, i) = acc;
    }
  }
  return h;
}

MultilinearExactResult MultilinearExact(const SetFunction& f, const Vector& x) {
  const MultilinearOracle oracle(f);
  return {oracle.Value(x), oracle.Gradient(x), oracle.Hessian(x)};
}

}  // namespace sfw
