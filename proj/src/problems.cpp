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

#include "sfw/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sfw {
namespace {

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow.
double Softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

void CheckX(const StochasticProblem& p, const Vector& x) {
  if (x.size() != p.dim()) {
    Fail(Errc::kDimensionMismatch, p.name() + ": x has dim " + std::to_string(x.size()) +
                                       ", expected " + std::to_string(p.dim()));
  }
}

std::vector<std::vector<double>> ReadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(Errc::kIo, "cannot open CSV '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      const bool tail_blank = cell.find_first_not_of(" \t", used) == std::string::npos;
      if (used == 0 || !tail_blank || !std::isfinite(v)) {
        Fail(Errc::kIo, path + ":" + std::to_string(line_no) + ": non-numeric cell '" + cell + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      Fail(Errc::kIo, path + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(rows.front().size()) + " columns, found " +
                          std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) Fail(Errc::kIo, "CSV '" + path + "' has no data rows");
  return rows;
}

// ---------------------------------------------------------------------------
// Parameter access for ProblemSpec.

const std::string* Find(const ProblemSpec& s, const std::string& key) {
  auto it = s.params.find(key);
  return it == s.params.end() ? nullptr : &it->second;
}

double GetDouble(const ProblemSpec& s, const std::string& key, double fallback) {
  const std::string* v = Find(s, key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const double d = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument(key);
    return d;
  } catch (const std::exception&) {
    Fail(Errc::kConfig, "problem key '" + key + "': expected a number, got '" + *v + "'");
  }
}

int GetInt(const ProblemSpec& s, const std::string& key, int fallback) {
  const double d = GetDouble(s, key, fallback);
  if (d != std::floor(d)) Fail(Errc::kConfig, "problem key '" + key + "': expected an integer");
  return static_cast<int>(d);
}

std::vector<double> GetList(const ProblemSpec& s, const std::string& key) {
  std::vector<double> out;
  const std::string* v = Find(s, key);
  if (!v) return out;
  std::stringstream ss(*v);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      Fail(Errc::kConfig, "problem key '" + key + "': bad list entry '" + cell + "'");
    }
  }
  return out;
}

int RequireDimParam(const ProblemSpec& s) {
  const int d = GetInt(s, "dim", 0);
  if (d <= 0) Fail(Errc::kConfig, "problem '" + s.name + "': key 'dim' must be >= 1");
  return d;
}

}  // namespace

std::string CapabilityString(unsigned caps) {
  std::string out;
  auto add = [&](unsigned bit, const char* name) {
    if (caps & bit) {
      if (!out.empty()) out += ",";
      out += name;
    }
  };
  add(kCapValue, "value");
  add(kCapGradient, "gradient");
  add(kCapHessianVec, "hessian_vec");
  add(kCapLogpGrad, "logp_grad");
  add(kCapLogpHessVec, "logp_hess_vec");
  add(kCapExactReference, "exact_reference");
  return out;
}

double LBar(const ProblemConstants& c) {
  const double b2 = c.B * c.B;
  const double g4 = c.G * c.G * c.G * c.G;
  const double l2 = c.L * c.L;
  return std::sqrt(4.0 * b2 * g4 + 16.0 * g4 + 4.0 * l2 + 4.0 * b2 * l2);
}

// ---------------------------------------------------------------------------
// StochasticProblem defaults

void StochasticProblem::Missing(const char* what) const {
  Fail(Errc::kCapability, name() + " does not provide " + what);
}

double StochasticProblem::Value(const Vector&, const Sample&) const { Missing("value"); }
Vector StochasticProblem::Gradient(const Vector&, const Sample&) const { Missing("gradient"); }
Vector StochasticProblem::HessianVec(const Vector&, const Sample&, const Vector&) const {
  Missing("hessian_vec");
}

Vector StochasticProblem::LogpGrad(const Vector& x, const Sample&) const {
  if (mode() == ProblemMode::kOblivious) return Vector::Zero(x.size());
  Missing("logp_grad");
}

Vector StochasticProblem::LogpHessVec(const Vector& x, const Sample&, const Vector&) const {
  if (mode() == ProblemMode::kOblivious) return Vector::Zero(x.size());
  Missing("logp_hess_vec");
}

double StochasticProblem::ExactValue(const Vector&) const { Missing("exact_reference"); }
Vector StochasticProblem::ExactGradient(const Vector&) const { Missing("exact_reference"); }

Sample StochasticProblem::Component(std::int64_t j) const {
  if (j < 0 || j >= num_components()) {
    Fail(Errc::kInvalidArgument, name() + ": component " + std::to_string(j) + " out of range");
  }
  Sample s;
  s.index = j;
  return s;
}

// ---------------------------------------------------------------------------
// Quadratic

QuadraticProblem::QuadraticProblem(Vector target, double sigma, double domain_radius)
    : target_(std::move(target)), sigma_(sigma), domain_radius_(domain_radius) {
  if (target_.size() == 0) Fail(Errc::kInvalidDimension, "Quadratic: empty target");
  RequireFinite(target_, "Quadratic target");
  if (!(sigma_ >= 0.0)) Fail(Errc::kInvalidArgument, "Quadratic: sigma must be >= 0");
}

unsigned QuadraticProblem::capabilities() const {
  return kCapValue | kCapGradient | kCapHessianVec | kCapExactReference;
}

ProblemConstants QuadraticProblem::constants() const {
  // Bounds over the ball of radius domain_radius with 3-sigma noise.
  const double d = static_cast<double>(dim());
  const double r = domain_radius_ + target_.norm();
  const double noise = 3.0 * sigma_ * std::sqrt(d);
  ProblemConstants c;
  c.B = 0.5 * r * r + noise * domain_radius_;
  c.G = r + noise;
  c.L = 1.0;
  c.L2 = 0.0;
  c.estimated = sigma_ > 0.0;
  return c;
}

Sample QuadraticProblem::SampleZ(const Vector& x, RngStream& rng) const {
  CheckX(*this, x);
  Sample s;
  s.noise = Vector(dim());
  for (int i = 0; i < dim(); ++i) s.noise[i] = sigma_ * rng.Normal();
  return s;
}

double QuadraticProblem::Value(const Vector& x, const Sample& z) const {
  CheckX(*this, x);
  double v = 0.5 * (x - target_).squaredNorm();
  if (z.noise.size() == dim()) v += z.noise.dot(x);
  return v;
}

Vector QuadraticProblem::Gradient(const Vector& x, const Sample& z) const {
  CheckX(*this, x);
  Vector g = x - target_;
  if (z.noise.size() == dim()) g += z.noise;
  return g;
}

Vector QuadraticProblem::HessianVec(const Vector& x, const Sample&, const Vector& u) const {
  CheckX(*this, x);
  return u;
}

double QuadraticProblem::ExactValue(const Vector& x) const {
  CheckX(*this, x);
  return 0.5 * (x - target_).squaredNorm();
}

Vector QuadraticProblem::ExactGradient(const Vector& x) const {
  CheckX(*this, x);
  return x - target_;
}

// ---------------------------------------------------------------------------
// NQP

NqpProblem::NqpProblem(Matrix h, Vector b, double sigma)
    : h_(std::move(h)), b_(std::move(b)), sigma_(sigma) {
  if (b_.size() == 0) Fail(Errc::kInvalidDimension, "NQP: empty");
  if (h_.rows() != b_.size() || h_.cols() != b_.size()) {
    Fail(Errc::kDimensionMismatch, "NQP: H must be d x d with d = dim(b)");
  }
  if (!h_.allFinite()) Fail(Errc::kNumerical, "NQP: non-finite H");
  if (h_.maxCoeff() > 0.0) {
    Fail(Errc::kInvalidArgument, "NQP: H must be entrywise non-positive for DR-submodularity");
  }
  if (!(sigma_ >= 0.0)) Fail(Errc::kInvalidArgument, "NQP: sigma must be >= 0");
  h_sym_ = 0.5 * (h_ + h_.transpose());
}

std::shared_ptr<NqpProblem> NqpProblem::Random(int d, double sigma, RngStream& rng) {
  if (d <= 0) Fail(Errc::kInvalidDimension, "NQP: d must be >= 1");
  Matrix h(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) h(i, j) = -std::abs(rng.Normal());
  }
  Vector b = -h.transpose() * Vector::Ones(d);
  return std::make_shared<NqpProblem>(std::move(h), std::move(b), sigma);
}

unsigned NqpProblem::capabilities() const {
  return kCapValue | kCapGradient | kCapHessianVec | kCapExactReference;
}

ProblemConstants NqpProblem::constants() const {
  // Bounds over [0, 1]^d.
  const double d = static_cast<double>(dim());
  const double hnorm = h_sym_.operatorNorm();
  const double noise = 3.0 * sigma_ * std::sqrt(d);
  ProblemConstants c;
  c.B = 0.5 * h_.cwiseAbs().sum() + b_.lpNorm<1>() + noise * std::sqrt(d);
  c.G = hnorm * std::sqrt(d) + b_.norm() + noise;
  c.L = hnorm;
  c.L2 = 0.0;
  c.estimated = sigma_ > 0.0;
  return c;
}

Sample NqpProblem::SampleZ(const Vector& x, RngStream& rng) const {
  CheckX(*this, x);
  Sample s;
  s.noise = Vector(dim());
  for (int i = 0; i < dim(); ++i) s.noise[i] = sigma_ * rng.Normal();
  return s;
}

double NqpProblem::Value(const Vector& x, const Sample& z) const {
  double v = ExactValue(x);
  if (z.noise.size() == dim()) v += z.noise.dot(x);
  return v;
}

Vector NqpProblem::Gradient(const Vector& x, const Sample& z) const {
  Vector g = ExactGradient(x);
  if (z.noise.size() == dim()) g += z.noise;
  return g;
}

Vector NqpProblem::HessianVec(const Vector& x, const Sample&, const Vector& u) const {
  CheckX(*this, x);
  return h_sym_ * u;
}

double NqpProblem::ExactValue(const Vector& x) const {
  CheckX(*this, x);
  return 0.5 * x.dot(h_ * x) + b_.dot(x);
}

Vector NqpProblem::ExactGradient(const Vector& x) const {
  CheckX(*this, x);
  return h_sym_ * x + b_;
}

// ---------------------------------------------------------------------------
// Logistic regression

LogisticL1Problem::LogisticL1Problem(Matrix features, Vector labels, double radius)
    : features_(std::move(features)), labels_(std::move(labels)), radius_(radius) {
  if (features_.rows() == 0 || features_.cols() == 0) {
    Fail(Errc::kInvalidDimension, "LogisticL1: empty dataset");
  }
  if (labels_.size() != features_.rows()) {
    Fail(Errc::kDimensionMismatch, "LogisticL1: one label per row required");
  }
  if (!features_.allFinite() || !labels_.allFinite()) {
    Fail(Errc::kNumerical, "LogisticL1: non-finite data");
  }
  for (Eigen::Index i = 0; i < labels_.size(); ++i) labels_[i] = labels_[i] > 0.0 ? 1.0 : -1.0;
}

std::shared_ptr<LogisticL1Problem> LogisticL1Problem::Synthetic(int n, int d, double flip,
                                                                RngStream& rng) {
  if (n <= 0 || d <= 0) Fail(Errc::kInvalidDimension, "LogisticL1: n and d must be >= 1");
  Vector w(d);
  for (int j = 0; j < d; ++j) w[j] = rng.Normal();
  Matrix a(n, d);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = rng.Normal();
    double label = a.row(i).dot(w) >= 0.0 ? 1.0 : -1.0;
    if (rng.Bernoulli(flip)) label = -label;
    y[i] = label;
  }
  return std::make_shared<LogisticL1Problem>(std::move(a), std::move(y));
}

std::shared_ptr<LogisticL1Problem> LogisticL1Problem::FromCsv(const std::string& path,
                                                              double radius) {
  const auto rows = ReadCsv(path);
  const std::size_t cols = rows.front().size();
  if (cols < 2) Fail(Errc::kIo, path + ": need a label column and at least one feature");
  Matrix a(rows.size(), cols - 1);
  Vector y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    y[i] = rows[i][0];
    for (std::size_t j = 1; j < cols; ++j) a(i, j - 1) = rows[i][j];
  }
  return std::make_shared<LogisticL1Problem>(std::move(a), std::move(y), radius);
}

unsigned LogisticL1Problem::capabilities() const {
  return kCapValue | kCapGradient | kCapHessianVec | kCapExactReference;
}

ProblemConstants LogisticL1Problem::constants() const {
  double a2 = 0.0;
  double ainf = 0.0;
  for (Eigen::Index i = 0; i < features_.rows(); ++i) {
    a2 = std::max(a2, features_.row(i).norm());
    ainf = std::max(ainf, features_.row(i).lpNorm<Eigen::Infinity>());
  }
  ProblemConstants c;
  c.B = Softplus(ainf * radius_);
  c.G = a2;
  c.L = 0.25 * a2 * a2;
  // max |sigma''| = 1 / (6 sqrt 3).
  c.L2 = a2 * a2 * a2 / (6.0 * std::sqrt(3.0));
  return c;
}

Sample LogisticL1Problem::SampleZ(const Vector& x, RngStream& rng) const {
  CheckX(*this, x);
  Sample s;
  s.index = static_cast<std::int64_t>(rng.UniformIndex(features_.rows()));
  return s;
}

double LogisticL1Problem::Value(const Vector& x, const Sample& z) const {
  CheckX(*this, x);
  if (z.index < 0 || z.index >= features_.rows()) Missing("value without a valid row index");
  const double m = labels_[z.index] * features_.row(z.index).dot(x);
  return Softplus(-m);
}

Vector LogisticL1Problem::Gradient(const Vector& x, const Sample& z) const {
  CheckX(*this, x);
  if (z.index < 0 || z.index >= features_.rows()) Missing("gradient without a valid row index");
  const double y = labels_[z.index];
  const double m = y * features_.row(z.index).dot(x);
  return (-y * Sigmoid(-m)) * features_.row(z.index).transpose();
}

Vector LogisticL1Problem::HessianVec(const Vector& x, const Sample& z, const Vector& u) const {
  CheckX(*this, x);
  if (z.index < 0 || z.index >= features_.rows()) Missing("hessian_vec without a row index");
  const auto a = features_.row(z.index);
  const double s = Sigmoid(a.dot(x));
  return (s * (1.0 - s) * a.dot(u)) * a.transpose();
}

double LogisticL1Problem::ExactValue(const Vector& x) const {
  CheckX(*this, x);
  double total = 0.0;
  for (Eigen::Index i = 0; i < features_.rows(); ++i) {
    total += Softplus(-labels_[i] * features_.row(i).dot(x));
  }
  return total / static_cast<double>(features_.rows());
}

Vector LogisticL1Problem::ExactGradient(const Vector& x) const {
  CheckX(*this, x);
  Vector g = Vector::Zero(dim());
  for (Eigen::Index i = 0; i < features_.rows(); ++i) {
    const double y = labels_[i];
    const double m = y * features_.row(i).dot(x);
    g += (-y * Sigmoid(-m)) * features_.row(i).transpose();
  }
  return g / static_cast<double>(features_.rows());
}

// ---------------------------------------------------------------------------
// Robust low-rank matrix recovery

RobustLrmrProblem::RobustLrmrProblem(int rows, int cols, std::vector<Rating> ratings,
                                     double sigma)
    : rows_(rows), cols_(cols), ratings_(std::move(ratings)), sigma_(sigma) {
  if (rows_ <= 0 || cols_ <= 0) Fail(Errc::kInvalidDimension, "RobustLRMR: empty shape");
  if (ratings_.empty()) Fail(Errc::kInvalidArgument, "RobustLRMR: no observed ratings");
  if (!(sigma_ > 0.0)) Fail(Errc::kInvalidArgument, "RobustLRMR: sigma must be > 0");
  for (const Rating& r : ratings_) {
    if (r.user < 0 || r.user >= rows_ || r.item < 0 || r.item >= cols_) {
      Fail(Errc::kInvalidArgument, "RobustLRMR: rating index out of range");
    }
    if (!std::isfinite(r.value)) Fail(Errc::kNumerical, "RobustLRMR: non-finite rating");
  }
}

std::shared_ptr<RobustLrmrProblem> RobustLrmrProblem::Synthetic(int rows, int cols, int rank,
                                                                int observed, double outliers,
                                                                double sigma, RngStream& rng) {
  Matrix u(rows, rank);
  Matrix v(cols, rank);
  for (int k = 0; k < rank; ++k) {
    for (int i = 0; i < rows; ++i) u(i, k) = rng.Normal();
    for (int j = 0; j < cols; ++j) v(j, k) = rng.Normal();
  }
  const Matrix x = u * v.transpose() / static_cast<double>(rank);
  std::vector<Rating> ratings;
  ratings.reserve(observed);
  for (int k = 0; k < observed; ++k) {
    Rating r;
    r.user = static_cast<int>(rng.UniformIndex(rows));
    r.item = static_cast<int>(rng.UniformIndex(cols));
    r.value = x(r.user, r.item);
    if (rng.Bernoulli(outliers)) r.value += 10.0 * rng.Normal();
    ratings.push_back(r);
  }
  return std::make_shared<RobustLrmrProblem>(rows, cols, std::move(ratings), sigma);
}

std::shared_ptr<RobustLrmrProblem> RobustLrmrProblem::FromCsv(const std::string& path,
                                                              double sigma) {
  const auto rows = ReadCsv(path);
  if (rows.front().size() != 3) Fail(Errc::kIo, path + ": expected user,item,rating triplets");
  std::vector<Rating> ratings;
  int max_user = -1;
  int max_item = -1;
  for (const auto& row : rows) {
    if (row[0] < 0 || row[1] < 0 || row[0] != std::floor(row[0]) || row[1] != std::floor(row[1])) {
      Fail(Errc::kIo, path + ": user and item must be non-negative integers");
    }
    Rating r{static_cast<int>(row[0]), static_cast<int>(row[1]), row[2]};
    max_user = std::max(max_user, r.user);
    max_item = std::max(max_item, r.item);
    ratings.push_back(r);
  }
  return std::make_shared<RobustLrmrProblem>(max_user + 1, max_item + 1, std::move(ratings),
                                             sigma);
}

double RobustLrmrProblem::Psi(double r) const { return 1.0 - std::exp(-r * r / (2.0 * sigma_)); }

double RobustLrmrProblem::PsiPrime(double r) const {
  return (r / sigma_) * std::exp(-r * r / (2.0 * sigma_));
}

double RobustLrmrProblem::PsiSecond(double r) const {
  return (1.0 / sigma_) * (1.0 - r * r / sigma_) * std::exp(-r * r / (2.0 * sigma_));
}

unsigned RobustLrmrProblem::capabilities() const {
  return kCapValue | kCapGradient | kCapHessianVec | kCapExactReference;
}

ProblemConstants RobustLrmrProblem::constants() const {
  ProblemConstants c;
  c.B = 1.0;
  c.G = std::exp(-0.5) / std::sqrt(sigma_);
  c.L = 1.0 / sigma_;
  // psi''' (r) = (r / sigma^2)(r^2 / sigma - 3) exp(-r^2 / 2 sigma); maximize
  // on a grid in units of sqrt(sigma).
  double best = 0.0;
  for (int k = 0; k <= 4000; ++k) {
    const double r = k * 1e-3 * std::sqrt(sigma_);
    const double v = (r / (sigma_ * sigma_)) * (r * r / sigma_ - 3.0) *
                     std::exp(-r * r / (2.0 * sigma_));
    best = std::max(best, std::abs(v));
  }
  c.L2 = best;
  return c;
}

Sample RobustLrmrProblem::SampleZ(const Vector& x, RngStream& rng) const {
  CheckX(*this, x);
  Sample s;
  s.index = static_cast<std::int64_t>(rng.UniformIndex(ratings_.size()));
  return s;
}

double RobustLrmrProblem::Value(const Vector& x, const Sample& z) const {
  CheckX(*this, x);
  if (z.index < 0 || z.index >= num_components()) Missing("value without a rating index");
  const Rating& r = ratings_[z.index];
  return Psi(x[r.item * rows_ + r.user] - r.value);
}

Vector RobustLrmrProblem::Gradient(const Vector& x, const Sample& z) const {
  CheckX(*this, x);
  if (z.index < 0 || z.index >= num_components()) Missing("gradient without a rating index");
  const Rating& r = ratings_[z.index];
  const int k = r.item * rows_ + r.user;
  Vector g = Vector::Zero(dim());
  g[k] = PsiPrime(x[k] - r.value);
  return g;
}

Vector RobustLrmrProblem::HessianVec(const Vector& x, const Sample& z, const Vector& u) const {
  CheckX(*this, x);
  if (z.index < 0 || z.index >= num_components()) Missing("hessian_vec without a rating index");
  const Rating& r = ratings_[z.index];
  const int k = r.item * rows_ + r.user;
  Vector h = Vector::Zero(dim());
  h[k] = PsiSecond(x[k] - r.value) * u[k];
  return h;
}

double RobustLrmrProblem::ExactValue(const Vector& x) const {
  CheckX(*this, x);
  double total = 0.0;
  for (const Rating& r : ratings_) total += Psi(x[r.item * rows_ + r.user] - r.value);
  return total / static_cast<double>(ratings_.size());
}

Vector RobustLrmrProblem::ExactGradient(const Vector& x) const {
  CheckX(*this, x);
  Vector g = Vector::Zero(dim());
  for (const Rating& r : ratings_) {
    const int k = r.item * rows_ + r.user;
    g[k] += PsiPrime(x[k] - r.value);
  }
  return g / static_cast<double>(ratings_.size());
}

// ---------------------------------------------------------------------------
// Multilinear extensions

MultilinearProblem::MultilinearProblem(SetFunctionPtr f, double margin)
    : f_(std::move(f)), margin_(margin) {
  if (!f_) Fail(Errc::kInvalidArgument, "Multilinear: null set function");
  if (!(margin_ > 0.0 && margin_ <= 0.5)) {
    Fail(Errc::kInvalidArgument, "Multilinear: margin must lie in (0, 0.5]");
  }
  if (f_->ground_size() <= kMaxEnumerationDim) {
    oracle_ = std::make_shared<const MultilinearOracle>(*f_);
  }
}

unsigned MultilinearProblem::capabilities() const {
  unsigned caps = kCapValue | kCapGradient | kCapHessianVec | kCapLogpGrad | kCapLogpHessVec;
  if (oracle_) caps |= kCapExactReference;
  return caps;
}

ProblemConstants MultilinearProblem::constants() const {
  const double d = static_cast<double>(dim());
  ProblemConstants c;
  c.B = f_->bound();
  c.G = std::sqrt(d) / margin_;
  c.L = 1.0 / (margin_ * margin_);
  c.L2 = 2.0 / (margin_ * margin_ * margin_);
  return c;
}

Vector MultilinearProblem::ClampToDomain(const Vector& x) const {
  CheckX(*this, x);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= -kBernoulliClamp && x[i] <= 1.0 + kBernoulliClamp)) {
      Fail(Errc::kDomain, name() + ": coordinate " + std::to_string(i) + " = " +
                              std::to_string(x[i]) + " outside [0, 1]");
    }
  }
  return x.cwiseMax(kBernoulliClamp).cwiseMin(1.0 - kBernoulliClamp);
}

Sample MultilinearProblem::SampleZ(const Vector& x, RngStream& rng) const {
  const Vector xc = ClampToDomain(x);
  Sample s;
  s.subset.assign(dim(), 0);
  for (int i = 0; i < dim(); ++i) s.subset[i] = rng.Uniform() < xc[i] ? 1 : 0;
  s.logp_grad = LogpGrad(xc, s);
  return s;
}

double MultilinearProblem::Value(const Vector& x, const Sample& z) const {
  CheckX(*this, x);
  return f_->Eval(z.subset);
}

Vector MultilinearProblem::Gradient(const Vector& x, const Sample&) const {
  CheckX(*this, x);
  return Vector::Zero(dim());
}

Vector MultilinearProblem::HessianVec(const Vector& x, const Sample&, const Vector&) const {
  CheckX(*this, x);
  return Vector::Zero(dim());
}

Vector MultilinearProblem::LogpGrad(const Vector& x, const Sample& z) const {
  const Vector xc = ClampToDomain(x);
  if (static_cast<int>(z.subset.size()) != dim()) Missing("logp_grad without a subset sample");
  Vector g(dim());
  for (int i = 0; i < dim(); ++i) g[i] = z.subset[i] ? 1.0 / xc[i] : -1.0 / (1.0 - xc[i]);
  return g;
}

Vector MultilinearProblem::LogpHessVec(const Vector& x, const Sample& z, const Vector& u) const {
  const Vector xc = ClampToDomain(x);
  if (static_cast<int>(z.subset.size()) != dim()) Missing("logp_hess_vec without a subset");
  RequireSameDim(x, u, "LogpHessVec");
  Vector h(dim());
  for (int i = 0; i < dim(); ++i) {
    const double diag = z.subset[i] ? -1.0 / (xc[i] * xc[i])
                                    : -1.0 / ((1.0 - xc[i]) * (1.0 - xc[i]));
    h[i] = diag * u[i];
  }
  return h;
}

double MultilinearProblem::LogDensity(const Vector& x, const Sample& z) const {
  const Vector xc = ClampToDomain(x);
  double lp = 0.0;
  for (int i = 0; i < dim(); ++i) lp += z.subset[i] ? std::log(xc[i]) : std::log1p(-xc[i]);
  return lp;
}

double MultilinearProblem::ExactValue(const Vector& x) const {
  CheckX(*this, x);
  if (auto v = f_->MultilinearValue(x)) return *v;
  if (!oracle_) Missing("exact_reference (d exceeds enumeration budget)");
  return oracle_->Value(x);
}

Vector MultilinearProblem::ExactGradient(const Vector& x) const {
  CheckX(*this, x);
  if (!oracle_) Missing("exact_reference (d exceeds enumeration budget)");
  return oracle_->Gradient(x);
}

// ---------------------------------------------------------------------------
// Finite sums of fixed samples

FiniteSumProblem::FiniteSumProblem(ProblemPtr base, std::vector<Sample> samples)
    : base_(std::move(base)), samples_(std::move(samples)) {
  if (!base_) Fail(Errc::kInvalidArgument, "FiniteSum: null base problem");
  if (base_->mode() != ProblemMode::kOblivious) {
    Fail(Errc::kMode, "FiniteSum: base problem must be oblivious");
  }
  if (samples_.empty()) Fail(Errc::kInvalidArgument, "FiniteSum: no samples");
}

unsigned FiniteSumProblem::capabilities() const {
  unsigned caps = base_->capabilities() & (kCapValue | kCapGradient | kCapHessianVec);
  if (caps & kCapValue) caps |= kCapExactReference;
  return caps;
}

const Sample& FiniteSumProblem::Resolve(const Sample& z) const {
  if (z.index < 0 || z.index >= num_components()) {
    Fail(Errc::kInvalidArgument, "FiniteSum: component index out of range");
  }
  return samples_[z.index];
}

Sample FiniteSumProblem::SampleZ(const Vector& x, RngStream& rng) const {
  CheckX(*this, x);
  Sample s;
  s.index = static_cast<std::int64_t>(rng.UniformIndex(samples_.size()));
  return s;
}

double FiniteSumProblem::Value(const Vector& x, const Sample& z) const {
  return base_->Value(x, Resolve(z));
}

Vector FiniteSumProblem::Gradient(const Vector& x, const Sample& z) const {
  return base_->Gradient(x, Resolve(z));
}

Vector FiniteSumProblem::HessianVec(const Vector& x, const Sample& z, const Vector& u) const {
  return base_->HessianVec(x, Resolve(z), u);
}

double FiniteSumProblem::ExactValue(const Vector& x) const {
  double total = 0.0;
  for (const Sample& s : samples_) total += base_->Value(x, s);
  return total / static_cast<double>(samples_.size());
}

Vector FiniteSumProblem::ExactGradient(const Vector& x) const {
  Vector g = Vector::Zero(dim());
  for (const Sample& s : samples_) g += base_->Gradient(x, s);
  return g / static_cast<double>(samples_.size());
}

// ---------------------------------------------------------------------------
// Construction from key/value specs

std::vector<std::string> ProblemParamKeys(const std::string& name) {
  if (name == "Quadratic") return {"dim", "sigma", "target", "target_scale", "radius"};
  if (name == "NQP") return {"dim", "sigma"};
  if (name == "LogisticL1") return {"data", "n", "dim", "flip", "radius"};
  if (name == "RobustLRMR") {
    return {"data", "rows", "cols", "rank", "observed", "outliers", "sigma"};
  }
  if (name == "MultilinearFacilityLocation" || name == "MultilinearConcaveModular") {
    return {"dim", "margin", "users"};
  }
  if (name == "MultilinearCoverage") return {"dim", "margin", "topics"};
  if (name == "MultilinearLogDet") return {"dim", "margin", "rank"};
  if (name == "MultilinearModular") return {"dim", "margin", "weights"};
  if (name == "MultilinearTable") return {"dim", "margin", "scale"};
  Fail(Errc::kConfig, "unknown problem name '" + name + "'");
}

SetFunctionPtr BuildSetFunction(const ProblemSpec& spec) {
  RngStream rng(spec.seed, MixLabel(0x70726F626C656DULL, 1));
  const std::string& n = spec.name;
  if (n == "MultilinearModular") {
    const std::vector<double> w = GetList(spec, "weights");
    if (!w.empty()) {
      return std::make_shared<Modular>(Eigen::Map<const Vector>(w.data(), w.size()));
    }
    return std::make_shared<Modular>(Vector::Ones(RequireDimParam(spec)));
  }
  const int d = RequireDimParam(spec);
  if (n == "MultilinearFacilityLocation") {
    return FacilityLocation::Random(GetInt(spec, "users", 20), d, rng);
  }
  if (n == "MultilinearCoverage") return Coverage::Random(GetInt(spec, "topics", 10), d, rng);
  if (n == "MultilinearConcaveModular") {
    return ConcaveModular::Random(GetInt(spec, "users", 20), d, rng);
  }
  if (n == "MultilinearLogDet") return LogDet::Random(d, GetInt(spec, "rank", d), rng);
  if (n == "MultilinearTable") return TableSetFunction::Random(d, GetDouble(spec, "scale", 1.0), rng);
  Fail(Errc::kConfig, "problem '" + n + "' is not a set-function problem");
}

ProblemPtr BuildProblem(const ProblemSpec& spec) {
  const std::vector<std::string> keys = ProblemParamKeys(spec.name);
  for (const auto& [k, v] : spec.params) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      Fail(Errc::kConfig, "problem '" + spec.name + "': unknown key '" + k + "'");
    }
  }
  RngStream rng(spec.seed, MixLabel(0x70726F626C656DULL, 0));
  const std::string& n = spec.name;
  if (n == "Quadratic") {
    std::vector<double> t = GetList(spec, "target");
    Vector target;
    if (!t.empty()) {
      target = Eigen::Map<const Vector>(t.data(), t.size());
    } else {
      const int d = RequireDimParam(spec);
      const double scale = GetDouble(spec, "target_scale", 0.5);
      target = Vector(d);
      for (int i = 0; i < d; ++i) target[i] = scale * (2.0 * rng.Uniform() - 1.0);
    }
    return std::make_shared<QuadraticProblem>(std::move(target), GetDouble(spec, "sigma", 0.0),
                                              GetDouble(spec, "radius", 1.0));
  }
  if (n == "NQP") return NqpProblem::Random(RequireDimParam(spec), GetDouble(spec, "sigma", 0.0), rng);
  if (n == "LogisticL1") {
    const double radius = GetDouble(spec, "radius", 1.0);
    if (const std::string* path = Find(spec, "data")) return LogisticL1Problem::FromCsv(*path, radius);
    auto p = LogisticL1Problem::Synthetic(GetInt(spec, "n", 100), RequireDimParam(spec),
                                          GetDouble(spec, "flip", 0.1), rng);
    return std::make_shared<LogisticL1Problem>(p->features(), p->labels(), radius);
  }
  if (n == "RobustLRMR") {
    const double sigma = GetDouble(spec, "sigma", 1.0);
    if (const std::string* path = Find(spec, "data")) return RobustLrmrProblem::FromCsv(*path, sigma);
    return RobustLrmrProblem::Synthetic(GetInt(spec, "rows", 10), GetInt(spec, "cols", 10),
                                        GetInt(spec, "rank", 2), GetInt(spec, "observed", 60),
                                        GetDouble(spec, "outliers", 0.1), sigma, rng);
  }
  return std::make_shared<MultilinearProblem>(BuildSetFunction(spec),
                                              GetDouble(spec, "margin", 0.05));
}

}  // namespace sfw
