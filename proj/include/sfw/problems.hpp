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

// Stochastic problem instances and their oracle bundles.
//
// A problem is F(x) = E_{z ~ p(z; x)}[F~(x; z)]. Oblivious problems have a
// sampling law that ignores x. Non-oblivious problems (the multilinear
// extensions here) sample a subset from the product-Bernoulli law at x, and
// their gradient information flows through log p.

#ifndef SFW_PROBLEMS_HPP_
#define SFW_PROBLEMS_HPP_

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sfw/core.hpp"
#include "sfw/rng.hpp"
#include "sfw/set_function.hpp"

namespace sfw {

enum class ProblemMode { kOblivious, kNonOblivious };

enum Capability : unsigned {
  kCapValue = 1u << 0,
  kCapGradient = 1u << 1,
  kCapHessianVec = 1u << 2,
  kCapLogpGrad = 1u << 3,
  kCapLogpHessVec = 1u << 4,
  kCapExactReference = 1u << 5,
};

std::string CapabilityString(unsigned caps);

struct ProblemConstants {
  double B = kUnknown;   // |F~| bound
  double G = kUnknown;   // max of gradient bounds for F~ and log p
  double L = kUnknown;   // max of smoothness constants for F~ and log p
  double L2 = kUnknown;  // second-order smoothness
  bool estimated = false;

  static constexpr double kUnknown = std::numeric_limits<double>::infinity();
};

// sqrt(4B^2G^4 + 16G^4 + 4L^2 + 4B^2L^2).
double LBar(const ProblemConstants& c);

struct Sample {
  std::int64_t index = -1;  // row / component index (oblivious data problems)
  Subset subset;            // drawn subset (multilinear problems)
  Vector noise;             // additive noise draw (synthetic problems)
  Vector logp_grad;         // populated for non-oblivious problems
};

inline constexpr double kBernoulliClamp = 1e-9;

class StochasticProblem {
 public:
  virtual ~StochasticProblem() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual ProblemMode mode() const = 0;
  virtual unsigned capabilities() const = 0;
  virtual ProblemConstants constants() const = 0;
  bool Has(unsigned cap) const { return (capabilities() & cap) == cap; }

  virtual Sample SampleZ(const Vector& x, RngStream& rng) const = 0;

  // F~(x; z) and its derivatives.
  virtual double Value(const Vector& x, const Sample& z) const;
  virtual Vector Gradient(const Vector& x, const Sample& z) const;
  virtual Vector HessianVec(const Vector& x, const Sample& z, const Vector& u) const;
  // Derivatives of log p(z; x). Zero for oblivious problems.
  virtual Vector LogpGrad(const Vector& x, const Sample& z) const;
  virtual Vector LogpHessVec(const Vector& x, const Sample& z, const Vector& u) const;

  // Exact F and grad F where available (kCapExactReference).
  virtual double ExactValue(const Vector& x) const;
  virtual Vector ExactGradient(const Vector& x) const;

  // Projects x into the oracle's domain. Throws kDomain when x is further
  // than the clamp tolerance outside it.
  virtual Vector ClampToDomain(const Vector& x) const { return x; }

  // Finite-sum view: F = (1/N) sum_j F~(x; j). Zero for pure stochastic
  // problems.
  virtual std::int64_t num_components() const { return 0; }
  Sample Component(std::int64_t j) const;

 protected:
  [[noreturn]] void Missing(const char* what) const;
};

using ProblemPtr = std::shared_ptr<const StochasticProblem>;

// F~(x; z) = 1/2 |x - x*|^2 + z^T x with z ~ N(0, sigma^2 I).
class QuadraticProblem : public StochasticProblem {
 public:
  QuadraticProblem(Vector target, double sigma, double domain_radius = 1.0);
  std::string name() const override { return "Quadratic"; }
  int dim() const override { return static_cast<int>(target_.size()); }
  ProblemMode mode() const override { return ProblemMode::kOblivious; }
  unsigned capabilities() const override;
  ProblemConstants constants() const override;
  Sample SampleZ(const Vector& x, RngStream& rng) const override;
  double Value(const Vector& x, const Sample& z) const override;
  Vector Gradient(const Vector& x, const Sample& z) const override;
  Vector HessianVec(const Vector& x, const Sample& z, const Vector& u) const override;
  double ExactValue(const Vector& x) const override;
  Vector ExactGradient(const Vector& x) const override;

  const Vector& target() const { return target_; }
  double sigma() const { return sigma_; }

 private:
  Vector target_;
  double sigma_;
  double domain_radius_;
};

// F(x) = 1/2 x^T H x + b^T x with H entrywise <= 0 and b = -H^T 1. The
// stochastic oracle adds N(0, sigma^2 I) noise to the gradient.
class NqpProblem : public StochasticProblem {
 public:
  NqpProblem(Matrix h, Vector b, double sigma);
  // H_ij = -|N(0,1)|, b = -H^T 1.
  static std::shared_ptr<NqpProblem> Random(int d, double sigma, RngStream& rng);
  std::string name() const override { return "NQP"; }
  int dim() const override { return static_cast<int>(b_.size()); }
  ProblemMode mode() const override { return ProblemMode::kOblivious; }
  unsigned capabilities() const override;
  ProblemConstants constants() const override;
  Sample SampleZ(const Vector& x, RngStream& rng) const override;
  double Value(const Vector& x, const Sample& z) const override;
  Vector Gradient(const Vector& x, const Sample& z) const override;
  Vector HessianVec(const Vector& x, const Sample& z, const Vector& u) const override;
  double ExactValue(const Vector& x) const override;
  Vector ExactGradient(const Vector& x) const override;

  const Matrix& h() const { return h_; }
  const Vector& b() const { return b_; }

 private:
  Matrix h_;
  Matrix h_sym_;
  Vector b_;
  double sigma_;
};

// F~(x; i) = log(1 + exp(-y_i a_i^T x)) over rows of a dataset, y in {-1, +1}.
class LogisticL1Problem : public StochasticProblem {
 public:
  // labels > 0 map to +1, all others to -1. `radius` is the l1 radius of the
  // intended feasible set, used for the value bound.
  LogisticL1Problem(Matrix features, Vector labels, double radius = 1.0);
  // Rows a_i ~ N(0, I), labels from a random separating direction flipped
  // with probability `flip`.
  static std::shared_ptr<LogisticL1Problem> Synthetic(int n, int d, double flip, RngStream& rng);
  // Dense numeric CSV: first column label, remaining columns features.
  static std::shared_ptr<LogisticL1Problem> FromCsv(const std::string& path, double radius = 1.0);

  std::string name() const override { return "LogisticL1"; }
  int dim() const override { return static_cast<int>(features_.cols()); }
  ProblemMode mode() const override { return ProblemMode::kOblivious; }
  unsigned capabilities() const override;
  ProblemConstants constants() const override;
  Sample SampleZ(const Vector& x, RngStream& rng) const override;
  double Value(const Vector& x, const Sample& z) const override;
  Vector Gradient(const Vector& x, const Sample& z) const override;
  Vector HessianVec(const Vector& x, const Sample& z, const Vector& u) const override;
  double ExactValue(const Vector& x) const override;
  Vector ExactGradient(const Vector& x) const override;
  std::int64_t num_components() const override { return features_.rows(); }

  const Matrix& features() const { return features_; }
  const Vector& labels() const { return labels_; }

 private:
  Matrix features_;
  Vector labels_;
  double radius_;
};

struct Rating {
  int user = 0;
  int item = 0;
  double value = 0.0;
};

// Robust low-rank matrix recovery: F~(X; k) = psi(X_{u_k i_k} - r_k) with
// psi(z) = 1 - exp(-z^2 / (2 sigma)). X is flattened column-major.
class RobustLrmrProblem : public StochasticProblem {
 public:
  RobustLrmrProblem(int rows, int cols, std::vector<Rating> ratings, double sigma);
  // Ratings of a random rank-`rank` matrix on `observed` random entries, a
  // fraction `outliers` of them replaced by large corruptions.
  static std::shared_ptr<RobustLrmrProblem> Synthetic(int rows, int cols, int rank, int observed,
                                                      double outliers, double sigma,
                                                      RngStream& rng);
  // CSV triplets user,item,rating with 0-based indices.
  static std::shared_ptr<RobustLrmrProblem> FromCsv(const std::string& path, double sigma);

  std::string name() const override { return "RobustLRMR"; }
  int dim() const override { return rows_ * cols_; }
  ProblemMode mode() const override { return ProblemMode::kOblivious; }
  unsigned capabilities() const override;
  ProblemConstants constants() const override;
  Sample SampleZ(const Vector& x, RngStream& rng) const override;
  double Value(const Vector& x, const Sample& z) const override;
  Vector Gradient(const Vector& x, const Sample& z) const override;
  Vector HessianVec(const Vector& x, const Sample& z, const Vector& u) const override;
  double ExactValue(const Vector& x) const override;
  Vector ExactGradient(const Vector& x) const override;
  std::int64_t num_components() const override {
    return static_cast<std::int64_t>(ratings_.size());
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double Psi(double r) const;
  double PsiPrime(double r) const;
  double PsiSecond(double r) const;

 private:
  int rows_;
  int cols_;
  std::vector<Rating> ratings_;
  double sigma_;
};

// Multilinear extension of a set function, sampled through the
// product-Bernoulli law: z_i ~ Bernoulli(x_i) independently, F~(x; z) = f(z).
class MultilinearProblem : public StochasticProblem {
 public:
  // `margin` bounds min(x_i, 1 - x_i) over the intended feasible set and
  // sets the log-density constants G = sqrt(d)/m, L = 1/m^2, L2 = 2/m^3.
  MultilinearProblem(SetFunctionPtr f, double margin);

  std::string name() const override { return "Multilinear" + f_->name(); }
  int dim() const override { return f_->ground_size(); }
  ProblemMode mode() const override { return ProblemMode::kNonOblivious; }
  unsigned capabilities() const override;
  ProblemConstants constants() const override;
  Sample SampleZ(const Vector& x, RngStream& rng) const override;
  double Value(const Vector& x, const Sample& z) const override;
  Vector Gradient(const Vector& x, const Sample& z) const override;
  Vector HessianVec(const Vector& x, const Sample& z, const Vector& u) const override;
  Vector LogpGrad(const Vector& x, const Sample& z) const override;
  Vector LogpHessVec(const Vector& x, const Sample& z, const Vector& u) const override;
  double ExactValue(const Vector& x) const override;
  Vector ExactGradient(const Vector& x) const override;
  Vector ClampToDomain(const Vector& x) const override;

  double LogDensity(const Vector& x, const Sample& z) const;
  const SetFunction& set_function() const { return *f_; }
  SetFunctionPtr set_function_ptr() const { return f_; }
  // Null when d exceeds the enumeration budget.
  const MultilinearOracle* oracle() const { return oracle_.get(); }

 private:
  SetFunctionPtr f_;
  double margin_;
  std::shared_ptr<const MultilinearOracle> oracle_;
};

// Finite average of an oblivious problem over a fixed list of samples:
// F(x) = (1/N) sum_j F~(x; z_j). Component j is the sample with index j.
class FiniteSumProblem : public StochasticProblem {
 public:
  FiniteSumProblem(ProblemPtr base, std::vector<Sample> samples);

  std::string name() const override { return "FiniteSum(" + base_->name() + ")"; }
  int dim() const override { return base_->dim(); }
  ProblemMode mode() const override { return ProblemMode::kOblivious; }
  unsigned capabilities() const override;
  ProblemConstants constants() const override { return base_->constants(); }
  Sample SampleZ(const Vector& x, RngStream& rng) const override;
  double Value(const Vector& x, const Sample& z) const override;
  Vector Gradient(const Vector& x, const Sample& z) const override;
  Vector HessianVec(const Vector& x, const Sample& z, const Vector& u) const override;
  double ExactValue(const Vector& x) const override;
  Vector ExactGradient(const Vector& x) const override;
  std::int64_t num_components() const override {
    return static_cast<std::int64_t>(samples_.size());
  }

  const StochasticProblem& base() const { return *base_; }

 private:
  const Sample& Resolve(const Sample& z) const;

  ProblemPtr base_;
  std::vector<Sample> samples_;
};

// Key/value description of a problem, as read from a configuration file.
struct ProblemSpec {
  std::string name;
  std::map<std::string, std::string> params;
  std::uint64_t seed = 0;  // instance-generation seed for synthetic data
};

ProblemPtr BuildProblem(const ProblemSpec& spec);

// The keys BuildProblem accepts for `name`, for schema validation.
std::vector<std::string> ProblemParamKeys(const std::string& name);

// Builds the set function named by a multilinear spec (shared by the
// set-function solvers).
SetFunctionPtr BuildSetFunction(const ProblemSpec& spec);

}  // namespace sfw

#endif  // SFW_PROBLEMS_HPP_
