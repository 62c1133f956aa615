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

// Set functions over a ground set [d] and their multilinear extensions.

#ifndef SFW_SET_FUNCTION_HPP_
#define SFW_SET_FUNCTION_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sfw/core.hpp"
#include "sfw/rng.hpp"

namespace sfw {

// Indicator vector of a subset of [d].
using Subset = std::vector<std::uint8_t>;

Subset SubsetFromIndices(int d, const std::vector<int>& indices);
std::vector<int> IndicesFromSubset(const Subset& s);
Subset SubsetFromMask(int d, std::uint64_t mask);

class SetFunction {
 public:
  virtual ~SetFunction() = default;

  virtual std::string name() const = 0;
  int ground_size() const { return ground_size_; }
  // sup |f(S)| over all S.
  double bound() const { return bound_; }
  bool monotone() const { return monotone_; }

  virtual double Eval(const Subset& s) const = 0;
  double EvalIndices(const std::vector<int>& indices) const;
  double EvalMask(std::uint64_t mask) const;

  // Closed-form multilinear extension, where one exists.
  virtual std::optional<double> MultilinearValue(const Vector& /*x*/) const {
    return std::nullopt;
  }

 protected:
  SetFunction(int ground_size, double bound, bool monotone);
  void set_bound(double bound) { bound_ = bound; }

 private:
  int ground_size_;
  double bound_;
  bool monotone_;
};

using SetFunctionPtr = std::shared_ptr<const SetFunction>;

// f(S) = (1/U) sum_u max_{j in S} W(u, j), W >= 0, f(empty) = 0.
class FacilityLocation : public SetFunction {
 public:
  explicit FacilityLocation(Matrix weights);
  static std::shared_ptr<FacilityLocation> Random(int users, int d, RngStream& rng);
  std::string name() const override { return "FacilityLocation"; }
  double Eval(const Subset& s) const override;
  const Matrix& weights() const { return weights_; }

 private:
  Matrix weights_;
};

// f(S) = sum_j w_j (1 - prod_{a in S} (1 - P(j, a))), P in [0, 1].
class Coverage : public SetFunction {
 public:
  Coverage(Matrix probs, Vector topic_weights);
  static std::shared_ptr<Coverage> Random(int topics, int d, RngStream& rng);
  std::string name() const override { return "Coverage"; }
  double Eval(const Subset& s) const override;
  std::optional<double> MultilinearValue(const Vector& x) const override;

 private:
  Matrix probs_;
  Vector topic_weights_;
};

// f(S) = sum_u (sum_{j in S} R(u, j))^{1/2}, R >= 0.
class ConcaveModular : public SetFunction {
 public:
  explicit ConcaveModular(Matrix ratings);
  static std::shared_ptr<ConcaveModular> Random(int users, int d, RngStream& rng);
  std::string name() const override { return "ConcaveModular"; }
  double Eval(const Subset& s) const override;

 private:
  Matrix ratings_;
};

// f(S) = log det(I + K_{S,S}) for a PSD kernel K.
class LogDet : public SetFunction {
 public:
  explicit LogDet(Matrix kernel);
  static std::shared_ptr<LogDet> Random(int d, int rank, RngStream& rng);
  std::string name() const override { return "LogDet"; }
  double Eval(const Subset& s) const override;

 private:
  Matrix kernel_;
};

// f(S) = sum_{i in S} w_i.
class Modular : public SetFunction {
 public:
  explicit Modular(Vector weights);
  std::string name() const override { return "Modular"; }
  double Eval(const Subset& s) const override;
  std::optional<double> MultilinearValue(const Vector& x) const override;
  const Vector& weights() const { return weights_; }

 private:
  Vector weights_;
};

// Arbitrary f given by its 2^d values, indexed by bitmask.
class TableSetFunction : public SetFunction {
 public:
  TableSetFunction(int d, std::vector<double> values, bool monotone);
  // Independent uniform values in [-scale, scale].
  static std::shared_ptr<TableSetFunction> Random(int d, double scale, RngStream& rng);
  std::string name() const override { return "Table"; }
  double Eval(const Subset& s) const override;

 private:
  std::vector<double> values_;
};

inline constexpr int kMaxEnumerationDim = 20;

// Exact multilinear extension by enumeration of all 2^d subsets. The table of
// f values is built once; each query costs O(d 2^d) (value, gradient) or
// O(d^2 2^d) (Hessian).
class MultilinearOracle {
 public:
  explicit MultilinearOracle(const SetFunction& f);

  int dim() const { return d_; }
  const std::vector<double>& table() const { return table_; }

  double Value(const Vector& x) const;
  // dF/dx_i = F(x | x_i = 1) - F(x | x_i = 0).
  Vector Gradient(const Vector& x) const;
  // d2F/dx_i dx_j by pinning both coordinates; zero diagonal.
  Matrix Hessian(const Vector& x) const;

 private:
  // Product-Bernoulli weights over all masks, with coordinates in `pinned`
  // fixed to zero.
  void Weights(const Vector& x, std::uint64_t pinned, std::vector<double>& w) const;

  int d_;
  std::vector<double> table_;
};

struct MultilinearExactResult {
  double value = 0.0;
  Vector grad;
  Matrix hess;
};

MultilinearExactResult MultilinearExact(const SetFunction& f, const Vector& x);

// Bits set in `mask` below d.
int PopCount(std::uint64_t mask);

}  // namespace sfw

#endif  // SFW_SET_FUNCTION_HPP_
