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

#ifndef SFW_CORE_HPP_
#define SFW_CORE_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sfw {

// Real coordinate containers. All arithmetic is double precision.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Errc {
  kInvalidDimension,
  kDimensionMismatch,
  kInvalidArgument,
  kInfeasible,
  kUnsupported,
  kCapability,
  kMode,
  kDomain,
  kBudget,
  kNumerical,
  kConfig,
  kIo,
};

const char* ErrcName(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void Fail(Errc code, const std::string& what);

struct Norms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

Norms ComputeNorms(const Vector& x);

bool AllFinite(const Vector& x);

// Throws kNumerical naming `context` if x carries a NaN or Inf.
void RequireFinite(const Vector& x, const std::string& context);

void RequireSameDim(const Vector& a, const Vector& b, const std::string& context);

// FNV-1a over the raw bytes of the coordinates. Used to compare replicas and
// to label iterates in traces.
std::uint64_t HashVector(const Vector& x);

std::uint64_t HashBytes(const void* data, std::size_t size,
                        std::uint64_t seed = 1469598103934665603ULL);

}  // namespace sfw

#endif  // SFW_CORE_HPP_
