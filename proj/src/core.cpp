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

#include "sfw/core.hpp"

#include <cmath>

namespace sfw {

const char* ErrcName(Errc code) {
  switch (code) {
    case Errc::kInvalidDimension: return "invalid-dimension";
    case Errc::kDimensionMismatch: return "dimension-mismatch";
    case Errc::kInvalidArgument: return "invalid-argument";
    case Errc::kInfeasible: return "infeasible";
    case Errc::kUnsupported: return "unsupported";
    case Errc::kCapability: return "capability";
    case Errc::kMode: return "mode";
    case Errc::kDomain: return "domain";
    case Errc::kBudget: return "budget";
    case Errc::kNumerical: return "numerical";
    case Errc::kConfig: return "config";
    case Errc::kIo: return "io";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(ErrcName(code)) + ": " + what), code_(code) {}

void Fail(Errc code, const std::string& what) { throw Error(code, what); }

Norms ComputeNorms(const Vector& x) {
  Norms n;
  if (x.size() == 0) return n;
  n.l1 = x.lpNorm<1>();
  n.l2 = x.norm();
  n.linf = x.lpNorm<Eigen::Infinity>();
  return n;
}

bool AllFinite(const Vector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) return false;
  }
  return true;
}

void RequireFinite(const Vector& x, const std::string& context) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      Fail(Errc::kNumerical, context + ": non-finite coordinate " + std::to_string(i));
    }
  }
}

void RequireSameDim(const Vector& a, const Vector& b, const std::string& context) {
  if (a.size() != b.size()) {
    Fail(Errc::kDimensionMismatch, context + ": " + std::to_string(a.size()) +
                                       " vs " + std::to_string(b.size()));
  }
}

std::uint64_t HashBytes(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t HashVector(const Vector& x) {
  return HashBytes(x.data(), static_cast<std::size_t>(x.size()) * sizeof(double));
}

}  // namespace sfw
