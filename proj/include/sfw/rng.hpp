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

#ifndef SFW_RNG_HPP_
#define SFW_RNG_HPP_

#include <array>
#include <cstdint>

#include "sfw/core.hpp"

namespace sfw {

/// Counter-based random stream (Philox4x32-10).
///
/// The output is a pure function of (seed, stream_id, counter), so a stream
/// reproduces bit-identically on every platform and child streams derived by
/// Split() do not depend on how much of the parent has been consumed. All
/// floating-point transforms (uniform, normal) are implemented here rather
/// than through <random> distributions, whose algorithms are unspecified.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  // Child stream keyed by `label`. Independent of the parent's position.
  RngStream Split(std::uint64_t label) const;
  RngStream Split(std::uint64_t label, std::uint64_t index) const;

  std::uint64_t NextU64();
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  // Uniform on (0, 1).
  double UniformOpen();
  double Normal();
  bool Bernoulli(double p);
  // Uniform on {0, ..., n-1}; n > 0.
  std::uint64_t UniformIndex(std::uint64_t n);

 private:
  void Refill();

  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t MixLabel(std::uint64_t a, std::uint64_t b);

// Uniform on the unit sphere S^{d-1}, by normalizing a Gaussian vector.
Vector SampleUnitSphere(RngStream& rng, int d);

// Uniform on the unit ball B^d: a sphere direction scaled by U^{1/d}.
Vector SampleUnitBall(RngStream& rng, int d);

}  // namespace sfw

#endif  // SFW_RNG_HPP_
