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

// s-Partition gradient encoding. Sign encoding is the s = 1 case.
//
// Coordinate i is sent as a sign and a level in [0, s]; the receiver
// reconstructs sign * (level / s) * |g|_inf. The level is
// l + Bernoulli(s r - l) with r = |g_i| / |g|_inf and l = min(floor(s r), s - 1),
// which makes the reconstruction unbiased.

#ifndef SFW_QUANTIZE_HPP_
#define SFW_QUANTIZE_HPP_

#include <cstdint>
#include <vector>

#include "sfw/core.hpp"
#include "sfw/rng.hpp"

namespace sfw {

struct QuantizedMessage {
  std::vector<std::int8_t> signs;     // -1, 0 or +1
  std::vector<std::uint32_t> levels;  // each in [0, s]
  double inf_norm = 0.0;
  std::uint32_t s = 1;
  std::int64_t bits = 0;

  int dim() const { return static_cast<int>(levels.size()); }
};

// ceil(log2(s + 1)).
int LevelBits(std::uint32_t s);

// 32 + d (ceil(log2(s + 1)) + 1).
std::int64_t MessageBits(int d, std::uint32_t s);
std::int64_t MessageBits(const QuantizedMessage& msg);

QuantizedMessage EncodePartition(const Vector& g, std::uint32_t s, RngStream& rng);
QuantizedMessage EncodeSign(const Vector& g, RngStream& rng);

Vector Decode(const QuantizedMessage& msg);

// sum_i |g|_inf^2 q_i (1 - q_i) / s^2, with q_i the Bernoulli parameter of
// coordinate i.
double ExactVariance(const Vector& g, std::uint32_t s);

// Canonical byte layout: |g|_inf as an IEEE-754 binary32, little-endian,
// then for each coordinate a sign bit (1 = negative) followed by the
// ceil(log2(s + 1))-bit level, most significant bit first, packed MSB-first
// and zero-padded to a whole byte. The payload is exactly MessageBits bits
// before padding; s and d travel out of band. A zero level decodes with
// sign 0.
std::vector<std::uint8_t> Serialize(const QuantizedMessage& msg);
QuantizedMessage Deserialize(const std::vector<std::uint8_t>& bytes, int d, std::uint32_t s);

}  // namespace sfw

#endif  // SFW_QUANTIZE_HPP_
