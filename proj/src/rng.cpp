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

#include "sfw/rng.hpp"

#include <cmath>
#include <numbers>

namespace sfw {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void MulHiLo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4> Philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    MulHiLo(kPhiloxM0, ctr[0], hi0, lo0);
    MulHiLo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t SplitMix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t MixLabel(std::uint64_t a, std::uint64_t b) {
  return SplitMix64(SplitMix64(a) ^ (b + 0x632BE59BD9B4E019ULL + (a << 6) + (a >> 2)));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {}

RngStream RngStream::Split(std::uint64_t label) const {
  return RngStream(seed_, MixLabel(stream_id_, label));
}

RngStream RngStream::Split(std::uint64_t label, std::uint64_t index) const {
  return RngStream(seed_, MixLabel(MixLabel(stream_id_, label), index));
}

void RngStream::Refill() {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
      static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                            static_cast<std::uint32_t>(seed_ >> 32)};
  const auto out = Philox4x32(ctr, key);
  buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  buffered_ = 2;
  ++counter_;
}

std::uint64_t RngStream::NextU64() {
  if (buffered_ == 0) Refill();
  return buffer_[2 - buffered_--];
}

double RngStream::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double RngStream::UniformOpen() {
  return (static_cast<double>(NextU64() >> 12) + 0.5) * 0x1.0p-52;
}

double RngStream::Normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = UniformOpen();
  const double u2 = Uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

bool RngStream::Bernoulli(double p) { return Uniform() < p; }

std::uint64_t RngStream::UniformIndex(std::uint64_t n) {
  if (n == 0) Fail(Errc::kInvalidArgument, "UniformIndex: empty range");
  // Rejection on the top of the range keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  while (true) {
    const std::uint64_t r = NextU64();
    if (r < limit) return r % n;
  }
}

Vector SampleUnitSphere(RngStream& rng, int d) {
  if (d <= 0) Fail(Errc::kInvalidDimension, "SampleUnitSphere: d must be >= 1");
  Vector u(d);
  while (true) {
    for (int i = 0; i < d; ++i) u[i] = rng.Normal();
    const double n = u.norm();
    if (n > 1e-300) return u / n;
  }
}

Vector SampleUnitBall(RngStream& rng, int d) {
  if (d <= 0) Fail(Errc::kInvalidDimension, "SampleUnitBall: d must be >= 1");
  Vector u = SampleUnitSphere(rng, d);
  const double r = std::pow(rng.Uniform(), 1.0 / d);
  return u * r;
}

}  // namespace sfw
