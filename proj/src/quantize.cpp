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

#include "sfw/quantize.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace sfw {
namespace {

// Lower level and Bernoulli parameter for ratio r in [0, 1].
void Split(double r, std::uint32_t s, std::uint32_t& l, double& q) {
  const double scaled = r * s;
  double fl = std::floor(scaled);
  if (fl > s - 1.0) fl = s - 1.0;
  l = static_cast<std::uint32_t>(fl);
  q = scaled - fl;
  if (q < 0.0) q = 0.0;
  if (q > 1.0) q = 1.0;
}

class BitWriter {
 public:
  void Put(std::uint32_t value, int width) {
    for (int b = width - 1; b >= 0; --b) {
      if (nbits_ % 8 == 0) bytes_.push_back(0);
      if ((value >> b) & 1u) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (nbits_ % 8));
      ++nbits_;
    }
  }
  std::vector<std::uint8_t> Take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::int64_t nbits_ = 0;
};

class BitReader {
 public:
  BitReader(const std::vector<std::uint8_t>& bytes, std::size_t offset)
      : bytes_(bytes), pos_(offset * 8) {}
  std::uint32_t Get(int width) {
    std::uint32_t v = 0;
    for (int b = 0; b < width; ++b) {
      const std::size_t byte = pos_ / 8;
      if (byte >= bytes_.size()) Fail(Errc::kIo, "Deserialize: truncated message");
      v = (v << 1) | ((bytes_[byte] >> (7 - pos_ % 8)) & 1u);
      ++pos_;
    }
    return v;
  }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_;
};

void CheckLevels(std::uint32_t s) {
  if (s == 0) Fail(Errc::kInvalidArgument, "quantize: s must be >= 1");
}

}  // namespace

int LevelBits(std::uint32_t s) {
  // ceil(log2(s + 1)) = bit width of s.
  return static_cast<int>(std::bit_width(s));
}

std::int64_t MessageBits(int d, std::uint32_t s) {
  CheckLevels(s);
  if (d < 0) Fail(Errc::kInvalidDimension, "MessageBits: negative dimension");
  return 32 + static_cast<std::int64_t>(d) * (LevelBits(s) + 1);
}

std::int64_t MessageBits(const QuantizedMessage& msg) { return MessageBits(msg.dim(), msg.s); }

QuantizedMessage EncodePartition(const Vector& g, std::uint32_t s, RngStream& rng) {
  CheckLevels(s);
  RequireFinite(g, "EncodePartition input");
  const int d = static_cast<int>(g.size());
  QuantizedMessage msg;
  msg.s = s;
  msg.signs.assign(d, 0);
  msg.levels.assign(d, 0);
  msg.inf_norm = d > 0 ? g.lpNorm<Eigen::Infinity>() : 0.0;
  msg.bits = MessageBits(d, s);
  if (msg.inf_norm == 0.0) return msg;
  for (int i = 0; i < d; ++i) {
    msg.signs[i] = g[i] > 0.0 ? 1 : (g[i] < 0.0 ? -1 : 0);
    std::uint32_t l;
    double q;
    Split(std::abs(g[i]) / msg.inf_norm, s, l, q);
    // One uniform per coordinate keeps the stream position data-independent.
    const double u = rng.Uniform();
    msg.levels[i] = l + (u < q ? 1u : 0u);
  }
  return msg;
}

QuantizedMessage EncodeSign(const Vector& g, RngStream& rng) { return EncodePartition(g, 1, rng); }

Vector Decode(const QuantizedMessage& msg) {
  const int d = msg.dim();
  Vector out(d);
  for (int i = 0; i < d; ++i) {
    out[i] = msg.signs[i] * (static_cast<double>(msg.levels[i]) / msg.s) * msg.inf_norm;
  }
  return out;
}

double ExactVariance(const Vector& g, std::uint32_t s) {
  CheckLevels(s);
  RequireFinite(g, "ExactVariance input");
  if (g.size() == 0) return 0.0;
  const double m = g.lpNorm<Eigen::Infinity>();
  if (m == 0.0) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    std::uint32_t l;
    double q;
    Split(std::abs(g[i]) / m, s, l, q);
    total += q * (1.0 - q);
  }
  return total * m * m / (static_cast<double>(s) * s);
}

std::vector<std::uint8_t> Serialize(const QuantizedMessage& msg) {
  BitWriter w;
  const float norm = static_cast<float>(msg.inf_norm);
  std::uint32_t raw;
  std::memcpy(&raw, &norm, sizeof(raw));
  std::vector<std::uint8_t> out(4);
  for (int k = 0; k < 4; ++k) out[k] = static_cast<std::uint8_t>(raw >> (8 * k));
  const int z = LevelBits(msg.s);
  for (int i = 0; i < msg.dim(); ++i) {
    w.Put(msg.signs[i] < 0 ? 1u : 0u, 1);
    w.Put(msg.levels[i], z);
  }
  const auto payload = w.Take();
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

QuantizedMessage Deserialize(const std::vector<std::uint8_t>& bytes, int d, std::uint32_t s) {
  CheckLevels(s);
  const std::int64_t bits = MessageBits(d, s);
  const std::size_t expected = 4 + static_cast<std::size_t>((bits - 32 + 7) / 8);
  if (bytes.size() != expected) {
    Fail(Errc::kIo, "Deserialize: expected " + std::to_string(expected) + " bytes, got " +
                        std::to_string(bytes.size()));
  }
  std::uint32_t raw = 0;
  for (int k = 0; k < 4; ++k) raw |= static_cast<std::uint32_t>(bytes[k]) << (8 * k);
  float norm;
  std::memcpy(&norm, &raw, sizeof(norm));
  QuantizedMessage msg;
  msg.s = s;
  msg.inf_norm = norm;
  msg.bits = bits;
  msg.signs.assign(d, 0);
  msg.levels.assign(d, 0);
  BitReader r(bytes, 4);
  const int z = LevelBits(s);
  for (int i = 0; i < d; ++i) {
    const bool negative = r.Get(1) != 0;
    msg.levels[i] = r.Get(z);
    if (msg.levels[i] > s) Fail(Errc::kIo, "Deserialize: level exceeds s");
    msg.signs[i] = msg.levels[i] == 0 ? 0 : (negative ? -1 : 1);
  }
  return msg;
}

}  // namespace sfw
