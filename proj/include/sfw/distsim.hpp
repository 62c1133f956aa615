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

// In-process master/worker simulation of quantized Frank-Wolfe with
// SPIDER-style periods.
//
// Rounds are numbered t = 1, 2, ... and map to (period i, step k) with
// 1 <= k <= p_i. In round t worker m
//   * draws its mini-batch from RngStream rng.Split(kWorkerStream, m)
//     .Split(kBatchStream, t), one UniformIndex(n) per draw (finite sums,
//     local component j maps to global component m * n + j) or one SampleZ
//     per draw (stochastic settings);
//   * encodes with rng.Split(kWorkerStream, m).Split(kEncodeStream, t).
// The master encodes its average with rng.Split(kMasterStream, t). A
// non-convex run picks its output iterate with rng.Split(kOutputStream).

#ifndef SFW_DISTSIM_HPP_
#define SFW_DISTSIM_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sfw/constraints.hpp"
#include "sfw/problems.hpp"
#include "sfw/quantize.hpp"
#include "sfw/solvers.hpp"

namespace sfw {

inline constexpr std::uint64_t kWorkerStream = 0x776F726BULL;
inline constexpr std::uint64_t kBatchStream = 0x62617463ULL;
inline constexpr std::uint64_t kEncodeStream = 0x656E63ULL;
inline constexpr std::uint64_t kMasterStream = 0x6D617374ULL;
inline constexpr std::uint64_t kOutputStream = 0x6F757470ULL;
inline constexpr std::uint64_t kSncStream = 0x736E63ULL;

// Level value meaning "send the raw vector", charged 32 bits per entry.
inline constexpr std::uint32_t kUnquantizedLevel = 0;
inline constexpr std::uint32_t kMaxLevel = 1u << 16;

enum class QfwSetting { kFiniteConvex, kStochConvex, kFiniteNonConvex, kStochNonConvex };
enum class LinkMode { kQuantized, kUnquantized, kFederated };

const char* QfwSettingName(QfwSetting s);
QfwSetting ParseQfwSetting(const std::string& name);
const char* LinkModeName(LinkMode m);
LinkMode ParseLinkMode(const std::string& name);

struct QfwConfig {
  int M = 1;
  QfwSetting setting = QfwSetting::kFiniteConvex;
  std::int64_t n = 0;  // components per worker (finite-sum settings)
  int T = 0;           // rounds
  std::function<int(int i)> period;
  std::function<std::int64_t(int i, int k)> batch;
  // Anchor rounds (k = 1) use every local component instead of batch(i, 1).
  bool anchor_full = true;
  std::function<double(int i, int k, int t)> eta;
  std::function<std::uint32_t(int i, int k)> s1;  // up-link levels
  std::function<std::uint32_t(int i, int k)> s2;  // down-link levels
  LinkMode mode = LinkMode::kQuantized;
  bool parallel = false;
  int fl_local_steps = 1;
};

struct QfwConstants {
  double sigma = 0.0;
  double L = 0.0;
  double D = 0.0;
};

// Parameters of the convergence theorems. Levels and batches are rounded up
// and floored at 1; levels are capped at kMaxLevel. StochNonConvex uses the
// FiniteNonConvex parameters of its surrogate finite sum (n = T / M).
QfwConfig ScheduleFromTheorem(QfwSetting setting, std::int64_t n, int M, int d, int T,
                              const std::optional<QfwConstants>& constants = std::nullopt);

// Integer level for a real theorem value: ceil, floor 1, cap kMaxLevel.
std::uint32_t TheoremLevel(double value);

// Replaces both links by raw transmission.
void MakeUnquantized(QfwConfig& cfg);

struct LedgerEntry {
  enum class Direction { kUp, kDown };
  int round = 0;
  Direction direction = Direction::kUp;
  int worker = -1;  // -1 for the master broadcast
  std::int64_t bits = 0;
  std::uint32_t s = 0;
  int dim = 0;
};

struct BitLedger {
  std::vector<LedgerEntry> entries;
  std::int64_t up = 0;
  std::int64_t down = 0;

  void Charge(const LedgerEntry& e);
  std::int64_t total() const { return up + down; }
};

struct QfwRunOptions {
  bool log_gap = false;
  std::optional<Vector> x1;  // default: DefaultStart(set)
  bool keep_iterates = false;
  // When set, records the objective and gap of this problem as reference
  // columns (the true objective behind a surrogate finite sum).
  const StochasticProblem* reference = nullptr;
};

struct QfwResult {
  SolveTrace trace;
  BitLedger ledger;
  std::vector<double> anchor_errors;  // |gbar - grad f(x)| at each k = 1 round
  std::vector<std::uint64_t> round_hashes;
  bool federated = false;  // no convergence guarantee; may diverge
  ProblemPtr surrogate;    // set by RunSncQfw
};

QfwResult RunQfw(const StochasticProblem& p, const FeasibleSet& set, const QfwConfig& cfg,
                 const RngStream& rng, const QfwRunOptions& opts = {});

// Draws T samples, forms the finite sum f^ = (1/T) sum f~(x, z_j) split over
// the M workers, and runs QFW on it. cfg supplies M, T, mode and parallel;
// the schedule is replaced by the non-convex finite-sum preset unless
// keep_schedule is set.
QfwResult RunSncQfw(const ProblemPtr& p, const FeasibleSet& set, const QfwConfig& cfg,
                    const RngStream& rng, bool keep_schedule = false,
                    const QfwRunOptions& opts = {});

}  // namespace sfw

#endif  // SFW_DISTSIM_HPP_
