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

// Frank-Wolfe drivers: one-sample stochastic FW (non-oblivious and
// oblivious), deterministic FW, momentum FW, black-box continuous greedy and
// its discrete variant.
//
// Iterations are numbered from 1. Record t describes iteration t: the
// estimate d_t against grad F(x_t), and the objective and gap at x_{t+1}.

#ifndef SFW_SOLVERS_HPP_
#define SFW_SOLVERS_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sfw/constraints.hpp"
#include "sfw/estimators.hpp"
#include "sfw/problems.hpp"
#include "sfw/rounding.hpp"
#include "sfw/set_function.hpp"

namespace sfw {

enum class SolveMode { kConvexMin, kNonConvexMin, kDRMax };

const char* SolveModeName(SolveMode mode);

struct Schedule {
  int T = 0;
  std::function<double(int)> eta_fn;  // eta_t, t >= 1
  std::function<double(int)> rho_fn;  // rho_t, t >= 2
  double alpha = 1.0;
  SolveMode mode = SolveMode::kConvexMin;
  std::string label;

  // rho_t = (t-1)^-1, eta_t = 1/t.
  static Schedule Convex(int T);
  // rho_t = (t-1)^-2/3, eta_t = T^-2/3.
  static Schedule NonConvex(int T);
  // rho_t = (t-1)^-1, eta_t = 1/T, x_1 = 0.
  static Schedule DRMax(int T);
};

// Throws kInvalidArgument unless eta_t lies in (0, 1] for every t <= T.
void ValidateSchedule(const Schedule& s);

inline constexpr double kNotRecorded = std::numeric_limits<double>::quiet_NaN();

struct IterationRecord {
  int t = 0;
  std::uint64_t x_hash = 0;
  double objective = kNotRecorded;
  double fw_gap = kNotRecorded;
  double est_error = kNotRecorded;  // |d_t - grad F(x_t)|^2
  std::int64_t oracle_calls = 0;
  std::int64_t cum_bits = -1;  // -1 when not a distributed run
  std::int64_t cum_bits_up = -1;
  std::int64_t cum_bits_down = -1;
  double wall_ms = kNotRecorded;
  bool feasible = true;
  double reference_objective = kNotRecorded;
  double reference_gap = kNotRecorded;
};

enum class OutputRule { kLast, kUniformRandomIterate };

struct SolveTrace {
  std::vector<IterationRecord> records;
  Vector output;
  OutputRule output_rule = OutputRule::kLast;
  int output_index = 0;  // iterate index of the output (x_1 is 1)
  std::int64_t samples = 0;
  bool all_feasible = true;
  std::vector<Vector> iterates;  // x_1 .. x_{T+1}, when kept
  std::vector<Vector> vertices;  // v_1 .. v_T, when kept
};

using VariationHook =
    std::function<void(int t, const Vector& x_t, const Vector& x_prev, const RngStream& iteration,
                       double delta, const VariationEstimate& estimate)>;

struct SolveOptions {
  bool log_objective = true;
  bool log_gap = false;
  bool log_est_error = false;
  bool check_feasibility = true;
  bool keep_iterates = false;
  bool keep_vertices = false;
  bool wall_time = false;
  int mc_samples = 2048;
  std::uint64_t log_seed = 0x6C6F67ULL;
  std::optional<Vector> x1;
  // Grad-Diff delta_t; defaults to the schedule derived from the problem
  // constants and the set diameter.
  std::function<double(int)> delta_fn;
  VariationHook variation_hook;
};

enum class HessianOption { kExactHessian, kGradDiff };

// Stochastic FW with one sample per iteration and the unbiased momentum
// estimator. Every iteration's rho-term uses the score-function gradient
// grad F~(x_t; z_t) + F~(x_t; z_t) grad log p(z_t; x_t).
SolveTrace OneSfw(const StochasticProblem& p, const FeasibleSet& set, const Schedule& sched,
                  HessianOption option, const RngStream& rng, const SolveOptions& opts = {});

// The same driver with the shared-sample gradient difference (STORM).
SolveTrace ObliviousSfw(const StochasticProblem& p, const FeasibleSet& set, const Schedule& sched,
                        const RngStream& rng, const SolveOptions& opts = {});

// Momentum-only estimator d_t = (1 - rho_t) d_{t-1} + rho_t g_t. An empty
// rho_fn selects rho_t = (t + 3)^-2/3.
SolveTrace ScgBaseline(const StochasticProblem& p, const FeasibleSet& set, const Schedule& sched,
                       const RngStream& rng, const SolveOptions& opts = {},
                       std::function<double(int)> rho_fn = {});

// max_{v in set} <v - x, -grad> = <x - lmo_min(grad), grad>.
double FwGap(const Vector& grad, const FeasibleSet& set, const Vector& x);

struct StepRule {
  enum class Kind { kTwoOverTPlusTwo, kFixed, kCustom };
  Kind kind = Kind::kTwoOverTPlusTwo;
  double eta = 0.0;
  std::function<double(int)> fn;

  static StepRule TwoOverTPlusTwo() { return {}; }
  static StepRule Fixed(double eta) { return {Kind::kFixed, eta, {}}; }
  static StepRule Custom(std::function<double(int)> fn) { return {Kind::kCustom, 0.0, std::move(fn)}; }
  // Step at iteration t >= 1 (the classical 2/(k+2) with k = t - 1).
  double At(int t) const;
};

using GradOracle = std::function<Vector(const Vector&)>;
using ValueFn = std::function<double(const Vector&)>;

SolveTrace DeterministicFw(const GradOracle& grad, const FeasibleSet& set, const Vector& x0, int T,
                           const StepRule& rule, const ValueFn& value = {},
                           bool keep_iterates = false);

struct BcgOptions {
  std::function<int(int)> batch_fn;   // default d
  std::function<double(int)> rho_fn;  // default 2 / (t + 3)^{2/3}
  bool keep_iterates = false;
};

struct BcgResult {
  Vector output;                 // x_{T+1} + delta 1
  std::vector<Vector> iterates;  // x_1 .. x_{T+1} in the shrunk frame
  std::vector<Vector> vertices;
  std::int64_t value_queries = 0;
  double delta = 0.0;
};

// Black-box continuous greedy over set, a subset of box = prod [0, a_i].
BcgResult Bcg(const ValueOracle& oracle, const FeasibleSet& set, const Box& box, int T,
              double delta, RngStream& rng, const BcgOptions& opts = {});

struct DbgOptions {
  int batch = 1;
  std::function<double(int)> rho_fn;
};

struct DbgResult {
  std::vector<int> set;
  double value = 0.0;
  Vector x_continuous;  // x_{T+1} + delta 1
  Vector x_base;        // raised to the base polytope before rounding
  PipageResult rounding;
  std::int64_t set_evaluations = 0;
};

// Black-box greedy over the multilinear extension of f with each F value
// replaced by the mean of l sampled f(S), then pipage rounding.
DbgResult Dbg(const SetFunction& f, const PartitionMatroid& m, int T, double delta, int l,
              RngStream& rng, const DbgOptions& opts = {});

}  // namespace sfw

#endif  // SFW_SOLVERS_HPP_
