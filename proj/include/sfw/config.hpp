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

// Run configuration: an INI file with sections [experiment], [problem],
// [constraint], [solver] and an optional [distsim]. Every key is checked
// against the schema below before anything runs.
//
//   [experiment] name, out, threads, wall_time
//   [problem]    name, instance_seed, plus the keys of the named problem
//   [constraint] kind (l1 | box | simplex | matroid | nuclear), radius,
//                lower, upper, scale, blocks, budgets, rows, cols
//   [solver]     algorithm, schedule, option, T, seeds, eta_c, eta_a, sweep,
//                step, delta, l, batch, log_gap, log_est_error, mc_samples
//   [distsim]    setting, M, T, mode (quantized | unquantized | fl), s1, s2,
//                parallel, fl_local_steps, snc, compare, sigma, L, D
//
// distsim.s1 / distsim.s2 pin the up/down-link levels for every round
// (0 sends raw vectors); distsim.T overrides solver.T.
//
// Lists are comma-separated. `blocks` separates blocks with '|' and accepts
// ranges: "0-4|5-9". `seeds` is "A..B" or a list.

#ifndef SFW_CONFIG_HPP_
#define SFW_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sfw/constraints.hpp"
#include "sfw/problems.hpp"

namespace sfw {

struct ConstraintSpec {
  std::string kind = "l1";
  double radius = 1.0;
  double scale = 1.0;
  std::vector<double> lower;  // one value broadcasts
  std::vector<double> upper;
  std::vector<std::vector<int>> blocks;
  std::vector<int> budgets;
  int rows = 0;
  int cols = 0;
};

struct SolverSpec {
  std::string algorithm = "one_sfw";
  std::string schedule = "convex";  // convex | nonconvex | drmax
  std::string option = "exact_hessian";
  int T = 100;
  std::vector<std::uint64_t> seeds{1};
  // Custom step eta_t = min(1, c / (t + 1)^a) when eta_c > 0.
  double eta_c = 0.0;
  double eta_a = 1.0;
  bool sweep = false;
  std::string step = "two_over_t_plus_two";  // deterministic FW
  double delta = 0.02;
  int l = 1;
  int batch = 0;  // 0 selects d
  bool log_gap = false;
  bool log_est_error = false;
  int mc_samples = 2048;
};

struct DistsimSpec {
  std::string setting = "finite_convex";
  int M = 1;
  std::string mode = "quantized";
  int T = -1;   // -1: use solver.T
  long long s1 = -1;  // -1: theorem levels
  long long s2 = -1;
  bool parallel = false;
  int fl_local_steps = 1;
  bool snc = false;
  bool compare = false;  // also run the unquantized twin
  double sigma = 0.0;
  double L = 0.0;
  double D = 0.0;
};

struct RunConfig {
  std::string name = "experiment";
  std::string out_dir = ".";
  int threads = 1;
  bool wall_time = false;
  ProblemSpec problem;
  ConstraintSpec constraint;
  SolverSpec solver;
  std::optional<DistsimSpec> distsim;
  // Canonical section.key -> value view; the hash is taken over it.
  std::map<std::string, std::string> canonical;
  std::uint64_t hash = 0;
};

// Parses "A..B" or "a,b,c".
std::vector<std::uint64_t> ParseSeeds(const std::string& text);

// Parses and validates. Overrides are "section.key=value" and are applied
// before validation. Errors are kConfig and name the offending key.
RunConfig ParseConfigString(const std::string& text,
                            const std::vector<std::string>& overrides = {});
RunConfig LoadConfig(const std::string& path, const std::vector<std::string>& overrides = {});

// Builds the feasible set of dimension `dim` described by the spec.
FeasibleSet BuildConstraint(const ConstraintSpec& spec, int dim);
PartitionMatroid BuildMatroid(const ConstraintSpec& spec, int dim);

std::string HashHex(std::uint64_t h);

}  // namespace sfw

#endif  // SFW_CONFIG_HPP_
