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

// Experiment orchestration, brute-force optima and report emission.
//
// A run writes <out>/<name>-<hash>-s<seed>[-<variant>].trace.csv and a
// .meta.json sidecar next to it. The report step writes <name>.report.csv
// (one row per run), <name>.summary.csv (aggregates per variant and metric)
// and <name>.dat (per-iteration means for gnuplot).

#ifndef SFW_BENCH_HPP_
#define SFW_BENCH_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sfw/config.hpp"
#include "sfw/constraints.hpp"
#include "sfw/set_function.hpp"
#include "sfw/solvers.hpp"

namespace sfw {

inline constexpr std::uint64_t kMaxBruteForceBases = 1000000;

struct BruteForceResult {
  double opt = 0.0;
  std::vector<int> set;
  std::uint64_t bases = 0;
};

// max f(S) over the bases of m by enumeration. Throws kBudget beyond
// kMaxBruteForceBases bases. Ties keep the first base in enumeration order
// (blocks in order, each block's subsets in lexicographic order).
BruteForceResult BruteForceOpt(const SetFunction& f, const PartitionMatroid& m);

// The step-size grid min(1, c / (t + 1)^a).
std::vector<double> SweepC();
std::vector<double> SweepA();

struct RunRow {
  std::string name;
  std::uint64_t seed = 0;
  std::string variant;  // "" for plain runs
  bool ok = true;
  std::string error;
  int rows = 0;
  double final_objective = kNotRecorded;
  double final_gap = kNotRecorded;
  double opt_ratio = kNotRecorded;
  double cum_bits = kNotRecorded;
  double bits_ratio = kNotRecorded;
  double runtime_ms = 0.0;
  std::string trace_path;
};

struct AggregateRow {
  std::string variant;
  std::string metric;
  int count = 0;
  double mean = kNotRecorded;
  double std = kNotRecorded;  // sample standard deviation, 0 for one value
  double min = kNotRecorded;
  double q25 = kNotRecorded;
  double median = kNotRecorded;
  double q75 = kNotRecorded;
  double max = kNotRecorded;
};

struct ExperimentResult {
  std::vector<RunRow> rows;
  std::vector<SolveTrace> traces;  // parallel to rows; empty for failed runs
  int failures = 0;
};

// Commands: solve, submax, bcg, dbg, distsim. Each seed (and sweep or
// comparison variant) runs in isolation: a failure is recorded on its row
// and the batch continues.
ExperimentResult RunExperiment(const RunConfig& cfg, const std::string& command);

std::string FormatDouble(double v);
// Header t,objective,fw_gap,est_error,oracle_calls,cum_bits,wall_ms, plus
// cum_bits_up,cum_bits_down for distributed runs.
void WriteTraceCsv(const SolveTrace& trace, bool distributed, std::ostream& out);

// Aggregates over successful rows, per variant, with linearly interpolated
// quantiles.
std::vector<AggregateRow> Aggregate(const std::vector<RunRow>& rows);

// Writes the report, summary and .dat files; returns the report path.
std::string EmitReport(const std::vector<RunRow>& rows, const std::vector<SolveTrace>& traces,
                       const std::string& dir, const std::string& name);

// Rebuilds report rows from the trace and sidecar files in dir.
std::vector<RunRow> RowsFromDirectory(const std::string& dir, const std::string& name,
                                      std::vector<SolveTrace>* traces = nullptr);

}  // namespace sfw

#endif  // SFW_BENCH_HPP_
