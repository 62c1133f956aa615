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

// sfwbench: run solvers and simulations from INI configs.
//
// Exit codes: 0 ok, 2 configuration error, 3 runtime failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sfw/bench.hpp"
#include "sfw/config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Flags {
  std::string config;
  long long seed = -1;
  std::string seeds;
  std::string out;
  std::string name;
  std::vector<std::string> overrides;
};

sfw::RunConfig Load(const Flags& f) {
  if (f.config.empty()) sfw::Fail(sfw::Errc::kConfig, "--config is required");
  std::vector<std::string> ov = f.overrides;
  if (f.seed >= 0) ov.push_back("solver.seeds=" + std::to_string(f.seed));
  if (!f.seeds.empty()) ov.push_back("solver.seeds=" + f.seeds);
  if (!f.out.empty()) ov.push_back("experiment.out=" + f.out);
  return sfw::LoadConfig(f.config, ov);
}

int RunCommand(const std::string& command, const Flags& f) {
  const sfw::RunConfig cfg = Load(f);
  const sfw::ExperimentResult res = sfw::RunExperiment(cfg, command);
  const std::string report = sfw::EmitReport(res.rows, res.traces, cfg.out_dir, cfg.name);
  for (const auto& row : res.rows) {
    std::printf("seed=%llu%s%s status=%s rows=%d objective=%s gap=%s opt_ratio=%s bits=%s\n",
                static_cast<unsigned long long>(row.seed), row.variant.empty() ? "" : " variant=",
                row.variant.c_str(), row.ok ? "ok" : "failed", row.rows,
                sfw::FormatDouble(row.final_objective).c_str(), sfw::FormatDouble(row.final_gap).c_str(),
                sfw::FormatDouble(row.opt_ratio).c_str(), sfw::FormatDouble(row.cum_bits).c_str());
    if (!row.ok) std::fprintf(stderr, "seed %llu failed: %s\n", static_cast<unsigned long long>(row.seed),
                              row.error.c_str());
  }
  std::printf("report: %s\n", report.c_str());
  return res.failures > 0 ? kExitRuntime : kExitOk;
}

int RunReport(const Flags& f) {
  if (f.out.empty()) sfw::Fail(sfw::Errc::kConfig, "report needs --out DIR");
  std::vector<sfw::SolveTrace> traces;
  const auto rows = sfw::RowsFromDirectory(f.out, f.name, &traces);
  if (rows.empty()) sfw::Fail(sfw::Errc::kConfig, "no runs found in '" + f.out + "'");
  const std::string name = f.name.empty() ? rows.front().name : f.name;
  std::printf("report: %s\n", sfw::EmitReport(rows, traces, f.out, name).c_str());
  return kExitOk;
}

int RunOracle(const Flags& f) {
  const sfw::RunConfig cfg = Load(f);
  const sfw::SetFunctionPtr fn = sfw::BuildSetFunction(cfg.problem);
  const sfw::PartitionMatroid m = sfw::BuildMatroid(cfg.constraint, fn->ground_size());
  const sfw::BruteForceResult r = sfw::BruteForceOpt(*fn, m);
  nlohmann::json j{{"opt", r.opt}, {"set", r.set}, {"bases", r.bases}};
  std::cout << j.dump() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Frank-Wolfe benchmark harness"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "stochastic or deterministic FW on a minimization problem"},
      {"submax", "DR-submodular maximization over a multilinear extension"},
      {"bcg", "black-box continuous greedy"},
      {"dbg", "discrete black-box greedy with pipage rounding"},
      {"distsim", "quantized distributed FW simulation"},
      {"report", "rebuild the report of an output directory"},
      {"oracle", "brute-force optimum over a partition matroid"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "INI configuration file");
    auto* seed = sub->add_option("--seed", flags.seed, "single seed");
    sub->add_option("--seeds", flags.seeds, "seed range A..B")->excludes(seed);
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--name", flags.name, "experiment name filter (report)");
    sub->add_option("--override", flags.overrides, "section.key=value")->take_all();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "report") return RunReport(flags);
    if (command == "oracle") return RunOracle(flags);
    return RunCommand(command, flags);
  } catch (const sfw::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", sfw::ErrcName(e.code()), e.what());
    return e.code() == sfw::Errc::kConfig ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
