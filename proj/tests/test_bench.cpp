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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sfw/bench.hpp"
#include "sfw/config.hpp"
#include "sfw/set_function.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

const char* kQuadratic = R"(
[experiment]
name = quad

[problem]
name = Quadratic
dim = 4
sigma = 0.3
instance_seed = 2

[constraint]
kind = l1
radius = 1

[solver]
algorithm = one_sfw
T = 10
seeds = 1
)";

std::string TempDir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("sfw_bench_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string ConfigError(const std::string& text, const std::vector<std::string>& ov = {}) {
  try {
    sfw::ParseConfigString(text, ov);
  } catch (const sfw::Error& e) {
    if (e.code() == sfw::Errc::kConfig) return e.what();
    return std::string("wrong code: ") + e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = sfw::ParseConfigString(kQuadratic);
  CHECK(cfg.name == "quad");
  CHECK(cfg.problem.name == "Quadratic");
  CHECK(cfg.problem.seed == 2);
  CHECK(cfg.problem.params.at("dim") == "4");
  CHECK(cfg.solver.T == 10);
  CHECK(cfg.solver.seeds == std::vector<std::uint64_t>{1});
  CHECK_FALSE(cfg.distsim.has_value());

  CHECK(sfw::ParseSeeds("3..6") == std::vector<std::uint64_t>{3, 4, 5, 6});
  CHECK(sfw::ParseSeeds("7, 2,9") == std::vector<std::uint64_t>{7, 2, 9});
  CHECK_ERRC(sfw::ParseSeeds(""), sfw::Errc::kConfig);
  CHECK_ERRC(sfw::ParseSeeds("5..2"), sfw::Errc::kConfig);

  const auto ov = sfw::ParseConfigString(kQuadratic, {"solver.T=25", "solver.seeds=1..3"});
  CHECK(ov.solver.T == 25);
  CHECK(ov.solver.seeds.size() == 3);
  CHECK(ov.hash != cfg.hash);
  CHECK(sfw::ParseConfigString(kQuadratic).hash == cfg.hash);

  const auto m = sfw::ParseConfigString(std::string(kQuadratic) +
                                        "\n[distsim]\nM = 2\nmode = unquantized\n",
                                        {"constraint.kind=matroid", "constraint.blocks=0-1|2,3",
                                         "constraint.budgets=1,2"});
  CHECK(m.constraint.blocks == std::vector<std::vector<int>>{{0, 1}, {2, 3}});
  CHECK(m.constraint.budgets == std::vector<int>{1, 2});
  REQUIRE(m.distsim.has_value());
  CHECK(m.distsim->M == 2);
  CHECK(m.distsim->mode == "unquantized");
}

TEST_CASE("config schema errors name the key") {
  CHECK(ConfigError(kQuadratic, {"solver.learning_rate=0.1"}).find("learning_rate") != std::string::npos);
  CHECK(ConfigError(kQuadratic, {"problem.learning_rate=0.1"}).find("learning_rate") != std::string::npos);
  CHECK(ConfigError(kQuadratic, {"solver.T=ten"}).find("solver.T") != std::string::npos);
  CHECK(ConfigError(kQuadratic, {"solver.algorithm=adam"}).find("solver.algorithm") != std::string::npos);
  CHECK(ConfigError(kQuadratic, {"constraint.kind=sphere"}).find("constraint.kind") != std::string::npos);
  CHECK(ConfigError(kQuadratic, {"distsim.M=0"}).find("distsim.M") != std::string::npos);
  CHECK(ConfigError(kQuadratic, {"bogus.key=1"}).find("bogus") != std::string::npos);
  CHECK(ConfigError(kQuadratic, {"no_dot=1"}).find("no_dot") != std::string::npos);
  CHECK(ConfigError(kQuadratic, {"problem.name=Nope"}).find("Nope") != std::string::npos);
  CHECK(!ConfigError("[solver]\nT = 3\n").empty());
  CHECK(!ConfigError("[problem\nname=Quadratic\n").empty());
  CHECK_ERRC(sfw::LoadConfig("/nonexistent/config.ini"), sfw::Errc::kConfig);
}

TEST_CASE("brute force optimum") {
  SUBCASE("modular, one per block") {
    sfw::Modular f(Vec({0.3, 0.9, 0.5, 0.2}));
    sfw::PartitionMatroid m(4, {{0, 1}, {2, 3}}, {1, 1});
    const auto r = sfw::BruteForceOpt(f, m);
    CHECK(r.opt == doctest::Approx(1.4));
    CHECK(r.set == std::vector<int>{1, 2});
    CHECK(r.bases == 4);
  }
  SUBCASE("two independent enumerations agree") {
    sfw::RngStream rng(4, 0);
    for (int rep = 0; rep < 5; ++rep) {
      auto f = sfw::FacilityLocation::Random(12, 10, rng);
      sfw::PartitionMatroid m(10, {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}}, {2, 2});
      const auto r = sfw::BruteForceOpt(*f, m);
      CHECK(r.bases == 100);
      const auto bases = oracle::MatroidBaseVertices(10, m.blocks(), m.budgets());
      REQUIRE(bases.size() == 100);
      double best = -1;
      // Reverse order from the library's.
      for (auto it = bases.rbegin(); it != bases.rend(); ++it) {
        std::uint64_t mask = 0;
        for (int i = 0; i < 10; ++i) mask |= (*it)[i] > 0.5 ? (1ULL << i) : 0;
        best = std::max(best, f->EvalMask(mask));
      }
      CHECK(r.opt == best);
      CHECK(f->EvalIndices(r.set) == r.opt);
    }
  }
  SUBCASE("zero budgets") {
    sfw::RngStream rng(5, 0);
    auto f = sfw::Coverage::Random(5, 4, rng);
    sfw::PartitionMatroid m(4, {{0, 1}, {2, 3}}, {0, 0});
    const auto r = sfw::BruteForceOpt(*f, m);
    CHECK(r.opt == f->EvalMask(0));
    CHECK(r.set.empty());
  }
  SUBCASE("budget") {
    sfw::Modular f(sfw::Vector::Ones(60));
    std::vector<int> a, b;
    for (int i = 0; i < 30; ++i) a.push_back(i), b.push_back(30 + i);
    sfw::PartitionMatroid m(60, {a, b}, {15, 15});
    CHECK_ERRC(sfw::BruteForceOpt(f, m), sfw::Errc::kBudget);
  }
}

TEST_CASE("experiment rows, files and reproducibility") {
  const std::string dir = TempDir("repro");
  auto cfg = sfw::ParseConfigString(kQuadratic, {"experiment.out=" + dir});
  const auto res = sfw::RunExperiment(cfg, "solve");
  REQUIRE(res.rows.size() == 1);
  CHECK(res.failures == 0);
  const auto& row = res.rows[0];
  CHECK(row.ok);
  CHECK(row.rows == 10);
  CHECK(res.traces[0].records.size() == 10);
  CHECK(res.traces[0].records.back().feasible);
  CHECK(row.final_objective == res.traces[0].records.back().objective);
  CHECK(fs::exists(row.trace_path));
  const std::string first = Slurp(row.trace_path);
  std::istringstream lines(first);
  std::string line;
  int count = 0;
  std::getline(lines, line);
  CHECK(line == "t,objective,fw_gap,est_error,oracle_calls,cum_bits,wall_ms");
  while (std::getline(lines, line)) ++count;
  CHECK(count == 10);

  const auto again = sfw::RunExperiment(cfg, "solve");
  CHECK(Slurp(again.rows[0].trace_path) == first);

  // Single run: the report row is the trace's last row.
  const std::string report = sfw::EmitReport(res.rows, res.traces, dir, "quad");
  std::ifstream rep(report);
  std::getline(rep, line);
  std::getline(rep, line);
  CHECK(line.find(sfw::FormatDouble(res.traces[0].records.back().objective)) != std::string::npos);
  CHECK(fs::exists(dir + "/quad.summary.csv"));
  CHECK(fs::exists(dir + "/quad.dat"));

  std::vector<sfw::SolveTrace> traces;
  const auto back = sfw::RowsFromDirectory(dir, "quad", &traces);
  REQUIRE(back.size() == 1);
  CHECK(back[0].final_objective == row.final_objective);
  CHECK(traces[0].records.size() == 10);
  CHECK(traces[0].records[4].objective == res.traces[0].records[4].objective);
}

TEST_CASE("aggregates recompute from rows") {
  const std::string dir = TempDir("agg");
  auto cfg = sfw::ParseConfigString(kQuadratic, {"experiment.out=" + dir, "solver.seeds=1..50",
                                                 "experiment.threads=1"});
  const auto res = sfw::RunExperiment(cfg, "solve");
  REQUIRE(res.rows.size() == 50);
  double sum = 0;
  std::vector<double> v;
  for (const auto& r : res.rows) {
    sum += r.final_objective;
    v.push_back(r.final_objective);
  }
  const double mean = sum / 50;
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  for (const auto& a : sfw::Aggregate(res.rows)) {
    if (a.metric != "final_objective") continue;
    CHECK(a.count == 50);
    CHECK(std::abs(a.mean - mean) <= 1e-12);
    CHECK(std::abs(a.std - std::sqrt(ss / 49)) <= 1e-12);
    std::sort(v.begin(), v.end());
    CHECK(a.min == v.front());
    CHECK(a.max == v.back());
    CHECK(a.median == doctest::Approx((v[24] + v[25]) / 2));
  }

  // Interpolated quantiles on known values.
  std::vector<sfw::RunRow> rows(5);
  for (int k = 0; k < 5; ++k) rows[k].final_objective = k + 1;
  for (const auto& a : sfw::Aggregate(rows)) {
    if (a.metric != "final_objective") continue;
    CHECK(a.q25 == 2.0);
    CHECK(a.median == 3.0);
    CHECK(a.q75 == 4.0);
  }
}

TEST_CASE("failures stay isolated") {
  const std::string dir = TempDir("fail");
  auto cfg = sfw::ParseConfigString(
      "[experiment]\nname = bad\n[problem]\nname = LogisticL1\ndata = /nonexistent.csv\n[solver]\nseeds=1..3\n",
      {"experiment.out=" + dir});
  const auto res = sfw::RunExperiment(cfg, "solve");
  CHECK(res.failures == 3);
  for (const auto& r : res.rows) {
    CHECK_FALSE(r.ok);
    CHECK(!r.error.empty());
  }

  // One failing variant next to a healthy one: DR mode needs a multilinear
  // problem, the convex run does not.
  auto ok_cfg = sfw::ParseConfigString(kQuadratic, {"experiment.out=" + dir, "solver.seeds=1..2"});
  CHECK(sfw::RunExperiment(ok_cfg, "solve").failures == 0);
  CHECK(sfw::RunExperiment(ok_cfg, "submax").failures == 2);
}

TEST_CASE("sweep and distsim variants") {
  const std::string dir = TempDir("variants");
  auto sweep = sfw::ParseConfigString(kQuadratic, {"experiment.out=" + dir, "solver.sweep=true"});
  const auto s = sfw::RunExperiment(sweep, "solve");
  CHECK(s.rows.size() == 15);
  CHECK(s.failures == 0);
  CHECK(sfw::SweepC() == std::vector<double>{0.1, 0.25, 0.5, 1.0, 2.0});

  auto ds = sfw::ParseConfigString(R"(
[experiment]
name = qfw
[problem]
name = LogisticL1
n = 40
dim = 6
[solver]
T = 15
seeds = 1..2
[distsim]
M = 4
compare = true
)",
                                   {"experiment.out=" + dir});
  const auto d = sfw::RunExperiment(ds, "distsim");
  REQUIRE(d.rows.size() == 4);
  for (const auto& r : d.rows) {
    CHECK(r.ok);
    if (r.variant == "quantized") {
      CHECK(r.bits_ratio > 0);
      CHECK(r.bits_ratio < 1);
    }
  }
  std::ifstream tr(d.rows[0].trace_path);
  std::string header;
  std::getline(tr, header);
  CHECK(header == "t,objective,fw_gap,est_error,oracle_calls,cum_bits,wall_ms,cum_bits_up,cum_bits_down");
}
