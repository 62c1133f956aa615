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

#include "sfw/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sfw/distsim.hpp"

namespace sfw {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kRunStream = 0x72756EULL;

struct Task {
  std::uint64_t seed = 0;
  std::string variant;
  double eta_c = 0.0;  // sweep point, 0 when unused
  double eta_a = 1.0;
};

struct TaskOutput {
  RunRow row;
  SolveTrace trace;
  bool distributed = false;
  json extra = json::object();
};

void FillFromTrace(RunRow& row, const SolveTrace& trace) {
  row.rows = static_cast<int>(trace.records.size());
  if (trace.records.empty()) return;
  const IterationRecord& last = trace.records.back();
  row.final_objective = last.objective;
  row.final_gap = last.fw_gap;
  if (last.cum_bits >= 0) row.cum_bits = static_cast<double>(last.cum_bits);
}

Schedule MakeSchedule(const SolverSpec& s, SolveMode mode_hint, const Task& task) {
  Schedule sched;
  if (mode_hint == SolveMode::kDRMax || s.schedule == "drmax") {
    sched = Schedule::DRMax(s.T);
  } else if (s.schedule == "nonconvex") {
    sched = Schedule::NonConvex(s.T);
  } else {
    sched = Schedule::Convex(s.T);
  }
  const double c = task.eta_c > 0.0 ? task.eta_c : s.eta_c;
  const double a = task.eta_c > 0.0 ? task.eta_a : s.eta_a;
  if (c > 0.0) {
    sched.eta_fn = [c, a](int t) { return std::min(1.0, c / std::pow(t + 1.0, a)); };
    sched.label += "+custom";
  }
  return sched;
}

const MultilinearProblem& AsMultilinear(const StochasticProblem& p, const char* command) {
  const auto* ml = dynamic_cast<const MultilinearProblem*>(&p);
  if (ml == nullptr) {
    Fail(Errc::kConfig, std::string(command) + " needs a Multilinear* problem, got '" + p.name() + "'");
  }
  return *ml;
}

// OPT over the matroid bases when enumeration is affordable.
double MaybeOpt(const RunConfig& cfg, const SetFunction& f) {
  if (cfg.constraint.kind != "matroid") return kNotRecorded;
  const PartitionMatroid m = BuildMatroid(cfg.constraint, f.ground_size());
  if (m.CountBases() > kMaxBruteForceBases) return kNotRecorded;
  return BruteForceOpt(f, m).opt;
}

FeasibleSet ConstraintFor(const RunConfig& cfg, const StochasticProblem& p) {
  ConstraintSpec spec = cfg.constraint;
  if (spec.kind == "nuclear" && spec.rows == 0 && spec.cols == 0) {
    if (const auto* lr = dynamic_cast<const RobustLrmrProblem*>(&p)) {
      spec.rows = lr->rows();
      spec.cols = lr->cols();
    }
  }
  return BuildConstraint(spec, p.dim());
}

TaskOutput RunSolve(const RunConfig& cfg, const Task& task, bool submax) {
  TaskOutput out;
  const ProblemPtr p = BuildProblem(cfg.problem);
  const FeasibleSet set = ConstraintFor(cfg, *p);
  const SolverSpec& s = cfg.solver;
  const RngStream rng(task.seed, kRunStream);
  const Schedule sched = MakeSchedule(s, submax ? SolveMode::kDRMax : SolveMode::kConvexMin, task);
  SolveOptions opts;
  opts.log_gap = s.log_gap;
  opts.log_est_error = s.log_est_error;
  opts.mc_samples = s.mc_samples;
  opts.wall_time = cfg.wall_time;
  if (submax) AsMultilinear(*p, "submax");

  if (s.algorithm == "one_sfw") {
    const HessianOption option =
        s.option == "grad_diff" ? HessianOption::kGradDiff : HessianOption::kExactHessian;
    out.trace = OneSfw(*p, set, sched, option, rng, opts);
  } else if (s.algorithm == "oblivious_sfw") {
    out.trace = ObliviousSfw(*p, set, sched, rng, opts);
  } else if (s.algorithm == "scg") {
    out.trace = ScgBaseline(*p, set, sched, rng, opts);
  } else if (s.algorithm == "fw" && !submax) {
    if (!p->Has(kCapExactReference)) Fail(Errc::kConfig, "solver.algorithm=fw needs an exact gradient");
    StepRule rule = StepRule::TwoOverTPlusTwo();
    if (s.step == "fixed") rule = StepRule::Fixed(s.eta_c > 0.0 ? s.eta_c : 0.1);
    out.trace = DeterministicFw([&](const Vector& x) { return p->ExactGradient(x); }, set,
                                DefaultStart(set), s.T, rule,
                                [&](const Vector& x) { return p->ExactValue(x); });
  } else {
    Fail(Errc::kConfig, "solver.algorithm '" + s.algorithm + "' is not valid for " +
                            (submax ? "submax" : "solve"));
  }
  FillFromTrace(out.row, out.trace);
  if (submax) {
    const double opt = MaybeOpt(cfg, AsMultilinear(*p, "submax").set_function());
    if (std::isfinite(opt) && opt != 0.0) out.row.opt_ratio = p->ExactValue(out.trace.output) / opt;
  }
  out.extra["output_index"] = out.trace.output_index;
  out.extra["schedule"] = sched.label;
  return out;
}

TaskOutput RunBcg(const RunConfig& cfg, const Task& task) {
  TaskOutput out;
  const ProblemPtr p = BuildProblem(cfg.problem);
  const MultilinearProblem& ml = AsMultilinear(*p, "bcg");
  const FeasibleSet set = ConstraintFor(cfg, *p);
  const int d = p->dim();
  const int T = cfg.solver.T;
  RngStream rng(task.seed, kRunStream);
  BcgOptions bopts;
  bopts.keep_iterates = true;
  const int batch = cfg.solver.batch > 0 ? cfg.solver.batch : d;
  bopts.batch_fn = [batch](int) { return batch; };
  const ValueOracle oracle = [&](const Vector& y, RngStream&) { return ml.ExactValue(y); };
  const BcgResult res = Bcg(oracle, set, Box{Vector::Zero(d), Vector::Ones(d)}, T, cfg.solver.delta, rng, bopts);
  const Vector shift = Vector::Constant(d, res.delta);
  for (int t = 1; t <= T; ++t) {
    IterationRecord rec;
    rec.t = t;
    const Vector x = res.iterates[t] + shift;
    rec.x_hash = HashVector(x);
    rec.objective = ml.ExactValue(x);
    rec.oracle_calls = static_cast<std::int64_t>(2) * batch * t;
    rec.feasible = Contains(set, x);
    out.trace.all_feasible = out.trace.all_feasible && rec.feasible;
    out.trace.records.push_back(rec);
  }
  out.trace.output = res.output;
  out.trace.output_index = T + 1;
  FillFromTrace(out.row, out.trace);
  const double opt = MaybeOpt(cfg, ml.set_function());
  if (std::isfinite(opt) && opt != 0.0) out.row.opt_ratio = ml.ExactValue(res.output) / opt;
  out.extra["value_queries"] = res.value_queries;
  return out;
}

TaskOutput RunDbg(const RunConfig& cfg, const Task& task) {
  TaskOutput out;
  const SetFunctionPtr f = BuildSetFunction(cfg.problem);
  if (cfg.constraint.kind != "matroid") Fail(Errc::kConfig, "dbg needs constraint.kind=matroid");
  const PartitionMatroid m = BuildMatroid(cfg.constraint, f->ground_size());
  RngStream rng(task.seed, kRunStream);
  DbgOptions dopts;
  dopts.batch = cfg.solver.batch > 0 ? cfg.solver.batch : 1;
  const DbgResult res = Dbg(*f, m, cfg.solver.T, cfg.solver.delta, cfg.solver.l, rng, dopts);
  IterationRecord rec;
  rec.t = cfg.solver.T;
  Vector indicator = Vector::Zero(f->ground_size());
  for (int e : res.set) indicator[e] = 1.0;
  rec.x_hash = HashVector(indicator);
  rec.objective = res.value;
  rec.oracle_calls = res.set_evaluations;
  rec.feasible = m.IsBase(res.set);
  out.trace.all_feasible = rec.feasible;
  out.trace.records.push_back(rec);
  out.trace.output = indicator;
  FillFromTrace(out.row, out.trace);
  const double opt = m.CountBases() <= kMaxBruteForceBases ? BruteForceOpt(*f, m).opt : kNotRecorded;
  if (std::isfinite(opt) && opt != 0.0) out.row.opt_ratio = res.value / opt;
  out.extra["set"] = res.set;
  out.extra["pipage_exact"] = res.rounding.exact;
  return out;
}

TaskOutput RunDistsim(const RunConfig& cfg, const Task& task, bool force_unquantized) {
  TaskOutput out;
  out.distributed = true;
  if (!cfg.distsim) Fail(Errc::kConfig, "distsim needs a [distsim] section");
  const DistsimSpec& ds = *cfg.distsim;
  const ProblemPtr p = BuildProblem(cfg.problem);
  const FeasibleSet set = ConstraintFor(cfg, *p);
  const RngStream rng(task.seed, kRunStream);
  const QfwSetting setting = ParseQfwSetting(ds.setting);
  const int T = ds.T >= 0 ? ds.T : cfg.solver.T;
  QfwRunOptions ro;
  ro.log_gap = cfg.solver.log_gap;
  QfwResult res;
  if (ds.snc || setting == QfwSetting::kStochNonConvex) {
    QfwConfig qc;
    qc.M = ds.M;
    qc.T = T;
    qc.mode = force_unquantized ? LinkMode::kUnquantized : ParseLinkMode(ds.mode);
    qc.parallel = ds.parallel;
    res = RunSncQfw(p, set, qc, rng, false, ro);
  } else {
    std::optional<QfwConstants> constants;
    if (setting == QfwSetting::kStochConvex) constants = QfwConstants{ds.sigma, ds.L, ds.D};
    const std::int64_t N = p->num_components();
    QfwConfig qc = ScheduleFromTheorem(setting, N > 0 ? N / ds.M : 0, ds.M, p->dim(), T, constants);
    qc.mode = ParseLinkMode(ds.mode);
    qc.parallel = ds.parallel;
    qc.fl_local_steps = ds.fl_local_steps;
    if (ds.s1 >= 0) {
      const auto s1 = static_cast<std::uint32_t>(ds.s1);
      qc.s1 = [s1](int, int) { return s1; };
    }
    if (ds.s2 >= 0) {
      const auto s2 = static_cast<std::uint32_t>(ds.s2);
      qc.s2 = [s2](int, int) { return s2; };
    }
    if (force_unquantized || qc.mode == LinkMode::kUnquantized) MakeUnquantized(qc);
    res = RunQfw(*p, set, qc, rng, ro);
  }
  out.trace = std::move(res.trace);
  FillFromTrace(out.row, out.trace);
  out.extra["bits_up"] = res.ledger.up;
  out.extra["bits_down"] = res.ledger.down;
  out.extra["messages"] = res.ledger.entries.size();
  out.extra["federated_no_guarantee"] = res.federated;
  out.extra["output_index"] = out.trace.output_index;
  return out;
}

TaskOutput RunTask(const RunConfig& cfg, const std::string& command, const Task& task) {
  if (command == "solve") return RunSolve(cfg, task, false);
  if (command == "submax") return RunSolve(cfg, task, true);
  if (command == "bcg") return RunBcg(cfg, task);
  if (command == "dbg") return RunDbg(cfg, task);
  if (command == "distsim") return RunDistsim(cfg, task, task.variant == "unquantized");
  Fail(Errc::kConfig, "unknown command '" + command + "'");
}

std::string Stem(const RunConfig& cfg, const Task& task) {
  std::string stem = cfg.name + "-" + HashHex(cfg.hash) + "-s" + std::to_string(task.seed);
  if (!task.variant.empty()) stem += "-" + task.variant;
  return stem;
}

json RowJson(const RunRow& r) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return json{{"name", r.name},
              {"seed", r.seed},
              {"variant", r.variant},
              {"status", r.ok ? "ok" : "failed"},
              {"error", r.error},
              {"rows", r.rows},
              {"final_objective", num(r.final_objective)},
              {"final_gap", num(r.final_gap)},
              {"opt_ratio", num(r.opt_ratio)},
              {"cum_bits", num(r.cum_bits)},
              {"bits_ratio", num(r.bits_ratio)},
              {"runtime_ms", r.runtime_ms}};
}

double JsonNum(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return kNotRecorded;
  return j[key].get<double>();
}

double Quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double ParseCell(const std::string& s) {
  if (s.empty() || s == "nan") return kNotRecorded;
  return std::stod(s);
}

}  // namespace

BruteForceResult BruteForceOpt(const SetFunction& f, const PartitionMatroid& m) {
  if (f.ground_size() != m.ground_size()) {
    Fail(Errc::kDimensionMismatch, "BruteForceOpt: f and matroid ground sets differ");
  }
  const std::uint64_t count = m.CountBases();
  if (count > kMaxBruteForceBases) {
    Fail(Errc::kBudget, "BruteForceOpt: " + std::to_string(count) + " bases exceed the budget of " +
                            std::to_string(kMaxBruteForceBases));
  }
  BruteForceResult best;
  best.opt = -std::numeric_limits<double>::infinity();
  const auto& blocks = m.blocks();
  const auto& budgets = m.budgets();
  std::vector<int> chosen;
  // Depth-first over blocks; inside a block, lexicographic k-subsets.
  std::function<void(std::size_t)> block_step;
  std::function<void(std::size_t, std::size_t, int)> pick = [&](std::size_t b, std::size_t from, int left) {
    if (left == 0) {
      block_step(b + 1);
      return;
    }
    const auto& blk = blocks[b];
    for (std::size_t i = from; i + left <= blk.size(); ++i) {
      chosen.push_back(blk[i]);
      pick(b, i + 1, left - 1);
      chosen.pop_back();
    }
  };
  block_step = [&](std::size_t b) {
    if (b == blocks.size()) {
      ++best.bases;
      std::vector<int> s = chosen;
      std::sort(s.begin(), s.end());
      const double v = f.EvalIndices(s);
      if (v > best.opt) {
        best.opt = v;
        best.set = s;
      }
      return;
    }
    pick(b, 0, std::min<int>(budgets[b], static_cast<int>(blocks[b].size())));
  };
  block_step(0);
  return best;
}

std::vector<double> SweepC() { return {0.1, 0.25, 0.5, 1.0, 2.0}; }
std::vector<double> SweepA() { return {1.0, 2.0 / 3.0, 0.5}; }

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string Cell(double v) { return std::isnan(v) ? std::string() : FormatDouble(v); }

}  // namespace

void WriteTraceCsv(const SolveTrace& trace, bool distributed, std::ostream& out) {
  out << "t,objective,fw_gap,est_error,oracle_calls,cum_bits,wall_ms";
  if (distributed) out << ",cum_bits_up,cum_bits_down";
  out << "\n";
  for (const auto& r : trace.records) {
    out << r.t << ',' << Cell(r.objective) << ',' << Cell(r.fw_gap) << ',' << Cell(r.est_error)
        << ',' << r.oracle_calls << ',';
    if (r.cum_bits >= 0) out << r.cum_bits;
    out << ',' << Cell(r.wall_ms);
    if (distributed) out << ',' << r.cum_bits_up << ',' << r.cum_bits_down;
    out << "\n";
  }
}

ExperimentResult RunExperiment(const RunConfig& cfg, const std::string& command) {
  std::vector<Task> tasks;
  for (std::uint64_t seed : cfg.solver.seeds) {
    if (cfg.solver.sweep && (command == "solve" || command == "submax")) {
      for (double c : SweepC()) {
        for (double a : SweepA()) {
          char label[64];
          std::snprintf(label, sizeof(label), "c%g_a%.4g", c, a);
          tasks.push_back({seed, label, c, a});
        }
      }
    } else if (command == "distsim" && cfg.distsim && cfg.distsim->compare &&
               cfg.distsim->mode == "quantized") {
      tasks.push_back({seed, "quantized", 0.0, 1.0});
      tasks.push_back({seed, "unquantized", 0.0, 1.0});
    } else {
      tasks.push_back({seed, "", 0.0, 1.0});
    }
  }

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) Fail(Errc::kIo, "cannot create output directory '" + cfg.out_dir + "'");

  ExperimentResult result;
  result.rows.resize(tasks.size());
  result.traces.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      const Task& task = tasks[k];
      RunRow row;
      SolveTrace trace;
      bool distributed = command == "distsim";
      json extra = json::object();
      const auto start = std::chrono::steady_clock::now();
      try {
        TaskOutput o = RunTask(cfg, command, task);
        row = o.row;
        trace = std::move(o.trace);
        extra = o.extra;
        distributed = o.distributed;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      row.runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      row.name = cfg.name;
      row.seed = task.seed;
      row.variant = task.variant;
      const std::string stem = (fs::path(cfg.out_dir) / Stem(cfg, task)).string();
      if (row.ok) {
        row.trace_path = stem + ".trace.csv";
        std::ofstream csv(row.trace_path, std::ios::binary);
        WriteTraceCsv(trace, distributed, csv);
      }
      json meta = RowJson(row);
      meta["config_hash"] = HashHex(cfg.hash);
      meta["config"] = cfg.canonical;
      meta["command"] = command;
      meta["details"] = extra;
      std::ofstream(stem + ".meta.json") << meta.dump(2) << "\n";
      result.rows[k] = row;
      result.traces[k] = std::move(trace);
    }
  };
  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(tasks.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Bits ratio of each quantized run against its unquantized twin.
  for (auto& row : result.rows) {
    if (row.variant != "quantized" || !row.ok) continue;
    for (const auto& twin : result.rows) {
      if (twin.variant == "unquantized" && twin.seed == row.seed && twin.ok && twin.cum_bits > 0) {
        row.bits_ratio = row.cum_bits / twin.cum_bits;
      }
    }
  }
  for (const auto& row : result.rows) result.failures += row.ok ? 0 : 1;
  return result;
}

std::vector<AggregateRow> Aggregate(const std::vector<RunRow>& rows) {
  std::vector<std::string> variants;
  for (const auto& r : rows) {
    if (std::find(variants.begin(), variants.end(), r.variant) == variants.end()) variants.push_back(r.variant);
  }
  const std::vector<std::pair<std::string, double RunRow::*>> metrics = {
      {"final_objective", &RunRow::final_objective}, {"final_gap", &RunRow::final_gap},
      {"opt_ratio", &RunRow::opt_ratio},             {"cum_bits", &RunRow::cum_bits},
      {"bits_ratio", &RunRow::bits_ratio},           {"runtime_ms", &RunRow::runtime_ms}};
  std::vector<AggregateRow> out;
  for (const auto& variant : variants) {
    for (const auto& [metric, field] : metrics) {
      std::vector<double> v;
      for (const auto& r : rows) {
        if (r.ok && r.variant == variant && std::isfinite(r.*field)) v.push_back(r.*field);
      }
      AggregateRow a;
      a.variant = variant;
      a.metric = metric;
      a.count = static_cast<int>(v.size());
      if (!v.empty()) {
        double sum = 0.0;
        for (double x : v) sum += x;
        a.mean = sum / v.size();
        double ss = 0.0;
        for (double x : v) ss += (x - a.mean) * (x - a.mean);
        a.std = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
        a.min = *std::min_element(v.begin(), v.end());
        a.max = *std::max_element(v.begin(), v.end());
        a.q25 = Quantile(v, 0.25);
        a.median = Quantile(v, 0.5);
        a.q75 = Quantile(v, 0.75);
      }
      out.push_back(a);
    }
  }
  return out;
}

std::string EmitReport(const std::vector<RunRow>& rows, const std::vector<SolveTrace>& traces,
                       const std::string& dir, const std::string& name) {
  if (rows.empty()) Fail(Errc::kInvalidArgument, "EmitReport: no runs");
  std::error_code ec;
  fs::create_directories(dir, ec);
  const std::string base = (fs::path(dir) / name).string();

  std::ofstream rep(base + ".report.csv", std::ios::binary);
  rep << "name,seed,variant,status,rows,final_objective,final_gap,opt_ratio,cum_bits,bits_ratio,"
         "runtime_ms\n";
  for (const auto& r : rows) {
    rep << r.name << ',' << r.seed << ',' << r.variant << ',' << (r.ok ? "ok" : "failed") << ','
        << r.rows << ',' << FormatDouble(r.final_objective) << ',' << FormatDouble(r.final_gap) << ','
        << FormatDouble(r.opt_ratio) << ',' << FormatDouble(r.cum_bits) << ','
        << FormatDouble(r.bits_ratio) << ',' << FormatDouble(r.runtime_ms) << "\n";
  }

  std::ofstream sum(base + ".summary.csv", std::ios::binary);
  sum << "variant,metric,count,mean,std,min,q25,median,q75,max\n";
  for (const auto& a : Aggregate(rows)) {
    sum << a.variant << ',' << a.metric << ',' << a.count << ',' << FormatDouble(a.mean) << ','
        << FormatDouble(a.std) << ',' << FormatDouble(a.min) << ',' << FormatDouble(a.q25) << ','
        << FormatDouble(a.median) << ',' << FormatDouble(a.q75) << ',' << FormatDouble(a.max) << "\n";
  }

  // Per-iteration means: loss against oracle calls, and against bits for
  // distributed runs. One gnuplot data block per variant.
  std::ofstream dat(base + ".dat", std::ios::binary);
  std::vector<std::string> variants;
  for (const auto& r : rows) {
    if (std::find(variants.begin(), variants.end(), r.variant) == variants.end()) variants.push_back(r.variant);
  }
  bool first = true;
  for (const auto& variant : variants) {
    std::map<int, std::vector<const IterationRecord*>> by_t;
    for (std::size_t k = 0; k < rows.size() && k < traces.size(); ++k) {
      if (!rows[k].ok || rows[k].variant != variant) continue;
      for (const auto& rec : traces[k].records) by_t[rec.t].push_back(&rec);
    }
    if (!first) dat << "\n\n";
    first = false;
    dat << "# variant " << (variant.empty() ? "default" : variant) << "\n";
    dat << "# t oracle_calls_mean objective_mean objective_std fw_gap_mean cum_bits_mean runs\n";
    for (const auto& [t, recs] : by_t) {
      double calls = 0.0, obj = 0.0, gap = 0.0, bits = 0.0;
      int nobj = 0, ngap = 0, nbits = 0;
      for (const auto* r : recs) {
        calls += static_cast<double>(r->oracle_calls);
        if (std::isfinite(r->objective)) obj += r->objective, ++nobj;
        if (std::isfinite(r->fw_gap)) gap += r->fw_gap, ++ngap;
        if (r->cum_bits >= 0) bits += static_cast<double>(r->cum_bits), ++nbits;
      }
      const double mobj = nobj ? obj / nobj : kNotRecorded;
      double var = 0.0;
      for (const auto* r : recs) {
        if (std::isfinite(r->objective)) var += (r->objective - mobj) * (r->objective - mobj);
      }
      const double sd = nobj > 1 ? std::sqrt(var / (nobj - 1)) : (nobj == 1 ? 0.0 : kNotRecorded);
      dat << t << ' ' << FormatDouble(calls / recs.size()) << ' ' << FormatDouble(mobj) << ' '
          << FormatDouble(sd) << ' ' << FormatDouble(ngap ? gap / ngap : kNotRecorded) << ' '
          << FormatDouble(nbits ? bits / nbits : kNotRecorded) << ' ' << recs.size() << "\n";
    }
  }
  return base + ".report.csv";
}

std::vector<RunRow> RowsFromDirectory(const std::string& dir, const std::string& name,
                                      std::vector<SolveTrace>* traces) {
  std::vector<fs::path> metas;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const std::string fn = entry.path().filename().string();
    if (fn.size() > 10 && fn.substr(fn.size() - 10) == ".meta.json" &&
        (name.empty() || fn.rfind(name + "-", 0) == 0)) {
      metas.push_back(entry.path());
    }
  }
  if (ec) Fail(Errc::kIo, "cannot list directory '" + dir + "'");
  std::sort(metas.begin(), metas.end());
  std::vector<RunRow> rows;
  for (const auto& path : metas) {
    std::ifstream in(path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      Fail(Errc::kIo, "bad sidecar '" + path.string() + "': " + e.what());
    }
    RunRow r;
    r.name = j.value("name", "");
    r.seed = j.value("seed", std::uint64_t{0});
    r.variant = j.value("variant", "");
    r.ok = j.value("status", "") == "ok";
    r.error = j.value("error", "");
    r.rows = j.value("rows", 0);
    r.final_objective = JsonNum(j, "final_objective");
    r.final_gap = JsonNum(j, "final_gap");
    r.opt_ratio = JsonNum(j, "opt_ratio");
    r.cum_bits = JsonNum(j, "cum_bits");
    r.bits_ratio = JsonNum(j, "bits_ratio");
    r.runtime_ms = JsonNum(j, "runtime_ms");
    std::string stem = path.string();
    stem.resize(stem.size() - 10);
    SolveTrace trace;
    if (r.ok) {
      r.trace_path = stem + ".trace.csv";
      std::ifstream csv(r.trace_path);
      std::string line;
      std::getline(csv, line);
      while (std::getline(csv, line)) {
        const auto cells = SplitCsvLine(line);
        if (cells.size() < 7) continue;
        IterationRecord rec;
        rec.t = std::stoi(cells[0]);
        rec.objective = ParseCell(cells[1]);
        rec.fw_gap = ParseCell(cells[2]);
        rec.est_error = ParseCell(cells[3]);
        rec.oracle_calls = std::stoll(cells[4]);
        rec.cum_bits = cells[5].empty() ? -1 : std::stoll(cells[5]);
        rec.wall_ms = ParseCell(cells[6]);
        trace.records.push_back(rec);
      }
    }
    if (traces != nullptr) traces->push_back(std::move(trace));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace sfw
