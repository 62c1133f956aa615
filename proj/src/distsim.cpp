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

#include "sfw/distsim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace sfw {
namespace {

constexpr int kMaxPeriodExponent = 30;

std::int64_t CeilCount(double v) {
  if (!std::isfinite(v)) Fail(Errc::kInvalidArgument, "schedule: non-finite batch size");
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(v - 1e-12)));
}

double PowerOfTwo(int i) { return std::ldexp(1.0, std::min(i - 1, kMaxPeriodExponent)); }

struct WorkerState {
  Vector x;
  Vector x_prev;
  Vector gbar;
};

// What a worker puts on the wire in one round.
struct Upload {
  Vector decoded;  // the vector the master reconstructs
  std::int64_t bits = 0;
  std::uint32_t s = 0;
  std::int64_t gradient_calls = 0;
};

struct RoundIndex {
  int i = 1;
  int k = 1;
};

Vector Transmit(const Vector& g, std::uint32_t s, RngStream& rng, std::int64_t& bits) {
  if (s == kUnquantizedLevel) {
    bits = 32 * static_cast<std::int64_t>(g.size());
    return g;
  }
  const QuantizedMessage msg = EncodePartition(g, s, rng);
  bits = msg.bits;
  return Decode(msg);
}

class Simulator {
 public:
  Simulator(const StochasticProblem& p, const FeasibleSet& set, const QfwConfig& cfg,
            const RngStream& rng, const QfwRunOptions& opts)
      : p_(p), set_(set), cfg_(cfg), rng_(rng), opts_(opts) {}

  QfwResult Run();

 private:
  void Validate();
  Upload WorkerGradient(int m, const WorkerState& w, RoundIndex r, int t) const;
  Upload FederatedLocal(int m, WorkerState& w, RoundIndex r, int t) const;
  void CheckReplicas(int t, QfwResult& result) const;
  bool finite() const {
    return cfg_.setting == QfwSetting::kFiniteConvex ||
           cfg_.setting == QfwSetting::kFiniteNonConvex;
  }

  const StochasticProblem& p_;
  const FeasibleSet& set_;
  const QfwConfig& cfg_;
  const RngStream& rng_;
  const QfwRunOptions& opts_;
  std::int64_t n_ = 0;
  std::vector<WorkerState> workers_;
};

void Simulator::Validate() {
  if (cfg_.M < 1) Fail(Errc::kInvalidArgument, "qfw: M must be >= 1");
  if (cfg_.T < 0) Fail(Errc::kInvalidArgument, "qfw: T must be >= 0");
  if (!cfg_.period || !cfg_.batch || !cfg_.eta || !cfg_.s1 || !cfg_.s2) {
    Fail(Errc::kInvalidArgument, "qfw: incomplete schedule");
  }
  if (set_.dim() != p_.dim()) Fail(Errc::kDimensionMismatch, "qfw: set and problem dimensions differ");
  if (p_.mode() != ProblemMode::kOblivious) {
    Fail(Errc::kMode, "qfw: the distributed solver requires an oblivious problem");
  }
  if (finite()) {
    const std::int64_t total = p_.num_components();
    if (total <= 0) Fail(Errc::kInvalidArgument, "qfw: finite-sum setting on a problem without components");
    n_ = cfg_.n > 0 ? cfg_.n : total / cfg_.M;
    if (n_ * cfg_.M != total) {
      Fail(Errc::kInvalidArgument, "qfw: " + std::to_string(total) + " components do not split into " +
                                       std::to_string(cfg_.M) + " shards of " + std::to_string(n_));
    }
  }
  if (cfg_.mode == LinkMode::kFederated && !finite()) {
    Fail(Errc::kUnsupported, "qfw: federated mode needs a finite-sum setting");
  }
  if (cfg_.fl_local_steps < 1) Fail(Errc::kInvalidArgument, "qfw: fl_local_steps must be >= 1");
}

Upload Simulator::WorkerGradient(int m, const WorkerState& w, RoundIndex r, int t) const {
  const int d = p_.dim();
  const RngStream ws = rng_.Split(kWorkerStream, static_cast<std::uint64_t>(m));
  RngStream batch_rng = ws.Split(kBatchStream, static_cast<std::uint64_t>(t));
  RngStream enc_rng = ws.Split(kEncodeStream, static_cast<std::uint64_t>(t));
  Upload up;
  Vector g = Vector::Zero(d);
  const bool anchor = r.k == 1;
  if (anchor && finite() && cfg_.anchor_full) {
    for (std::int64_t j = 0; j < n_; ++j) g += p_.Gradient(w.x, p_.Component(m * n_ + j));
    g /= static_cast<double>(n_);
    up.gradient_calls = n_;
  } else {
    const std::int64_t S = cfg_.batch(r.i, r.k);
    if (S < 1) Fail(Errc::kInvalidArgument, "qfw: batch size must be >= 1");
    for (std::int64_t b = 0; b < S; ++b) {
      Sample z;
      if (finite()) {
        const auto j = static_cast<std::int64_t>(batch_rng.UniformIndex(static_cast<std::uint64_t>(n_)));
        z = p_.Component(m * n_ + j);
      } else {
        z = p_.SampleZ(w.x, batch_rng);
      }
      if (anchor) {
        g += p_.Gradient(w.x, z);
        up.gradient_calls += 1;
      } else {
        g += p_.Gradient(w.x, z) - p_.Gradient(w.x_prev, z);
        up.gradient_calls += 2;
      }
    }
    g /= static_cast<double>(S);
  }
  RequireFinite(g, "qfw worker gradient");
  up.s = cfg_.mode == LinkMode::kUnquantized ? kUnquantizedLevel : cfg_.s1(r.i, r.k);
  up.decoded = Transmit(g, up.s, enc_rng, up.bits);
  return up;
}

// Local FW steps on the worker's full shard objective; uploads the iterate.
Upload Simulator::FederatedLocal(int m, WorkerState& w, RoundIndex r, int t) const {
  const int d = p_.dim();
  Upload up;
  const double eta = cfg_.eta(r.i, r.k, t);
  Vector x = w.x;
  for (int step = 0; step < cfg_.fl_local_steps; ++step) {
    Vector g = Vector::Zero(d);
    for (std::int64_t j = 0; j < n_; ++j) g += p_.Gradient(x, p_.Component(m * n_ + j));
    g /= static_cast<double>(n_);
    up.gradient_calls += n_;
    x += eta * (LmoMin(set_, g) - x);
  }
  up.decoded = x;
  up.bits = 32 * static_cast<std::int64_t>(d);
  up.s = kUnquantizedLevel;
  return up;
}

void Simulator::CheckReplicas(int t, QfwResult& result) const {
  const std::uint64_t hx = HashVector(workers_[0].x);
  const std::uint64_t hg = HashVector(workers_[0].gbar);
  for (std::size_t m = 1; m < workers_.size(); ++m) {
    if (HashVector(workers_[m].x) != hx || HashVector(workers_[m].gbar) != hg) {
      Fail(Errc::kNumerical, "qfw: worker " + std::to_string(m) + " diverged from worker 0 in round " +
                                 std::to_string(t));
    }
  }
  result.round_hashes.push_back(hx ^ (hg * 0x9E3779B97F4A7C15ULL));
}

QfwResult Simulator::Run() {
  Validate();
  const int d = p_.dim();
  const int T = cfg_.T;
  const bool exact = p_.Has(kCapExactReference);
  const bool nonconvex = cfg_.setting == QfwSetting::kFiniteNonConvex ||
                         cfg_.setting == QfwSetting::kStochNonConvex;
  const bool federated = cfg_.mode == LinkMode::kFederated;

  QfwResult result;
  result.federated = federated;
  SolveTrace& trace = result.trace;
  trace.output_rule = nonconvex ? OutputRule::kUniformRandomIterate : OutputRule::kLast;

  const Vector x1 = opts_.x1 ? *opts_.x1 : DefaultStart(set_);
  if (x1.size() != d) Fail(Errc::kDimensionMismatch, "qfw: start point dimension");
  workers_.assign(cfg_.M, WorkerState{x1, x1, Vector::Zero(d)});
  trace.output = x1;
  trace.output_index = 1;
  if (opts_.keep_iterates) trace.iterates.push_back(x1);

  int output_index = T + 1;
  if (nonconvex && T > 0) {
    RngStream out = rng_.Split(kOutputStream);
    output_index = 1 + static_cast<int>(out.UniformIndex(static_cast<std::uint64_t>(T)));
  }

  RoundIndex r;
  std::vector<Upload> uploads(cfg_.M);
  std::int64_t calls = 0;
  for (int t = 1; t <= T; ++t) {
    if (cfg_.period(r.i) < 1) Fail(Errc::kInvalidArgument, "qfw: empty period");

    auto work = [&](int m) {
      uploads[m] = federated ? FederatedLocal(m, workers_[m], r, t) : WorkerGradient(m, workers_[m], r, t);
    };
    if (cfg_.parallel && cfg_.M > 1) {
      std::vector<std::thread> pool;
      pool.reserve(cfg_.M);
      std::vector<std::exception_ptr> errors(cfg_.M);
      for (int m = 0; m < cfg_.M; ++m) {
        pool.emplace_back([&, m] {
          try {
            work(m);
          } catch (...) {
            errors[m] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    } else {
      for (int m = 0; m < cfg_.M; ++m) work(m);
    }

    // Master: average in worker order, then broadcast once.
    Vector avg = Vector::Zero(d);
    for (int m = 0; m < cfg_.M; ++m) {
      avg += uploads[m].decoded;
      calls += uploads[m].gradient_calls;
      result.ledger.Charge({t, LedgerEntry::Direction::kUp, m, uploads[m].bits, uploads[m].s, d});
    }
    avg /= static_cast<double>(cfg_.M);
    std::uint32_t s_down = kUnquantizedLevel;
    if (cfg_.mode == LinkMode::kQuantized) s_down = cfg_.s2(r.i, r.k);
    RngStream master_rng = rng_.Split(kMasterStream, static_cast<std::uint64_t>(t));
    std::int64_t down_bits = 0;
    const Vector broadcast = Transmit(avg, s_down, master_rng, down_bits);
    result.ledger.Charge({t, LedgerEntry::Direction::kDown, -1, down_bits, s_down, d});

    const Vector x_t = workers_[0].x;
    Vector v_keep;
    for (auto& w : workers_) {
      if (federated) {
        w.x_prev = w.x;
        w.x = broadcast;
        w.gbar = broadcast;
        continue;
      }
      w.gbar = r.k == 1 ? broadcast : Vector(w.gbar + broadcast);
      const Vector v = LmoMin(set_, w.gbar);
      const double eta = cfg_.eta(r.i, r.k, t);
      if (!(eta > 0.0 && eta <= 1.0)) Fail(Errc::kInvalidArgument, "qfw: step size outside (0, 1]");
      w.x_prev = w.x;
      w.x = w.x + eta * (v - w.x);
      if (v_keep.size() == 0) v_keep = v;
    }
    RequireFinite(workers_[0].x, "qfw iterate");
    CheckReplicas(t, result);

    if (r.k == 1 && exact && !federated) {
      result.anchor_errors.push_back((workers_[0].gbar - p_.ExactGradient(x_t)).norm());
    }

    const Vector& x_next = workers_[0].x;
    IterationRecord rec;
    rec.t = t;
    rec.x_hash = HashVector(x_next);
    rec.oracle_calls = calls;
    rec.cum_bits_up = result.ledger.up;
    rec.cum_bits_down = result.ledger.down;
    rec.cum_bits = result.ledger.total();
    if (exact) {
      rec.objective = p_.ExactValue(x_next);
      if (opts_.log_gap || nonconvex) rec.fw_gap = FwGap(p_.ExactGradient(x_next), set_, x_next);
    }
    if (opts_.reference != nullptr && opts_.reference->Has(kCapExactReference)) {
      rec.reference_objective = opts_.reference->ExactValue(x_next);
      if (opts_.log_gap || nonconvex) {
        rec.reference_gap = FwGap(opts_.reference->ExactGradient(x_next), set_, x_next);
      }
    }
    rec.feasible = Contains(set_, x_next);
    trace.all_feasible = trace.all_feasible && rec.feasible;
    trace.records.push_back(rec);
    if (opts_.keep_iterates) trace.iterates.push_back(x_next);
    if (opts_.keep_iterates && v_keep.size() > 0) trace.vertices.push_back(v_keep);
    if (t == output_index) {
      trace.output = x_t;
      trace.output_index = t;
    }

    if (++r.k > cfg_.period(r.i)) {
      ++r.i;
      r.k = 1;
    }
  }
  trace.samples = calls;
  if (output_index == T + 1) {
    trace.output = workers_[0].x;
    trace.output_index = T + 1;
  }
  return result;
}

}  // namespace

const char* QfwSettingName(QfwSetting s) {
  switch (s) {
    case QfwSetting::kFiniteConvex:
      return "finite_convex";
    case QfwSetting::kStochConvex:
      return "stoch_convex";
    case QfwSetting::kFiniteNonConvex:
      return "finite_nonconvex";
    case QfwSetting::kStochNonConvex:
      return "stoch_nonconvex";
  }
  return "?";
}

QfwSetting ParseQfwSetting(const std::string& name) {
  for (QfwSetting s : {QfwSetting::kFiniteConvex, QfwSetting::kStochConvex,
                       QfwSetting::kFiniteNonConvex, QfwSetting::kStochNonConvex}) {
    if (name == QfwSettingName(s)) return s;
  }
  Fail(Errc::kConfig, "unknown distsim setting '" + name + "'");
}

const char* LinkModeName(LinkMode m) {
  switch (m) {
    case LinkMode::kQuantized:
      return "quantized";
    case LinkMode::kUnquantized:
      return "unquantized";
    case LinkMode::kFederated:
      return "fl";
  }
  return "?";
}

LinkMode ParseLinkMode(const std::string& name) {
  for (LinkMode m : {LinkMode::kQuantized, LinkMode::kUnquantized, LinkMode::kFederated}) {
    if (name == LinkModeName(m)) return m;
  }
  if (name == "federated") return LinkMode::kFederated;
  Fail(Errc::kConfig, "unknown distsim mode '" + name + "'");
}

std::uint32_t TheoremLevel(double value) {
  if (!(value > 0.0)) Fail(Errc::kInvalidArgument, "TheoremLevel: value must be positive");
  const double c = std::ceil(value - 1e-12);
  if (c >= static_cast<double>(kMaxLevel)) return kMaxLevel;
  return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(c));
}

QfwConfig ScheduleFromTheorem(QfwSetting setting, std::int64_t n, int M, int d, int T,
                              const std::optional<QfwConstants>& constants) {
  if (M < 1 || d < 1 || T < 0) Fail(Errc::kInvalidArgument, "ScheduleFromTheorem: bad M, d or T");
  QfwConfig cfg;
  cfg.M = M;
  cfg.setting = setting;
  cfg.n = n;
  cfg.T = T;
  const double Md = M;
  const double dd = d;
  switch (setting) {
    case QfwSetting::kFiniteConvex:
    case QfwSetting::kStochConvex: {
      if (setting == QfwSetting::kFiniteConvex && n < 1) {
        Fail(Errc::kInvalidArgument, "ScheduleFromTheorem: n must be >= 1");
      }
      cfg.period = [](int i) { return static_cast<int>(PowerOfTwo(i)); };
      if (setting == QfwSetting::kStochConvex) {
        if (!constants || !(constants->L > 0.0) || !(constants->D > 0.0)) {
          Fail(Errc::kInvalidArgument, "ScheduleFromTheorem: stochastic convex setting needs sigma, L and D");
        }
        const QfwConstants c = *constants;
        cfg.anchor_full = false;
        cfg.batch = [c, Md](int i, int k) {
          const double p = PowerOfTwo(i);
          if (k == 1) return CeilCount(c.sigma * c.sigma * p * p / (Md * c.L * c.L * c.D * c.D));
          return CeilCount(p / Md);
        };
      } else {
        cfg.batch = [n, Md](int i, int k) {
          return k == 1 ? n : CeilCount(PowerOfTwo(i) / Md);
        };
      }
      cfg.eta = [](int i, int k, int) { return 2.0 / (PowerOfTwo(i) + k); };
      cfg.s1 = [dd, Md](int i, int k) {
        const double p = PowerOfTwo(i);
        return TheoremLevel(k == 1 ? std::sqrt(dd * p * p / Md) : std::sqrt(dd * p / Md));
      };
      cfg.s2 = [dd](int i, int k) {
        const double p = PowerOfTwo(i);
        return TheoremLevel(k == 1 ? std::sqrt(dd * p * p) : std::sqrt(dd * p));
      };
      break;
    }
    case QfwSetting::kFiniteNonConvex:
    case QfwSetting::kStochNonConvex: {
      if (setting == QfwSetting::kStochNonConvex) {
        if (T % M != 0) Fail(Errc::kInvalidArgument, "ScheduleFromTheorem: T must be a multiple of M");
        n = T / M;
        cfg.n = n;
      }
      if (n < 1) Fail(Errc::kInvalidArgument, "ScheduleFromTheorem: n must be >= 1");
      if (T < 1) Fail(Errc::kInvalidArgument, "ScheduleFromTheorem: T must be >= 1");
      const double sn = std::sqrt(static_cast<double>(n));
      const int p = static_cast<int>(CeilCount(sn));
      const double TT = T;
      cfg.period = [p](int) { return p; };
      cfg.batch = [n, sn, Md](int, int k) { return k == 1 ? n : CeilCount(sn / Md); };
      cfg.eta = [TT](int, int, int) { return 1.0 / std::sqrt(TT); };
      const double quarter = std::pow(static_cast<double>(n), 0.25);
      cfg.s1 = [dd, Md, TT, quarter](int, int k) {
        return TheoremLevel(k == 1 ? std::sqrt(TT * dd / Md) : std::sqrt(dd) * quarter / std::sqrt(Md));
      };
      cfg.s2 = [dd, TT, quarter](int, int k) {
        return TheoremLevel(k == 1 ? std::sqrt(TT * dd) : std::sqrt(dd) * quarter);
      };
      break;
    }
  }
  return cfg;
}

void MakeUnquantized(QfwConfig& cfg) {
  cfg.mode = LinkMode::kUnquantized;
  cfg.s1 = [](int, int) { return kUnquantizedLevel; };
  cfg.s2 = [](int, int) { return kUnquantizedLevel; };
}

void BitLedger::Charge(const LedgerEntry& e) {
  if (e.bits < 0) Fail(Errc::kInvalidArgument, "BitLedger: negative charge");
  entries.push_back(e);
  if (e.direction == LedgerEntry::Direction::kUp) {
    up += e.bits;
  } else {
    down += e.bits;
  }
}

QfwResult RunQfw(const StochasticProblem& p, const FeasibleSet& set, const QfwConfig& cfg,
                 const RngStream& rng, const QfwRunOptions& opts) {
  Simulator sim(p, set, cfg, rng, opts);
  return sim.Run();
}

QfwResult RunSncQfw(const ProblemPtr& p, const FeasibleSet& set, const QfwConfig& cfg,
                    const RngStream& rng, bool keep_schedule, const QfwRunOptions& opts) {
  if (!p) Fail(Errc::kInvalidArgument, "RunSncQfw: null problem");
  if (p->mode() != ProblemMode::kOblivious) Fail(Errc::kMode, "RunSncQfw: oblivious problem required");
  if (cfg.T < 1 || cfg.M < 1 || cfg.T % cfg.M != 0) {
    Fail(Errc::kInvalidArgument, "RunSncQfw: T must be a positive multiple of M");
  }
  RngStream draw = rng.Split(kSncStream);
  const Vector origin = Vector::Zero(p->dim());
  std::vector<Sample> samples;
  samples.reserve(cfg.T);
  for (int j = 0; j < cfg.T; ++j) samples.push_back(p->SampleZ(origin, draw));
  auto surrogate = std::make_shared<FiniteSumProblem>(p, std::move(samples));

  QfwConfig run = keep_schedule
                      ? cfg
                      : ScheduleFromTheorem(QfwSetting::kStochNonConvex, cfg.T / cfg.M, cfg.M,
                                            p->dim(), cfg.T);
  run.setting = QfwSetting::kFiniteNonConvex;
  run.n = cfg.T / cfg.M;
  run.parallel = cfg.parallel;
  if (!keep_schedule) {
    run.mode = cfg.mode;
    if (cfg.mode == LinkMode::kUnquantized) MakeUnquantized(run);
  }
  QfwRunOptions o = opts;
  if (o.reference == nullptr && p->Has(kCapExactReference)) o.reference = p.get();
  QfwResult result = RunQfw(*surrogate, set, run, rng, o);
  result.surrogate = surrogate;
  return result;
}

}  // namespace sfw
