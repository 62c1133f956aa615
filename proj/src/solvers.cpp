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

#include "sfw/solvers.hpp"

#include <chrono>
#include <cmath>

namespace sfw {
namespace {

constexpr std::uint64_t kIterLabel = 0x69746572ULL;
constexpr std::uint64_t kOutputLabel = 0x6F7574ULL;
constexpr double kDomainTol = 1e-12;

enum class EstimatorKind { kUnbiasedMomentum, kOblivious, kMomentumOnly };

class WallClock {
 public:
  explicit WallClock(bool on) : on_(on), start_(std::chrono::steady_clock::now()) {}
  double Ms() const {
    if (!on_) return kNotRecorded;
    const auto d = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double, std::milli>(d).count();
  }

 private:
  bool on_;
  std::chrono::steady_clock::time_point start_;
};

// Objective logged for x: the exact reference when available, otherwise a
// fixed-seed Monte-Carlo mean that never touches the solver's streams.
double LoggedObjective(const StochasticProblem& p, const Vector& x, const SolveOptions& opts) {
  if (p.Has(kCapExactReference)) return p.ExactValue(x);
  RngStream rng(opts.log_seed, 0);
  double total = 0.0;
  for (int k = 0; k < opts.mc_samples; ++k) {
    const Sample z = p.SampleZ(x, rng);
    total += p.Value(x, z);
  }
  return total / opts.mc_samples;
}

Vector StartPoint(const StochasticProblem& p, const FeasibleSet& set, const Schedule& sched,
                  const SolveOptions& opts) {
  if (set.dim() != p.dim()) {
    Fail(Errc::kDimensionMismatch, "solver: set dim " + std::to_string(set.dim()) +
                                       " differs from problem dim " + std::to_string(p.dim()));
  }
  if (sched.mode == SolveMode::kDRMax) {
    if (!ContainsOrigin(set)) {
      Fail(Errc::kInfeasible, "DR mode requires 0 in the feasible set (" + set.name() + ")");
    }
    if (opts.x1 && opts.x1->cwiseAbs().maxCoeff() != 0.0) {
      Fail(Errc::kMode, "DR mode starts at x_1 = 0; a different x1 was supplied");
    }
    return Vector::Zero(p.dim());
  }
  Vector x = opts.x1 ? *opts.x1 : DefaultStart(set);
  if (!Contains(set, x)) Fail(Errc::kInfeasible, "infeasible start point for " + set.name());
  return x;
}

SolveTrace RunDriver(const StochasticProblem& p, const FeasibleSet& set, const Schedule& sched,
                     const RngStream& rng, const SolveOptions& opts, EstimatorKind kind,
                     HessianOption option, const std::function<double(int)>& rho_override) {
  ValidateSchedule(sched);
  const bool dr = sched.mode == SolveMode::kDRMax;
  const bool exact = p.Has(kCapExactReference);
  const int T = sched.T;

  SolveTrace trace;
  trace.output_rule =
      sched.mode == SolveMode::kNonConvexMin ? OutputRule::kUniformRandomIterate : OutputRule::kLast;
  Vector x = StartPoint(p, set, sched, opts);
  trace.output = x;
  trace.output_index = 1;
  if (T == 0) {
    if (opts.keep_iterates) trace.iterates.push_back(x);
    return trace;
  }

  int output_index = T + 1;
  if (trace.output_rule == OutputRule::kUniformRandomIterate) {
    RngStream out = rng.Split(kOutputLabel);
    output_index = 1 + static_cast<int>(out.UniformIndex(static_cast<std::uint64_t>(T)));
  }

  std::function<double(int)> delta_fn = opts.delta_fn;
  if (kind == EstimatorKind::kUnbiasedMomentum && option == HessianOption::kGradDiff && !delta_fn) {
    const ProblemConstants c = p.constants();
    const double diam = Diameter(set);
    delta_fn = [c, diam, &sched](int t) { return GradDiffDelta(sched.eta_fn(t - 1), c, diam); };
  }

  const WallClock clock(opts.wall_time);
  GradEstimatorState state;
  state.alpha = sched.alpha;
  state.rho_fn = sched.rho_fn;
  state.delta_fn = delta_fn;
  Vector x_prev = x;
  if (opts.keep_iterates) trace.iterates.push_back(x);

  for (int t = 1; t <= T; ++t) {
    const RngStream it = rng.Split(kIterLabel, static_cast<std::uint64_t>(t));
    Vector g;
    Vector delta_tilde = Vector::Zero(p.dim());
    double rho = 1.0;
    if (kind == EstimatorKind::kMomentumOnly) {
      RngStream rz = it.Split(kLabelZ);
      const Sample z = p.SampleZ(x, rz);
      g = ScoreGradient(p, x, z);
      rho = rho_override ? rho_override(t) : std::pow(t + 3.0, -2.0 / 3.0);
    } else if (t == 1) {
      RngStream rz = it.Split(kLabelMomentum);
      const Sample z = p.SampleZ(x, rz);
      g = ScoreGradient(p, x, z);
    } else if (kind == EstimatorKind::kOblivious) {
      RngStream rz = it.Split(kLabelZ);
      const Sample z = p.SampleZ(x, rz);
      const VariationEstimate v = VariationOblivious(p, x, x_prev, z);
      delta_tilde = v.delta_tilde;
      g = p.Gradient(x, z);
      rho = sched.rho_fn(t);
    } else {
      double delta = 0.0;
      VariationEstimate v;
      if (option == HessianOption::kExactHessian) {
        v = VariationExactHessian(p, x, x_prev, it);
      } else {
        delta = delta_fn(t);
        v = VariationGradDiff(p, x, x_prev, delta, it);
      }
      if (opts.variation_hook) opts.variation_hook(t, x, x_prev, it, delta, v);
      delta_tilde = v.delta_tilde;
      g = ScoreGradient(p, x, v.z);
      rho = sched.rho_fn(t);
    }
    if (!AllFinite(g) || !AllFinite(delta_tilde)) {
      Fail(Errc::kNumerical, "non-finite estimate at iteration " + std::to_string(t));
    }
    MomentumUpdate(state, delta_tilde, g, rho);
    ++trace.samples;

    const Vector v = dr ? LmoMax(set, state.d) : LmoMin(set, state.d);
    const double eta = sched.eta_fn(t);
    Vector x_next = dr ? Vector(x + eta * v) : Vector(x + eta * (v - x));
    if (!AllFinite(x_next)) {
      Fail(Errc::kNumerical, "non-finite iterate at iteration " + std::to_string(t));
    }

    IterationRecord rec;
    rec.t = t;
    rec.x_hash = HashVector(x_next);
    rec.oracle_calls = trace.samples;
    if (opts.log_est_error && exact) rec.est_error = (state.d - p.ExactGradient(x)).squaredNorm();
    if (opts.log_objective) rec.objective = LoggedObjective(p, x_next, opts);
    if (opts.log_gap && exact) {
      const Vector grad = p.ExactGradient(x_next);
      rec.fw_gap = FwGap(dr ? Vector(-grad) : grad, set, x_next);
    }
    if (opts.check_feasibility) {
      rec.feasible = Contains(set, x_next);
      trace.all_feasible = trace.all_feasible && rec.feasible;
    }
    rec.wall_ms = clock.Ms();
    trace.records.push_back(rec);
    if (opts.keep_vertices) trace.vertices.push_back(v);
    if (opts.keep_iterates) trace.iterates.push_back(x_next);

    if (t == output_index) {
      trace.output = x;
      trace.output_index = t;
    }
    x_prev = std::move(x);
    x = std::move(x_next);
  }
  if (output_index == T + 1) {
    trace.output = x;
    trace.output_index = T + 1;
  }
  return trace;
}

}  // namespace

const char* SolveModeName(SolveMode mode) {
  switch (mode) {
    case SolveMode::kConvexMin: return "ConvexMin";
    case SolveMode::kNonConvexMin: return "NonConvexMin";
    case SolveMode::kDRMax: return "DRSubmodularMax";
  }
  return "unknown";
}

Schedule Schedule::Convex(int T) {
  Schedule s;
  s.T = T;
  s.alpha = 1.0;
  s.mode = SolveMode::kConvexMin;
  s.eta_fn = [](int t) { return 1.0 / t; };
  s.rho_fn = [](int t) { return 1.0 / (t - 1); };
  s.label = "convex";
  return s;
}

Schedule Schedule::NonConvex(int T) {
  Schedule s;
  s.T = T;
  s.alpha = 2.0 / 3.0;
  s.mode = SolveMode::kNonConvexMin;
  const double eta = std::pow(static_cast<double>(std::max(T, 1)), -2.0 / 3.0);
  s.eta_fn = [eta](int) { return eta; };
  s.rho_fn = [](int t) { return std::pow(static_cast<double>(t - 1), -2.0 / 3.0); };
  s.label = "nonconvex";
  return s;
}

Schedule Schedule::DRMax(int T) {
  Schedule s;
  s.T = T;
  s.alpha = 1.0;
  s.mode = SolveMode::kDRMax;
  const double eta = 1.0 / std::max(T, 1);
  s.eta_fn = [eta](int) { return eta; };
  s.rho_fn = [](int t) { return 1.0 / (t - 1); };
  s.label = "drmax";
  return s;
}

void ValidateSchedule(const Schedule& s) {
  if (s.T < 0) Fail(Errc::kInvalidArgument, "schedule: T must be >= 0");
  if (!s.eta_fn || !s.rho_fn) Fail(Errc::kInvalidArgument, "schedule: missing eta or rho");
  for (int t = 1; t <= s.T; ++t) {
    const double eta = s.eta_fn(t);
    if (!(eta > 0.0 && eta <= 1.0)) {
      Fail(Errc::kInvalidArgument, "schedule: eta_" + std::to_string(t) + " = " +
                                       std::to_string(eta) + " outside (0, 1]");
    }
  }
}

SolveTrace OneSfw(const StochasticProblem& p, const FeasibleSet& set, const Schedule& sched,
                  HessianOption option, const RngStream& rng, const SolveOptions& opts) {
  return RunDriver(p, set, sched, rng, opts, EstimatorKind::kUnbiasedMomentum, option, {});
}

SolveTrace ObliviousSfw(const StochasticProblem& p, const FeasibleSet& set, const Schedule& sched,
                        const RngStream& rng, const SolveOptions& opts) {
  if (p.mode() != ProblemMode::kOblivious) {
    Fail(Errc::kMode, "ObliviousSfw: " + p.name() + " is non-oblivious");
  }
  return RunDriver(p, set, sched, rng, opts, EstimatorKind::kOblivious,
                   HessianOption::kExactHessian, {});
}

SolveTrace ScgBaseline(const StochasticProblem& p, const FeasibleSet& set, const Schedule& sched,
                       const RngStream& rng, const SolveOptions& opts,
                       std::function<double(int)> rho_fn) {
  return RunDriver(p, set, sched, rng, opts, EstimatorKind::kMomentumOnly,
                   HessianOption::kExactHessian, rho_fn);
}

double FwGap(const Vector& grad, const FeasibleSet& set, const Vector& x) {
  RequireSameDim(grad, x, "FwGap");
  if (!Contains(set, x, 1e-7)) Fail(Errc::kInfeasible, "FwGap: x is not in " + set.name());
  const Vector v = LmoMin(set, grad);
  return (x - v).dot(grad);
}

double StepRule::At(int t) const {
  switch (kind) {
    case Kind::kTwoOverTPlusTwo: return 2.0 / (t + 1.0);
    case Kind::kFixed: return eta;
    case Kind::kCustom: return fn(t);
  }
  return 0.0;
}

SolveTrace DeterministicFw(const GradOracle& grad, const FeasibleSet& set, const Vector& x0, int T,
                           const StepRule& rule, const ValueFn& value, bool keep_iterates) {
  if (T < 0) Fail(Errc::kInvalidArgument, "DeterministicFw: T must be >= 0");
  if (!Contains(set, x0)) Fail(Errc::kInfeasible, "DeterministicFw: infeasible start");
  SolveTrace trace;
  Vector x = x0;
  if (keep_iterates) trace.iterates.push_back(x);
  for (int t = 1; t <= T; ++t) {
    const Vector g = grad(x);
    RequireFinite(g, "DeterministicFw gradient");
    const Vector v = LmoMin(set, g);
    const double eta = rule.At(t);
    if (!(eta >= 0.0 && eta <= 1.0)) Fail(Errc::kInvalidArgument, "DeterministicFw: eta outside [0, 1]");
    Vector x_next = x + eta * (v - x);
    IterationRecord rec;
    rec.t = t;
    rec.x_hash = HashVector(x_next);
    rec.oracle_calls = t;
    if (value) rec.objective = value(x_next);
    rec.fw_gap = FwGap(grad(x_next), set, x_next);
    rec.feasible = Contains(set, x_next);
    trace.all_feasible = trace.all_feasible && rec.feasible;
    trace.records.push_back(rec);
    trace.vertices.push_back(v);
    x = std::move(x_next);
    if (keep_iterates) trace.iterates.push_back(x);
  }
  trace.output = x;
  trace.output_index = T + 1;
  return trace;
}

BcgResult Bcg(const ValueOracle& oracle, const FeasibleSet& set, const Box& box, int T,
              double delta, RngStream& rng, const BcgOptions& opts) {
  if (T < 1) Fail(Errc::kInvalidArgument, "Bcg: T must be >= 1");
  const int d = set.dim();
  const FeasibleSet shrunk = ShrinkTranslate(set, box, delta);
  BcgResult out;
  out.delta = delta;
  const Vector shift = Vector::Constant(d, delta);

  const ValueOracle guarded = [&](const Vector& y, RngStream& r) {
    for (int i = 0; i < d; ++i) {
      if (y[i] < -kDomainTol || y[i] > box.upper[i] + kDomainTol) {
        Fail(Errc::kDomain, "Bcg: query left the domain box at coordinate " + std::to_string(i));
      }
    }
    ++out.value_queries;
    return oracle(y, r);
  };

  Vector x = Vector::Zero(d);
  Vector gbar = Vector::Zero(d);
  if (opts.keep_iterates) out.iterates.push_back(x);
  for (int t = 1; t <= T; ++t) {
    const int batch = opts.batch_fn ? opts.batch_fn(t) : d;
    const Vector g = TwoPointGradient(guarded, x + shift, delta, batch, rng);
    const double rho = opts.rho_fn ? opts.rho_fn(t) : 2.0 / std::pow(t + 3.0, 2.0 / 3.0);
    gbar = (1.0 - rho) * gbar + rho * g;
    RequireFinite(gbar, "Bcg momentum");
    const Vector v = LmoMax(shrunk, gbar);
    x += v / static_cast<double>(T);
    if (opts.keep_iterates) {
      out.iterates.push_back(x);
      out.vertices.push_back(v);
    }
  }
  out.output = x + shift;
  return out;
}

DbgResult Dbg(const SetFunction& f, const PartitionMatroid& m, int T, double delta, int l,
              RngStream& rng, const DbgOptions& opts) {
  if (l <= 0) Fail(Errc::kInvalidArgument, "Dbg: l must be >= 1");
  if (!(delta > 0.0 && delta < 0.5)) Fail(Errc::kInvalidArgument, "Dbg: delta must lie in (0, 1/2)");
  if (f.ground_size() != m.ground_size()) Fail(Errc::kDimensionMismatch, "Dbg: f and matroid differ");
  const int d = m.ground_size();
  DbgResult out;
  if (m.rank() == 0) {
    out.x_continuous = Vector::Zero(d);
    out.x_base = Vector::Zero(d);
    out.value = f.EvalIndices({});
    return out;
  }
  const ValueOracle sampled = [&](const Vector& y, RngStream& r) {
    Subset s(d, 0);
    double total = 0.0;
    for (int k = 0; k < l; ++k) {
      for (int i = 0; i < d; ++i) s[i] = r.Uniform() < y[i] ? 1 : 0;
      total += f.Eval(s);
    }
    out.set_evaluations += l;
    return total / l;
  };
  const FeasibleSet polytope = FeasibleSet::MakeMatroidPolytope(m);
  BcgOptions bopts;
  const int batch = opts.batch;
  bopts.batch_fn = [batch](int) { return batch; };
  bopts.rho_fn = opts.rho_fn;
  RngStream solve = rng.Split(0x736F6C7665ULL);
  const BcgResult cont = Bcg(sampled, polytope, Box{Vector::Zero(d), Vector::Ones(d)}, T, delta,
                             solve, bopts);
  out.x_continuous = cont.output.cwiseMax(0.0).cwiseMin(1.0);
  out.x_base = FillToBase(out.x_continuous, m);
  RngStream round = rng.Split(0x726F756E64ULL);
  out.rounding = PipageRoundTraced(out.x_base, m, f, round);
  out.set = out.rounding.set;
  out.value = out.rounding.final_value;
  return out;
}

}  // namespace sfw
