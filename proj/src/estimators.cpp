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

#include "sfw/estimators.hpp"

#include <cmath>

namespace sfw {
namespace {

bool NonOblivious(const StochasticProblem& p) { return p.mode() == ProblemMode::kNonOblivious; }

void RequireCaps(const StochasticProblem& p, unsigned caps, const char* who) {
  if (!p.Has(caps)) {
    Fail(Errc::kCapability, std::string(who) + ": " + p.name() + " lacks " +
                                CapabilityString(caps & ~p.capabilities()));
  }
}

struct Draw {
  double a;
  Vector point;
  Sample z;
};

Draw DrawPoint(const StochasticProblem& p, const Vector& x_t, const Vector& x_prev,
               const RngStream& iteration) {
  RngStream ra = iteration.Split(kLabelA);
  RngStream rz = iteration.Split(kLabelZ);
  Draw d;
  d.a = ra.Uniform();
  d.point = d.a * x_t + (1.0 - d.a) * x_prev;
  d.z = p.SampleZ(d.point, rz);
  return d;
}

// Domain-respecting probe point: clamps into [0, 1] for non-oblivious
// problems and reports whether clamping moved it.
Vector Probe(const StochasticProblem& p, const Vector& y, bool& clamped) {
  if (!NonOblivious(p)) return y;
  const Vector c = y.cwiseMax(kBernoulliClamp).cwiseMin(1.0 - kBernoulliClamp);
  if ((c - y).cwiseAbs().maxCoeff() > 0.0) clamped = true;
  return c;
}

}  // namespace

const char* VariationOptionName(VariationOption option) {
  switch (option) {
    case VariationOption::kExactHessian: return "ExactHessian";
    case VariationOption::kGradDiff: return "GradDiff";
    case VariationOption::kObliviousDiff: return "ObliviousDiff";
  }
  return "unknown";
}

void MomentumUpdate(GradEstimatorState& state, const Vector& delta_tilde, const Vector& g_new,
                    double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    Fail(Errc::kInvalidArgument, "momentum: rho = " + std::to_string(rho) + " outside [0, 1]");
  }
  RequireSameDim(delta_tilde, g_new, "momentum");
  if (state.d.size() == 0) state.d = Vector::Zero(g_new.size());
  RequireSameDim(state.d, g_new, "momentum");
  state.d = (1.0 - rho) * (state.d + delta_tilde) + rho * g_new;
  ++state.t;
  RequireFinite(state.d, "momentum estimate");
}

Vector HessianEstimateApply(const StochasticProblem& p, const Vector& x, const Sample& z,
                            const Vector& u) {
  RequireSameDim(x, u, "HessianEstimateApply");
  if (!NonOblivious(p)) {
    RequireCaps(p, kCapHessianVec, "HessianEstimateApply");
    return p.HessianVec(x, z, u);
  }
  RequireCaps(p, kCapValue | kCapGradient | kCapHessianVec | kCapLogpGrad | kCapLogpHessVec,
              "HessianEstimateApply");
  const double f = p.Value(x, z);
  const Vector gf = p.Gradient(x, z);
  const Vector gl = p.LogpGrad(x, z);
  const double gl_u = gl.dot(u);
  return f * gl * gl_u + p.HessianVec(x, z, u) + gf * gl_u + f * p.LogpHessVec(x, z, u) +
         gl * gf.dot(u);
}

Vector ScoreGradient(const StochasticProblem& p, const Vector& x, const Sample& z) {
  RequireCaps(p, kCapGradient, "ScoreGradient");
  if (!NonOblivious(p)) return p.Gradient(x, z);
  RequireCaps(p, kCapValue | kCapLogpGrad, "ScoreGradient");
  return p.Gradient(x, z) + p.Value(x, z) * p.LogpGrad(x, z);
}

VariationEstimate VariationExactHessian(const StochasticProblem& p, const Vector& x_t,
                                        const Vector& x_prev, const RngStream& iteration) {
  RequireSameDim(x_t, x_prev, "VariationExactHessian");
  Draw draw = DrawPoint(p, x_t, x_prev, iteration);
  VariationEstimate out;
  out.option = VariationOption::kExactHessian;
  out.a = draw.a;
  out.delta_tilde = HessianEstimateApply(p, draw.point, draw.z, x_t - x_prev);
  out.point = std::move(draw.point);
  out.z = std::move(draw.z);
  return out;
}

VariationEstimate VariationGradDiff(const StochasticProblem& p, const Vector& x_t,
                                    const Vector& x_prev, double delta,
                                    const RngStream& iteration) {
  if (!(delta > 0.0)) Fail(Errc::kInvalidArgument, "VariationGradDiff: delta must be > 0");
  RequireSameDim(x_t, x_prev, "VariationGradDiff");
  RequireCaps(p, kCapValue | kCapGradient, "VariationGradDiff");
  Draw draw = DrawPoint(p, x_t, x_prev, iteration);
  const Vector u = x_t - x_prev;
  VariationEstimate out;
  out.option = VariationOption::kGradDiff;
  out.a = draw.a;
  const Vector& x = draw.point;
  const Sample& z = draw.z;
  const Vector xp = Probe(p, x + delta * u, out.clamped);
  const Vector xm = Probe(p, x - delta * u, out.clamped);
  const Vector phi_f = (p.Gradient(xp, z) - p.Gradient(xm, z)) / (2.0 * delta);
  if (!NonOblivious(p)) {
    out.delta_tilde = phi_f;
  } else {
    RequireCaps(p, kCapLogpGrad, "VariationGradDiff");
    const double f = p.Value(x, z);
    const Vector gf = p.Gradient(x, z);
    const Vector gl = p.LogpGrad(x, z);
    const Vector phi_l = (p.LogpGrad(xp, z) - p.LogpGrad(xm, z)) / (2.0 * delta);
    const double gl_u = gl.dot(u);
    out.delta_tilde = f * gl * gl_u + phi_f + gf * gl_u + f * phi_l + gl * gf.dot(u);
  }
  out.point = std::move(draw.point);
  out.z = std::move(draw.z);
  return out;
}

VariationEstimate VariationOblivious(const StochasticProblem& p, const Vector& x_t,
                                     const Vector& x_prev, const Sample& z) {
  if (NonOblivious(p)) {
    Fail(Errc::kMode, "VariationOblivious: " + p.name() +
                          " is non-oblivious; the shared-sample difference is biased there");
  }
  RequireSameDim(x_t, x_prev, "VariationOblivious");
  VariationEstimate out;
  out.option = VariationOption::kObliviousDiff;
  out.point = x_t;
  out.z = z;
  out.delta_tilde = p.Gradient(x_t, z) - p.Gradient(x_prev, z);
  return out;
}

double GradDiffDelta(double eta_prev, const ProblemConstants& c, double diameter) {
  if (!(diameter > 0.0) || !(c.L2 > 0.0) || !std::isfinite(c.L2) || !std::isfinite(c.B)) {
    Fail(Errc::kInvalidArgument, "GradDiffDelta: needs finite L2 > 0, finite B and D > 0");
  }
  return std::sqrt(3.0) * eta_prev * LBar(c) / (diameter * c.L2 * (1.0 + c.B));
}

Vector TwoPointGradient(const ValueOracle& oracle, const Vector& x, double delta, int batch,
                        RngStream& rng) {
  if (!(delta > 0.0)) Fail(Errc::kInvalidArgument, "TwoPointGradient: delta must be > 0");
  if (batch <= 0) Fail(Errc::kInvalidArgument, "TwoPointGradient: batch must be >= 1");
  const int d = static_cast<int>(x.size());
  const std::uint64_t key = rng.NextU64();
  Vector sum = Vector::Zero(d);
  for (int i = 0; i < batch; ++i) {
    RngStream s = rng.Split(key, static_cast<std::uint64_t>(i));
    const Vector u = SampleUnitSphere(s, d);
    RngStream plus = s.Split(1);
    RngStream minus = s.Split(2);
    const double fp = oracle(x + delta * u, plus);
    const double fm = oracle(x - delta * u, minus);
    sum += (d / (2.0 * delta)) * (fp - fm) * u;
  }
  return sum / static_cast<double>(batch);
}

McEstimate SmoothedValueMc(const ValueOracle& oracle, const Vector& x, double delta,
                           int n_samples, RngStream& rng) {
  if (n_samples <= 0) Fail(Errc::kInvalidArgument, "SmoothedValueMc: n_samples must be >= 1");
  if (delta < 0.0) Fail(Errc::kInvalidArgument, "SmoothedValueMc: delta must be >= 0");
  const int d = static_cast<int>(x.size());
  if (delta == 0.0) {
    RngStream s = rng.Split(rng.NextU64());
    return {oracle(x, s), 0.0};
  }
  const std::uint64_t key = rng.NextU64();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    RngStream s = rng.Split(key, static_cast<std::uint64_t>(i));
    const Vector v = SampleUnitBall(s, d);
    RngStream eval = s.Split(1);
    const double f = oracle(x + delta * v, eval);
    sum += f;
    sum_sq += f * f;
  }
  const double n = n_samples;
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace sfw
