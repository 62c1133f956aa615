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

// Gradient estimators: momentum averaging, gradient-variation estimators and
// the two-point smoothing estimator.

#ifndef SFW_ESTIMATORS_HPP_
#define SFW_ESTIMATORS_HPP_

#include <functional>

#include "sfw/core.hpp"
#include "sfw/problems.hpp"
#include "sfw/rng.hpp"

namespace sfw {

// Labels of the substreams one iteration derives from its stream. Using
// the same labels in the Exact-Hessian and Grad-Diff variants couples them
// draw for draw.
enum StreamLabel : std::uint64_t {
  kLabelA = 0x61,         // a ~ U[0, 1]
  kLabelZ = 0x7A,         // z ~ p(. ; x_t(a))
  kLabelMomentum = 0x6D,  // first-iteration sample and batch draws
};

struct GradEstimatorState {
  Vector d;
  int t = 0;
  double alpha = 1.0;
  std::function<double(int)> rho_fn;
  std::function<double(int)> delta_fn;
};

enum class VariationOption { kExactHessian, kGradDiff, kObliviousDiff };

const char* VariationOptionName(VariationOption option);

struct VariationEstimate {
  Vector delta_tilde;
  double a = 1.0;
  Vector point;  // x_t(a), where z was drawn
  Sample z;
  VariationOption option = VariationOption::kExactHessian;
  bool clamped = false;  // a Grad-Diff probe left the oracle domain
};

// d <- (1 - rho)(d + delta_tilde) + rho g_new; t <- t + 1. On an empty state
// d is taken as zero.
void MomentumUpdate(GradEstimatorState& state, const Vector& delta_tilde, const Vector& g_new,
                    double rho);

// Five-term Hessian estimate applied to u:
// F~ (grad log p)(grad log p)^T u + hess F~ u + (grad F~)(grad log p)^T u
//   + F~ hess log p u + (grad log p)(grad F~)^T u.
// Oblivious problems reduce to hess F~ u.
Vector HessianEstimateApply(const StochasticProblem& p, const Vector& x, const Sample& z,
                            const Vector& u);

// One-sample gradient grad F~(x; z) + F~(x; z) grad log p(z; x).
Vector ScoreGradient(const StochasticProblem& p, const Vector& x, const Sample& z);

// Draws a and z from the kLabelA / kLabelZ children of `iteration`.
VariationEstimate VariationExactHessian(const StochasticProblem& p, const Vector& x_t,
                                        const Vector& x_prev, const RngStream& iteration);

// Same draws, with each Hessian-vector product replaced by the central
// difference [grad psi(x + delta u) - grad psi(x - delta u)] / (2 delta).
VariationEstimate VariationGradDiff(const StochasticProblem& p, const Vector& x_t,
                                    const Vector& x_prev, double delta,
                                    const RngStream& iteration);

// grad F~(x_t; z) - grad F~(x_prev; z) at a shared sample.
VariationEstimate VariationOblivious(const StochasticProblem& p, const Vector& x_t,
                                     const Vector& x_prev, const Sample& z);

// delta_t = sqrt(3) eta_{t-1} Lbar / (D L2 (1 + B)).
double GradDiffDelta(double eta_prev, const ProblemConstants& c, double diameter);

using ValueOracle = std::function<double(const Vector&, RngStream&)>;

// (1/B) sum_i (d / 2 delta)[F(x + delta u_i) - F(x - delta u_i)] u_i with u_i
// uniform on the sphere. Sample i uses the substream Split(key, i) of a key
// drawn from rng, so the result does not depend on evaluation order.
Vector TwoPointGradient(const ValueOracle& oracle, const Vector& x, double delta, int batch,
                        RngStream& rng);

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
};

// Monte-Carlo mean of F(x + delta v), v uniform in the unit ball.
McEstimate SmoothedValueMc(const ValueOracle& oracle, const Vector& x, double delta,
                           int n_samples, RngStream& rng);

}  // namespace sfw

#endif  // SFW_ESTIMATORS_HPP_
