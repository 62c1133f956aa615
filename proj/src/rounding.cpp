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

#include "sfw/rounding.hpp"

#include <cmath>
#include <functional>
#include <memory>

namespace sfw {
namespace {

constexpr double kIntegralTol = 1e-12;
constexpr double kPlateauTol = 1e-12;

bool IsFractional(double v) { return v > kIntegralTol && v < 1.0 - kIntegralTol; }

double Snap(double v) {
  if (v <= kIntegralTol) return 0.0;
  if (v >= 1.0 - kIntegralTol) return 1.0;
  return v;
}

void CheckBase(const Vector& x, const PartitionMatroid& m) {
  if (x.size() != m.ground_size()) {
    Fail(Errc::kDimensionMismatch, "pipage: x dim differs from ground size");
  }
  RequireFinite(x, "pipage input");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < -kMembershipTol || x[i] > 1.0 + kMembershipTol) {
      Fail(Errc::kInfeasible, "infeasible-point: coordinate " + std::to_string(i) +
                                  " outside [0, 1]");
    }
  }
  for (std::size_t b = 0; b < m.blocks().size(); ++b) {
    double s = 0.0;
    for (int i : m.blocks()[b]) s += x[i];
    if (std::abs(s - m.budgets()[b]) > kMembershipTol) {
      Fail(Errc::kInfeasible, "infeasible-point: block " + std::to_string(b) + " sums to " +
                                  std::to_string(s) + ", budget " +
                                  std::to_string(m.budgets()[b]));
    }
  }
}

}  // namespace

PipageResult PipageRoundTraced(const Vector& x_in, const PartitionMatroid& m,
                               const SetFunction& f, RngStream& rng) {
  CheckBase(x_in, m);
  const int d = m.ground_size();
  if (f.ground_size() != d) Fail(Errc::kDimensionMismatch, "pipage: f and matroid differ in d");

  PipageResult out;
  std::unique_ptr<MultilinearOracle> oracle;
  std::function<double(const Vector&)> value;
  if (f.MultilinearValue(Vector::Zero(d)).has_value()) {
    value = [&](const Vector& y) { return *f.MultilinearValue(y); };
  } else if (d <= kMaxEnumerationDim) {
    oracle = std::make_unique<MultilinearOracle>(f);
    value = [&](const Vector& y) { return oracle->Value(y); };
  } else {
    out.exact = false;
    value = [&](const Vector& y) {
      RngStream draw = rng.Split(rng.NextU64());
      double total = 0.0;
      Subset s(d, 0);
      for (int k = 0; k < kPipageSamples; ++k) {
        for (int i = 0; i < d; ++i) s[i] = draw.Uniform() < y[i] ? 1 : 0;
        total += f.Eval(s);
      }
      return total / kPipageSamples;
    };
  }

  Vector x = x_in.cwiseMax(0.0).cwiseMin(1.0);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = Snap(x[i]);
  out.path.push_back(value(x));

  for (const auto& block : m.blocks()) {
    while (true) {
      std::vector<int> frac;
      for (int i : block) {
        if (IsFractional(x[i])) frac.push_back(i);
      }
      if (frac.empty()) break;
      if (frac.size() == 1) {
        // Only rounding residue of an integral block sum can leave one.
        x[frac[0]] = std::round(x[frac[0]]);
        out.path.push_back(value(x));
        break;
      }
      const int i = frac[0];
      const int j = frac[1];
      // Endpoint p moves mass from j to i, endpoint q from i to j.
      const double ep = std::min(1.0 - x[i], x[j]);
      const double eq = std::min(x[i], 1.0 - x[j]);
      Vector xp = x;
      xp[i] += ep;
      xp[j] -= ep;
      Vector xq = x;
      xq[i] -= eq;
      xq[j] += eq;
      xp[i] = Snap(xp[i]);
      xp[j] = Snap(xp[j]);
      xq[i] = Snap(xq[i]);
      xq[j] = Snap(xq[j]);
      const double fp = value(xp);
      const double fq = value(xq);
      bool take_p;
      if (std::abs(fp - fq) <= kPlateauTol * std::max(1.0, std::abs(fp))) {
        take_p = !IsFractional(xp[i]) || IsFractional(xq[i]);
      } else {
        take_p = fp > fq;
      }
      x = take_p ? xp : xq;
      out.path.push_back(take_p ? fp : fq);
    }
  }

  for (int i = 0; i < d; ++i) {
    if (x[i] > 0.5) out.set.push_back(i);
  }
  out.final_value = f.EvalIndices(out.set);
  return out;
}

std::vector<int> PipageRound(const Vector& x, const PartitionMatroid& m, const SetFunction& f,
                             RngStream& rng) {
  return PipageRoundTraced(x, m, f, rng).set;
}

Vector FillToBase(const Vector& x_in, const PartitionMatroid& m) {
  if (x_in.size() != m.ground_size()) {
    Fail(Errc::kDimensionMismatch, "FillToBase: x dim differs from ground size");
  }
  Vector x = x_in.cwiseMax(0.0).cwiseMin(1.0);
  for (std::size_t b = 0; b < m.blocks().size(); ++b) {
    const auto& block = m.blocks()[b];
    double sum = 0.0;
    for (int i : block) sum += x[i];
    double need = m.budgets()[b] - sum;
    if (need < -kMembershipTol) {
      Fail(Errc::kInfeasible, "FillToBase: block " + std::to_string(b) + " exceeds its budget");
    }
    for (int i : block) {
      if (need <= 0.0) break;
      const double add = std::min(1.0 - x[i], need);
      x[i] += add;
      need -= add;
    }
    // Remove the floating residue so the block sum is exactly the budget.
    double exact = 0.0;
    for (int i : block) exact += x[i];
    const double residue = exact - m.budgets()[b];
    if (residue != 0.0) {
      for (int i : block) {
        if (x[i] - residue >= 0.0 && x[i] - residue <= 1.0) {
          x[i] -= residue;
          break;
        }
      }
    }
  }
  return x;
}

}  // namespace sfw
