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

#include "sfw/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sfw {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Power-iteration defaults for the nuclear-ball LMO used inside LmoMin.
constexpr double kNuclearTol = 1e-8;
constexpr int kNuclearMaxIter = 1000;
constexpr std::uint64_t kNuclearSeed = 0x6E75636C656172ULL;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void RequireDim(const FeasibleSet& set, const Vector& g, const char* what) {
  if (g.size() != set.dim()) {
    Fail(Errc::kDimensionMismatch, std::string(what) + ": set dim " +
                                       std::to_string(set.dim()) + ", vector dim " +
                                       std::to_string(g.size()));
  }
}

// Minimizes <g, x> over a block polytope. Free coordinates go to the bound
// that decreases the objective (lower on ties); capped blocks fill the most
// negative coordinates first, smallest index on ties.
Vector BlockLmoMin(const BlockPolytope& p, const Vector& g) {
  const Eigen::Index d = g.size();
  Vector x = p.lower;
  std::vector<char> in_block(d, 0);
  for (const auto& block : p.blocks) {
    for (int i : block) in_block[i] = 1;
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!in_block[i] && g[i] < 0.0) x[i] = p.upper[i];
  }
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    std::vector<int> order;
    for (int i : p.blocks[b]) {
      if (g[i] < 0.0) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int c) {
      if (g[a] != g[c]) return g[a] < g[c];
      return a < c;
    });
    double remaining = p.caps[b];
    for (int i : p.blocks[b]) remaining -= p.lower[i];
    for (int i : order) {
      if (remaining <= 0.0) break;
      const double amount = std::min(p.upper[i] - p.lower[i], remaining);
      x[i] += amount;
      remaining -= amount;
    }
  }
  return x;
}

// Greedy fill for maximization: free coordinates go to the upper bound where
// g > 0, and each capped block is filled up to its cap in decreasing g order
// (smallest index on ties) whatever the sign. On a matroid polytope this is
// the best base.
Vector BlockLmoMaxFill(const BlockPolytope& p, const Vector& g) {
  const Eigen::Index d = g.size();
  Vector x = p.lower;
  std::vector<char> in_block(d, 0);
  for (const auto& block : p.blocks) {
    for (int i : block) in_block[i] = 1;
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!in_block[i] && g[i] > 0.0) x[i] = p.upper[i];
  }
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    std::vector<int> order = p.blocks[b];
    std::stable_sort(order.begin(), order.end(), [&](int a, int c) {
      if (g[a] != g[c]) return g[a] > g[c];
      return a < c;
    });
    double remaining = p.caps[b];
    for (int i : p.blocks[b]) remaining -= p.lower[i];
    for (int i : order) {
      if (remaining <= 0.0) break;
      const double amount = std::min(p.upper[i] - p.lower[i], remaining);
      x[i] += amount;
      remaining -= amount;
    }
  }
  return x;
}

bool BlockContains(const BlockPolytope& p, const Vector& x, double tol) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= p.lower[i] - tol && x[i] <= p.upper[i] + tol)) return false;
  }
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    double s = 0.0;
    for (int i : p.blocks[b]) s += x[i];
    if (s > p.caps[b] + tol) return false;
  }
  return true;
}

BlockPolytope BoxAsBlock(const Box& box) { return BlockPolytope{box.lower, box.upper, {}, {}}; }

BlockPolytope MatroidAsBlock(const MatroidPolytope& m) {
  const int d = m.matroid.ground_size();
  BlockPolytope p{Vector::Zero(d), Vector::Ones(d), m.matroid.blocks(), {}};
  for (int b : m.matroid.budgets()) p.caps.push_back(static_cast<double>(b));
  return p;
}

double Binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// PartitionMatroid

PartitionMatroid::PartitionMatroid(int ground_size, std::vector<std::vector<int>> blocks,
                                   std::vector<int> budgets)
    : ground_size_(ground_size), blocks_(std::move(blocks)), budgets_(std::move(budgets)) {
  if (ground_size_ <= 0) Fail(Errc::kInvalidDimension, "PartitionMatroid: empty ground set");
  if (blocks_.size() != budgets_.size()) {
    Fail(Errc::kInvalidArgument, "PartitionMatroid: blocks and budgets differ in length");
  }
  block_of_.assign(ground_size_, -1);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    for (int i : blocks_[b]) {
      if (i < 0 || i >= ground_size_) {
        Fail(Errc::kInvalidArgument, "PartitionMatroid: element out of range");
      }
      if (block_of_[i] != -1) Fail(Errc::kInvalidArgument, "PartitionMatroid: blocks overlap");
      block_of_[i] = static_cast<int>(b);
    }
    std::sort(blocks_[b].begin(), blocks_[b].end());
    if (budgets_[b] < 0 || budgets_[b] > static_cast<int>(blocks_[b].size())) {
      Fail(Errc::kInvalidArgument, "PartitionMatroid: budget outside [0, |block|]");
    }
  }
  for (int i = 0; i < ground_size_; ++i) {
    if (block_of_[i] == -1) {
      Fail(Errc::kInvalidArgument, "PartitionMatroid: blocks do not cover the ground set");
    }
  }
}

int PartitionMatroid::rank() const {
  return std::accumulate(budgets_.begin(), budgets_.end(), 0);
}

bool PartitionMatroid::IsIndependent(const std::vector<int>& set) const {
  std::vector<int> used(blocks_.size(), 0);
  std::vector<char> seen(ground_size_, 0);
  for (int i : set) {
    if (i < 0 || i >= ground_size_ || seen[i]) return false;
    seen[i] = 1;
    if (++used[block_of_[i]] > budgets_[block_of_[i]]) return false;
  }
  return true;
}

bool PartitionMatroid::IsBase(const std::vector<int>& set) const {
  return IsIndependent(set) && static_cast<int>(set.size()) == rank();
}

std::uint64_t PartitionMatroid::CountBases() const {
  double count = 1.0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    count *= Binomial(static_cast<int>(blocks_[b].size()), budgets_[b]);
  }
  if (count >= 1.8e19) return UINT64_MAX;
  return static_cast<std::uint64_t>(std::llround(count));
}

// ---------------------------------------------------------------------------
// FeasibleSet construction

FeasibleSet FeasibleSet::MakeL1Ball(int dim, double radius) {
  if (dim <= 0) Fail(Errc::kInvalidDimension, "L1Ball: dim must be >= 1");
  if (!(radius > 0.0)) Fail(Errc::kInvalidArgument, "L1Ball: radius must be > 0");
  return FeasibleSet(L1Ball{radius, dim}, dim);
}

FeasibleSet FeasibleSet::MakeBox(Vector lower, Vector upper) {
  if (lower.size() == 0) Fail(Errc::kInvalidDimension, "Box: dim must be >= 1");
  RequireSameDim(lower, upper, "Box");
  RequireFinite(lower, "Box lower");
  RequireFinite(upper, "Box upper");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) Fail(Errc::kInvalidArgument, "Box: lower > upper");
  }
  const int d = static_cast<int>(lower.size());
  return FeasibleSet(Box{std::move(lower), std::move(upper)}, d);
}

FeasibleSet FeasibleSet::MakeUnitBox(int dim, double upper) {
  if (dim <= 0) Fail(Errc::kInvalidDimension, "Box: dim must be >= 1");
  return MakeBox(Vector::Zero(dim), Vector::Constant(dim, upper));
}

FeasibleSet FeasibleSet::MakeSimplex(int dim, double scale) {
  if (dim <= 0) Fail(Errc::kInvalidDimension, "Simplex: dim must be >= 1");
  if (!(scale > 0.0)) Fail(Errc::kInvalidArgument, "Simplex: scale must be > 0");
  return FeasibleSet(Simplex{scale, dim}, dim);
}

FeasibleSet FeasibleSet::MakeMatroidPolytope(PartitionMatroid matroid) {
  const int d = matroid.ground_size();
  if (d <= 0) Fail(Errc::kInvalidDimension, "MatroidPolytope: empty ground set");
  return FeasibleSet(MatroidPolytope{std::move(matroid)}, d);
}

FeasibleSet FeasibleSet::MakeNuclearBall(int rows, int cols, double radius) {
  if (rows <= 0 || cols <= 0) Fail(Errc::kInvalidDimension, "NuclearBall: empty shape");
  if (!(radius > 0.0)) Fail(Errc::kInvalidArgument, "NuclearBall: radius must be > 0");
  return FeasibleSet(NuclearBall{radius, rows, cols}, rows * cols);
}

FeasibleSet FeasibleSet::MakeIntersection(Box box, const FeasibleSet& base, Vector offset) {
  const int d = base.dim();
  if (box.lower.size() != d || offset.size() != d) {
    Fail(Errc::kDimensionMismatch, "Intersection: box/offset/base dims differ");
  }
  BlockPolytope b;
  if (const auto* bx = base.As<Box>()) {
    b = BoxAsBlock(*bx);
  } else if (const auto* mp = base.As<MatroidPolytope>()) {
    b = MatroidAsBlock(*mp);
  } else {
    Fail(Errc::kUnsupported, "Intersection: base kind " + base.name() +
                                 " has no exact intersection LMO");
  }
  BlockPolytope r;
  r.lower = box.lower.cwiseMax(b.lower + offset);
  r.upper = box.upper.cwiseMin(b.upper + offset);
  r.blocks = b.blocks;
  for (std::size_t k = 0; k < b.blocks.size(); ++k) {
    double shift = 0.0;
    for (int i : b.blocks[k]) shift += offset[i];
    r.caps.push_back(b.caps[k] + shift);
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (r.lower[i] > r.upper[i] + 1e-12) {
      Fail(Errc::kInfeasible, "infeasible-shrink: empty coordinate range at " + std::to_string(i));
    }
    r.upper[i] = std::max(r.upper[i], r.lower[i]);
  }
  for (std::size_t k = 0; k < r.blocks.size(); ++k) {
    double low = 0.0;
    for (int i : r.blocks[k]) low += r.lower[i];
    if (low > r.caps[k] + 1e-12) {
      Fail(Errc::kInfeasible, "infeasible-shrink: block " + std::to_string(k) +
                                  " cap below its lower bounds");
    }
  }
  Intersection in{std::move(box), std::make_shared<const FeasibleSet>(base), std::move(offset),
                  std::move(r)};
  return FeasibleSet(std::move(in), d);
}

std::string FeasibleSet::name() const {
  return std::visit(Overloaded{[](const L1Ball&) { return std::string("L1Ball"); },
                               [](const Box&) { return std::string("Box"); },
                               [](const Simplex&) { return std::string("Simplex"); },
                               [](const MatroidPolytope&) {
                                 return std::string("PartitionMatroidPolytope");
                               },
                               [](const NuclearBall&) { return std::string("NuclearNormBall"); },
                               [](const Intersection&) { return std::string("Intersection"); }},
                    kind_);
}

// ---------------------------------------------------------------------------
// Oracles

Vector LmoMin(const FeasibleSet& set, const Vector& g) {
  RequireDim(set, g, "LmoMin");
  RequireFinite(g, "LmoMin direction");
  return std::visit(
      Overloaded{
          [&](const L1Ball& b) -> Vector {
            Vector v = Vector::Zero(b.dim);
            Eigen::Index best = 0;
            double best_abs = -1.0;
            for (Eigen::Index i = 0; i < g.size(); ++i) {
              if (std::abs(g[i]) > best_abs) {
                best_abs = std::abs(g[i]);
                best = i;
              }
            }
            v[best] = g[best] > 0.0 ? -b.radius : (g[best] < 0.0 ? b.radius : -b.radius);
            return v;
          },
          [&](const Box& b) -> Vector {
            Vector v = b.lower;
            for (Eigen::Index i = 0; i < g.size(); ++i) {
              if (g[i] < 0.0) v[i] = b.upper[i];
            }
            return v;
          },
          [&](const Simplex& s) -> Vector {
            Eigen::Index best = 0;
            for (Eigen::Index i = 1; i < g.size(); ++i) {
              if (g[i] < g[best]) best = i;
            }
            Vector v = Vector::Zero(s.dim);
            v[best] = s.scale;
            return v;
          },
          [&](const MatroidPolytope& m) -> Vector { return BlockLmoMin(MatroidAsBlock(m), g); },
          [&](const NuclearBall& n) -> Vector {
            const Eigen::Map<const Matrix> gm(g.data(), n.rows, n.cols);
            const RngStream rng(kNuclearSeed, static_cast<std::uint64_t>(n.rows) * 65536 + n.cols);
            const NuclearLmoResult r = NuclearLmo(gm, n.radius, kNuclearTol, kNuclearMaxIter, rng);
            return Eigen::Map<const Vector>(r.direction.data(), n.rows * n.cols);
          },
          [&](const Intersection& in) -> Vector { return BlockLmoMin(in.resolved, g); }},
      set.kind());
}

Vector LmoMax(const FeasibleSet& set, const Vector& g) {
  RequireDim(set, g, "LmoMax");
  RequireFinite(g, "LmoMax direction");
  if (const auto* m = set.As<MatroidPolytope>()) return BlockLmoMaxFill(MatroidAsBlock(*m), g);
  if (const auto* in = set.As<Intersection>()) return BlockLmoMaxFill(in->resolved, g);
  return LmoMin(set, -g);
}

bool Contains(const FeasibleSet& set, const Vector& x, double tol) {
  if (x.size() != set.dim()) return false;
  if (!AllFinite(x)) return false;
  return std::visit(
      Overloaded{[&](const L1Ball& b) { return x.lpNorm<1>() <= b.radius + tol; },
                 [&](const Box& b) { return BlockContains(BoxAsBlock(b), x, tol); },
                 [&](const Simplex& s) {
                   if (x.minCoeff() < -tol) return false;
                   return std::abs(x.sum() - s.scale) <= tol * std::max(1.0, s.scale);
                 },
                 [&](const MatroidPolytope& m) { return BlockContains(MatroidAsBlock(m), x, tol); },
                 [&](const NuclearBall& n) {
                   const Eigen::Map<const Matrix> xm(x.data(), n.rows, n.cols);
                   Eigen::JacobiSVD<Matrix> svd(xm);
                   return svd.singularValues().sum() <= n.radius + tol;
                 },
                 [&](const Intersection& in) { return BlockContains(in.resolved, x, tol); }},
      set.kind());
}

double Diameter(const FeasibleSet& set) {
  return std::visit(
      Overloaded{[](const L1Ball& b) { return 2.0 * b.radius; },
                 [](const Box& b) { return (b.upper - b.lower).norm(); },
                 [](const Simplex& s) { return s.dim >= 2 ? s.scale * std::sqrt(2.0) : 0.0; },
                 [](const MatroidPolytope& m) {
                   return std::sqrt(static_cast<double>(m.matroid.ground_size()));
                 },
                 [](const NuclearBall& n) { return 2.0 * n.radius; },
                 [](const Intersection& in) {
                   return (in.resolved.upper - in.resolved.lower).norm();
                 }},
      set.kind());
}

bool DiameterIsExact(const FeasibleSet& set) {
  return set.As<MatroidPolytope>() == nullptr && set.As<Intersection>() == nullptr;
}

bool ContainsOrigin(const FeasibleSet& set) { return Contains(set, Vector::Zero(set.dim())); }

Vector DefaultStart(const FeasibleSet& set) {
  return std::visit(
      Overloaded{[](const L1Ball& b) -> Vector { return Vector::Zero(b.dim); },
                 [](const Box& b) -> Vector { return 0.5 * (b.lower + b.upper); },
                 [](const Simplex& s) -> Vector {
                   return Vector::Constant(s.dim, s.scale / s.dim);
                 },
                 [](const MatroidPolytope& m) -> Vector {
                   return Vector::Zero(m.matroid.ground_size());
                 },
                 [](const NuclearBall& n) -> Vector { return Vector::Zero(n.rows * n.cols); },
                 [](const Intersection& in) -> Vector { return in.resolved.lower; }},
      set.kind());
}

BlockPolytope AsBlockPolytope(const FeasibleSet& set) {
  if (const auto* b = set.As<Box>()) return BoxAsBlock(*b);
  if (const auto* m = set.As<MatroidPolytope>()) return MatroidAsBlock(*m);
  if (const auto* in = set.As<Intersection>()) return in->resolved;
  Fail(Errc::kUnsupported, "AsBlockPolytope: " + set.name() + " is not box-with-caps");
}

FeasibleSet ShrinkTranslate(const FeasibleSet& set, const Box& box, double delta) {
  if (box.lower.size() != set.dim()) {
    Fail(Errc::kDimensionMismatch, "ShrinkTranslate: box dim differs from set dim");
  }
  if (box.lower.cwiseAbs().maxCoeff() != 0.0) {
    Fail(Errc::kInvalidArgument, "ShrinkTranslate: domain box must be prod [0, a_i]");
  }
  if (delta == 0.0) return set;
  const double half = 0.5 * box.upper.minCoeff();
  if (!(delta > 0.0) || !(delta < half)) {
    Fail(Errc::kInfeasible, "infeasible-shrink: delta must lie in (0, min a_i / 2)");
  }
  BlockPolytope base = AsBlockPolytope(set);
  for (Eigen::Index i = 0; i < box.upper.size(); ++i) {
    if (base.lower[i] < -kMembershipTol || base.upper[i] > box.upper[i] + kMembershipTol) {
      Fail(Errc::kInvalidArgument, "ShrinkTranslate: set is not inside the domain box");
    }
  }
  const int d = set.dim();
  Box shrunk{Vector::Zero(d), box.upper - Vector::Constant(d, 2.0 * delta)};
  FeasibleSet out = FeasibleSet::MakeIntersection(shrunk, set, Vector::Constant(d, -delta));
  const auto& r = out.As<Intersection>()->resolved;
  if (r.blocks.empty()) return FeasibleSet::MakeBox(r.lower, r.upper);
  return out;
}

NuclearLmoResult NuclearLmo(const Matrix& g, double radius, double tol, int max_iter,
                            RngStream rng) {
  if (!(radius > 0.0)) Fail(Errc::kInvalidArgument, "NuclearLmo: radius must be > 0");
  if (!g.allFinite()) Fail(Errc::kNumerical, "NuclearLmo: non-finite input");
  NuclearLmoResult out;
  out.direction = Matrix::Zero(g.rows(), g.cols());
  if (g.cwiseAbs().maxCoeff() == 0.0) {
    out.degenerate = true;
    return out;
  }
  const Matrix gtg = g.transpose() * g;
  const int n = static_cast<int>(g.cols());

  Vector best_v;
  double best_lambda = -1.0;
  bool converged = false;
  int total_iters = 0;
  // One restart from a fresh random vector if the first run stagnates.
  for (int attempt = 0; attempt < 2 && !converged; ++attempt) {
    RngStream start = rng.Split(static_cast<std::uint64_t>(attempt));
    Vector v = SampleUnitSphere(start, n);
    double lambda = v.dot(gtg * v);
    for (int it = 0; it < max_iter; ++it) {
      ++total_iters;
      Vector w = gtg * v;
      const double wn = w.norm();
      if (wn == 0.0) break;
      v = w / wn;
      const double next = v.dot(gtg * v);
      const bool done = std::abs(next - lambda) < tol * std::max(1.0, std::abs(next));
      lambda = next;
      if (done) {
        converged = true;
        break;
      }
    }
    if (lambda > best_lambda) {
      best_lambda = lambda;
      best_v = v;
    }
  }
  const Vector gv = g * best_v;
  const double sigma = gv.norm();
  out.iterations = total_iters;
  out.converged = converged;
  out.sigma = sigma;
  if (sigma == 0.0) {
    out.degenerate = true;
    return out;
  }
  out.direction = -radius * (gv / sigma) * best_v.transpose();
  return out;
}

}  // namespace sfw
