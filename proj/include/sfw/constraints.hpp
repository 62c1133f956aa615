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

// Compact convex feasible sets and their linear optimization oracles.
//
// Every LMO breaks ties toward the smallest coordinate index, and a zero
// direction yields the lexicographically first vertex the tie rule produces.

#ifndef SFW_CONSTRAINTS_HPP_
#define SFW_CONSTRAINTS_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "sfw/core.hpp"
#include "sfw/rng.hpp"

namespace sfw {

inline constexpr double kMembershipTol = 1e-9;

class PartitionMatroid {
 public:
  PartitionMatroid() = default;
  PartitionMatroid(int ground_size, std::vector<std::vector<int>> blocks,
                   std::vector<int> budgets);

  int ground_size() const { return ground_size_; }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  const std::vector<int>& budgets() const { return budgets_; }
  int block_of(int element) const { return block_of_[element]; }
  int rank() const;

  bool IsIndependent(const std::vector<int>& set) const;
  bool IsBase(const std::vector<int>& set) const;
  // Product of per-block binomials, saturating at UINT64_MAX.
  std::uint64_t CountBases() const;

 private:
  int ground_size_ = 0;
  std::vector<std::vector<int>> blocks_;
  std::vector<int> budgets_;
  std::vector<int> block_of_;
};

struct L1Ball {
  double radius = 1.0;
  int dim = 0;
};

struct Box {
  Vector lower;
  Vector upper;
};

// {x >= 0 : sum(x) = scale}.
struct Simplex {
  double scale = 1.0;
  int dim = 0;
};

// conv{1_I : I independent} = {x in [0,1]^d : per-block sum <= budget}.
struct MatroidPolytope {
  PartitionMatroid matroid;
};

// Nuclear-norm ball over rows x cols matrices, flattened column-major.
struct NuclearBall {
  double radius = 1.0;
  int rows = 0;
  int cols = 0;
};

// Box with per-block sum caps. Coordinates outside every block are only
// box-constrained. This is the resolved form of the intersections the
// black-box solvers need.
struct BlockPolytope {
  Vector lower;
  Vector upper;
  std::vector<std::vector<int>> blocks;
  std::vector<double> caps;
};

class FeasibleSet;

// box ∩ (base + offset), with base a Box or MatroidPolytope.
struct Intersection {
  Box box;
  std::shared_ptr<const FeasibleSet> base;
  Vector offset;
  BlockPolytope resolved;
};

class FeasibleSet {
 public:
  using Kind = std::variant<L1Ball, Box, Simplex, MatroidPolytope, NuclearBall, Intersection>;

  static FeasibleSet MakeL1Ball(int dim, double radius);
  static FeasibleSet MakeBox(Vector lower, Vector upper);
  static FeasibleSet MakeUnitBox(int dim, double upper = 1.0);
  static FeasibleSet MakeSimplex(int dim, double scale);
  static FeasibleSet MakeMatroidPolytope(PartitionMatroid matroid);
  static FeasibleSet MakeNuclearBall(int rows, int cols, double radius);
  // Only Box and MatroidPolytope bases are accepted.
  static FeasibleSet MakeIntersection(Box box, const FeasibleSet& base, Vector offset);

  const Kind& kind() const { return kind_; }
  int dim() const { return dim_; }
  std::string name() const;

  template <typename T>
  const T* As() const { return std::get_if<T>(&kind_); }

 private:
  FeasibleSet(Kind kind, int dim) : kind_(std::move(kind)), dim_(dim) {}

  Kind kind_;
  int dim_ = 0;
};

Vector LmoMin(const FeasibleSet& set, const Vector& g);
// argmax <v, g>. On a matroid polytope (and its box intersections) every
// block is filled to its budget with the largest g values, so the result is
// a base: the maximizer over bases, and over the polytope when g >= 0.
Vector LmoMax(const FeasibleSet& set, const Vector& g);

bool Contains(const FeasibleSet& set, const Vector& x, double tol = kMembershipTol);

// Exact for L1Ball, Box, Simplex and NuclearBall; an upper bound from the
// containing box otherwise.
double Diameter(const FeasibleSet& set);
bool DiameterIsExact(const FeasibleSet& set);

bool ContainsOrigin(const FeasibleSet& set);

// A fixed feasible starting point: the origin where feasible, the box
// midpoint for boxes, the barycenter for simplices.
Vector DefaultStart(const FeasibleSet& set);

// (X'_delta ∩ K) - delta*1 for the domain box X = prod [0, a_i].
// delta = 0 returns `set` unchanged.
FeasibleSet ShrinkTranslate(const FeasibleSet& set, const Box& box, double delta);

BlockPolytope AsBlockPolytope(const FeasibleSet& set);

struct NuclearLmoResult {
  Matrix direction;
  double sigma = 0.0;  // estimated top singular value
  int iterations = 0;
  bool degenerate = false;
  bool converged = true;
};

// -radius * u1 v1^T for the top singular pair of g, by power iteration on
// g^T g started from a random unit vector.
NuclearLmoResult NuclearLmo(const Matrix& g, double radius, double tol, int max_iter,
                            RngStream rng);

}  // namespace sfw

#endif  // SFW_CONSTRAINTS_HPP_
