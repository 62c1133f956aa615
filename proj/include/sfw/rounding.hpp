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

// Pipage rounding for partition matroids.

#ifndef SFW_ROUNDING_HPP_
#define SFW_ROUNDING_HPP_

#include <vector>

#include "sfw/constraints.hpp"
#include "sfw/rng.hpp"
#include "sfw/set_function.hpp"

namespace sfw {

inline constexpr int kPipageSamples = 200;

struct PipageResult {
  std::vector<int> set;       // sorted element indices
  std::vector<double> path;   // F at the start point and after every move
  double final_value = 0.0;   // f(set)
  bool exact = true;          // F evaluated by enumeration or closed form
};

// Rounds x in the base polytope of m to a base without decreasing the
// multilinear extension of f. Within each block the two lowest-index
// fractional coordinates are moved along e_i - e_j to whichever endpoint has
// the larger F; on a tie, to the endpoint that makes coordinate i integral.
// F is exact for d <= 20 (or when f has a closed form), otherwise a
// kPipageSamples-draw average from rng.
PipageResult PipageRoundTraced(const Vector& x, const PartitionMatroid& m, const SetFunction& f,
                               RngStream& rng);

std::vector<int> PipageRound(const Vector& x, const PartitionMatroid& m, const SetFunction& f,
                             RngStream& rng);

// Raises a point of the matroid polytope to the base polytope: within each
// block, coordinates are raised toward 1 in index order until the block sum
// reaches its budget. For monotone f this does not decrease F.
Vector FillToBase(const Vector& x, const PartitionMatroid& m);

}  // namespace sfw

#endif  // SFW_ROUNDING_HPP_
