// Copyright 2026 The Galactic Authors.
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

#ifndef GALACTIC_SJT_H_
#define GALACTIC_SJT_H_

// Steinhaus-Johnson-Trotter enumeration: every permutation of n items,
// starting from the identity, each reached from the previous one by a
// single swap of adjacent positions.

#include <cstdint>
#include <optional>
#include <vector>

#include "galactic/features.h"

namespace galactic {

// Exact enumeration is supported up to 7! = 5040 orderings.
inline constexpr int kMaxEnumerable = 7;

long factorial(int n);

class SjtEnumerator {
 public:
  // Throws std::invalid_argument unless 1 <= n <= kMaxEnumerable.
  explicit SjtEnumerator(int n);

  const Permutation& current() const { return perm_; }
  long step() const { return step_; }

  // Moves to the next permutation and returns the left position of the
  // swapped pair, or nullopt once all n! permutations have been visited.
  std::optional<int> next();

 private:
  int n_;
  Permutation perm_;
  std::vector<int> position_;   // position_[value]
  std::vector<int> direction_;  // -1 left, +1 right, per value
  long step_ = 0;
};

struct SjtStep {
  Permutation permutation;
  std::optional<int> swapped;  // nullopt for the first (identity) entry
};

std::vector<SjtStep> sjt_enumerate(int n);

// The n! - 1 swap positions of the enumeration, computed once per n.
const std::vector<std::uint8_t>& sjt_swaps(int n);

}  // namespace galactic

#endif  // GALACTIC_SJT_H_
