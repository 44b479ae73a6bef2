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

#include "galactic/sjt.h"

#include <array>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace galactic {

long factorial(int n) {
  long f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

SjtEnumerator::SjtEnumerator(int n) : n_(n) {
  if (n < 1 || n > kMaxEnumerable) {
    throw std::invalid_argument("SJT enumeration needs 1 <= n <= 7, got n = " +
                                std::to_string(n));
  }
  perm_ = identity_permutation(n);
  position_ = identity_permutation(n);
  direction_.assign(n, -1);
}

std::optional<int> SjtEnumerator::next() {
  // Largest mobile value: one pointing at an adjacent smaller value.
  int mobile = -1;
  for (int v = n_ - 1; v >= 0; --v) {
    const int target = position_[v] + direction_[v];
    if (target >= 0 && target < n_ && perm_[target] < v) {
      mobile = v;
      break;
    }
  }
  if (mobile < 0) return std::nullopt;
  const int from = position_[mobile];
  const int to = from + direction_[mobile];
  const int other = perm_[to];
  std::swap(perm_[from], perm_[to]);
  position_[mobile] = to;
  position_[other] = from;
  for (int v = mobile + 1; v < n_; ++v) direction_[v] = -direction_[v];
  ++step_;
  return std::min(from, to);
}

std::vector<SjtStep> sjt_enumerate(int n) {
  SjtEnumerator it(n);
  std::vector<SjtStep> out;
  out.reserve(factorial(n));
  out.push_back({it.current(), std::nullopt});
  while (auto swapped = it.next()) out.push_back({it.current(), swapped});
  return out;
}

const std::vector<std::uint8_t>& sjt_swaps(int n) {
  if (n < 1 || n > kMaxEnumerable) {
    throw std::invalid_argument("SJT enumeration needs 1 <= n <= 7, got n = " +
                                std::to_string(n));
  }
  static std::array<std::vector<std::uint8_t>, kMaxEnumerable + 1> tables;
  static std::array<std::once_flag, kMaxEnumerable + 1> once;
  std::call_once(once[n], [n] {
    SjtEnumerator it(n);
    std::vector<std::uint8_t> swaps;
    swaps.reserve(factorial(n));
    while (auto s = it.next()) swaps.push_back(static_cast<std::uint8_t>(*s));
    tables[n] = std::move(swaps);
  });
  return tables[n];
}

}  // namespace galactic
