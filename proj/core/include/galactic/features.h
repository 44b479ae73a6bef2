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

#ifndef GALACTIC_FEATURES_H_
#define GALACTIC_FEATURES_H_

// Sparse features of an ordering of one head and its dependents.
//
// An ordering of n elements is viewed as an extended sequence of n + 2
// slots: slot 0 is (BOS, BOS), slots 1..n hold the (tag, relation) of the
// permuted elements, and slot n + 1 is (EOS, EOS). The head element carries
// the relation "head". Every pair of slots i < j contributes:
//
//   L.t.r  L.t  L.r                 i left of the head (j is the head)
//   L.ti.ri.tj.rj  L.ti.tj  L.ri.rj  i left of j, neither is the head
//   d.ti.ri.tj.rj  d.ti.tj  d.ri.rj  same, d in {l, m, r}: both left of
//                                    the head, straddling it, both right
//   A.ti.ri.tj.rj  A.ti.tj  A.ri.rj  j == i + 1, sentinels included
//
// and every contiguous span of 3 to 5 slots contributes H.t.r.t.r...,
// kept only when it is on the model's H whitelist.
//
// Relations are reduced to their universal prefix ("acl:relcl" -> "acl").
// These names are the keys of the model file format; do not change them.

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "galactic/treebank.h"

namespace galactic {

inline constexpr std::string_view kBos = "BOS";
inline constexpr std::string_view kEos = "EOS";

// Ordered for deterministic iteration and printing.
using FeatureVector = std::map<std::string, double>;

// order[k] is the index (into LocalConfig::elements) of the element placed
// at position k. The observed order is the identity.
using Permutation = std::vector<int>;

Permutation identity_permutation(int n);
bool is_permutation_of(std::span<const int> order, int n);

struct Slot {
  std::string tag;
  std::string relation;
};

struct ExtendedSequence {
  std::vector<Slot> slots;
  int head = 0;  // slot index of the head element

  int n() const { return static_cast<int>(slots.size()) - 2; }
};

ExtendedSequence make_sequence(const LocalConfig& config,
                               std::span<const int> order);

std::vector<std::string> pair_features(const ExtendedSequence& seq, int i,
                                       int j);
// The single H name for slots i..j, or nothing when the span is not 3 to 5
// slots long or leaves the sequence.
std::vector<std::string> hgram_features(const ExtendedSequence& seq, int i,
                                        int j);

bool is_h_feature(std::string_view name);

// Which H features survive extraction.
class HWhitelist {
 public:
  static HWhitelist all() { return HWhitelist(); }
  explicit HWhitelist(std::set<std::string> names) : names_(std::move(names)) {}

  bool is_all() const { return !names_.has_value(); }
  bool allows(const std::string& name) const {
    return !names_ || names_->contains(name);
  }
  const std::set<std::string>& names() const;

 private:
  HWhitelist() = default;
  std::optional<std::set<std::string>> names_;
};

FeatureVector extract(const LocalConfig& config, std::span<const int> order,
                      const HWhitelist& whitelist);

inline constexpr double kHWhitelistFraction = 0.10;

// The ceil(fraction * |counts|) most frequent names; ties at the cutoff go
// to the lexicographically smaller name.
std::set<std::string> top_fraction(const std::map<std::string, long>& counts,
                                   double fraction);

// H features fired by the observed orders of `configs`, cut to the top 10%.
std::set<std::string> build_h_whitelist(std::span<const LocalConfig> configs);

}  // namespace galactic

#endif  // GALACTIC_FEATURES_H_
