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

#ifndef GALACTIC_COMPILED_CONFIG_H_
#define GALACTIC_COMPILED_CONFIG_H_

// Integer-id form of a LocalConfig used for exact enumeration.
//
// Every non-H feature an ordering can fire is attached to one of three
// event kinds over element pairs: "a precedes b", "a precedes b on side d
// of the head", and "a is immediately followed by b". Precomputing the
// feature ids of each event lets a whole SJT walk run on table lookups,
// updating the score after each adjacent swap from the events the swap
// can change instead of re-extracting the full vector.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "galactic/features.h"
#include "galactic/treebank.h"

namespace galactic {

class FeatureIndex {
 public:
  // -1 when absent.
  int find(std::string_view name) const;
  int intern(const std::string& name);

  const std::string& name(int id) const { return names_[id]; }
  std::size_t size() const { return names_.size(); }
  bool has_h_features() const { return h_count_ > 0; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_map<std::string, int, Hash, std::equal_to<>> ids_;
  std::vector<std::string> names_;
  std::size_t h_count_ = 0;
};

class CompiledConfig {
 public:
  // Adds every non-H feature the configuration can fire to `index`. H
  // features are only ever looked up: a name resolves iff it is already in
  // the index, so callers intern the H whitelist first.
  static CompiledConfig grow(const LocalConfig& config, FeatureIndex& index);
  // Features missing from `index` get id -1 (weight 0).
  static CompiledConfig lookup(const LocalConfig& config,
                               const FeatureIndex& index);
  // In both cases `index` must outlive the result and stay unchanged while
  // it is in use.

  int n() const { return n_; }
  int head() const { return head_; }  // element id of the head

  using Triple = std::array<std::int32_t, 3>;

  const Triple& order_event(int a, int b) const { return order_[a * n_ + b]; }
  const Triple& side_event(int a, int b, int side) const {
    return side_[(a * n_ + b) * 3 + side];
  }
  // Extended ids: n() is BOS, n() + 1 is EOS.
  const Triple& adjacent_event(int a, int b) const {
    return adjacent_[a * (n_ + 2) + b];
  }

  // Feature id of the H span over extended element ids, or -1.
  int h_feature(std::span<const int> extended_ids) const;
  bool may_fire_h() const { return may_fire_h_; }

 private:
  CompiledConfig(const LocalConfig& config, const FeatureIndex& index,
                 FeatureIndex* growing);

  int n_ = 0;
  int head_ = 0;
  const FeatureIndex* index_ = nullptr;
  bool may_fire_h_ = false;
  std::vector<Triple> order_;
  std::vector<Triple> side_;
  std::vector<Triple> adjacent_;
  std::vector<std::string> symbols_;      // "tag.rel" per extended id
  std::vector<std::uint8_t> symbol_ids_;  // equal symbols share an id
  mutable std::unordered_map<std::uint32_t, std::int32_t> h_cache_;
};

// Score of one ordering computed from the event tables from scratch.
double compiled_score(const CompiledConfig& config, std::span<const double> theta,
                      std::span<const int> order);

// Scores of all n! orderings in SJT order (the first is the identity),
// each obtained from its predecessor by an incremental update.
std::vector<double> sjt_scores(const CompiledConfig& config,
                               std::span<const double> theta);

double log_sum_exp(std::span<const double> scores);

// log Z for the configuration. When `expected` is non-null, adds
// scale * E[f] into it (indexed by feature id).
double log_partition(const CompiledConfig& config, std::span<const double> theta,
                     std::span<double> expected = {}, double scale = 1.0);

// Adds scale * f(order) into `out`.
void add_features(const CompiledConfig& config, std::span<const int> order,
                  double scale, std::span<double> out);

// Inverse-CDF draw: walks the SJT order accumulating probabilities and
// returns the first ordering whose cumulative mass reaches u in [0, 1).
Permutation sample_compiled(const CompiledConfig& config,
                            std::span<const double> theta, double u);

}  // namespace galactic

#endif  // GALACTIC_COMPILED_CONFIG_H_
