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

#ifndef GALACTIC_SYNTHESIS_H_
#define GALACTIC_SYNTHESIS_H_

// Synthetic treebanks: sample orderings from (interpolated) ordering
// models and re-linearize substrate trees with them.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "galactic/ordering_model.h"
#include "galactic/treebank.h"

namespace galactic {

std::string_view tool_version();

inline constexpr std::array<std::string_view, 3> kSplits = {"train", "dev",
                                                            "test"};

// S, S[R_N/N], S[R_V/V] or S[R_N/N, R_V/V], named on disk as
//   <sub> | <sub>~<rN>@N | <sub>~<rV>@V | <sub>~<rN>@N~<rV>@V
// lambda and seed are not part of the name.
struct LanguageSpec {
  std::string substrate;
  std::optional<std::string> superstrate_n;
  std::optional<std::string> superstrate_v;
  double lambda = kDefaultLambda;
  std::uint64_t seed = 0;

  std::string directory_name() const;
};

// Throws ModelError on anything directory_name() would not produce.
LanguageSpec parse_language_spec(std::string_view name);

// Every S, S[R/N], S[R/V], S[R/N, R'/V] over the given languages:
// |L| * (|L| + 1)^2 specs, self-permutations included.
std::vector<LanguageSpec> enumerate_language_specs(
    std::span<const std::string> languages);

std::uint64_t fnv1a64(std::string_view data);

// Pseudorandom stream: std::mt19937_64 seeded with the 64-bit FNV-1a hash
// of "<seed>|<spec>|<split>|<ordinal>". Uniform doubles take the top 53
// bits of one engine output. Both steps are fully specified by the C++
// standard, so draws agree across platforms.
class RngStream {
 public:
  static constexpr std::string_view kName = "mt19937_64+fnv1a64/v1";

  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  static RngStream derive(std::uint64_t seed, std::string_view spec,
                          std::string_view split, std::uint64_t ordinal);

  // Uniform in [0, 1).
  double uniform();
  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

// Exact draw from p(order | config). n == 1 returns the identity without
// consuming a draw; n > 7 throws std::invalid_argument.
Permutation sample_ordering(const CompiledModel& model, const LocalConfig& config,
                            RngStream& rng);
Permutation sample_ordering(const OrderingModel& model, const LocalConfig& config,
                            RngStream& rng);

struct PermuteNotes {
  std::size_t dropped_range_lines = 0;
  std::size_t cleared_deps = 0;
};

// Re-linearizes a projective tree. Nodes are visited depth-first from the
// root, children in their original surface order, and each N (V) node
// draws an ordering of itself and its dependents from model_n (model_v);
// other nodes, and every node of a class whose model is null, keep their
// order. Subtrees move as units. Tokens are renumbered left to right, heads
// remapped, and each token's MISC gains OrigIdx=<original index>.
// Multiword/empty-node lines are dropped; DEPS entries are remapped when
// every head is an integer and cleared to "_" otherwise.
//
// Throws std::invalid_argument for non-projective trees or any node with
// n > 7.
DepTree permute_tree(const DepTree& tree, const CompiledModel* model_n,
                     const CompiledModel* model_v, RngStream& rng,
                     PermuteNotes* notes = nullptr);

// Ordering models on disk as <dir>/<lang>.<N|V>.model, loaded lazily.
class ModelStore {
 public:
  explicit ModelStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  static std::filesystem::path model_path(const std::filesystem::path& dir,
                                          std::string_view language,
                                          PosClass pos_class);

  // Throws ModelError when the file is missing.
  const OrderingModel& get(const std::string& language, PosClass pos_class);

 private:
  std::filesystem::path dir_;
  std::mutex mutex_;
  std::map<std::pair<std::string, char>, OrderingModel> cache_;
};

// <root>/<lang>-ud-<split>.conllu or <root>/<lang>/<lang>-ud-<split>.conllu.
// Throws IoError when neither exists.
std::filesystem::path find_split_file(const std::filesystem::path& root,
                                      std::string_view language,
                                      std::string_view split);

struct SynthesisOptions {
  ParseMode mode = ParseMode::kStrict;
  int threads = 1;
};

// Writes <output_root>/<name>/<name>-ud-{train,dev,test}.conllu and
// <output_root>/<name>/manifest.tsv, where <name> = spec.directory_name().
// The class models are (1 - lambda) * superstrate + lambda * substrate.
// Output bytes depend only on the spec, the inputs, and tool_version().
std::filesystem::path synthesize_language(const LanguageSpec& spec,
                                          const std::filesystem::path& treebank_root,
                                          ModelStore& models,
                                          const std::filesystem::path& output_root,
                                          const SynthesisOptions& options = {});

}  // namespace galactic

#endif  // GALACTIC_SYNTHESIS_H_
