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

#ifndef GALACTIC_LANGMODEL_H_
#define GALACTIC_LANGMODEL_H_

// Add-one smoothed trigram models over POS tags or words.
//
// Each sequence is padded as <s> <s> w1 ... wk </s>, and every position
// after the padding is predicted from the two symbols before it:
//
//   p(w3 | w1 w2) = (c(w1 w2 w3) + 1) / (c(w1 w2) + |V|)
//
// where c(w1 w2) counts w1 w2 as a history and V is the set of predictable
// symbols. An unseen history therefore gets the uniform 1 / |V|.
//
//   tag mode   V = the 17 universal tags + </s>
//   word mode  V = training types (after OOV mapping) + </s> + <unk>;
//              types seen fewer than oov_threshold times become <unk>.
//              oov_threshold = 0 turns OOV handling off: V is exactly the
//              training types + </s>, and unseen words cannot be scored.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "galactic/treebank.h"

namespace galactic {

inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kUnknownWord = "<unk>";
inline constexpr int kDefaultOovThreshold = 10;

enum class LmMode { kTag, kWord };

std::string_view lm_mode_name(LmMode mode);
LmMode parse_lm_mode(std::string_view name);

using SymbolSequence = std::vector<std::string>;

class TrigramLM {
 public:
  // Throws std::invalid_argument on an empty corpus, and ParseError for a
  // non-tag symbol in tag mode.
  static TrigramLM train(std::span<const SymbolSequence> sequences, LmMode mode,
                         int oov_threshold = kDefaultOovThreshold);

  LmMode mode() const { return mode_; }
  int oov_threshold() const { return oov_threshold_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  // Predictable symbols, sorted.
  std::vector<std::string> vocabulary() const;

  // The symbol an evaluation token is scored as (OOV mapping).
  std::string map_symbol(std::string_view symbol) const;

  double probability(std::string_view w1, std::string_view w2,
                     std::string_view w3) const;
  // Total log2 probability of a sequence, </s> included. Throws
  // std::out_of_range for a symbol outside V when OOV handling is off.
  double log2_probability(const SymbolSequence& sequence) const;
  // Number of predicted positions: length + 1.
  static std::size_t predictions(const SymbolSequence& sequence) {
    return sequence.size() + 1;
  }

  // #mode, #oov_threshold, #vocab_size headers, then "w1 w2 w3\tcount".
  void write(std::ostream& out) const;
  static TrigramLM read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static TrigramLM load(const std::filesystem::path& path);

 private:
  TrigramLM(LmMode mode, int oov_threshold) : mode_(mode), oov_threshold_(oov_threshold) {}

  using Id = std::uint32_t;
  Id intern(std::string_view symbol);
  std::int64_t lookup(std::string_view symbol) const;
  void add_trigram(Id a, Id b, Id c, std::uint64_t count);
  static std::uint64_t key3(Id a, Id b, Id c) {
    return (static_cast<std::uint64_t>(a) << 42) | (static_cast<std::uint64_t>(b) << 21) | c;
  }
  static std::uint64_t key2(Id a, Id b) { return (static_cast<std::uint64_t>(a) << 21) | b; }

  LmMode mode_;
  int oov_threshold_;
  std::unordered_map<std::string, Id> ids_;
  std::vector<std::string> names_;
  std::vector<bool> in_vocab_;
  std::vector<Id> vocab_;
  std::unordered_map<std::uint64_t, std::uint64_t> trigrams_;
  std::unordered_map<std::uint64_t, std::uint64_t> histories_;
  std::unordered_map<Id, std::uint64_t> unigrams_;
};

// 2^(-(1/N) sum log2 p) over all predicted positions, </s> included.
double perplexity(const TrigramLM& lm, std::span<const SymbolSequence> sequences);

std::vector<SymbolSequence> tag_sequences(std::span<const DepTree> trees);
std::vector<SymbolSequence> word_sequences(std::span<const DepTree> trees);

struct SelectionRow {
  std::string language;
  double log2_probability = 0;
  int rank = 0;  // 1 = best
};

struct Selection {
  std::string best;
  std::vector<SelectionRow> table;  // ranked
};

// Picks the candidate under which the target tag sequences are most likely;
// ties go to the lexicographically smallest id. Throws std::invalid_argument
// when there are no candidates.
Selection select_source(
    std::span<const std::pair<std::string, const TrigramLM*>> candidates,
    std::span<const SymbolSequence> target);

}  // namespace galactic

#endif  // GALACTIC_LANGMODEL_H_
