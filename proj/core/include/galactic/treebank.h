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

#ifndef GALACTIC_TREEBANK_H_
#define GALACTIC_TREEBANK_H_

// CoNLL-U treebanks: reading, writing, validation, and the local
// head-plus-dependents configurations that ordering models permute.

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace galactic {

// The 17 universal POS tags and 40 universal relations of UD v1.2.
inline constexpr std::array<std::string_view, 17> kUniversalTags = {
    "ADJ",  "ADP",  "ADV",   "AUX",   "CONJ",  "DET",   "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM",   "VERB", "X"};

inline constexpr std::array<std::string_view, 40> kUniversalRelations = {
    "acl",       "advcl",      "advmod",   "amod",      "appos",
    "aux",       "auxpass",    "case",     "cc",        "ccomp",
    "compound",  "conj",       "cop",      "csubj",     "csubjpass",
    "dep",       "det",        "discourse", "dislocated", "dobj",
    "expl",      "foreign",    "goeswith", "iobj",      "list",
    "mark",      "mwe",        "name",     "neg",       "nmod",
    "nsubj",     "nsubjpass",  "nummod",   "parataxis", "punct",
    "remnant",   "reparandum", "root",     "vocative",  "xcomp"};

// Synthetic relation carried by the head element of a LocalConfig.
inline constexpr std::string_view kHeadRelation = "head";

bool is_universal_tag(std::string_view tag);
// Checks the part before any ':' subtype ("acl:relcl" -> "acl").
bool is_universal_relation(std::string_view relation);
std::string_view relation_prefix(std::string_view relation);

enum class ParseMode { kStrict, kLenient };

// N = NOUN, PROPN, PRON; V = VERB.
enum class PosClass { kNoun, kVerb };

char pos_class_code(PosClass pos_class);
PosClass parse_pos_class(std::string_view code);
bool in_pos_class(std::string_view upos, PosClass pos_class);

struct Token {
  int index = 0;
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos;
  std::string feats;
  int head = 0;
  std::string deprel;
  std::string deps;
  std::string misc;

  friend bool operator==(const Token&, const Token&) = default;
};

// A line that sits between tokens but is not one: a multiword range
// ("3-4") or an empty node ("3.1"). It is emitted just before token
// `before_token`, or after the last token when that exceeds the size.
struct RangeLine {
  int before_token = 1;
  std::string text;

  friend bool operator==(const RangeLine&, const RangeLine&) = default;
};

struct DepTree {
  std::vector<Token> tokens;
  std::vector<std::string> comments;
  std::vector<RangeLine> ranges;
  std::string source_id;

  std::size_t size() const { return tokens.size(); }
  // 1-based access.
  const Token& token(int index) const { return tokens[index - 1]; }
  int root() const;
  // children()[0] holds the root; children()[i] the dependents of token i,
  // both in surface order.
  std::vector<std::vector<int>> children() const;

  friend bool operator==(const DepTree&, const DepTree&) = default;
};

struct ParseReport {
  std::size_t sentences = 0;
  std::size_t skipped = 0;
  std::size_t mapped_tags = 0;
  std::size_t mapped_relations = 0;
  std::vector<std::string> messages;
};

// Strict mode throws ParseError on the first problem. Lenient mode maps
// unknown tags to "X" and unknown relations to "dep", and skips (and
// reports) structurally broken sentences.
std::vector<DepTree> parse_conllu(std::string_view text,
                                  ParseMode mode = ParseMode::kStrict,
                                  ParseReport* report = nullptr);
std::vector<DepTree> read_conllu_file(const std::filesystem::path& path,
                                      ParseMode mode = ParseMode::kStrict,
                                      ParseReport* report = nullptr);

std::string serialize_conllu(std::span<const DepTree> trees);
void write_conllu_file(const std::filesystem::path& path,
                       std::span<const DepTree> trees);

// Throws ParseError unless the heads form a single-rooted tree.
void validate_tree(const DepTree& tree);

// For every arc (h, d), every token strictly between h and d descends from h.
bool is_projective(const DepTree& tree);

// Largest n (node plus its dependents) over all nodes of the tree.
int max_fanout(const DepTree& tree);

// Trees with a node of n >= 8 are not generated from.
inline constexpr int kMaxGenerationFanout = 7;
// Nodes with n >= 7 are not trained on.
inline constexpr int kMaxTrainingFanout = 6;

struct FilterReport {
  std::size_t kept = 0;
  std::size_t nonprojective = 0;
  std::size_t high_fanout = 0;
  // (source_id, reason) for every dropped tree, in input order.
  std::vector<std::pair<std::string, std::string>> dropped;
};

struct FilterResult {
  std::vector<DepTree> kept;
  FilterReport report;
};

// Keeps projective trees with no node of n >= 8. A tree failing both tests
// is reported as "nonprojective".
FilterResult filter_for_generation(std::vector<DepTree> trees);

struct ConfigElement {
  std::string tag;
  std::string relation;  // verbatim deprel, or kHeadRelation
  int token = 0;         // 1-based index in the source tree

  friend bool operator==(const ConfigElement&, const ConfigElement&) = default;
};

// One head and its dependents, in surface order.
struct LocalConfig {
  std::string head_tag;
  std::string head_relation_to_parent;
  std::vector<ConfigElement> elements;
  std::string tree_id;
  int head_token = 0;

  int n() const { return static_cast<int>(elements.size()); }
  // Index into `elements` of the head.
  int head_position() const;
};

LocalConfig local_config_at(const DepTree& tree, int token);
// One configuration per token whose tag is in the class.
std::vector<LocalConfig> local_configs(const DepTree& tree, PosClass pos_class);

// Configurations from projective trees with n <= kMaxTrainingFanout, for
// fitting an ordering model.
std::vector<LocalConfig> training_configs(std::span<const DepTree> trees,
                                          PosClass pos_class);

struct TouchedCount {
  std::size_t touched = 0;
  std::size_t total = 0;

  double fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(touched) / total;
  }
};

// Tokens that are N or V heads or dependents of one.
TouchedCount touched_tokens(std::span<const DepTree> trees);

}  // namespace galactic

#endif  // GALACTIC_TREEBANK_H_
