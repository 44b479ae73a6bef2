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

#include "galactic/langmodel.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "galactic/errors.h"

namespace galactic {

std::string_view lm_mode_name(LmMode mode) {
  return mode == LmMode::kTag ? "tag" : "word";
}

LmMode parse_lm_mode(std::string_view name) {
  if (name == "tag") return LmMode::kTag;
  if (name == "word") return LmMode::kWord;
  throw std::invalid_argument("unknown LM mode '" + std::string(name) +
                              "' (want tag or word)");
}

TrigramLM::Id TrigramLM::intern(std::string_view symbol) {
  const auto it = ids_.find(std::string(symbol));
  if (it != ids_.end()) return it->second;
  const Id id = static_cast<Id>(names_.size());
  if (id >= (1u << 21)) throw std::length_error("trigram LM vocabulary too large");
  ids_.emplace(std::string(symbol), id);
  names_.emplace_back(symbol);
  in_vocab_.push_back(false);
  return id;
}

std::int64_t TrigramLM::lookup(std::string_view symbol) const {
  const auto it = ids_.find(std::string(symbol));
  return it == ids_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

void TrigramLM::add_trigram(Id a, Id b, Id c, std::uint64_t count) {
  trigrams_[key3(a, b, c)] += count;
  histories_[key2(a, b)] += count;
  unigrams_[c] += count;
}

TrigramLM TrigramLM::train(std::span<const SymbolSequence> sequences, LmMode mode,
                           int oov_threshold) {
  if (sequences.empty()) {
    throw std::invalid_argument("cannot train a trigram LM on an empty corpus");
  }
  if (oov_threshold < 0) throw std::invalid_argument("negative OOV threshold");
  TrigramLM lm(mode, oov_threshold);
  auto add_to_vocab = [&lm](std::string_view s) {
    const Id id = lm.intern(s);
    if (!lm.in_vocab_[id]) {
      lm.in_vocab_[id] = true;
      lm.vocab_.push_back(id);
    }
  };
  lm.intern(kSentenceStart);
  add_to_vocab(kSentenceEnd);

  std::unordered_map<std::string, std::uint64_t> frequency;
  if (mode == LmMode::kTag) {
    for (std::string_view tag : kUniversalTags) add_to_vocab(tag);
    for (const SymbolSequence& seq : sequences) {
      for (const std::string& s : seq) {
        if (!is_universal_tag(s)) throw ParseError(0, "'" + s + "' is not a universal POS tag");
      }
    }
  } else {
    for (const SymbolSequence& seq : sequences) {
      for (const std::string& s : seq) ++frequency[s];
    }
    if (oov_threshold > 0) add_to_vocab(kUnknownWord);
  }
  auto mapped = [&](const std::string& s) -> std::string_view {
    if (mode == LmMode::kWord && frequency[s] < static_cast<std::uint64_t>(oov_threshold)) {
      return kUnknownWord;
    }
    return s;
  };

  const Id start = lm.ids_.at(std::string(kSentenceStart));
  const Id end = lm.ids_.at(std::string(kSentenceEnd));
  for (const SymbolSequence& seq : sequences) {
    Id a = start;
    Id b = start;
    for (const std::string& s : seq) {
      const std::string_view m = mapped(s);
      add_to_vocab(m);
      const Id c = lm.intern(m);
      lm.add_trigram(a, b, c, 1);
      a = b;
      b = c;
    }
    lm.add_trigram(a, b, end, 1);
  }
  return lm;
}

std::vector<std::string> TrigramLM::vocabulary() const {
  std::vector<std::string> out;
  for (Id id : vocab_) out.push_back(names_[id]);
  std::sort(out.begin(), out.end());
  return out;
}

std::string TrigramLM::map_symbol(std::string_view symbol) const {
  if (mode_ == LmMode::kWord && oov_threshold_ > 0) {
    const std::int64_t id = lookup(symbol);
    if (id < 0 || !in_vocab_[id] || symbol == kSentenceEnd) {
      return std::string(kUnknownWord);
    }
  }
  return std::string(symbol);
}

double TrigramLM::probability(std::string_view w1, std::string_view w2,
                              std::string_view w3) const {
  const std::int64_t c = lookup(w3);
  if (c < 0 || !in_vocab_[c]) {
    throw std::out_of_range("'" + std::string(w3) + "' is outside the LM vocabulary");
  }
  const std::int64_t a = lookup(w1);
  const std::int64_t b = lookup(w2);
  std::uint64_t tri = 0;
  std::uint64_t hist = 0;
  if (a >= 0 && b >= 0) {
    if (const auto it = trigrams_.find(key3(a, b, c)); it != trigrams_.end()) tri = it->second;
    if (const auto it = histories_.find(key2(a, b)); it != histories_.end()) hist = it->second;
  }
  return (static_cast<double>(tri) + 1.0) /
         (static_cast<double>(hist) + static_cast<double>(vocab_.size()));
}

double TrigramLM::log2_probability(const SymbolSequence& sequence) const {
  std::string a(kSentenceStart);
  std::string b(kSentenceStart);
  double total = 0;
  for (const std::string& s : sequence) {
    std::string c = map_symbol(s);
    total += std::log2(probability(a, b, c));
    a = std::move(b);
    b = std::move(c);
  }
  total += std::log2(probability(a, b, kSentenceEnd));
  return total;
}

void TrigramLM::write(std::ostream& out) const {
  out << "#mode " << lm_mode_name(mode_) << '\n';
  out << "#oov_threshold " << oov_threshold_ << '\n';
  out << "#vocab_size " << vocab_.size() << '\n';
  std::vector<std::pair<std::string, std::uint64_t>> lines;
  lines.reserve(trigrams_.size());
  constexpr std::uint64_t kMask = (1u << 21) - 1;
  for (const auto& [key, count] : trigrams_) {
    lines.emplace_back(names_[key >> 42] + " " + names_[(key >> 21) & kMask] + " " +
                           names_[key & kMask],
                       count);
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& [gram, count] : lines) out << gram << '\t' << count << '\n';
}

TrigramLM TrigramLM::read(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::string mode_name;
  long threshold = -1;
  long vocab_size = -1;
  std::vector<std::pair<std::array<std::string, 3>, std::uint64_t>> grams;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::size_t space = line.find(' ');
      const std::string key = line.substr(1, space - 1);
      const std::string value = space == std::string::npos ? "" : line.substr(space + 1);
      try {
        if (key == "mode") mode_name = value;
        if (key == "oov_threshold") threshold = std::stol(value);
        if (key == "vocab_size") vocab_size = std::stol(value);
      } catch (const std::exception&) {
        throw ParseError(line_no, "bad header value '" + value + "'");
      }
      continue;
    }
    const std::size_t tab = line.find('\t');
    const std::size_t s1 = line.find(' ');
    const std::size_t s2 = s1 == std::string::npos ? s1 : line.find(' ', s1 + 1);
    if (tab == std::string::npos || s2 == std::string::npos || s2 > tab) {
      throw ParseError(line_no, "expected '<w1> <w2> <w3>\\t<count>'");
    }
    std::uint64_t count = 0;
    try {
      count = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad count");
    }
    grams.push_back({{line.substr(0, s1), line.substr(s1 + 1, s2 - s1 - 1),
                      line.substr(s2 + 1, tab - s2 - 1)},
                     count});
  }
  if (mode_name.empty() || threshold < 0 || vocab_size < 0) {
    throw ParseError(0, "LM file lacks #mode, #oov_threshold or #vocab_size");
  }
  TrigramLM lm(parse_lm_mode(mode_name), static_cast<int>(threshold));
  auto add_to_vocab = [&lm](std::string_view s) {
    const Id id = lm.intern(s);
    if (!lm.in_vocab_[id]) {
      lm.in_vocab_[id] = true;
      lm.vocab_.push_back(id);
    }
  };
  lm.intern(kSentenceStart);
  add_to_vocab(kSentenceEnd);
  if (lm.mode_ == LmMode::kTag) {
    for (std::string_view tag : kUniversalTags) add_to_vocab(tag);
  } else if (lm.oov_threshold_ > 0) {
    add_to_vocab(kUnknownWord);
  }
  for (const auto& [gram, count] : grams) {
    if (lm.mode_ == LmMode::kTag && gram[2] != kSentenceEnd && !is_universal_tag(gram[2])) {
      throw ParseError(0, "tag LM predicts non-tag '" + gram[2] + "'");
    }
    add_to_vocab(gram[2]);
    lm.add_trigram(lm.intern(gram[0]), lm.intern(gram[1]), lm.intern(gram[2]), count);
  }
  if (static_cast<long>(lm.vocab_.size()) != vocab_size) {
    throw ParseError(0, "vocabulary size " + std::to_string(lm.vocab_.size()) +
                            " does not match header " + std::to_string(vocab_size));
  }
  return lm;
}

void TrigramLM::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write LM " + path.string());
  write(out);
}

TrigramLM TrigramLM::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read LM " + path.string());
  try {
    return read(in);
  } catch (const ParseError& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
}

double perplexity(const TrigramLM& lm, std::span<const SymbolSequence> sequences) {
  double bits = 0;
  std::size_t positions = 0;
  for (const SymbolSequence& seq : sequences) {
    bits += lm.log2_probability(seq);
    positions += TrigramLM::predictions(seq);
  }
  if (positions == 0) return 1.0;
  return std::exp2(-bits / static_cast<double>(positions));
}

std::vector<SymbolSequence> tag_sequences(std::span<const DepTree> trees) {
  std::vector<SymbolSequence> out;
  out.reserve(trees.size());
  for (const DepTree& tree : trees) {
    SymbolSequence seq;
    for (const Token& t : tree.tokens) seq.push_back(t.upos);
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<SymbolSequence> word_sequences(std::span<const DepTree> trees) {
  std::vector<SymbolSequence> out;
  out.reserve(trees.size());
  for (const DepTree& tree : trees) {
    SymbolSequence seq;
    for (const Token& t : tree.tokens) seq.push_back(t.form);
    out.push_back(std::move(seq));
  }
  return out;
}

Selection select_source(
    std::span<const std::pair<std::string, const TrigramLM*>> candidates,
    std::span<const SymbolSequence> target) {
  if (candidates.empty()) throw std::invalid_argument("no candidate languages");
  Selection result;
  for (const auto& [language, lm] : candidates) {
    double total = 0;
    for (const SymbolSequence& seq : target) total += lm->log2_probability(seq);
    result.table.push_back({language, total, 0});
  }
  std::sort(result.table.begin(), result.table.end(),
            [](const SelectionRow& a, const SelectionRow& b) {
              if (a.log2_probability != b.log2_probability) {
                return a.log2_probability > b.log2_probability;
              }
              return a.language < b.language;
            });
  for (std::size_t k = 0; k < result.table.size(); ++k) {
    result.table[k].rank = static_cast<int>(k) + 1;
  }
  result.best = result.table.front().language;
  return result;
}

}  // namespace galactic
