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

#include "galactic/treebank.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "galactic/errors.h"

namespace galactic {

namespace {

constexpr std::size_t kColumns = 10;

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_int(std::string_view text, int& value) {
  if (text.empty()) return false;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

std::string sent_id_from_comment(std::string_view comment) {
  constexpr std::string_view kKey = "# sent_id";
  if (comment.substr(0, kKey.size()) != kKey) return {};
  std::string_view rest = comment.substr(kKey.size());
  const std::size_t eq = rest.find('=');
  if (eq != std::string_view::npos) rest = rest.substr(eq + 1);
  const std::size_t b = rest.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  rest = rest.substr(b);
  const std::size_t e = rest.find_last_not_of(" \t");
  return std::string(rest.substr(0, e + 1));
}

// Returns an error message, or empty when the heads form a tree.
std::string structural_problem(const DepTree& tree) {
  const int n = static_cast<int>(tree.size());
  if (n == 0) return "sentence has no tokens";
  int roots = 0;
  for (const Token& t : tree.tokens) {
    if (t.head < 0 || t.head > n) {
      return "token " + std::to_string(t.index) + " has out-of-range head " +
             std::to_string(t.head);
    }
    if (t.head == t.index) {
      return "token " + std::to_string(t.index) + " is its own head";
    }
    if (t.head == 0) ++roots;
  }
  if (roots == 0) return "sentence has no root";
  if (roots > 1) return "sentence has " + std::to_string(roots) + " roots";
  // 0 = unvisited, 1 = on current path, 2 = known to reach the root.
  std::vector<int> state(n + 1, 0);
  state[0] = 2;
  for (int start = 1; start <= n; ++start) {
    std::vector<int> path;
    int v = start;
    while (state[v] == 0) {
      state[v] = 1;
      path.push_back(v);
      v = tree.token(v).head;
    }
    if (state[v] == 1) {
      return "cycle through token " + std::to_string(v);
    }
    for (int p : path) state[p] = 2;
  }
  return {};
}

class BlockParser {
 public:
  BlockParser(ParseMode mode, ParseReport* report)
      : mode_(mode), report_(report) {}

  // Parses one sentence block. `first_line` is the 1-based line number of
  // lines[0].
  DepTree parse(std::span<const std::string_view> lines,
                std::size_t first_line, std::size_t ordinal) {
    DepTree tree;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      const std::string_view line = lines[k];
      const std::size_t line_no = first_line + k;
      if (line.front() == '#') {
        if (tree.tokens.empty()) {
          tree.comments.emplace_back(line);
          if (tree.source_id.empty()) tree.source_id = sent_id_from_comment(line);
        } else {
          tree.ranges.push_back({static_cast<int>(tree.tokens.size()) + 1,
                                 std::string(line)});
        }
        continue;
      }
      const auto fields = split(line, '\t');
      if (fields.size() != kColumns) {
        throw ParseError(line_no, "expected 10 tab-separated columns, found " +
                                      std::to_string(fields.size()));
      }
      const std::string_view id = fields[0];
      if (id.find_first_of("-.") != std::string_view::npos) {
        tree.ranges.push_back({static_cast<int>(tree.tokens.size()) + 1,
                               std::string(line)});
        continue;
      }
      Token token;
      if (!parse_int(id, token.index)) {
        throw ParseError(line_no, "non-integer token id '" + std::string(id) + "'");
      }
      const int expected = static_cast<int>(tree.tokens.size()) + 1;
      if (token.index != expected) {
        throw ParseError(line_no, "token id " + std::to_string(token.index) +
                                      " out of sequence, expected " +
                                      std::to_string(expected));
      }
      if (!parse_int(fields[6], token.head) || token.head < 0) {
        throw ParseError(line_no,
                         "non-integer head '" + std::string(fields[6]) + "'");
      }
      if (token.head == token.index) {
        throw ParseError(line_no, "token " + std::string(id) + " is its own head");
      }
      token.form = fields[1];
      token.lemma = fields[2];
      token.upos = fields[3];
      token.xpos = fields[4];
      token.feats = fields[5];
      token.deprel = fields[7];
      token.deps = fields[8];
      token.misc = fields[9];
      if (!is_universal_tag(token.upos)) {
        if (mode_ == ParseMode::kStrict) {
          throw ParseError(line_no, "unknown POS tag '" + token.upos + "'");
        }
        token.upos = "X";
        if (report_) ++report_->mapped_tags;
      }
      if (!is_universal_relation(token.deprel)) {
        if (mode_ == ParseMode::kStrict) {
          throw ParseError(line_no, "unknown relation '" + token.deprel + "'");
        }
        token.deprel = "dep";
        if (report_) ++report_->mapped_relations;
      }
      tree.tokens.push_back(std::move(token));
    }
    if (const std::string problem = structural_problem(tree); !problem.empty()) {
      throw ParseError(first_line, problem);
    }
    if (tree.source_id.empty()) tree.source_id = "sent-" + std::to_string(ordinal);
    return tree;
  }

 private:
  ParseMode mode_;
  ParseReport* report_;
};

}  // namespace

bool is_universal_tag(std::string_view tag) {
  return std::find(kUniversalTags.begin(), kUniversalTags.end(), tag) !=
         kUniversalTags.end();
}

std::string_view relation_prefix(std::string_view relation) {
  return relation.substr(0, relation.find(':'));
}

bool is_universal_relation(std::string_view relation) {
  const std::string_view prefix = relation_prefix(relation);
  return std::find(kUniversalRelations.begin(), kUniversalRelations.end(),
                   prefix) != kUniversalRelations.end();
}

char pos_class_code(PosClass pos_class) {
  return pos_class == PosClass::kNoun ? 'N' : 'V';
}

PosClass parse_pos_class(std::string_view code) {
  if (code == "N") return PosClass::kNoun;
  if (code == "V") return PosClass::kVerb;
  throw ModelError("unknown POS class '" + std::string(code) + "' (want N or V)");
}

bool in_pos_class(std::string_view upos, PosClass pos_class) {
  if (pos_class == PosClass::kVerb) return upos == "VERB";
  return upos == "NOUN" || upos == "PROPN" || upos == "PRON";
}

int DepTree::root() const {
  for (const Token& t : tokens) {
    if (t.head == 0) return t.index;
  }
  return 0;
}

std::vector<std::vector<int>> DepTree::children() const {
  std::vector<std::vector<int>> out(tokens.size() + 1);
  for (const Token& t : tokens) out[t.head].push_back(t.index);
  return out;
}

std::vector<DepTree> parse_conllu(std::string_view text, ParseMode mode,
                                  ParseReport* report) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }

  std::vector<DepTree> trees;
  BlockParser parser(mode, report);
  std::size_t ordinal = 0;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (is_blank(lines[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < lines.size() && !is_blank(lines[j])) ++j;
    ++ordinal;
    const std::span<const std::string_view> block(lines.data() + i, j - i);
    try {
      trees.push_back(parser.parse(block, i + 1, ordinal));
      if (report) ++report->sentences;
    } catch (const ParseError& e) {
      if (mode == ParseMode::kStrict) throw;
      if (report) {
        ++report->skipped;
        report->messages.emplace_back(e.what());
      }
    }
    i = j;
  }
  return trees;
}

std::vector<DepTree> read_conllu_file(const std::filesystem::path& path,
                                      ParseMode mode, ParseReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read treebank " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_conllu(buffer.str(), mode, report);
  } catch (const ParseError& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
}

std::string serialize_conllu(std::span<const DepTree> trees) {
  std::string out;
  for (const DepTree& tree : trees) {
    for (const std::string& c : tree.comments) {
      out += c;
      out += '\n';
    }
    std::size_t r = 0;
    auto emit_ranges_before = [&](int index) {
      while (r < tree.ranges.size() && tree.ranges[r].before_token <= index) {
        out += tree.ranges[r].text;
        out += '\n';
        ++r;
      }
    };
    for (const Token& t : tree.tokens) {
      emit_ranges_before(t.index);
      out += std::to_string(t.index);
      for (const std::string* field :
           {&t.form, &t.lemma, &t.upos, &t.xpos, &t.feats}) {
        out += '\t';
        out += *field;
      }
      out += '\t';
      out += std::to_string(t.head);
      for (const std::string* field : {&t.deprel, &t.deps, &t.misc}) {
        out += '\t';
        out += *field;
      }
      out += '\n';
    }
    emit_ranges_before(static_cast<int>(tree.tokens.size()) + 1 +
                       static_cast<int>(tree.ranges.size()));
    out += '\n';
  }
  return out;
}

void write_conllu_file(const std::filesystem::path& path,
                       std::span<const DepTree> trees) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize_conllu(trees);
  if (!out) throw IoError("failed writing " + path.string());
}

void validate_tree(const DepTree& tree) {
  for (std::size_t i = 0; i < tree.tokens.size(); ++i) {
    if (tree.tokens[i].index != static_cast<int>(i) + 1) {
      throw ParseError(0, "tree " + tree.source_id + ": token ids not consecutive");
    }
  }
  if (const std::string problem = structural_problem(tree); !problem.empty()) {
    throw ParseError(0, "tree " + tree.source_id + ": " + problem);
  }
}

bool is_projective(const DepTree& tree) {
  const int n = static_cast<int>(tree.size());
  for (const Token& dep : tree.tokens) {
    const int h = dep.head;
    if (h == 0) continue;
    const int lo = std::min(h, dep.index);
    const int hi = std::max(h, dep.index);
    for (int k = lo + 1; k < hi; ++k) {
      int v = k;
      int steps = 0;
      while (v != 0 && v != h && steps <= n) {
        v = tree.token(v).head;
        ++steps;
      }
      if (v != h) return false;
    }
  }
  return true;
}

int max_fanout(const DepTree& tree) {
  std::vector<int> n(tree.size() + 1, 1);
  for (const Token& t : tree.tokens) {
    if (t.head > 0) ++n[t.head];
  }
  int best = 0;
  for (std::size_t i = 1; i < n.size(); ++i) best = std::max(best, n[i]);
  return best;
}

FilterResult filter_for_generation(std::vector<DepTree> trees) {
  FilterResult result;
  for (DepTree& tree : trees) {
    if (!is_projective(tree)) {
      ++result.report.nonprojective;
      result.report.dropped.emplace_back(tree.source_id, "nonprojective");
    } else if (max_fanout(tree) > kMaxGenerationFanout) {
      ++result.report.high_fanout;
      result.report.dropped.emplace_back(tree.source_id, "fanout");
    } else {
      result.kept.push_back(std::move(tree));
    }
  }
  result.report.kept = result.kept.size();
  return result;
}

int LocalConfig::head_position() const {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i].relation == kHeadRelation) return static_cast<int>(i);
  }
  return -1;
}

LocalConfig local_config_at(const DepTree& tree, int token) {
  const Token& head = tree.token(token);
  LocalConfig config;
  config.head_tag = head.upos;
  config.head_relation_to_parent = head.deprel;
  config.tree_id = tree.source_id;
  config.head_token = token;
  bool head_placed = false;
  for (const Token& t : tree.tokens) {
    if (!head_placed && t.index > token) {
      config.elements.push_back({head.upos, std::string(kHeadRelation), token});
      head_placed = true;
    }
    if (t.head == token) config.elements.push_back({t.upos, t.deprel, t.index});
  }
  if (!head_placed) {
    config.elements.push_back({head.upos, std::string(kHeadRelation), token});
  }
  return config;
}

std::vector<LocalConfig> local_configs(const DepTree& tree, PosClass pos_class) {
  std::vector<LocalConfig> out;
  for (const Token& t : tree.tokens) {
    if (in_pos_class(t.upos, pos_class)) out.push_back(local_config_at(tree, t.index));
  }
  return out;
}

std::vector<LocalConfig> training_configs(std::span<const DepTree> trees,
                                          PosClass pos_class) {
  std::vector<LocalConfig> out;
  for (const DepTree& tree : trees) {
    if (!is_projective(tree)) continue;
    for (LocalConfig& c : local_configs(tree, pos_class)) {
      if (c.n() <= kMaxTrainingFanout) out.push_back(std::move(c));
    }
  }
  return out;
}

TouchedCount touched_tokens(std::span<const DepTree> trees) {
  TouchedCount count;
  for (const DepTree& tree : trees) {
    count.total += tree.size();
    for (const Token& t : tree.tokens) {
      const bool is_head = in_pos_class(t.upos, PosClass::kNoun) ||
                           in_pos_class(t.upos, PosClass::kVerb);
      bool under_head = false;
      if (t.head > 0) {
        const std::string& parent = tree.token(t.head).upos;
        under_head = in_pos_class(parent, PosClass::kNoun) ||
                     in_pos_class(parent, PosClass::kVerb);
      }
      if (is_head || under_head) ++count.touched;
    }
  }
  return count;
}

}  // namespace galactic
