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

#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>

#include "galactic/features.h"
#include "galactic/treebank.h"
#include "test_support.h"

namespace galactic {
namespace {

using testing::data_dir;

LocalConfig fig1_config(int token) {
  const auto trees = read_conllu_file(data_dir() / "example.conllu");
  return local_config_at(trees.at(0), token);
}

std::vector<std::string> parts(const std::string& name) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = name.find('.', start);
    out.push_back(name.substr(start, dot - start));
    if (dot == std::string::npos) return out;
    start = dot + 1;
  }
}

bool upper(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

// "this particular future": DET.det ADJ.amod NOUN.head, observed order.
TEST(Features, WorkedSubtreeFiresExactlyTheListedSet) {
  const LocalConfig c = fig1_config(8);
  ASSERT_EQ(c.n(), 3);
  const FeatureVector f = extract(c, identity_permutation(3), HWhitelist::all());
  const std::set<std::string> expected = {
      // head direction, with its two backoffs
      "L.DET.det", "L.DET", "L.det", "L.ADJ.amod", "L.ADJ", "L.amod",
      // sibling order and the positional form (both left of the head)
      "L.DET.det.ADJ.amod", "L.DET.ADJ", "L.det.amod",
      "l.DET.det.ADJ.amod", "l.DET.ADJ", "l.det.amod",
      // adjacency
      "A.BOS.BOS.DET.det", "A.BOS.DET", "A.BOS.det",
      "A.DET.det.ADJ.amod", "A.DET.ADJ", "A.det.amod",
      "A.ADJ.amod.NOUN.head", "A.ADJ.NOUN", "A.amod.head",
      "A.NOUN.head.EOS.EOS", "A.NOUN.EOS", "A.head.EOS",
      // every 3- to 5-slot window
      "H.BOS.BOS.DET.det.ADJ.amod",
      "H.BOS.BOS.DET.det.ADJ.amod.NOUN.head",
      "H.BOS.BOS.DET.det.ADJ.amod.NOUN.head.EOS.EOS",
      "H.DET.det.ADJ.amod.NOUN.head",
      "H.DET.det.ADJ.amod.NOUN.head.EOS.EOS",
      "H.ADJ.amod.NOUN.head.EOS.EOS"};
  std::set<std::string> fired;
  for (const auto& [name, count] : f) {
    EXPECT_EQ(count, 1.0) << name;
    fired.insert(name);
  }
  EXPECT_EQ(fired, expected);
}

TEST(Features, WorkedSubtreeContainsTheListedFeatures) {
  const FeatureVector f =
      extract(fig1_config(8), identity_permutation(3), HWhitelist::all());
  for (const char* name :
       {"L.DET.det", "L.ADJ.amod", "L.DET.det.ADJ.amod", "l.DET.det.ADJ.amod",
        "A.BOS.BOS.DET.det", "A.DET.det.ADJ.amod", "A.ADJ.amod.NOUN.head",
        "A.NOUN.head.EOS.EOS"}) {
    ASSERT_TRUE(f.contains(name)) << name;
    EXPECT_EQ(f.at(name), 1.0);
  }
}

TEST(Features, RelationSubtypesAreReduced) {
  // "move" has the relative clause "makes" (acl:rel) to its right.
  const LocalConfig c = fig1_config(2);
  const FeatureVector f = extract(c, identity_permutation(c.n()), HWhitelist::all());
  EXPECT_TRUE(f.contains("A.NOUN.head.VERB.acl"));
  for (const auto& [name, count] : f) {
    EXPECT_EQ(name.find(':'), std::string::npos) << name;
  }
}

TEST(Features, PositionalFamiliesAroundAVerb) {
  // move(nsubj) brings(head) future(dobj) closer(advmod) .(punct)
  const FeatureVector f =
      extract(fig1_config(5), identity_permutation(5), HWhitelist::all());
  EXPECT_EQ(f.at("m.NOUN.nsubj.NOUN.dobj"), 1.0);
  EXPECT_EQ(f.at("r.NOUN.dobj.ADV.advmod"), 1.0);
  EXPECT_EQ(f.at("r.ADV.PUNCT"), 1.0);
  EXPECT_EQ(f.at("L.nsubj"), 1.0);
  EXPECT_FALSE(f.contains("L.dobj"));
  EXPECT_EQ(f.at("L.NOUN.NOUN"), 1.0);
  // Reversing the verb's side flips which pairs are positional "l".
  const FeatureVector g = extract(fig1_config(5), Permutation{4, 3, 2, 1, 0},
                                  HWhitelist::all());
  EXPECT_EQ(g.at("L.dobj"), 1.0);
  EXPECT_EQ(g.at("L.PUNCT.punct.ADV.advmod"), 1.0);
  EXPECT_EQ(g.at("l.PUNCT.punct.ADV.advmod"), 1.0);
  EXPECT_EQ(g.at("A.BOS.BOS.PUNCT.punct"), 1.0);
}

TEST(Features, WhitelistFiltersOnlyH) {
  const LocalConfig c = fig1_config(8);
  const Permutation id = identity_permutation(3);
  const FeatureVector none = extract(c, id, HWhitelist(std::set<std::string>{}));
  const FeatureVector one =
      extract(c, id, HWhitelist({"H.DET.det.ADJ.amod.NOUN.head", "H.unused"}));
  const FeatureVector all = extract(c, id, HWhitelist::all());
  EXPECT_EQ(all.size(), none.size() + 6);
  EXPECT_EQ(one.size(), none.size() + 1);
  EXPECT_TRUE(one.contains("H.DET.det.ADJ.amod.NOUN.head"));
  for (const auto& [name, v] : none) EXPECT_FALSE(is_h_feature(name));
}

TEST(Features, HGramRange) {
  const ExtendedSequence seq = make_sequence(fig1_config(8), identity_permutation(3));
  EXPECT_EQ(seq.n(), 3);
  EXPECT_EQ(seq.head, 3);
  EXPECT_TRUE(hgram_features(seq, 0, 1).empty());
  EXPECT_EQ(hgram_features(seq, 0, 2).size(), 1u);
  EXPECT_EQ(hgram_features(seq, 0, 4).size(), 1u);
  EXPECT_TRUE(hgram_features(seq, 1, 5).empty());
}

// Family totals depend only on n and the head's position:
//   head direction: one L.t.r per element left of the head
//   sibling L and positional l/m/r: one each per pair of dependents
//   adjacency: n + 1 boundaries
//   H: one per window of 3 to 5 slots
// and each full form comes with exactly one tags-only and one rels-only
// companion.
TEST(Features, FamilyCountsAreInvariant) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 7);
    const LocalConfig c = testing::random_config(rng, n);
    Permutation p = identity_permutation(n);
    std::shuffle(p.begin(), p.end(), rng);
    const int head_slot = static_cast<int>(
        std::find(p.begin(), p.end(), c.head_position()) - p.begin());
    const FeatureVector f = extract(c, p, HWhitelist::all());

    double head_dir = 0, head_dir_tag = 0, head_dir_rel = 0;
    double sib = 0, sib_tags = 0, sib_rels = 0;
    double pos = 0, adj = 0, adj_tags = 0, h = 0;
    for (const auto& [name, v] : f) {
      const auto ps = parts(name);
      const std::string& fam = ps[0];
      if (fam == "H") {
        h += v;
      } else if (fam == "A") {
        if (ps.size() == 5) adj += v;
        if (ps.size() == 3 && upper(ps[1]) && upper(ps[2])) adj_tags += v;
      } else if (fam == "l" || fam == "m" || fam == "r") {
        if (ps.size() == 5) pos += v;
      } else if (fam == "L") {
        if (ps.size() == 5) sib += v;
        if (ps.size() == 3 && upper(ps[1]) && upper(ps[2])) sib_tags += v;
        if (ps.size() == 3 && !upper(ps[1]) && !upper(ps[2])) sib_rels += v;
        if (ps.size() == 3 && upper(ps[1]) && !upper(ps[2])) head_dir += v;
        if (ps.size() == 2 && upper(ps[1])) head_dir_tag += v;
        if (ps.size() == 2 && !upper(ps[1])) head_dir_rel += v;
      }
    }
    const double pairs = (n - 1) * (n - 2) / 2.0;
    const int slots = n + 2;
    double windows = 0;
    for (int len = 3; len <= 5; ++len) windows += std::max(0, slots - len + 1);
    ASSERT_EQ(head_dir, head_slot);
    ASSERT_EQ(head_dir_tag, head_slot);
    ASSERT_EQ(head_dir_rel, head_slot);
    ASSERT_EQ(sib, pairs);
    ASSERT_EQ(sib_tags, pairs);
    ASSERT_EQ(sib_rels, pairs);
    ASSERT_EQ(pos, pairs);
    ASSERT_EQ(adj, n + 1);
    ASSERT_EQ(adj_tags, n + 1);
    ASSERT_EQ(h, windows);
  }
}

TEST(Features, TopFractionUsesCeilingAndLexicographicTies) {
  std::map<std::string, long> counts;
  for (char c = 'a'; c < 'a' + 10; ++c) counts[std::string(1, c)] = 1;
  counts["j"] = 9;
  EXPECT_EQ(top_fraction(counts, 0.1), std::set<std::string>({"j"}));
  counts["k"] = 1;  // 11 names: ceil(1.1) = 2, tie among the 1s
  EXPECT_EQ(top_fraction(counts, 0.1), std::set<std::string>({"a", "j"}));
  EXPECT_TRUE(top_fraction({}, 0.1).empty());
}

TEST(Features, WhitelistFromFixtureIsTopTenPercent) {
  const auto trees = read_conllu_file(data_dir() / "en" / "en-ud-train.conllu");
  const auto configs = training_configs(trees, PosClass::kNoun);
  std::map<std::string, long> counts;
  for (const LocalConfig& c : configs) {
    for (const auto& [name, v] : extract(c, identity_permutation(c.n()), HWhitelist::all())) {
      if (is_h_feature(name)) counts[name] += static_cast<long>(v);
    }
  }
  const auto wl = build_h_whitelist(configs);
  EXPECT_EQ(wl.size(), static_cast<std::size_t>(std::ceil(0.1 * counts.size())));
  long weakest_kept = std::numeric_limits<long>::max();
  long strongest_dropped = 0;
  for (const auto& [name, count] : counts) {
    if (wl.contains(name)) {
      weakest_kept = std::min(weakest_kept, count);
    } else {
      strongest_dropped = std::max(strongest_dropped, count);
    }
  }
  EXPECT_GE(weakest_kept, strongest_dropped);
}

TEST(Features, PermutationHelpers) {
  EXPECT_EQ(identity_permutation(3), Permutation({0, 1, 2}));
  const std::vector<int> ok = {2, 0, 1}, dup = {0, 0, 1}, range = {0, 3, 1};
  EXPECT_TRUE(is_permutation_of(ok, 3));
  EXPECT_FALSE(is_permutation_of(dup, 3));
  EXPECT_FALSE(is_permutation_of(range, 3));
  EXPECT_FALSE(is_permutation_of(ok, 4));
}

}  // namespace
}  // namespace galactic
