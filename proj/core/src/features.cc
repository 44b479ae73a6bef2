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

#include "galactic/features.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace galactic {

namespace {

std::string join(std::initializer_list<std::string_view> parts) {
  std::string out;
  for (std::string_view p : parts) {
    if (!out.empty()) out += '.';
    out += p;
  }
  return out;
}

// Emits prefix.ti.ri.tj.rj, prefix.ti.tj, prefix.ri.rj.
void emit_pair(std::string_view prefix, const Slot& a, const Slot& b,
               std::vector<std::string>& out) {
  out.push_back(join({prefix, a.tag, a.relation, b.tag, b.relation}));
  out.push_back(join({prefix, a.tag, b.tag}));
  out.push_back(join({prefix, a.relation, b.relation}));
}

}  // namespace

Permutation identity_permutation(int n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

bool is_permutation_of(std::span<const int> order, int n) {
  if (static_cast<int>(order.size()) != n) return false;
  std::vector<bool> seen(n, false);
  for (int e : order) {
    if (e < 0 || e >= n || seen[e]) return false;
    seen[e] = true;
  }
  return true;
}

ExtendedSequence make_sequence(const LocalConfig& config,
                               std::span<const int> order) {
  ExtendedSequence seq;
  seq.slots.reserve(order.size() + 2);
  seq.slots.push_back({std::string(kBos), std::string(kBos)});
  for (std::size_t k = 0; k < order.size(); ++k) {
    const ConfigElement& e = config.elements[order[k]];
    if (e.relation == kHeadRelation) seq.head = static_cast<int>(k) + 1;
    seq.slots.push_back({e.tag, std::string(relation_prefix(e.relation))});
  }
  seq.slots.push_back({std::string(kEos), std::string(kEos)});
  return seq;
}

std::vector<std::string> pair_features(const ExtendedSequence& seq, int i,
                                       int j) {
  std::vector<std::string> out;
  const int n = seq.n();
  const Slot& a = seq.slots[i];
  const Slot& b = seq.slots[j];
  const bool a_real = i >= 1 && i <= n;
  const bool b_real = j >= 1 && j <= n;
  const bool a_head = a_real && a.relation == kHeadRelation;
  const bool b_head = b_real && b.relation == kHeadRelation;

  if (b_head && a_real) {
    out.push_back(join({"L", a.tag, a.relation}));
    out.push_back(join({"L", a.tag}));
    out.push_back(join({"L", a.relation}));
  }
  if (a_real && b_real && !a_head && !b_head) {
    emit_pair("L", a, b, out);
    const int h = seq.head;
    const std::string_view d = j < h ? "l" : (i < h ? "m" : "r");
    emit_pair(d, a, b, out);
  }
  if (j == i + 1) emit_pair("A", a, b, out);
  return out;
}

std::vector<std::string> hgram_features(const ExtendedSequence& seq, int i,
                                        int j) {
  const int last = static_cast<int>(seq.slots.size()) - 1;
  if (i < 0 || j > last || j < i + 2 || j > i + 4) return {};
  std::string name = "H";
  for (int k = i; k <= j; ++k) {
    name += '.';
    name += seq.slots[k].tag;
    name += '.';
    name += seq.slots[k].relation;
  }
  return {std::move(name)};
}

bool is_h_feature(std::string_view name) { return name.starts_with("H."); }

const std::set<std::string>& HWhitelist::names() const {
  static const std::set<std::string> kEmpty;
  return names_ ? *names_ : kEmpty;
}

FeatureVector extract(const LocalConfig& config, std::span<const int> order,
                      const HWhitelist& whitelist) {
  const ExtendedSequence seq = make_sequence(config, order);
  const int last = static_cast<int>(seq.slots.size()) - 1;
  FeatureVector f;
  for (int i = 0; i < last; ++i) {
    for (int j = i + 1; j <= last; ++j) {
      for (std::string& name : pair_features(seq, i, j)) f[std::move(name)] += 1;
      for (std::string& name : hgram_features(seq, i, j)) {
        if (whitelist.allows(name)) f[std::move(name)] += 1;
      }
    }
  }
  return f;
}

std::set<std::string> top_fraction(const std::map<std::string, long>& counts,
                                   double fraction) {
  std::vector<std::pair<std::string, long>> ranked(counts.begin(), counts.end());
  // std::map iteration is lexicographic, so a stable sort by count keeps
  // the lexicographic tie order.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  const auto keep = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(ranked.size()) - 1e-9));
  std::set<std::string> out;
  for (std::size_t k = 0; k < keep && k < ranked.size(); ++k) {
    out.insert(ranked[k].first);
  }
  return out;
}

std::set<std::string> build_h_whitelist(std::span<const LocalConfig> configs) {
  std::map<std::string, long> counts;
  for (const LocalConfig& config : configs) {
    const ExtendedSequence seq =
        make_sequence(config, identity_permutation(config.n()));
    const int last = static_cast<int>(seq.slots.size()) - 1;
    for (int i = 0; i < last; ++i) {
      for (int j = i + 2; j <= std::min(last, i + 4); ++j) {
        for (std::string& name : hgram_features(seq, i, j)) ++counts[name];
      }
    }
  }
  return top_fraction(counts, kHWhitelistFraction);
}

}  // namespace galactic
