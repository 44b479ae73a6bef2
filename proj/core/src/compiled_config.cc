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

#include "galactic/compiled_config.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "galactic/sjt.h"

namespace galactic {

namespace {

constexpr int kLeft = 0;
constexpr int kMiddle = 1;
constexpr int kRight = 2;

int side_of(int p, int q, int h) {
  if (q < h) return kLeft;
  if (p < h) return kMiddle;
  return kRight;
}

double triple_weight(const CompiledConfig::Triple& t,
                     std::span<const double> theta) {
  double w = 0;
  for (std::int32_t id : t) {
    if (id >= 0) w += theta[id];
  }
  return w;
}

// Score state of one ordering, updated in place by adjacent swaps.
class Walk {
 public:
  Walk(const CompiledConfig& config, std::span<const double> theta)
      : c_(config), theta_(theta), n_(config.n()) {
    order_w_.resize(n_ * n_);
    side_w_.resize(n_ * n_ * 3);
    adjacent_w_.resize((n_ + 2) * (n_ + 2));
    for (int a = 0; a < n_; ++a) {
      for (int b = 0; b < n_; ++b) {
        if (a == b) continue;
        order_w_[a * n_ + b] = triple_weight(c_.order_event(a, b), theta);
        for (int d = 0; d < 3; ++d) {
          side_w_[(a * n_ + b) * 3 + d] =
              triple_weight(c_.side_event(a, b, d), theta);
        }
      }
    }
    for (int a = 0; a < n_ + 2; ++a) {
      for (int b = 0; b < n_ + 2; ++b) {
        adjacent_w_[a * (n_ + 2) + b] =
            triple_weight(c_.adjacent_event(a, b), theta);
      }
    }
    slots_.resize(n_ + 2);
  }

  void reset(std::span<const int> order) {
    slots_[0] = n_;
    slots_[n_ + 1] = n_ + 1;
    for (int k = 0; k < n_; ++k) {
      slots_[k + 1] = order[k];
      if (order[k] == c_.head()) head_slot_ = k + 1;
    }
    score_ = full_score();
  }

  double score() const { return score_; }

  // Swaps order positions k and k + 1.
  void swap(int k) {
    const int p = k + 1;
    const int q = k + 2;
    const int x = slots_[p];
    const int y = slots_[q];
    const int m = n_ + 2;
    double delta = order_w_[y * n_ + x] - order_w_[x * n_ + y];
    const int before = slots_[p - 1];
    const int after = slots_[q + 1];
    delta += adjacent_w_[before * m + y] + adjacent_w_[y * m + x] +
             adjacent_w_[x * m + after];
    delta -= adjacent_w_[before * m + x] + adjacent_w_[x * m + y] +
             adjacent_w_[y * m + after];

    const bool moves_head = p == head_slot_ || q == head_slot_;
    int dependent_slot = 0;
    if (moves_head) {
      dependent_slot = p == head_slot_ ? q : p;
      delta -= side_sum_involving(dependent_slot);
    } else {
      const int d = side_of(p, q, head_slot_);
      delta += side_w_[(y * n_ + x) * 3 + d] - side_w_[(x * n_ + y) * 3 + d];
    }
    const bool h = c_.may_fire_h();
    if (h) delta -= h_sum_overlapping(p, q);

    std::swap(slots_[p], slots_[q]);
    if (moves_head) {
      head_slot_ = head_slot_ == p ? q : p;
      dependent_slot = dependent_slot == p ? q : p;
      delta += side_sum_involving(dependent_slot);
    }
    if (h) delta += h_sum_overlapping(p, q);
    score_ += delta;
  }

  std::span<const int> slots() const { return slots_; }
  int head_slot() const { return head_slot_; }

  double full_score() const {
    double s = 0;
    for (int p = 1; p <= n_; ++p) {
      for (int q = p + 1; q <= n_; ++q) {
        const int a = slots_[p];
        const int b = slots_[q];
        s += order_w_[a * n_ + b];
        if (p != head_slot_ && q != head_slot_) {
          s += side_w_[(a * n_ + b) * 3 + side_of(p, q, head_slot_)];
        }
      }
    }
    for (int p = 0; p <= n_; ++p) {
      s += adjacent_w_[slots_[p] * (n_ + 2) + slots_[p + 1]];
    }
    if (c_.may_fire_h()) {
      for (int i = 0; i <= n_ + 1; ++i) {
        for (int j = i + 2; j <= std::min(n_ + 1, i + 4); ++j) s += h_span(i, j);
      }
    }
    return s;
  }

 private:
  double h_span(int i, int j) const {
    const int id = c_.h_feature(std::span<const int>(slots_).subspan(i, j - i + 1));
    return id >= 0 ? theta_[id] : 0.0;
  }

  // Sum of positional weights of pairs containing the dependent at `slot`.
  double side_sum_involving(int slot) const {
    double s = 0;
    for (int z = 1; z <= n_; ++z) {
      if (z == slot || z == head_slot_) continue;
      const int p = std::min(z, slot);
      const int q = std::max(z, slot);
      s += side_w_[(slots_[p] * n_ + slots_[q]) * 3 + side_of(p, q, head_slot_)];
    }
    return s;
  }

  // H spans touching slot p or q = p + 1.
  double h_sum_overlapping(int p, int q) const {
    double s = 0;
    for (int i = std::max(0, p - 4); i <= q; ++i) {
      for (int j = std::max(i + 2, p); j <= std::min(n_ + 1, i + 4); ++j) {
        s += h_span(i, j);
      }
    }
    return s;
  }

  const CompiledConfig& c_;
  std::span<const double> theta_;
  int n_;
  std::vector<double> order_w_;
  std::vector<double> side_w_;
  std::vector<double> adjacent_w_;
  std::vector<int> slots_;
  int head_slot_ = 0;
  double score_ = 0;
};

void check_enumerable(const CompiledConfig& config) {
  if (config.n() < 1 || config.n() > kMaxEnumerable) {
    throw std::invalid_argument("exact enumeration needs 1 <= n <= 7, got n = " +
                                std::to_string(config.n()));
  }
}

// Accumulates probability mass per event while replaying an SJT walk.
class EventMass {
 public:
  explicit EventMass(const CompiledConfig& config)
      : c_(config), n_(config.n()) {
    order_.assign(n_ * n_, 0.0);
    side_.assign(n_ * n_ * 3, 0.0);
    adjacent_.assign((n_ + 2) * (n_ + 2), 0.0);
  }

  void add(std::span<const int> slots, int head_slot, double mass,
           std::span<double> h_out, double scale) {
    for (int p = 1; p <= n_; ++p) {
      for (int q = p + 1; q <= n_; ++q) {
        const int ab = slots[p] * n_ + slots[q];
        order_[ab] += mass;
        if (p != head_slot && q != head_slot) {
          side_[ab * 3 + side_of(p, q, head_slot)] += mass;
        }
      }
    }
    for (int p = 0; p <= n_; ++p) adjacent_[slots[p] * (n_ + 2) + slots[p + 1]] += mass;
    if (c_.may_fire_h()) {
      for (int i = 0; i <= n_ + 1; ++i) {
        for (int j = i + 2; j <= std::min(n_ + 1, i + 4); ++j) {
          const int id = c_.h_feature(slots.subspan(i, j - i + 1));
          if (id >= 0) h_out[id] += scale * mass;
        }
      }
    }
  }

  void flush(std::span<double> out, double scale) const {
    auto spread = [&](const CompiledConfig::Triple& t, double mass) {
      if (mass == 0) return;
      for (std::int32_t id : t) {
        if (id >= 0) out[id] += scale * mass;
      }
    };
    for (int a = 0; a < n_; ++a) {
      for (int b = 0; b < n_; ++b) {
        if (a == b) continue;
        spread(c_.order_event(a, b), order_[a * n_ + b]);
        for (int d = 0; d < 3; ++d) {
          spread(c_.side_event(a, b, d), side_[(a * n_ + b) * 3 + d]);
        }
      }
    }
    for (int a = 0; a < n_ + 2; ++a) {
      for (int b = 0; b < n_ + 2; ++b) {
        spread(c_.adjacent_event(a, b), adjacent_[a * (n_ + 2) + b]);
      }
    }
  }

 private:
  const CompiledConfig& c_;
  int n_;
  std::vector<double> order_;
  std::vector<double> side_;
  std::vector<double> adjacent_;
};

}  // namespace

int FeatureIndex::find(std::string_view name) const {
  const auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

int FeatureIndex::intern(const std::string& name) {
  const auto [it, inserted] = ids_.emplace(name, static_cast<int>(names_.size()));
  if (inserted) {
    names_.push_back(name);
    if (is_h_feature(name)) ++h_count_;
  }
  return it->second;
}

CompiledConfig CompiledConfig::grow(const LocalConfig& config,
                                    FeatureIndex& index) {
  return CompiledConfig(config, index, &index);
}

CompiledConfig CompiledConfig::lookup(const LocalConfig& config,
                                      const FeatureIndex& index) {
  return CompiledConfig(config, index, nullptr);
}

CompiledConfig::CompiledConfig(const LocalConfig& config,
                               const FeatureIndex& index, FeatureIndex* growing)
    : n_(config.n()), head_(config.head_position()), index_(&index) {
  if (n_ < 1 || head_ < 0) {
    throw std::invalid_argument("configuration of tree " + config.tree_id +
                                " has no head element");
  }
  std::vector<std::string> tags;
  std::vector<std::string> rels;
  for (const ConfigElement& e : config.elements) {
    tags.push_back(e.tag);
    rels.emplace_back(relation_prefix(e.relation));
  }
  tags.emplace_back(kBos);
  rels.emplace_back(kBos);
  tags.emplace_back(kEos);
  rels.emplace_back(kEos);

  for (std::size_t k = 0; k < tags.size(); ++k) {
    symbols_.push_back(tags[k] + "." + rels[k]);
    const auto prior = std::find(symbols_.begin(), symbols_.end() - 1, symbols_.back());
    symbol_ids_.push_back(prior == symbols_.end() - 1
                              ? static_cast<std::uint8_t>(k)
                              : symbol_ids_[prior - symbols_.begin()]);
  }

  auto resolve = [&](const std::string& name) {
    return growing ? growing->intern(name) : index.find(name);
  };
  auto triple = [&](std::string_view prefix, int a, int b) -> Triple {
    const std::string p(prefix);
    return {resolve(p + "." + tags[a] + "." + rels[a] + "." + tags[b] + "." + rels[b]),
            resolve(p + "." + tags[a] + "." + tags[b]),
            resolve(p + "." + rels[a] + "." + rels[b])};
  };
  constexpr Triple kNone = {-1, -1, -1};
  order_.assign(n_ * n_, kNone);
  side_.assign(n_ * n_ * 3, kNone);
  adjacent_.assign((n_ + 2) * (n_ + 2), kNone);
  for (int a = 0; a < n_; ++a) {
    for (int b = 0; b < n_; ++b) {
      if (a == b || a == head_) continue;
      if (b == head_) {
        order_[a * n_ + b] = {resolve("L." + tags[a] + "." + rels[a]),
                              resolve("L." + tags[a]), resolve("L." + rels[a])};
        continue;
      }
      order_[a * n_ + b] = triple("L", a, b);
      side_[(a * n_ + b) * 3 + kLeft] = triple("l", a, b);
      side_[(a * n_ + b) * 3 + kMiddle] = triple("m", a, b);
      side_[(a * n_ + b) * 3 + kRight] = triple("r", a, b);
    }
  }
  const int bos = n_;
  const int eos = n_ + 1;
  for (int a = 0; a <= n_; ++a) {
    for (int b = 0; b < n_ + 2; ++b) {
      if (a == b || b == bos || (a == bos && b == eos)) continue;
      adjacent_[a * (n_ + 2) + b] = triple("A", a, b);
    }
  }
  may_fire_h_ = index.has_h_features();
}

int CompiledConfig::h_feature(std::span<const int> extended_ids) const {
  std::uint32_t key = static_cast<std::uint32_t>(extended_ids.size());
  int shift = 3;
  for (int e : extended_ids) {
    key |= static_cast<std::uint32_t>(symbol_ids_[e]) << shift;
    shift += 4;
  }
  if (const auto it = h_cache_.find(key); it != h_cache_.end()) return it->second;
  std::string name = "H";
  for (int e : extended_ids) {
    name += '.';
    name += symbols_[e];
  }
  const int id = index_->find(name);
  h_cache_.emplace(key, id);
  return id;
}

double compiled_score(const CompiledConfig& config, std::span<const double> theta,
                      std::span<const int> order) {
  Walk walk(config, theta);
  walk.reset(order);
  return walk.score();
}

std::vector<double> sjt_scores(const CompiledConfig& config,
                               std::span<const double> theta) {
  check_enumerable(config);
  const auto& swaps = sjt_swaps(config.n());
  std::vector<double> scores;
  scores.reserve(swaps.size() + 1);
  Walk walk(config, theta);
  walk.reset(identity_permutation(config.n()));
  scores.push_back(walk.score());
  for (std::uint8_t k : swaps) {
    walk.swap(k);
    scores.push_back(walk.score());
  }
  return scores;
}

double log_sum_exp(std::span<const double> scores) {
  if (scores.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0;
  for (double s : scores) sum += std::exp(s - top);
  return top + std::log(sum);
}

namespace {

// Replays the SJT walk on bare slots (no scoring).
template <typename Visit>
void replay(const CompiledConfig& config, long stop, Visit&& visit) {
  const int n = config.n();
  std::vector<int> slots(n + 2);
  slots[0] = n;
  slots[n + 1] = n + 1;
  for (int k = 0; k < n; ++k) slots[k + 1] = k;
  int head_slot = config.head() + 1;
  const auto& swaps = sjt_swaps(n);
  for (long step = 0;; ++step) {
    if (!visit(step, std::span<const int>(slots), head_slot)) return;
    if (step >= stop || step >= static_cast<long>(swaps.size())) return;
    const int p = swaps[step] + 1;
    std::swap(slots[p], slots[p + 1]);
    if (head_slot == p) {
      head_slot = p + 1;
    } else if (head_slot == p + 1) {
      head_slot = p;
    }
  }
}

}  // namespace

double log_partition(const CompiledConfig& config, std::span<const double> theta,
                     std::span<double> expected, double scale) {
  const std::vector<double> scores = sjt_scores(config, theta);
  const double log_z = log_sum_exp(scores);
  if (!expected.empty()) {
    EventMass mass(config);
    replay(config, static_cast<long>(scores.size()),
           [&](long step, std::span<const int> slots, int head_slot) {
             mass.add(slots, head_slot, std::exp(scores[step] - log_z), expected,
                      scale);
             return true;
           });
    mass.flush(expected, scale);
  }
  return log_z;
}

void add_features(const CompiledConfig& config, std::span<const int> order,
                  double scale, std::span<double> out) {
  const int n = config.n();
  std::vector<int> slots(n + 2);
  slots[0] = n;
  slots[n + 1] = n + 1;
  int head_slot = 0;
  for (int k = 0; k < n; ++k) {
    slots[k + 1] = order[k];
    if (order[k] == config.head()) head_slot = k + 1;
  }
  EventMass mass(config);
  mass.add(slots, head_slot, 1.0, out, scale);
  mass.flush(out, scale);
}

Permutation sample_compiled(const CompiledConfig& config,
                            std::span<const double> theta, double u) {
  const int n = config.n();
  if (n == 1) return {0};
  const std::vector<double> scores = sjt_scores(config, theta);
  const double log_z = log_sum_exp(scores);
  long chosen = static_cast<long>(scores.size()) - 1;
  double cumulative = 0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    cumulative += std::exp(scores[k] - log_z);
    if (cumulative >= u) {
      chosen = static_cast<long>(k);
      break;
    }
  }
  Permutation out(n);
  replay(config, chosen, [&](long step, std::span<const int> slots, int) {
    if (step < chosen) return true;
    std::copy(slots.begin() + 1, slots.begin() + 1 + n, out.begin());
    return false;
  });
  return out;
}

}  // namespace galactic
