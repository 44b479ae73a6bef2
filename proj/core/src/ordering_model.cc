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

#include "galactic/ordering_model.h"

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "galactic/errors.h"
#include "galactic/sjt.h"

namespace galactic {

double OrderingModel::weight(const std::string& name) const {
  const auto it = weights.find(name);
  return it == weights.end() ? 0.0 : it->second;
}

double score(const OrderingModel& model, const LocalConfig& config,
             std::span<const int> order) {
  double s = 0;
  for (const auto& [name, count] : extract(config, order, model.whitelist())) {
    s += model.weight(name) * count;
  }
  return s;
}

PartitionResult log_partition_and_expectation(const OrderingModel& model,
                                              const LocalConfig& config) {
  FeatureIndex index;
  for (const std::string& name : model.h_whitelist) index.intern(name);
  const CompiledConfig compiled = CompiledConfig::grow(config, index);
  std::vector<double> theta(index.size());
  for (std::size_t id = 0; id < index.size(); ++id) {
    theta[id] = model.weight(index.name(static_cast<int>(id)));
  }
  std::vector<double> expected(index.size(), 0.0);
  PartitionResult result;
  result.log_z = log_partition(compiled, theta, expected);
  for (std::size_t id = 0; id < expected.size(); ++id) {
    if (expected[id] != 0) result.expected[index.name(static_cast<int>(id))] = expected[id];
  }
  return result;
}

CompiledModel::CompiledModel(const OrderingModel& model) : model_(model) {
  for (const auto& [name, w] : model_.weights) {
    if (!is_h_feature(name)) index_.intern(name);
  }
  for (const std::string& name : model_.h_whitelist) index_.intern(name);
  theta_.resize(index_.size());
  for (std::size_t id = 0; id < index_.size(); ++id) {
    theta_[id] = model_.weight(index_.name(static_cast<int>(id)));
  }
}

CompiledConfig CompiledModel::compile(const LocalConfig& config) const {
  return CompiledConfig::lookup(config, index_);
}

double log_probability(const CompiledModel& model, const LocalConfig& config,
                       std::span<const int> order) {
  const CompiledConfig compiled = model.compile(config);
  return compiled_score(compiled, model.theta(), order) -
         log_partition(compiled, model.theta());
}

OrderingModel interpolate(const OrderingModel& superstrate,
                          const OrderingModel& substrate, double lambda) {
  if (superstrate.pos_class != substrate.pos_class) {
    throw ModelError("cannot interpolate a " +
                     std::string(1, pos_class_code(superstrate.pos_class)) +
                     " model with a " +
                     std::string(1, pos_class_code(substrate.pos_class)) + " model");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("interpolation weight must lie in [0, 1]");
  }
  OrderingModel out;
  out.language = superstrate.language == substrate.language
                     ? superstrate.language
                     : superstrate.language + "+" + substrate.language;
  out.pos_class = superstrate.pos_class;
  for (const auto& [name, w] : superstrate.weights) out.weights[name] = (1.0 - lambda) * w;
  for (const auto& [name, w] : substrate.weights) out.weights[name] += lambda * w;
  out.h_whitelist = superstrate.h_whitelist;
  out.h_whitelist.insert(substrate.h_whitelist.begin(), substrate.h_whitelist.end());
  return out;
}

FreenessResult freeness_detail(const OrderingModel* model_n,
                               const OrderingModel* model_v,
                               std::span<const DepTree> trees) {
  std::optional<CompiledModel> noun;
  std::optional<CompiledModel> verb;
  if (model_n) noun.emplace(*model_n);
  if (model_v) verb.emplace(*model_v);
  FreenessResult result;
  for (const DepTree& tree : trees) {
    for (const Token& t : tree.tokens) {
      const CompiledModel* model = nullptr;
      if (noun && in_pos_class(t.upos, PosClass::kNoun)) model = &*noun;
      if (verb && in_pos_class(t.upos, PosClass::kVerb)) model = &*verb;
      if (!model) continue;
      const LocalConfig config = local_config_at(tree, t.index);
      ++result.nodes;
      if (config.n() == 1) continue;
      const CompiledConfig compiled = model->compile(config);
      const std::vector<double> scores = sjt_scores(compiled, model->theta());
      // The observed order is the identity, which the walk visits first.
      const double log_p = scores.front() - log_sum_exp(scores);
      result.model_bits += -log_p / std::numbers::ln2;
      result.uniform_bits += std::log2(static_cast<double>(factorial(config.n())));
    }
  }
  if (result.uniform_bits == 0) {
    throw UndefinedError("freeness is undefined: no N or V node has dependents");
  }
  return result;
}

double freeness(const OrderingModel* model_n, const OrderingModel* model_v,
                std::span<const DepTree> trees) {
  return freeness_detail(model_n, model_v, trees).ratio();
}

}  // namespace galactic
