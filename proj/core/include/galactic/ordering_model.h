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

#ifndef GALACTIC_ORDERING_MODEL_H_
#define GALACTIC_ORDERING_MODEL_H_

// Log-linear distribution over the orderings of a head and its dependents:
//
//   p(order | config) = exp(theta . f(order)) / Z(config)
//
// with f from features.h and Z summed over all n! orderings.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "galactic/compiled_config.h"
#include "galactic/features.h"
#include "galactic/treebank.h"

namespace galactic {

struct TrainingMeta {
  int iterations = 0;
  double objective = 0;      // mean log-likelihood per configuration
  double gradient_norm = 0;  // infinity norm at the returned weights
  bool converged = false;    // false: stopped by the iteration cap
  std::vector<double> objective_trace;  // accepted steps; not serialized
};

struct OrderingModel {
  std::string language;
  PosClass pos_class = PosClass::kNoun;
  // Features absent from the map have weight 0.
  std::map<std::string, double> weights;
  std::set<std::string> h_whitelist;
  TrainingMeta meta;

  double weight(const std::string& name) const;
  HWhitelist whitelist() const { return HWhitelist(h_whitelist); }
};

inline constexpr double kDefaultLambda = 0.05;

// theta . f(order), by explicit feature extraction.
double score(const OrderingModel& model, const LocalConfig& config,
             std::span<const int> order);

struct PartitionResult {
  double log_z = 0;
  FeatureVector expected;
};

// Exact log Z and E[f] by SJT enumeration. Throws std::invalid_argument
// for n > 7.
PartitionResult log_partition_and_expectation(const OrderingModel& model,
                                              const LocalConfig& config);

// A model resolved to dense weights for fast repeated scoring.
class CompiledModel {
 public:
  explicit CompiledModel(const OrderingModel& model);

  const OrderingModel& model() const { return model_; }
  PosClass pos_class() const { return model_.pos_class; }
  // The index is read-only; compile configurations in lookup mode.
  CompiledConfig compile(const LocalConfig& config) const;
  std::span<const double> theta() const { return theta_; }

 private:
  OrderingModel model_;
  FeatureIndex index_;
  std::vector<double> theta_;
};

// Natural-log probability of `order`.
double log_probability(const CompiledModel& model, const LocalConfig& config,
                       std::span<const int> order);

// Per-feature (1 - lambda) * superstrate + lambda * substrate over the union
// of features; whitelists are unioned. Throws ModelError on a POS class
// mismatch and std::invalid_argument for lambda outside [0, 1].
OrderingModel interpolate(const OrderingModel& superstrate,
                          const OrderingModel& substrate,
                          double lambda = kDefaultLambda);

struct FreenessResult {
  double model_bits = 0;    // sum over nodes of -log2 p(observed order)
  double uniform_bits = 0;  // sum over nodes of log2 n!
  std::size_t nodes = 0;

  double ratio() const { return model_bits / uniform_bits; }
};

// Cross-entropy of the models on the observed orders relative to the
// uniform distribution, over every N and V node of the trees (a null model
// skips its class). Throws UndefinedError when no node has n >= 2.
FreenessResult freeness_detail(const OrderingModel* model_n,
                               const OrderingModel* model_v,
                               std::span<const DepTree> trees);
double freeness(const OrderingModel* model_n, const OrderingModel* model_v,
                std::span<const DepTree> trees);

// Text model files:
//   #lang <id>
//   #pos <N|V>
//   #version 1
//   #iterations / #objective / #gradient_norm / #converged
//   <feature>\t<weight>     one per line, names in lexicographic order
// Whitelisted H features are always written, with weight 0 if need be, and
// H lines are read back as the whitelist.
void write_model(std::ostream& out, const OrderingModel& model);
OrderingModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const OrderingModel& model);
OrderingModel load_model(const std::filesystem::path& path);

// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

}  // namespace galactic

#endif  // GALACTIC_ORDERING_MODEL_H_
