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

#include "galactic/train.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "galactic/compiled_config.h"
#include "galactic/sjt.h"

namespace galactic {

namespace {

// Gradient partials are summed per fixed chunk and then in chunk order, so
// the result is bitwise independent of the thread count.
constexpr std::size_t kChunks = 16;

std::string signature(const LocalConfig& config) {
  std::string key;
  for (const ConfigElement& e : config.elements) {
    key += e.tag;
    key += '\x1f';
    key += relation_prefix(e.relation);
    key += '\x1e';
  }
  return key;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double inf_norm(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

class Objective {
 public:
  Objective(std::span<const LocalConfig> configs,
            const std::set<std::string>& whitelist, int threads)
      : threads_(std::max(1, threads)) {
    for (const std::string& name : whitelist) index_.intern(name);
    std::unordered_map<std::string, std::size_t> seen;
    std::vector<const LocalConfig*> unique;
    for (const LocalConfig& c : configs) {
      if (c.n() > kMaxTrainingFanout) {
        throw std::invalid_argument(
            "training configuration with n = " + std::to_string(c.n()) +
            " exceeds the training limit of " + std::to_string(kMaxTrainingFanout));
      }
      if (c.head_position() < 0) {
        throw std::invalid_argument("training configuration without a head");
      }
      if (c.n() == 1) continue;  // a single ordering: log p = 0
      const auto [it, inserted] = seen.emplace(signature(c), unique.size());
      if (inserted) {
        unique.push_back(&c);
        weight_.push_back(0);
      }
      weight_[it->second] += 1;
    }
    const double total = static_cast<double>(configs.size());
    for (double& w : weight_) w /= total;
    compiled_.reserve(unique.size());
    for (const LocalConfig* c : unique) {
      compiled_.push_back(CompiledConfig::grow(*c, index_));
    }
    observed_.assign(index_.size(), 0.0);
    for (std::size_t k = 0; k < compiled_.size(); ++k) {
      add_features(compiled_[k], identity_permutation(compiled_[k].n()),
                   weight_[k], observed_);
    }
  }

  std::size_t dimension() const { return index_.size(); }
  const FeatureIndex& index() const { return index_; }

  // Mean log-likelihood and its gradient.
  double evaluate(const std::vector<double>& theta, std::vector<double>& grad) {
    const std::size_t u = compiled_.size();
    const std::size_t chunks = std::min(kChunks, std::max<std::size_t>(u, 1));
    std::vector<std::vector<double>> partial_grad(
        chunks, std::vector<double>(theta.size(), 0.0));
    std::vector<double> partial_obj(chunks, 0.0);
    auto run_chunk = [&](std::size_t k) {
      const std::size_t lo = k * u / chunks;
      const std::size_t hi = (k + 1) * u / chunks;
      for (std::size_t c = lo; c < hi; ++c) {
        const CompiledConfig& config = compiled_[c];
        const double log_z =
            log_partition(config, theta, partial_grad[k], -weight_[c]);
        const double observed =
            compiled_score(config, theta, identity_permutation(config.n()));
        partial_obj[k] += weight_[c] * (observed - log_z);
      }
    };
    const int workers = std::min<int>(threads_, static_cast<int>(chunks));
    if (workers <= 1) {
      for (std::size_t k = 0; k < chunks; ++k) run_chunk(k);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t k = w; k < chunks; k += workers) run_chunk(k);
        });
      }
      for (std::thread& t : pool) t.join();
    }
    grad = observed_;
    double obj = 0;
    for (std::size_t k = 0; k < chunks; ++k) {
      obj += partial_obj[k];
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += partial_grad[k][i];
    }
    return obj;
  }

 private:
  int threads_;
  FeatureIndex index_;
  std::vector<CompiledConfig> compiled_;
  std::vector<double> weight_;    // multiplicity / number of configs
  std::vector<double> observed_;  // mean observed feature vector
};

struct Correction {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

// Two-loop recursion: approximates the inverse Hessian of the negated
// objective applied to the gradient, i.e. an ascent direction.
std::vector<double> lbfgs_direction(const std::deque<Correction>& memory,
                                    const std::vector<double>& grad) {
  std::vector<double> q = grad;
  std::vector<double> alpha(memory.size());
  for (std::size_t i = memory.size(); i-- > 0;) {
    alpha[i] = memory[i].rho * dot(memory[i].s, q);
    for (std::size_t k = 0; k < q.size(); ++k) q[k] -= alpha[i] * memory[i].y[k];
  }
  if (!memory.empty()) {
    const Correction& last = memory.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& x : q) x *= gamma;
  }
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const double beta = memory[i].rho * dot(memory[i].y, q);
    for (std::size_t k = 0; k < q.size(); ++k) {
      q[k] += memory[i].s[k] * (alpha[i] - beta);
    }
  }
  return q;
}

}  // namespace

OrderingModel train(std::string language, PosClass pos_class,
                    std::span<const LocalConfig> configs,
                    const std::set<std::string>& h_whitelist,
                    const TrainOptions& options) {
  if (configs.empty()) {
    throw std::invalid_argument("cannot train an ordering model on no configurations");
  }
  Objective objective(configs, h_whitelist, options.threads);
  const std::size_t dim = objective.dimension();

  std::vector<double> theta(dim, 0.0);
  std::vector<double> grad;
  double value = objective.evaluate(theta, grad);

  OrderingModel model;
  model.language = std::move(language);
  model.pos_class = pos_class;
  model.h_whitelist = h_whitelist;
  model.meta.objective_trace.push_back(value);

  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktracks = 60;
  std::deque<Correction> memory;
  int iteration = 0;
  bool converged = inf_norm(grad) <= options.tolerance;
  while (!converged && iteration < options.max_iterations) {
    std::vector<double> direction = lbfgs_direction(memory, grad);
    double slope = dot(grad, direction);
    if (!(slope > 0)) {
      memory.clear();
      direction = grad;
      slope = dot(grad, grad);
    }
    double step = memory.empty() ? std::min(1.0, 1.0 / inf_norm(direction)) : 1.0;
    std::vector<double> next(dim);
    std::vector<double> next_grad;
    double next_value = value;
    bool accepted = false;
    for (int k = 0; k < kMaxBacktracks; ++k) {
      for (std::size_t i = 0; i < dim; ++i) next[i] = theta[i] + step * direction[i];
      next_value = objective.evaluate(next, next_grad);
      if (std::isfinite(next_value) && next_value >= value + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      break;  // no ascent possible at machine precision
    }
    Correction corr{std::vector<double>(dim), std::vector<double>(dim), 0.0};
    for (std::size_t i = 0; i < dim; ++i) {
      corr.s[i] = next[i] - theta[i];
      corr.y[i] = grad[i] - next_grad[i];
    }
    const double sy = dot(corr.s, corr.y);
    if (sy > 1e-12) {
      corr.rho = 1.0 / sy;
      memory.push_back(std::move(corr));
      if (static_cast<int>(memory.size()) > options.history) memory.pop_front();
    }
    theta.swap(next);
    grad.swap(next_grad);
    value = next_value;
    ++iteration;
    model.meta.objective_trace.push_back(value);
    const double norm = inf_norm(grad);
    if (options.on_iteration) options.on_iteration(iteration, value, norm);
    converged = norm <= options.tolerance;
  }

  model.meta.iterations = iteration;
  model.meta.objective = value;
  model.meta.gradient_norm = inf_norm(grad);
  model.meta.converged = converged;
  for (std::size_t id = 0; id < dim; ++id) {
    model.weights[objective.index().name(static_cast<int>(id))] = theta[id];
  }
  return model;
}

double mean_log_likelihood(const OrderingModel& model,
                           std::span<const LocalConfig> configs) {
  if (configs.empty()) return 0;
  const CompiledModel compiled(model);
  double total = 0;
  for (const LocalConfig& config : configs) {
    if (config.n() == 1) continue;
    const CompiledConfig c = compiled.compile(config);
    const std::vector<double> scores = sjt_scores(c, compiled.theta());
    total += scores.front() - log_sum_exp(scores);
  }
  return total / static_cast<double>(configs.size());
}

}  // namespace galactic
