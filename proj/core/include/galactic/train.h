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

#ifndef GALACTIC_TRAIN_H_
#define GALACTIC_TRAIN_H_

#include <functional>
#include <set>
#include <span>
#include <string>

#include "galactic/ordering_model.h"

namespace galactic {

struct TrainOptions {
  int max_iterations = 200;
  // Stop once the infinity norm of the mean log-likelihood gradient is at
  // most this.
  double tolerance = 1e-5;
  // L-BFGS memory.
  int history = 10;
  // Worker threads for the gradient sum. The reduction order is fixed, so
  // results do not depend on this.
  int threads = 1;
  // Called after every accepted step with (iteration, objective, gradient
  // infinity norm).
  std::function<void(int, double, double)> on_iteration;
};

// Maximizes the mean log-likelihood of the observed (surface) orders of
// `configs` with L-BFGS and a backtracking line search. No regularizer:
// on separable data the weights grow until the iteration cap, which is
// reported through meta.converged = false.
//
// Every configuration must have n <= kMaxTrainingFanout
// (std::invalid_argument otherwise); an empty list is an error as well.
OrderingModel train(std::string language, PosClass pos_class,
                    std::span<const LocalConfig> configs,
                    const std::set<std::string>& h_whitelist,
                    const TrainOptions& options = {});

// Mean log-likelihood of the observed orders; used for held-out checks.
double mean_log_likelihood(const OrderingModel& model,
                           std::span<const LocalConfig> configs);

}  // namespace galactic

#endif  // GALACTIC_TRAIN_H_
