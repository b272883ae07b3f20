/*
 * Copyright 2026 The UTDE Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "utde/harness/config.hpp"
#include "utde/harness/model.hpp"
#include "utde/metrics/metrics.hpp"
#include "utde/tensor/adam.hpp"

namespace utde::harness {

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean batch loss; 0 for epoch 0
  double val_metric = 0.0;
  double best_val_metric = 0.0;
  metrics::EvalReport val_report;
};

struct TrainOptions {
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double lr = 4e-4;
  std::uint64_t seed = 0;
  double grad_clip = 0.0;
  double pos_weight = 1.0;
  bool parallel = true;
  ForwardOptions forward;
  // Parameters whose names start with one of these prefixes are not updated.
  std::vector<std::string> frozen_prefixes;
  // Called after every epoch (epoch 0 is the initialization).
  std::function<void(const EpochRecord&)> on_epoch;

  static TrainOptions FromConfig(const RunConfig& config);
};

struct BatchResult {
  Gradients grads;  // batch-mean gradient
  double loss = 0.0;
};

// Batch-mean BCE loss and gradient. The serial version is the reference; the
// OpenMP version computes per-episode gradients concurrently on private tapes
// and reduces them in episode order, so both return bit-identical results.
BatchResult BatchGradientsSerial(const Model& model, std::span<const EncodedEpisode* const> batch,
                                 double pos_weight = 1.0, const ForwardOptions& forward = {});
BatchResult BatchGradientsParallel(const Model& model,
                                   std::span<const EncodedEpisode* const> batch,
                                   double pos_weight = 1.0, const ForwardOptions& forward = {});

// Sigmoid probabilities, row-major [n x labels], computed in parallel and
// written by index.
std::vector<double> PredictScores(const Model& model, const std::vector<EncodedEpisode>& episodes,
                                  const ForwardOptions& forward = {}, bool parallel = true);

// Throws std::invalid_argument for an empty episode list.
metrics::EvalReport EvaluateModel(const Model& model, const std::vector<EncodedEpisode>& episodes,
                                  const ForwardOptions& forward = {}, bool parallel = true);

// F1 for single-label models, macro-F1 otherwise.
std::string SelectionMetricName(const ModelConfig& config);
double SelectionMetric(const metrics::EvalReport& report);

struct TrainResult {
  ParamStore best_params;
  std::size_t best_epoch = 0;
  double best_metric = 0.0;
  std::string metric_name;
  std::vector<EpochRecord> history;
  std::vector<double> batch_losses;  // every step, in order
};

// Mini-batch Adam. Epoch 0 evaluates the initialization; each later epoch
// visits the training set in a shuffle order drawn from (seed, epoch). The
// snapshot with the highest validation metric is kept (earliest on ties).
// Throws NumericalError on a non-finite loss or gradient.
TrainResult Train(Model& model, const std::vector<EncodedEpisode>& train,
                  const std::vector<EncodedEpisode>& val, const TrainOptions& options);

}  // namespace utde::harness
