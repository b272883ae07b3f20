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

#include "utde/harness/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "utde/tensor/ops.hpp"

namespace utde::harness {
namespace {

struct EpisodeGradient {
  Gradients grads;
  double loss = 0.0;
};

Tensor Targets(const EncodedEpisode& e) {
  return Tensor({1, e.label.size()}, std::vector<double>(e.label.begin(), e.label.end()));
}

EpisodeGradient ComputeEpisodeGradient(const Model& model, const EncodedEpisode& e,
                                       double pos_weight, const ForwardOptions& forward) {
  Tape tape(&model.params());
  const ForwardResult out = model.Forward(tape, e, forward);
  Var loss = BceWithLogits(out.logits, Targets(e), pos_weight);
  tape.Backward(loss);
  EpisodeGradient g{model.params().ZeroGradients(), loss.value().item()};
  tape.AccumulateParamGrads(g.grads);
  return g;
}

BatchResult Reduce(const Model& model, std::vector<EpisodeGradient>& parts) {
  BatchResult r{model.params().ZeroGradients(), 0.0};
  for (const EpisodeGradient& p : parts) {
    Accumulate(r.grads, p.grads);
    r.loss += p.loss;
  }
  const double inv = 1.0 / static_cast<double>(parts.size());
  Scale(r.grads, inv);
  r.loss *= inv;
  return r;
}

void RequireNonEmpty(std::size_t n, const char* what) {
  if (n == 0) throw std::invalid_argument(std::string(what) + " is empty");
}

std::string Describe(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

TrainOptions TrainOptions::FromConfig(const RunConfig& config) {
  if (!config.seed) throw ConfigError("a seed is required for training");
  TrainOptions o;
  o.epochs = config.epochs;
  o.batch_size = config.batch_size;
  o.lr = config.lr;
  o.seed = *config.seed;
  o.grad_clip = config.grad_clip;
  o.pos_weight = config.pos_weight;
  o.parallel = config.parallel;
  return o;
}

BatchResult BatchGradientsSerial(const Model& model, std::span<const EncodedEpisode* const> batch,
                                 double pos_weight, const ForwardOptions& forward) {
  RequireNonEmpty(batch.size(), "batch");
  std::vector<EpisodeGradient> parts;
  parts.reserve(batch.size());
  for (const EncodedEpisode* e : batch) {
    parts.push_back(ComputeEpisodeGradient(model, *e, pos_weight, forward));
  }
  return Reduce(model, parts);
}

BatchResult BatchGradientsParallel(const Model& model,
                                   std::span<const EncodedEpisode* const> batch,
                                   double pos_weight, const ForwardOptions& forward) {
  RequireNonEmpty(batch.size(), "batch");
  std::vector<EpisodeGradient> parts(batch.size());
  const auto n = static_cast<std::ptrdiff_t>(batch.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      parts[static_cast<std::size_t>(i)] =
          ComputeEpisodeGradient(model, *batch[static_cast<std::size_t>(i)], pos_weight, forward);
    } catch (...) {
#pragma omp critical(utde_batch_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return Reduce(model, parts);
}

std::vector<double> PredictScores(const Model& model, const std::vector<EncodedEpisode>& episodes,
                                  const ForwardOptions& forward, bool parallel) {
  const std::size_t labels = model.config().labels;
  std::vector<double> scores(episodes.size() * labels);
  const auto n = static_cast<std::ptrdiff_t>(episodes.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto row = static_cast<std::size_t>(i);
      Tape tape(&model.params());
      const Tensor& logits = model.Forward(tape, episodes[row], forward).logits.value();
      for (std::size_t c = 0; c < labels; ++c) {
        scores[row * labels + c] = 1.0 / (1.0 + std::exp(-logits[c]));
      }
    } catch (...) {
#pragma omp critical(utde_predict_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return scores;
}

metrics::EvalReport EvaluateModel(const Model& model, const std::vector<EncodedEpisode>& episodes,
                                  const ForwardOptions& forward, bool parallel) {
  RequireNonEmpty(episodes.size(), "evaluation set");
  metrics::LabeledScores data;
  data.classes = model.config().labels;
  data.scores = PredictScores(model, episodes, forward, parallel);
  for (std::size_t i = 0; i < data.scores.size(); ++i) {
    if (!std::isfinite(data.scores[i])) {
      throw NumericalError("non-finite prediction for episode '" +
                           episodes[i / data.classes].id + "'");
    }
  }
  data.labels.reserve(data.scores.size());
  for (const EncodedEpisode& e : episodes) {
    data.labels.insert(data.labels.end(), e.label.begin(), e.label.end());
  }
  return metrics::Evaluate(data);
}

std::string SelectionMetricName(const ModelConfig& config) {
  return config.labels == 1 ? "f1" : "macro_f1";
}

double SelectionMetric(const metrics::EvalReport& report) {
  return report.macro_f1 ? *report.macro_f1 : report.f1;
}

TrainResult Train(Model& model, const std::vector<EncodedEpisode>& train,
                  const std::vector<EncodedEpisode>& val, const TrainOptions& options) {
  RequireNonEmpty(train.size(), "training set");
  RequireNonEmpty(val.size(), "validation set");
  if (options.batch_size == 0) throw ConfigError("batch_size must be >= 1");

  std::vector<bool> frozen(model.params().size(), false);
  for (std::size_t i = 0; i < frozen.size(); ++i) {
    const std::string& name = model.params().name(ParamId{i});
    for (const std::string& prefix : options.frozen_prefixes) {
      if (name.rfind(prefix, 0) == 0) frozen[i] = true;
    }
  }

  TrainResult result;
  result.metric_name = SelectionMetricName(model.config());
  auto record_epoch = [&](std::size_t epoch, double train_loss) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = train_loss;
    try {
      rec.val_report = EvaluateModel(model, val, options.forward, options.parallel);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " while validating epoch " +
                           std::to_string(epoch) + " (lr=" + Describe(options.lr) +
                           "); consider a lower lr or grad_clip");
    }
    rec.val_metric = SelectionMetric(rec.val_report);
    if (epoch == 0 || rec.val_metric > result.best_metric) {
      result.best_metric = rec.val_metric;
      result.best_epoch = epoch;
      result.best_params = model.params();
    }
    rec.best_val_metric = result.best_metric;
    result.history.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
  };
  record_epoch(0, 0.0);

  AdamState adam(model.params(), AdamOptions{.lr = options.lr});
  std::vector<std::size_t> order(train.size());
  std::vector<const EncodedEpisode*> batch;
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(MixSeed(options.seed, epoch));
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(&train[order[k]]);
      BatchResult br = options.parallel
                           ? BatchGradientsParallel(model, batch, options.pos_weight, options.forward)
                           : BatchGradientsSerial(model, batch, options.pos_weight, options.forward);
      for (std::size_t i = 0; i < frozen.size(); ++i) {
        if (frozen[i]) br.grads[i] = Tensor(br.grads[i].shape(), 0.0);
      }
      const double norm = GlobalNorm(br.grads);
      if (!std::isfinite(br.loss) || !std::isfinite(norm)) {
        throw NumericalError("non-finite " + std::string(std::isfinite(br.loss) ? "gradient" : "loss") +
                             " at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batches) + " (lr=" + Describe(options.lr) +
                             "); consider a lower lr or grad_clip");
      }
      if (options.grad_clip > 0.0 && norm > options.grad_clip) {
        Scale(br.grads, options.grad_clip / norm);
      }
      AdamStep(model.params(), br.grads, adam);
      result.batch_losses.push_back(br.loss);
      loss_sum += br.loss;
      ++batches;
    }
    record_epoch(epoch, loss_sum / static_cast<double>(batches));
  }
  return result;
}

}  // namespace utde::harness
