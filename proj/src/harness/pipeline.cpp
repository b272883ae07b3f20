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

#include "utde/harness/pipeline.hpp"

#include "utde/data/io.hpp"
#include "utde/data/normalize.hpp"

namespace utde::harness {

data::TaskSchema SchemaFor(const RunConfig& config) {
  return {config.model.d_m, config.model.d_t, config.model.labels};
}

Splits LoadSplits(const RunConfig& config) {
  if (config.train_path.empty()) throw ConfigError("no training split configured (train)");
  if (config.val_path.empty()) throw ConfigError("no validation split configured (val)");
  const data::TaskSchema schema = SchemaFor(config);
  Splits s;
  s.train = data::LoadEpisodes(config.train_path, schema);
  s.val = data::LoadEpisodes(config.val_path, schema);
  if (!config.test_path.empty()) s.test = data::LoadEpisodes(config.test_path, schema);
  return s;
}

PreparedSplits Prepare(const RunConfig& config, const Splits& splits) {
  const EncodingOptions enc{config.max_notes, config.text_seed};
  PreparedSplits out;
  auto [train, stats] = data::Normalize(splits.train, std::nullopt, config.model.d_m,
                                        config.alpha_hours);
  out.stats = stats;
  out.train = EncodeEpisodes(train, config.model, stats, enc);
  auto encode = [&](const std::vector<data::Episode>& raw) {
    if (raw.empty()) return std::vector<EncodedEpisode>{};
    auto normalized = data::Normalize(raw, stats, config.model.d_m, config.alpha_hours).first;
    return EncodeEpisodes(normalized, config.model, stats, enc);
  };
  out.val = encode(splits.val);
  out.test = encode(splits.test);
  return out;
}

std::vector<EncodedEpisode> PrepareForCheckpoint(const Checkpoint& checkpoint,
                                                 const std::vector<data::Episode>& episodes) {
  const RunConfig& config = checkpoint.config;
  auto normalized =
      data::Normalize(episodes, checkpoint.stats, config.model.d_m, config.alpha_hours).first;
  return EncodeEpisodes(normalized, config.model, checkpoint.stats,
                        EncodingOptions{config.max_notes, config.text_seed});
}

RunOutcome RunTraining(const RunConfig& config, const PreparedSplits& data,
                       TrainOptions options) {
  config.Validate();
  if (!config.seed) throw ConfigError("a seed is required for training");
  Model model(config.model, *config.seed);
  RunOutcome out;
  out.result = Train(model, data.train, data.val, options);
  out.checkpoint = MakeCheckpoint(config, data.stats, out.result);
  if (!data.test.empty()) {
    model.LoadParams(out.result.best_params);
    out.test = EvaluateModel(model, data.test, options.forward, options.parallel);
  }
  return out;
}

}  // namespace utde::harness
