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

#include <optional>
#include <vector>

#include "utde/data/episode.hpp"
#include "utde/harness/checkpoint.hpp"
#include "utde/harness/config.hpp"
#include "utde/harness/trainer.hpp"
#include "utde/metrics/metrics.hpp"

// End-to-end glue shared by the command-line tool and the experiment tests.
namespace utde::harness {

data::TaskSchema SchemaFor(const RunConfig& config);

struct Splits {
  std::vector<data::Episode> train, val, test;
};

struct PreparedSplits {
  data::NormalizationStats stats;
  std::vector<EncodedEpisode> train, val, test;
};

// Reads the configured split files; the test split is optional.
Splits LoadSplits(const RunConfig& config);

// Statistics come from the training split and are applied to the others.
PreparedSplits Prepare(const RunConfig& config, const Splits& splits);

// Normalizes and encodes episodes for an existing checkpoint.
std::vector<EncodedEpisode> PrepareForCheckpoint(const Checkpoint& checkpoint,
                                                 const std::vector<data::Episode>& episodes);

struct RunOutcome {
  Checkpoint checkpoint;
  TrainResult result;
  std::optional<metrics::EvalReport> test;  // when a test split is present
};

// Trains from `config` (which must carry a seed), keeps the best snapshot and
// evaluates it on the test split.
RunOutcome RunTraining(const RunConfig& config, const PreparedSplits& data,
                       TrainOptions options);

}  // namespace utde::harness
