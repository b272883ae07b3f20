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

#include <filesystem>
#include <string>

#include "utde/data/normalize.hpp"
#include "utde/harness/config.hpp"
#include "utde/harness/model.hpp"
#include "utde/harness/trainer.hpp"

namespace utde::harness {

// Best parameters of a run together with everything needed to rebuild the
// model and preprocess new data the same way.
struct Checkpoint {
  RunConfig config;
  data::NormalizationStats stats;
  ParamStore params;
  std::size_t epoch = 0;
  double metric_value = 0.0;
  std::string metric_name;
};

Checkpoint MakeCheckpoint(const RunConfig& config, const data::NormalizationStats& stats,
                          const TrainResult& result);

// Model with the checkpoint's parameters.
Model RestoreModel(const Checkpoint& checkpoint);

// JSON; doubles are written with enough digits to round-trip exactly.
std::string SerializeCheckpoint(const Checkpoint& checkpoint);
Checkpoint ParseCheckpoint(const std::string& text);
void SaveCheckpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace utde::harness
