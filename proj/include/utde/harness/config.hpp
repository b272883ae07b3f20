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
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "utde/gate/gate.hpp"

namespace utde::harness {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite loss or parameters during training.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TaskKind { kBinary, kMultiLabel };
enum class Modality { kFused, kTimeSeries, kNotes };
enum class TsEmbedding { kUtde, kImputation, kMtand };

TaskKind ParseTaskKind(std::string_view s);
Modality ParseModality(std::string_view s);
TsEmbedding ParseTsEmbedding(std::string_view s);
std::string_view ToString(TaskKind v);
std::string_view ToString(Modality v);
std::string_view ToString(TsEmbedding v);

struct ModelConfig {
  std::size_t grid_size = 48;        // alpha, reference points
  std::size_t d_m = 17;
  std::size_t d_t = 64;
  std::size_t d_hidden = 64;
  std::size_t d_timeembed = 64;      // d_v
  std::size_t time_embeddings = 8;   // V
  std::size_t fusion_layers = 3;     // J
  std::size_t heads = 4;
  std::size_t kernel_size = 1;
  std::size_t labels = 1;
  gate::GateLevel gate_level = gate::GateLevel::kHidden;
  Modality modality = Modality::kFused;
  TsEmbedding ts_embed = TsEmbedding::kUtde;
  bool text_irregularity = true;

  // Throws ConfigError on zero sizes or heads not dividing d_hidden.
  void Validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct RunConfig {
  ModelConfig model;
  TaskKind task = TaskKind::kBinary;
  double alpha_hours = 48.0;
  std::size_t max_notes = 5;
  std::uint64_t text_seed = 0;

  std::size_t batch_size = 32;
  double lr = 4e-4;
  std::size_t epochs = 20;
  std::optional<std::uint64_t> seed;
  double grad_clip = 0.0;   // 0 disables clipping
  double pos_weight = 1.0;  // 1 disables reweighting
  bool parallel = true;

  std::string train_path, val_path, test_path;
  std::string checkpoint_path;
  std::string log_path;

  void Validate() const;
  bool operator==(const RunConfig&) const = default;
};

using ConfigMap = std::map<std::string, std::string>;

// "key = value" per line; blank lines and '#' comments ignored.
ConfigMap ParseConfigText(std::string_view text);
ConfigMap ReadConfigFile(const std::filesystem::path& path);

// Applies every entry of `map` to `config`. Keys may use '-' or '_'. Unknown
// keys and unparsable values raise ConfigError.
void ApplyConfig(RunConfig& config, const ConfigMap& map);
RunConfig ConfigFromMap(const ConfigMap& map);
ConfigMap ConfigToMap(const RunConfig& config);

}  // namespace utde::harness
