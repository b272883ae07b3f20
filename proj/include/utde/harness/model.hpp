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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "utde/data/episode.hpp"
#include "utde/data/normalize.hpp"
#include "utde/fusion/fusion.hpp"
#include "utde/gate/gate.hpp"
#include "utde/harness/config.hpp"
#include "utde/mtand/mtand.hpp"
#include "utde/tde/imputation.hpp"
#include "utde/tensor/params.hpp"
#include "utde/tensor/tape.hpp"

namespace utde::harness {

// Everything the model reads from one normalized episode, precomputed once.
struct EncodedEpisode {
  std::string id;
  Tensor imputed;                      // [a x d_m]
  mtand::FeatureSeries series;
  std::vector<double> note_embeddings; // row-major [l x d_t], latest notes only
  std::vector<double> note_times;      // normalized, ascending
  std::vector<int> label;

  std::size_t notes() const { return note_times.size(); }
};

struct EncodingOptions {
  std::size_t max_notes = 5;
  std::uint64_t text_seed = 0;
};

// `episode` must already be normalized with `stats`. Throws data::SchemaError
// when its label width or note embeddings do not match `config`.
EncodedEpisode EncodeEpisode(const data::Episode& episode, const ModelConfig& config,
                             const data::NormalizationStats& stats,
                             const EncodingOptions& options);
std::vector<EncodedEpisode> EncodeEpisodes(const std::vector<data::Episode>& episodes,
                                           const ModelConfig& config,
                                           const data::NormalizationStats& stats,
                                           const EncodingOptions& options);

struct ForwardOptions {
  // Replaces the learned gate with a constant (UTDE only).
  std::optional<double> forced_gate;
};

struct ForwardResult {
  Var logits;  // [1 x labels]
  Var gate;    // UTDE only
  Var z_ts;    // time-series stream fed to the backbone
  Var z_txt;   // note stream fed to the backbone
};

// The full classifier: time-series embedding (UTDE, imputation or mTAND),
// note embedding (mTAND over notes, or padded raw embeddings), then either the
// interleaved fusion stack or a single-stream encoder, then the classifier.
// All parameters live in one store; the Time2Vec bank is shared.
class Model {
 public:
  Model(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const ParamStore& params() const { return params_; }
  ParamStore& params() { return params_; }
  const tde::ReferenceGrid& grid() const { return grid_; }

  bool uses_series() const { return config_.modality != Modality::kNotes; }
  bool uses_notes() const { return config_.modality != Modality::kTimeSeries; }

  // Embedding stages, exposed for tests.
  Var SeriesStream(Tape& tape, const EncodedEpisode& e, const ForwardOptions& options,
                   Var* gate = nullptr) const;
  // [a x d_h]. Without text irregularity the rows past the real notes are
  // zero padding and `mask` (if given) marks the real ones.
  Var NoteStream(Tape& tape, const EncodedEpisode& e, Mask* mask = nullptr) const;

  ForwardResult Forward(Tape& tape, const EncodedEpisode& e,
                        const ForwardOptions& options = {}) const;

  // Copies values by name from `other`; every parameter must be present with
  // the same shape. Throws data::SchemaError otherwise.
  void LoadParams(const ParamStore& other);

  // Parameter groups, by name prefix.
  static constexpr const char* kImputationPrefix = "imputation";
  static constexpr const char* kTime2VecPrefix = "time2vec";
  static constexpr const char* kSeriesAttentionPrefix = "mtand_ts";
  static constexpr const char* kNoteAttentionPrefix = "mtand_txt";

 private:
  ModelConfig config_;
  ParamStore params_;
  tde::ReferenceGrid grid_;
  std::optional<tde::ImputationEncoder> imputation_;
  std::shared_ptr<const mtand::Time2VecBank> bank_;
  std::optional<mtand::MtandEncoder> series_attention_;
  std::optional<gate::GateParams> gate_;
  std::optional<mtand::MtandEncoder> note_attention_;
  std::optional<ParamId> note_weight_, note_bias_;
  std::optional<fusion::FusionStack> fusion_;
  std::optional<fusion::EncoderStack> encoder_;
  fusion::Classifier classifier_;
};

}  // namespace utde::harness
