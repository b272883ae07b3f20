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

#include "utde/harness/model.hpp"

#include <algorithm>
#include <array>

#include "utde/data/text_encoder.hpp"
#include "utde/tensor/ops.hpp"

namespace utde::harness {
namespace {

constexpr std::size_t kFfnMultiplier = 4;

}  // namespace

EncodedEpisode EncodeEpisode(const data::Episode& episode, const ModelConfig& config,
                             const data::NormalizationStats& stats,
                             const EncodingOptions& options) {
  if (stats.features() != config.d_m) {
    throw data::SchemaError("normalization stats cover " + std::to_string(stats.features()) +
                            " features but the model expects d_m = " +
                            std::to_string(config.d_m));
  }
  if (episode.label.size() != config.labels) {
    throw data::SchemaError("episode " + episode.id + " has " +
                                std::to_string(episode.label.size()) + " labels, model expects " +
                                std::to_string(config.labels),
                            0, "y");
  }
  if (episode.notes.empty()) {
    throw data::DataError("episode " + episode.id + " has no notes", 0, "notes");
  }
  const tde::ReferenceGrid grid(config.grid_size);
  EncodedEpisode out;
  out.id = episode.id;
  out.label = episode.label;
  out.imputed = tde::Impute(tde::Discretize(episode, grid, config.d_m), stats);
  out.series = mtand::GroupByFeature(episode, config.d_m);
  const data::Episode latest = data::TruncateNotes(episode, options.max_notes);
  for (const data::NoteEvent& note : latest.notes) {
    const std::vector<double> emb = data::EmbedNote(note, config.d_t, options.text_seed);
    if (emb.size() != config.d_t) {
      throw data::SchemaError("episode " + episode.id + ": note embedding width " +
                                  std::to_string(emb.size()) + " != d_t " +
                                  std::to_string(config.d_t),
                              0, "emb");
    }
    out.note_embeddings.insert(out.note_embeddings.end(), emb.begin(), emb.end());
    out.note_times.push_back(note.time);
  }
  return out;
}

std::vector<EncodedEpisode> EncodeEpisodes(const std::vector<data::Episode>& episodes,
                                           const ModelConfig& config,
                                           const data::NormalizationStats& stats,
                                           const EncodingOptions& options) {
  std::vector<EncodedEpisode> out;
  out.reserve(episodes.size());
  for (const data::Episode& e : episodes) out.push_back(EncodeEpisode(e, config, stats, options));
  return out;
}

Model::Model(const ModelConfig& config, std::uint64_t seed)
    : config_(config), grid_((config.Validate(), config.grid_size)) {
  const Initializer init(seed);
  const std::size_t d_h = config_.d_hidden;
  const bool want_imputation = uses_series() && config_.ts_embed != TsEmbedding::kMtand;
  const bool want_series_attention = uses_series() && config_.ts_embed != TsEmbedding::kImputation;
  const bool want_note_attention = uses_notes() && config_.text_irregularity;

  if (want_imputation) {
    imputation_ = tde::ImputationEncoder::Create(params_, init, kImputationPrefix, config_.d_m, d_h,
                                                 config_.kernel_size);
  }
  if (want_series_attention || want_note_attention) {
    bank_ = mtand::Time2VecBank::Create(params_, init, kTime2VecPrefix, config_.time_embeddings,
                                        config_.d_timeembed);
  }
  if (want_series_attention) {
    series_attention_ =
        mtand::MtandEncoder::Create(params_, init, kSeriesAttentionPrefix, bank_, config_.d_m, d_h);
  }
  if (uses_series() && config_.ts_embed == TsEmbedding::kUtde) {
    gate_ = gate::GateParams::Create(params_, init, "gate", d_h, config_.gate_level);
  }
  if (want_note_attention) {
    note_attention_ =
        mtand::MtandEncoder::Create(params_, init, kNoteAttentionPrefix, bank_, config_.d_t, d_h);
  } else if (uses_notes()) {
    note_weight_ = params_.Add("note_proj.weight", init.Glorot("note_proj.weight", config_.d_t, d_h));
    note_bias_ = params_.Add("note_proj.bias", Initializer::Zeros({1, d_h}));
  }
  if (config_.modality == Modality::kFused) {
    fusion_ = fusion::FusionStack::Create(params_, init, "fusion", config_.fusion_layers, d_h,
                                          config_.heads, kFfnMultiplier * d_h);
  } else {
    encoder_ = fusion::EncoderStack::Create(params_, init, "encoder", config_.fusion_layers, d_h,
                                            config_.heads, kFfnMultiplier * d_h);
  }
  const std::size_t readout = config_.modality == Modality::kFused ? 2 * d_h : d_h;
  classifier_ = fusion::Classifier::Create(params_, init, "classifier", readout, d_h, config_.labels);
}

Var Model::SeriesStream(Tape& tape, const EncodedEpisode& e, const ForwardOptions& options,
                        Var* gate_out) const {
  if (!uses_series()) throw std::logic_error("model has no time-series branch");
  std::optional<Var> e_imp, e_attn;
  if (imputation_) e_imp = imputation_->Embed(tape, tape.Constant(e.imputed));
  if (series_attention_) e_attn = series_attention_->EmbedSeries(tape, grid_, e.series);
  if (!gate_) return e_imp ? *e_imp : *e_attn;
  Var g = options.forced_gate ? tape.Constant(Tensor::Scalar(*options.forced_gate))
                              : gate::Gate(*e_imp, *e_attn, *gate_);
  if (gate_out) *gate_out = g;
  return gate::UtdeEmbed(*e_imp, *e_attn, g);
}

Var Model::NoteStream(Tape& tape, const EncodedEpisode& e, Mask* mask) const {
  if (!uses_notes()) throw std::logic_error("model has no note branch");
  if (e.notes() == 0) throw data::DataError("episode " + e.id + " has no notes", 0, "notes");
  const std::size_t a = grid_.size();
  if (note_attention_) {
    if (mask) mask->assign(a, true);
    return note_attention_->EmbedNotes(tape, grid_, e.note_embeddings, e.note_times);
  }
  // Raw embeddings of the latest min(l, a) notes, right-padded to a rows.
  const std::size_t used = std::min(e.notes(), a);
  const std::size_t skip = e.notes() - used;
  std::vector<double> rows(e.note_embeddings.begin() + static_cast<std::ptrdiff_t>(skip * config_.d_t),
                           e.note_embeddings.end());
  Var raw = tape.Constant(Tensor({used, config_.d_t}, std::move(rows)));
  Var projected = AddBias(MatMul(raw, tape.Param(*note_weight_)), tape.Param(*note_bias_));
  if (mask) {
    mask->assign(a, false);
    std::fill(mask->begin(), mask->begin() + static_cast<std::ptrdiff_t>(used), true);
  }
  return used == a ? projected : PadRows(projected, a);
}

ForwardResult Model::Forward(Tape& tape, const EncodedEpisode& e,
                             const ForwardOptions& options) const {
  ForwardResult out;
  const std::size_t a = grid_.size();
  Mask mask;
  if (uses_series()) out.z_ts = SeriesStream(tape, e, options, &out.gate);
  if (uses_notes()) out.z_txt = NoteStream(tape, e, &mask);
  const bool padded = uses_notes() && !note_attention_;
  const Mask* txt_mask = padded ? &mask : nullptr;
  const std::size_t txt_row = padded ? std::min(e.notes(), a) - 1 : a - 1;

  Var features;
  if (fusion_) {
    auto [ts, txt] = fusion_->Forward(out.z_ts, out.z_txt, txt_mask);
    const std::array<Var, 2> last = {fusion_->final_ts.Apply(SliceRows(ts, a - 1, 1)),
                                     fusion_->final_txt.Apply(SliceRows(txt, txt_row, 1))};
    features = ConcatCols(last);
  } else if (uses_series()) {
    features = encoder_->final_norm.Apply(SliceRows(encoder_->Forward(out.z_ts), a - 1, 1));
  } else {
    features =
        encoder_->final_norm.Apply(SliceRows(encoder_->Forward(out.z_txt, txt_mask), txt_row, 1));
  }
  out.logits = classifier_.Forward(features);
  return out;
}

void Model::LoadParams(const ParamStore& other) {
  if (other.size() != params_.size()) {
    throw data::SchemaError("parameter count " + std::to_string(other.size()) +
                            " does not match the model's " + std::to_string(params_.size()));
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const ParamId id{i};
    const std::string& name = params_.name(id);
    const auto src = other.Find(name);
    if (!src) throw data::SchemaError("missing parameter '" + name + "'");
    const Tensor& value = other.value(*src);
    if (value.shape() != params_.value(id).shape()) {
      throw data::SchemaError("parameter '" + name + "' has shape " + ShapeString(value.shape()) +
                              ", expected " + ShapeString(params_.value(id).shape()));
    }
    params_.value(id) = value;
  }
}

}  // namespace utde::harness
