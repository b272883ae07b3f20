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

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "utde/tensor/ops.hpp"
#include "utde/tensor/params.hpp"
#include "utde/tensor/tape.hpp"

// Pre-layer-norm transformer blocks over the temporal axis of [a x d_h]
// streams, and the interleaved two-stream fusion stack built from them.
// Attention is bidirectional and there are no positional encodings: the
// grid-aligned inputs already carry time through their embeddings.
namespace utde::fusion {

struct LayerNormParams {
  ParamId gain;
  ParamId bias;

  static LayerNormParams Create(ParamStore& store, const std::string& prefix, std::size_t d);
  Var Apply(Var x) const;
};

struct AttentionParams {
  std::size_t heads = 1;
  LayerNormParams query_norm;
  std::optional<LayerNormParams> context_norm;  // cross-attention only
  ParamId query_weight, query_bias;
  ParamId key_weight, key_bias;
  ParamId value_weight, value_bias;
  ParamId out_weight, out_bias;

  static AttentionParams Create(ParamStore& store, const Initializer& init,
                                const std::string& prefix, std::size_t d_h, std::size_t heads,
                                bool cross);
};

struct FeedForwardParams {
  LayerNormParams norm;
  ParamId inner_weight, inner_bias;
  ParamId out_weight, out_bias;

  static FeedForwardParams Create(ParamStore& store, const Initializer& init,
                                  const std::string& prefix, std::size_t d_h, std::size_t inner);
};

// Scaled dot-product multi-head attention without norm or residual:
// queries from `query_in` [a x d_h], keys/values from `context_in` [l x d_h].
// `key_mask` (length l) hides padded context rows.
Var MultiHeadAttention(Var query_in, Var context_in, const AttentionParams& params,
                       const Mask* key_mask = nullptr);

// x + MHA(LN(x), LN(x))
Var SelfAttend(Var x, const AttentionParams& params, const Mask* key_mask = nullptr);

// x + MHA(LN_q(x), LN_kv(other))
Var CrossAttend(Var x, Var other, const AttentionParams& params,
                const Mask* key_mask = nullptr);

// x + W2 relu(W1 LN(x) + b1) + b2
Var FeedForward(Var x, const FeedForwardParams& params);

struct FusionLayerParams {
  AttentionParams self_ts, self_txt;
  AttentionParams cross_ts, cross_txt;
  FeedForwardParams ffn_ts, ffn_txt;
};

// J interleaved layers. Per layer and per stream: self-attention, then
// cross-attention against the other stream's post-self-attention output of
// the same layer, then the feed-forward sublayer. Forward() returns the raw
// residual streams; the final layer norms are applied by the readout.
struct FusionStack {
  std::vector<FusionLayerParams> layers;
  LayerNormParams final_ts, final_txt;

  static FusionStack Create(ParamStore& store, const Initializer& init, const std::string& prefix,
                            std::size_t layers, std::size_t d_h, std::size_t heads,
                            std::size_t ffn_inner);

  // `txt_mask` marks real rows of the note stream (nullptr: all real).
  std::pair<Var, Var> Forward(Var z_ts, Var z_txt, const Mask* txt_mask = nullptr) const;
};

struct EncoderLayerParams {
  AttentionParams self;
  FeedForwardParams ffn;
};

// J self-attention-only layers over one stream.
struct EncoderStack {
  std::vector<EncoderLayerParams> layers;
  LayerNormParams final_norm;

  static EncoderStack Create(ParamStore& store, const Initializer& init, const std::string& prefix,
                             std::size_t layers, std::size_t d_h, std::size_t heads,
                             std::size_t ffn_inner);

  Var Forward(Var x, const Mask* mask = nullptr) const;
};

// Two fully-connected layers: in -> hidden (ReLU) -> outputs.
struct Classifier {
  ParamId hidden_weight, hidden_bias;
  ParamId out_weight, out_bias;

  static Classifier Create(ParamStore& store, const Initializer& init, const std::string& prefix,
                           std::size_t in_width, std::size_t hidden, std::size_t outputs);

  // features [1 x in_width] -> logits [1 x outputs]
  Var Forward(Var features) const;
};

}  // namespace utde::fusion
