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

#include "utde/fusion/fusion.hpp"

#include <cmath>
#include <stdexcept>

namespace utde::fusion {
namespace {

ParamId AddLinear(ParamStore& store, const Initializer& init, const std::string& name,
                  std::size_t in, std::size_t out) {
  return store.Add(name, init.Glorot(name, in, out));
}

ParamId AddBias(ParamStore& store, const std::string& name, std::size_t out) {
  return store.Add(name, Initializer::Zeros({1, out}));
}

Var Linear(Var x, ParamId weight, ParamId bias) {
  Tape& tape = x.tape();
  return utde::AddBias(MatMul(x, tape.Param(weight)), tape.Param(bias));
}

}  // namespace

LayerNormParams LayerNormParams::Create(ParamStore& store, const std::string& prefix,
                                        std::size_t d) {
  return {store.Add(prefix + ".gain", Initializer::Ones({1, d})),
          store.Add(prefix + ".bias", Initializer::Zeros({1, d}))};
}

Var LayerNormParams::Apply(Var x) const {
  Tape& tape = x.tape();
  return LayerNorm(x, tape.Param(gain), tape.Param(bias));
}

AttentionParams AttentionParams::Create(ParamStore& store, const Initializer& init,
                                        const std::string& prefix, std::size_t d_h,
                                        std::size_t heads, bool cross) {
  if (heads == 0 || d_h % heads != 0) {
    throw std::invalid_argument("attention heads (" + std::to_string(heads) +
                                ") must divide d_h (" + std::to_string(d_h) + ")");
  }
  AttentionParams p;
  p.heads = heads;
  p.query_norm = LayerNormParams::Create(store, prefix + ".norm_q", d_h);
  if (cross) p.context_norm = LayerNormParams::Create(store, prefix + ".norm_kv", d_h);
  p.query_weight = AddLinear(store, init, prefix + ".wq", d_h, d_h);
  p.query_bias = AddBias(store, prefix + ".bq", d_h);
  p.key_weight = AddLinear(store, init, prefix + ".wk", d_h, d_h);
  p.key_bias = AddBias(store, prefix + ".bk", d_h);
  p.value_weight = AddLinear(store, init, prefix + ".wv", d_h, d_h);
  p.value_bias = AddBias(store, prefix + ".bv", d_h);
  p.out_weight = AddLinear(store, init, prefix + ".wo", d_h, d_h);
  p.out_bias = AddBias(store, prefix + ".bo", d_h);
  return p;
}

FeedForwardParams FeedForwardParams::Create(ParamStore& store, const Initializer& init,
                                            const std::string& prefix, std::size_t d_h,
                                            std::size_t inner) {
  FeedForwardParams p;
  p.norm = LayerNormParams::Create(store, prefix + ".norm", d_h);
  p.inner_weight = AddLinear(store, init, prefix + ".w1", d_h, inner);
  p.inner_bias = AddBias(store, prefix + ".b1", inner);
  p.out_weight = AddLinear(store, init, prefix + ".w2", inner, d_h);
  p.out_bias = AddBias(store, prefix + ".b2", d_h);
  return p;
}

Var MultiHeadAttention(Var query_in, Var context_in, const AttentionParams& params,
                       const Mask* key_mask) {
  const std::size_t d_h = query_in.cols();
  if (context_in.cols() != d_h) {
    throw DimensionError("MultiHeadAttention: query width " + std::to_string(d_h) +
                         " vs context width " + std::to_string(context_in.cols()));
  }
  const std::size_t head_dim = d_h / params.heads;
  Var q = Linear(query_in, params.query_weight, params.query_bias);
  Var k = Linear(context_in, params.key_weight, params.key_bias);
  Var v = Linear(context_in, params.value_weight, params.value_bias);
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<Var> heads;
  heads.reserve(params.heads);
  for (std::size_t h = 0; h < params.heads; ++h) {
    const std::size_t start = h * head_dim;
    Var scores = ScaleBy(MatMul(SliceCols(q, start, head_dim),
                                Transpose(SliceCols(k, start, head_dim))),
                         scale);
    Var weights = key_mask ? MaskedSoftmax(scores, *key_mask) : Softmax(scores);
    heads.push_back(MatMul(weights, SliceCols(v, start, head_dim)));
  }
  Var merged = params.heads == 1 ? heads.front() : ConcatCols(heads);
  return Linear(merged, params.out_weight, params.out_bias);
}

Var SelfAttend(Var x, const AttentionParams& params, const Mask* key_mask) {
  Var normed = params.query_norm.Apply(x);
  return Add(x, MultiHeadAttention(normed, normed, params, key_mask));
}

Var CrossAttend(Var x, Var other, const AttentionParams& params, const Mask* key_mask) {
  if (!params.context_norm) throw std::logic_error("CrossAttend: parameters lack a context norm");
  Var q = params.query_norm.Apply(x);
  Var kv = params.context_norm->Apply(other);
  return Add(x, MultiHeadAttention(q, kv, params, key_mask));
}

Var FeedForward(Var x, const FeedForwardParams& params) {
  Var inner = Relu(Linear(params.norm.Apply(x), params.inner_weight, params.inner_bias));
  return Add(x, Linear(inner, params.out_weight, params.out_bias));
}

FusionStack FusionStack::Create(ParamStore& store, const Initializer& init,
                                const std::string& prefix, std::size_t layers, std::size_t d_h,
                                std::size_t heads, std::size_t ffn_inner) {
  if (layers == 0) throw std::invalid_argument("fusion stack needs at least one layer");
  FusionStack s;
  for (std::size_t j = 0; j < layers; ++j) {
    const std::string p = prefix + ".layer" + std::to_string(j);
    s.layers.push_back(FusionLayerParams{
        AttentionParams::Create(store, init, p + ".self_ts", d_h, heads, false),
        AttentionParams::Create(store, init, p + ".self_txt", d_h, heads, false),
        AttentionParams::Create(store, init, p + ".cross_ts", d_h, heads, true),
        AttentionParams::Create(store, init, p + ".cross_txt", d_h, heads, true),
        FeedForwardParams::Create(store, init, p + ".ffn_ts", d_h, ffn_inner),
        FeedForwardParams::Create(store, init, p + ".ffn_txt", d_h, ffn_inner)});
  }
  s.final_ts = LayerNormParams::Create(store, prefix + ".final_ts", d_h);
  s.final_txt = LayerNormParams::Create(store, prefix + ".final_txt", d_h);
  return s;
}

std::pair<Var, Var> FusionStack::Forward(Var z_ts, Var z_txt, const Mask* txt_mask) const {
  if (z_ts.cols() != z_txt.cols()) {
    throw DimensionError("FusionStack: stream widths differ");
  }
  for (const FusionLayerParams& layer : layers) {
    Var ts_hat = SelfAttend(z_ts, layer.self_ts);
    Var txt_hat = SelfAttend(z_txt, layer.self_txt, txt_mask);
    Var ts_cross = CrossAttend(ts_hat, txt_hat, layer.cross_ts, txt_mask);
    Var txt_cross = CrossAttend(txt_hat, ts_hat, layer.cross_txt);
    z_ts = FeedForward(ts_cross, layer.ffn_ts);
    z_txt = FeedForward(txt_cross, layer.ffn_txt);
  }
  return {z_ts, z_txt};
}

EncoderStack EncoderStack::Create(ParamStore& store, const Initializer& init,
                                  const std::string& prefix, std::size_t layers, std::size_t d_h,
                                  std::size_t heads, std::size_t ffn_inner) {
  if (layers == 0) throw std::invalid_argument("encoder stack needs at least one layer");
  EncoderStack s;
  for (std::size_t j = 0; j < layers; ++j) {
    const std::string p = prefix + ".layer" + std::to_string(j);
    s.layers.push_back(
        EncoderLayerParams{AttentionParams::Create(store, init, p + ".self", d_h, heads, false),
                           FeedForwardParams::Create(store, init, p + ".ffn", d_h, ffn_inner)});
  }
  s.final_norm = LayerNormParams::Create(store, prefix + ".final", d_h);
  return s;
}

Var EncoderStack::Forward(Var x, const Mask* mask) const {
  for (const EncoderLayerParams& layer : layers) {
    x = FeedForward(SelfAttend(x, layer.self, mask), layer.ffn);
  }
  return x;
}

Classifier Classifier::Create(ParamStore& store, const Initializer& init,
                              const std::string& prefix, std::size_t in_width,
                              std::size_t hidden, std::size_t outputs) {
  return {AddLinear(store, init, prefix + ".hidden.weight", in_width, hidden),
          AddBias(store, prefix + ".hidden.bias", hidden),
          AddLinear(store, init, prefix + ".out.weight", hidden, outputs),
          AddBias(store, prefix + ".out.bias", outputs)};
}

Var Classifier::Forward(Var features) const {
  return Linear(Relu(Linear(features, hidden_weight, hidden_bias)), out_weight, out_bias);
}

}  // namespace utde::fusion
