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

// The finite-difference gradient suite: one case per differentiable
// operation, one per model component, and the full fused model on a tiny
// configuration. Shared by the unit tests and the acceptance runner.

#include <array>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "support/testing.hpp"
#include "utde/data/normalize.hpp"
#include "utde/data/synthetic.hpp"
#include "utde/fusion/fusion.hpp"
#include "utde/gate/gate.hpp"
#include "utde/harness/model.hpp"
#include "utde/mtand/mtand.hpp"
#include "utde/tde/imputation.hpp"

namespace utde::testing {

struct OpCase {
  std::string name;
  InputLoss loss;
  std::vector<Tensor> inputs;
};

// Uniform in [-2, 2] but at least `gap` away from zero (for kinked ops).
inline Tensor AwayFromZero(std::mt19937_64& rng, const Shape& shape, double gap = 0.1) {
  Tensor t = RandomTensor(rng, shape, gap, 2.0);
  std::bernoulli_distribution coin(0.5);
  for (double& v : t.values()) {
    if (coin(rng)) v = -v;
  }
  return t;
}

inline std::vector<OpCase> OpGradientCases(std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  auto R = [&](Shape s) { return RandomTensor(rng, s); };
  std::vector<OpCase> cases;
  auto add = [&](std::string name, std::vector<Tensor> inputs, Shape out, auto body) {
    const Tensor r = R(out);
    cases.push_back({std::move(name),
                     [r, body](Tape&, const std::vector<Var>& v) { return Project(body(v), r); },
                     std::move(inputs)});
  };
  using V = const std::vector<Var>&;
  add("add", {R({2, 3}), R({2, 3})}, {2, 3}, [](V v) { return Add(v[0], v[1]); });
  add("sub", {R({2, 3}), R({2, 3})}, {2, 3}, [](V v) { return Sub(v[0], v[1]); });
  add("mul", {R({2, 3}), R({2, 3})}, {2, 3}, [](V v) { return Mul(v[0], v[1]); });
  add("scale_by", {R({2, 3})}, {2, 3}, [](V v) { return ScaleBy(v[0], -1.7); });
  add("add_bias", {R({3, 4}), R({1, 4})}, {3, 4}, [](V v) { return AddBias(v[0], v[1]); });
  add("sin", {R({2, 3})}, {2, 3}, [](V v) { return Sin(v[0]); });
  add("sigmoid", {R({2, 3})}, {2, 3}, [](V v) { return Sigmoid(v[0]); });
  add("relu", {AwayFromZero(rng, {2, 3})}, {2, 3}, [](V v) { return Relu(v[0]); });
  add("matmul", {R({3, 4}), R({4, 2})}, {3, 2}, [](V v) { return MatMul(v[0], v[1]); });
  add("transpose", {R({2, 3})}, {3, 2}, [](V v) { return Transpose(v[0]); });
  add("concat_cols", {R({2, 3}), R({2, 1})}, {2, 4}, [](V v) {
    const std::array<Var, 2> parts = {v[0], v[1]};
    return ConcatCols(parts);
  });
  add("slice_cols", {R({2, 4})}, {2, 2}, [](V v) { return SliceCols(v[0], 1, 2); });
  add("slice_rows", {R({4, 2})}, {2, 2}, [](V v) { return SliceRows(v[0], 2, 2); });
  add("pad_rows", {R({2, 3})}, {4, 3}, [](V v) { return PadRows(v[0], 4); });
  add("broadcast_scalar", {R({1, 1})}, {3, 2}, [](V v) { return BroadcastTo(v[0], 3, 2); });
  add("broadcast_column", {R({3, 1})}, {3, 2}, [](V v) { return BroadcastTo(v[0], 3, 2); });
  add("broadcast_row", {R({1, 2})}, {3, 2}, [](V v) { return BroadcastTo(v[0], 3, 2); });
  add("sum", {R({2, 3})}, {1, 1}, [](V v) { return Sum(v[0]); });
  add("mean", {R({2, 3})}, {1, 1}, [](V v) { return Mean(v[0]); });
  add("mean_over_rows", {R({3, 2})}, {1, 2}, [](V v) { return MeanOverRows(v[0]); });
  add("mean_over_cols", {R({3, 2})}, {3, 1}, [](V v) { return MeanOverCols(v[0]); });
  add("masked_softmax", {R({3, 5})}, {3, 5}, [](V v) {
    return MaskedSoftmax(v[0], Mask{true, false, true, true, false});
  });
  add("softmax", {R({3, 4})}, {3, 4}, [](V v) { return Softmax(v[0]); });
  add("convex_combine", {R({3, 4}), R({4, 2})}, {3, 2},
      [](V v) { return ConvexCombine(Softmax(v[0]), v[1]); });
  {
    const std::vector<std::size_t> offsets = {0, 2, 2, 5};
    const std::vector<double> values = {0.3, -1.2, 0.7, 1.9, -0.4};
    add("segment_attention", {R({3, 5})}, {3, 3},
        [offsets, values](V v) { return SegmentAttention(v[0], offsets, values); });
  }
  add("layer_norm", {R({3, 4}), R({1, 4}), R({1, 4})}, {3, 4},
      [](V v) { return LayerNorm(v[0], v[1], v[2]); });
  add("causal_conv1d", {R({5, 3}), R({3, 3, 2}), R({1, 2})}, {5, 2},
      [](V v) { return CausalConv1d(v[0], v[1], v[2]); });
  add("gated_mix", {R({3, 2}), R({3, 2}), R({3, 2})}, {3, 2},
      [](V v) { return GatedMix(Sigmoid(v[0]), v[1], v[2]); });
  {
    const Tensor targets = Tensor::Row({1, 0, 1});
    cases.push_back({"bce_with_logits",
                     [targets](Tape&, const std::vector<Var>& v) { return BceWithLogits(v[0], targets); },
                     {R({1, 3})}});
    cases.push_back({"bce_with_logits_pos_weight",
                     [targets](Tape&, const std::vector<Var>& v) {
                       return BceWithLogits(v[0], targets, 2.5);
                     },
                     {R({1, 3})}});
  }
  return cases;
}

// A component with its own parameters: loss is built on a tape attached to
// `store`.
struct ModuleCase {
  std::string name;
  std::shared_ptr<ParamStore> store;
  ParamLoss loss;
};

inline data::Episode TinyEpisode(std::size_t d_m, std::size_t d_t, std::uint64_t seed,
                                 data::NormalizationStats* stats_out = nullptr) {
  data::SyntheticConfig cfg;
  cfg.n_episodes = 1;
  cfg.d_m = d_m;
  cfg.d_t = d_t;
  cfg.alpha_hours = 24.0;
  cfg.sparsity = 0.3;
  cfg.seed = seed;
  cfg.max_notes = 4;
  auto [episodes, stats] = data::Normalize(data::GenerateSynthetic(cfg), std::nullopt, d_m, 24.0);
  if (stats_out) *stats_out = stats;
  return episodes.at(0);
}

inline std::vector<ModuleCase> ModuleGradientCases(std::uint64_t seed = 2) {
  std::mt19937_64 rng(seed);
  std::vector<ModuleCase> cases;
  const Initializer init(seed);
  const tde::ReferenceGrid grid(4);

  {
    auto store = std::make_shared<ParamStore>();
    auto bank = mtand::Time2VecBank::Create(*store, init, "t2v", 1, 4);
    const Tensor times = RandomTensor(rng, {5, 1}, 0.0, 1.0);
    const Tensor r = RandomTensor(rng, {5, 4});
    cases.push_back({"time2vec", store, [bank, times, r](Tape& t) {
                       return Project(mtand::Time2Vec(t.Constant(times), bank->heads()[0]), r);
                     }});
  }
  {
    auto store = std::make_shared<ParamStore>();
    auto bank = mtand::Time2VecBank::Create(*store, init, "t2v", 1, 4);
    const mtand::AttentionHeadParams head{store->Add("wq", init.Glorot("wq", 4, 4)),
                                          store->Add("wk", init.Glorot("wk", 4, 4))};
    const std::vector<double> keys = {0.05, 0.3, 0.31, 0.8};
    const std::vector<double> values = {0.1, 0.9, 0.4, 0.2, 0.7, 0.5, 0.3, 0.6};
    const Tensor r = RandomTensor(rng, {4, 2});
    cases.push_back({"time_attention", store, [=](Tape& t) {
                       return Project(mtand::TimeAttention(t, grid, keys, values, 2,
                                                           bank->heads()[0], head),
                                      r);
                     }});
  }
  {
    auto store = std::make_shared<ParamStore>();
    data::NormalizationStats stats;
    const data::Episode e = TinyEpisode(2, 8, 5, &stats);
    auto bank = mtand::Time2VecBank::Create(*store, init, "t2v", 2, 4);
    auto ts = mtand::MtandEncoder::Create(*store, init, "ts", bank, 2, 6);
    auto txt = mtand::MtandEncoder::Create(*store, init, "txt", bank, 8, 6);
    const mtand::FeatureSeries series = mtand::GroupByFeature(e, 2);
    std::vector<double> emb, times;
    for (const auto& n : e.notes) {
      const auto& v = std::get<data::NoteEmbedding>(n.payload);
      emb.insert(emb.end(), v.begin(), v.end());
      times.push_back(n.time);
    }
    const Tensor r1 = RandomTensor(rng, {4, 6}), r2 = RandomTensor(rng, {4, 6});
    cases.push_back({"mtand_series_and_notes", store, [=](Tape& t) {
                       return Add(Project(ts.EmbedSeries(t, grid, series), r1),
                                  Project(txt.EmbedNotes(t, grid, emb, times), r2));
                     }});
  }
  {
    auto store = std::make_shared<ParamStore>();
    auto enc = tde::ImputationEncoder::Create(*store, init, "imp", 3, 4, 2);
    const Tensor x = RandomTensor(rng, {4, 3}, 0.0, 1.0);
    const Tensor r = RandomTensor(rng, {4, 4});
    cases.push_back({"imputation_conv", store,
                     [=](Tape& t) { return Project(enc.Embed(t, t.Constant(x)), r); }});
  }
  for (gate::GateLevel level :
       {gate::GateLevel::kPatient, gate::GateLevel::kTemporal, gate::GateLevel::kHidden}) {
    auto store = std::make_shared<ParamStore>();
    const gate::GateParams gp = gate::GateParams::Create(*store, init, "gate", 4, level);
    const ParamId a = store->Add("e_imp", RandomTensor(rng, {3, 4}));
    const ParamId b = store->Add("e_attn", RandomTensor(rng, {3, 4}));
    const Tensor r = RandomTensor(rng, {3, 4});
    cases.push_back({"utde_gate_" + std::string(gate::ToString(level)), store, [=](Tape& t) {
                       Var ei = t.Param(a), ea = t.Param(b);
                       return Project(gate::UtdeEmbed(ei, ea, gate::Gate(ei, ea, gp)), r);
                     }});
  }
  {
    auto store = std::make_shared<ParamStore>();
    const auto self = fusion::AttentionParams::Create(*store, init, "self", 4, 2, false);
    const auto cross = fusion::AttentionParams::Create(*store, init, "cross", 4, 2, true);
    const auto ffn = fusion::FeedForwardParams::Create(*store, init, "ffn", 4, 16);
    const ParamId x = store->Add("x", RandomTensor(rng, {3, 4}));
    const ParamId y = store->Add("y", RandomTensor(rng, {5, 4}));
    const Tensor r = RandomTensor(rng, {3, 4});
    const Mask mask = {true, true, false, true, false};
    cases.push_back({"attention_sublayers", store, [=](Tape& t) {
                       Var h = fusion::SelfAttend(t.Param(x), self);
                       h = fusion::CrossAttend(h, t.Param(y), cross, &mask);
                       return Project(fusion::FeedForward(h, ffn), r);
                     }});
  }
  {
    auto store = std::make_shared<ParamStore>();
    const auto clf = fusion::Classifier::Create(*store, init, "clf", 6, 4, 3);
    const ParamId x = store->Add("x", RandomTensor(rng, {1, 6}));
    const Tensor targets = Tensor::Row({1, 0, 1});
    cases.push_back({"classifier", store, [=](Tape& t) {
                       return BceWithLogits(clf.Forward(t.Param(x)), targets);
                     }});
  }
  return cases;
}

// The tiny fused configuration of the gradient acceptance criterion.
inline harness::ModelConfig TinyFusedConfig() {
  harness::ModelConfig c;
  c.grid_size = 3;
  c.d_m = 2;
  c.d_t = 8;
  c.d_hidden = 8;
  c.d_timeembed = 4;
  c.time_embeddings = 2;
  c.fusion_layers = 2;
  c.heads = 2;
  c.gate_level = gate::GateLevel::kHidden;
  return c;
}

struct ModelCase {
  std::shared_ptr<harness::Model> model;
  harness::EncodedEpisode episode;
  ParamLoss loss;
};

inline ModelCase FullModelCase(const harness::ModelConfig& config, std::uint64_t seed) {
  ModelCase mc;
  mc.model = std::make_shared<harness::Model>(config, seed);
  data::NormalizationStats stats;
  const data::Episode e = TinyEpisode(config.d_m, config.d_t, seed, &stats);
  mc.episode = harness::EncodeEpisode(e, config, stats, harness::EncodingOptions{});
  auto model = mc.model;
  const harness::EncodedEpisode ep = mc.episode;
  mc.loss = [model, ep](Tape& t) {
    const harness::ForwardResult out = model->Forward(t, ep);
    Tensor targets({1, ep.label.size()});
    for (std::size_t i = 0; i < ep.label.size(); ++i) targets[i] = ep.label[i];
    return BceWithLogits(out.logits, targets);
  };
  return mc;
}

}  // namespace utde::testing
