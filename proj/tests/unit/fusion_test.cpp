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

#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "support/testing.hpp"
#include "utde/fusion/fusion.hpp"

namespace utde::fusion {
namespace {

using testing::Matrix;
using testing::RandomTensor;
using testing::ToMatrix;

void Randomize(ParamStore& store, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < store.size(); ++i) {
    Tensor& v = store.value(ParamId{i});
    v = RandomTensor(rng, v.shape(), -1.0, 1.0);
  }
}

void Zero(ParamStore& store, ParamId id) { store.value(id) = Tensor(store.value(id).shape(), 0.0); }

void ZeroOutputs(ParamStore& store, const AttentionParams& p) {
  Zero(store, p.out_weight);
  Zero(store, p.out_bias);
}

void ZeroOutputs(ParamStore& store, const FeedForwardParams& p) {
  Zero(store, p.out_weight);
  Zero(store, p.out_bias);
}

TEST_CASE("zero output projections leave the input unchanged") {
  std::mt19937_64 rng(1);
  ParamStore store;
  const Initializer init(2);
  const AttentionParams self = AttentionParams::Create(store, init, "self", 8, 2, false);
  const AttentionParams cross = AttentionParams::Create(store, init, "cross", 8, 2, true);
  const FeedForwardParams ffn = FeedForwardParams::Create(store, init, "ffn", 8, 32);
  Randomize(store, 3);
  ZeroOutputs(store, self);
  ZeroOutputs(store, cross);
  ZeroOutputs(store, ffn);
  const Tensor x = RandomTensor(rng, {5, 8}), other = RandomTensor(rng, {5, 8});
  Tape tape(&store);
  const Var xv = tape.Constant(x);
  CHECK(SelfAttend(xv, self).value() == x);
  CHECK(CrossAttend(xv, tape.Constant(other), cross).value() == x);
  CHECK(FeedForward(xv, ffn).value() == x);
}

TEST_CASE("a zero context with zero value bias adds nothing") {
  std::mt19937_64 rng(4);
  ParamStore store;
  const AttentionParams cross = AttentionParams::Create(store, Initializer(5), "cross", 8, 4, true);
  const Tensor x = RandomTensor(rng, {3, 8});
  Tape tape(&store);
  CHECK(CrossAttend(tape.Constant(x), tape.Constant(Tensor({3, 8}, 0.0)), cross).value() == x);
}

TEST_CASE("a single position attends to itself") {
  std::mt19937_64 rng(6);
  ParamStore store;
  const AttentionParams self = AttentionParams::Create(store, Initializer(7), "self", 4, 2, false);
  Randomize(store, 8);
  const Tensor x = RandomTensor(rng, {1, 4});
  Tape tape(&store);
  const Tensor got = SelfAttend(tape.Constant(x), self).value();
  // Weight 1 on the only key: x + (LN(x) Wv + bv) Wo + bo.
  const Matrix n = testing::LayerNormOracle(store, ToMatrix(x), self.query_norm);
  const Matrix v = testing::LinearOracle(store, n, self.value_weight, self.value_bias);
  const Matrix want = testing::AddOracle(ToMatrix(x), testing::LinearOracle(store, v, self.out_weight, self.out_bias));
  CHECK(testing::MaxAbsDiff(want, got) <= 1e-12);
}

TEST_CASE("attention sublayers match the loop oracle") {
  std::mt19937_64 rng(9);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (std::size_t heads : {1u, 2u, 4u}) {
      ParamStore store;
      const Initializer init(seed);
      const AttentionParams self = AttentionParams::Create(store, init, "self", 8, heads, false);
      const AttentionParams cross = AttentionParams::Create(store, init, "cross", 8, heads, true);
      const FeedForwardParams ffn = FeedForwardParams::Create(store, init, "ffn", 8, 32);
      Randomize(store, 100 + seed);
      const Tensor x = RandomTensor(rng, {3, 8}), other = RandomTensor(rng, {5, 8});
      const Mask mask = {true, false, true, true, false};
      Tape tape(&store);
      const Var xv = tape.Constant(x), ov = tape.Constant(other);
      CHECK(testing::MaxAbsDiff(testing::SelfAttendOracle(store, ToMatrix(x), self), SelfAttend(xv, self).value()) <= 1e-9);
      CHECK(testing::MaxAbsDiff(testing::CrossAttendOracle(store, ToMatrix(x), ToMatrix(other), cross),
                                CrossAttend(xv, ov, cross).value()) <= 1e-9);
      CHECK(testing::MaxAbsDiff(testing::CrossAttendOracle(store, ToMatrix(x), ToMatrix(other), cross, &mask),
                                CrossAttend(xv, ov, cross, &mask).value()) <= 1e-9);
      CHECK(testing::MaxAbsDiff(testing::FeedForwardOracle(store, ToMatrix(x), ffn), FeedForward(xv, ffn).value()) <= 1e-9);
    }
  }
}

TEST_CASE("cross attention against itself is self attention") {
  std::mt19937_64 rng(10);
  ParamStore store;
  const AttentionParams cross = AttentionParams::Create(store, Initializer(11), "cross", 8, 2, true);
  const Tensor x = RandomTensor(rng, {4, 8});
  Tape tape(&store);
  const Var xv = tape.Constant(x);
  // Both norms start at gain 1 and bias 0, so the two paths coincide exactly.
  CHECK(CrossAttend(xv, xv, cross).value() == SelfAttend(xv, cross).value());
}

TEST_CASE("single fusion layer matches the hand-rolled oracle") {
  std::mt19937_64 rng(12);
  ParamStore store;
  const FusionStack stack = FusionStack::Create(store, Initializer(13), "fusion", 1, 4, 1, 16);
  Randomize(store, 14);
  const Tensor ts = RandomTensor(rng, {2, 4}), txt = RandomTensor(rng, {2, 4});
  Tape tape(&store);
  const auto [out_ts, out_txt] = stack.Forward(tape.Constant(ts), tape.Constant(txt));
  const FusionLayerParams& l = stack.layers[0];
  const Matrix ts_hat = testing::SelfAttendOracle(store, ToMatrix(ts), l.self_ts);
  const Matrix txt_hat = testing::SelfAttendOracle(store, ToMatrix(txt), l.self_txt);
  const Matrix want_ts = testing::FeedForwardOracle(
      store, testing::CrossAttendOracle(store, ts_hat, txt_hat, l.cross_ts), l.ffn_ts);
  const Matrix want_txt = testing::FeedForwardOracle(
      store, testing::CrossAttendOracle(store, txt_hat, ts_hat, l.cross_txt), l.ffn_txt);
  CHECK(testing::MaxAbsDiff(want_ts, out_ts.value()) <= 1e-9);
  CHECK(testing::MaxAbsDiff(want_txt, out_txt.value()) <= 1e-9);
}

TEST_CASE("stack of residual-only layers is the identity") {
  std::mt19937_64 rng(15);
  ParamStore store;
  const FusionStack stack = FusionStack::Create(store, Initializer(16), "fusion", 3, 8, 2, 32);
  Randomize(store, 17);
  for (const FusionLayerParams& l : stack.layers) {
    for (const AttentionParams* a : {&l.self_ts, &l.self_txt, &l.cross_ts, &l.cross_txt}) ZeroOutputs(store, *a);
    ZeroOutputs(store, l.ffn_ts);
    ZeroOutputs(store, l.ffn_txt);
  }
  const Tensor ts = RandomTensor(rng, {6, 8}), txt = RandomTensor(rng, {6, 8});
  Tape tape(&store);
  const auto [a, b] = stack.Forward(tape.Constant(ts), tape.Constant(txt));
  CHECK(a.value() == ts);
  CHECK(b.value() == txt);
}

TEST_CASE("stacks need at least one layer") {
  ParamStore store;
  CHECK_THROWS_AS(FusionStack::Create(store, Initializer(1), "f", 0, 8, 2, 32), std::invalid_argument);
  CHECK_THROWS_AS(EncoderStack::Create(store, Initializer(1), "e", 0, 8, 2, 32), std::invalid_argument);
  CHECK_THROWS_AS(AttentionParams::Create(store, Initializer(1), "a", 8, 3, false), std::invalid_argument);
}

TEST_CASE("streams keep their shape through every layer") {
  std::mt19937_64 rng(18);
  ParamStore store;
  const FusionStack stack = FusionStack::Create(store, Initializer(19), "fusion", 2, 8, 4, 32);
  const EncoderStack enc = EncoderStack::Create(store, Initializer(19), "encoder", 2, 8, 4, 32);
  const Mask mask = {true, true, true, false, false};
  Tape tape(&store);
  const auto [a, b] = stack.Forward(tape.Constant(RandomTensor(rng, {5, 8})), tape.Constant(RandomTensor(rng, {5, 8})), &mask);
  CHECK(a.value().shape() == Shape{5, 8});
  CHECK(b.value().shape() == Shape{5, 8});
  CHECK(enc.Forward(tape.Constant(RandomTensor(rng, {24, 8}))).value().shape() == Shape{24, 8});
}

TEST_CASE("notes influence the series stream within one layer") {
  std::mt19937_64 rng(20);
  ParamStore store;
  const FusionStack stack = FusionStack::Create(store, Initializer(21), "fusion", 1, 8, 2, 32);
  Randomize(store, 22);
  const Tensor ts = RandomTensor(rng, {4, 8});
  const Tensor r = RandomTensor(rng, {4, 8});
  const testing::GradCheck check = testing::CheckInputGradients(
      [&](Tape& tape, const std::vector<Var>& in) {
        return testing::Project(stack.Forward(tape.Constant(ts), in[0]).first, r);
      },
      {RandomTensor(rng, {4, 8})}, &store);
  CHECK(check.max_error < testing::kFdTolerance);
  // Every note-stream entry moves the series output by a visible amount.
  Tensor txt = RandomTensor(rng, {4, 8});
  auto ts_out = [&] {
    Tape tape(&store);
    return testing::Project(stack.Forward(tape.Constant(ts), tape.Constant(txt)).first, r).value().item();
  };
  for (std::size_t i = 0; i < txt.size(); ++i) {
    const double saved = txt[i];
    txt[i] = saved + 1e-5;
    const double up = ts_out();
    txt[i] = saved - 1e-5;
    const double down = ts_out();
    txt[i] = saved;
    CHECK(std::abs(up - down) / 2e-5 > 1e-8);
  }
}

TEST_CASE("series-only encoder equals the fused series branch without cross output") {
  std::mt19937_64 rng(23);
  ParamStore store;
  const FusionStack fused = FusionStack::Create(store, Initializer(24), "fusion", 2, 8, 2, 32);
  const EncoderStack enc = EncoderStack::Create(store, Initializer(24), "encoder", 2, 8, 2, 32);
  Randomize(store, 25);
  auto copy = [&](ParamId from, ParamId to) { store.value(to) = store.value(from); };
  auto copy_ln = [&](const LayerNormParams& a, const LayerNormParams& b) {
    copy(a.gain, b.gain);
    copy(a.bias, b.bias);
  };
  for (std::size_t j = 0; j < 2; ++j) {
    const FusionLayerParams& f = fused.layers[j];
    const EncoderLayerParams& e = enc.layers[j];
    copy_ln(f.self_ts.query_norm, e.self.query_norm);
    for (auto m : {&AttentionParams::query_weight, &AttentionParams::query_bias, &AttentionParams::key_weight,
                   &AttentionParams::key_bias, &AttentionParams::value_weight, &AttentionParams::value_bias,
                   &AttentionParams::out_weight, &AttentionParams::out_bias}) {
      copy(f.self_ts.*m, e.self.*m);
    }
    copy_ln(f.ffn_ts.norm, e.ffn.norm);
    for (auto m : {&FeedForwardParams::inner_weight, &FeedForwardParams::inner_bias,
                   &FeedForwardParams::out_weight, &FeedForwardParams::out_bias}) {
      copy(f.ffn_ts.*m, e.ffn.*m);
    }
    ZeroOutputs(store, f.cross_ts);
  }
  const Tensor ts = RandomTensor(rng, {6, 8});
  Tape tape(&store);
  const Tensor fused_ts = fused.Forward(tape.Constant(ts), tape.Constant(Tensor({6, 8}, 0.0))).first.value();
  CHECK(fused_ts == enc.Forward(tape.Constant(ts)).value());
}

TEST_CASE("classifier heads") {
  std::mt19937_64 rng(26);
  ParamStore store;
  const Classifier binary = Classifier::Create(store, Initializer(27), "bin", 16, 8, 1);
  const Classifier multi = Classifier::Create(store, Initializer(27), "multi", 16, 8, 25);
  Tape tape(&store);
  const Var x = tape.Constant(RandomTensor(rng, {1, 16}));
  CHECK(binary.Forward(x).value().shape() == Shape{1, 1});
  CHECK(multi.Forward(x).value().shape() == Shape{1, 25});

  Randomize(store, 28);
  const Tensor xin = RandomTensor(rng, {1, 16});
  Tape t2(&store);
  const Tensor got = multi.Forward(t2.Constant(xin)).value();
  Matrix h = testing::LinearOracle(store, ToMatrix(xin), multi.hidden_weight, multi.hidden_bias);
  for (double& v : h[0]) v = std::max(v, 0.0);
  CHECK(testing::MaxAbsDiff(testing::LinearOracle(store, h, multi.out_weight, multi.out_bias), got) <= 1e-12);

  Zero(store, multi.hidden_weight);
  Zero(store, multi.out_weight);
  Tape t3(&store);
  CHECK(multi.Forward(t3.Constant(xin)).value() == store.value(multi.out_bias));
}

}  // namespace
}  // namespace utde::fusion
