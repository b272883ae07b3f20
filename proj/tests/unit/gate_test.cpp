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
#include "support/testing.hpp"
#include "utde/gate/gate.hpp"
#include "utde/tensor/ops.hpp"

namespace utde::gate {
namespace {

using testing::RandomTensor;

constexpr GateLevel kLevels[] = {GateLevel::kPatient, GateLevel::kTemporal, GateLevel::kHidden};

void ZeroAll(ParamStore& store, const GateParams& p) {
  for (ParamId id : {p.hidden_weight, p.hidden_bias, p.out_weight, p.out_bias}) {
    store.value(id) = Tensor(store.value(id).shape(), 0.0);
  }
}

TEST_CASE("gate level names") {
  for (GateLevel level : kLevels) CHECK(ParseGateLevel(ToString(level)) == level);
  CHECK_THROWS(ParseGateLevel("global"));
}

TEST_CASE("zero gate parameters give one half everywhere") {
  std::mt19937_64 rng(1);
  for (GateLevel level : kLevels) {
    ParamStore store;
    const GateParams p = GateParams::Create(store, Initializer(2), "gate", 4, level);
    ZeroAll(store, p);
    Tape tape(&store);
    const Tensor g = Gate(tape.Constant(RandomTensor(rng, {5, 4})), tape.Constant(RandomTensor(rng, {5, 4})), p).value();
    for (double v : g.values()) CHECK(v == 0.5);
  }
}

TEST_CASE("a large output bias saturates the gate") {
  std::mt19937_64 rng(3);
  for (GateLevel level : kLevels) {
    ParamStore store;
    const GateParams p = GateParams::Create(store, Initializer(2), "gate", 4, level);
    ZeroAll(store, p);
    store.value(p.out_bias) = Tensor(store.value(p.out_bias).shape(), 30.0);
    Tape tape(&store);
    const Tensor g = Gate(tape.Constant(RandomTensor(rng, {5, 4})), tape.Constant(RandomTensor(rng, {5, 4})), p).value();
    for (double v : g.values()) CHECK(std::abs(1.0 - v) <= 1e-9);
  }
}

TEST_CASE("gate shapes and range per level") {
  std::mt19937_64 rng(5);
  const std::pair<GateLevel, Shape> expected[] = {
      {GateLevel::kPatient, {1, 1}}, {GateLevel::kTemporal, {7, 1}}, {GateLevel::kHidden, {7, 6}}};
  for (const auto& [level, shape] : expected) {
    ParamStore store;
    const GateParams p = GateParams::Create(store, Initializer(4), "gate", 6, level);
    store.value(p.out_bias) = RandomTensor(rng, store.value(p.out_bias).shape());
    Tape tape(&store);
    const Tensor g = Gate(tape.Constant(RandomTensor(rng, {7, 6})), tape.Constant(RandomTensor(rng, {7, 6})), p).value();
    CHECK(g.shape() == shape);
    for (double v : g.values()) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
  }
  ParamStore store;
  const GateParams p = GateParams::Create(store, Initializer(4), "gate", 6, GateLevel::kHidden);
  Tape tape(&store);
  CHECK_THROWS_AS(Gate(tape.Constant(Tensor({7, 6})), tape.Constant(Tensor({6, 6})), p), DimensionError);
}

TEST_CASE("mixing is exact at the extremes and symmetric at one half") {
  std::mt19937_64 rng(6);
  const Tensor imp = RandomTensor(rng, {5, 4}), attn = RandomTensor(rng, {5, 4});
  Tape tape;
  const Var a = tape.Constant(imp), b = tape.Constant(attn);
  for (const Shape& gs : {Shape{1, 1}, Shape{5, 1}, Shape{5, 4}}) {
    CHECK(UtdeEmbed(a, b, tape.Constant(Tensor(gs, 1.0))).value() == imp);
    CHECK(UtdeEmbed(a, b, tape.Constant(Tensor(gs, 0.0))).value() == attn);
  }
  Tensor neg = imp;
  for (double& v : neg.values()) v = -v;
  const Tensor zero = UtdeEmbed(a, tape.Constant(neg), tape.Constant(Tensor({1, 1}, 0.5))).value();
  for (double v : zero.values()) CHECK(v == 0.0);
}

TEST_CASE("mixture lies between the two embeddings") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const Tensor imp = RandomTensor(rng, {3, 4}, -50, 50), attn = RandomTensor(rng, {3, 4}, -50, 50);
    const Tensor g = RandomTensor(rng, {3, 4}, 0.0, 1.0);
    Tape tape;
    const Tensor z = UtdeEmbed(tape.Constant(imp), tape.Constant(attn), tape.Constant(g)).value();
    for (std::size_t i = 0; i < z.size(); ++i) {
      CHECK(z[i] >= std::min(imp[i], attn[i]));
      CHECK(z[i] <= std::max(imp[i], attn[i]));
    }
  }
}

TEST_CASE("gradients reach both branches") {
  std::mt19937_64 rng(8);
  for (GateLevel level : kLevels) {
    ParamStore store;
    const GateParams p = GateParams::Create(store, Initializer(9), "gate", 4, level);
    const Tensor r = RandomTensor(rng, {5, 4});
    const Tensor imp = RandomTensor(rng, {5, 4}), attn = RandomTensor(rng, {5, 4});
    Tape tape(&store);
    Var a = tape.Input(imp), b = tape.Input(attn);
    Var loss = testing::Project(UtdeEmbed(a, b, Gate(a, b, p)), r);
    tape.Backward(loss);
    double na = 0.0, nb = 0.0;
    for (double v : tape.grad(a).values()) na += std::abs(v);
    for (double v : tape.grad(b).values()) nb += std::abs(v);
    CHECK(na > 0.0);
    CHECK(nb > 0.0);

    const testing::GradCheck check = testing::CheckInputGradients(
        [&](Tape&, const std::vector<Var>& in) {
          return testing::Project(UtdeEmbed(in[0], in[1], Gate(in[0], in[1], p)), r);
        },
        {imp, attn}, &store);
    CHECK(check.max_error < testing::kFdTolerance);
  }
}

TEST_CASE("patient level applies one coefficient to every position") {
  std::mt19937_64 rng(10);
  ParamStore store;
  const GateParams p = GateParams::Create(store, Initializer(11), "gate", 4, GateLevel::kPatient);
  const Tensor imp = RandomTensor(rng, {6, 4}), attn = RandomTensor(rng, {6, 4});
  Tape tape(&store);
  const Var a = tape.Constant(imp), b = tape.Constant(attn);
  const Var g = Gate(a, b, p);
  const Tensor z = UtdeEmbed(a, b, g).value();
  const double c = g.value().item();
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (std::abs(imp[i] - attn[i]) < 1e-3) continue;
    CHECK((z[i] - attn[i]) / (imp[i] - attn[i]) == doctest::Approx(c).epsilon(1e-9));
  }
}

}  // namespace
}  // namespace utde::gate
