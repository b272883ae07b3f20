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
#include "support/gradient_cases.hpp"
#include "support/testing.hpp"

namespace utde {
namespace {

using namespace utde::testing;

TEST_CASE("every op passes the finite-difference check") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (const OpCase& c : OpGradientCases(seed)) {
      CAPTURE(c.name);
      CAPTURE(seed);
      const GradCheck r = CheckInputGradients(c.loss, c.inputs);
      CAPTURE(r.worst);
      CHECK(r.checked > 0);
      CHECK(r.max_error < kFdTolerance);
    }
  }
}

TEST_CASE("every component passes the finite-difference check") {
  for (ModuleCase& c : ModuleGradientCases()) {
    CAPTURE(c.name);
    const GradCheck r = CheckParamGradients(c.loss, *c.store);
    CAPTURE(r.worst);
    CHECK(r.max_error < kFdTolerance);
  }
}

TEST_CASE("causal convolution matches a padded sliding-window oracle") {
  std::mt19937_64 rng(4);
  const std::size_t steps = 6, cin = 3, cout = 2, k = 3;
  const Tensor x = RandomTensor(rng, {steps, cin});
  const Tensor kernel = RandomTensor(rng, {k, cin, cout});
  const Tensor bias = RandomTensor(rng, {1, cout});
  Tape tape;
  const Tensor got =
      CausalConv1d(tape.Constant(x), tape.Constant(kernel), tape.Constant(bias)).value();
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t o = 0; o < cout; ++o) {
      double s = bias[o];
      // Left zero padding of k-1 rows: padded[p] = x[p - (k-1)].
      for (std::size_t j = 0; j < k; ++j) {
        const long src = static_cast<long>(t + j) - static_cast<long>(k - 1);
        if (src < 0) continue;
        for (std::size_t c = 0; c < cin; ++c) {
          s += x(static_cast<std::size_t>(src), c) * kernel[(j * cin + c) * cout + o];
        }
      }
      CHECK(got(t, o) == doctest::Approx(s).epsilon(1e-14));
    }
  }
}

TEST_CASE("causal convolution never looks ahead") {
  std::mt19937_64 rng(8);
  const Tensor kernel = RandomTensor(rng, {3, 2, 4});
  const Tensor bias = RandomTensor(rng, {1, 4});
  for (std::size_t t = 0; t < 5; ++t) {
    Tensor x = RandomTensor(rng, {5, 2});
    Tape tape;
    const Tensor before = CausalConv1d(tape.Constant(x), tape.Constant(kernel), tape.Constant(bias)).value();
    for (std::size_t c = 0; c < 2; ++c) x(t, c) += 3.0;
    const Tensor after = CausalConv1d(tape.Constant(x), tape.Constant(kernel), tape.Constant(bias)).value();
    for (std::size_t r = 0; r < 5; ++r) {
      bool same = true;
      for (std::size_t o = 0; o < 4; ++o) same = same && before(r, o) == after(r, o);
      if (r < t) CHECK(same);
      else if (r == t) CHECK_FALSE(same);
    }
  }
}

TEST_CASE("gated mix is exact at the extremes and bounded in between") {
  std::mt19937_64 rng(12);
  const Tensor a = RandomTensor(rng, {4, 3});
  const Tensor b = RandomTensor(rng, {4, 3});
  Tape tape;
  Var av = tape.Constant(a), bv = tape.Constant(b);
  CHECK(GatedMix(tape.Constant(Tensor({4, 3}, 1.0)), av, bv).value() == a);
  CHECK(GatedMix(tape.Constant(Tensor({4, 3}, 0.0)), av, bv).value() == b);
  const Tensor g = RandomTensor(rng, {4, 3}, 0.0, 1.0);
  const Tensor z = GatedMix(tape.Constant(g), av, bv).value();
  for (std::size_t i = 0; i < z.size(); ++i) {
    CHECK(z[i] >= std::min(a[i], b[i]));
    CHECK(z[i] <= std::max(a[i], b[i]));
  }
}

TEST_CASE("segment attention handles empty segments and single keys") {
  Tape tape;
  const std::vector<std::size_t> offsets = {0, 0, 1, 3};
  const std::vector<double> values = {0.25, 0.5, 0.5};
  const Tensor out =
      SegmentAttention(tape.Constant(Tensor::FromRows({{1, 2, 3}, {-1, 0, 4}})), offsets, values)
          .value();
  for (std::size_t r = 0; r < 2; ++r) {
    CHECK(out(r, 0) == 0.0);
    CHECK(out(r, 1) == 0.25);
    CHECK(out(r, 2) == 0.5);
  }
}

TEST_CASE("bce with logits matches the textbook formula") {
  Tape tape;
  const Tensor logits = Tensor::Row({0.3, -2.0, 40.0});
  const Tensor y = Tensor::Row({1, 0, 0});
  const double loss = BceWithLogits(tape.Constant(logits), y).value().item();
  auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  const double expected =
      (-std::log(sig(0.3)) - std::log(1 - sig(-2.0)) + 40.0 + std::log1p(std::exp(-40.0))) / 3.0;
  CHECK(loss == doctest::Approx(expected).epsilon(1e-12));
}

}  // namespace
}  // namespace utde
