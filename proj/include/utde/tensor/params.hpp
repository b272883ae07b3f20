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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "utde/tensor/tensor.hpp"

namespace utde {

struct ParamId {
  std::size_t index = 0;
  auto operator<=>(const ParamId&) const = default;
};

// One gradient tensor per parameter, aligned with ParamStore indices.
using Gradients = std::vector<Tensor>;

// Adds `g` into `acc` entry by entry. Both must come from the same store.
void Accumulate(Gradients& acc, const Gradients& g);
void Scale(Gradients& g, double factor);
double GlobalNorm(const Gradients& g);

// Ordered, named collection of trainable tensors.
class ParamStore {
 public:
  // Throws std::invalid_argument on a duplicate name.
  ParamId Add(std::string name, Tensor init);

  std::optional<ParamId> Find(std::string_view name) const;

  const Tensor& value(ParamId id) const { return values_.at(id.index); }
  Tensor& value(ParamId id) { return values_.at(id.index); }
  const std::string& name(ParamId id) const { return names_.at(id.index); }

  std::size_t size() const { return values_.size(); }
  std::size_t ScalarCount() const;

  Gradients ZeroGradients() const;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Deterministic parameter initialization. Each tensor draws from its own
// generator, seeded from (seed, parameter name), so the values a parameter
// receives do not depend on which other parameters exist or the order in
// which they were created.
class Initializer {
 public:
  explicit Initializer(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Glorot/Xavier uniform over [fan_in x fan_out].
  Tensor Glorot(std::string_view name, std::size_t fan_in, std::size_t fan_out) const;
  Tensor Uniform(std::string_view name, const Shape& shape, double lo, double hi) const;
  static Tensor Zeros(const Shape& shape) { return Tensor(shape, 0.0); }
  static Tensor Ones(const Shape& shape) { return Tensor(shape, 1.0); }

 private:
  std::uint64_t seed_;
};

// splitmix64 finalizer; used to derive independent seeds.
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);
std::uint64_t HashString(std::string_view s);

}  // namespace utde
