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

#include "utde/tensor/params.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace utde {

void Accumulate(Gradients& acc, const Gradients& g) {
  if (acc.size() != g.size()) throw DimensionError("gradient sets differ in length");
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
}

void Scale(Gradients& g, double factor) {
  for (Tensor& t : g) {
    for (double& v : t.values()) v *= factor;
  }
}

double GlobalNorm(const Gradients& g) {
  double sq = 0.0;
  for (const Tensor& t : g) {
    for (double v : t.values()) sq += v * v;
  }
  return std::sqrt(sq);
}

ParamId ParamStore::Add(std::string name, Tensor init) {
  if (index_.contains(name)) {
    throw std::invalid_argument("duplicate parameter name: " + name);
  }
  const std::size_t idx = values_.size();
  index_.emplace(name, idx);
  names_.push_back(std::move(name));
  values_.push_back(std::move(init));
  return ParamId{idx};
}

std::optional<ParamId> ParamStore::Find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return ParamId{it->second};
}

std::size_t ParamStore::ScalarCount() const {
  std::size_t n = 0;
  for (const Tensor& t : values_) n += t.size();
  return n;
}

Gradients ParamStore::ZeroGradients() const {
  Gradients g;
  g.reserve(values_.size());
  for (const Tensor& t : values_) g.emplace_back(t.shape(), 0.0);
  return g;
}

std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t HashString(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

Tensor Initializer::Glorot(std::string_view name, std::size_t fan_in,
                           std::size_t fan_out) const {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return Uniform(name, {fan_in, fan_out}, -limit, limit);
}

Tensor Initializer::Uniform(std::string_view name, const Shape& shape, double lo,
                            double hi) const {
  std::mt19937_64 rng(MixSeed(seed_, HashString(name)));
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t(shape);
  for (double& v : t.values()) v = dist(rng);
  return t;
}

}  // namespace utde
