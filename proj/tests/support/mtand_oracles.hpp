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

// Loop references for Time2Vec and single-head time attention.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "utde/mtand/mtand.hpp"

namespace utde::testing {

// Scalar oracle of one Time2Vec entry.
inline double Time2VecEntry(const ParamStore& store, const mtand::Time2VecParams& p, double t, std::size_t i) {
  const double x = store.value(p.frequency)[i] * t + store.value(p.phase)[i];
  return i == 0 ? x : std::sin(x);
}

// Direct score / softmax / weighted-sum oracle for one head.
inline Tensor TimeAttentionOracle(const ParamStore& store, const mtand::Time2VecParams& t2v,
                            const mtand::AttentionHeadParams& head, const std::vector<double>& grid,
                            std::span<const double> keys, std::span<const double> values,
                            std::size_t channels) {
  const std::size_t d = t2v.dim;
  const Tensor& wq = store.value(head.query);
  const Tensor& wk = store.value(head.key);
  auto project = [&](double t, const Tensor& w) {
    std::vector<double> out(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t i = 0; i < d; ++i) out[j] += Time2VecEntry(store, t2v, t, i) * w[i * d + j];
    }
    return out;
  };
  Tensor out = Tensor::Matrix(grid.size(), channels);
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const std::vector<double> q = project(grid[a], wq);
    std::vector<double> s(keys.size());
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const std::vector<double> kv = project(keys[k], wk);
      for (std::size_t j = 0; j < d; ++j) s[k] += q[j] * kv[j];
      s[k] /= std::sqrt(static_cast<double>(d));
    }
    const double m = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (double& v : s) z += (v = std::exp(v - m));
    for (std::size_t k = 0; k < keys.size(); ++k) {
      for (std::size_t c = 0; c < channels; ++c) out(a, c) += s[k] / z * values[k * channels + c];
    }
  }
  return out;
}

}  // namespace utde::testing
