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

#include <string>
#include <string_view>

#include "utde/tensor/params.hpp"
#include "utde/tensor/tape.hpp"

// Gated fusion of the imputation embedding e_imp and the attention embedding
// e_attn:  z = g * e_imp + (1 - g) * e_attn,  g = sigmoid(MLP(e_imp ++ e_attn)).
namespace utde::gate {

// Granularity of g for an [a x d_h] pair of embeddings.
enum class GateLevel {
  kPatient,   // g is one scalar per episode
  kTemporal,  // g is [a x 1], shared across hidden units
  kHidden,    // g is [a x d_h]
};

GateLevel ParseGateLevel(std::string_view name);
std::string_view ToString(GateLevel level);

// MLP: [2 d_h] -> d_h (ReLU) -> {1 | d_h}, then sigmoid.
//   patient:  rows are mean-pooled first, so the MLP sees one [1 x 2 d_h] row.
//   temporal: the MLP runs per row with a single output unit.
//   hidden:   the MLP runs per row with d_h output units.
// The output bias starts at 0, so an untrained gate sits near 0.5.
struct GateParams {
  GateLevel level = GateLevel::kHidden;
  ParamId hidden_weight;
  ParamId hidden_bias;
  ParamId out_weight;
  ParamId out_bias;

  static GateParams Create(ParamStore& store, const Initializer& init, const std::string& prefix,
                           std::size_t d_h, GateLevel level);
};

// g with shape [1 x 1], [a x 1] or [a x d_h] according to the level.
Var Gate(Var e_imp, Var e_attn, const GateParams& params);

// Broadcasts g to [a x d_h] and mixes. g = 1 reproduces e_imp and g = 0
// reproduces e_attn bit-exactly; every entry stays between the two inputs.
Var UtdeEmbed(Var e_imp, Var e_attn, Var g);

}  // namespace utde::gate
