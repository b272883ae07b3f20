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

#include "utde/gate/gate.hpp"

#include <stdexcept>

#include "utde/tensor/ops.hpp"

namespace utde::gate {

GateLevel ParseGateLevel(std::string_view name) {
  if (name == "patient") return GateLevel::kPatient;
  if (name == "temporal") return GateLevel::kTemporal;
  if (name == "hidden") return GateLevel::kHidden;
  throw std::invalid_argument("unknown gate level '" + std::string(name) +
                              "' (expected patient, temporal or hidden)");
}

std::string_view ToString(GateLevel level) {
  switch (level) {
    case GateLevel::kPatient: return "patient";
    case GateLevel::kTemporal: return "temporal";
    case GateLevel::kHidden: return "hidden";
  }
  return "?";
}

GateParams GateParams::Create(ParamStore& store, const Initializer& init,
                              const std::string& prefix, std::size_t d_h, GateLevel level) {
  const std::size_t out = level == GateLevel::kHidden ? d_h : 1;
  GateParams p;
  p.level = level;
  p.hidden_weight = store.Add(prefix + ".hidden.weight",
                              init.Glorot(prefix + ".hidden.weight", 2 * d_h, d_h));
  p.hidden_bias = store.Add(prefix + ".hidden.bias", Initializer::Zeros({1, d_h}));
  p.out_weight = store.Add(prefix + ".out.weight", init.Glorot(prefix + ".out.weight", d_h, out));
  p.out_bias = store.Add(prefix + ".out.bias", Initializer::Zeros({1, out}));
  return p;
}

Var Gate(Var e_imp, Var e_attn, const GateParams& params) {
  if (!e_imp.value().SameShape(e_attn.value())) {
    throw DimensionError("Gate: e_imp " + ShapeString(e_imp.value().shape()) + " vs e_attn " +
                         ShapeString(e_attn.value().shape()));
  }
  Tape& tape = e_imp.tape();
  const Var parts[] = {e_imp, e_attn};
  Var features = ConcatCols(parts);
  if (params.level == GateLevel::kPatient) features = MeanOverRows(features);
  Var hidden = Relu(AddBias(MatMul(features, tape.Param(params.hidden_weight)),
                            tape.Param(params.hidden_bias)));
  Var logits = AddBias(MatMul(hidden, tape.Param(params.out_weight)), tape.Param(params.out_bias));
  return Sigmoid(logits);
}

Var UtdeEmbed(Var e_imp, Var e_attn, Var g) {
  const std::size_t rows = e_imp.rows(), cols = e_imp.cols();
  return GatedMix(BroadcastTo(g, rows, cols), e_imp, e_attn);
}

}  // namespace utde::gate
