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

#include "utde/tensor/tape.hpp"

#include <stdexcept>

namespace utde {

Var Tape::Push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::Constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  return Push(std::move(n));
}

Var Tape::Input(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  return Push(std::move(n));
}

Var Tape::Param(ParamId id) {
  if (params_ == nullptr) throw std::logic_error("Tape::Param on a tape without a ParamStore");
  if (id.index >= params_->size()) throw std::out_of_range("Tape::Param: unknown parameter");
  if (param_nodes_.size() < params_->size()) param_nodes_.resize(params_->size(), -1);
  if (param_nodes_[id.index] >= 0) {
    return Var(this, static_cast<std::size_t>(param_nodes_[id.index]));
  }
  Node n;
  n.external = &params_->value(id);
  n.requires_grad = true;
  n.param_index = static_cast<std::ptrdiff_t>(id.index);
  Var v = Push(std::move(n));
  param_nodes_[id.index] = static_cast<std::ptrdiff_t>(v.id());
  return v;
}

Var Tape::Record(Tensor value, std::vector<std::size_t> inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (std::size_t in : inputs) {
    if (nodes_[in].requires_grad) {
      n.requires_grad = true;
      break;
    }
  }
  if (n.requires_grad) {
    n.inputs = std::move(inputs);
    n.backward = std::move(backward);
  }
  return Push(std::move(n));
}

const Tensor& Tape::value(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.external ? *n.external : n.value;
}

Tensor Tape::grad(std::size_t id) const {
  const Node& n = nodes_[id];
  if (n.grad.empty()) return Tensor(value(id).shape(), 0.0);
  return n.grad;
}

Tensor& Tape::GradBuffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Tensor(value(id).shape(), 0.0);
  return n.grad;
}

void Tape::AccumulateGrad(std::size_t id, const Tensor& g) {
  if (!nodes_[id].requires_grad) return;
  Tensor& buf = GradBuffer(id);
  RequireSameShape(buf, g, "gradient accumulation");
  for (std::size_t i = 0; i < g.size(); ++i) buf[i] += g[i];
}

void Tape::Backward(Var loss) {
  if (loss.tape_ != this) throw std::invalid_argument("Backward: loss belongs to another tape");
  if (value(loss.id()).size() != 1) {
    throw DimensionError("Backward: loss must be scalar, got shape " +
                         ShapeString(value(loss.id()).shape()));
  }
  for (Node& n : nodes_) n.grad = Tensor();
  if (!nodes_[loss.id()].requires_grad) return;
  GradBuffer(loss.id())[0] = 1.0;
  for (std::size_t k = loss.id() + 1; k-- > 0;) {
    Node& n = nodes_[k];
    if (n.grad.empty() || !n.backward) continue;
    n.backward(*this, k);
  }
}

void Tape::AccumulateParamGrads(Gradients& out) const {
  for (const Node& n : nodes_) {
    if (n.param_index < 0 || n.grad.empty()) continue;
    out.at(static_cast<std::size_t>(n.param_index)) += n.grad;
  }
}

}  // namespace utde
