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

#include <cstddef>
#include <deque>
#include <functional>
#include <vector>

#include "utde/tensor/params.hpp"
#include "utde/tensor/tensor.hpp"

namespace utde {

class Tape;

// Handle to a node recorded on a Tape. Cheap to copy; only valid while the
// owning tape is alive. References returned by value() stay valid for the
// lifetime of the tape.
class Var {
 public:
  Var() = default;

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Define-by-run reverse-mode differentiation.
//
// Nodes are appended in execution order, so the inputs of node k always have
// ids smaller than k and a single reverse sweep visits every node once. A tape
// is rebuilt for every forward pass and is confined to one thread; the
// ParamStore it reads from may be shared read-only across tapes.
class Tape {
 public:
  // Called during Backward with the tape and the id of the node whose output
  // gradient is complete. Implementations push contributions into their
  // inputs through AccumulateGrad.
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  explicit Tape(const ParamStore* params = nullptr) : params_(params) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf that never receives a gradient.
  Var Constant(Tensor value);
  // Differentiable leaf that is not a model parameter (e.g. for gradient checks).
  Var Input(Tensor value);
  // Leaf bound to a parameter of the attached store. Repeated requests for the
  // same parameter return the same node, so every use accumulates into one
  // gradient.
  Var Param(ParamId id);

  // Appends an op node. When no input requires a gradient the backward
  // function is dropped and the node is treated as a constant.
  Var Record(Tensor value, std::vector<std::size_t> inputs, BackwardFn backward);

  const Tensor& value(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  const std::vector<std::size_t>& inputs(std::size_t id) const { return nodes_[id].inputs; }

  // Gradient of the last Backward() target w.r.t. node `id`; zeros if the node
  // did not contribute.
  Tensor grad(std::size_t id) const;
  Tensor grad(Var v) const { return grad(v.id()); }

  // Adds `g` into the gradient buffer of node `id` (allocated on first use).
  // No-op for nodes that do not require a gradient.
  void AccumulateGrad(std::size_t id, const Tensor& g);
  // Mutable gradient buffer of a node that requires a gradient.
  Tensor& GradBuffer(std::size_t id);
  // Gradient flowing into node `id` during its backward call.
  const Tensor& upstream(std::size_t id) const { return nodes_[id].grad; }

  // Reverse sweep from a scalar node. Throws DimensionError for non-scalar
  // losses. Clears gradients from any previous sweep first.
  void Backward(Var loss);

  // Adds parameter gradients from the last sweep into `out` (indexed like the
  // attached ParamStore). Unused parameters are left untouched.
  void AccumulateParamGrads(Gradients& out) const;

  std::size_t size() const { return nodes_.size(); }
  const ParamStore* params() const { return params_; }

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;  // parameter values are not copied
    Tensor grad;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    bool requires_grad = false;
    std::ptrdiff_t param_index = -1;
  };

  Var Push(Node node);

  const ParamStore* params_;
  std::deque<Node> nodes_;  // deque: values stay put as nodes are appended
  std::vector<std::ptrdiff_t> param_nodes_;
};

inline const Tensor& Var::value() const { return tape_->value(id_); }

}  // namespace utde
