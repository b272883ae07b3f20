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

#include <cstdint>

#include "utde/tensor/params.hpp"

namespace utde {

struct AdamOptions {
  double lr = 4e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Moment estimates for every parameter of one store.
struct AdamState {
  AdamState(const ParamStore& params, AdamOptions options);

  AdamOptions options;
  Gradients first_moment;
  Gradients second_moment;
  std::int64_t step_count = 0;
};

// One bias-corrected Adam update of every parameter in `params`.
void AdamStep(ParamStore& params, const Gradients& grads, AdamState& state);

}  // namespace utde
