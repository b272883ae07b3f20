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
#include <string>
#include <vector>

#include "utde/data/episode.hpp"
#include "utde/data/normalize.hpp"
#include "utde/tensor/params.hpp"
#include "utde/tensor/tape.hpp"
#include "utde/tensor/tensor.hpp"

namespace utde::tde {

// Regular query points [0, 1/a, ..., (a-1)/a] in normalized time. Point b
// stands for the bin [b/a, (b+1)/a).
class ReferenceGrid {
 public:
  explicit ReferenceGrid(std::size_t size);

  std::size_t size() const { return points_.size(); }
  const std::vector<double>& points() const { return points_; }
  // Bin of a normalized time in [0,1). Times within 1e-9 below a boundary
  // count as on it, so hour-aligned inputs do not drift into the earlier bin.
  std::size_t BinOf(double normalized_time) const;

 private:
  std::vector<double> points_;
};

struct DiscretizedSeries {
  Tensor values;                   // [a x d_m]; 0 where missing
  std::vector<bool> observed_mask; // row-major [a x d_m]

  bool observed(std::size_t bin, std::size_t feature) const {
    return observed_mask[bin * values.cols() + feature];
  }
};

// Latest observation per (bin, feature); equal timestamps resolve to the later
// list position. Requires a normalized episode; throws data::DataError for a
// time outside [0,1).
DiscretizedSeries Discretize(const data::Episode& episode, const ReferenceGrid& grid,
                             std::size_t d_m);

// Forward fill per feature; bins before the first observation take the
// feature's training global mean.
Tensor Impute(const DiscretizedSeries& series, const data::NormalizationStats& stats);

// Causal 1-D convolution over imputed rows: kernel [k x d_m x d_h], bias [1 x d_h].
struct ImputationEncoder {
  ParamId kernel;
  ParamId bias;
  std::size_t kernel_size = 1;

  static ImputationEncoder Create(ParamStore& store, const Initializer& init,
                                  const std::string& prefix, std::size_t d_m, std::size_t d_h,
                                  std::size_t kernel_size = 1);

  // Returns e_imp [a x d_h].
  Var Embed(Tape& tape, Var imputed) const;
};

}  // namespace utde::tde
