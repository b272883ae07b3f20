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

#include "utde/tde/imputation.hpp"

#include <cmath>
#include <stdexcept>

#include "utde/tensor/ops.hpp"

namespace utde::tde {

ReferenceGrid::ReferenceGrid(std::size_t size) {
  if (size == 0) throw std::invalid_argument("ReferenceGrid: size must be >= 1");
  points_.resize(size);
  for (std::size_t b = 0; b < size; ++b) {
    points_[b] = static_cast<double>(b) / static_cast<double>(size);
  }
}

std::size_t ReferenceGrid::BinOf(double normalized_time) const {
  if (!(normalized_time >= 0.0 && normalized_time < 1.0)) {
    throw data::DataError("observation time " + std::to_string(normalized_time) +
                              " lies outside the normalized window [0, 1)",
                          0, "ts.t");
  }
  const double scaled = normalized_time * static_cast<double>(size()) + 1e-9;
  return std::min(static_cast<std::size_t>(std::floor(scaled)), size() - 1);
}

DiscretizedSeries Discretize(const data::Episode& episode, const ReferenceGrid& grid,
                             std::size_t d_m) {
  DiscretizedSeries out{Tensor::Matrix(grid.size(), d_m), std::vector<bool>(grid.size() * d_m)};
  // Time of the value currently held by each cell.
  std::vector<double> held(grid.size() * d_m, -1.0);
  for (const data::TsObservation& o : episode.ts) {
    if (o.feature >= d_m) throw data::DataError("feature index out of range", 0, "ts.f");
    const std::size_t cell = grid.BinOf(o.time) * d_m + o.feature;
    if (o.time >= held[cell]) {
      held[cell] = o.time;
      out.values[cell] = o.value;
      out.observed_mask[cell] = true;
    }
  }
  return out;
}

Tensor Impute(const DiscretizedSeries& series, const data::NormalizationStats& stats) {
  const std::size_t bins = series.values.rows(), d_m = series.values.cols();
  if (stats.global_mean.size() != d_m) {
    throw DimensionError("Impute: stats cover " + std::to_string(stats.global_mean.size()) +
                         " features, series has " + std::to_string(d_m));
  }
  Tensor out = series.values;
  for (std::size_t f = 0; f < d_m; ++f) {
    double last = stats.global_mean[f];
    for (std::size_t b = 0; b < bins; ++b) {
      if (series.observed(b, f)) {
        last = series.values(b, f);
      } else {
        out(b, f) = last;
      }
    }
  }
  return out;
}

ImputationEncoder ImputationEncoder::Create(ParamStore& store, const Initializer& init,
                                            const std::string& prefix, std::size_t d_m,
                                            std::size_t d_h, std::size_t kernel_size) {
  if (kernel_size == 0) throw std::invalid_argument("kernel size must be >= 1");
  const std::string kname = prefix + ".kernel";
  Tensor kernel = init.Glorot(kname, kernel_size * d_m, d_h);
  ImputationEncoder enc;
  enc.kernel = store.Add(kname, Tensor({kernel_size, d_m, d_h}, kernel.data()));
  enc.bias = store.Add(prefix + ".bias", Initializer::Zeros({1, d_h}));
  enc.kernel_size = kernel_size;
  return enc;
}

Var ImputationEncoder::Embed(Tape& tape, Var imputed) const {
  return CausalConv1d(imputed, tape.Param(kernel), tape.Param(bias));
}

}  // namespace utde::tde
