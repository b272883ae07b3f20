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

#include <optional>
#include <utility>
#include <vector>

#include "utde/data/episode.hpp"

namespace utde::data {

// Per-feature rescaling statistics, always computed on the training split.
// `min`/`max` are raw units; `global_mean` is the mean observed value after
// rescaling to [0,1] and is the imputation fallback for leading gaps.
struct NormalizationStats {
  std::vector<double> min;
  std::vector<double> max;
  std::vector<double> global_mean;
  double alpha_hours = 48.0;

  std::size_t features() const { return min.size(); }
  bool operator==(const NormalizationStats&) const = default;
};

// Statistics over every observation in `train`. Features never observed get
// min = max = 0 and a global mean of 0.5.
NormalizationStats ComputeStats(const std::vector<Episode>& train, std::size_t d_m,
                                double alpha_hours);

// Maps one raw value of `feature` into [0,1]: (v - min) / (max - min),
// clipped; constant features map to 0.5.
double RescaleValue(const NormalizationStats& stats, std::size_t feature, double value);

// Rescales values and times. Observations and notes at or after alpha_hours
// fall outside the prediction window and are dropped. When `stats` is empty
// the episodes are treated as the training split and statistics are computed
// from them; otherwise the given statistics are applied unchanged.
std::pair<std::vector<Episode>, NormalizationStats> Normalize(
    std::vector<Episode> episodes, std::optional<NormalizationStats> stats, std::size_t d_m,
    double alpha_hours);

}  // namespace utde::data
