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

#include "utde/data/normalize.hpp"

#include <algorithm>
#include <limits>

namespace utde::data {
namespace {

void Window(Episode& e, double alpha_hours) {
  std::erase_if(e.ts, [&](const TsObservation& o) { return o.time >= alpha_hours; });
  std::erase_if(e.notes, [&](const NoteEvent& n) { return n.time >= alpha_hours; });
}

}  // namespace

NormalizationStats ComputeStats(const std::vector<Episode>& train, std::size_t d_m,
                                double alpha_hours) {
  NormalizationStats stats;
  stats.alpha_hours = alpha_hours;
  stats.min.assign(d_m, std::numeric_limits<double>::infinity());
  stats.max.assign(d_m, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> count(d_m, 0);
  for (const Episode& e : train) {
    for (const TsObservation& o : e.ts) {
      if (o.time >= alpha_hours) continue;
      stats.min[o.feature] = std::min(stats.min[o.feature], o.value);
      stats.max[o.feature] = std::max(stats.max[o.feature], o.value);
      ++count[o.feature];
    }
  }
  for (std::size_t f = 0; f < d_m; ++f) {
    if (count[f] == 0) stats.min[f] = stats.max[f] = 0.0;
  }
  std::vector<double> sum(d_m, 0.0);
  for (const Episode& e : train) {
    for (const TsObservation& o : e.ts) {
      if (o.time >= alpha_hours) continue;
      sum[o.feature] += RescaleValue(stats, o.feature, o.value);
    }
  }
  stats.global_mean.resize(d_m);
  for (std::size_t f = 0; f < d_m; ++f) {
    stats.global_mean[f] = count[f] ? sum[f] / static_cast<double>(count[f]) : 0.5;
  }
  return stats;
}

double RescaleValue(const NormalizationStats& stats, std::size_t feature, double value) {
  const double lo = stats.min[feature], hi = stats.max[feature];
  if (!(hi > lo)) return 0.5;
  return std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
}

std::pair<std::vector<Episode>, NormalizationStats> Normalize(
    std::vector<Episode> episodes, std::optional<NormalizationStats> stats, std::size_t d_m,
    double alpha_hours) {
  if (stats && stats->features() != d_m) {
    throw SchemaError("normalization stats cover " + std::to_string(stats->features()) +
                      " features, task has " + std::to_string(d_m));
  }
  const double horizon = stats ? stats->alpha_hours : alpha_hours;
  if (!(horizon > 0.0)) throw DataError("alpha_hours must be positive");
  for (Episode& e : episodes) Window(e, horizon);
  // Patients with no note inside the window are removed.
  std::erase_if(episodes, [](const Episode& e) { return e.notes.empty(); });
  NormalizationStats used = stats ? *stats : ComputeStats(episodes, d_m, horizon);
  for (Episode& e : episodes) {
    for (TsObservation& o : e.ts) {
      o.value = RescaleValue(used, o.feature, o.value);
      o.time /= horizon;
    }
    for (NoteEvent& n : e.notes) n.time /= horizon;
  }
  return {std::move(episodes), std::move(used)};
}

}  // namespace utde::data
