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

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "utde/data/episode.hpp"

// Synthetic irregular multimodal episodes with known ground truth.
//
// Each feature follows a latent signal over normalized time u in [0,1]:
//   x(u) = offset + slope * u + sum_i amplitude_i * sin(2 pi frequency_i u + phase_i)
// observed with Gaussian noise at the events of a Poisson process
// (rate `obs_rate_per_hour`) thinned by `sparsity`.
//
// The time-series bit is 1 when the designated feature's mean over the last
// quarter of the window is above its median. offset and slope are centred
// normals and each sinusoid has a uniform phase, so that window mean is
// symmetric about zero and its median is 0.
//
// The note bit is a fair coin written as +/- note_signal along one embedding
// direction of every note, on top of Gaussian noise.
namespace utde::data {

enum class SyntheticTask { kTsOnly, kNotesOnly, kXorFusion };

SyntheticTask ParseSyntheticTask(std::string_view name);
std::string_view ToString(SyntheticTask task);

struct SyntheticConfig {
  std::size_t n_episodes = 1000;
  std::size_t d_m = 4;
  std::size_t d_t = 16;
  double alpha_hours = 24.0;
  double sparsity = 0.3;
  SyntheticTask task = SyntheticTask::kTsOnly;
  std::uint64_t seed = 0;

  std::size_t max_notes = 6;
  double obs_rate_per_hour = 1.0;
  double obs_noise = 0.1;
  double note_signal = 1.0;
  double note_noise = 0.3;
  std::size_t designated_feature = 0;
  std::size_t designated_direction = 0;
};

inline constexpr double kEndWindowStart = 0.75;

struct LatentSignal {
  double offset = 0.0;
  double slope = 0.0;
  std::array<double, 3> amplitude{};
  std::array<double, 3> frequency{};  // cycles per window
  std::array<double, 3> phase{};

  double At(double u) const;
  // Closed-form mean of x(u) over [kEndWindowStart, 1].
  double EndWindowMean() const;
};

struct SyntheticEpisode {
  Episode episode;
  std::vector<LatentSignal> latent;  // one per feature
  int ts_bit = 0;
  int note_bit = 0;
};

int CombineBits(SyntheticTask task, int ts_bit, int note_bit);

// Deterministic in `config`; each episode draws from its own generator seeded
// from (seed, index).
std::vector<SyntheticEpisode> GenerateSyntheticDetailed(const SyntheticConfig& config);
std::vector<Episode> GenerateSynthetic(const SyntheticConfig& config);

}  // namespace utde::data
