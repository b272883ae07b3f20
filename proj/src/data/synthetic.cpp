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

#include "utde/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "utde/tensor/params.hpp"

namespace utde::data {

SyntheticTask ParseSyntheticTask(std::string_view name) {
  if (name == "ts_only") return SyntheticTask::kTsOnly;
  if (name == "notes_only") return SyntheticTask::kNotesOnly;
  if (name == "xor_fusion") return SyntheticTask::kXorFusion;
  throw std::invalid_argument("unknown synthetic task '" + std::string(name) +
                              "' (expected ts_only, notes_only or xor_fusion)");
}

std::string_view ToString(SyntheticTask task) {
  switch (task) {
    case SyntheticTask::kTsOnly: return "ts_only";
    case SyntheticTask::kNotesOnly: return "notes_only";
    case SyntheticTask::kXorFusion: return "xor_fusion";
  }
  return "?";
}

double LatentSignal::At(double u) const {
  double x = offset + slope * u;
  for (std::size_t i = 0; i < amplitude.size(); ++i) {
    x += amplitude[i] * std::sin(2.0 * std::numbers::pi * frequency[i] * u + phase[i]);
  }
  return x;
}

double LatentSignal::EndWindowMean() const {
  const double a = kEndWindowStart, b = 1.0;
  double mean = offset + slope * 0.5 * (a + b);
  for (std::size_t i = 0; i < amplitude.size(); ++i) {
    const double w = 2.0 * std::numbers::pi * frequency[i];
    mean += amplitude[i] * (std::cos(w * a + phase[i]) - std::cos(w * b + phase[i])) / (w * (b - a));
  }
  return mean;
}

int CombineBits(SyntheticTask task, int ts_bit, int note_bit) {
  switch (task) {
    case SyntheticTask::kTsOnly: return ts_bit;
    case SyntheticTask::kNotesOnly: return note_bit;
    case SyntheticTask::kXorFusion: return ts_bit ^ note_bit;
  }
  return 0;
}

std::vector<SyntheticEpisode> GenerateSyntheticDetailed(const SyntheticConfig& config) {
  if (!(config.sparsity > 0.0 && config.sparsity <= 1.0)) {
    throw std::invalid_argument("sparsity must lie in (0, 1]");
  }
  if (config.n_episodes == 0) throw std::invalid_argument("n_episodes must be >= 1");
  if (config.d_m == 0 || config.designated_feature >= config.d_m) {
    throw std::invalid_argument("designated feature out of range");
  }
  if (config.designated_direction >= config.d_t) {
    throw std::invalid_argument("designated embedding direction out of range");
  }
  if (config.max_notes == 0) throw std::invalid_argument("max_notes must be >= 1");

  std::vector<SyntheticEpisode> out(config.n_episodes);
  for (std::size_t i = 0; i < config.n_episodes; ++i) {
    std::mt19937_64 rng(MixSeed(config.seed, i));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SyntheticEpisode& s = out[i];
    Episode& e = s.episode;
    e.id = "syn-" + std::to_string(config.seed) + "-" + std::to_string(i);

    s.latent.resize(config.d_m);
    for (LatentSignal& sig : s.latent) {
      sig.offset = normal(rng);
      sig.slope = normal(rng);
      for (std::size_t k = 0; k < 3; ++k) {
        sig.amplitude[k] = 0.5 * unit(rng);
        sig.frequency[k] = 1.0 + 2.0 * unit(rng);
        sig.phase[k] = 2.0 * std::numbers::pi * unit(rng);
      }
    }

    std::exponential_distribution<double> gap(config.obs_rate_per_hour);
    for (std::size_t f = 0; f < config.d_m; ++f) {
      for (double t = gap(rng); t < config.alpha_hours; t += gap(rng)) {
        if (unit(rng) >= config.sparsity) continue;
        const double value = s.latent[f].At(t / config.alpha_hours) + config.obs_noise * normal(rng);
        e.ts.push_back(TsObservation{f, t, value});
      }
    }
    std::stable_sort(e.ts.begin(), e.ts.end(),
                     [](const TsObservation& a, const TsObservation& b) { return a.time < b.time; });

    s.ts_bit = s.latent[config.designated_feature].EndWindowMean() > 0.0 ? 1 : 0;
    s.note_bit = unit(rng) < 0.5 ? 1 : 0;
    const double sign = s.note_bit ? 1.0 : -1.0;

    std::uniform_int_distribution<std::size_t> note_count(1, config.max_notes);
    const std::size_t n_notes = note_count(rng);
    for (std::size_t k = 0; k < n_notes; ++k) {
      NoteEvent note;
      note.time = config.alpha_hours * unit(rng);
      NoteEmbedding emb(config.d_t);
      for (double& v : emb) v = config.note_noise * normal(rng);
      emb[config.designated_direction] += sign * config.note_signal;
      note.payload = std::move(emb);
      e.notes.push_back(std::move(note));
    }
    SortNotes(e);
    e.label = {CombineBits(config.task, s.ts_bit, s.note_bit)};
  }
  return out;
}

std::vector<Episode> GenerateSynthetic(const SyntheticConfig& config) {
  std::vector<Episode> out;
  out.reserve(config.n_episodes);
  for (SyntheticEpisode& s : GenerateSyntheticDetailed(config)) out.push_back(std::move(s.episode));
  return out;
}

}  // namespace utde::data
