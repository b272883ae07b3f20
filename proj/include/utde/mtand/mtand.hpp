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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "utde/data/episode.hpp"
#include "utde/tde/imputation.hpp"
#include "utde/tensor/params.hpp"
#include "utde/tensor/tape.hpp"

// Multi-time attention interpolation onto the reference grid.
//
// Each head v embeds query times (the grid) and key times (observation times)
// with its own Time2Vec, projects them with w^q_v / w^k_v, and attends with
// scaled dot-product scores. Values are the observations themselves, so each
// interpolated entry is a convex combination of observed values.
namespace utde::mtand {

// One Time2Vec: dim 0 is omega_0 * t + phi_0, dims 1.. are sin(omega_i * t + phi_i).
struct Time2VecParams {
  ParamId frequency;  // [1 x d_v]
  ParamId phase;      // [1 x d_v]
  std::size_t dim = 0;
};

// The V Time2Vec instances. One bank object is shared by the series and the
// note encoders; both hold the same pointer.
class Time2VecBank {
 public:
  // Periodic frequencies start uniform over 1..10 cycles per window, the
  // linear frequency at 1, phases uniform in [0, 2 pi).
  static std::shared_ptr<const Time2VecBank> Create(ParamStore& store, const Initializer& init,
                                                    const std::string& prefix, std::size_t heads,
                                                    std::size_t dim);

  const std::vector<Time2VecParams>& heads() const { return heads_; }
  std::size_t size() const { return heads_.size(); }
  std::size_t dim() const { return dim_; }

 private:
  std::vector<Time2VecParams> heads_;
  std::size_t dim_ = 0;
};

// times [l x 1] -> [l x d_v]
Var Time2Vec(Var times, const Time2VecParams& params);

struct AttentionHeadParams {
  ParamId query;  // [d_v x d_v]
  ParamId key;    // [d_v x d_v]
};

// Interpolates `values` (row-major [l x channels], observed at key_times) onto
// the grid. With no keys the result is all zeros.
Var TimeAttention(Tape& tape, const tde::ReferenceGrid& grid, std::span<const double> key_times,
                  std::span<const double> values, std::size_t channels,
                  const Time2VecParams& time2vec, const AttentionHeadParams& head);

// Attention scores [a x l] of one head, scaled by 1/sqrt(d_v).
Var TimeScores(Tape& tape, const tde::ReferenceGrid& grid, std::span<const double> key_times,
               const Time2VecParams& time2vec, const AttentionHeadParams& head);

// Observations regrouped by feature: entries [offsets[j], offsets[j+1]) of
// times/values belong to feature j, in input order.
struct FeatureSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<std::size_t> offsets;  // d_m + 1 entries

  std::size_t features() const { return offsets.size() - 1; }
  std::size_t EmptyFeatures() const;
};

FeatureSeries GroupByFeature(const data::Episode& episode, std::size_t d_m);

// Multi-head time attention followed by a linear projection to d_h. The
// series variant attends per feature over that feature's own observations; the
// note variant treats every embedding dimension as a series sharing the note
// times.
class MtandEncoder {
 public:
  static MtandEncoder Create(ParamStore& store, const Initializer& init, const std::string& prefix,
                             std::shared_ptr<const Time2VecBank> bank, std::size_t d_in,
                             std::size_t d_h);

  const std::shared_ptr<const Time2VecBank>& bank() const { return bank_; }
  std::size_t input_width() const { return d_in_; }
  const std::vector<AttentionHeadParams>& heads() const { return heads_; }
  ParamId out_weight() const { return out_weight_; }
  ParamId out_bias() const { return out_bias_; }

  // [a x V*d_m]: per-head interpolation matrices o_1 .. o_V side by side.
  // Features with no observations give zero columns.
  Var InterpolateSeries(Tape& tape, const tde::ReferenceGrid& grid,
                        const FeatureSeries& series) const;
  // e_attn [a x d_h]
  Var EmbedSeries(Tape& tape, const tde::ReferenceGrid& grid, const FeatureSeries& series) const;

  // note_embeddings row-major [l x d_t], l >= 1.
  Var InterpolateNotes(Tape& tape, const tde::ReferenceGrid& grid,
                       std::span<const double> note_embeddings,
                       std::span<const double> note_times) const;
  // z_txt [a x d_h]
  Var EmbedNotes(Tape& tape, const tde::ReferenceGrid& grid,
                 std::span<const double> note_embeddings,
                 std::span<const double> note_times) const;

  Var Project(Tape& tape, Var interpolated) const;

 private:
  std::shared_ptr<const Time2VecBank> bank_;
  std::vector<AttentionHeadParams> heads_;
  ParamId out_weight_;
  ParamId out_bias_;
  std::size_t d_in_ = 0;
};

}  // namespace utde::mtand
