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

#include "utde/mtand/mtand.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "utde/tensor/ops.hpp"

namespace utde::mtand {
namespace {

Tensor ColumnOf(std::span<const double> v) { return Tensor::Column({v.begin(), v.end()}); }

}  // namespace

std::shared_ptr<const Time2VecBank> Time2VecBank::Create(ParamStore& store,
                                                         const Initializer& init,
                                                         const std::string& prefix,
                                                         std::size_t heads, std::size_t dim) {
  if (heads == 0) throw std::invalid_argument("Time2VecBank: need at least one head");
  if (dim < 2) throw std::invalid_argument("Time2VecBank: d_v must be >= 2");
  auto bank = std::make_shared<Time2VecBank>();
  bank->dim_ = dim;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (std::size_t v = 0; v < heads; ++v) {
    const std::string base = prefix + "." + std::to_string(v);
    Tensor freq = init.Uniform(base + ".frequency", {1, dim}, kTwoPi * 1.0, kTwoPi * 10.0);
    freq[0] = 1.0;
    Tensor phase = init.Uniform(base + ".phase", {1, dim}, 0.0, kTwoPi);
    bank->heads_.push_back(Time2VecParams{store.Add(base + ".frequency", std::move(freq)),
                                          store.Add(base + ".phase", std::move(phase)), dim});
  }
  return bank;
}

Var Time2Vec(Var times, const Time2VecParams& params) {
  Tape& tape = times.tape();
  if (times.cols() != 1) throw DimensionError("Time2Vec: times must be a column");
  Var linear = AddBias(MatMul(times, tape.Param(params.frequency)), tape.Param(params.phase));
  const Var parts[] = {SliceCols(linear, 0, 1), Sin(SliceCols(linear, 1, params.dim - 1))};
  return ConcatCols(parts);
}

Var TimeScores(Tape& tape, const tde::ReferenceGrid& grid, std::span<const double> key_times,
               const Time2VecParams& time2vec, const AttentionHeadParams& head) {
  Var query = MatMul(Time2Vec(tape.Constant(ColumnOf(grid.points())), time2vec),
                     tape.Param(head.query));
  Var key = MatMul(Time2Vec(tape.Constant(ColumnOf(key_times)), time2vec), tape.Param(head.key));
  return ScaleBy(MatMul(query, Transpose(key)),
                 1.0 / std::sqrt(static_cast<double>(time2vec.dim)));
}

Var TimeAttention(Tape& tape, const tde::ReferenceGrid& grid, std::span<const double> key_times,
                  std::span<const double> values, std::size_t channels,
                  const Time2VecParams& time2vec, const AttentionHeadParams& head) {
  if (channels == 0) throw DimensionError("TimeAttention: channels must be >= 1");
  if (values.size() != key_times.size() * channels) {
    throw DimensionError("TimeAttention: " + std::to_string(values.size()) +
                         " values for " + std::to_string(key_times.size()) + " keys x " +
                         std::to_string(channels) + " channels");
  }
  if (key_times.empty()) return tape.Constant(Tensor::Matrix(grid.size(), channels));
  Var weights = Softmax(TimeScores(tape, grid, key_times, time2vec, head));
  Var vals = tape.Constant(Tensor({key_times.size(), channels}, {values.begin(), values.end()}));
  return ConvexCombine(weights, vals);
}

std::size_t FeatureSeries::EmptyFeatures() const {
  std::size_t n = 0;
  for (std::size_t j = 0; j + 1 < offsets.size(); ++j) n += offsets[j] == offsets[j + 1];
  return n;
}

FeatureSeries GroupByFeature(const data::Episode& episode, std::size_t d_m) {
  FeatureSeries s;
  s.offsets.assign(d_m + 1, 0);
  for (const data::TsObservation& o : episode.ts) {
    if (o.feature >= d_m) throw data::DataError("feature index out of range", 0, "ts.f");
    ++s.offsets[o.feature + 1];
  }
  for (std::size_t j = 0; j < d_m; ++j) s.offsets[j + 1] += s.offsets[j];
  std::vector<std::size_t> cursor(s.offsets.begin(), s.offsets.end() - 1);
  s.times.resize(episode.ts.size());
  s.values.resize(episode.ts.size());
  for (const data::TsObservation& o : episode.ts) {
    const std::size_t at = cursor[o.feature]++;
    s.times[at] = o.time;
    s.values[at] = o.value;
  }
  return s;
}

MtandEncoder MtandEncoder::Create(ParamStore& store, const Initializer& init,
                                  const std::string& prefix,
                                  std::shared_ptr<const Time2VecBank> bank, std::size_t d_in,
                                  std::size_t d_h) {
  if (!bank) throw std::invalid_argument("MtandEncoder: missing Time2Vec bank");
  MtandEncoder enc;
  enc.d_in_ = d_in;
  const std::size_t d_v = bank->dim();
  for (std::size_t v = 0; v < bank->size(); ++v) {
    const std::string base = prefix + ".head" + std::to_string(v);
    enc.heads_.push_back(AttentionHeadParams{
        store.Add(base + ".query", init.Glorot(base + ".query", d_v, d_v)),
        store.Add(base + ".key", init.Glorot(base + ".key", d_v, d_v))});
  }
  const std::size_t concat = bank->size() * d_in;
  enc.out_weight_ = store.Add(prefix + ".out.weight", init.Glorot(prefix + ".out.weight", concat, d_h));
  enc.out_bias_ = store.Add(prefix + ".out.bias", Initializer::Zeros({1, d_h}));
  enc.bank_ = std::move(bank);
  return enc;
}

Var MtandEncoder::InterpolateSeries(Tape& tape, const tde::ReferenceGrid& grid,
                                    const FeatureSeries& series) const {
  if (series.features() != d_in_) {
    throw DimensionError("MtandEncoder: series has " + std::to_string(series.features()) +
                         " features, encoder expects " + std::to_string(d_in_));
  }
  std::vector<Var> per_head;
  per_head.reserve(heads_.size());
  for (std::size_t v = 0; v < heads_.size(); ++v) {
    if (series.times.empty()) {
      per_head.push_back(tape.Constant(Tensor::Matrix(grid.size(), d_in_)));
      continue;
    }
    // Scores depend only on (query time, key time), so one score matrix over
    // all observations serves every feature; the softmax runs per feature.
    Var scores = TimeScores(tape, grid, series.times, bank_->heads()[v], heads_[v]);
    per_head.push_back(SegmentAttention(scores, series.offsets, series.values));
  }
  return ConcatCols(per_head);
}

Var MtandEncoder::EmbedSeries(Tape& tape, const tde::ReferenceGrid& grid,
                              const FeatureSeries& series) const {
  return Project(tape, InterpolateSeries(tape, grid, series));
}

Var MtandEncoder::InterpolateNotes(Tape& tape, const tde::ReferenceGrid& grid,
                                   std::span<const double> note_embeddings,
                                   std::span<const double> note_times) const {
  if (note_times.empty()) {
    throw data::DataError("note interpolation needs at least one note", 0, "notes");
  }
  std::vector<Var> per_head;
  per_head.reserve(heads_.size());
  for (std::size_t v = 0; v < heads_.size(); ++v) {
    per_head.push_back(TimeAttention(tape, grid, note_times, note_embeddings, d_in_,
                                     bank_->heads()[v], heads_[v]));
  }
  return ConcatCols(per_head);
}

Var MtandEncoder::EmbedNotes(Tape& tape, const tde::ReferenceGrid& grid,
                             std::span<const double> note_embeddings,
                             std::span<const double> note_times) const {
  return Project(tape, InterpolateNotes(tape, grid, note_embeddings, note_times));
}

Var MtandEncoder::Project(Tape& tape, Var interpolated) const {
  return AddBias(MatMul(interpolated, tape.Param(out_weight_)), tape.Param(out_bias_));
}

}  // namespace utde::mtand
