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

#include "utde/data/episode.hpp"

#include <algorithm>
#include <cmath>

namespace utde::data {
namespace {

std::string Describe(const std::string& message, std::size_t line, const std::string& field) {
  std::string out;
  if (line > 0) out += "line " + std::to_string(line) + ": ";
  if (!field.empty()) out += "field '" + field + "': ";
  return out + message;
}

}  // namespace

DataError::DataError(const std::string& message, std::size_t line, std::string field)
    : std::runtime_error(Describe(message, line, field)), line_(line), field_(std::move(field)) {}

void Validate(const Episode& e, const TaskSchema& schema, std::size_t line) {
  for (const TsObservation& o : e.ts) {
    if (o.feature >= schema.d_m) {
      throw DataError("feature index " + std::to_string(o.feature) + " >= d_m " +
                          std::to_string(schema.d_m),
                      line, "ts.f");
    }
    if (!std::isfinite(o.time) || o.time < 0.0) {
      throw DataError("observation time must be finite and >= 0", line, "ts.t");
    }
    if (!std::isfinite(o.value)) throw DataError("observation value must be finite", line, "ts.v");
  }
  if (e.notes.empty()) {
    throw DataError("episode '" + e.id + "' has no notes", line, "notes");
  }
  for (const NoteEvent& n : e.notes) {
    if (!std::isfinite(n.time) || n.time < 0.0) {
      throw DataError("note time must be finite and >= 0", line, "notes.t");
    }
    if (const auto* emb = std::get_if<NoteEmbedding>(&n.payload)) {
      if (emb->size() != schema.d_t) {
        throw SchemaError("note embedding width " + std::to_string(emb->size()) + " != d_t " +
                              std::to_string(schema.d_t),
                          line, "notes.emb");
      }
      if (!std::all_of(emb->begin(), emb->end(), [](double v) { return std::isfinite(v); })) {
        throw DataError("note embedding must be finite", line, "notes.emb");
      }
    }
  }
  if (e.label.size() != schema.label_width) {
    throw SchemaError("label width " + std::to_string(e.label.size()) + " != task width " +
                          std::to_string(schema.label_width),
                      line, "y");
  }
  for (int y : e.label) {
    if (y != 0 && y != 1) throw DataError("labels must be 0 or 1", line, "y");
  }
}

void SortNotes(Episode& e) {
  std::stable_sort(e.notes.begin(), e.notes.end(),
                   [](const NoteEvent& a, const NoteEvent& b) { return a.time < b.time; });
}

Episode TruncateNotes(Episode e, std::size_t k) {
  if (k == 0) throw std::invalid_argument("TruncateNotes: k must be >= 1");
  if (e.notes.size() <= k) return e;
  // Stable sort by time, so among equal times the later list position is
  // nearer the end and survives the cut.
  std::vector<std::size_t> order(e.notes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return e.notes[a].time < e.notes[b].time;
  });
  std::vector<bool> keep(e.notes.size(), false);
  for (std::size_t i = order.size() - k; i < order.size(); ++i) keep[order[i]] = true;
  std::vector<NoteEvent> kept;
  kept.reserve(k);
  for (std::size_t i = 0; i < e.notes.size(); ++i) {
    if (keep[i]) kept.push_back(std::move(e.notes[i]));
  }
  e.notes = std::move(kept);
  return e;
}

}  // namespace utde::data
