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
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace utde::data {

// Malformed input. `line` is 1-based (0 when not tied to a file line).
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& message, std::size_t line = 0, std::string field = {});

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// Input that parses but does not fit the declared task (e.g. label width).
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

struct TsObservation {
  std::size_t feature = 0;
  double time = 0.0;  // hours since admission; normalized to [0,1) by Normalize
  double value = 0.0;

  bool operator==(const TsObservation&) const = default;
};

using NoteEmbedding = std::vector<double>;
// Either raw note text or a precomputed embedding of width d_t.
using NotePayload = std::variant<std::string, NoteEmbedding>;

struct NoteEvent {
  double time = 0.0;
  NotePayload payload;

  bool operator==(const NoteEvent&) const = default;
};

struct Episode {
  std::string id;
  std::vector<TsObservation> ts;
  std::vector<NoteEvent> notes;  // sorted by time
  std::vector<int> label;

  bool operator==(const Episode&) const = default;
};

// Shape of the data a task expects.
struct TaskSchema {
  std::size_t d_m = 0;        // numeric features
  std::size_t d_t = 0;        // note embedding width (checked for "emb" payloads)
  std::size_t label_width = 1;
};

// Throws DataError / SchemaError when `e` breaks the schema: feature index out
// of range, negative or non-finite times, non-finite values, wrong embedding
// width, label width mismatch, labels outside {0,1}, no notes.
void Validate(const Episode& e, const TaskSchema& schema, std::size_t line = 0);

// Stable sort of notes by time (equal times keep input order).
void SortNotes(Episode& e);

// Keeps the k latest notes (ties at the cut: later list position wins),
// preserving order. k must be >= 1.
Episode TruncateNotes(Episode e, std::size_t k);

}  // namespace utde::data
