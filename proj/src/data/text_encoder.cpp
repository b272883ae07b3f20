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

#include "utde/data/text_encoder.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "utde/tensor/params.hpp"

namespace utde::data {

std::size_t TokenBucket(std::string_view token, std::size_t d_t, std::uint64_t seed) {
  return static_cast<std::size_t>(MixSeed(seed, HashString(token)) % d_t);
}

std::vector<double> ToyTextEncode(std::string_view text, std::size_t d_t, std::uint64_t seed) {
  if (d_t < 8) throw std::invalid_argument("ToyTextEncode: d_t must be >= 8");
  std::vector<double> counts(d_t, 0.0);
  std::string lowered(text);
  for (char& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::istringstream tokens(lowered);
  std::string token;
  while (tokens >> token) counts[TokenBucket(token, d_t, seed)] += 1.0;
  double norm = 0.0;
  for (double c : counts) norm += c * c;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& c : counts) c /= norm;
  }
  return counts;
}

std::vector<double> EmbedNote(const NoteEvent& note, std::size_t d_t, std::uint64_t seed) {
  if (const auto* text = std::get_if<std::string>(&note.payload)) {
    return ToyTextEncode(*text, d_t, seed);
  }
  const auto& emb = std::get<NoteEmbedding>(note.payload);
  if (emb.size() != d_t) throw SchemaError("note embedding width does not match d_t");
  return emb;
}

}  // namespace utde::data
