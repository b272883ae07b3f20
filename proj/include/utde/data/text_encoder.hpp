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

#include <cstdint>
#include <string_view>
#include <vector>

#include "utde/data/episode.hpp"

namespace utde::data {

// Bucket a lowercase token falls into for the given width and seed.
std::size_t TokenBucket(std::string_view token, std::size_t d_t, std::uint64_t seed);

// Hashed bag of words: lowercase whitespace tokens are counted into d_t
// buckets and the count vector is L2-normalized. Empty text gives zeros.
// Requires d_t >= 8.
std::vector<double> ToyTextEncode(std::string_view text, std::size_t d_t, std::uint64_t seed);

// Embedding of a note: the payload itself, or ToyTextEncode of its text.
std::vector<double> EmbedNote(const NoteEvent& note, std::size_t d_t, std::uint64_t seed);

}  // namespace utde::data
