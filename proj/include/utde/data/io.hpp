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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "utde/data/episode.hpp"
#include "utde/data/normalize.hpp"

// Episode files are line-delimited JSON, one episode per line:
//
//   {"id": str,
//    "ts": [{"f": int, "t": float, "v": float}, ...],
//    "notes": [{"t": float, "text": str} | {"t": float, "emb": [float...]}, ...],
//    "y": [int, ...]}
//
// Stats files are a single JSON object:
//
//   {"min": [...], "max": [...], "global_mean": [...], "alpha_hours": float}
//
// Doubles are written in shortest round-trip form, so write-then-read is
// bit-exact.
namespace utde::data {

Episode ParseEpisode(std::string_view json_line, const TaskSchema& schema, std::size_t line = 0);
std::string SerializeEpisode(const Episode& e);

// Blank lines are skipped. Notes come back sorted by time.
std::vector<Episode> ReadEpisodes(std::istream& in, const TaskSchema& schema);
std::vector<Episode> LoadEpisodes(const std::filesystem::path& path, const TaskSchema& schema);

void WriteEpisodes(std::ostream& out, const std::vector<Episode>& episodes);
void SaveEpisodes(const std::filesystem::path& path, const std::vector<Episode>& episodes);

std::string SerializeStats(const NormalizationStats& stats);
NormalizationStats ParseStats(std::string_view json);
void SaveStats(const std::filesystem::path& path, const NormalizationStats& stats);
NormalizationStats LoadStats(const std::filesystem::path& path);

}  // namespace utde::data
