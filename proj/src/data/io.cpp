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

#include "utde/data/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace utde::data {
namespace {

using nlohmann::json;

const json& Field(const json& obj, const char* key, std::size_t line, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw DataError("missing field", line, path.empty() ? key : path + "." + key);
  }
  return obj.at(key);
}

double Number(const json& v, std::size_t line, const std::string& field) {
  if (!v.is_number()) throw DataError("expected a number", line, field);
  return v.get<double>();
}

std::vector<double> Numbers(const json& v, std::size_t line, const std::string& field) {
  if (!v.is_array()) throw DataError("expected an array of numbers", line, field);
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& x : v) out.push_back(Number(x, line, field));
  return out;
}

}  // namespace

Episode ParseEpisode(std::string_view json_line, const TaskSchema& schema, std::size_t line) {
  json doc;
  try {
    doc = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what(), line);
  }
  if (!doc.is_object()) throw DataError("record must be a JSON object", line);

  Episode e;
  const json& id = Field(doc, "id", line, "");
  if (!id.is_string()) throw DataError("expected a string", line, "id");
  e.id = id.get<std::string>();

  const json& ts = Field(doc, "ts", line, "");
  if (!ts.is_array()) throw DataError("expected an array", line, "ts");
  for (const json& o : ts) {
    const json& f = Field(o, "f", line, "ts");
    if (!f.is_number_integer() || f.get<long long>() < 0) {
      throw DataError("expected a non-negative integer", line, "ts.f");
    }
    e.ts.push_back(TsObservation{f.get<std::size_t>(), Number(Field(o, "t", line, "ts"), line, "ts.t"),
                                 Number(Field(o, "v", line, "ts"), line, "ts.v")});
  }

  const json& notes = Field(doc, "notes", line, "");
  if (!notes.is_array()) throw DataError("expected an array", line, "notes");
  for (const json& n : notes) {
    NoteEvent ev;
    ev.time = Number(Field(n, "t", line, "notes"), line, "notes.t");
    const bool has_text = n.contains("text"), has_emb = n.contains("emb");
    if (has_text == has_emb) {
      throw DataError("note needs exactly one of 'text' or 'emb'", line, "notes");
    }
    if (has_text) {
      if (!n.at("text").is_string()) throw DataError("expected a string", line, "notes.text");
      ev.payload = n.at("text").get<std::string>();
    } else {
      ev.payload = Numbers(n.at("emb"), line, "notes.emb");
    }
    e.notes.push_back(std::move(ev));
  }

  const json& y = Field(doc, "y", line, "");
  if (!y.is_array()) throw DataError("expected an array", line, "y");
  for (const json& v : y) {
    if (!v.is_number_integer()) throw DataError("expected integer labels", line, "y");
    e.label.push_back(v.get<int>());
  }

  SortNotes(e);
  Validate(e, schema, line);
  return e;
}

std::string SerializeEpisode(const Episode& e) {
  json doc;
  doc["id"] = e.id;
  json ts = json::array();
  for (const TsObservation& o : e.ts) ts.push_back({{"f", o.feature}, {"t", o.time}, {"v", o.value}});
  doc["ts"] = std::move(ts);
  json notes = json::array();
  for (const NoteEvent& n : e.notes) {
    json obj = {{"t", n.time}};
    if (const auto* text = std::get_if<std::string>(&n.payload)) {
      obj["text"] = *text;
    } else {
      obj["emb"] = std::get<NoteEmbedding>(n.payload);
    }
    notes.push_back(std::move(obj));
  }
  doc["notes"] = std::move(notes);
  doc["y"] = e.label;
  return doc.dump();
}

std::vector<Episode> ReadEpisodes(std::istream& in, const TaskSchema& schema) {
  std::vector<Episode> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(ParseEpisode(text, schema, line));
  }
  return out;
}

std::vector<Episode> LoadEpisodes(const std::filesystem::path& path, const TaskSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open episode file " + path.string());
  return ReadEpisodes(in, schema);
}

void WriteEpisodes(std::ostream& out, const std::vector<Episode>& episodes) {
  for (const Episode& e : episodes) out << SerializeEpisode(e) << '\n';
}

void SaveEpisodes(const std::filesystem::path& path, const std::vector<Episode>& episodes) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write episode file " + path.string());
  WriteEpisodes(out, episodes);
}

std::string SerializeStats(const NormalizationStats& stats) {
  json doc = {{"min", stats.min},
              {"max", stats.max},
              {"global_mean", stats.global_mean},
              {"alpha_hours", stats.alpha_hours}};
  return doc.dump();
}

NormalizationStats ParseStats(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid stats JSON: ") + e.what());
  }
  NormalizationStats s;
  s.min = Numbers(Field(doc, "min", 0, ""), 0, "min");
  s.max = Numbers(Field(doc, "max", 0, ""), 0, "max");
  s.global_mean = Numbers(Field(doc, "global_mean", 0, ""), 0, "global_mean");
  s.alpha_hours = Number(Field(doc, "alpha_hours", 0, ""), 0, "alpha_hours");
  if (s.max.size() != s.min.size() || s.global_mean.size() != s.min.size()) {
    throw SchemaError("stats arrays differ in length");
  }
  return s;
}

void SaveStats(const std::filesystem::path& path, const NormalizationStats& stats) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write stats file " + path.string());
  out << SerializeStats(stats) << '\n';
}

NormalizationStats LoadStats(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stats file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseStats(buf.str());
}

}  // namespace utde::data
