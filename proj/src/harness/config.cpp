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

#include "utde/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace utde::harness {
namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string CanonicalKey(std::string key) {
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  return key;
}

std::uint64_t ToUnsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double ToDouble(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

template <typename Fn>
auto Wrap(const std::string& key, Fn fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

std::string Num(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

TaskKind ParseTaskKind(std::string_view s) {
  if (s == "binary") return TaskKind::kBinary;
  if (s == "multilabel") return TaskKind::kMultiLabel;
  throw std::invalid_argument("unknown task '" + std::string(s) + "' (binary, multilabel)");
}

Modality ParseModality(std::string_view s) {
  if (s == "fused") return Modality::kFused;
  if (s == "ts") return Modality::kTimeSeries;
  if (s == "txt") return Modality::kNotes;
  throw std::invalid_argument("unknown modality '" + std::string(s) + "' (fused, ts, txt)");
}

TsEmbedding ParseTsEmbedding(std::string_view s) {
  if (s == "utde") return TsEmbedding::kUtde;
  if (s == "imputation") return TsEmbedding::kImputation;
  if (s == "mtand") return TsEmbedding::kMtand;
  throw std::invalid_argument("unknown ts embedding '" + std::string(s) +
                              "' (utde, imputation, mtand)");
}

std::string_view ToString(TaskKind v) { return v == TaskKind::kBinary ? "binary" : "multilabel"; }

std::string_view ToString(Modality v) {
  switch (v) {
    case Modality::kFused: return "fused";
    case Modality::kTimeSeries: return "ts";
    case Modality::kNotes: return "txt";
  }
  return "?";
}

std::string_view ToString(TsEmbedding v) {
  switch (v) {
    case TsEmbedding::kUtde: return "utde";
    case TsEmbedding::kImputation: return "imputation";
    case TsEmbedding::kMtand: return "mtand";
  }
  return "?";
}

void ModelConfig::Validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string(name) + " must be >= 1");
  };
  positive(grid_size, "alpha");
  positive(d_m, "d_m");
  positive(d_t, "d_t");
  positive(d_hidden, "d_hidden");
  positive(time_embeddings, "time_embeddings");
  positive(fusion_layers, "fusion_layers");
  positive(heads, "heads");
  positive(kernel_size, "kernel_size");
  positive(labels, "labels");
  if (d_timeembed < 2) throw ConfigError("d_timeembed must be >= 2");
  if (d_hidden % heads != 0) {
    throw ConfigError("heads (" + std::to_string(heads) + ") must divide d_hidden (" +
                      std::to_string(d_hidden) + ")");
  }
}

void RunConfig::Validate() const {
  model.Validate();
  if (task == TaskKind::kBinary && model.labels != 1) {
    throw ConfigError("binary task needs labels = 1");
  }
  if (task == TaskKind::kMultiLabel && model.labels < 2) {
    throw ConfigError("multilabel task needs labels >= 2");
  }
  if (!(alpha_hours > 0.0)) throw ConfigError("alpha_hours must be positive");
  if (max_notes == 0) throw ConfigError("max_notes must be >= 1");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (grad_clip < 0.0) throw ConfigError("grad_clip must be >= 0");
  if (!(pos_weight > 0.0)) throw ConfigError("pos_weight must be positive");
}

ConfigMap ParseConfigText(std::string_view text) {
  ConfigMap out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (Trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected 'key = value'");
    }
    out[CanonicalKey(Trim(std::string_view(line).substr(0, eq)))] =
        Trim(std::string_view(line).substr(eq + 1));
  }
  return out;
}

ConfigMap ReadConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfigText(buf.str());
}

void ApplyConfig(RunConfig& c, const ConfigMap& map) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto size = [](std::size_t& field) {
    return Setter([&field](const std::string& k, const std::string& v) {
      field = static_cast<std::size_t>(ToUnsigned(k, v));
    });
  };
  auto real = [](double& field) {
    return Setter([&field](const std::string& k, const std::string& v) { field = ToDouble(k, v); });
  };
  auto text = [](std::string& field) {
    return Setter([&field](const std::string&, const std::string& v) { field = v; });
  };
  ModelConfig& m = c.model;
  const std::map<std::string, Setter> setters = {
      {"task", [&](const std::string& k, const std::string& v) {
         c.task = Wrap(k, [&] { return ParseTaskKind(v); });
       }},
      {"labels", size(m.labels)},
      {"alpha", size(m.grid_size)},
      {"alpha_hours", real(c.alpha_hours)},
      {"d_m", size(m.d_m)},
      {"d_t", size(m.d_t)},
      {"d_hidden", size(m.d_hidden)},
      {"d_timeembed", size(m.d_timeembed)},
      {"time_embeddings", size(m.time_embeddings)},
      {"fusion_layers", size(m.fusion_layers)},
      {"heads", size(m.heads)},
      {"kernel_size", size(m.kernel_size)},
      {"gate_level", [&](const std::string& k, const std::string& v) {
         m.gate_level = Wrap(k, [&] { return gate::ParseGateLevel(v); });
       }},
      {"modality", [&](const std::string& k, const std::string& v) {
         m.modality = Wrap(k, [&] { return ParseModality(v); });
       }},
      {"ts_embed", [&](const std::string& k, const std::string& v) {
         m.ts_embed = Wrap(k, [&] { return ParseTsEmbedding(v); });
       }},
      {"text_irregularity", [&](const std::string& k, const std::string& v) {
         m.text_irregularity = ToBool(k, v);
       }},
      {"max_notes", size(c.max_notes)},
      {"text_seed", [&](const std::string& k, const std::string& v) { c.text_seed = ToUnsigned(k, v); }},
      {"batch_size", size(c.batch_size)},
      {"lr", real(c.lr)},
      {"epochs", size(c.epochs)},
      {"seed", [&](const std::string& k, const std::string& v) { c.seed = ToUnsigned(k, v); }},
      {"grad_clip", real(c.grad_clip)},
      {"pos_weight", real(c.pos_weight)},
      {"parallel", [&](const std::string& k, const std::string& v) { c.parallel = ToBool(k, v); }},
      {"train", text(c.train_path)},
      {"val", text(c.val_path)},
      {"test", text(c.test_path)},
      {"checkpoint", text(c.checkpoint_path)},
      {"log", text(c.log_path)},
  };
  for (const auto& [raw_key, value] : map) {
    const std::string key = CanonicalKey(raw_key);
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + raw_key + "'");
    it->second(key, value);
  }
}

RunConfig ConfigFromMap(const ConfigMap& map) {
  RunConfig c;
  ApplyConfig(c, map);
  return c;
}

ConfigMap ConfigToMap(const RunConfig& c) {
  const ModelConfig& m = c.model;
  ConfigMap out = {
      {"task", std::string(ToString(c.task))},
      {"labels", std::to_string(m.labels)},
      {"alpha", std::to_string(m.grid_size)},
      {"alpha_hours", Num(c.alpha_hours)},
      {"d_m", std::to_string(m.d_m)},
      {"d_t", std::to_string(m.d_t)},
      {"d_hidden", std::to_string(m.d_hidden)},
      {"d_timeembed", std::to_string(m.d_timeembed)},
      {"time_embeddings", std::to_string(m.time_embeddings)},
      {"fusion_layers", std::to_string(m.fusion_layers)},
      {"heads", std::to_string(m.heads)},
      {"kernel_size", std::to_string(m.kernel_size)},
      {"gate_level", std::string(gate::ToString(m.gate_level))},
      {"modality", std::string(ToString(m.modality))},
      {"ts_embed", std::string(ToString(m.ts_embed))},
      {"text_irregularity", m.text_irregularity ? "true" : "false"},
      {"max_notes", std::to_string(c.max_notes)},
      {"text_seed", std::to_string(c.text_seed)},
      {"batch_size", std::to_string(c.batch_size)},
      {"lr", Num(c.lr)},
      {"epochs", std::to_string(c.epochs)},
      {"grad_clip", Num(c.grad_clip)},
      {"pos_weight", Num(c.pos_weight)},
      {"parallel", c.parallel ? "true" : "false"},
      {"train", c.train_path},
      {"val", c.val_path},
      {"test", c.test_path},
      {"checkpoint", c.checkpoint_path},
      {"log", c.log_path},
  };
  if (c.seed) out["seed"] = std::to_string(*c.seed);
  return out;
}

}  // namespace utde::harness
