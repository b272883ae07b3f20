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

#include "utde/harness/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "utde/data/io.hpp"

namespace utde::harness {

using nlohmann::json;

Checkpoint MakeCheckpoint(const RunConfig& config, const data::NormalizationStats& stats,
                          const TrainResult& result) {
  return Checkpoint{config, stats, result.best_params, result.best_epoch, result.best_metric,
                    result.metric_name};
}

Model RestoreModel(const Checkpoint& checkpoint) {
  Model model(checkpoint.config.model, checkpoint.config.seed.value_or(0));
  model.LoadParams(checkpoint.params);
  return model;
}

std::string SerializeCheckpoint(const Checkpoint& c) {
  json params = json::array();
  for (std::size_t i = 0; i < c.params.size(); ++i) {
    const Tensor& t = c.params.value(ParamId{i});
    params.push_back({{"name", c.params.name(ParamId{i})},
                      {"shape", t.shape()},
                      {"data", std::vector<double>(t.values().begin(), t.values().end())}});
  }
  json doc = {{"format", "utde-checkpoint-1"},
              {"config", ConfigToMap(c.config)},
              {"stats", json::parse(data::SerializeStats(c.stats))},
              {"epoch", c.epoch},
              {"metric_name", c.metric_name},
              {"metric_value", c.metric_value},
              {"params", std::move(params)}};
  return doc.dump();
}

Checkpoint ParseCheckpoint(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw data::DataError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format") != "utde-checkpoint-1") {
      throw data::DataError("unsupported checkpoint format", 0, "format");
    }
    Checkpoint c;
    c.config = ConfigFromMap(doc.at("config").get<ConfigMap>());
    c.config.Validate();
    c.stats = data::ParseStats(doc.at("stats").dump());
    c.epoch = doc.at("epoch").get<std::size_t>();
    c.metric_name = doc.at("metric_name").get<std::string>();
    c.metric_value = doc.at("metric_value").get<double>();
    for (const json& p : doc.at("params")) {
      const Shape shape = p.at("shape").get<Shape>();
      std::vector<double> values = p.at("data").get<std::vector<double>>();
      c.params.Add(p.at("name").get<std::string>(), Tensor(shape, std::move(values)));
    }
    return c;
  } catch (const json::exception& e) {
    throw data::DataError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw data::DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << SerializeCheckpoint(checkpoint) << '\n';
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data::DataError("cannot open checkpoint " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseCheckpoint(buf.str());
}

}  // namespace utde::harness
