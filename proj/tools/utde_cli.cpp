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

// utde: generate synthetic data, train, evaluate, predict and run ablations.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
// failure, 1 anything else.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "utde/data/io.hpp"
#include "utde/data/synthetic.hpp"
#include "utde/harness/checkpoint.hpp"
#include "utde/harness/config.hpp"
#include "utde/harness/pipeline.hpp"
#include "utde/harness/trainer.hpp"
#include "utde/metrics/metrics.hpp"

namespace {

using namespace utde;
using namespace utde::harness;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

std::string Hyphenate(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

// Run configuration assembled from an optional file plus per-key flags.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> overrides;
  bool no_text_irregularity = false;

  void Register(CLI::App* app) {
    app->add_option("--config", config_file, "Flat key = value configuration file");
    for (const auto& [key, unused] : ConfigToMap(RunConfig{})) {
      (void)unused;
      std::string names = "--" + Hyphenate(key);
      if (Hyphenate(key) != key) names += ",--" + key;
      if (key == "seed") continue;
      app->add_option(names, overrides[key], "Override '" + key + "'");
    }
    app->add_option("--seed", overrides["seed"], "Random seed");
    app->add_flag("--no-text-irregularity", no_text_irregularity,
                  "Feed padded raw note embeddings instead of note time attention");
  }

  RunConfig Build() const {
    RunConfig c;
    if (!config_file.empty()) ApplyConfig(c, ReadConfigFile(config_file));
    ConfigMap set;
    for (const auto& [k, v] : overrides) {
      if (!v.empty()) set[k] = v;
    }
    ApplyConfig(c, set);
    if (no_text_irregularity) c.model.text_irregularity = false;
    c.Validate();
    return c;
  }
};

void PrintEpoch(const EpochRecord& r, const std::string& metric) {
  std::ostringstream out;
  out.precision(6);
  out << "epoch=" << r.epoch << " train_loss=" << r.train_loss << " val_" << metric << '='
      << r.val_metric << " val_auroc=" << r.val_report.auroc << " best_" << metric << '='
      << r.best_val_metric;
  std::cout << out.str() << std::endl;
}

void AppendLog(const std::string& path, const std::string& line) {
  if (path.empty()) return;
  std::ofstream log(path, std::ios::app);
  if (!log) throw std::runtime_error("cannot append to log " + path);
  log << line << '\n';
}

int RunGen(const data::SyntheticConfig& cfg, const std::string& out) {
  data::SaveEpisodes(out, data::GenerateSynthetic(cfg));
  std::cout << "wrote " << cfg.n_episodes << " episodes (" << data::ToString(cfg.task) << ") to "
            << out << '\n';
  return 0;
}

int RunTrain(const ConfigFlags& flags) {
  RunConfig config = flags.Build();
  if (!config.seed) throw ConfigError("--seed is required for train");
  if (config.checkpoint_path.empty()) config.checkpoint_path = "checkpoint.json";
  const PreparedSplits data = Prepare(config, LoadSplits(config));
  std::size_t empty = 0;
  for (const EncodedEpisode& e : data.train) empty += e.series.EmptyFeatures();
  std::cout << "train episodes=" << data.train.size() << " empty_feature_series=" << empty << " of "
            << data.train.size() * config.model.d_m << '\n';
  TrainOptions options = TrainOptions::FromConfig(config);
  const std::string metric = SelectionMetricName(config.model);
  options.on_epoch = [&](const EpochRecord& r) { PrintEpoch(r, metric); };
  const RunOutcome outcome = RunTraining(config, data, options);
  SaveCheckpoint(outcome.checkpoint, config.checkpoint_path);
  std::cout << "checkpoint=" << config.checkpoint_path << " epoch=" << outcome.checkpoint.epoch
            << ' ' << metric << '=' << outcome.checkpoint.metric_value << '\n';
  if (outcome.test) {
    const std::string line = outcome.test->ToKeyValue("split=test");
    std::cout << line << '\n';
    AppendLog(config.log_path, line);
  }
  return 0;
}

int RunEval(const std::string& checkpoint_path, const std::string& data_path,
            const std::string& log_path) {
  const Checkpoint ck = LoadCheckpoint(checkpoint_path);
  const Model model = RestoreModel(ck);
  const auto episodes = data::LoadEpisodes(data_path, SchemaFor(ck.config));
  const metrics::EvalReport report =
      EvaluateModel(model, PrepareForCheckpoint(ck, episodes), {}, ck.config.parallel);
  const std::string line = report.ToKeyValue("data=" + data_path);
  std::cout << line << '\n';
  AppendLog(log_path, line);
  return 0;
}

int RunPredict(const std::string& checkpoint_path, const std::string& data_path,
               const std::string& out_path) {
  const Checkpoint ck = LoadCheckpoint(checkpoint_path);
  const Model model = RestoreModel(ck);
  const auto episodes = PrepareForCheckpoint(ck, data::LoadEpisodes(data_path, SchemaFor(ck.config)));
  const std::vector<double> scores = PredictScores(model, episodes, {}, ck.config.parallel);
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write " + out_path);
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  const std::size_t labels = ck.config.model.labels;
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    nlohmann::json row = {{"id", episodes[i].id},
                          {"p", std::vector<double>(scores.begin() + static_cast<std::ptrdiff_t>(i * labels),
                                                    scores.begin() + static_cast<std::ptrdiff_t>((i + 1) * labels))}};
    out << row.dump() << '\n';
  }
  return 0;
}

int RunAblate(const ConfigFlags& flags, const std::vector<std::uint64_t>& seeds) {
  const RunConfig base = flags.Build();
  if (seeds.empty()) throw ConfigError("--seeds needs at least one seed");
  const Splits splits = LoadSplits(base);
  if (splits.test.empty()) throw ConfigError("ablate needs a test split (test)");
  for (TsEmbedding ts : {TsEmbedding::kUtde, TsEmbedding::kImputation, TsEmbedding::kMtand}) {
    for (bool irregular : {true, false}) {
      RunConfig config = base;
      config.model.ts_embed = ts;
      config.model.text_irregularity = irregular;
      const PreparedSplits data = Prepare(config, splits);
      std::vector<metrics::EvalReport> reports;
      for (std::uint64_t seed : seeds) {
        config.seed = seed;
        reports.push_back(*RunTraining(config, data, TrainOptions::FromConfig(config)).test);
      }
      std::ostringstream line;
      line.precision(4);
      line << std::fixed << "ts_embed=" << ToString(ts)
           << " text_irregularity=" << (irregular ? "on" : "off") << " seeds=" << seeds.size();
      for (const auto& [name, ms] : metrics::Aggregate(reports)) {
        line << ' ' << name << '=' << ms.mean << "+-" << ms.stddev;
      }
      std::cout << line.str() << std::endl;
      AppendLog(base.log_path, line.str());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UTDE irregular multimodal classifier"};
  app.require_subcommand(1);

  data::SyntheticConfig gen_cfg;
  std::string gen_task = "ts_only", gen_out;
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic dataset (JSONL)");
  gen->add_option("--task", gen_task, "ts_only, notes_only or xor_fusion");
  gen->add_option("--n", gen_cfg.n_episodes, "Number of episodes");
  gen->add_option("--d-m,--d_m", gen_cfg.d_m, "Numeric features");
  gen->add_option("--d-t,--d_t", gen_cfg.d_t, "Note embedding width");
  gen->add_option("--alpha-hours,--alpha_hours", gen_cfg.alpha_hours, "Window length in hours");
  gen->add_option("--sparsity", gen_cfg.sparsity, "Fraction of observations dropped");
  gen->add_option("--max-notes,--max_notes", gen_cfg.max_notes, "Maximum notes per episode");
  gen->add_option("--seed", gen_cfg.seed, "Generator seed")->required();
  gen->add_option("--out", gen_out, "Output JSONL path")->required();

  ConfigFlags train_flags;
  CLI::App* train = app.add_subcommand("train", "Train and keep the best validation checkpoint");
  train_flags.Register(train);

  std::string eval_ck, eval_data, eval_log;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  eval->add_option("--checkpoint", eval_ck)->required();
  eval->add_option("--data", eval_data)->required();
  eval->add_option("--log", eval_log, "Append the report line to this file");

  std::string pred_ck, pred_data, pred_out;
  CLI::App* predict = app.add_subcommand("predict", "Write per-episode probabilities as JSONL");
  predict->add_option("--checkpoint", pred_ck)->required();
  predict->add_option("--data", pred_data)->required();
  predict->add_option("--out", pred_out, "Output path (default stdout)");

  ConfigFlags ablate_flags;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  CLI::App* ablate = app.add_subcommand("ablate", "Run the embedding ablation matrix over seeds");
  ablate_flags.Register(ablate);
  ablate->add_option("--seeds", seeds, "Seeds to average over")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) {
      gen_cfg.task = data::ParseSyntheticTask(gen_task);
      return RunGen(gen_cfg, gen_out);
    }
    if (*train) return RunTrain(train_flags);
    if (*eval) return RunEval(eval_ck, eval_data, eval_log);
    if (*predict) return RunPredict(pred_ck, pred_data, pred_out);
    if (*ablate) return RunAblate(ablate_flags, seeds);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const data::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
