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
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace utde::metrics {

// A metric that has no value for the given labels (e.g. AUROC with one class).
class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kDefaultThreshold = 0.5;

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const ClassScores&) const = default;
};

// Predictions are score >= threshold. Every metric throws
// std::invalid_argument on a length mismatch or a non-finite score.
ConfusionCounts Confusion(std::span<const double> scores, std::span<const int> labels,
                          double threshold);
ClassScores ScoresFrom(const ConfusionCounts& c);

// 2PR / (P + R), 0 when P + R = 0 (which includes "no positives").
double F1Binary(std::span<const double> scores, std::span<const int> labels,
                double threshold = kDefaultThreshold);

// Row-major [n x classes] matrices.
struct LabeledScores {
  std::vector<double> scores;
  std::vector<int> labels;
  std::size_t classes = 1;

  std::size_t rows() const { return classes ? scores.size() / classes : 0; }
  std::vector<double> ScoreColumn(std::size_t c) const;
  std::vector<int> LabelColumn(std::size_t c) const;
};

// Unweighted mean of the per-class F1. Requires at least two classes.
double MacroF1(const LabeledScores& data, double threshold = kDefaultThreshold);

// Probability that a random positive outscores a random negative; ties count
// one half. Throws UndefinedMetricError unless both classes are present.
double Auroc(std::span<const double> scores, std::span<const int> labels);

// Average precision: sum over descending score levels of
// (recall gained) x (precision at that level); equal scores form one level.
// Throws UndefinedMetricError without positives.
double Aupr(std::span<const double> scores, std::span<const int> labels);

struct EvalReport {
  double f1 = 0.0;  // binary F1, or micro-F1 for multi-label tasks
  std::optional<double> macro_f1;
  double aupr = 0.0;   // macro average over classes for multi-label tasks
  double auroc = 0.0;  // macro average over classes for multi-label tasks
  double threshold = kDefaultThreshold;
  std::size_t n_examples = 0;
  bool f1_undefined = false;  // no positive labels at all
  std::vector<ClassScores> per_class;  // multi-label only

  // Flat "key=value" record, bit-stable for identical inputs.
  std::string ToKeyValue(const std::string& prefix = {}) const;
  bool operator==(const EvalReport&) const = default;
};

// Binary when data.classes == 1, multi-label otherwise. Throws
// std::invalid_argument for empty input.
EvalReport Evaluate(const LabeledScores& data, double threshold = kDefaultThreshold);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single value
};

MeanStd Summarize(std::span<const double> values);

// Mean and standard deviation of each metric across runs (e.g. seeds).
std::map<std::string, MeanStd> Aggregate(std::span<const EvalReport> reports);

}  // namespace utde::metrics
