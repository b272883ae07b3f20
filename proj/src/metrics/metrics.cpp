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

#include "utde/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace utde::metrics {
namespace {

void RequireFinite(std::span<const double> scores) {
  for (double v : scores) {
    if (!std::isfinite(v)) throw std::invalid_argument("scores must be finite");
  }
}

void RequireSameLength(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("scores and labels differ in length (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

// Indices sorted by descending score; ties keep index order.
std::vector<std::size_t> DescendingOrder(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

std::string Format(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

ConfusionCounts Confusion(std::span<const double> scores, std::span<const int> labels,
                          double threshold) {
  RequireSameLength(scores.size(), labels.size());
  RequireFinite(scores);
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] != 0;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

ClassScores ScoresFrom(const ConfusionCounts& c) {
  ClassScores s;
  if (c.tp + c.fp > 0) s.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) s.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

double F1Binary(std::span<const double> scores, std::span<const int> labels, double threshold) {
  return ScoresFrom(Confusion(scores, labels, threshold)).f1;
}

std::vector<double> LabeledScores::ScoreColumn(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scores[i * classes + c];
  return out;
}

std::vector<int> LabeledScores::LabelColumn(std::size_t c) const {
  std::vector<int> out(rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = labels[i * classes + c];
  return out;
}

double MacroF1(const LabeledScores& data, double threshold) {
  if (data.classes < 2) throw std::invalid_argument("MacroF1 needs at least two classes");
  RequireSameLength(data.scores.size(), data.labels.size());
  double total = 0.0;
  for (std::size_t c = 0; c < data.classes; ++c) {
    total += F1Binary(data.ScoreColumn(c), data.LabelColumn(c), threshold);
  }
  return total / static_cast<double>(data.classes);
}

double Auroc(std::span<const double> scores, std::span<const int> labels) {
  RequireSameLength(scores.size(), labels.size());
  RequireFinite(scores);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U with mid-ranks for ties.
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] != 0) {
        positive_rank_sum += mid_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw UndefinedMetricError("AUROC needs both positive and negative labels");
  }
  const double p = static_cast<double>(positives), q = static_cast<double>(negatives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

double Aupr(std::span<const double> scores, std::span<const int> labels) {
  RequireSameLength(scores.size(), labels.size());
  RequireFinite(scores);
  const std::size_t positives = static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](int y) { return y != 0; }));
  if (positives == 0) throw UndefinedMetricError("AUPR needs at least one positive label");
  const std::vector<std::size_t> order = DescendingOrder(scores);
  double ap = 0.0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i, level_tp = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      level_tp += labels[order[j]] != 0;
      ++j;
    }
    tp += level_tp;
    seen = j;
    if (level_tp > 0) {
      const double precision = static_cast<double>(tp) / static_cast<double>(seen);
      ap += static_cast<double>(level_tp) / static_cast<double>(positives) * precision;
    }
    i = j;
  }
  return ap;
}

std::string EvalReport::ToKeyValue(const std::string& prefix) const {
  std::ostringstream out;
  if (!prefix.empty()) out << prefix << ' ';
  out << "n=" << n_examples << " threshold=" << Format(threshold) << " f1=" << Format(f1);
  if (macro_f1) out << " macro_f1=" << Format(*macro_f1);
  out << " aupr=" << Format(aupr) << " auroc=" << Format(auroc);
  if (f1_undefined) out << " f1_undefined=1";
  return out.str();
}

EvalReport Evaluate(const LabeledScores& data, double threshold) {
  RequireSameLength(data.scores.size(), data.labels.size());
  if (data.classes == 0 || data.scores.empty()) {
    throw std::invalid_argument("cannot evaluate an empty prediction set");
  }
  EvalReport r;
  r.threshold = threshold;
  r.n_examples = data.rows();
  r.f1_undefined = std::none_of(data.labels.begin(), data.labels.end(), [](int y) { return y; });
  if (data.classes == 1) {
    r.f1 = F1Binary(data.scores, data.labels, threshold);
    r.auroc = Auroc(data.scores, data.labels);
    r.aupr = Aupr(data.scores, data.labels);
    return r;
  }
  ConfusionCounts micro;
  double f1_sum = 0.0, auroc_sum = 0.0, aupr_sum = 0.0;
  std::size_t auroc_n = 0, aupr_n = 0;
  for (std::size_t c = 0; c < data.classes; ++c) {
    const std::vector<double> s = data.ScoreColumn(c);
    const std::vector<int> y = data.LabelColumn(c);
    const ConfusionCounts cc = Confusion(s, y, threshold);
    micro.tp += cc.tp;
    micro.fp += cc.fp;
    micro.fn += cc.fn;
    micro.tn += cc.tn;
    r.per_class.push_back(ScoresFrom(cc));
    f1_sum += r.per_class.back().f1;
    try {
      auroc_sum += Auroc(s, y);
      ++auroc_n;
    } catch (const UndefinedMetricError&) {
    }
    try {
      aupr_sum += Aupr(s, y);
      ++aupr_n;
    } catch (const UndefinedMetricError&) {
    }
  }
  if (auroc_n == 0 || aupr_n == 0) {
    throw UndefinedMetricError("no class has both positive and negative labels");
  }
  r.f1 = ScoresFrom(micro).f1;
  r.macro_f1 = f1_sum / static_cast<double>(data.classes);
  r.auroc = auroc_sum / static_cast<double>(auroc_n);
  r.aupr = aupr_sum / static_cast<double>(aupr_n);
  return r;
}

MeanStd Summarize(std::span<const double> values) {
  MeanStd s;
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::map<std::string, MeanStd> Aggregate(std::span<const EvalReport> reports) {
  std::map<std::string, std::vector<double>> columns;
  for (const EvalReport& r : reports) {
    columns["f1"].push_back(r.f1);
    columns["aupr"].push_back(r.aupr);
    columns["auroc"].push_back(r.auroc);
    if (r.macro_f1) columns["macro_f1"].push_back(*r.macro_f1);
  }
  std::map<std::string, MeanStd> out;
  for (const auto& [name, values] : columns) out[name] = Summarize(values);
  return out;
}

}  // namespace utde::metrics
