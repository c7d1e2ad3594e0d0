// Copyright 2026 The pyreval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pyreval/correlation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "pyreval/errors.h"
#include "pyreval/util.h"

namespace pyreval {
namespace {

void CheckShape(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("vectors differ in length");
  if (a.size() < 2) throw UndefinedCorrelation("correlation needs at least 2 points");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw std::invalid_argument("non-finite value in correlation input");
    }
  }
}

double Mean(std::span<const double> v) {
  return ExactTotal(v) / static_cast<double>(v.size());
}

}  // namespace

std::string_view MeasureName(Measure measure) {
  return measure == Measure::kPearson ? "pearson" : "spearman";
}

std::string_view LevelName(Level level) {
  return level == Level::kSystem ? "system" : "summary";
}

Measure ParseMeasure(std::string_view name) {
  if (name == "pearson") return Measure::kPearson;
  if (name == "spearman") return Measure::kSpearman;
  throw std::invalid_argument("unknown measure '" + std::string(name) +
                              "' (expected pearson or spearman)");
}

Level ParseLevel(std::string_view name) {
  if (name == "system") return Level::kSystem;
  if (name == "summary") return Level::kSummary;
  throw std::invalid_argument("unknown level '" + std::string(name) +
                              "' (expected system or summary)");
}

double Pearson(std::span<const double> a, std::span<const double> b) {
  CheckShape(a, b);
  const double ma = Mean(a);
  const double mb = Mean(b);
  ExactSum sab;
  ExactSum saa;
  ExactSum sbb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab.AddProduct(da, db);
    saa.AddProduct(da, da);
    sbb.AddProduct(db, db);
  }
  const double vaa = saa.Value();
  const double vbb = sbb.Value();
  if (vaa == 0.0 || vbb == 0.0) {
    throw UndefinedCorrelation("correlation undefined for a constant vector");
  }
  return std::clamp(sab.Value() / std::sqrt(vaa * vbb), -1.0, 1.0);
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share rank mean(i+1 .. j+1).
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Spearman(std::span<const double> a, std::span<const double> b) {
  CheckShape(a, b);
  const std::vector<double> ra = AverageRanks(a);
  const std::vector<double> rb = AverageRanks(b);
  return Pearson(ra, rb);
}

double Correlate(Measure measure, std::span<const double> a,
                 std::span<const double> b) {
  return measure == Measure::kPearson ? Pearson(a, b) : Spearman(a, b);
}

ScoreMatrix::ScoreMatrix(std::vector<std::string> examples,
                         std::vector<std::string> systems)
    : example_ids(std::move(examples)),
      system_ids(std::move(systems)),
      cells(example_ids.size(),
            std::vector<std::optional<MatrixCell>>(system_ids.size())) {}

void ScoreMatrix::Set(std::string_view example_id, std::string_view system_id,
                      double metric, double human) {
  auto e = std::find(example_ids.begin(), example_ids.end(), example_id);
  auto s = std::find(system_ids.begin(), system_ids.end(), system_id);
  if (e == example_ids.end() || s == system_ids.end()) {
    throw std::invalid_argument("cell (" + std::string(example_id) + ", " +
                                std::string(system_id) + ") is outside the matrix");
  }
  cells[static_cast<std::size_t>(e - example_ids.begin())]
       [static_cast<std::size_t>(s - system_ids.begin())] = MatrixCell{metric, human};
}

nlohmann::json ReportToJson(const CorrelationReport& report) {
  nlohmann::json out = {{"measure", std::string(MeasureName(report.measure))},
                        {"level", std::string(LevelName(report.level))},
                        {"value", nullptr},
                        {"n_examples_used", report.n_examples_used},
                        {"n_examples_skipped", report.n_examples_skipped}};
  if (report.value) {
    out["value"] = *report.value;
  } else {
    out["undefined_reason"] = report.undefined_reason;
  }
  if (report.fold_id) out["fold"] = *report.fold_id;
  return out;
}

CorrelationReport SystemLevel(const ScoreMatrix& matrix, Measure measure) {
  CorrelationReport report;
  report.measure = measure;
  report.level = Level::kSystem;
  std::vector<double> metric_means;
  std::vector<double> human_means;
  std::vector<bool> example_used(matrix.example_ids.size(), false);
  for (std::size_t s = 0; s < matrix.system_ids.size(); ++s) {
    std::vector<double> m;
    std::vector<double> h;
    for (std::size_t e = 0; e < matrix.example_ids.size(); ++e) {
      const auto& cell = matrix.cells[e][s];
      if (!cell) continue;
      m.push_back(cell->metric);
      h.push_back(cell->human);
      example_used[e] = true;
    }
    if (m.empty()) continue;
    metric_means.push_back(Mean(m));
    human_means.push_back(Mean(h));
  }
  if (metric_means.size() < 2) {
    throw UndefinedCorrelation("system-level correlation needs at least 2 systems");
  }
  report.value = Correlate(measure, metric_means, human_means);
  report.n_examples_used =
      static_cast<std::size_t>(std::count(example_used.begin(), example_used.end(), true));
  report.n_examples_skipped = matrix.example_ids.size() - report.n_examples_used;
  return report;
}

CorrelationReport SummaryLevel(const ScoreMatrix& matrix, Measure measure,
                               SkipPolicy policy) {
  CorrelationReport report;
  report.measure = measure;
  report.level = Level::kSummary;
  ExactSum total;
  for (std::size_t e = 0; e < matrix.example_ids.size(); ++e) {
    std::vector<double> m;
    std::vector<double> h;
    for (const auto& cell : matrix.cells[e]) {
      if (!cell) continue;
      m.push_back(cell->metric);
      h.push_back(cell->human);
    }
    try {
      if (m.size() < 2) {
        throw UndefinedCorrelation("example '" + matrix.example_ids[e] +
                                   "' has fewer than 2 scored systems");
      }
      total.Add(Correlate(measure, m, h));
      ++report.n_examples_used;
    } catch (const UndefinedCorrelation& err) {
      if (policy == SkipPolicy::kFail) {
        throw UndefinedCorrelation("example '" + matrix.example_ids[e] +
                                   "': " + err.what());
      }
      ++report.n_examples_skipped;
    }
  }
  if (report.n_examples_used == 0) {
    throw UndefinedCorrelation("summary-level correlation undefined for every example");
  }
  report.value = std::clamp(total.Value() / static_cast<double>(report.n_examples_used),
                            -1.0, 1.0);
  return report;
}

std::vector<std::vector<std::string>> KFoldSplit(const std::vector<std::string>& ids,
                                                 int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (static_cast<std::size_t>(k) > ids.size()) {
    throw std::invalid_argument("k = " + std::to_string(k) + " exceeds the " +
                                std::to_string(ids.size()) + " ids to split");
  }
  std::vector<std::string> shuffled = ids;
  std::mt19937_64 rng(seed);
  PortableShuffle(shuffled, rng);
  const std::size_t n = shuffled.size();
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t extra = n % static_cast<std::size_t>(k);
  std::vector<std::vector<std::string>> folds;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < static_cast<std::size_t>(k); ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    folds.emplace_back(shuffled.begin() + static_cast<std::ptrdiff_t>(pos),
                       shuffled.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return folds;
}

}  // namespace pyreval
