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

#ifndef PYREVAL_CORRELATION_H_
#define PYREVAL_CORRELATION_H_

// Pearson / Spearman kernels and the system- and summary-level
// meta-evaluation correlations.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pyreval {

enum class Measure { kPearson, kSpearman };
enum class Level { kSystem, kSummary };

std::string_view MeasureName(Measure measure);
std::string_view LevelName(Level level);
Measure ParseMeasure(std::string_view name);
Level ParseLevel(std::string_view name);

// Throw std::invalid_argument on length mismatch or fewer than 2 points and
// UndefinedCorrelation when either vector is constant.
double Pearson(std::span<const double> a, std::span<const double> b);
double Spearman(std::span<const double> a, std::span<const double> b);
double Correlate(Measure measure, std::span<const double> a,
                 std::span<const double> b);

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> AverageRanks(std::span<const double> values);

struct MatrixCell {
  double metric = 0.0;
  double human = 0.0;
};

// examples x systems; a cell is empty when either score is missing.
struct ScoreMatrix {
  std::vector<std::string> example_ids;
  std::vector<std::string> system_ids;
  std::vector<std::vector<std::optional<MatrixCell>>> cells;

  ScoreMatrix() = default;
  ScoreMatrix(std::vector<std::string> examples, std::vector<std::string> systems);
  // Throws std::invalid_argument for ids not in the matrix.
  void Set(std::string_view example_id, std::string_view system_id, double metric,
           double human);
};

struct CorrelationReport {
  Measure measure = Measure::kPearson;
  Level level = Level::kSystem;
  std::optional<double> value;
  std::string undefined_reason;
  std::size_t n_examples_used = 0;
  std::size_t n_examples_skipped = 0;
  std::optional<int> fold_id;
};

nlohmann::json ReportToJson(const CorrelationReport& report);

// Correlation of per-system mean metric against per-system mean human
// score, each mean over the system's filled cells. Throws
// UndefinedCorrelation when fewer than 2 systems have cells or a mean
// vector is constant.
CorrelationReport SystemLevel(const ScoreMatrix& matrix, Measure measure);

enum class SkipPolicy { kSkip, kFail };

// Per-example correlation across systems, averaged over examples. Under
// kSkip undefined examples are counted and left out; UndefinedCorrelation
// is thrown when none remain. kFail rethrows the first undefined example.
CorrelationReport SummaryLevel(const ScoreMatrix& matrix, Measure measure,
                               SkipPolicy policy = SkipPolicy::kSkip);

// Seeded shuffle, then contiguous folds whose sizes differ by at most one
// (the first |ids| mod k folds are the larger ones).
std::vector<std::vector<std::string>> KFoldSplit(const std::vector<std::string>& ids,
                                                 int k, std::uint64_t seed);

}  // namespace pyreval

#endif  // PYREVAL_CORRELATION_H_
