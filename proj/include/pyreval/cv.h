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

#ifndef PYREVAL_CV_H_
#define PYREVAL_CV_H_

// k-fold cross-validated meta-evaluation: per fold, train the easiness
// regressor on the other folds (lite2x only), score the held-out part and
// correlate against human scores; then average over folds.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pyreval/corpus.h"
#include "pyreval/correlation.h"
#include "pyreval/easiness.h"
#include "pyreval/entailment.h"
#include "pyreval/gbt.h"
#include "pyreval/scoring.h"

namespace pyreval {

enum class CvAxis { kByExamples, kBySystems };
std::string_view CvAxisName(CvAxis axis);
CvAxis ParseCvAxis(std::string_view name);

// What the metric is correlated against.
enum class HumanTarget { kGoldScore, kPresenceWeighted, kPyramid };
std::string_view HumanTargetName(HumanTarget target);
HumanTarget ParseHumanTarget(std::string_view name);

struct CvConfig {
  int k = 5;
  CvAxis axis = CvAxis::kByExamples;
  std::uint64_t seed = 0;
  Variant variant = Variant::kLite2;
  FnliMode mode = FnliMode::kL3c;
  // lite2x: one CV run per x.
  std::vector<double> xs;
  SelectionScope scope = SelectionScope::kGlobal;
  std::optional<std::size_t> sample_size;  // lite_pyramid
  HumanTarget human = HumanTarget::kGoldScore;
  GbtConfig gbt;
  EasinessOptions easiness;
  JudgeOptions judge;
};

struct FoldReport {
  int fold = 0;
  std::vector<std::string> held_out;
  std::vector<CorrelationReport> correlations;  // system/summary x pearson/spearman
  std::size_t n_train_sentences = 0;
  std::optional<double> regressor_mae;  // by_examples lite2x only
};

struct AveragedReport {
  Measure measure = Measure::kPearson;
  Level level = Level::kSystem;
  std::optional<double> value;
  std::size_t n_folds_used = 0;
};

struct CvResult {
  std::optional<double> x;
  std::vector<FoldReport> folds;
  std::vector<AveragedReport> average;

  const AveragedReport& Average(Level level, Measure measure) const;
};

std::vector<CvResult> RunCv(const Dataset& dataset, EntailmentBackend* backend,
                            const CvConfig& config);

nlohmann::ordered_json CvResultToJson(const CvResult& result);

// Rows (x, summary_r, summary_rho, system_r, system_rho) sorted by x.
// Throws std::invalid_argument for fewer than 2 results, a result without
// x, or duplicate x values.
std::string EmitCurveCsv(const std::vector<CvResult>& results);

}  // namespace pyreval

#endif  // PYREVAL_CV_H_
