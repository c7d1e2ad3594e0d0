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

#ifndef PYREVAL_SCORING_H_
#define PYREVAL_SCORING_H_

// Pyramid-family scores for one (example, system) pair and over a dataset.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pyreval/corpus.h"
#include "pyreval/entailment.h"

namespace pyreval {

enum class Variant { kPyramidGold, kLitePyramid, kLite2, kLite3, kLite2x };

std::string_view VariantName(Variant variant);
Variant ParseVariant(std::string_view name);
bool VariantUsesBackend(Variant variant);

struct UnitContribution {
  std::string unit_id;
  int weight = 1;
  double f = 0.0;

  friend bool operator==(const UnitContribution&, const UnitContribution&) = default;
};

struct SummaryScore {
  std::string example_id;
  std::string system_id;
  Variant variant = Variant::kLite2;
  double value = 0.0;
  std::size_t n_units_used = 0;
  std::vector<UnitContribution> breakdown;
  // LitePyramid only: K exceeded the multiset and everything was taken.
  bool sample_truncated = false;
};

nlohmann::json ScoreToJson(const SummaryScore& score);

enum class UnitChoice { kUseScu, kUseStu };
std::string_view UnitChoiceName(UnitChoice choice);

// sentence_id -> choice, for one example.
using Selection = std::map<std::string, UnitChoice>;
// example_id -> selection.
using DatasetSelection = std::map<std::string, Selection>;

// Σ w·f / Σ w with exactly rounded sums. `weights` and `f` align with
// `units`.
SummaryScore WeightedScore(const EvalExample& example, const std::string& system_id,
                           const std::vector<const ContentUnit*>& units,
                           const std::vector<int>& weights,
                           const std::vector<double>& f);

// Present-SCU weight over the best weight sum reachable with as many SCUs.
SummaryScore PyramidGold(const EvalExample& example, const std::string& system_id);

// Fraction present among K draws without replacement from the weighted SCU
// multiset. The sample depends on (seed, example) only, so every system of
// an example is judged on the same units.
SummaryScore LitePyramid(const EvalExample& example, const std::string& system_id,
                         std::size_t sample_size, std::uint64_t seed);

// Σ w·Presence / Σ w over SCUs.
double PresenceWeightedFraction(const EvalExample& example,
                                const std::string& system_id);

// The units a variant scores, with the weights it uses: SCUs with their
// weights for lite2, STUs with weight 1 for lite3, the hybrid for lite2x.
struct UnitPlan {
  std::vector<const ContentUnit*> units;
  std::vector<int> weights;
};
UnitPlan PlanUnits(const EvalExample& example, Variant variant,
                   const Selection* selection = nullptr);

SummaryScore Lite2(const EvalExample& example, const std::string& system_id,
                   EntailmentBackend& backend, FnliMode mode,
                   const JudgeOptions& options = {});
SummaryScore Lite3(const EvalExample& example, const std::string& system_id,
                   EntailmentBackend& backend, FnliMode mode,
                   const JudgeOptions& options = {});
SummaryScore Lite2x(const EvalExample& example, const std::string& system_id,
                    EntailmentBackend& backend, FnliMode mode,
                    const Selection& selection, const JudgeOptions& options = {});

double SystemAverage(const std::vector<SummaryScore>& scores);

struct ScoreRequest {
  Variant variant = Variant::kLite2;
  FnliMode mode = FnliMode::kL3c;
  std::optional<std::size_t> sample_size;  // lite_pyramid
  std::optional<std::uint64_t> seed;       // lite_pyramid
};

// Scores every (example, system) pair, ordered by example then system id.
// One batched Judge call serves the whole dataset.
std::vector<SummaryScore> ScoreDataset(const Dataset& dataset,
                                       const ScoreRequest& request,
                                       EntailmentBackend* backend,
                                       const DatasetSelection* selection = nullptr,
                                       const JudgeOptions& options = {});

}  // namespace pyreval

#endif  // PYREVAL_SCORING_H_
