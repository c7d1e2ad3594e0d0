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

#include "pyreval/scoring.h"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <utility>

#include "pyreval/errors.h"
#include "pyreval/util.h"

namespace pyreval {
namespace {

using nlohmann::json;

const SystemSummary& FindSystem(const EvalExample& example,
                                const std::string& system_id) {
  auto it = example.systems.find(system_id);
  if (it == example.systems.end()) {
    throw ValidationError(ErrorCode::kInvalidValue,
                          "unknown system '" + system_id + "'", 0,
                          example.example_id, "systems");
  }
  return it->second;
}

Presence GoldLabel(const EvalExample& example, const SystemSummary& system,
                   const ContentUnit& unit) {
  auto it = system.gold_presence.find(unit.unit_id);
  if (it == system.gold_presence.end()) {
    throw ValidationError(ErrorCode::kMissingField,
                          "system '" + system.system_id +
                              "' has no gold presence label for unit '" +
                              unit.unit_id + "'",
                          0, example.example_id,
                          "systems." + system.system_id + ".gold_presence");
  }
  return it->second;
}

std::vector<const ContentUnit*> UnitsOfKind(const EvalExample& example,
                                            UnitKind kind) {
  std::vector<const ContentUnit*> out;
  for (const auto& u : example.units) {
    if (u.kind == kind) out.push_back(&u);
  }
  return out;
}

[[noreturn]] void NoUnits(const EvalExample& example, std::string_view what) {
  throw ValidationError(ErrorCode::kInvalidValue,
                        "example has no " + std::string(what) + " to score", 0,
                        example.example_id, "units");
}

std::vector<NliQuery> QueriesFor(const EvalExample& example,
                                 const SystemSummary& system,
                                 const std::vector<const ContentUnit*>& units) {
  std::vector<NliQuery> out;
  out.reserve(units.size());
  for (const ContentUnit* u : units) {
    out.push_back({{example.example_id, system.system_id, u->unit_id},
                   system.text,
                   u->text});
  }
  return out;
}

}  // namespace

std::string_view VariantName(Variant variant) {
  switch (variant) {
    case Variant::kPyramidGold:
      return "pyramid_gold";
    case Variant::kLitePyramid:
      return "lite_pyramid";
    case Variant::kLite2:
      return "lite2";
    case Variant::kLite3:
      return "lite3";
    case Variant::kLite2x:
      return "lite2x";
  }
  return "?";
}

Variant ParseVariant(std::string_view name) {
  for (Variant v : {Variant::kPyramidGold, Variant::kLitePyramid, Variant::kLite2,
                    Variant::kLite3, Variant::kLite2x}) {
    if (VariantName(v) == name) return v;
  }
  throw std::invalid_argument(
      "unknown variant '" + std::string(name) +
      "' (expected pyramid_gold, lite_pyramid, lite2, lite3 or lite2x)");
}

bool VariantUsesBackend(Variant variant) {
  return variant == Variant::kLite2 || variant == Variant::kLite3 ||
         variant == Variant::kLite2x;
}

std::string_view UnitChoiceName(UnitChoice choice) {
  return choice == UnitChoice::kUseScu ? "use_scu" : "use_stu";
}

json ScoreToJson(const SummaryScore& score) {
  json breakdown = json::array();
  for (const auto& c : score.breakdown) {
    breakdown.push_back({{"unit_id", c.unit_id}, {"weight", c.weight}, {"f", c.f}});
  }
  json out = {{"example_id", score.example_id},
              {"system_id", score.system_id},
              {"variant", std::string(VariantName(score.variant))},
              {"value", score.value},
              {"n_units_used", score.n_units_used},
              {"unit_breakdown", std::move(breakdown)}};
  if (score.variant == Variant::kLitePyramid) {
    out["sample_truncated"] = score.sample_truncated;
  }
  return out;
}

SummaryScore WeightedScore(const EvalExample& example, const std::string& system_id,
                           const std::vector<const ContentUnit*>& units,
                           const std::vector<int>& weights,
                           const std::vector<double>& f) {
  if (units.size() != f.size() || units.size() != weights.size()) {
    throw std::invalid_argument("units, weights and f-values differ in length");
  }
  if (units.empty()) NoUnits(example, "units");
  SummaryScore score;
  score.example_id = example.example_id;
  score.system_id = system_id;
  ExactSum numerator;
  ExactSum denominator;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!(f[i] >= 0.0 && f[i] <= 1.0)) {
      throw std::invalid_argument("f-value outside [0, 1] for unit '" +
                                  units[i]->unit_id + "'");
    }
    numerator.AddProduct(static_cast<double>(weights[i]), f[i]);
    denominator.Add(static_cast<double>(weights[i]));
    score.breakdown.push_back({units[i]->unit_id, weights[i], f[i]});
  }
  score.value = std::clamp(numerator.Value() / denominator.Value(), 0.0, 1.0);
  score.n_units_used = units.size();
  return score;
}

SummaryScore PyramidGold(const EvalExample& example, const std::string& system_id) {
  const SystemSummary& system = FindSystem(example, system_id);
  std::vector<const ContentUnit*> scus = UnitsOfKind(example, UnitKind::kScu);
  if (scus.empty()) NoUnits(example, "SCUs");
  SummaryScore score;
  score.example_id = example.example_id;
  score.system_id = system_id;
  score.variant = Variant::kPyramidGold;
  std::vector<int> weights;
  long long numerator = 0;
  std::size_t present = 0;
  for (const ContentUnit* u : scus) {
    const bool p = GoldLabel(example, system, *u) == Presence::kPresent;
    weights.push_back(u->weight);
    if (p) {
      numerator += u->weight;
      ++present;
    }
    score.breakdown.push_back({u->unit_id, u->weight, p ? 1.0 : 0.0});
  }
  std::sort(weights.begin(), weights.end(), std::greater<>());
  long long denominator = 0;
  for (std::size_t i = 0; i < present; ++i) denominator += weights[i];
  score.value = present == 0 ? 0.0
                             : static_cast<double>(numerator) /
                                   static_cast<double>(denominator);
  score.n_units_used = scus.size();
  return score;
}

SummaryScore LitePyramid(const EvalExample& example, const std::string& system_id,
                         std::size_t sample_size, std::uint64_t seed) {
  if (sample_size == 0) throw std::invalid_argument("sample size K must be >= 1");
  const SystemSummary& system = FindSystem(example, system_id);
  std::vector<const ContentUnit*> multiset;
  for (const ContentUnit* u : UnitsOfKind(example, UnitKind::kScu)) {
    for (int r = 0; r < u->weight; ++r) multiset.push_back(u);
  }
  if (multiset.empty()) NoUnits(example, "SCUs");
  SummaryScore score;
  score.example_id = example.example_id;
  score.system_id = system_id;
  score.variant = Variant::kLitePyramid;
  std::size_t k = sample_size;
  if (k >= multiset.size()) {
    score.sample_truncated = k > multiset.size();
    k = multiset.size();
  }
  std::mt19937_64 rng(DeriveSeed(seed, example.example_id));
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + UniformIndex(rng, multiset.size() - i);
    std::swap(multiset[i], multiset[j]);
  }
  std::size_t present = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const bool p = GoldLabel(example, system, *multiset[i]) == Presence::kPresent;
    present += p ? 1 : 0;
    score.breakdown.push_back({multiset[i]->unit_id, 1, p ? 1.0 : 0.0});
  }
  score.value = static_cast<double>(present) / static_cast<double>(k);
  score.n_units_used = k;
  return score;
}

double PresenceWeightedFraction(const EvalExample& example,
                                const std::string& system_id) {
  const SystemSummary& system = FindSystem(example, system_id);
  std::vector<const ContentUnit*> scus = UnitsOfKind(example, UnitKind::kScu);
  std::vector<int> weights;
  std::vector<double> f;
  for (const ContentUnit* u : scus) {
    weights.push_back(u->weight);
    f.push_back(GoldLabel(example, system, *u) == Presence::kPresent ? 1.0 : 0.0);
  }
  if (scus.empty()) NoUnits(example, "SCUs");
  return WeightedScore(example, system_id, scus, weights, f).value;
}

UnitPlan PlanUnits(const EvalExample& example, Variant variant,
                   const Selection* selection) {
  UnitPlan plan;
  switch (variant) {
    case Variant::kLite2:
      for (const auto& u : example.units) {
        if (u.kind != UnitKind::kScu) continue;
        plan.units.push_back(&u);
        plan.weights.push_back(u.weight);
      }
      if (plan.units.empty()) NoUnits(example, "SCUs");
      return plan;
    case Variant::kLite3:
      for (const auto& u : example.units) {
        if (u.kind != UnitKind::kStu) continue;
        plan.units.push_back(&u);
        plan.weights.push_back(1);
      }
      if (plan.units.empty()) NoUnits(example, "STUs");
      return plan;
    case Variant::kLite2x:
      break;
    default:
      throw std::invalid_argument("variant '" + std::string(VariantName(variant)) +
                                  "' does not score through entailment");
  }
  if (selection == nullptr) {
    throw std::invalid_argument("lite2x needs a sentence selection");
  }
  for (const auto& u : example.units) {
    if (!u.source_sentence_id) {
      throw ValidationError(ErrorCode::kMissingField,
                            "lite2x needs source_sentence_id on unit '" +
                                u.unit_id + "'",
                            0, example.example_id, "units.source_sentence_id");
    }
    auto it = selection->find(*u.source_sentence_id);
    if (it == selection->end()) {
      throw ValidationError(ErrorCode::kInvalidValue,
                            "selection does not cover sentence '" +
                                *u.source_sentence_id + "'",
                            0, example.example_id, "selection");
    }
    if (u.kind == UnitKind::kScu && it->second == UnitChoice::kUseScu) {
      plan.units.push_back(&u);
      plan.weights.push_back(u.weight);
    } else if (u.kind == UnitKind::kStu && it->second == UnitChoice::kUseStu) {
      plan.units.push_back(&u);
      plan.weights.push_back(1);
    }
  }
  if (plan.units.empty()) NoUnits(example, "units under this selection");
  return plan;
}

namespace {

SummaryScore ScoreThroughBackend(const EvalExample& example,
                                 const std::string& system_id, Variant variant,
                                 EntailmentBackend& backend, FnliMode mode,
                                 const Selection* selection,
                                 const JudgeOptions& options) {
  const SystemSummary& system = FindSystem(example, system_id);
  UnitPlan plan = PlanUnits(example, variant, selection);
  std::vector<double> f =
      Judge(backend, QueriesFor(example, system, plan.units), mode, options);
  SummaryScore score = WeightedScore(example, system_id, plan.units, plan.weights, f);
  score.variant = variant;
  return score;
}

}  // namespace

SummaryScore Lite2(const EvalExample& example, const std::string& system_id,
                   EntailmentBackend& backend, FnliMode mode,
                   const JudgeOptions& options) {
  return ScoreThroughBackend(example, system_id, Variant::kLite2, backend, mode,
                             nullptr, options);
}

SummaryScore Lite3(const EvalExample& example, const std::string& system_id,
                   EntailmentBackend& backend, FnliMode mode,
                   const JudgeOptions& options) {
  return ScoreThroughBackend(example, system_id, Variant::kLite3, backend, mode,
                             nullptr, options);
}

SummaryScore Lite2x(const EvalExample& example, const std::string& system_id,
                    EntailmentBackend& backend, FnliMode mode,
                    const Selection& selection, const JudgeOptions& options) {
  return ScoreThroughBackend(example, system_id, Variant::kLite2x, backend, mode,
                             &selection, options);
}

double SystemAverage(const std::vector<SummaryScore>& scores) {
  if (scores.empty()) throw std::invalid_argument("no scores to average");
  ExactSum sum;
  for (const auto& s : scores) sum.Add(s.value);
  return sum.Value() / static_cast<double>(scores.size());
}

std::vector<SummaryScore> ScoreDataset(const Dataset& dataset,
                                       const ScoreRequest& request,
                                       EntailmentBackend* backend,
                                       const DatasetSelection* selection,
                                       const JudgeOptions& options) {
  std::vector<SummaryScore> out;
  if (!VariantUsesBackend(request.variant)) {
    if (request.variant == Variant::kLitePyramid &&
        (!request.sample_size || !request.seed)) {
      throw std::invalid_argument("lite_pyramid needs a sample size K and a seed");
    }
    for (const auto& ex : dataset.examples) {
      for (const auto& [system_id, system] : ex.systems) {
        (void)system;
        out.push_back(request.variant == Variant::kPyramidGold
                          ? PyramidGold(ex, system_id)
                          : LitePyramid(ex, system_id, *request.sample_size,
                                        *request.seed));
      }
    }
    return out;
  }
  if (backend == nullptr) {
    throw std::invalid_argument("variant '" + std::string(VariantName(request.variant)) +
                                "' needs an entailment backend");
  }
  if (request.variant == Variant::kLite2x && selection == nullptr) {
    throw std::invalid_argument("lite2x needs a sentence selection");
  }

  struct Pending {
    const EvalExample* example;
    std::string system_id;
    UnitPlan plan;
    std::size_t offset;
  };
  std::vector<Pending> pending;
  std::vector<NliQuery> queries;
  for (const auto& ex : dataset.examples) {
    const Selection* sel = nullptr;
    if (request.variant == Variant::kLite2x) {
      auto it = selection->find(ex.example_id);
      if (it == selection->end()) {
        throw ValidationError(ErrorCode::kInvalidValue,
                              "selection has no entry for this example", 0,
                              ex.example_id, "selection");
      }
      sel = &it->second;
    }
    if (ex.systems.empty()) continue;
    UnitPlan plan = PlanUnits(ex, request.variant, sel);
    for (const auto& [system_id, system] : ex.systems) {
      pending.push_back({&ex, system_id, plan, queries.size()});
      for (auto& q : QueriesFor(ex, system, plan.units)) queries.push_back(std::move(q));
    }
  }
  const std::vector<double> f = Judge(*backend, queries, request.mode, options);
  for (const auto& p : pending) {
    std::vector<double> slice(f.begin() + static_cast<std::ptrdiff_t>(p.offset),
                              f.begin() + static_cast<std::ptrdiff_t>(
                                              p.offset + p.plan.units.size()));
    SummaryScore score =
        WeightedScore(*p.example, p.system_id, p.plan.units, p.plan.weights, slice);
    score.variant = request.variant;
    out.push_back(std::move(score));
  }
  return out;
}

}  // namespace pyreval
