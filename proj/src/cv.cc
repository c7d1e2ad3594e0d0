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

#include "pyreval/cv.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "pyreval/errors.h"
#include "pyreval/util.h"

namespace pyreval {
namespace {

using nlohmann::ordered_json;

constexpr std::pair<Level, Measure> kReportGrid[] = {
    {Level::kSystem, Measure::kPearson},
    {Level::kSystem, Measure::kSpearman},
    {Level::kSummary, Measure::kPearson},
    {Level::kSummary, Measure::kSpearman},
};

std::string ShortDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

using PairKey = std::pair<std::string, std::string>;

std::map<PairKey, double> HumanScores(const Dataset& dataset, HumanTarget target) {
  std::map<PairKey, double> out;
  for (const auto& ex : dataset.examples) {
    for (const auto& [system_id, system] : ex.systems) {
      switch (target) {
        case HumanTarget::kGoldScore:
          if (system.gold_human_score) {
            out[{ex.example_id, system_id}] = *system.gold_human_score;
          }
          break;
        case HumanTarget::kPresenceWeighted:
          out[{ex.example_id, system_id}] = PresenceWeightedFraction(ex, system_id);
          break;
        case HumanTarget::kPyramid:
          out[{ex.example_id, system_id}] = PyramidGold(ex, system_id).value;
          break;
      }
    }
  }
  return out;
}

// f-values for every (example, system, unit) the variant can touch.
std::map<NliKey, double> EntailmentTable(const Dataset& dataset,
                                         EntailmentBackend& backend,
                                         const CvConfig& config) {
  const bool want_scu = config.variant != Variant::kLite3;
  const bool want_stu = config.variant != Variant::kLite2;
  std::vector<NliQuery> queries;
  for (const auto& ex : dataset.examples) {
    for (const auto& [system_id, system] : ex.systems) {
      for (const auto& u : ex.units) {
        const bool want = u.kind == UnitKind::kScu ? want_scu : want_stu;
        if (!want) continue;
        queries.push_back({{ex.example_id, system_id, u.unit_id}, system.text, u.text});
      }
    }
  }
  const std::vector<double> f = Judge(backend, queries, config.mode, config.judge);
  std::map<NliKey, double> out;
  for (std::size_t i = 0; i < queries.size(); ++i) out.emplace(queries[i].key, f[i]);
  return out;
}

CorrelationReport Safely(Level level, Measure measure, const ScoreMatrix& matrix,
                         int fold) {
  CorrelationReport report;
  try {
    report = level == Level::kSystem ? SystemLevel(matrix, measure)
                                     : SummaryLevel(matrix, measure);
  } catch (const UndefinedCorrelation& e) {
    report.measure = measure;
    report.level = level;
    report.value.reset();
    report.undefined_reason = e.what();
  }
  report.fold_id = fold;
  return report;
}

}  // namespace

std::string_view CvAxisName(CvAxis axis) {
  return axis == CvAxis::kByExamples ? "by_examples" : "by_systems";
}

CvAxis ParseCvAxis(std::string_view name) {
  if (name == "by_examples") return CvAxis::kByExamples;
  if (name == "by_systems") return CvAxis::kBySystems;
  throw std::invalid_argument("unknown axis '" + std::string(name) +
                              "' (expected by_examples or by_systems)");
}

std::string_view HumanTargetName(HumanTarget target) {
  switch (target) {
    case HumanTarget::kGoldScore:
      return "gold_score";
    case HumanTarget::kPresenceWeighted:
      return "presence_weighted";
    case HumanTarget::kPyramid:
      return "pyramid";
  }
  return "?";
}

HumanTarget ParseHumanTarget(std::string_view name) {
  for (HumanTarget t : {HumanTarget::kGoldScore, HumanTarget::kPresenceWeighted,
                        HumanTarget::kPyramid}) {
    if (HumanTargetName(t) == name) return t;
  }
  throw std::invalid_argument("unknown human target '" + std::string(name) +
                              "' (expected gold_score, presence_weighted or pyramid)");
}

const AveragedReport& CvResult::Average(Level level, Measure measure) const {
  for (const auto& a : average) {
    if (a.level == level && a.measure == measure) return a;
  }
  throw std::out_of_range("no averaged report for that level and measure");
}

std::vector<CvResult> RunCv(const Dataset& dataset, EntailmentBackend* backend,
                            const CvConfig& config) {
  const bool lite2x = config.variant == Variant::kLite2x;
  if (lite2x && config.xs.empty()) {
    throw std::invalid_argument("lite2x cross-validation needs at least one x");
  }
  if (!lite2x && !config.xs.empty()) {
    throw std::invalid_argument("x values only apply to lite2x");
  }
  if (VariantUsesBackend(config.variant) && backend == nullptr) {
    throw std::invalid_argument("variant needs an entailment backend");
  }
  if (config.variant == Variant::kLitePyramid && !config.sample_size) {
    throw std::invalid_argument("lite_pyramid needs a sample size K");
  }

  std::vector<std::string> example_ids;
  std::set<std::string> system_set;
  for (const auto& ex : dataset.examples) {
    example_ids.push_back(ex.example_id);
    for (const auto& [id, s] : ex.systems) system_set.insert(id);
  }
  const std::vector<std::string> system_ids(system_set.begin(), system_set.end());
  const auto folds = KFoldSplit(
      config.axis == CvAxis::kByExamples ? example_ids : system_ids, config.k,
      config.seed);

  const std::map<PairKey, double> human = HumanScores(dataset, config.human);
  std::map<NliKey, double> f_table;
  if (VariantUsesBackend(config.variant)) {
    f_table = EntailmentTable(dataset, *backend, config);
  }

  // Easiness regressors, one per fold, shared by every x.
  std::vector<EasinessSample> samples;
  std::vector<std::pair<std::string, FeatureVector>> sentence_features;
  std::vector<std::string> sentence_ids;
  std::vector<GbtModel> models;
  std::vector<std::size_t> n_train(folds.size(), 0);
  std::vector<std::optional<double>> mae(folds.size());
  if (lite2x) {
    samples = BuildEasinessSamples(dataset, config.easiness);
    for (const auto& ex : dataset.examples) {
      for (const auto& s : ex.sentences) {
        sentence_features.emplace_back(ex.example_id, Featurize(s, config.easiness.features));
        sentence_ids.push_back(s.sentence_id);
      }
    }
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const std::set<std::string> held(folds[f].begin(), folds[f].end());
      std::vector<EasinessSample> train;
      std::vector<const EasinessSample*> test;
      for (const auto& s : samples) {
        if (config.axis == CvAxis::kByExamples && held.contains(s.example_id)) {
          test.push_back(&s);
        } else {
          train.push_back(s);
        }
      }
      n_train[f] = train.size();
      models.push_back(TrainEasinessModel(train, config.gbt));
      if (!test.empty()) {
        ExactSum err;
        for (const auto* s : test) {
          err.Add(std::fabs(PredictEasiness(models.back(), s->features) - s->label));
        }
        mae[f] = err.Value() / static_cast<double>(test.size());
      }
    }
  }

  std::vector<std::optional<double>> xs;
  if (lite2x) {
    xs.assign(config.xs.begin(), config.xs.end());
  } else {
    xs.push_back(std::nullopt);
  }

  std::vector<CvResult> results;
  for (const auto& x : xs) {
    CvResult result;
    result.x = x;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const std::set<std::string> held(folds[f].begin(), folds[f].end());
      std::vector<std::string> test_examples;
      std::vector<std::string> test_systems;
      if (config.axis == CvAxis::kByExamples) {
        for (const auto& id : example_ids) {
          if (held.contains(id)) test_examples.push_back(id);
        }
        test_systems = system_ids;
      } else {
        test_examples = example_ids;
        for (const auto& id : system_ids) {
          if (held.contains(id)) test_systems.push_back(id);
        }
      }
      const std::set<std::string> test_example_set(test_examples.begin(),
                                                   test_examples.end());

      DatasetSelection selection;
      if (lite2x) {
        std::vector<SentenceScore> scores;
        for (std::size_t i = 0; i < sentence_features.size(); ++i) {
          const auto& [example_id, features] = sentence_features[i];
          if (!test_example_set.contains(example_id)) continue;
          scores.push_back(
              {example_id, sentence_ids[i], PredictEasiness(models[f], features)});
        }
        selection = SelectSentences(scores, *x, config.scope);
      }

      ScoreMatrix matrix(test_examples, test_systems);
      const std::set<std::string> test_system_set(test_systems.begin(),
                                                  test_systems.end());
      for (const auto& ex : dataset.examples) {
        if (!test_example_set.contains(ex.example_id)) continue;
        std::optional<UnitPlan> plan;
        if (VariantUsesBackend(config.variant)) {
          const Selection* sel = nullptr;
          static const Selection kEmptySelection;
          if (lite2x) {
            auto it = selection.find(ex.example_id);
            sel = it == selection.end() ? &kEmptySelection : &it->second;
          }
          if (!ex.systems.empty()) plan = PlanUnits(ex, config.variant, sel);
        }
        for (const auto& [system_id, system] : ex.systems) {
          if (!test_system_set.contains(system_id)) continue;
          auto h = human.find({ex.example_id, system_id});
          if (h == human.end()) continue;
          double value = 0.0;
          if (plan) {
            std::vector<double> fv;
            for (const ContentUnit* u : plan->units) {
              fv.push_back(f_table.at({ex.example_id, system_id, u->unit_id}));
            }
            value = WeightedScore(ex, system_id, plan->units, plan->weights, fv).value;
          } else if (config.variant == Variant::kPyramidGold) {
            value = PyramidGold(ex, system_id).value;
          } else {
            value = LitePyramid(ex, system_id, *config.sample_size, config.seed).value;
          }
          matrix.Set(ex.example_id, system_id, value, h->second);
        }
      }

      FoldReport report;
      report.fold = static_cast<int>(f);
      report.held_out = folds[f];
      report.n_train_sentences = n_train[f];
      report.regressor_mae = mae[f];
      for (const auto& [level, measure] : kReportGrid) {
        report.correlations.push_back(Safely(level, measure, matrix, static_cast<int>(f)));
      }
      result.folds.push_back(std::move(report));
    }
    for (std::size_t g = 0; g < std::size(kReportGrid); ++g) {
      AveragedReport avg;
      avg.level = kReportGrid[g].first;
      avg.measure = kReportGrid[g].second;
      ExactSum sum;
      for (const auto& fold : result.folds) {
        const auto& v = fold.correlations[g].value;
        if (!v) continue;
        sum.Add(*v);
        ++avg.n_folds_used;
      }
      if (avg.n_folds_used > 0) {
        avg.value = std::clamp(sum.Value() / static_cast<double>(avg.n_folds_used),
                               -1.0, 1.0);
      }
      result.average.push_back(avg);
    }
    results.push_back(std::move(result));
  }
  return results;
}

ordered_json CvResultToJson(const CvResult& result) {
  ordered_json folds = ordered_json::array();
  for (const auto& f : result.folds) {
    ordered_json correlations = ordered_json::array();
    for (const auto& c : f.correlations) correlations.push_back(ordered_json::parse(ReportToJson(c).dump()));
    ordered_json j;
    j["fold"] = f.fold;
    j["held_out"] = f.held_out;
    j["n_train_sentences"] = f.n_train_sentences;
    j["regressor_mae"] = f.regressor_mae ? ordered_json(*f.regressor_mae) : ordered_json();
    j["correlations"] = std::move(correlations);
    folds.push_back(std::move(j));
  }
  ordered_json average = ordered_json::array();
  for (const auto& a : result.average) {
    ordered_json j;
    j["level"] = std::string(LevelName(a.level));
    j["measure"] = std::string(MeasureName(a.measure));
    j["value"] = a.value ? ordered_json(*a.value) : ordered_json();
    j["n_folds_used"] = a.n_folds_used;
    average.push_back(std::move(j));
  }
  ordered_json out;
  out["x"] = result.x ? ordered_json(*result.x) : ordered_json();
  out["folds"] = std::move(folds);
  out["average"] = std::move(average);
  return out;
}

std::string EmitCurveCsv(const std::vector<CvResult>& results) {
  if (results.size() < 2) {
    throw std::invalid_argument("a curve needs at least 2 report sets");
  }
  std::vector<const CvResult*> sorted;
  for (const auto& r : results) {
    if (!r.x) throw std::invalid_argument("report set without an x value");
    sorted.push_back(&r);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const CvResult* a, const CvResult* b) { return *a->x < *b->x; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (*sorted[i]->x == *sorted[i - 1]->x) {
      throw std::invalid_argument("duplicate x value " + ShortDouble(*sorted[i]->x));
    }
  }
  auto cell = [](const CvResult& r, Level level, Measure measure) {
    const auto& v = r.Average(level, measure).value;
    return v ? ShortDouble(*v) : std::string();
  };
  std::string out = "x,summary_r,summary_rho,system_r,system_rho\n";
  for (const CvResult* r : sorted) {
    out += ShortDouble(*r->x) + "," + cell(*r, Level::kSummary, Measure::kPearson) +
           "," + cell(*r, Level::kSummary, Measure::kSpearman) + "," +
           cell(*r, Level::kSystem, Measure::kPearson) + "," +
           cell(*r, Level::kSystem, Measure::kSpearman) + "\n";
  }
  return out;
}

}  // namespace pyreval
