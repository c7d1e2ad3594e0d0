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

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>

#include "pyreval/errors.h"
#include "support/synthetic.h"

namespace pyreval {
namespace {

double BrutePyramid(const EvalExample& ex, const std::string& sid) {
  std::vector<int> weights;
  double got = 0;
  std::size_t k = 0;
  for (const auto& u : ex.units) {
    if (u.kind != UnitKind::kScu) continue;
    weights.push_back(u.weight);
    if (ex.systems.at(sid).gold_presence.at(u.unit_id) == Presence::kPresent) {
      got += u.weight;
      ++k;
    }
  }
  if (k == 0) return 0.0;
  std::sort(weights.rbegin(), weights.rend());
  double best = 0;
  for (std::size_t i = 0; i < k; ++i) best += weights[i];
  return got / best;
}

TEST(PyramidGoldTest, MatchesBruteForce) {
  const Dataset d = testing::MakeSyntheticDataset(21, {.n_examples = 40});
  for (const auto& ex : d.examples) {
    for (const auto& [sid, sys] : ex.systems) {
      const SummaryScore s = PyramidGold(ex, sid);
      EXPECT_NEAR(s.value, BrutePyramid(ex, sid), 1e-15);
      EXPECT_GE(s.value, 0.0);
      EXPECT_LE(s.value, 1.0);
      EXPECT_EQ(s.variant, Variant::kPyramidGold);
    }
  }
}

TEST(PyramidGoldTest, AllPresentScoresOne) {
  Dataset d = testing::MakeSyntheticDataset(2, {.n_examples = 3});
  for (auto& ex : d.examples) {
    auto& sys = ex.systems.begin()->second;
    for (auto& [uid, p] : sys.gold_presence) p = Presence::kPresent;
    EXPECT_EQ(PyramidGold(ex, sys.system_id).value, 1.0);
    for (auto& [uid, p] : sys.gold_presence) p = Presence::kNotPresent;
    EXPECT_EQ(PyramidGold(ex, sys.system_id).value, 0.0);
  }
}

TEST(PyramidGoldTest, MissingLabelIsAnError) {
  Dataset d = testing::MakeSyntheticDataset(2, {.n_examples = 1});
  auto& ex = d.examples[0];
  auto& sys = ex.systems.begin()->second;
  sys.gold_presence.erase(ex.units[0].unit_id);
  EXPECT_THROW(PyramidGold(ex, sys.system_id), ValidationError);
  EXPECT_THROW(PyramidGold(ex, "no-such-system"), std::exception);
}

TEST(LitePyramidTest, SamplesWithoutReplacementDeterministically) {
  const Dataset d = testing::MakeSyntheticDataset(8, {.n_examples = 10});
  for (const auto& ex : d.examples) {
    const std::size_t total = UnitMultiset(ex, UnitKind::kScu).size();
    for (const auto& [sid, sys] : ex.systems) {
      const SummaryScore a = LitePyramid(ex, sid, 3, 99);
      const SummaryScore b = LitePyramid(ex, sid, 3, 99);
      EXPECT_EQ(a.value, b.value);
      EXPECT_EQ(a.breakdown, b.breakdown);
      EXPECT_EQ(a.n_units_used, std::min<std::size_t>(3, total));
      EXPECT_EQ(a.sample_truncated, total < 3);
      std::map<std::string, int> drawn;
      for (const auto& c : a.breakdown) drawn[c.unit_id]++;
      for (const auto& [uid, n] : drawn) EXPECT_LE(n, ex.FindUnit(uid)->weight);
    }
    // every system of an example sees the same sample
    std::vector<std::string> first;
    for (const auto& [sid, sys] : ex.systems) {
      std::vector<std::string> ids;
      for (const auto& c : LitePyramid(ex, sid, 4, 5).breakdown) ids.push_back(c.unit_id);
      if (first.empty()) first = ids;
      EXPECT_EQ(ids, first);
    }
  }
}

TEST(LitePyramidTest, FullSampleEqualsPresenceFraction) {
  const Dataset d = testing::MakeSyntheticDataset(9, {.n_examples = 10});
  for (const auto& ex : d.examples) {
    for (const auto& [sid, sys] : ex.systems) {
      const SummaryScore s = LitePyramid(ex, sid, 1000, 1);
      EXPECT_TRUE(s.sample_truncated);
      EXPECT_NEAR(s.value, PresenceWeightedFraction(ex, sid), 1e-12);
    }
  }
  EXPECT_THROW(LitePyramid(d.examples[0], "sys0", 0, 1), std::invalid_argument);
}

TEST(Lite2Test, GoldStubReducesToPresenceFraction) {
  const Dataset d = testing::MakeSyntheticDataset(10);
  GoldPresenceBackend gold(d);
  for (const auto& ex : d.examples) {
    for (const auto& [sid, sys] : ex.systems) {
      EXPECT_NEAR(Lite2(ex, sid, gold, FnliMode::kL3c).value,
                  PresenceWeightedFraction(ex, sid), 1e-12);
    }
  }
}

TEST(Lite2Test, WeightsMatchDuplication) {
  const Dataset d = testing::MakeSyntheticDataset(12, {.n_examples = 30});
  auto scores = testing::MakeRandomNliScores(d, 4);
  LookupBackend lookup(scores, "v");
  for (const auto& ex : d.examples) {
    for (const auto& [sid, sys] : ex.systems) {
      const SummaryScore s = Lite2(ex, sid, lookup, FnliMode::kP3c);
      std::map<std::string, double> f;
      for (const auto& c : s.breakdown) f[c.unit_id] = c.f;
      std::vector<const ContentUnit*> multi = UnitMultiset(ex, UnitKind::kScu);
      std::vector<int> ones(multi.size(), 1);
      std::vector<double> fs;
      for (const ContentUnit* u : multi) fs.push_back(f.at(u->unit_id));
      EXPECT_EQ(s.value, WeightedScore(ex, sid, multi, ones, fs).value);
    }
  }
}

TEST(Lite2xTest, EndpointsMatchLite2AndLite3) {
  const Dataset d = testing::MakeSyntheticDataset(13, {.n_examples = 15});
  LookupBackend lookup(testing::MakeRandomNliScores(d, 5), "v");
  for (const auto& ex : d.examples) {
    Selection all_scu;
    Selection all_stu;
    for (const auto& s : ex.sentences) {
      all_scu[s.sentence_id] = UnitChoice::kUseScu;
      all_stu[s.sentence_id] = UnitChoice::kUseStu;
    }
    for (const auto& [sid, sys] : ex.systems) {
      for (FnliMode m : {FnliMode::kP3c, FnliMode::kL3c, FnliMode::kP2c, FnliMode::kL2c}) {
        const auto a = Lite2x(ex, sid, lookup, m, all_scu);
        const auto b = Lite2(ex, sid, lookup, m);
        EXPECT_EQ(a.value, b.value);
        EXPECT_EQ(a.breakdown, b.breakdown);
        const auto c = Lite2x(ex, sid, lookup, m, all_stu);
        const auto e = Lite3(ex, sid, lookup, m);
        EXPECT_EQ(c.value, e.value);
        EXPECT_EQ(c.breakdown, e.breakdown);
      }
    }
  }
}

TEST(Lite2xTest, MixedSelectionUsesBothKinds) {
  const Dataset d = testing::MakeSyntheticDataset(14, {.n_examples = 1, .max_references = 2});
  const EvalExample& ex = d.examples[0];
  Selection sel;
  bool flip = false;
  for (const auto& s : ex.sentences) {
    sel[s.sentence_id] = flip ? UnitChoice::kUseStu : UnitChoice::kUseScu;
    flip = !flip;
  }
  const UnitPlan plan = PlanUnits(ex, Variant::kLite2x, &sel);
  for (std::size_t i = 0; i < plan.units.size(); ++i) {
    const ContentUnit* u = plan.units[i];
    const UnitChoice c = sel.at(*u->source_sentence_id);
    EXPECT_EQ(u->kind == UnitKind::kScu, c == UnitChoice::kUseScu);
    EXPECT_EQ(plan.weights[i], u->kind == UnitKind::kScu ? u->weight : 1);
  }
  Selection partial = sel;
  partial.erase(partial.begin());
  EXPECT_THROW(PlanUnits(ex, Variant::kLite2x, &partial), ValidationError);
  EXPECT_THROW(PlanUnits(ex, Variant::kLite2x, nullptr), std::invalid_argument);
}

TEST(ScoreDatasetTest, OrdersAndBatchesConsistently) {
  const Dataset d = testing::MakeSyntheticDataset(15, {.n_examples = 6});
  LookupBackend lookup(testing::MakeRandomNliScores(d, 6), "v");
  ScoreRequest req{Variant::kLite3, FnliMode::kP2c, std::nullopt, std::nullopt};
  const auto a = ScoreDataset(d, req, &lookup, nullptr, {1, 1});
  const auto b = ScoreDataset(d, req, &lookup, nullptr, {7, 5});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].value, b[i].value);
    EXPECT_EQ(a[i].example_id, b[i].example_id);
    if (i > 0) {
      EXPECT_LE(std::tie(a[i - 1].example_id, a[i - 1].system_id),
                std::tie(a[i].example_id, a[i].system_id));
    }
    EXPECT_EQ(a[i].value, Lite3(*d.Find(a[i].example_id), a[i].system_id, lookup,
                                FnliMode::kP2c).value);
  }
  ScoreRequest lite_pyr{Variant::kLitePyramid, FnliMode::kL3c, 5, 3};
  EXPECT_EQ(ScoreDataset(d, lite_pyr, nullptr).size(), a.size());
  ScoreRequest needs_backend{Variant::kLite2, FnliMode::kL3c, std::nullopt, std::nullopt};
  EXPECT_ANY_THROW(ScoreDataset(d, needs_backend, nullptr));
}

TEST(ScoreJsonTest, Shape) {
  const Dataset d = testing::MakeSyntheticDataset(16, {.n_examples = 1});
  const auto& ex = d.examples[0];
  const SummaryScore s = LitePyramid(ex, "sys0", 2, 3);
  const auto j = ScoreToJson(s);
  EXPECT_EQ(j["variant"], "lite_pyramid");
  EXPECT_TRUE(j.contains("sample_truncated"));
  EXPECT_EQ(j["unit_breakdown"].size(), s.breakdown.size());
  EXPECT_FALSE(ScoreToJson(PyramidGold(ex, "sys0")).contains("sample_truncated"));
  for (Variant v : {Variant::kPyramidGold, Variant::kLitePyramid, Variant::kLite2,
                    Variant::kLite3, Variant::kLite2x}) {
    EXPECT_EQ(ParseVariant(VariantName(v)), v);
  }
}

}  // namespace
}  // namespace pyreval
