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

#include "pyreval/stu.h"

#include <gtest/gtest.h>

#include "pyreval/corpus.h"
#include "pyreval/errors.h"
#include "support/synthetic.h"

namespace pyreval {
namespace {

std::vector<std::string> Texts(const std::vector<StuCandidate>& c) {
  std::vector<std::string> out;
  for (const auto& x : c) out.push_back(x.text);
  return out;
}

EvalExample Load(const std::string& name) {
  return LoadExamples(testing::DataPath(name)).examples.at(0);
}

TEST(StuTest, SneijderYieldsTwoTriplets) {
  const EvalExample ex = Load("sneijder.jsonl");
  const auto stus = ExtractExampleStus(ex, false);
  EXPECT_EQ(Texts(stus),
            (std::vector<std::string>{
                "Netherlands midfielder Wesley Sneijder joined French Ligue 1 side Nice",
                "Netherlands midfielder Wesley Sneijder joined on a free transfer"}));
  EXPECT_EQ(stus[0].frame_index, 0);
  EXPECT_EQ(stus[1].after_arg_index, 1);
}

TEST(StuTest, NevinWithCoreference) {
  const EvalExample ex = Load("nevin.jsonl");
  const auto stus = ExtractExampleStus(ex, true);
  EXPECT_EQ(Texts(stus),
            (std::vector<std::string>{
                "Catherine Nevin plotted the murder",
                "Catherine Nevin plotted in 1996",
                "Catherine Nevin being jailed for life",
                "Catherine Nevin being jailed in 2000",
                "Catherine Nevin being jailed after being convicted of murdering him with a "
                "hired gunman at their pub",
                "being convicted of murdering him with a hired gunman at their pub",
                "murdering him",
                "murdering with a hired gunman",
                "murdering at their pub",
                "Catherine Nevin is 62-year-old",
            }));
  std::size_t frames = 0;
  for (const auto& s : stus) frames += s.origin == StuOrigin::kFrameTriplet ? 1 : 0;
  EXPECT_EQ(frames, 9u);
  EXPECT_EQ(stus.back().origin, StuOrigin::kCorefTemplate);
}

TEST(StuTest, NevinWithoutCoreference) {
  const EvalExample ex = Load("nevin.jsonl");
  const auto stus = ExtractExampleStus(ex, false);
  ASSERT_EQ(stus.size(), 9u);
  EXPECT_EQ(stus[2].text, "62-year-old being jailed for life");
}

TEST(StuTest, UnitsCarryIdsAndProvenance) {
  const EvalExample ex = Load("nevin.jsonl");
  const auto units = StusForExample(ex, true);
  ASSERT_EQ(units.size(), 10u);
  EXPECT_EQ(units[0].unit_id, "s0.stu1");
  EXPECT_EQ(units[2].unit_id, "s1.stu1");
  EXPECT_EQ(units[2].extra["frame_index"], 0);
  EXPECT_EQ(units.back().extra["origin"], "coref_template");
  EXPECT_NE(units.back().unit_id.find(".coref"), std::string::npos);
  for (const auto& u : units) {
    EXPECT_EQ(u.kind, UnitKind::kStu);
    EXPECT_EQ(u.weight, 1);
    ASSERT_TRUE(u.source_sentence_id.has_value());
  }
  EvalExample merged = ex;
  for (const auto& u : units) merged.units.push_back(u);
  EXPECT_NO_THROW(ValidateExample(merged));
}

ReferenceSentence Sentence(const std::string& text) {
  ReferenceSentence s;
  s.sentence_id = "s";
  s.text = text;
  s.srl_frames.emplace();
  return s;
}

CharSpan Find(const std::string& text, const std::string& sub, std::size_t from = 0) {
  const std::size_t b = text.find(sub, from);
  return {b, b + sub.size()};
}

TEST(StuTest, NegationTokenIsRestored) {
  const std::string t = "The plan did not pass the vote";
  ReferenceSentence s = Sentence(t);
  SrlFrame f;
  f.verb = Find(t, "pass");
  f.arguments = {{"ARG1", Find(t, "The plan"), ArgPosition::kBeforeVerb},
                 {"ARGM-NEG", Find(t, "not"), ArgPosition::kBeforeVerb},
                 {"ARG2", Find(t, "the vote"), ArgPosition::kAfterVerb}};
  s.srl_frames->push_back(f);
  EXPECT_EQ(Texts(ExtractStus(s, false)), std::vector<std::string>{"The plan not pass the vote"});

  StuOptions keep;
  keep.excluded_roles.clear();
  EXPECT_EQ(Texts(ExtractStus(s, false, keep)),
            std::vector<std::string>{"The plan not pass the vote"});
}

TEST(StuTest, ExplicitFlagsOverrideDerivation) {
  const std::string t = "Prices never rose again";
  ReferenceSentence s = Sentence(t);
  SrlFrame f;
  f.verb = Find(t, "rose");
  f.arguments = {{"ARG1", Find(t, "Prices"), ArgPosition::kBeforeVerb},
                 {"ARGM-TMP", Find(t, "again"), ArgPosition::kAfterVerb}};
  s.srl_frames->push_back(f);
  EXPECT_EQ(Texts(ExtractStus(s, false)), std::vector<std::string>{"Prices rose again"});
  (*s.srl_frames)[0].preceding_token = PrecedingTokenFlags{true, false};
  EXPECT_EQ(Texts(ExtractStus(s, false)), std::vector<std::string>{"Prices never rose again"});
}

TEST(StuTest, FramesWithoutAfterArguments) {
  const std::string t = "The storm passed";
  ReferenceSentence s = Sentence(t);
  SrlFrame f;
  f.verb = Find(t, "passed");
  f.arguments = {{"ARG1", Find(t, "The storm"), ArgPosition::kBeforeVerb}};
  s.srl_frames->push_back(f);
  EXPECT_TRUE(ExtractStus(s, false).empty());
  StuOptions bare;
  bare.emit_bare_subject_verb = true;
  EXPECT_EQ(Texts(ExtractStus(s, false, bare)), std::vector<std::string>{"The storm passed"});
}

TEST(StuTest, ExcludedRolesAreDropped) {
  const std::string t = "He quickly signed the deal";
  ReferenceSentence s = Sentence(t);
  SrlFrame f;
  f.verb = Find(t, "signed");
  f.arguments = {{"ARG0", Find(t, "He"), ArgPosition::kBeforeVerb},
                 {"ARGM-MNR", Find(t, "quickly"), ArgPosition::kBeforeVerb},
                 {"ARG1", Find(t, "the deal"), ArgPosition::kAfterVerb}};
  s.srl_frames->push_back(f);
  EXPECT_EQ(Texts(ExtractStus(s, false)),
            std::vector<std::string>{"He quickly signed the deal"});
  StuOptions opts;
  opts.excluded_roles = {"ARGM-MNR"};
  EXPECT_EQ(Texts(ExtractStus(s, false, opts)), std::vector<std::string>{"He signed the deal"});
}

TEST(StuTest, PronounFirstChainsAreNotCanonical) {
  const std::string t1 = "She won the final";
  const std::string t2 = "Serena Williams lifted the trophy";
  EvalExample ex;
  ex.example_id = "e";
  ex.references = {t1 + " " + t2};
  ReferenceSentence a = Sentence(t1);
  a.sentence_id = "a";
  a.srl_frames->push_back({Find(t1, "won"),
                           {{"ARG0", Find(t1, "She"), ArgPosition::kBeforeVerb},
                            {"ARG1", Find(t1, "the final"), ArgPosition::kAfterVerb}},
                           std::nullopt,
                           {}});
  a.coref_chains = std::vector<CorefChain>{{1, {Find(t1, "She")}}};
  ReferenceSentence b = Sentence(t2);
  b.sentence_id = "b";
  b.srl_frames->push_back({Find(t2, "lifted"),
                           {{"ARG0", Find(t2, "Serena Williams"), ArgPosition::kBeforeVerb},
                            {"ARG1", Find(t2, "the trophy"), ArgPosition::kAfterVerb}},
                           std::nullopt,
                           {}});
  b.coref_chains = std::vector<CorefChain>{{1, {Find(t2, "Serena Williams")}}};
  ex.sentences = {a, b};
  EXPECT_EQ(Texts(ExtractExampleStus(ex, true)),
            (std::vector<std::string>{"She won the final", "Serena Williams lifted the trophy"}));
}

TEST(StuTest, MissingAnnotationsAreValidationErrors) {
  ReferenceSentence s;
  s.sentence_id = "s";
  s.text = "x";
  EXPECT_THROW(ExtractStus(s, false), ValidationError);
  s.srl_frames.emplace();
  EXPECT_THROW(ExtractStus(s, true), ValidationError);
  EXPECT_TRUE(ExtractStus(s, false).empty());
}

TEST(StuTest, BeVerbsAndPronouns) {
  for (const char* w : kBeVerbs) EXPECT_TRUE(IsBeVerb(w));
  EXPECT_TRUE(IsBeVerb("Was"));
  EXPECT_FALSE(IsBeVerb("has"));
  EXPECT_TRUE(IsPronoun("Him"));
  EXPECT_FALSE(IsPronoun("62-year-old"));
}

}  // namespace
}  // namespace pyreval
