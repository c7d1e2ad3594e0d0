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

#include "pyreval/lexical.h"

#include <gtest/gtest.h>

#include <map>
#include <random>

namespace pyreval {
namespace {

TEST(TokenizeTest, LowercasesAndSplitsOnPunctuation) {
  EXPECT_EQ(Tokenize("The 62-year-old, jailed."),
            (std::vector<std::string>{"the", "62", "year", "old", "jailed"}));
  EXPECT_TRUE(Tokenize(" .,;").empty());
}

TEST(TokenizeTest, KeepsNonAsciiInsideTokens) {
  EXPECT_EQ(Tokenize("Caf\xc3\xa9 open"),
            (std::vector<std::string>{"caf\xc3\xa9", "open"}));
}

TEST(PorterStemTest, ClassicVocabulary) {
  const std::map<std::string, std::string> cases = {
      {"caresses", "caress"}, {"ponies", "poni"},     {"cats", "cat"},
      {"feed", "feed"},       {"agreed", "agre"},     {"plastered", "plaster"},
      {"motoring", "motor"},  {"sing", "sing"},       {"conflated", "conflat"},
      {"hopping", "hop"},     {"filing", "file"},     {"happy", "happi"},
      {"relational", "relat"}, {"generalization", "gener"}, {"running", "run"}};
  for (const auto& [word, stem] : cases) EXPECT_EQ(PorterStem(word), stem) << word;
}

TEST(Rouge1Test, HandComputed) {
  // overlap 2, |a| = 3, |b| = 4: P = 2/4, R = 2/3, F = 4/7
  EXPECT_DOUBLE_EQ(Rouge1F1("a b c", "a b d e"), 4.0 / 7.0);
  EXPECT_EQ(Rouge1F1("x", "y"), 0.0);
  EXPECT_EQ(Rouge1F1("", "y"), 0.0);
  EXPECT_EQ(Rouge1F1("Same words", "same WORDS"), 1.0);
  EXPECT_DOUBLE_EQ(Rouge1F1("a a b", "a c"), 2.0 * (1.0 / 2) * (1.0 / 3) / (1.0 / 2 + 1.0 / 3));
}

TEST(Rouge1Test, StemmingOption) {
  LexicalOptions stem{true};
  EXPECT_LT(Rouge1F1("cats running", "cat run"), 1.0);
  EXPECT_EQ(Rouge1F1("cats running", "cat run", stem), 1.0);
}

// Clipped overlap recomputed by pairing tokens off one by one.
double BruteRouge(const std::vector<std::string>& a, std::vector<std::string> b) {
  if (a.empty() || b.empty()) return 0.0;
  const double nb = static_cast<double>(b.size());
  double overlap = 0;
  for (const auto& t : a) {
    for (auto it = b.begin(); it != b.end(); ++it) {
      if (*it == t) {
        b.erase(it);
        overlap += 1;
        break;
      }
    }
  }
  if (overlap == 0) return 0.0;
  const double p = overlap / nb;
  const double r = overlap / static_cast<double>(a.size());
  return 2 * p * r / (p + r);
}

TEST(Rouge1Test, MatchesPairingOracleAndIsSymmetric) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string sa;
    std::string sb;
    std::vector<std::string> ta;
    std::vector<std::string> tb;
    for (std::size_t i = rng() % 8; i > 0; --i) {
      ta.push_back(vocab[rng() % 5]);
      sa += ta.back() + " ";
    }
    for (std::size_t i = rng() % 8; i > 0; --i) {
      tb.push_back(vocab[rng() % 5]);
      sb += tb.back() + " ";
    }
    const double f = Rouge1F1(sa, sb);
    EXPECT_NEAR(f, BruteRouge(ta, tb), 1e-15);
    EXPECT_EQ(f, Rouge1F1(sb, sa));
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
}

TEST(TokenBagTest, Counts) {
  TokenBag bag = MakeTokenBag("a b a");
  EXPECT_EQ(bag.size(), 3u);
  EXPECT_EQ(bag.Count("a"), 2);
  EXPECT_EQ(bag.Count("z"), 0);
  EXPECT_EQ(bag.Overlap(MakeTokenBag("a a a c")), 2u);
}

}  // namespace
}  // namespace pyreval
