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

#include "pyreval/parse_tree.h"

#include <gtest/gtest.h>

#include <random>

#include "support/synthetic.h"

namespace pyreval {
namespace {

TEST(ParseTreeTest, ReadsAndRenders) {
  const std::string text = "(ROOT (S (NP (DT The) (NN cat)) (VP (VBD sat)) (. .)))";
  const ParseNode root = ParseBracketed(text);
  EXPECT_EQ(root.label, "ROOT");
  EXPECT_EQ(RenderBracketed(root), text);
  EXPECT_EQ(TreeLeaves(root), (std::vector<std::string>{"The", "cat", "sat", "."}));
  // ROOT -> S -> NP -> DT -> The
  EXPECT_EQ(TreeDepth(root), 4);
}

TEST(ParseTreeTest, NormalizesWhitespace) {
  const ParseNode root = ParseBracketed("  (S\n  (NP (NN it))\t(VP (VBZ works)))  ");
  EXPECT_EQ(RenderBracketed(root), "(S (NP (NN it)) (VP (VBZ works)))");
}

TEST(ParseTreeTest, SingleLeafDepth) {
  EXPECT_EQ(TreeDepth(ParseBracketed("(NN x)")), 1);
}

TEST(ParseTreeTest, RejectsMalformed) {
  for (const char* bad : {"", "(", "(S (NP (NN a))", "(S (NP (NN a))))", "S (NN a)",
                          "(S (NN a)) (S (NN b))", "()"}) {
    EXPECT_ANY_THROW(ParseBracketed(bad)) << bad;
  }
}

TEST(ParseTreeTest, UnescapesPtbTokens) {
  EXPECT_EQ(UnescapePtbToken("-LRB-"), "(");
  EXPECT_EQ(UnescapePtbToken("-RRB-"), ")");
  EXPECT_EQ(UnescapePtbToken("word"), "word");
}

TEST(ParseTreeTest, RandomTreesRoundTrip) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> words;
    for (std::size_t i = 1 + rng() % 12; i > 0; --i) words.push_back("w" + std::to_string(i));
    const std::string text = testing::RandomTree(rng, words);
    const ParseNode root = ParseBracketed(text);
    EXPECT_EQ(RenderBracketed(root), text);
    std::vector<std::string> leaves = TreeLeaves(root);
    leaves.pop_back();  // the trailing period
    EXPECT_EQ(leaves, words);
  }
}

}  // namespace
}  // namespace pyreval
