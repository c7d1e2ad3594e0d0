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

#include "pyreval/features.h"

#include "pyreval/errors.h"
#include "pyreval/util.h"

namespace pyreval {

const std::array<std::string_view, kNumTags> kTagOrder = {
    "WRB",  "RBR",    "ADVP", "VBG",  "$",    "''",   "WHADVP", "-RRB-", "JJR",
    "NAC",  "PRP",    "NNS",  "WP",   "VBZ",  "MD",   "WDT",    "NP",    "ADJP",
    "PDT",  "EX",     "UH",   "NN",   "NFP",  "SYM",  "PRP$",   "RBS",   "FRAG",
    "NX",   "CONJP",  "RP",   "WHPP", "CC",   "VBD",  "LS",     ".",     "SBAR",
    "TO",   "JJ",     "IN",   "VP",   "-LRB-", "S",   "QP",     "SQ",    "CD",
    "``",   "X",      "POS",  "XX",   "PP",   "PRT",  "JJS",    "HYPH",  ",",
    "RB",   "VBN",    ":",    "VBP",  "DT",   "VB",   "SINV",   "UCP",   "WHNP",
    "NNPS", "NNP"};

namespace {

int ExactTagIndex(std::string_view label) {
  for (std::size_t i = 0; i < kTagOrder.size(); ++i) {
    if (kTagOrder[i] == label) return static_cast<int>(i);
  }
  return -1;
}

void CountLabels(const ParseNode& node, FeatureVector& out, std::size_t* unknown) {
  if (node.IsLeaf()) return;
  const int idx = TagIndex(node.label);
  if (idx >= 0) {
    out[4 + static_cast<std::size_t>(idx)] += 1.0;
  } else if (unknown != nullptr) {
    ++*unknown;
  }
  for (const auto& child : node.children) CountLabels(child, out, unknown);
}

}  // namespace

int TagIndex(std::string_view label) {
  int idx = ExactTagIndex(label);
  if (idx >= 0) return idx;
  const std::size_t cut = label.find_first_of("-=", 1);
  if (cut == std::string_view::npos) return -1;
  return ExactTagIndex(label.substr(0, cut));
}

FeatureVector FeaturizeTree(const ParseNode& root, const FeatureOptions& options,
                            std::size_t* unknown_tags) {
  FeatureVector out{};
  const double words = static_cast<double>(TreeLeaves(root).size());
  const double depth = static_cast<double>(TreeDepth(root));
  out[0] = words;
  out[1] = static_cast<double>(Utf8Length(RenderBracketed(root)));
  out[2] = depth;
  if (options.invert_depth_ratio) {
    out[3] = depth > 0 ? words / depth : 0.0;
  } else {
    out[3] = words > 0 ? depth / words : 0.0;
  }
  CountLabels(root, out, unknown_tags);
  return out;
}

FeatureVector FeaturizeBracketed(std::string_view tree, const FeatureOptions& options,
                                 std::size_t* unknown_tags) {
  return FeaturizeTree(ParseBracketed(tree), options, unknown_tags);
}

FeatureVector Featurize(const ReferenceSentence& sentence,
                        const FeatureOptions& options, std::size_t* unknown_tags) {
  if (!sentence.parse_tree) {
    throw ValidationError(ErrorCode::kMissingField,
                          "sentence '" + sentence.sentence_id + "' has no parse_tree",
                          0, "", "parse_tree");
  }
  return FeaturizeBracketed(*sentence.parse_tree, options, unknown_tags);
}

}  // namespace pyreval
