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

#ifndef PYREVAL_FEATURES_H_
#define PYREVAL_FEATURES_H_

// 69-dim syntactic features of a reference sentence, read off its
// bracketed constituency parse.
//
//   [0]      sentence length in words (tree leaves)
//   [1]      length in characters of the canonical bracketed rendering
//   [2]      tree depth (labeled nodes on the deepest root-to-leaf path)
//   [3]      depth / length (length / depth with invert_depth_ratio)
//   [4..68]  label counts in kTagOrder

#include <array>
#include <cstddef>
#include <string_view>

#include "pyreval/corpus.h"
#include "pyreval/parse_tree.h"

namespace pyreval {

inline constexpr std::size_t kNumTags = 65;
inline constexpr std::size_t kFeatureDim = 4 + kNumTags;

extern const std::array<std::string_view, kNumTags> kTagOrder;

using FeatureVector = std::array<double, kFeatureDim>;

struct FeatureOptions {
  bool invert_depth_ratio = false;
};

// Index of `label` in kTagOrder, trying the label with function tags
// ("NP-SBJ-1", "PP=2") stripped when the raw label is unknown; -1 if none.
int TagIndex(std::string_view label);

// `unknown_tags`, when given, is incremented once per uncounted label.
FeatureVector FeaturizeTree(const ParseNode& root, const FeatureOptions& options = {},
                            std::size_t* unknown_tags = nullptr);

// Throws ValidationError: kMalformedParseTree, or kMissingField when the
// sentence has no parse.
FeatureVector FeaturizeBracketed(std::string_view tree,
                                 const FeatureOptions& options = {},
                                 std::size_t* unknown_tags = nullptr);
FeatureVector Featurize(const ReferenceSentence& sentence,
                        const FeatureOptions& options = {},
                        std::size_t* unknown_tags = nullptr);

}  // namespace pyreval

#endif  // PYREVAL_FEATURES_H_
