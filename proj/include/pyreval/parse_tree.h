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

#ifndef PYREVAL_PARSE_TREE_H_
#define PYREVAL_PARSE_TREE_H_

#include <string>
#include <string_view>
#include <vector>

namespace pyreval {

// A constituency tree node. Leaves carry a word and no label; every other
// node carries a non-empty label and at least one child.
struct ParseNode {
  std::string label;
  std::string word;
  std::vector<ParseNode> children;

  bool IsLeaf() const { return label.empty(); }
  bool IsPreterminal() const;
};

// Parses a bracketed tree such as "(S (NP (NN dog)) (VP (VBZ barks)))".
// Throws ValidationError(kMalformedParseTree) on unbalanced brackets, empty
// labels, childless nodes or trailing input.
ParseNode ParseBracketed(std::string_view text);

// Canonical single-space rendering.
std::string RenderBracketed(const ParseNode& root);

std::vector<std::string> TreeLeaves(const ParseNode& root);

// Number of labeled nodes on the deepest root-to-preterminal path.
int TreeDepth(const ParseNode& root);

// Maps PTB bracket/quote escapes (-LRB-, ``, ...) back to surface text.
std::string UnescapePtbToken(std::string_view token);

}  // namespace pyreval

#endif  // PYREVAL_PARSE_TREE_H_
