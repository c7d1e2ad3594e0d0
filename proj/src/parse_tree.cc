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

#include <algorithm>
#include <cctype>

#include "pyreval/errors.h"

namespace pyreval {
namespace {

bool IsSpace(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

class BracketReader {
 public:
  explicit BracketReader(std::string_view text) : text_(text) {}

  ParseNode ReadRoot() {
    SkipSpace();
    if (AtEnd() || Peek() != '(') Fail("tree must start with '('");
    ParseNode root = ReadNode();
    SkipSpace();
    if (!AtEnd()) Fail("unexpected input after the root node");
    return root;
  }

 private:
  ParseNode ReadNode() {
    ++pos_;  // '('
    ParseNode node;
    node.label = ReadSymbol();
    if (node.label.empty()) Fail("empty node label");
    for (;;) {
      SkipSpace();
      if (AtEnd()) Fail("unbalanced brackets");
      const char c = Peek();
      if (c == ')') {
        ++pos_;
        break;
      }
      if (c == '(') {
        node.children.push_back(ReadNode());
      } else {
        ParseNode leaf;
        leaf.word = ReadSymbol();
        node.children.push_back(std::move(leaf));
      }
    }
    if (node.children.empty()) Fail("node '" + node.label + "' has no children");
    return node;
  }

  std::string ReadSymbol() {
    const std::size_t start = pos_;
    while (!AtEnd() && !IsSpace(Peek()) && Peek() != '(' && Peek() != ')') {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  void SkipSpace() {
    while (!AtEnd() && IsSpace(Peek())) ++pos_;
  }

  bool AtEnd() const { return pos_ >= text_.size(); }
  char Peek() const { return text_[pos_]; }

  [[noreturn]] void Fail(const std::string& why) const {
    throw ValidationError(ErrorCode::kMalformedParseTree,
                          why + " (offset " + std::to_string(pos_) + ")");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void Render(const ParseNode& node, std::string& out) {
  if (node.IsLeaf()) {
    out += node.word;
    return;
  }
  out += '(';
  out += node.label;
  for (const auto& child : node.children) {
    out += ' ';
    Render(child, out);
  }
  out += ')';
}

void CollectLeaves(const ParseNode& node, std::vector<std::string>& out) {
  if (node.IsLeaf()) {
    out.push_back(node.word);
    return;
  }
  for (const auto& child : node.children) CollectLeaves(child, out);
}

}  // namespace

bool ParseNode::IsPreterminal() const {
  return !IsLeaf() && std::all_of(children.begin(), children.end(),
                                  [](const ParseNode& c) { return c.IsLeaf(); });
}

ParseNode ParseBracketed(std::string_view text) {
  return BracketReader(text).ReadRoot();
}

std::string RenderBracketed(const ParseNode& root) {
  std::string out;
  Render(root, out);
  return out;
}

std::vector<std::string> TreeLeaves(const ParseNode& root) {
  std::vector<std::string> leaves;
  CollectLeaves(root, leaves);
  return leaves;
}

int TreeDepth(const ParseNode& root) {
  if (root.IsLeaf()) return 0;
  int deepest = 0;
  for (const auto& child : root.children) {
    deepest = std::max(deepest, TreeDepth(child));
  }
  return deepest + 1;
}

std::string UnescapePtbToken(std::string_view token) {
  if (token == "-LRB-") return "(";
  if (token == "-RRB-") return ")";
  if (token == "-LSB-") return "[";
  if (token == "-RSB-") return "]";
  if (token == "-LCB-") return "{";
  if (token == "-RCB-") return "}";
  if (token == "``" || token == "''") return "\"";
  return std::string(token);
}

}  // namespace pyreval
