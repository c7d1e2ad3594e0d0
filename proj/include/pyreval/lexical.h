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

#ifndef PYREVAL_LEXICAL_H_
#define PYREVAL_LEXICAL_H_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pyreval {

struct LexicalOptions {
  // Porter-stem every token. Off by default: plain lowercase unigrams.
  bool stem = false;
};

// Multiset of lowercased tokens.
class TokenBag {
 public:
  TokenBag() = default;
  explicit TokenBag(const std::vector<std::string>& tokens);

  std::size_t size() const { return total_; }
  bool empty() const { return total_ == 0; }
  int Count(std::string_view token) const;
  const std::map<std::string, int, std::less<>>& counts() const {
    return counts_;
  }
  // Sum over the vocabulary of min(count here, count there).
  std::size_t Overlap(const TokenBag& other) const;

  friend bool operator==(const TokenBag&, const TokenBag&) = default;

 private:
  std::map<std::string, int, std::less<>> counts_;
  std::size_t total_ = 0;
};

// Lowercases ASCII letters and splits on every maximal run of characters
// that are not ASCII alphanumerics. Bytes >= 0x80 (non-ASCII UTF-8) are kept
// inside tokens.
std::vector<std::string> Tokenize(std::string_view text,
                                  const LexicalOptions& options = {});
TokenBag MakeTokenBag(std::string_view text,
                      const LexicalOptions& options = {});

// ROUGE-1 F1 with clipped unigram counts. 0 when either side is empty or
// nothing overlaps.
double Rouge1F1(std::string_view a, std::string_view b,
                const LexicalOptions& options = {});
double Rouge1F1(const TokenBag& a, const TokenBag& b);

// Porter (1980) suffix stripper for a lowercase ASCII word.
std::string PorterStem(std::string_view word);

}  // namespace pyreval

#endif  // PYREVAL_LEXICAL_H_
