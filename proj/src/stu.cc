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

#include <algorithm>
#include <map>
#include <optional>
#include <string_view>
#include <utility>

#include "pyreval/errors.h"
#include "pyreval/util.h"

namespace pyreval {
namespace {

std::string AsciiLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string Slice(const std::string& text, const CharSpan& span) {
  return std::string(Utf8Slice(text, span.begin, span.end));
}

struct Mention {
  CharSpan span;
  std::string replacement;
};

struct ResolvedChain {
  std::string name;
  bool usable = false;
  // (sentence_id, mention text) for every later mention, in order.
  std::vector<std::pair<std::string, std::string>> later;
};

struct ChainTable {
  std::map<int, ResolvedChain> chains;
  std::vector<int> order;  // chain ids by first appearance
};

ChainTable ResolveChains(const std::vector<const ReferenceSentence*>& sentences) {
  ChainTable table;
  for (const ReferenceSentence* s : sentences) {
    if (!s->coref_chains) continue;
    for (const auto& chain : *s->coref_chains) {
      std::vector<CharSpan> mentions = chain.mentions;
      std::sort(mentions.begin(), mentions.end(),
                [](const CharSpan& a, const CharSpan& b) {
                  return a.begin != b.begin ? a.begin < b.begin : a.end > b.end;
                });
      for (const auto& m : mentions) {
        const std::string text = TrimWhitespace(Slice(s->text, m));
        auto [it, inserted] = table.chains.try_emplace(chain.chain_id);
        if (inserted) {
          it->second.name = text;
          it->second.usable = !text.empty() && !IsPronoun(text);
          table.order.push_back(chain.chain_id);
        } else {
          it->second.later.emplace_back(s->sentence_id, text);
        }
      }
    }
  }
  return table;
}

// Mentions of usable chains inside `sentence`, each tagged with its
// chain's canonical name.
std::vector<Mention> Replacements(const ReferenceSentence& sentence,
                                  const ChainTable& table) {
  std::vector<Mention> out;
  if (!sentence.coref_chains) return out;
  for (const auto& chain : *sentence.coref_chains) {
    auto it = table.chains.find(chain.chain_id);
    if (it == table.chains.end() || !it->second.usable) continue;
    for (const auto& m : chain.mentions) out.push_back({m, it->second.name});
  }
  std::sort(out.begin(), out.end(), [](const Mention& a, const Mention& b) {
    return a.span.begin != b.span.begin ? a.span.begin < b.span.begin
                                        : a.span.end > b.span.end;
  });
  return out;
}

std::string ArgumentText(const std::string& text, const CharSpan& span,
                         const std::vector<Mention>& mentions) {
  std::string out;
  std::size_t cursor = span.begin;
  for (const auto& m : mentions) {
    if (!span.Contains(m.span) || m.span.begin < cursor) continue;
    out += Utf8Slice(text, cursor, m.span.begin);
    out += m.replacement;
    cursor = m.span.end;
  }
  out += Utf8Slice(text, cursor, span.end);
  return TrimWhitespace(out);
}

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// The whitespace-delimited token ending right before `verb_begin`.
std::optional<std::pair<CharSpan, std::string>> PrecedingToken(
    const std::string& text, std::size_t verb_begin) {
  std::size_t end = Utf8ByteOffset(text, verb_begin);
  while (end > 0 && IsSpace(text[end - 1])) --end;
  std::size_t begin = end;
  while (begin > 0 && !IsSpace(text[begin - 1])) --begin;
  if (begin == end) return std::nullopt;
  std::string_view view(text);
  CharSpan span{Utf8Length(view.substr(0, begin)), Utf8Length(view.substr(0, end))};
  return std::make_pair(span, std::string(view.substr(begin, end - begin)));
}

std::string JoinWords(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

std::vector<StuCandidate> FrameTriplets(const ReferenceSentence& sentence,
                                        const std::vector<Mention>& mentions,
                                        const StuOptions& options) {
  std::vector<StuCandidate> out;
  const std::string& text = sentence.text;
  for (std::size_t f = 0; f < sentence.srl_frames->size(); ++f) {
    const SrlFrame& frame = (*sentence.srl_frames)[f];
    std::vector<std::string> before;
    std::vector<CharSpan> before_spans;
    std::vector<const SrlArgument*> after;
    for (const auto& arg : frame.arguments) {
      if (options.excluded_roles.contains(arg.role)) continue;
      if (arg.position == ArgPosition::kBeforeVerb) {
        before.push_back(ArgumentText(text, arg.span, mentions));
        before_spans.push_back(arg.span);
      } else {
        after.push_back(&arg);
      }
    }

    std::string inserted;
    if (auto token = PrecedingToken(text, frame.verb.begin)) {
      const auto& [span, word] = *token;
      bool negation = false;
      bool be = false;
      if (frame.preceding_token) {
        negation = frame.preceding_token->is_negation_modifier;
        be = frame.preceding_token->is_be_verb;
      } else {
        be = IsBeVerb(word);
        for (const auto& arg : frame.arguments) {
          if (arg.role == "ARGM-NEG" && arg.span.Contains(span)) negation = true;
        }
      }
      const bool covered =
          std::any_of(before_spans.begin(), before_spans.end(),
                      [&](const CharSpan& s) { return s.Contains(span); });
      if ((negation || be) && !covered) inserted = word;
    }

    std::vector<std::string> head = before;
    head.push_back(inserted);
    head.push_back(TrimWhitespace(Slice(text, frame.verb)));
    if (after.empty()) {
      if (options.emit_bare_subject_verb && !before.empty()) {
        out.push_back({JoinWords(head), sentence.sentence_id,
                       static_cast<int>(f), -1, StuOrigin::kFrameTriplet});
      }
      continue;
    }
    for (std::size_t a = 0; a < after.size(); ++a) {
      std::vector<std::string> parts = head;
      parts.push_back(ArgumentText(text, after[a]->span, mentions));
      out.push_back({JoinWords(parts), sentence.sentence_id, static_cast<int>(f),
                     static_cast<int>(a), StuOrigin::kFrameTriplet});
    }
  }
  return out;
}

std::vector<StuCandidate> Templates(const ChainTable& table) {
  std::vector<StuCandidate> out;
  for (int id : table.order) {
    const ResolvedChain& chain = table.chains.at(id);
    if (!chain.usable) continue;
    std::set<std::string, std::less<>> seen;
    for (const auto& [sentence_id, mention] : chain.later) {
      if (mention.empty() || mention == chain.name || IsPronoun(mention)) continue;
      if (!seen.insert(mention).second) continue;
      out.push_back({chain.name + " is " + mention, sentence_id, -1, -1,
                     StuOrigin::kCorefTemplate});
    }
  }
  return out;
}

void RequireAnnotations(const ReferenceSentence& s, bool use_coref,
                        const std::string& example_id) {
  if (!s.srl_frames) {
    throw ValidationError(ErrorCode::kMissingField,
                          "sentence '" + s.sentence_id + "' has no srl_frames",
                          0, example_id, "srl_frames");
  }
  if (use_coref && !s.coref_chains) {
    throw ValidationError(ErrorCode::kMissingField,
                          "sentence '" + s.sentence_id + "' has no coref_chains",
                          0, example_id, "coref_chains");
  }
}

}  // namespace

std::string_view StuOriginName(StuOrigin origin) {
  return origin == StuOrigin::kFrameTriplet ? "frame_triplet" : "coref_template";
}

bool IsBeVerb(std::string_view token) {
  const std::string lower = AsciiLower(token);
  for (const char* be : kBeVerbs) {
    if (lower == be) return true;
  }
  return false;
}

bool IsPronoun(std::string_view mention) {
  static const std::set<std::string, std::less<>> kPronouns = {
      "i",     "me",    "my",     "mine",   "myself",     "you",
      "your",  "yours", "yourself", "yourselves", "he",   "him",
      "his",   "himself", "she",  "her",    "hers",       "herself",
      "it",    "its",   "itself", "we",     "us",         "our",
      "ours",  "ourselves", "they", "them", "their",      "theirs",
      "themselves", "this", "that", "these", "those",     "who",
      "whom",  "whose", "which",  "one"};
  return kPronouns.contains(AsciiLower(TrimWhitespace(mention)));
}

std::vector<StuCandidate> ExtractStus(const ReferenceSentence& sentence,
                                      bool use_coref,
                                      const StuOptions& options) {
  RequireAnnotations(sentence, use_coref, "");
  ChainTable table;
  if (use_coref) table = ResolveChains({&sentence});
  std::vector<StuCandidate> out =
      FrameTriplets(sentence, Replacements(sentence, table), options);
  if (use_coref) {
    for (auto& t : Templates(table)) out.push_back(std::move(t));
  }
  return out;
}

std::vector<StuCandidate> ExtractExampleStus(const EvalExample& example,
                                             bool use_coref,
                                             const StuOptions& options) {
  std::map<std::size_t, std::vector<const ReferenceSentence*>> by_reference;
  for (const auto& s : example.sentences) {
    RequireAnnotations(s, use_coref, example.example_id);
    by_reference[s.reference_index].push_back(&s);
  }
  std::map<std::size_t, ChainTable> tables;
  if (use_coref) {
    for (const auto& [ref, sentences] : by_reference) {
      tables.emplace(ref, ResolveChains(sentences));
    }
  }
  static const ChainTable kEmpty;
  std::vector<StuCandidate> out;
  for (const auto& s : example.sentences) {
    auto it = tables.find(s.reference_index);
    const ChainTable& table = it == tables.end() ? kEmpty : it->second;
    for (auto& c : FrameTriplets(s, Replacements(s, table), options)) {
      out.push_back(std::move(c));
    }
  }
  for (const auto& [ref, table] : tables) {
    for (auto& t : Templates(table)) out.push_back(std::move(t));
  }
  return out;
}

std::vector<ContentUnit> StusForExample(const EvalExample& example,
                                        bool use_coref,
                                        const StuOptions& options) {
  std::map<std::string, int> triplet_count;
  std::map<std::string, int> template_count;
  std::vector<ContentUnit> out;
  for (auto& c : ExtractExampleStus(example, use_coref, options)) {
    ContentUnit u;
    const bool triplet = c.origin == StuOrigin::kFrameTriplet;
    auto& counter = triplet ? triplet_count : template_count;
    u.unit_id = c.sentence_id + (triplet ? ".stu" : ".coref") +
                std::to_string(++counter[c.sentence_id]);
    u.text = std::move(c.text);
    u.weight = 1;
    u.kind = UnitKind::kStu;
    u.source_sentence_id = c.sentence_id;
    u.extra["origin"] = std::string(StuOriginName(c.origin));
    if (c.frame_index >= 0) u.extra["frame_index"] = c.frame_index;
    if (c.after_arg_index >= 0) u.extra["after_arg_index"] = c.after_arg_index;
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace pyreval
