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

#ifndef PYREVAL_CORPUS_H_
#define PYREVAL_CORPUS_H_

// Evaluation dataset model: references, reference sentences with their
// SRL / coreference / constituency annotations, content units (SCUs and
// STUs), and per-system summaries with gold labels.
//
// All spans are half-open [begin, end) code-point offsets into the owning
// sentence text.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace pyreval {

inline constexpr int kSchemaVersion = 1;

enum class UnitKind { kScu, kStu };
std::string_view UnitKindName(UnitKind kind);

struct ContentUnit {
  std::string unit_id;
  std::string text;
  int weight = 1;
  UnitKind kind = UnitKind::kScu;
  std::optional<std::string> source_sentence_id;
  nlohmann::json extra = nlohmann::json::object();
};

struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool Contains(const CharSpan& other) const {
    return begin <= other.begin && other.end <= end;
  }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

enum class ArgPosition { kBeforeVerb, kAfterVerb };

struct SrlArgument {
  std::string role;
  CharSpan span;
  ArgPosition position = ArgPosition::kAfterVerb;
  nlohmann::json extra = nlohmann::json::object();
};

// Flags for the token immediately preceding the verb.
struct PrecedingTokenFlags {
  bool is_negation_modifier = false;
  bool is_be_verb = false;
};

struct SrlFrame {
  CharSpan verb;
  std::vector<SrlArgument> arguments;
  // Absent in the file means "derive from the text" (see stu.h).
  std::optional<PrecedingTokenFlags> preceding_token;
  nlohmann::json extra = nlohmann::json::object();
};

// Mentions of one entity inside a sentence. chain_id is shared by all
// sentences of the same reference; the canonical name of a chain is its
// first mention in reference order.
struct CorefChain {
  int chain_id = 0;
  std::vector<CharSpan> mentions;
};

struct ReferenceSentence {
  std::string sentence_id;
  std::size_t reference_index = 0;
  std::string text;
  std::optional<std::string> parse_tree;
  std::optional<std::vector<SrlFrame>> srl_frames;
  std::optional<std::vector<CorefChain>> coref_chains;
  nlohmann::json extra = nlohmann::json::object();
};

enum class Presence { kNotPresent, kPresent };

struct SystemSummary {
  std::string system_id;
  std::string text;
  std::map<std::string, Presence> gold_presence;
  std::optional<double> gold_human_score;
  nlohmann::json extra = nlohmann::json::object();
};

struct EvalExample {
  std::string example_id;
  bool coref_enabled = false;
  std::vector<std::string> references;
  std::vector<ReferenceSentence> sentences;
  std::vector<ContentUnit> units;
  std::map<std::string, SystemSummary> systems;
  nlohmann::json extra = nlohmann::json::object();

  const ReferenceSentence* FindSentence(std::string_view sentence_id) const;
  const ContentUnit* FindUnit(std::string_view unit_id) const;
  std::size_t CountUnits(UnitKind kind) const;
};

struct Dataset {
  std::vector<EvalExample> examples;

  const EvalExample* Find(std::string_view example_id) const;
};

struct PresenceVoteSet {
  std::string example_id;
  std::string system_id;
  std::string unit_id;
  std::vector<bool> votes;
};

struct NliScoreRecord {
  std::string example_id;
  std::string system_id;
  std::string unit_id;
  std::array<double, 3> logits{};  // entail, neutral, contradict
};

enum class Schema { kExamples, kPresenceVotes, kNliScores };

using LoadedData = std::variant<Dataset, std::vector<PresenceVoteSet>,
                                std::vector<NliScoreRecord>>;

// Loads and fully validates a JSONL file. Throws ValidationError carrying the
// line of the first offending record.
LoadedData LoadDataset(const std::string& path, Schema schema);
Dataset LoadExamples(const std::string& path);
std::vector<PresenceVoteSet> LoadPresenceVotes(const std::string& path);
std::vector<NliScoreRecord> LoadNliScores(const std::string& path);

// In-memory variants of the loaders, used by tests and the CLI.
Dataset ParseExamples(std::string_view jsonl);
std::vector<PresenceVoteSet> ParsePresenceVotes(std::string_view jsonl);
std::vector<NliScoreRecord> ParseNliScores(std::string_view jsonl);

// Checks every invariant of one example. `line` is reported in errors.
void ValidateExample(const EvalExample& example, std::size_t line = 0);

EvalExample ExampleFromJson(const nlohmann::json& record, std::size_t line = 0);
nlohmann::json ExampleToJson(const EvalExample& example);
ContentUnit UnitFromJson(const nlohmann::json& record,
                         const std::string& example_id, std::size_t line);
nlohmann::json UnitToJson(const ContentUnit& unit);

// Canonical JSONL: one record per line, keys sorted, LF line endings.
std::string SerializeExamples(const Dataset& dataset);
std::string SerializeNliScores(const std::vector<NliScoreRecord>& records);

// Majority vote with ties resolved to not-present.
Presence ResolvePresence(const std::vector<bool>& votes);

// Resolves every vote set and writes the label into the matching summary's
// gold_presence. Throws ValidationError for votes on unknown ids.
void ApplyVotes(Dataset& dataset, const std::vector<PresenceVoteSet>& votes);

// Every unit of `kind` repeated `weight` times, in stable
// (unit order, repetition) order.
std::vector<const ContentUnit*> UnitMultiset(const EvalExample& example,
                                             UnitKind kind);

}  // namespace pyreval

#endif  // PYREVAL_CORPUS_H_
