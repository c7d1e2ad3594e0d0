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

#include "pyreval/corpus.h"

#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "pyreval/errors.h"
#include "pyreval/lexical.h"
#include "pyreval/parse_tree.h"
#include "pyreval/util.h"

namespace pyreval {
namespace {

using nlohmann::json;

// Reads typed fields out of one JSON object, reporting the record's line,
// example id and dotted field path on failure.
class FieldReader {
 public:
  FieldReader(const json& object, std::size_t line, std::string example_id,
              std::string path)
      : object_(object),
        line_(line),
        example_id_(std::move(example_id)),
        path_(std::move(path)) {
    if (!object_.is_object()) {
      Fail(ErrorCode::kWrongType, path_.empty() ? "record" : path_,
           "expected a JSON object");
    }
  }

  bool Has(const char* key) const {
    auto it = object_.find(key);
    return it != object_.end() && !it->is_null();
  }

  const json& Get(const char* key) const {
    auto it = object_.find(key);
    if (it == object_.end() || it->is_null()) {
      Fail(ErrorCode::kMissingField, Path(key), "required field is missing");
    }
    return *it;
  }

  std::string String(const char* key) const {
    const json& v = Get(key);
    if (!v.is_string()) Fail(ErrorCode::kWrongType, Path(key), "expected a string");
    return v.get<std::string>();
  }

  bool Bool(const char* key, bool fallback) const {
    if (!Has(key)) return fallback;
    const json& v = Get(key);
    if (!v.is_boolean()) Fail(ErrorCode::kWrongType, Path(key), "expected a boolean");
    return v.get<bool>();
  }

  long long Integer(const char* key) const {
    const json& v = Get(key);
    if (!v.is_number_integer()) {
      Fail(ErrorCode::kWrongType, Path(key), "expected an integer");
    }
    return v.get<long long>();
  }

  double Number(const char* key) const {
    const json& v = Get(key);
    if (!v.is_number()) Fail(ErrorCode::kWrongType, Path(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) Fail(ErrorCode::kInvalidValue, Path(key), "must be finite");
    return d;
  }

  const json& Array(const char* key) const {
    const json& v = Get(key);
    if (!v.is_array()) Fail(ErrorCode::kWrongType, Path(key), "expected an array");
    return v;
  }

  const json& Object(const char* key) const {
    const json& v = Get(key);
    if (!v.is_object()) Fail(ErrorCode::kWrongType, Path(key), "expected an object");
    return v;
  }

  // Collects keys that are not in `known`, for pass-through.
  json Extra(std::initializer_list<const char*> known) const {
    json extra = json::object();
    for (auto it = object_.begin(); it != object_.end(); ++it) {
      bool is_known = false;
      for (const char* k : known) {
        if (it.key() == k) {
          is_known = true;
          break;
        }
      }
      if (!is_known) extra[it.key()] = it.value();
    }
    return extra;
  }

  std::string Path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  [[noreturn]] void Fail(ErrorCode code, const std::string& field,
                         const std::string& why) const {
    throw ValidationError(code, why, line_, example_id_, field);
  }

  std::size_t line() const { return line_; }
  const std::string& example_id() const { return example_id_; }

 private:
  const json& object_;
  std::size_t line_;
  std::string example_id_;
  std::string path_;
};

std::string Indexed(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

CharSpan SpanFromJson(const json& v, const FieldReader& owner,
                      const std::string& field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_unsigned() ||
      !v[1].is_number_unsigned()) {
    owner.Fail(ErrorCode::kWrongType, field,
               "expected a [begin, end] pair of non-negative integers");
  }
  return CharSpan{v[0].get<std::size_t>(), v[1].get<std::size_t>()};
}

json SpanToJson(const CharSpan& span) { return json::array({span.begin, span.end}); }

ArgPosition PositionFromString(const std::string& s, const FieldReader& owner,
                               const std::string& field) {
  if (s == "before_verb") return ArgPosition::kBeforeVerb;
  if (s == "after_verb") return ArgPosition::kAfterVerb;
  owner.Fail(ErrorCode::kInvalidValue, field,
             "position must be 'before_verb' or 'after_verb', got '" + s + "'");
}

SrlFrame FrameFromJson(const json& v, std::size_t line,
                       const std::string& example_id, const std::string& path) {
  FieldReader r(v, line, example_id, path);
  SrlFrame frame;
  frame.verb = SpanFromJson(r.Get("verb"), r, r.Path("verb"));
  const json& args = r.Array("arguments");
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string apath = Indexed(r.Path("arguments"), i);
    FieldReader ar(args[i], line, example_id, apath);
    SrlArgument arg;
    arg.role = ar.String("role");
    arg.span = SpanFromJson(ar.Get("span"), ar, ar.Path("span"));
    arg.position = PositionFromString(ar.String("position"), ar, ar.Path("position"));
    arg.extra = ar.Extra({"role", "span", "position"});
    frame.arguments.push_back(std::move(arg));
  }
  if (r.Has("preceding_token")) {
    FieldReader pr(r.Object("preceding_token"), line, example_id,
                   r.Path("preceding_token"));
    PrecedingTokenFlags flags;
    flags.is_negation_modifier = pr.Bool("is_negation_modifier", false);
    flags.is_be_verb = pr.Bool("is_be_verb", false);
    frame.preceding_token = flags;
  }
  frame.extra = r.Extra({"verb", "arguments", "preceding_token"});
  return frame;
}

json FrameToJson(const SrlFrame& frame) {
  json out = frame.extra;
  out["verb"] = SpanToJson(frame.verb);
  json args = json::array();
  for (const auto& arg : frame.arguments) {
    json a = arg.extra;
    a["role"] = arg.role;
    a["span"] = SpanToJson(arg.span);
    a["position"] = arg.position == ArgPosition::kBeforeVerb ? "before_verb" : "after_verb";
    args.push_back(std::move(a));
  }
  out["arguments"] = std::move(args);
  if (frame.preceding_token) {
    out["preceding_token"] = {
        {"is_negation_modifier", frame.preceding_token->is_negation_modifier},
        {"is_be_verb", frame.preceding_token->is_be_verb}};
  }
  return out;
}

ReferenceSentence SentenceFromJson(const json& v, std::size_t line,
                                   const std::string& example_id,
                                   const std::string& path) {
  FieldReader r(v, line, example_id, path);
  ReferenceSentence s;
  s.sentence_id = r.String("sentence_id");
  s.text = r.String("text");
  if (r.Has("reference_index")) {
    const long long idx = r.Integer("reference_index");
    if (idx < 0) {
      r.Fail(ErrorCode::kBadReferenceIndex, r.Path("reference_index"),
             "must be non-negative");
    }
    s.reference_index = static_cast<std::size_t>(idx);
  }
  if (r.Has("parse_tree")) s.parse_tree = r.String("parse_tree");
  if (r.Has("srl_frames")) {
    const json& frames = r.Array("srl_frames");
    std::vector<SrlFrame> parsed;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      parsed.push_back(FrameFromJson(frames[i], line, example_id,
                                     Indexed(r.Path("srl_frames"), i)));
    }
    s.srl_frames = std::move(parsed);
  }
  if (r.Has("coref_chains")) {
    const json& chains = r.Array("coref_chains");
    std::vector<CorefChain> parsed;
    for (std::size_t i = 0; i < chains.size(); ++i) {
      const std::string cpath = Indexed(r.Path("coref_chains"), i);
      FieldReader cr(chains[i], line, example_id, cpath);
      CorefChain chain;
      chain.chain_id = static_cast<int>(cr.Integer("chain_id"));
      const json& mentions = cr.Array("mentions");
      for (std::size_t m = 0; m < mentions.size(); ++m) {
        chain.mentions.push_back(
            SpanFromJson(mentions[m], cr, Indexed(cr.Path("mentions"), m)));
      }
      parsed.push_back(std::move(chain));
    }
    s.coref_chains = std::move(parsed);
  }
  s.extra = r.Extra({"sentence_id", "reference_index", "text", "parse_tree",
                     "srl_frames", "coref_chains"});
  return s;
}

json SentenceToJson(const ReferenceSentence& s) {
  json out = s.extra;
  out["sentence_id"] = s.sentence_id;
  out["reference_index"] = s.reference_index;
  out["text"] = s.text;
  if (s.parse_tree) out["parse_tree"] = *s.parse_tree;
  if (s.srl_frames) {
    json frames = json::array();
    for (const auto& f : *s.srl_frames) frames.push_back(FrameToJson(f));
    out["srl_frames"] = std::move(frames);
  }
  if (s.coref_chains) {
    json chains = json::array();
    for (const auto& c : *s.coref_chains) {
      json mentions = json::array();
      for (const auto& m : c.mentions) mentions.push_back(SpanToJson(m));
      chains.push_back({{"chain_id", c.chain_id}, {"mentions", std::move(mentions)}});
    }
    out["coref_chains"] = std::move(chains);
  }
  return out;
}

SystemSummary SystemFromJson(const std::string& system_id, const json& v,
                             std::size_t line, const std::string& example_id,
                             const std::string& path) {
  FieldReader r(v, line, example_id, path);
  SystemSummary s;
  s.system_id = system_id;
  s.text = r.String("text");
  if (r.Has("gold_presence")) {
    const json& gp = r.Object("gold_presence");
    for (auto it = gp.begin(); it != gp.end(); ++it) {
      const std::string field = r.Path("gold_presence") + "." + it.key();
      if (!it->is_string()) r.Fail(ErrorCode::kWrongType, field, "expected a string label");
      const std::string label = it->get<std::string>();
      if (label == "present") {
        s.gold_presence[it.key()] = Presence::kPresent;
      } else if (label == "not_present") {
        s.gold_presence[it.key()] = Presence::kNotPresent;
      } else {
        r.Fail(ErrorCode::kInvalidValue, field,
               "label must be 'present' or 'not_present', got '" + label + "'");
      }
    }
  }
  if (r.Has("gold_human_score")) s.gold_human_score = r.Number("gold_human_score");
  s.extra = r.Extra({"text", "gold_presence", "gold_human_score"});
  return s;
}

json SystemToJson(const SystemSummary& s) {
  json out = s.extra;
  out["text"] = s.text;
  json gp = json::object();
  for (const auto& [unit_id, p] : s.gold_presence) {
    gp[unit_id] = p == Presence::kPresent ? "present" : "not_present";
  }
  if (!gp.empty()) out["gold_presence"] = std::move(gp);
  if (s.gold_human_score) out["gold_human_score"] = *s.gold_human_score;
  return out;
}

template <typename Fn>
void ForEachRecord(std::string_view jsonl, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    const std::size_t nl = jsonl.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? jsonl.size() : nl;
    ++line_no;
    std::string_view line = jsonl.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!TrimWhitespace(line).empty()) {
      json record;
      try {
        record = json::parse(line);
      } catch (const json::parse_error& e) {
        throw ValidationError(ErrorCode::kMalformedJson, e.what(), line_no);
      }
      fn(record, line_no);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

[[noreturn]] void Invalid(ErrorCode code, std::size_t line,
                          const std::string& example_id,
                          const std::string& field, const std::string& why) {
  throw ValidationError(code, why, line, example_id, field);
}

void ValidateSpan(const CharSpan& span, std::size_t text_len, std::size_t line,
                  const std::string& example_id, const std::string& field) {
  if (span.begin >= span.end || span.end > text_len) {
    Invalid(ErrorCode::kSpanOutOfRange, line, example_id, field,
            "span [" + std::to_string(span.begin) + ", " +
                std::to_string(span.end) + ") is empty or exceeds the " +
                std::to_string(text_len) + "-character sentence");
  }
}

void ValidateSentence(const ReferenceSentence& s, std::size_t n_references,
                      std::size_t line, const std::string& example_id,
                      const std::string& path) {
  if (TrimWhitespace(s.text).empty()) {
    Invalid(ErrorCode::kEmptyText, line, example_id, path + ".text",
            "sentence '" + s.sentence_id + "' has empty text");
  }
  if (s.reference_index >= n_references) {
    Invalid(ErrorCode::kBadReferenceIndex, line, example_id,
            path + ".reference_index",
            "sentence '" + s.sentence_id + "' points at reference " +
                std::to_string(s.reference_index) + " of " +
                std::to_string(n_references));
  }
  const std::size_t len = Utf8Length(s.text);
  if (s.parse_tree) {
    ParseNode root;
    try {
      root = ParseBracketed(*s.parse_tree);
    } catch (const ValidationError& e) {
      Invalid(ErrorCode::kMalformedParseTree, line, example_id,
              path + ".parse_tree", e.what());
    }
    std::vector<std::string> leaf_tokens;
    for (const auto& leaf : TreeLeaves(root)) {
      for (auto& t : Tokenize(UnescapePtbToken(leaf))) leaf_tokens.push_back(std::move(t));
    }
    if (leaf_tokens != Tokenize(s.text)) {
      Invalid(ErrorCode::kParseTreeMismatch, line, example_id,
              path + ".parse_tree",
              "tree leaves do not tokenize to the text of sentence '" +
                  s.sentence_id + "'");
    }
  }
  if (s.srl_frames) {
    for (std::size_t f = 0; f < s.srl_frames->size(); ++f) {
      const SrlFrame& frame = (*s.srl_frames)[f];
      const std::string fpath = Indexed(path + ".srl_frames", f);
      ValidateSpan(frame.verb, len, line, example_id, fpath + ".verb");
      std::size_t prev_end = 0;
      for (std::size_t a = 0; a < frame.arguments.size(); ++a) {
        const SrlArgument& arg = frame.arguments[a];
        const std::string apath = Indexed(fpath + ".arguments", a);
        ValidateSpan(arg.span, len, line, example_id, apath + ".span");
        if (arg.span.begin < prev_end) {
          Invalid(ErrorCode::kBadSpanOrder, line, example_id, apath,
                  "arguments must be ordered by start and non-overlapping");
        }
        prev_end = arg.span.end;
        const bool overlaps_verb =
            arg.span.begin < frame.verb.end && frame.verb.begin < arg.span.end;
        if (overlaps_verb) {
          Invalid(ErrorCode::kBadSpanOrder, line, example_id, apath,
                  "argument overlaps the verb");
        }
        const bool before = arg.span.end <= frame.verb.begin;
        if (before != (arg.position == ArgPosition::kBeforeVerb)) {
          Invalid(ErrorCode::kBadSpanOrder, line, example_id,
                  apath + ".position",
                  "position disagrees with the span's side of the verb");
        }
      }
    }
  }
  if (s.coref_chains) {
    for (std::size_t c = 0; c < s.coref_chains->size(); ++c) {
      const auto& chain = (*s.coref_chains)[c];
      if (chain.chain_id < 0) {
        Invalid(ErrorCode::kInvalidValue, line, example_id,
                Indexed(path + ".coref_chains", c) + ".chain_id",
                "chain_id must be non-negative");
      }
      for (std::size_t m = 0; m < chain.mentions.size(); ++m) {
        ValidateSpan(chain.mentions[m], len, line, example_id,
                     Indexed(Indexed(path + ".coref_chains", c) + ".mentions", m));
      }
    }
  }
}

}  // namespace

std::string_view UnitKindName(UnitKind kind) {
  return kind == UnitKind::kScu ? "SCU" : "STU";
}

const ReferenceSentence* EvalExample::FindSentence(
    std::string_view sentence_id) const {
  for (const auto& s : sentences) {
    if (s.sentence_id == sentence_id) return &s;
  }
  return nullptr;
}

const ContentUnit* EvalExample::FindUnit(std::string_view unit_id) const {
  for (const auto& u : units) {
    if (u.unit_id == unit_id) return &u;
  }
  return nullptr;
}

std::size_t EvalExample::CountUnits(UnitKind kind) const {
  std::size_t n = 0;
  for (const auto& u : units) n += u.kind == kind ? 1 : 0;
  return n;
}

const EvalExample* Dataset::Find(std::string_view example_id) const {
  for (const auto& e : examples) {
    if (e.example_id == example_id) return &e;
  }
  return nullptr;
}

namespace {

ContentUnit UnitAt(const json& record, const std::string& example_id,
                   std::size_t line, const std::string& path) {
  FieldReader r(record, line, example_id, path);
  ContentUnit u;
  u.unit_id = r.String("unit_id");
  u.text = r.String("text");
  const long long weight = r.Has("weight") ? r.Integer("weight") : 1;
  if (weight < 1 || weight > 1'000'000) {
    r.Fail(ErrorCode::kNonPositiveWeight, r.Path("weight"),
           "unit '" + u.unit_id + "' has weight " + std::to_string(weight));
  }
  u.weight = static_cast<int>(weight);
  const std::string kind = r.Has("kind") ? r.String("kind") : "SCU";
  if (kind == "SCU") {
    u.kind = UnitKind::kScu;
  } else if (kind == "STU") {
    u.kind = UnitKind::kStu;
  } else {
    r.Fail(ErrorCode::kInvalidValue, r.Path("kind"),
           "kind must be 'SCU' or 'STU', got '" + kind + "'");
  }
  if (r.Has("source_sentence_id")) u.source_sentence_id = r.String("source_sentence_id");
  u.extra = r.Extra({"unit_id", "text", "weight", "kind", "source_sentence_id"});
  return u;
}

}  // namespace

ContentUnit UnitFromJson(const json& record, const std::string& example_id,
                         std::size_t line) {
  return UnitAt(record, example_id, line, "");
}

json UnitToJson(const ContentUnit& unit) {
  json out = unit.extra;
  out["unit_id"] = unit.unit_id;
  out["text"] = unit.text;
  out["weight"] = unit.weight;
  out["kind"] = std::string(UnitKindName(unit.kind));
  if (unit.source_sentence_id) out["source_sentence_id"] = *unit.source_sentence_id;
  return out;
}

EvalExample ExampleFromJson(const json& record, std::size_t line) {
  std::string example_id;
  if (record.is_object()) {
    auto it = record.find("example_id");
    if (it != record.end() && it->is_string()) example_id = it->get<std::string>();
  }
  FieldReader r(record, line, example_id, "");
  const json& version = r.Get("schema_version");
  if (!version.is_number_integer() || version.get<long long>() != kSchemaVersion) {
    r.Fail(ErrorCode::kUnsupportedSchemaVersion, "schema_version",
           "expected schema_version " + std::to_string(kSchemaVersion) +
               ", got " + version.dump());
  }
  EvalExample ex;
  ex.example_id = r.String("example_id");
  ex.coref_enabled = r.Bool("coref_enabled", false);
  const json& refs = r.Array("references");
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (!refs[i].is_string()) {
      r.Fail(ErrorCode::kWrongType, Indexed("references", i), "expected a string");
    }
    ex.references.push_back(refs[i].get<std::string>());
  }
  if (r.Has("sentences")) {
    const json& sentences = r.Array("sentences");
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      ex.sentences.push_back(SentenceFromJson(sentences[i], line, ex.example_id,
                                              Indexed("sentences", i)));
    }
  }
  if (r.Has("units")) {
    const json& units = r.Array("units");
    for (std::size_t i = 0; i < units.size(); ++i) {
      ex.units.push_back(UnitAt(units[i], ex.example_id, line, Indexed("units", i)));
    }
  }
  if (r.Has("systems")) {
    const json& systems = r.Object("systems");
    for (auto it = systems.begin(); it != systems.end(); ++it) {
      ex.systems.emplace(it.key(), SystemFromJson(it.key(), it.value(), line,
                                                  ex.example_id,
                                                  "systems." + it.key()));
    }
  }
  ex.extra = r.Extra({"schema_version", "example_id", "coref_enabled",
                      "references", "sentences", "units", "systems"});
  return ex;
}

json ExampleToJson(const EvalExample& example) {
  json out = example.extra;
  out["schema_version"] = kSchemaVersion;
  out["example_id"] = example.example_id;
  out["coref_enabled"] = example.coref_enabled;
  out["references"] = example.references;
  json sentences = json::array();
  for (const auto& s : example.sentences) sentences.push_back(SentenceToJson(s));
  out["sentences"] = std::move(sentences);
  json units = json::array();
  for (const auto& u : example.units) units.push_back(UnitToJson(u));
  out["units"] = std::move(units);
  json systems = json::object();
  for (const auto& [id, s] : example.systems) systems[id] = SystemToJson(s);
  out["systems"] = std::move(systems);
  return out;
}

void ValidateExample(const EvalExample& ex, std::size_t line) {
  const std::string& id = ex.example_id;
  if (TrimWhitespace(id).empty()) {
    Invalid(ErrorCode::kEmptyText, line, id, "example_id", "example_id is empty");
  }
  if (ex.references.empty()) {
    Invalid(ErrorCode::kNoReferences, line, id, "references",
            "example has no reference summaries");
  }
  for (std::size_t i = 0; i < ex.references.size(); ++i) {
    if (TrimWhitespace(ex.references[i]).empty()) {
      Invalid(ErrorCode::kEmptyText, line, id, Indexed("references", i),
              "reference summary is empty");
    }
  }
  std::set<std::string, std::less<>> sentence_ids;
  for (std::size_t i = 0; i < ex.sentences.size(); ++i) {
    const auto& s = ex.sentences[i];
    const std::string path = Indexed("sentences", i);
    if (s.sentence_id.empty()) {
      Invalid(ErrorCode::kEmptyText, line, id, path + ".sentence_id",
              "sentence_id is empty");
    }
    if (!sentence_ids.insert(s.sentence_id).second) {
      Invalid(ErrorCode::kDuplicateSentenceId, line, id, path + ".sentence_id",
              "duplicate sentence_id '" + s.sentence_id + "'");
    }
    ValidateSentence(s, ex.references.size(), line, id, path);
  }
  std::set<std::string, std::less<>> unit_ids;
  for (std::size_t i = 0; i < ex.units.size(); ++i) {
    const auto& u = ex.units[i];
    const std::string path = Indexed("units", i);
    if (u.unit_id.empty()) {
      Invalid(ErrorCode::kEmptyText, line, id, path + ".unit_id", "unit_id is empty");
    }
    if (!unit_ids.insert(u.unit_id).second) {
      Invalid(ErrorCode::kDuplicateUnitId, line, id, path + ".unit_id",
              "duplicate unit_id '" + u.unit_id + "'");
    }
    if (TrimWhitespace(u.text).empty()) {
      Invalid(ErrorCode::kEmptyText, line, id, path + ".text",
              "unit '" + u.unit_id + "' has empty text");
    }
    if (u.weight < 1) {
      Invalid(ErrorCode::kNonPositiveWeight, line, id, path + ".weight",
              "unit '" + u.unit_id + "' has weight " + std::to_string(u.weight));
    }
    if (static_cast<std::size_t>(u.weight) > ex.references.size()) {
      Invalid(ErrorCode::kWeightExceedsReferences, line, id, path + ".weight",
              "unit '" + u.unit_id + "' has weight " + std::to_string(u.weight) +
                  " but the example has " + std::to_string(ex.references.size()) +
                  " references");
    }
    if (u.source_sentence_id && !sentence_ids.contains(*u.source_sentence_id)) {
      Invalid(ErrorCode::kUnknownSourceSentence, line, id,
              path + ".source_sentence_id",
              "unit '" + u.unit_id + "' names unknown sentence '" +
                  *u.source_sentence_id + "'");
    }
  }
  for (const auto& [system_id, summary] : ex.systems) {
    if (system_id.empty()) {
      Invalid(ErrorCode::kEmptyText, line, id, "systems", "system id is empty");
    }
    for (const auto& [unit_id, p] : summary.gold_presence) {
      (void)p;
      if (!unit_ids.contains(unit_id)) {
        Invalid(ErrorCode::kUnknownPresenceUnit, line, id,
                "systems." + system_id + ".gold_presence." + unit_id,
                "gold presence names unknown unit '" + unit_id + "'");
      }
    }
    if (summary.gold_human_score && !std::isfinite(*summary.gold_human_score)) {
      Invalid(ErrorCode::kInvalidValue, line, id,
              "systems." + system_id + ".gold_human_score", "must be finite");
    }
  }
}

Dataset ParseExamples(std::string_view jsonl) {
  Dataset dataset;
  std::set<std::string, std::less<>> seen;
  ForEachRecord(jsonl, [&](const json& record, std::size_t line) {
    EvalExample ex = ExampleFromJson(record, line);
    ValidateExample(ex, line);
    if (!seen.insert(ex.example_id).second) {
      Invalid(ErrorCode::kDuplicateExampleId, line, ex.example_id, "example_id",
              "duplicate example_id '" + ex.example_id + "'");
    }
    dataset.examples.push_back(std::move(ex));
  });
  return dataset;
}

std::vector<PresenceVoteSet> ParsePresenceVotes(std::string_view jsonl) {
  std::vector<PresenceVoteSet> out;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  ForEachRecord(jsonl, [&](const json& record, std::size_t line) {
    std::string example_id;
    if (record.is_object() && record.contains("example_id") &&
        record["example_id"].is_string()) {
      example_id = record["example_id"].get<std::string>();
    }
    FieldReader r(record, line, example_id, "");
    PresenceVoteSet v;
    v.example_id = r.String("example_id");
    v.system_id = r.String("system_id");
    v.unit_id = r.String("unit_id");
    const json& votes = r.Array("votes");
    if (votes.empty()) r.Fail(ErrorCode::kEmptyVotes, "votes", "no votes given");
    for (std::size_t i = 0; i < votes.size(); ++i) {
      const json& vote = votes[i];
      if (vote.is_boolean()) {
        v.votes.push_back(vote.get<bool>());
      } else if (vote.is_number_integer() &&
                 (vote.get<long long>() == 0 || vote.get<long long>() == 1)) {
        v.votes.push_back(vote.get<long long>() == 1);
      } else {
        r.Fail(ErrorCode::kWrongType, Indexed("votes", i),
               "vote must be a boolean or 0/1");
      }
    }
    if (!seen.emplace(v.example_id, v.system_id, v.unit_id).second) {
      r.Fail(ErrorCode::kDuplicateKey, "unit_id",
             "duplicate vote record for (" + v.example_id + ", " + v.system_id +
                 ", " + v.unit_id + ")");
    }
    out.push_back(std::move(v));
  });
  return out;
}

std::vector<NliScoreRecord> ParseNliScores(std::string_view jsonl) {
  std::vector<NliScoreRecord> out;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  ForEachRecord(jsonl, [&](const json& record, std::size_t line) {
    std::string example_id;
    if (record.is_object() && record.contains("example_id") &&
        record["example_id"].is_string()) {
      example_id = record["example_id"].get<std::string>();
    }
    FieldReader r(record, line, example_id, "");
    NliScoreRecord s;
    s.example_id = r.String("example_id");
    s.system_id = r.String("system_id");
    s.unit_id = r.String("unit_id");
    const json& logits = r.Array("logits");
    if (logits.size() != 3) {
      r.Fail(ErrorCode::kInvalidValue, "logits",
             "expected 3 logits [entail, neutral, contradict]");
    }
    for (std::size_t i = 0; i < 3; ++i) {
      if (!logits[i].is_number()) {
        r.Fail(ErrorCode::kWrongType, Indexed("logits", i), "expected a number");
      }
      s.logits[i] = logits[i].get<double>();
      if (!std::isfinite(s.logits[i])) {
        r.Fail(ErrorCode::kInvalidValue, Indexed("logits", i), "must be finite");
      }
    }
    if (!seen.emplace(s.example_id, s.system_id, s.unit_id).second) {
      r.Fail(ErrorCode::kDuplicateKey, "unit_id",
             "duplicate logits for (" + s.example_id + ", " + s.system_id +
                 ", " + s.unit_id + ")");
    }
    out.push_back(std::move(s));
  });
  return out;
}

Dataset LoadExamples(const std::string& path) { return ParseExamples(ReadFile(path)); }

std::vector<PresenceVoteSet> LoadPresenceVotes(const std::string& path) {
  return ParsePresenceVotes(ReadFile(path));
}

std::vector<NliScoreRecord> LoadNliScores(const std::string& path) {
  return ParseNliScores(ReadFile(path));
}

LoadedData LoadDataset(const std::string& path, Schema schema) {
  switch (schema) {
    case Schema::kExamples:
      return LoadExamples(path);
    case Schema::kPresenceVotes:
      return LoadPresenceVotes(path);
    case Schema::kNliScores:
      return LoadNliScores(path);
  }
  throw std::invalid_argument("unknown schema");
}

std::string SerializeExamples(const Dataset& dataset) {
  std::string out;
  for (const auto& ex : dataset.examples) {
    out += ExampleToJson(ex).dump();
    out += '\n';
  }
  return out;
}

std::string SerializeNliScores(const std::vector<NliScoreRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json j = {{"example_id", r.example_id},
              {"system_id", r.system_id},
              {"unit_id", r.unit_id},
              {"logits", json::array({r.logits[0], r.logits[1], r.logits[2]})}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

Presence ResolvePresence(const std::vector<bool>& votes) {
  std::size_t yes = 0;
  for (bool v : votes) yes += v ? 1 : 0;
  return 2 * yes > votes.size() ? Presence::kPresent : Presence::kNotPresent;
}

void ApplyVotes(Dataset& dataset, const std::vector<PresenceVoteSet>& votes) {
  for (const auto& v : votes) {
    EvalExample* ex = nullptr;
    for (auto& e : dataset.examples) {
      if (e.example_id == v.example_id) ex = &e;
    }
    if (ex == nullptr) {
      throw ValidationError(ErrorCode::kInvalidValue,
                            "votes for unknown example '" + v.example_id + "'",
                            0, v.example_id, "example_id");
    }
    auto sys = ex->systems.find(v.system_id);
    if (sys == ex->systems.end()) {
      throw ValidationError(ErrorCode::kInvalidValue,
                            "votes for unknown system '" + v.system_id + "'", 0,
                            v.example_id, "system_id");
    }
    if (ex->FindUnit(v.unit_id) == nullptr) {
      throw ValidationError(ErrorCode::kUnknownPresenceUnit,
                            "votes for unknown unit '" + v.unit_id + "'", 0,
                            v.example_id, "unit_id");
    }
    if (v.votes.empty()) {
      throw ValidationError(ErrorCode::kEmptyVotes, "no votes given", 0,
                            v.example_id, "votes");
    }
    sys->second.gold_presence[v.unit_id] = ResolvePresence(v.votes);
  }
}

std::vector<const ContentUnit*> UnitMultiset(const EvalExample& example,
                                             UnitKind kind) {
  std::vector<const ContentUnit*> out;
  for (const auto& u : example.units) {
    if (u.kind != kind) continue;
    for (int r = 0; r < u.weight; ++r) out.push_back(&u);
  }
  if (out.empty()) {
    throw std::invalid_argument("example '" + example.example_id + "' has no " +
                                std::string(UnitKindName(kind)) + " units");
  }
  return out;
}

}  // namespace pyreval
