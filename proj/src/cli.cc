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

#include "pyreval/cli.h"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pyreval/corpus.h"
#include "pyreval/correlation.h"
#include "pyreval/cv.h"
#include "pyreval/easiness.h"
#include "pyreval/entailment.h"
#include "pyreval/errors.h"
#include "pyreval/features.h"
#include "pyreval/gbt.h"
#include "pyreval/scoring.h"
#include "pyreval/stu.h"
#include "pyreval/util.h"

namespace pyreval {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Fn>
void ForEachJsonLine(std::string_view content, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const std::size_t nl = content.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? content.size() : nl;
    ++line_no;
    const std::string_view line = content.substr(pos, end - pos);
    if (!TrimWhitespace(line).empty()) {
      json record = json::parse(line, nullptr, false);
      if (record.is_discarded() || !record.is_object()) {
        throw ValidationError(ErrorCode::kMalformedJson, "expected one JSON object",
                              line_no);
      }
      fn(record, line_no);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

std::string RequireString(const json& r, const char* key, std::size_t line) {
  if (!r.contains(key) || !r[key].is_string()) {
    throw ValidationError(ErrorCode::kMissingField, "missing string field", line, "",
                          key);
  }
  return r[key].get<std::string>();
}

double RequireNumber(const json& r, const char* key, std::size_t line) {
  if (!r.contains(key) || !r[key].is_number() || !std::isfinite(r[key].get<double>())) {
    throw ValidationError(ErrorCode::kMissingField, "missing finite number", line,
                          r.value("example_id", std::string()), key);
  }
  return r[key].get<double>();
}

std::string ContentHash(const std::string& content) {
  return HexDigest(Fnv1a64(content));
}

std::string ConfigHash(const json& hashed) { return HexDigest(Fnv1a64(hashed.dump())); }

std::string JsonLines(const std::vector<json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

json BackendJson(const BackendInfo& info) {
  return {{"identity", info.identity},
          {"version", info.version},
          {"finetuned", info.finetuned},
          {"truncation_policy", info.truncation_policy}};
}

// Options shared by every subcommand.
struct Common {
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::size_t batch_size = 32;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  const Common& common;

  JudgeOptions Judge() const { return {common.batch_size, common.workers}; }
};

// Writes `<out>.config.json` holding every resolved option.
void WriteResolvedConfig(const std::string& out_path, const std::string& command,
                         const json& options, const std::string& config_hash,
                         const Common& common) {
  json all = options;
  all["seed"] = common.seed;
  all["workers"] = common.workers;
  all["batch_size"] = common.batch_size;
  json doc = {{"command", command}, {"options", all}, {"config_hash", config_hash}};
  WriteFileAtomically(out_path + ".config.json", doc.dump(2) + "\n");
}

struct DatasetInput {
  std::string input;
  std::string votes;

  void Register(CLI::App* app) {
    app->add_option("--input", input, "examples.jsonl")->required()->check(CLI::ExistingFile);
    app->add_option("--votes", votes, "presence_votes.jsonl applied over gold labels")
        ->check(CLI::ExistingFile);
  }

  // Loads the dataset and records the content hashes of what was read.
  Dataset Load(json& hashes) const {
    const std::string content = ReadFile(input);
    hashes["examples"] = ContentHash(content);
    Dataset dataset = ParseExamples(content);
    if (!votes.empty()) {
      const std::string vote_content = ReadFile(votes);
      hashes["votes"] = ContentHash(vote_content);
      ApplyVotes(dataset, ParsePresenceVotes(vote_content));
    }
    return dataset;
  }
};

struct BackendFlags {
  std::string spec;
  bool finetuned = false;
  std::string mode;
  double timeout = 30.0;
  int retries = 2;

  void Register(CLI::App* app) {
    app->add_option("--backend", spec,
                    "stub | stub:E,N,C | lookup:PATH | http:URL (default: $" +
                        std::string(kNliUrlEnv) + ")");
    app->add_flag("--finetuned", finetuned,
                  "declare lookup/stub/http logits as coming from a finetuned model");
    app->add_option("--mode", mode, "f_NLI mode: p3c, l3c, p2c or l2c")
        ->check(CLI::IsMember({"p3c", "l3c", "p2c", "l2c"}));
    app->add_option("--timeout", timeout, "HTTP timeout in seconds");
    app->add_option("--retries", retries, "HTTP retries on transport errors and 5xx");
  }

  std::unique_ptr<EntailmentBackend> Open(const Dataset& dataset) const {
    std::string s = spec;
    if (s.empty()) {
      const char* url = std::getenv(kNliUrlEnv);
      if (url == nullptr || *url == '\0') {
        throw UsageError("--backend is required (or set " + std::string(kNliUrlEnv) + ")");
      }
      s = std::string("http:") + url;
    }
    BackendConfig config;
    if (finetuned) config.finetuned = true;
    config.http.timeout_seconds = timeout;
    config.http.retries = retries;
    return MakeBackend(s, &dataset, config);
  }

  FnliMode Mode(const BackendInfo& info) const {
    return mode.empty() ? DefaultMode(info) : ParseFnliMode(mode);
  }
};

struct GbtFlags {
  GbtConfig config;

  void Register(CLI::App* app) {
    app->add_option("--eta", config.learning_rate, "learning rate")->check(CLI::PositiveNumber);
    app->add_option("--max-depth", config.max_depth, "maximum tree depth")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--rounds", config.n_rounds, "boosting rounds")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--min-samples-leaf", config.min_samples_leaf, "minimum leaf size")
        ->check(CLI::PositiveNumber);
  }

  json ToJson() const {
    return {{"eta", config.learning_rate},
            {"max_depth", config.max_depth},
            {"rounds", config.n_rounds},
            {"min_samples_leaf", config.min_samples_leaf}};
  }
};

DatasetSelection ParseSelectionImpl(std::string_view jsonl) {
  DatasetSelection out;
  ForEachJsonLine(jsonl, [&](const json& r, std::size_t line) {
    const std::string example_id = RequireString(r, "example_id", line);
    const std::string sentence_id = RequireString(r, "sentence_id", line);
    const std::string decision = RequireString(r, "decision", line);
    UnitChoice choice;
    if (decision == "use_scu") {
      choice = UnitChoice::kUseScu;
    } else if (decision == "use_stu") {
      choice = UnitChoice::kUseStu;
    } else {
      throw ValidationError(ErrorCode::kInvalidValue,
                            "decision must be use_scu or use_stu", line, example_id,
                            "decision");
    }
    if (!out[example_id].emplace(sentence_id, choice).second) {
      throw ValidationError(ErrorCode::kDuplicateKey,
                            "duplicate decision for sentence '" + sentence_id + "'",
                            line, example_id, "sentence_id");
    }
  });
  return out;
}

// ---------------------------------------------------------------- validate

struct ValidateCmd {
  std::string input;
  std::string schema = "examples";

  void Register(CLI::App* app) {
    app->add_option("--input", input, "JSONL file")->required()->check(CLI::ExistingFile);
    app->add_option("--schema", schema, "examples | presence_votes | nli_scores")
        ->check(CLI::IsMember({"examples", "presence_votes", "nli_scores"}));
  }

  int Run(Context& ctx) const {
    const Schema s = schema == "examples"         ? Schema::kExamples
                     : schema == "presence_votes" ? Schema::kPresenceVotes
                                                  : Schema::kNliScores;
    const LoadedData data = LoadDataset(input, s);
    std::size_t n = 0;
    if (auto* d = std::get_if<Dataset>(&data)) n = d->examples.size();
    if (auto* v = std::get_if<std::vector<PresenceVoteSet>>(&data)) n = v->size();
    if (auto* r = std::get_if<std::vector<NliScoreRecord>>(&data)) n = r->size();
    ctx.out << "ok: " << n << " " << schema << " records\n";
    return kExitOk;
  }
};

// ------------------------------------------------------------ extract-stus

struct ExtractStusCmd {
  DatasetInput data;
  std::string out;
  std::string merged_out;
  std::string coref = "auto";
  std::vector<std::string> exclude_roles = {"ARGM-NEG"};
  bool bare = false;

  void Register(CLI::App* app) {
    data.Register(app);
    app->add_option("--out", out, "stus.jsonl")->required();
    app->add_option("--merged-out", merged_out,
                    "examples.jsonl with STU units replaced by the extracted ones");
    app->add_option("--coref", coref, "auto (per example flag) | on | off")
        ->check(CLI::IsMember({"auto", "on", "off"}));
    app->add_option("--exclude-role", exclude_roles, "SRL roles left out of triplets");
    app->add_flag("--emit-bare-subject-verb", bare,
                  "emit before-args + verb for frames without after-verb arguments");
  }

  int Run(Context& ctx) const {
    json hashes;
    Dataset dataset = data.Load(hashes);
    StuOptions options;
    options.excluded_roles = {exclude_roles.begin(), exclude_roles.end()};
    options.emit_bare_subject_verb = bare;
    std::vector<json> records;
    std::size_t n_stus = 0;
    std::size_t n_references = 0;
    for (auto& ex : dataset.examples) {
      const bool use_coref = coref == "auto" ? ex.coref_enabled : coref == "on";
      std::vector<ContentUnit> stus = StusForExample(ex, use_coref, options);
      json units = json::array();
      for (const auto& u : stus) units.push_back(UnitToJson(u));
      records.push_back({{"example_id", ex.example_id}, {"units", std::move(units)}});
      n_stus += stus.size();
      n_references += ex.references.size();
      std::erase_if(ex.units, [](const ContentUnit& u) { return u.kind == UnitKind::kStu; });
      for (auto& u : stus) ex.units.push_back(std::move(u));
    }
    WriteFileAtomically(out, JsonLines(records));
    if (!merged_out.empty()) {
      for (const auto& ex : dataset.examples) ValidateExample(ex);
      WriteFileAtomically(merged_out, SerializeExamples(dataset));
    }
    const json options_json = {{"coref", coref},
                               {"exclude_roles", exclude_roles},
                               {"emit_bare_subject_verb", bare}};
    json hashed = {{"command", "extract-stus"}, {"options", options_json}, {"inputs", hashes}};
    json all = options_json;
    all["input"] = data.input;
    all["out"] = out;
    all["merged_out"] = merged_out;
    WriteResolvedConfig(out, "extract-stus", all, ConfigHash(hashed), ctx.common);
    ctx.out << "examples " << dataset.examples.size() << ", references " << n_references
            << ", stus " << n_stus << ", stus per reference "
            << (n_references ? static_cast<double>(n_stus) / static_cast<double>(n_references)
                             : 0.0)
            << "\n";
    return kExitOk;
  }
};

// --------------------------------------------------------------- featurize

struct FeaturizeCmd {
  DatasetInput data;
  std::string out;
  bool invert = false;

  void Register(CLI::App* app) {
    data.Register(app);
    app->add_option("--out", out, "features.jsonl")->required();
    app->add_flag("--invert-depth-ratio", invert, "feature[3] = length / depth");
  }

  int Run(Context& ctx) const {
    json hashes;
    const Dataset dataset = data.Load(hashes);
    FeatureOptions options{invert};
    std::size_t unknown = 0;
    std::vector<json> records;
    for (const auto& ex : dataset.examples) {
      for (const auto& s : ex.sentences) {
        FeatureVector f;
        try {
          f = Featurize(s, options, &unknown);
        } catch (const ValidationError& e) {
          throw ValidationError(e.code(), "sentence '" + s.sentence_id + "': " + e.what(),
                                0, ex.example_id, "parse_tree");
        }
        records.push_back({{"example_id", ex.example_id},
                           {"sentence_id", s.sentence_id},
                           {"features", std::vector<double>(f.begin(), f.end())}});
      }
    }
    WriteFileAtomically(out, JsonLines(records));
    json hashed = {{"command", "featurize"},
                   {"options", {{"invert_depth_ratio", invert}}},
                   {"inputs", hashes}};
    WriteResolvedConfig(out, "featurize",
                        {{"input", data.input}, {"out", out}, {"invert_depth_ratio", invert}},
                        ConfigHash(hashed), ctx.common);
    ctx.out << "sentences " << records.size() << ", unknown tags " << unknown << "\n";
    if (unknown > 0) ctx.err << "warning: " << unknown << " parse labels outside the tag list\n";
    return kExitOk;
  }
};

// --------------------------------------------------------- train-regressor

struct TrainCmd {
  DatasetInput data;
  std::string out;
  std::string labels_out;
  GbtFlags gbt;
  bool invert = false;

  void Register(CLI::App* app) {
    data.Register(app);
    app->add_option("--out", out, "easiness_model.json")->required();
    app->add_option("--labels-out", labels_out, "easiness_labels.jsonl");
    app->add_flag("--invert-depth-ratio", invert, "feature[3] = length / depth");
    gbt.Register(app);
  }

  int Run(Context& ctx) const {
    json hashes;
    const Dataset dataset = data.Load(hashes);
    EasinessOptions options;
    options.features.invert_depth_ratio = invert;
    const std::vector<EasinessSample> samples = BuildEasinessSamples(dataset, options);
    const GbtModel model = TrainEasinessModel(samples, gbt.config);
    WriteFileAtomically(out, SerializeGbt(model));
    if (!labels_out.empty()) {
      std::vector<json> records;
      for (const auto& s : samples) {
        records.push_back({{"example_id", s.example_id},
                           {"sentence_id", s.sentence_id},
                           {"value", s.label}});
      }
      WriteFileAtomically(labels_out, JsonLines(records));
    }
    json options_json = gbt.ToJson();
    options_json["invert_depth_ratio"] = invert;
    json hashed = {{"command", "train-regressor"}, {"options", options_json}, {"inputs", hashes}};
    json all = options_json;
    all["input"] = data.input;
    all["out"] = out;
    WriteResolvedConfig(out, "train-regressor", all, ConfigHash(hashed), ctx.common);
    ctx.out << "samples " << samples.size() << ", training mse "
            << model.training_mse.front() << " -> " << model.training_mse.back()
            << ", model " << GbtHash(model) << "\n";
    return kExitOk;
  }
};

// -------------------------------------------------------- predict-easiness

struct PredictCmd {
  DatasetInput data;
  std::string model_path;
  std::string out;
  bool invert = false;

  void Register(CLI::App* app) {
    data.Register(app);
    app->add_option("--model", model_path, "easiness_model.json")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--out", out, "easiness.jsonl")->required();
    app->add_flag("--invert-depth-ratio", invert, "feature[3] = length / depth");
  }

  int Run(Context& ctx) const {
    json hashes;
    const Dataset dataset = data.Load(hashes);
    const std::string model_text = ReadFile(model_path);
    const GbtModel model = ParseGbt(model_text);
    hashes["model"] = ContentHash(model_text);
    std::vector<json> records;
    for (const auto& s : PredictSentenceEasiness(dataset, model, {invert})) {
      records.push_back({{"example_id", s.example_id},
                         {"sentence_id", s.sentence_id},
                         {"easiness", s.score}});
    }
    WriteFileAtomically(out, JsonLines(records));
    json hashed = {{"command", "predict-easiness"},
                   {"options", {{"invert_depth_ratio", invert}}},
                   {"inputs", hashes}};
    WriteResolvedConfig(out, "predict-easiness",
                        {{"input", data.input},
                         {"model", model_path},
                         {"out", out},
                         {"invert_depth_ratio", invert}},
                        ConfigHash(hashed), ctx.common);
    ctx.out << "sentences " << records.size() << "\n";
    return kExitOk;
  }
};

// ------------------------------------------------------------ select-units

struct SelectCmd {
  std::string input;
  std::string model_path;
  std::string easiness_path;
  std::string out;
  std::string scope = "global";
  double x = 0.0;
  bool invert = false;

  void Register(CLI::App* app) {
    app->add_option("--input", input, "examples.jsonl (needed with --model)")
        ->check(CLI::ExistingFile);
    auto* model = app->add_option("--model", model_path, "easiness_model.json")
                      ->check(CLI::ExistingFile);
    auto* easiness = app->add_option("--easiness", easiness_path,
                                     "easiness.jsonl from predict-easiness")
                         ->check(CLI::ExistingFile);
    model->excludes(easiness);
    app->add_option("--x", x, "fraction of sentences switched to STUs")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--out", out, "selection.jsonl")->required();
    app->add_option("--scope", scope, "global | per_example")
        ->check(CLI::IsMember({"global", "per_example"}));
    app->add_flag("--invert-depth-ratio", invert, "feature[3] = length / depth");
  }

  int Run(Context& ctx) const {
    if (model_path.empty() == easiness_path.empty()) {
      throw UsageError("select-units needs exactly one of --model or --easiness");
    }
    if (!model_path.empty() && input.empty()) {
      throw UsageError("--model needs --input to featurize sentences");
    }
    json hashes;
    std::vector<SentenceScore> scores;
    std::string model_hash;
    if (!model_path.empty()) {
      const std::string content = ReadFile(input);
      hashes["examples"] = ContentHash(content);
      const Dataset dataset = ParseExamples(content);
      const std::string model_text = ReadFile(model_path);
      const GbtModel model = ParseGbt(model_text);
      model_hash = GbtHash(model);
      hashes["model"] = model_hash;
      scores = PredictSentenceEasiness(dataset, model, {invert});
    } else {
      const std::string content = ReadFile(easiness_path);
      model_hash = ContentHash(content);
      hashes["easiness"] = model_hash;
      std::set<std::pair<std::string, std::string>> seen;
      ForEachJsonLine(content, [&](const json& r, std::size_t line) {
        SentenceScore s{RequireString(r, "example_id", line),
                        RequireString(r, "sentence_id", line),
                        RequireNumber(r, "easiness", line)};
        if (!seen.emplace(s.example_id, s.sentence_id).second) {
          throw ValidationError(ErrorCode::kDuplicateKey, "duplicate sentence", line,
                                s.example_id, "sentence_id");
        }
        scores.push_back(std::move(s));
      });
    }
    const DatasetSelection selection = SelectSentences(
        scores, x, scope == "global" ? SelectionScope::kGlobal : SelectionScope::kPerExample);
    std::vector<json> records;
    std::size_t n_stu = 0;
    for (const auto& s : scores) {
      const UnitChoice c = selection.at(s.example_id).at(s.sentence_id);
      n_stu += c == UnitChoice::kUseStu ? 1 : 0;
      records.push_back({{"example_id", s.example_id},
                         {"sentence_id", s.sentence_id},
                         {"decision", std::string(UnitChoiceName(c))},
                         {"x", x},
                         {"scope", scope},
                         {"model_hash", model_hash}});
    }
    WriteFileAtomically(out, JsonLines(records));
    const json options_json = {{"x", x}, {"scope", scope}, {"invert_depth_ratio", invert}};
    json hashed = {{"command", "select-units"}, {"options", options_json}, {"inputs", hashes}};
    json all = options_json;
    all["input"] = input;
    all["model"] = model_path;
    all["easiness"] = easiness_path;
    all["out"] = out;
    WriteResolvedConfig(out, "select-units", all, ConfigHash(hashed), ctx.common);
    ctx.out << "sentences " << records.size() << ", use_stu " << n_stu << "\n";
    return kExitOk;
  }
};

// ------------------------------------------------------------------- score

struct ScoreCmd {
  DatasetInput data;
  BackendFlags backend;
  std::string variant;
  std::string selection_path;
  std::size_t sample_size = 0;
  std::string out;

  void Register(CLI::App* app) {
    data.Register(app);
    backend.Register(app);
    app->add_option("--variant", variant,
                    "pyramid_gold | lite_pyramid | lite2 | lite3 | lite2x")
        ->required()
        ->check(CLI::IsMember({"pyramid_gold", "lite_pyramid", "lite2", "lite3", "lite2x"}));
    app->add_option("--selection", selection_path, "selection.jsonl (lite2x)")
        ->check(CLI::ExistingFile);
    app->add_option("--sample-size", sample_size, "K units sampled (lite_pyramid)");
    app->add_option("--out", out, "scores.jsonl")->required();
  }

  int Run(Context& ctx) const {
    const Variant v = ParseVariant(variant);
    if (v == Variant::kLite2x && selection_path.empty()) {
      throw UsageError("--variant lite2x requires --selection");
    }
    if (v != Variant::kLite2x && !selection_path.empty()) {
      throw UsageError("--selection only applies to --variant lite2x");
    }
    if (v == Variant::kLitePyramid && sample_size == 0) {
      throw UsageError("--variant lite_pyramid requires --sample-size >= 1");
    }
    json hashes;
    const Dataset dataset = data.Load(hashes);
    DatasetSelection selection;
    if (!selection_path.empty()) {
      const std::string content = ReadFile(selection_path);
      hashes["selection"] = ContentHash(content);
      selection = ParseSelectionImpl(content);
    }
    ScoreRequest request;
    request.variant = v;
    if (v == Variant::kLitePyramid) {
      request.sample_size = sample_size;
      request.seed = ctx.common.seed;
    }
    std::unique_ptr<EntailmentBackend> nli;
    json backend_json = nullptr;
    json mode_json = nullptr;
    if (VariantUsesBackend(v)) {
      nli = backend.Open(dataset);
      const BackendInfo info = nli->Info();
      request.mode = backend.Mode(info);
      backend_json = BackendJson(info);
      mode_json = std::string(FnliModeName(request.mode));
    }
    json options_json = {{"variant", variant}, {"mode", mode_json}, {"backend", backend_json}};
    if (v == Variant::kLitePyramid) {
      options_json["sample_size"] = sample_size;
      options_json["seed"] = ctx.common.seed;
    }
    json hashed = {{"command", "score"}, {"options", options_json}, {"inputs", hashes}};
    const std::string config_hash = ConfigHash(hashed);

    const std::vector<SummaryScore> scores =
        ScoreDataset(dataset, request, nli.get(), selection_path.empty() ? nullptr : &selection,
                     ctx.Judge());
    std::vector<json> records;
    std::map<std::string, std::vector<SummaryScore>> by_system;
    for (const auto& s : scores) {
      json r = ScoreToJson(s);
      r["mode"] = mode_json;
      r["backend"] = backend_json;
      r["config_hash"] = config_hash;
      records.push_back(std::move(r));
      by_system[s.system_id].push_back(s);
    }
    WriteFileAtomically(out, JsonLines(records));
    json all = options_json;
    all["input"] = data.input;
    all["votes"] = data.votes;
    all["selection"] = selection_path;
    all["backend_spec"] = backend.spec;
    all["out"] = out;
    WriteResolvedConfig(out, "score", all, config_hash, ctx.common);
    for (const auto& [system_id, list] : by_system) {
      ctx.out << system_id << "\t" << SystemAverage(list) << "\t" << list.size() << "\n";
    }
    return kExitOk;
  }
};

// --------------------------------------------------------------- meta-eval

std::vector<Level> Levels(const std::string& s) {
  if (s == "both") return {Level::kSystem, Level::kSummary};
  return {ParseLevel(s)};
}

std::vector<Measure> Measures(const std::string& s) {
  if (s == "both") return {Measure::kPearson, Measure::kSpearman};
  return {ParseMeasure(s)};
}

struct MetaEvalCmd {
  DatasetInput data;
  std::string scores_path;
  std::string level = "both";
  std::string measure = "both";
  std::string human = "gold_score";
  std::string format = "json";
  std::string out;

  void Register(CLI::App* app) {
    data.Register(app);
    app->add_option("--scores", scores_path, "scores.jsonl from `score`")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--level", level, "system | summary | both")
        ->check(CLI::IsMember({"system", "summary", "both"}));
    app->add_option("--measure", measure, "pearson | spearman | both")
        ->check(CLI::IsMember({"pearson", "spearman", "both"}));
    app->add_option("--human", human, "gold_score | presence_weighted | pyramid")
        ->check(CLI::IsMember({"gold_score", "presence_weighted", "pyramid"}));
    app->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--out", out, "report file")->required();
  }

  int Run(Context& ctx) const {
    json hashes;
    const Dataset dataset = data.Load(hashes);
    const std::string content = ReadFile(scores_path);
    hashes["scores"] = ContentHash(content);
    std::map<std::pair<std::string, std::string>, double> metric;
    json metric_info = nullptr;
    ForEachJsonLine(content, [&](const json& r, std::size_t line) {
      const std::string e = RequireString(r, "example_id", line);
      const std::string s = RequireString(r, "system_id", line);
      if (!metric.emplace(std::make_pair(e, s), RequireNumber(r, "value", line)).second) {
        throw ValidationError(ErrorCode::kDuplicateKey, "duplicate score for system '" + s + "'",
                              line, e, "system_id");
      }
      if (metric_info.is_null()) {
        metric_info = {{"variant", r.value("variant", json())},
                       {"mode", r.value("mode", json())},
                       {"backend", r.value("backend", json())}};
      }
    });
    const HumanTarget target = ParseHumanTarget(human);
    std::vector<std::string> example_ids;
    std::set<std::string> systems;
    for (const auto& ex : dataset.examples) {
      example_ids.push_back(ex.example_id);
      for (const auto& [id, s] : ex.systems) systems.insert(id);
    }
    ScoreMatrix matrix(example_ids, {systems.begin(), systems.end()});
    for (const auto& ex : dataset.examples) {
      for (const auto& [id, s] : ex.systems) {
        auto m = metric.find({ex.example_id, id});
        if (m == metric.end()) continue;
        std::optional<double> h;
        if (target == HumanTarget::kGoldScore) {
          h = s.gold_human_score;
        } else if (target == HumanTarget::kPresenceWeighted) {
          h = PresenceWeightedFraction(ex, id);
        } else {
          h = PyramidGold(ex, id).value;
        }
        if (h) matrix.Set(ex.example_id, id, m->second, *h);
      }
    }
    std::vector<CorrelationReport> reports;
    for (Level l : Levels(level)) {
      for (Measure ms : Measures(measure)) {
        CorrelationReport r;
        try {
          r = l == Level::kSystem ? SystemLevel(matrix, ms) : SummaryLevel(matrix, ms);
        } catch (const UndefinedCorrelation& e) {
          r.level = l;
          r.measure = ms;
          r.undefined_reason = e.what();
        }
        reports.push_back(std::move(r));
      }
    }
    const json options_json = {{"level", level}, {"measure", measure}, {"human", human},
                               {"format", format}};
    json hashed = {{"command", "meta-eval"}, {"options", options_json}, {"inputs", hashes}};
    const std::string config_hash = ConfigHash(hashed);
    std::string text;
    if (format == "json") {
      json list = json::array();
      for (const auto& r : reports) list.push_back(ReportToJson(r));
      json doc = {{"command", "meta-eval"},
                  {"config_hash", config_hash},
                  {"human", human},
                  {"metric", metric_info},
                  {"reports", std::move(list)}};
      text = doc.dump(2) + "\n";
    } else {
      text = "level,measure,value,n_examples_used,n_examples_skipped\n";
      for (const auto& r : reports) {
        std::ostringstream row;
        row.precision(17);
        row << LevelName(r.level) << "," << MeasureName(r.measure) << ",";
        if (r.value) row << *r.value;
        row << "," << r.n_examples_used << "," << r.n_examples_skipped << "\n";
        text += row.str();
      }
    }
    WriteFileAtomically(out, text);
    json all = options_json;
    all["input"] = data.input;
    all["scores"] = scores_path;
    all["out"] = out;
    WriteResolvedConfig(out, "meta-eval", all, config_hash, ctx.common);
    for (const auto& r : reports) {
      ctx.out << LevelName(r.level) << "\t" << MeasureName(r.measure) << "\t";
      if (r.value) {
        ctx.out << *r.value;
      } else {
        ctx.out << "undefined (" << r.undefined_reason << ")";
      }
      ctx.out << "\n";
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------------- cv

struct CvCmd {
  DatasetInput data;
  BackendFlags backend;
  GbtFlags gbt;
  int k = 5;
  std::string axis = "by_examples";
  std::string variant = "lite2";
  std::vector<double> xs;
  double x_sweep = 0.0;
  std::string scope = "global";
  std::size_t sample_size = 0;
  std::string human = "gold_score";
  std::string format = "json";
  std::string out;
  std::string curve_out;

  void Register(CLI::App* app) {
    data.Register(app);
    backend.Register(app);
    gbt.Register(app);
    app->add_option("--k", k, "number of folds")->check(CLI::Range(2, 1000000));
    app->add_option("--axis", axis, "by_examples | by_systems")
        ->check(CLI::IsMember({"by_examples", "by_systems"}));
    app->add_option("--variant", variant,
                    "pyramid_gold | lite_pyramid | lite2 | lite3 | lite2x")
        ->check(CLI::IsMember({"pyramid_gold", "lite_pyramid", "lite2", "lite3", "lite2x"}));
    auto* x = app->add_option("--x", xs, "lite2x fractions (repeatable)")
                  ->check(CLI::Range(0.0, 1.0));
    auto* sweep = app->add_option("--x-sweep", x_sweep,
                                  "lite2x sweep step: x = 0, step, ..., 1")
                      ->check(CLI::Range(1e-6, 1.0));
    x->excludes(sweep);
    app->add_option("--scope", scope, "global | per_example")
        ->check(CLI::IsMember({"global", "per_example"}));
    app->add_option("--sample-size", sample_size, "K units sampled (lite_pyramid)");
    app->add_option("--human", human, "gold_score | presence_weighted | pyramid")
        ->check(CLI::IsMember({"gold_score", "presence_weighted", "pyramid"}));
    app->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--out", out, "report.json")->required();
    app->add_option("--curve-out", curve_out, "CSV of the lite2x curve");
  }

  int Run(Context& ctx) const {
    const Variant v = ParseVariant(variant);
    std::vector<double> grid = xs;
    if (x_sweep > 0.0) {
      const auto steps = static_cast<std::size_t>(std::llround(1.0 / x_sweep));
      if (std::fabs(static_cast<double>(steps) * x_sweep - 1.0) > 1e-9) {
        throw UsageError("--x-sweep step must divide 1 evenly");
      }
      grid.clear();
      for (std::size_t i = 0; i <= steps; ++i) {
        grid.push_back(static_cast<double>(i) / static_cast<double>(steps));
      }
    }
    if (v == Variant::kLite2x && grid.empty()) {
      throw UsageError("--variant lite2x requires --x or --x-sweep");
    }
    if (v != Variant::kLite2x && !grid.empty()) {
      throw UsageError("--x and --x-sweep only apply to --variant lite2x");
    }
    if (v == Variant::kLitePyramid && sample_size == 0) {
      throw UsageError("--variant lite_pyramid requires --sample-size >= 1");
    }
    if (!curve_out.empty() && grid.size() < 2) {
      throw UsageError("--curve-out needs at least 2 x values");
    }

    json hashes;
    const Dataset dataset = data.Load(hashes);
    CvConfig config;
    config.k = k;
    config.axis = ParseCvAxis(axis);
    config.seed = ctx.common.seed;
    config.variant = v;
    config.xs = grid;
    config.scope = scope == "global" ? SelectionScope::kGlobal : SelectionScope::kPerExample;
    if (sample_size > 0) config.sample_size = sample_size;
    config.human = ParseHumanTarget(human);
    config.gbt = gbt.config;
    config.judge = ctx.Judge();

    std::unique_ptr<EntailmentBackend> nli;
    json backend_json = nullptr;
    json mode_json = nullptr;
    if (VariantUsesBackend(v)) {
      nli = backend.Open(dataset);
      const BackendInfo info = nli->Info();
      config.mode = backend.Mode(info);
      backend_json = BackendJson(info);
      mode_json = std::string(FnliModeName(config.mode));
    }
    json options_json = {{"k", k},
                         {"axis", axis},
                         {"seed", ctx.common.seed},
                         {"variant", variant},
                         {"mode", mode_json},
                         {"backend", backend_json},
                         {"x", grid},
                         {"scope", scope},
                         {"human", human},
                         {"gbt", gbt.ToJson()}};
    if (v == Variant::kLitePyramid) options_json["sample_size"] = sample_size;
    json hashed = {{"command", "cv"}, {"options", options_json}, {"inputs", hashes}};
    const std::string config_hash = ConfigHash(hashed);

    const std::vector<CvResult> results = RunCv(dataset, nli.get(), config);

    std::string text;
    if (format == "json") {
      ordered_json doc;
      doc["command"] = "cv";
      doc["config_hash"] = config_hash;
      doc["config"] = ordered_json::parse(options_json.dump());
      doc["inputs"] = ordered_json::parse(hashes.dump());
      ordered_json assignments = ordered_json::array();
      for (const auto& f : results.front().folds) assignments.push_back(f.held_out);
      doc["fold_assignments"] = std::move(assignments);
      ordered_json list = ordered_json::array();
      for (const auto& r : results) list.push_back(CvResultToJson(r));
      doc["results"] = std::move(list);
      text = doc.dump(2) + "\n";
    } else {
      text = "x,level,measure,value,n_folds_used\n";
      for (const auto& r : results) {
        for (const auto& a : r.average) {
          std::ostringstream row;
          row.precision(17);
          if (r.x) row << *r.x;
          row << "," << LevelName(a.level) << "," << MeasureName(a.measure) << ",";
          if (a.value) row << *a.value;
          row << "," << a.n_folds_used << "\n";
          text += row.str();
        }
      }
    }
    WriteFileAtomically(out, text);
    if (!curve_out.empty()) WriteFileAtomically(curve_out, EmitCurveCsv(results));
    json all = options_json;
    all["input"] = data.input;
    all["votes"] = data.votes;
    all["backend_spec"] = backend.spec;
    all["out"] = out;
    all["curve_out"] = curve_out;
    all["format"] = format;
    WriteResolvedConfig(out, "cv", all, config_hash, ctx.common);
    for (const auto& r : results) {
      if (r.x) ctx.out << "x=" << *r.x << "\t";
      for (const auto& a : r.average) {
        ctx.out << LevelName(a.level) << "/" << MeasureName(a.measure) << "=";
        if (a.value) {
          ctx.out << *a.value;
        } else {
          ctx.out << "undefined";
        }
        ctx.out << " ";
      }
      ctx.out << "\n";
    }
    return kExitOk;
  }
};

}  // namespace

DatasetSelection ParseSelection(std::string_view jsonl) { return ParseSelectionImpl(jsonl); }

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"pyreval: Pyramid-family summary evaluation", "pyreval"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");

  Common common;
  common.workers = DefaultWorkers();
  app.add_option("--seed", common.seed, "seed for every random choice");
  app.add_option("--workers", common.workers, "parallel entailment batches")
      ->check(CLI::PositiveNumber);
  app.add_option("--batch-size", common.batch_size, "pairs per entailment request")
      ->check(CLI::PositiveNumber);

  ValidateCmd validate;
  ExtractStusCmd extract;
  FeaturizeCmd featurize;
  TrainCmd train;
  PredictCmd predict;
  SelectCmd select;
  ScoreCmd score;
  MetaEvalCmd meta;
  CvCmd cv;
  std::function<int(Context&)> handler;
  auto bind = [&](const char* name, const char* help, auto& cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    cmd.Register(sub);
    sub->callback([&handler, &cmd] { handler = [&cmd](Context& c) { return cmd.Run(c); }; });
  };
  bind("validate", "check a JSONL file against its schema", validate);
  bind("extract-stus", "derive STUs from SRL (and coref) annotations", extract);
  bind("featurize", "69-dim syntactic features per sentence", featurize);
  bind("train-regressor", "train the easiness regressor", train);
  bind("predict-easiness", "predict sentence easiness with a trained model", predict);
  bind("select-units", "choose SCU or STU per sentence at fraction x", select);
  bind("score", "score every (example, system) pair", score);
  bind("meta-eval", "correlate metric scores with human scores", meta);
  bind("cv", "k-fold cross-validated meta-evaluation", cv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitRuntime;
  }
  if (!handler) return kExitRuntime;
  Context ctx{out, err, common};
  try {
    return handler(ctx);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("pyreval");
  for (const auto& a : args) argv.push_back(a.c_str());
  return RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace pyreval
