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

#ifndef PYREVAL_ENTAILMENT_H_
#define PYREVAL_ENTAILMENT_H_

// NLI logits, the four f_NLI scoring functions, and the backends that
// produce logits for (summary, unit) pairs.

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "pyreval/corpus.h"

namespace pyreval {

struct NliLogits {
  double entail = 0.0;
  double neutral = 0.0;
  double contradict = 0.0;

  friend bool operator==(const NliLogits&, const NliLogits&) = default;
};

enum class FnliMode { kP3c, kL3c, kP2c, kL2c };

std::string_view FnliModeName(FnliMode mode);
// Throws std::invalid_argument for anything but p3c/l3c/p2c/l2c.
FnliMode ParseFnliMode(std::string_view name);

// Throws std::invalid_argument on a non-finite logit.
double Fnli(const NliLogits& logits, FnliMode mode);
double P3c(const NliLogits& logits);
double P2c(const NliLogits& logits);

struct NliKey {
  std::string example_id;
  std::string system_id;
  std::string unit_id;

  auto operator<=>(const NliKey&) const = default;
  std::string ToString() const;
};

// premise = system summary, hypothesis = content unit.
struct NliQuery {
  NliKey key;
  std::string premise;
  std::string hypothesis;
};

struct BackendInfo {
  std::string identity;
  std::string version;
  bool finetuned = false;
  std::string truncation_policy = "none";
};

// Implementations must be safe to query from several threads at once.
class EntailmentBackend {
 public:
  virtual ~EntailmentBackend() = default;
  virtual BackendInfo Info() const = 0;
  virtual std::vector<NliLogits> Query(std::span<const NliQuery> batch) = 0;
};

// p2c for finetuned backends, l3c otherwise.
FnliMode DefaultMode(const BackendInfo& info);

struct JudgeOptions {
  std::size_t batch_size = 32;
  std::size_t workers = 1;
};

// Logits for every query, in input order. Backend failures are rethrown as
// BackendError naming the failing batch's index range.
std::vector<NliLogits> FetchLogits(EntailmentBackend& backend,
                                   const std::vector<NliQuery>& queries,
                                   const JudgeOptions& options = {});

std::vector<double> Judge(EntailmentBackend& backend,
                          const std::vector<NliQuery>& queries, FnliMode mode,
                          const JudgeOptions& options = {});

// Same logits for every pair.
class ConstantBackend : public EntailmentBackend {
 public:
  explicit ConstantBackend(NliLogits logits, bool finetuned = false);
  BackendInfo Info() const override;
  std::vector<NliLogits> Query(std::span<const NliQuery> batch) override;

 private:
  NliLogits logits_;
  bool finetuned_;
};

// Replays gold presence labels: (1,0,0) for present units, (0,1,0) for the
// rest. Exact under l3c and l2c.
class GoldPresenceBackend : public EntailmentBackend {
 public:
  explicit GoldPresenceBackend(const Dataset& dataset);
  BackendInfo Info() const override;
  std::vector<NliLogits> Query(std::span<const NliQuery> batch) override;

 private:
  std::map<NliKey, Presence> labels_;
};

// Answers from precomputed nli_scores.jsonl records.
class LookupBackend : public EntailmentBackend {
 public:
  LookupBackend(const std::vector<NliScoreRecord>& records, std::string version,
                bool finetuned = false);
  static std::unique_ptr<LookupBackend> FromFile(const std::string& path,
                                                 bool finetuned = false);
  BackendInfo Info() const override;
  std::vector<NliLogits> Query(std::span<const NliQuery> batch) override;

 private:
  std::map<NliKey, NliLogits> table_;
  std::string version_;
  bool finetuned_;
};

struct HttpOptions {
  double timeout_seconds = 30.0;
  int retries = 2;
  std::size_t max_in_flight = 4;
  std::optional<bool> finetuned;  // overrides the service's declaration
};

// Client for the inference sidecar: POST /nli, GET /health.
class HttpBackend : public EntailmentBackend {
 public:
  HttpBackend(std::string url, HttpOptions options = {});
  ~HttpBackend() override;
  BackendInfo Info() const override;
  std::vector<NliLogits> Query(std::span<const NliQuery> batch) override;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

struct BackendConfig {
  std::optional<bool> finetuned;
  HttpOptions http;
};

// Backend strings: "stub" (gold presence replay, needs `dataset`),
// "stub:E,N,C", "lookup:PATH", "http:URL".
std::unique_ptr<EntailmentBackend> MakeBackend(std::string_view spec,
                                               const Dataset* dataset,
                                               const BackendConfig& config = {});

}  // namespace pyreval

#endif  // PYREVAL_ENTAILMENT_H_
