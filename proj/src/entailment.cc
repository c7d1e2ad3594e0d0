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

#include "pyreval/entailment.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <mutex>
#include <semaphore>
#include <stdexcept>
#include <utility>

#include "httplib.h"
#include "json.hpp"
#include "pyreval/errors.h"
#include "pyreval/util.h"

namespace pyreval {
namespace {

using nlohmann::json;

void RequireFinite(const NliLogits& l) {
  if (!std::isfinite(l.entail) || !std::isfinite(l.neutral) ||
      !std::isfinite(l.contradict)) {
    throw std::invalid_argument("non-finite NLI logit");
  }
}

std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double ParseDouble(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument("not a finite number: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string_view FnliModeName(FnliMode mode) {
  switch (mode) {
    case FnliMode::kP3c:
      return "p3c";
    case FnliMode::kL3c:
      return "l3c";
    case FnliMode::kP2c:
      return "p2c";
    case FnliMode::kL2c:
      return "l2c";
  }
  return "?";
}

FnliMode ParseFnliMode(std::string_view name) {
  for (FnliMode m : {FnliMode::kP3c, FnliMode::kL3c, FnliMode::kP2c, FnliMode::kL2c}) {
    if (FnliModeName(m) == name) return m;
  }
  throw std::invalid_argument("unknown f_NLI mode '" + std::string(name) +
                              "' (expected p3c, l3c, p2c or l2c)");
}

double P3c(const NliLogits& l) {
  RequireFinite(l);
  const double m = std::max({l.entail, l.neutral, l.contradict});
  const double e = std::exp(l.entail - m);
  const double n = std::exp(l.neutral - m);
  const double c = std::exp(l.contradict - m);
  return e / (e + n + c);
}

double P2c(const NliLogits& l) {
  RequireFinite(l);
  const double a = l.entail;
  const double b = l.neutral + l.contradict;
  if (!std::isfinite(b)) throw std::invalid_argument("non-finite NLI logit sum");
  const double m = std::max(a, b);
  const double ea = std::exp(a - m);
  const double eb = std::exp(b - m);
  return ea / (ea + eb);
}

double Fnli(const NliLogits& l, FnliMode mode) {
  switch (mode) {
    case FnliMode::kP3c:
      return P3c(l);
    case FnliMode::kL3c:
      RequireFinite(l);
      return l.entail > l.neutral && l.entail > l.contradict ? 1.0 : 0.0;
    case FnliMode::kP2c:
      return P2c(l);
    case FnliMode::kL2c:
      return P2c(l) > 0.5 ? 1.0 : 0.0;
  }
  throw std::invalid_argument("bad f_NLI mode");
}

std::string NliKey::ToString() const {
  return "(example '" + example_id + "', system '" + system_id + "', unit '" +
         unit_id + "')";
}

FnliMode DefaultMode(const BackendInfo& info) {
  return info.finetuned ? FnliMode::kP2c : FnliMode::kL3c;
}

std::vector<NliLogits> FetchLogits(EntailmentBackend& backend,
                                   const std::vector<NliQuery>& queries,
                                   const JudgeOptions& options) {
  if (options.batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  const std::size_t n = queries.size();
  const std::size_t n_batches = (n + options.batch_size - 1) / options.batch_size;
  std::vector<NliLogits> out(n);
  ParallelFor(n_batches, std::max<std::size_t>(1, options.workers), [&](std::size_t b) {
    const std::size_t begin = b * options.batch_size;
    const std::size_t end = std::min(n, begin + options.batch_size);
    const std::string range =
        "[" + std::to_string(begin) + ", " + std::to_string(end) + ")";
    std::vector<NliLogits> got;
    try {
      got = backend.Query(std::span<const NliQuery>(queries).subspan(begin, end - begin));
    } catch (const std::exception& e) {
      throw BackendError("entailment batch " + range + " failed: " + e.what());
    }
    if (got.size() != end - begin) {
      throw BackendError("entailment batch " + range + ": backend returned " +
                         std::to_string(got.size()) + " results for " +
                         std::to_string(end - begin) + " pairs");
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
      const NliLogits& l = got[i];
      if (!std::isfinite(l.entail) || !std::isfinite(l.neutral) ||
          !std::isfinite(l.contradict)) {
        throw BackendError("entailment batch " + range + ": non-finite logits for " +
                           queries[begin + i].key.ToString());
      }
      out[begin + i] = l;
    }
  });
  return out;
}

std::vector<double> Judge(EntailmentBackend& backend,
                          const std::vector<NliQuery>& queries, FnliMode mode,
                          const JudgeOptions& options) {
  std::vector<NliLogits> logits = FetchLogits(backend, queries, options);
  std::vector<double> out;
  out.reserve(logits.size());
  for (const auto& l : logits) out.push_back(Fnli(l, mode));
  return out;
}

ConstantBackend::ConstantBackend(NliLogits logits, bool finetuned)
    : logits_(logits), finetuned_(finetuned) {
  RequireFinite(logits_);
}

BackendInfo ConstantBackend::Info() const {
  return {"stub-constant",
          FormatDouble(logits_.entail) + "," + FormatDouble(logits_.neutral) + "," +
              FormatDouble(logits_.contradict),
          finetuned_, "none"};
}

std::vector<NliLogits> ConstantBackend::Query(std::span<const NliQuery> batch) {
  return std::vector<NliLogits>(batch.size(), logits_);
}

// Saturated in double precision: every f_NLI mode maps these to exactly 1 and 0.
constexpr NliLogits kGoldPresentLogits{800.0, 0.0, -800.0};
constexpr NliLogits kGoldAbsentLogits{-800.0, 0.0, 800.0};

GoldPresenceBackend::GoldPresenceBackend(const Dataset& dataset) {
  for (const auto& ex : dataset.examples) {
    for (const auto& [system_id, summary] : ex.systems) {
      for (const auto& [unit_id, p] : summary.gold_presence) {
        labels_.emplace(NliKey{ex.example_id, system_id, unit_id}, p);
      }
    }
  }
}

BackendInfo GoldPresenceBackend::Info() const {
  return {"stub-gold", "1", false, "none"};
}

std::vector<NliLogits> GoldPresenceBackend::Query(std::span<const NliQuery> batch) {
  std::vector<NliLogits> out;
  out.reserve(batch.size());
  for (const auto& q : batch) {
    auto it = labels_.find(q.key);
    if (it == labels_.end()) {
      throw BackendError("no gold presence label for " + q.key.ToString());
    }
    out.push_back(it->second == Presence::kPresent ? kGoldPresentLogits
                                                   : kGoldAbsentLogits);
  }
  return out;
}

LookupBackend::LookupBackend(const std::vector<NliScoreRecord>& records,
                             std::string version, bool finetuned)
    : version_(std::move(version)), finetuned_(finetuned) {
  for (const auto& r : records) {
    NliKey key{r.example_id, r.system_id, r.unit_id};
    const NliLogits logits{r.logits[0], r.logits[1], r.logits[2]};
    if (!table_.emplace(key, logits).second) {
      throw ValidationError(ErrorCode::kDuplicateKey,
                            "duplicate logits for " + key.ToString(), 0,
                            r.example_id, "unit_id");
    }
  }
}

std::unique_ptr<LookupBackend> LookupBackend::FromFile(const std::string& path,
                                                       bool finetuned) {
  const std::string content = ReadFile(path);
  return std::make_unique<LookupBackend>(ParseNliScores(content),
                                         HexDigest(Fnv1a64(content)), finetuned);
}

BackendInfo LookupBackend::Info() const {
  return {"lookup", version_, finetuned_, "none"};
}

std::vector<NliLogits> LookupBackend::Query(std::span<const NliQuery> batch) {
  std::vector<NliLogits> out;
  out.reserve(batch.size());
  for (const auto& q : batch) {
    auto it = table_.find(q.key);
    if (it == table_.end()) throw BackendError("no stored logits for " + q.key.ToString());
    out.push_back(it->second);
  }
  return out;
}

struct HttpBackend::State {
  std::string url;
  std::string base;    // scheme://host:port
  std::string prefix;  // path prefix without trailing slash
  HttpOptions options;
  std::counting_semaphore<1024> in_flight;
  mutable std::once_flag health_once;
  mutable BackendInfo info;

  State(std::string u, HttpOptions o)
      : url(std::move(u)),
        options(o),
        in_flight(static_cast<std::ptrdiff_t>(
            std::clamp<std::size_t>(o.max_in_flight, 1, 1024))) {
    std::size_t scheme = url.find("://");
    std::size_t path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    base = url.substr(0, path);
    if (path != std::string::npos) prefix = url.substr(path);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  }

  httplib::Client MakeClient() const {
    httplib::Client client(base);
    const auto secs = static_cast<time_t>(options.timeout_seconds);
    const auto usecs = static_cast<time_t>(
        (options.timeout_seconds - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    return client;
  }

  void LoadHealth() const {
    info = {"http:" + url, "unknown", false, "unknown"};
    httplib::Client client = MakeClient();
    auto res = client.Get(prefix + "/health");
    if (res && res->status == 200) {
      json body = json::parse(res->body, nullptr, false);
      if (body.is_object()) {
        std::string model = body.value("model", std::string());
        std::string version = body.value("version", std::string());
        if (!model.empty() || !version.empty()) info.version = model + "@" + version;
        if (body.contains("finetuned") && body["finetuned"].is_boolean()) {
          info.finetuned = body["finetuned"].get<bool>();
        }
        info.truncation_policy = body.value("truncation", std::string("unknown"));
      }
    }
    if (options.finetuned) info.finetuned = *options.finetuned;
  }
};

HttpBackend::HttpBackend(std::string url, HttpOptions options)
    : state_(std::make_unique<State>(std::move(url), options)) {}

HttpBackend::~HttpBackend() = default;

BackendInfo HttpBackend::Info() const {
  std::call_once(state_->health_once, [this] { state_->LoadHealth(); });
  return state_->info;
}

std::vector<NliLogits> HttpBackend::Query(std::span<const NliQuery> batch) {
  if (batch.empty()) return {};
  json pairs = json::array();
  for (const auto& q : batch) {
    pairs.push_back({{"premise", q.premise}, {"hypothesis", q.hypothesis}});
  }
  const std::string body = json{{"pairs", std::move(pairs)}}.dump();

  state_->in_flight.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{state_->in_flight};

  std::string last_error;
  for (int attempt = 0; attempt <= std::max(0, state_->options.retries); ++attempt) {
    httplib::Client client = state_->MakeClient();
    auto res = client.Post(state_->prefix + "/nli", body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server error " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw BackendError("POST /nli returned status " + std::to_string(res->status) +
                         ": " + res->body);
    }
    json parsed = json::parse(res->body, nullptr, false);
    if (!parsed.is_object() || !parsed.contains("logits") ||
        !parsed["logits"].is_array()) {
      throw BackendError("POST /nli response lacks a 'logits' array");
    }
    const json& rows = parsed["logits"];
    if (rows.size() != batch.size()) {
      throw BackendError("POST /nli returned " + std::to_string(rows.size()) +
                         " logit rows for " + std::to_string(batch.size()) + " pairs");
    }
    std::vector<NliLogits> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != 3 || !row[0].is_number() ||
          !row[1].is_number() || !row[2].is_number()) {
        throw BackendError("POST /nli returned a malformed logit row: " + row.dump());
      }
      out.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
    return out;
  }
  throw BackendError("POST " + state_->url + "/nli failed after " +
                     std::to_string(state_->options.retries + 1) +
                     " attempts: " + last_error);
}

std::unique_ptr<EntailmentBackend> MakeBackend(std::string_view spec,
                                               const Dataset* dataset,
                                               const BackendConfig& config) {
  if (spec == "stub") {
    if (dataset == nullptr) {
      throw std::invalid_argument("the gold stub backend needs a dataset");
    }
    return std::make_unique<GoldPresenceBackend>(*dataset);
  }
  if (spec.starts_with("stub:")) {
    std::string_view rest = spec.substr(5);
    std::vector<double> v;
    while (true) {
      const std::size_t comma = rest.find(',');
      v.push_back(ParseDouble(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (v.size() != 3) {
      throw std::invalid_argument("stub backend expects stub:E,N,C");
    }
    return std::make_unique<ConstantBackend>(NliLogits{v[0], v[1], v[2]},
                                             config.finetuned.value_or(false));
  }
  if (spec.starts_with("lookup:")) {
    return LookupBackend::FromFile(std::string(spec.substr(7)),
                                   config.finetuned.value_or(false));
  }
  if (spec.starts_with("http:")) {
    std::string url(spec.starts_with("http://") ? spec : spec.substr(5));
    if (!url.starts_with("http://") && !url.starts_with("https://")) {
      url = "http://" + url;
    }
    HttpOptions http = config.http;
    if (config.finetuned) http.finetuned = config.finetuned;
    return std::make_unique<HttpBackend>(std::move(url), http);
  }
  throw std::invalid_argument("unknown backend '" + std::string(spec) +
                              "' (expected stub, stub:E,N,C, lookup:PATH or http:URL)");
}

}  // namespace pyreval
