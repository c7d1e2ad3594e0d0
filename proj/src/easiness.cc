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

#include "pyreval/easiness.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "pyreval/errors.h"
#include "pyreval/util.h"

namespace pyreval {

double EasinessLabel(const std::vector<std::string>& scus,
                     const std::vector<std::string>& stus,
                     const LexicalOptions& options) {
  if (scus.empty()) throw std::invalid_argument("easiness needs at least one SCU");
  std::vector<TokenBag> stu_bags;
  stu_bags.reserve(stus.size());
  for (const auto& s : stus) stu_bags.push_back(MakeTokenBag(s, options));
  ExactSum total;
  for (const auto& scu : scus) {
    const TokenBag bag = MakeTokenBag(scu, options);
    double best = 0.0;
    for (const auto& stu : stu_bags) best = std::max(best, Rouge1F1(bag, stu));
    total.Add(best);
  }
  return std::clamp(total.Value() / static_cast<double>(scus.size()), 0.0, 1.0);
}

std::vector<EasinessSample> BuildEasinessSamples(const Dataset& dataset,
                                                 const EasinessOptions& options) {
  std::vector<EasinessSample> out;
  for (const auto& ex : dataset.examples) {
    std::map<std::string, std::vector<std::string>> scus;
    std::map<std::string, std::vector<std::string>> stus;
    for (const auto& u : ex.units) {
      if (!u.source_sentence_id) continue;
      (u.kind == UnitKind::kScu ? scus : stus)[*u.source_sentence_id].push_back(u.text);
    }
    if (ex.CountUnits(UnitKind::kStu) == 0) {
      for (const auto& u : StusForExample(ex, ex.coref_enabled, options.stu)) {
        stus[*u.source_sentence_id].push_back(u.text);
      }
    }
    for (const auto& s : ex.sentences) {
      auto it = scus.find(s.sentence_id);
      if (it == scus.end()) continue;
      EasinessSample sample;
      sample.example_id = ex.example_id;
      sample.sentence_id = s.sentence_id;
      try {
        sample.features = Featurize(s, options.features);
      } catch (const ValidationError& e) {
        throw ValidationError(e.code(),
                              "sentence '" + s.sentence_id + "': cannot featurize",
                              0, ex.example_id, "parse_tree");
      }
      auto st = stus.find(s.sentence_id);
      sample.label = EasinessLabel(
          it->second, st == stus.end() ? std::vector<std::string>{} : st->second,
          options.lexical);
      out.push_back(std::move(sample));
    }
  }
  return out;
}

GbtModel TrainEasinessModel(const std::vector<EasinessSample>& samples,
                            const GbtConfig& config) {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  x.reserve(samples.size());
  for (const auto& s : samples) {
    x.emplace_back(s.features.begin(), s.features.end());
    y.push_back(s.label);
  }
  return TrainGbt(x, y, config);
}

std::vector<SentenceScore> PredictSentenceEasiness(const Dataset& dataset,
                                                   const GbtModel& model,
                                                   const FeatureOptions& options) {
  if (model.n_features != kFeatureDim) {
    throw std::invalid_argument("easiness model expects " +
                                std::to_string(model.n_features) +
                                " features, not " + std::to_string(kFeatureDim));
  }
  std::vector<SentenceScore> out;
  for (const auto& ex : dataset.examples) {
    for (const auto& s : ex.sentences) {
      FeatureVector f;
      try {
        f = Featurize(s, options);
      } catch (const ValidationError& e) {
        throw ValidationError(e.code(),
                              "sentence '" + s.sentence_id + "': cannot featurize",
                              0, ex.example_id, "parse_tree");
      }
      out.push_back({ex.example_id, s.sentence_id, PredictEasiness(model, f)});
    }
  }
  return out;
}

std::size_t SelectedCount(double x, std::size_t n) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("x must lie in [0, 1]");
  const double k = std::floor(x * static_cast<double>(n) + 1e-9);
  return std::min(n, static_cast<std::size_t>(k));
}

namespace {

void RankAndCut(std::vector<const SentenceScore*>& group, double x,
                DatasetSelection& out) {
  std::sort(group.begin(), group.end(),
            [](const SentenceScore* a, const SentenceScore* b) {
              if (a->score != b->score) return a->score > b->score;
              return std::tie(a->example_id, a->sentence_id) <
                     std::tie(b->example_id, b->sentence_id);
            });
  const std::size_t k = SelectedCount(x, group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    out[group[i]->example_id][group[i]->sentence_id] =
        i < k ? UnitChoice::kUseStu : UnitChoice::kUseScu;
  }
}

}  // namespace

DatasetSelection SelectSentences(const std::vector<SentenceScore>& scores, double x,
                                 SelectionScope scope) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("x must lie in [0, 1]");
  for (const auto& s : scores) {
    if (!std::isfinite(s.score)) {
      throw std::invalid_argument("non-finite easiness for sentence '" +
                                  s.sentence_id + "'");
    }
  }
  DatasetSelection out;
  if (scope == SelectionScope::kGlobal) {
    std::vector<const SentenceScore*> all;
    for (const auto& s : scores) all.push_back(&s);
    RankAndCut(all, x, out);
  } else {
    std::map<std::string, std::vector<const SentenceScore*>> groups;
    for (const auto& s : scores) groups[s.example_id].push_back(&s);
    for (auto& [id, group] : groups) RankAndCut(group, x, out);
  }
  return out;
}

Selection SelectSentences(const std::map<std::string, double>& scores, double x) {
  std::vector<SentenceScore> flat;
  for (const auto& [id, score] : scores) flat.push_back({"", id, score});
  DatasetSelection all = SelectSentences(flat, x, SelectionScope::kGlobal);
  return all.empty() ? Selection{} : all.begin()->second;
}

}  // namespace pyreval
