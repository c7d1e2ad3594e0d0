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

#ifndef PYREVAL_EASINESS_H_
#define PYREVAL_EASINESS_H_

// Simulation easiness: how well a sentence's STUs reproduce its SCUs, the
// regressor that predicts it from syntax, and the top-x sentence selection.

#include <map>
#include <string>
#include <vector>

#include "pyreval/corpus.h"
#include "pyreval/features.h"
#include "pyreval/gbt.h"
#include "pyreval/lexical.h"
#include "pyreval/scoring.h"
#include "pyreval/stu.h"

namespace pyreval {

// Mean over SCUs of the best ROUGE-1 F1 against any STU. Throws
// std::invalid_argument when `scus` is empty.
double EasinessLabel(const std::vector<std::string>& scus,
                     const std::vector<std::string>& stus,
                     const LexicalOptions& options = {});

struct EasinessOptions {
  LexicalOptions lexical;
  FeatureOptions features;
  StuOptions stu;
};

struct EasinessSample {
  std::string example_id;
  std::string sentence_id;
  FeatureVector features{};
  double label = 0.0;
};

// One sample per sentence that sources at least one SCU. STUs come from
// the example's STU units when it has any, otherwise they are extracted
// from the SRL frames (with coref when the example enables it).
std::vector<EasinessSample> BuildEasinessSamples(const Dataset& dataset,
                                                 const EasinessOptions& options = {});

GbtModel TrainEasinessModel(const std::vector<EasinessSample>& samples,
                            const GbtConfig& config = {});

struct SentenceScore {
  std::string example_id;
  std::string sentence_id;
  double score = 0.0;
};

// Clamped predicted easiness for every sentence of every example.
std::vector<SentenceScore> PredictSentenceEasiness(const Dataset& dataset,
                                                   const GbtModel& model,
                                                   const FeatureOptions& options = {});

enum class SelectionScope { kGlobal, kPerExample };

// Number of sentences out of n that switch to STUs at fraction x.
std::size_t SelectedCount(double x, std::size_t n);

// Ranks by descending score (ties by ascending example then sentence id)
// and sends the top floor(x·n) sentences to STUs. kPerExample ranks and
// cuts within each example.
DatasetSelection SelectSentences(const std::vector<SentenceScore>& scores, double x,
                                 SelectionScope scope = SelectionScope::kGlobal);

// Single-example form: sentence_id -> score.
Selection SelectSentences(const std::map<std::string, double>& scores, double x);

}  // namespace pyreval

#endif  // PYREVAL_EASINESS_H_
