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

#ifndef PYREVAL_STU_H_
#define PYREVAL_STU_H_

// Semantic triplet units: short sentences built from SRL frames by joining
// the before-verb arguments, the verb and one after-verb argument.

#include <set>
#include <string>
#include <vector>

#include "pyreval/corpus.h"

namespace pyreval {

struct StuOptions {
  // Argument roles never copied into a triplet. Negation modifiers are
  // restored through the preceding-token fix instead.
  std::set<std::string, std::less<>> excluded_roles = {"ARGM-NEG"};
  // Emit "before-args verb" for frames without after-verb arguments.
  bool emit_bare_subject_verb = false;
};

enum class StuOrigin { kFrameTriplet, kCorefTemplate };
std::string_view StuOriginName(StuOrigin origin);

struct StuCandidate {
  std::string text;
  std::string sentence_id;
  int frame_index = -1;      // -1 for coref templates
  int after_arg_index = -1;  // -1 for templates and bare subject-verb units
  StuOrigin origin = StuOrigin::kFrameTriplet;
};

inline constexpr const char* kBeVerbs[] = {"am",   "is", "are",  "was",
                                          "were", "be", "been", "being"};
bool IsBeVerb(std::string_view token);
bool IsPronoun(std::string_view mention);

// Triplets of one sentence. With use_coref, chains are resolved within the
// sentence alone; StusForExample resolves them across a whole reference.
std::vector<StuCandidate> ExtractStus(const ReferenceSentence& sentence,
                                      bool use_coref,
                                      const StuOptions& options = {});

// All candidates of an example: frame triplets in sentence order, then the
// coref templates of each reference.
std::vector<StuCandidate> ExtractExampleStus(const EvalExample& example,
                                             bool use_coref,
                                             const StuOptions& options = {});

// Same, as STU content units with weight 1. Ids are "<sentence>.stu<n>" and
// "<sentence>.coref<n>"; provenance lands in ContentUnit::extra.
std::vector<ContentUnit> StusForExample(const EvalExample& example,
                                        bool use_coref,
                                        const StuOptions& options = {});

}  // namespace pyreval

#endif  // PYREVAL_STU_H_
