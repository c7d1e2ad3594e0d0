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

#ifndef PYREVAL_GBT_H_
#define PYREVAL_GBT_H_

// Gradient-boosted regression trees under squared error, with exact greedy
// split search. Training is single-threaded and fully deterministic.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pyreval {

struct GbtConfig {
  double learning_rate = 0.1;
  int max_depth = 3;
  int n_rounds = 40;
  int min_samples_leaf = 1;
};

// A leaf has feature == -1. Inputs with x[feature] < threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool IsLeaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double Predict(std::span<const double> x) const;
  // Edges on the longest root-to-leaf path.
  int Depth() const;
};

struct GbtModel {
  std::size_t n_features = 0;
  GbtConfig config;
  double base_prediction = 0.0;
  std::vector<RegressionTree> trees;
  // Training MSE after the base prediction and after each round.
  std::vector<double> training_mse;
};

// Throws std::invalid_argument on length mismatch, fewer than 2 samples,
// ragged rows or non-finite values.
GbtModel TrainGbt(const std::vector<std::vector<double>>& features,
                  const std::vector<double>& targets, const GbtConfig& config = {});

// base + η·Σ tree outputs, unclamped. Throws std::invalid_argument when the
// input is shorter than the model's feature count.
double PredictRaw(const GbtModel& model, std::span<const double> x);
// Clamped to [0, 1].
double PredictEasiness(const GbtModel& model, std::span<const double> x);

double MeanSquaredError(const GbtModel& model,
                        const std::vector<std::vector<double>>& features,
                        const std::vector<double>& targets);

nlohmann::ordered_json GbtToJson(const GbtModel& model);
// Throws std::invalid_argument for a malformed or inconsistent model.
GbtModel GbtFromJson(const nlohmann::json& j);
std::string SerializeGbt(const GbtModel& model);
GbtModel ParseGbt(std::string_view text);
std::string GbtHash(const GbtModel& model);

}  // namespace pyreval

#endif  // PYREVAL_GBT_H_
