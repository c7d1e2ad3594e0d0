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

#include "pyreval/gbt.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "pyreval/util.h"

namespace pyreval {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

inline constexpr std::string_view kFormat = "pyreval-gbt";
inline constexpr int kFormatVersion = 1;

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

double MeanOf(const std::vector<double>& r, const std::vector<std::size_t>& idx) {
  ExactSum s;
  for (std::size_t i : idx) s.Add(r[i]);
  return s.Value() / static_cast<double>(idx.size());
}

// Best split of `idx` by squared-error reduction; feature == -1 if none
// beats the noise floor.
Split FindSplit(const std::vector<std::vector<double>>& x,
                const std::vector<double>& r, const std::vector<std::size_t>& idx,
                std::size_t n_features, int min_leaf) {
  Split best;
  const std::size_t n = idx.size();
  if (n < 2 * static_cast<std::size_t>(min_leaf)) return best;
  double total = 0.0;
  double squares = 0.0;
  for (std::size_t i : idx) {
    total += r[i];
    squares += r[i] * r[i];
  }
  const double parent = total * total / static_cast<double>(n);
  const double floor = 1e-12 * squares;

  std::vector<std::size_t> order(idx);
  for (std::size_t f = 0; f < n_features; ++f) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return x[a][f] < x[b][f];
    });
    double left = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      left += r[order[k]];
      const double a = x[order[k]][f];
      const double b = x[order[k + 1]][f];
      if (!(a < b)) continue;
      const std::size_t n_left = k + 1;
      const std::size_t n_right = n - n_left;
      if (n_left < static_cast<std::size_t>(min_leaf) ||
          n_right < static_cast<std::size_t>(min_leaf)) {
        continue;
      }
      const double right = total - left;
      const double gain = left * left / static_cast<double>(n_left) +
                          right * right / static_cast<double>(n_right) - parent;
      if (gain > best.gain && gain > floor) {
        double mid = std::midpoint(a, b);
        if (!(a < mid && mid <= b)) mid = b;
        best = {static_cast<int>(f), mid, gain};
      }
    }
  }
  return best;
}

int Grow(RegressionTree& tree, const std::vector<std::vector<double>>& x,
         const std::vector<double>& r, std::vector<std::size_t> idx, int depth,
         std::size_t n_features, const GbtConfig& config) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  Split split;
  if (depth < config.max_depth) {
    split = FindSplit(x, r, idx, n_features, config.min_samples_leaf);
  }
  if (split.feature < 0) {
    tree.nodes[id].value = MeanOf(r, idx);
    return id;
  }
  std::vector<std::size_t> left_idx;
  std::vector<std::size_t> right_idx;
  for (std::size_t i : idx) {
    (x[i][split.feature] < split.threshold ? left_idx : right_idx).push_back(i);
  }
  tree.nodes[id].feature = split.feature;
  tree.nodes[id].threshold = split.threshold;
  const int left = Grow(tree, x, r, std::move(left_idx), depth + 1, n_features, config);
  const int right = Grow(tree, x, r, std::move(right_idx), depth + 1, n_features, config);
  tree.nodes[id].left = left;
  tree.nodes[id].right = right;
  return id;
}

double Mse(const std::vector<double>& y, const std::vector<double>& pred) {
  ExactSum s;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - pred[i];
    s.AddProduct(d, d);
  }
  return s.Value() / static_cast<double>(y.size());
}

int NodeDepth(const RegressionTree& t, int id) {
  const TreeNode& n = t.nodes[static_cast<std::size_t>(id)];
  if (n.IsLeaf()) return 0;
  return 1 + std::max(NodeDepth(t, n.left), NodeDepth(t, n.right));
}

double ReadDouble(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw std::invalid_argument(std::string("model field '") + key +
                                "' missing or not a number");
  }
  return j[key].get<double>();
}

long long ReadInt(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw std::invalid_argument(std::string("model field '") + key +
                                "' missing or not an integer");
  }
  return j[key].get<long long>();
}

}  // namespace

double RegressionTree::Predict(std::span<const double> x) const {
  std::size_t id = 0;
  while (!nodes[id].IsLeaf()) {
    const TreeNode& n = nodes[id];
    id = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold
                                      ? n.left
                                      : n.right);
  }
  return nodes[id].value;
}

int RegressionTree::Depth() const { return nodes.empty() ? 0 : NodeDepth(*this, 0); }

GbtModel TrainGbt(const std::vector<std::vector<double>>& features,
                  const std::vector<double>& targets, const GbtConfig& config) {
  if (features.size() != targets.size()) {
    throw std::invalid_argument("features and targets differ in length");
  }
  if (targets.size() < 2) throw std::invalid_argument("need at least 2 samples");
  if (config.max_depth < 0 || config.n_rounds < 0 || config.min_samples_leaf < 1 ||
      !(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    throw std::invalid_argument("invalid GBT hyperparameters");
  }
  const std::size_t n = targets.size();
  const std::size_t dim = features[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    if (features[i].size() != dim) throw std::invalid_argument("ragged feature rows");
    if (!std::isfinite(targets[i])) {
      throw std::invalid_argument("non-finite target at row " + std::to_string(i));
    }
    for (double v : features[i]) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("non-finite feature at row " + std::to_string(i));
      }
    }
  }

  GbtModel model;
  model.n_features = dim;
  model.config = config;
  model.base_prediction = ExactTotal(targets) / static_cast<double>(n);

  // Prediction for row i is base + η·tree_sum[i], exactly as PredictRaw
  // evaluates it.
  std::vector<double> tree_sum(n, 0.0);
  std::vector<double> pred(n, model.base_prediction);
  model.training_mse.push_back(Mse(targets, pred));

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<double> residual(n);
  for (int round = 0; round < config.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = targets[i] - pred[i];
    RegressionTree tree;
    Grow(tree, features, residual, all, 0, dim, config);

    std::vector<double> next_sum(n);
    std::vector<double> next_pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      next_sum[i] = tree_sum[i] + tree.Predict(features[i]);
      next_pred[i] = model.base_prediction + config.learning_rate * next_sum[i];
    }
    const double mse = Mse(targets, next_pred);
    if (mse > model.training_mse.back()) {
      // Rounding made the step worse; keep the tree shape but silence it.
      for (auto& node : tree.nodes) node.value = 0.0;
      model.training_mse.push_back(model.training_mse.back());
    } else {
      tree_sum = std::move(next_sum);
      pred = std::move(next_pred);
      model.training_mse.push_back(mse);
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

double PredictRaw(const GbtModel& model, std::span<const double> x) {
  if (x.size() < model.n_features) {
    throw std::invalid_argument("feature vector has " + std::to_string(x.size()) +
                                " entries, model expects " +
                                std::to_string(model.n_features));
  }
  double sum = 0.0;
  for (const auto& tree : model.trees) sum += tree.Predict(x);
  return model.base_prediction + model.config.learning_rate * sum;
}

double PredictEasiness(const GbtModel& model, std::span<const double> x) {
  return std::clamp(PredictRaw(model, x), 0.0, 1.0);
}

double MeanSquaredError(const GbtModel& model,
                        const std::vector<std::vector<double>>& features,
                        const std::vector<double>& targets) {
  std::vector<double> pred;
  pred.reserve(features.size());
  for (const auto& row : features) pred.push_back(PredictRaw(model, row));
  return Mse(targets, pred);
}

ordered_json GbtToJson(const GbtModel& model) {
  ordered_json trees = ordered_json::array();
  for (const auto& tree : model.trees) {
    ordered_json nodes = ordered_json::array();
    for (const auto& node : tree.nodes) {
      ordered_json j;
      if (node.IsLeaf()) {
        j["leaf"] = node.value;
      } else {
        j["feature"] = node.feature;
        j["threshold"] = node.threshold;
        j["left"] = node.left;
        j["right"] = node.right;
      }
      nodes.push_back(std::move(j));
    }
    trees.push_back(std::move(nodes));
  }
  ordered_json out;
  out["format"] = kFormat;
  out["version"] = kFormatVersion;
  out["n_features"] = model.n_features;
  out["learning_rate"] = model.config.learning_rate;
  out["max_depth"] = model.config.max_depth;
  out["n_rounds"] = model.config.n_rounds;
  out["min_samples_leaf"] = model.config.min_samples_leaf;
  out["base_prediction"] = model.base_prediction;
  out["training_mse"] = model.training_mse;
  out["trees"] = std::move(trees);
  return out;
}

GbtModel GbtFromJson(const json& j) {
  if (!j.is_object() || j.value("format", std::string()) != kFormat) {
    throw std::invalid_argument("not a pyreval-gbt model");
  }
  if (ReadInt(j, "version") != kFormatVersion) {
    throw std::invalid_argument("unsupported model version");
  }
  GbtModel m;
  const long long n_features = ReadInt(j, "n_features");
  if (n_features < 1) throw std::invalid_argument("n_features must be >= 1");
  m.n_features = static_cast<std::size_t>(n_features);
  m.config.learning_rate = ReadDouble(j, "learning_rate");
  m.config.max_depth = static_cast<int>(ReadInt(j, "max_depth"));
  m.config.n_rounds = static_cast<int>(ReadInt(j, "n_rounds"));
  m.config.min_samples_leaf = static_cast<int>(ReadInt(j, "min_samples_leaf"));
  m.base_prediction = ReadDouble(j, "base_prediction");
  if (j.contains("training_mse") && j["training_mse"].is_array()) {
    for (const auto& v : j["training_mse"]) m.training_mse.push_back(v.get<double>());
  }
  if (!j.contains("trees") || !j["trees"].is_array()) {
    throw std::invalid_argument("model field 'trees' missing");
  }
  for (const auto& jt : j["trees"]) {
    if (!jt.is_array() || jt.empty()) throw std::invalid_argument("empty tree");
    RegressionTree tree;
    for (const auto& jn : jt) {
      TreeNode node;
      if (jn.contains("leaf")) {
        node.value = ReadDouble(jn, "leaf");
      } else {
        node.feature = static_cast<int>(ReadInt(jn, "feature"));
        node.threshold = ReadDouble(jn, "threshold");
        node.left = static_cast<int>(ReadInt(jn, "left"));
        node.right = static_cast<int>(ReadInt(jn, "right"));
        if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= m.n_features) {
          throw std::invalid_argument("feature index " + std::to_string(node.feature) +
                                      " out of range");
        }
      }
      tree.nodes.push_back(node);
    }
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const TreeNode& node = tree.nodes[i];
      if (node.IsLeaf()) continue;
      for (int child : {node.left, node.right}) {
        if (child <= static_cast<int>(i) ||
            child >= static_cast<int>(tree.nodes.size())) {
          throw std::invalid_argument("tree node has an invalid child index");
        }
      }
    }
    m.trees.push_back(std::move(tree));
  }
  return m;
}

std::string SerializeGbt(const GbtModel& model) { return GbtToJson(model).dump(2) + "\n"; }

GbtModel ParseGbt(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument("model file is not valid JSON");
  return GbtFromJson(j);
}

std::string GbtHash(const GbtModel& model) {
  return HexDigest(Fnv1a64(GbtToJson(model).dump()));
}

}  // namespace pyreval
