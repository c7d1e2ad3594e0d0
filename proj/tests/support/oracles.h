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

#ifndef PYREVAL_TESTS_SUPPORT_ORACLES_H_
#define PYREVAL_TESTS_SUPPORT_ORACLES_H_

// Straightforward reference implementations used to cross-check the
// library's numerics. Written for clarity, not speed.

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "pyreval/correlation.h"

namespace pyreval::testing {

inline std::optional<double> BrutePearson(const std::vector<double>& a,
                                          const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n < 2) return std::nullopt;
  long double ma = 0;
  long double mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  long double sab = 0;
  long double saa = 0;
  long double sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) return std::nullopt;
  return static_cast<double>(sab / std::sqrt(saa * sbb));
}

// Rank = 1 + (number strictly smaller) + (ties - 1) / 2.
inline std::vector<double> BruteRanks(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) {
    double less = 0;
    double equal = 0;
    for (double y : v) {
      if (y < x) less += 1;
      if (y == x) equal += 1;
    }
    out.push_back(less + (equal + 1) / 2);
  }
  return out;
}

inline std::optional<double> BruteSpearman(const std::vector<double>& a,
                                           const std::vector<double>& b) {
  return BrutePearson(BruteRanks(a), BruteRanks(b));
}

inline std::optional<double> BruteCorrelate(Measure m, const std::vector<double>& a,
                                            const std::vector<double>& b) {
  return m == Measure::kPearson ? BrutePearson(a, b) : BruteSpearman(a, b);
}

inline std::optional<double> BruteSystemLevel(const ScoreMatrix& mx, Measure m) {
  std::vector<double> metric;
  std::vector<double> human;
  for (std::size_t s = 0; s < mx.system_ids.size(); ++s) {
    long double sm = 0;
    long double sh = 0;
    int n = 0;
    for (std::size_t e = 0; e < mx.example_ids.size(); ++e) {
      if (!mx.cells[e][s]) continue;
      sm += mx.cells[e][s]->metric;
      sh += mx.cells[e][s]->human;
      ++n;
    }
    if (n == 0) continue;
    metric.push_back(static_cast<double>(sm / n));
    human.push_back(static_cast<double>(sh / n));
  }
  return BruteCorrelate(m, metric, human);
}

inline std::optional<double> BruteSummaryLevel(const ScoreMatrix& mx, Measure m) {
  long double total = 0;
  int used = 0;
  for (std::size_t e = 0; e < mx.example_ids.size(); ++e) {
    std::vector<double> metric;
    std::vector<double> human;
    for (const auto& c : mx.cells[e]) {
      if (!c) continue;
      metric.push_back(c->metric);
      human.push_back(c->human);
    }
    const auto r = BruteCorrelate(m, metric, human);
    if (!r) continue;
    total += *r;
    ++used;
  }
  if (used == 0) return std::nullopt;
  return static_cast<double>(total / used);
}

// Random score matrix with missing cells and occasional ties.
inline ScoreMatrix RandomMatrix(std::mt19937_64& rng) {
  const std::size_t n_ex = 1 + rng() % 20;
  const std::size_t n_sys = 2 + rng() % 9;
  std::vector<std::string> ex;
  std::vector<std::string> sys;
  for (std::size_t i = 0; i < n_ex; ++i) ex.push_back("e" + std::to_string(i));
  for (std::size_t i = 0; i < n_sys; ++i) sys.push_back("s" + std::to_string(i));
  ScoreMatrix mx(ex, sys);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const bool coarse = rng() % 3 == 0;
  for (const auto& e : ex) {
    for (const auto& s : sys) {
      if (rng() % 10 == 0) continue;
      double a = u(rng);
      double b = 0.5 * a + 0.5 * u(rng);
      if (coarse) {
        a = std::round(a * 4) / 4;
        b = std::round(b * 4) / 4;
      }
      mx.Set(e, s, a, b);
    }
  }
  return mx;
}

}  // namespace pyreval::testing

#endif  // PYREVAL_TESTS_SUPPORT_ORACLES_H_
