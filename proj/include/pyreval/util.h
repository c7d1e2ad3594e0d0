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

#ifndef PYREVAL_UTIL_H_
#define PYREVAL_UTIL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pyreval {

// 64-bit FNV-1a. Stable across platforms; used for config and model hashes.
std::uint64_t Fnv1a64(std::string_view data,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string HexDigest(std::uint64_t value);

// Uniform integer in [0, n) drawn by rejection from a mt19937_64 stream.
// Unlike std::uniform_int_distribution the output sequence is identical on
// every standard library.
std::uint64_t UniformIndex(std::mt19937_64& rng, std::uint64_t n);

template <typename T>
void PortableShuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = UniformIndex(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

// Derives an independent seed for a named sub-stream of `seed`.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view stream);

// Correctly rounded floating-point summation (Shewchuk partials, the
// algorithm behind Python's math.fsum). The result does not depend on the
// order of the addends.
class ExactSum {
 public:
  void Add(double x);
  // Adds the exact product a*b (split with fma).
  void AddProduct(double a, double b);
  double Value() const;

 private:
  std::vector<double> partials_;
};

double ExactTotal(std::span<const double> values);

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first
// exception thrown by any task is rethrown after all threads join.
void ParallelFor(std::size_t n, std::size_t workers,
                 const std::function<void(std::size_t)>& fn);

std::size_t DefaultWorkers();

std::string ReadFile(const std::string& path);
// Writes via a temporary file in the same directory and renames over path.
void WriteFileAtomically(const std::string& path, std::string_view content);

// Number of code points in a UTF-8 string (continuation bytes skipped).
std::size_t Utf8Length(std::string_view text);
// Byte offset of code point `index`; index == Utf8Length(text) gives size().
std::size_t Utf8ByteOffset(std::string_view text, std::size_t index);
// Substring by code-point range [begin, end).
std::string_view Utf8Slice(std::string_view text, std::size_t begin,
                           std::size_t end);

std::string TrimWhitespace(std::string_view text);

}  // namespace pyreval

#endif  // PYREVAL_UTIL_H_
