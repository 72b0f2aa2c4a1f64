// Copyright 2026 The taggrowth Authors.
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

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace taggrowth {

// 64-bit FNV-1a followed by a splitmix64 finalizer. Stable across platforms.
std::uint64_t hash64(std::string_view bytes);
std::uint64_t mix64(std::uint64_t x);

// HyperLogLog distinct counter with 2^precision 6-bit registers. The running
// estimate is maintained incrementally so estimate() is O(1).
class HyperLogLog {
 public:
  explicit HyperLogLog(int precision = 14);

  void add_hash(std::uint64_t hash);
  void add(std::string_view item) { add_hash(hash64(item)); }

  double estimate() const;
  // 1.04 / sqrt(m)
  double relative_standard_error() const;
  int precision() const { return precision_; }

 private:
  int precision_;
  std::vector<std::uint8_t> registers_;
  double inverse_sum_;
  std::size_t zero_registers_;
};

}  // namespace taggrowth
