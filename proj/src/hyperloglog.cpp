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

#include "taggrowth/hyperloglog.hpp"

#include <bit>
#include <cmath>

#include "taggrowth/error.hpp"

namespace taggrowth {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return mix64(h);
}

HyperLogLog::HyperLogLog(int precision) : precision_(precision) {
  if (precision < 4 || precision > 18) throw ConfigError("hyperloglog: precision must be in [4, 18]");
  registers_.assign(std::size_t{1} << precision, 0);
  inverse_sum_ = static_cast<double>(registers_.size());
  zero_registers_ = registers_.size();
}

void HyperLogLog::add_hash(std::uint64_t hash) {
  const std::size_t index = hash >> (64 - precision_);
  const std::uint64_t rest = (hash << precision_) | (std::uint64_t{1} << (precision_ - 1));
  const auto rank = static_cast<std::uint8_t>(std::countl_zero(rest) + 1);
  std::uint8_t& reg = registers_[index];
  if (rank <= reg) return;
  if (reg == 0) --zero_registers_;
  inverse_sum_ += std::ldexp(1.0, -rank) - std::ldexp(1.0, -reg);
  reg = rank;
}

double HyperLogLog::estimate() const {
  const double m = static_cast<double>(registers_.size());
  const double alpha = 0.7213 / (1.0 + 1.079 / m);
  const double raw = alpha * m * m / inverse_sum_;
  if (raw <= 2.5 * m && zero_registers_ > 0) {
    return m * std::log(m / static_cast<double>(zero_registers_));
  }
  return raw;
}

double HyperLogLog::relative_standard_error() const {
  return 1.04 / std::sqrt(static_cast<double>(registers_.size()));
}

}  // namespace taggrowth
