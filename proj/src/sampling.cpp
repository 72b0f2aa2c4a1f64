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

#include "taggrowth/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "taggrowth/error.hpp"

namespace taggrowth {

std::span<const std::uint64_t> log_checkpoints(int per_decade) {
  if (per_decade < 1) throw ConfigError("sampling: per_decade must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::vector<std::uint64_t>> cache;
  std::lock_guard lock(mutex);
  auto [it, inserted] = cache.try_emplace(per_decade);
  if (inserted) {
    auto& table = it->second;
    const int max_k = 15 * per_decade;
    for (int k = 0; k <= max_k; ++k) {
      const auto value =
          static_cast<std::uint64_t>(std::llround(std::pow(10.0, static_cast<double>(k) / per_decade)));
      if (table.empty() || value > table.back()) table.push_back(value);
    }
  }
  return it->second;
}

CheckpointCursor::CheckpointCursor(SamplingPolicy policy) {
  if (policy.mode == SamplingPolicy::Mode::every_point) {
    every_ = true;
    return;
  }
  table_ = log_checkpoints(policy.per_decade);
  next_ = table_.front();
}

void CheckpointCursor::advance(std::uint64_t tau) {
  auto it = std::upper_bound(table_.begin() + static_cast<std::ptrdiff_t>(pos_), table_.end(), tau);
  pos_ = static_cast<std::size_t>(it - table_.begin());
  next_ = it == table_.end() ? std::numeric_limits<std::uint64_t>::max() : *it;
}

}  // namespace taggrowth
