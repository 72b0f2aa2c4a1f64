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
#include <span>
#include <vector>

namespace taggrowth {

// Which intrinsic times a growth curve records. The final time of a stream is
// always recorded in addition to these.
struct SamplingPolicy {
  enum class Mode { every_point, log_spaced };

  Mode mode = Mode::log_spaced;
  int per_decade = 50;

  static SamplingPolicy every_point() { return {Mode::every_point, 0}; }
  static SamplingPolicy log_spaced(int per_decade = 50) { return {Mode::log_spaced, per_decade}; }
};

// Sorted, duplicate-free checkpoints round(10^(k / per_decade)), k = 0, 1, ...
// up to 10^15. Always contains 1.
std::span<const std::uint64_t> log_checkpoints(int per_decade);

// Stateful cursor over the checkpoints of a SamplingPolicy. Query with
// nondecreasing tau.
class CheckpointCursor {
 public:
  explicit CheckpointCursor(SamplingPolicy policy);

  bool due(std::uint64_t tau) {
    if (every_) return true;
    if (tau < next_) return false;
    advance(tau);
    return true;
  }

 private:
  void advance(std::uint64_t tau);

  bool every_ = false;
  std::span<const std::uint64_t> table_;
  std::size_t pos_ = 0;
  std::uint64_t next_ = 1;
};

}  // namespace taggrowth
