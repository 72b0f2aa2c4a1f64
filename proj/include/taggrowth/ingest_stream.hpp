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
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "taggrowth/ingest.hpp"
#include "taggrowth/tas_table.hpp"

namespace taggrowth {

struct IngestOptions {
  CleaningPolicy policy = CleaningPolicy::defaults();
  // Skip malformed lines (counting them) instead of aborting.
  bool skip_parse_errors = false;
  // Stable-sort posts by timestamp before emitting them. Requires holding all
  // posts in memory.
  bool sort = false;
  // Worker threads for parsing and cleaning. Output order does not depend on
  // this value.
  int threads = 1;
};

struct IngestStats {
  CleaningCounts counts;
  std::uint64_t lines = 0;
  std::uint64_t parse_errors = 0;
  // Line numbers of the first skipped lines.
  std::vector<std::size_t> error_lines;
  // Checksum of the input lines (each followed by '\n').
  std::string checksum;
};

// Reads post lines, cleans them and passes every surviving post to `sink` in
// timestamp-then-input order. Blank lines are ignored. Throws ParseError on a
// malformed line unless skipping, and InputError on a decreasing timestamp
// unless sorting.
IngestStats ingest_posts(std::istream& in, const IngestOptions& options,
                         const std::function<void(Post&)>& sink);

// ingest_posts into an in-memory table.
TasTable ingest_to_table(std::istream& in, const IngestOptions& options, IngestStats* stats = nullptr);

// Streaming census of TAS records.
class SummaryAccumulator {
 public:
  void add(std::string_view tag, std::string_view user, std::string_view resource, bool starts_post);
  DatasetSummary summary(const CleaningCounts& counts) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  using Set = std::unordered_set<std::string, Hash, std::equal_to<>>;
  Set users_, resources_, tags_;
  std::uint64_t records_ = 0;
  std::uint64_t posts_ = 0;
};

}  // namespace taggrowth
