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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "taggrowth/error.hpp"

namespace taggrowth {

// One tagging event: a user attaching an ordered list of tags to a resource.
struct Post {
  std::int64_t timestamp = 0;
  std::string user;
  std::string resource;
  std::vector<std::string> tags;

  bool operator==(const Post&) const = default;
};

// One tag assignment. `index` is the global intrinsic time of the record:
// records are numbered 1, 2, ... in table order.
struct TasRecord {
  std::uint64_t index = 0;
  std::string tag;
  std::string user;
  std::string resource;

  bool operator==(const TasRecord&) const = default;
};

struct CleaningPolicy {
  std::int64_t min_timestamp = 0;
  std::int64_t max_timestamp = 0;
  bool fold_case = true;
  bool dedupe_within_post = true;
  // True when max_timestamp was taken from the clock at ingestion time rather
  // than given explicitly.
  bool max_from_wall_clock = false;

  // Window [0, now], case folding and deduplication on.
  static CleaningPolicy defaults();

  // Throws ConfigError unless min_timestamp < max_timestamp.
  void validate() const;
};

// Drop counters produced by cleaning.
struct CleaningCounts {
  std::uint64_t posts_in = 0;
  std::uint64_t posts_out = 0;
  std::uint64_t dropped_empty = 0;
  std::uint64_t dropped_timestamp = 0;

  CleaningCounts& operator+=(const CleaningCounts& other);
  bool operator==(const CleaningCounts&) const = default;
};

struct DatasetSummary {
  std::uint64_t post_count = 0;
  std::uint64_t dropped_empty_count = 0;
  std::uint64_t dropped_timestamp_count = 0;
  std::uint64_t user_count = 0;
  std::uint64_t resource_count = 0;
  std::uint64_t distinct_tag_count = 0;
  std::uint64_t total_tag_assignments = 0;

  bool operator==(const DatasetSummary&) const = default;
};

// Parses `timestamp<TAB>user<TAB>resource<TAB>tag1,tag2,...`. A trailing CR is
// ignored and empty comma-separated pieces are skipped, so an empty last field
// yields a post without tags. No cleaning is applied.
//
// Throws ParseError (carrying `line_number`) on a wrong field count or a
// non-integer timestamp.
Post parse_post_line(std::string_view line, std::size_t line_number = 0);

// Inverse of parse_post_line (no trailing newline).
std::string format_post_line(const Post& post);

// Applies a CleaningPolicy to posts one at a time and keeps the drop counts.
class PostCleaner {
 public:
  explicit PostCleaner(CleaningPolicy policy);

  // Cleans `post` in place. Returns false if the post must be dropped.
  bool apply(Post& post);

  const CleaningPolicy& policy() const { return policy_; }
  const CleaningCounts& counts() const { return counts_; }

 private:
  CleaningPolicy policy_;
  CleaningCounts counts_;
};

struct CleanResult {
  std::vector<Post> posts;
  CleaningCounts counts;
};

// Drops posts without tags and posts outside the timestamp window, folds case
// and removes repeated tags within a post (keeping the first occurrence).
// Relative order is preserved.
CleanResult clean_posts(std::vector<Post> posts, const CleaningPolicy& policy);

// Stable sort by timestamp; equal timestamps keep input order.
void sort_posts(std::vector<Post>& posts);

// Expands cleaned, time-ordered posts into tag assignments, one per
// (post, tag) pair, numbered from 1. Throws InputError if a timestamp
// decreases.
std::vector<TasRecord> build_tas(std::span<const Post> posts);

// Streaming form of build_tas.
class TasEmitter {
 public:
  // Calls `sink(const TasRecord&)` once per tag. Throws InputError if
  // post.timestamp is smaller than the previous post's.
  template <class Sink>
  void emit(const Post& post, Sink&& sink) {
    check_order(post);
    TasRecord record;
    record.user = post.user;
    record.resource = post.resource;
    for (const auto& tag : post.tags) {
      record.index = ++next_index_;
      record.tag = tag;
      sink(static_cast<const TasRecord&>(record));
    }
  }

  std::uint64_t records_emitted() const { return next_index_; }
  std::uint64_t posts_seen() const { return posts_; }

 private:
  void check_order(const Post& post);

  std::uint64_t next_index_ = 0;
  std::uint64_t posts_ = 0;
  std::int64_t last_timestamp_ = 0;
};

// Exact census of a TAS table. Drop counts are copied from `counts`.
DatasetSummary dataset_summary(std::span<const TasRecord> tas,
                               const CleaningCounts& counts = {});

// `index<TAB>tag<TAB>user<TAB>resource`
std::string format_tas_line(const TasRecord& record);

// Parses one TAS line. Throws ParseError.
TasRecord parse_tas_line(std::string_view line, std::size_t line_number = 0);

// Reads TAS lines in order, checking that indices run 1, 2, 3, ...
class TasReader {
 public:
  explicit TasReader(std::istream& in) : in_(in) {}

  // Returns false at end of input. Throws ParseError / InputError.
  bool next(TasRecord& record);

  std::size_t line_number() const { return line_; }

 private:
  std::istream& in_;
  std::string buffer_;
  std::size_t line_ = 0;
  std::uint64_t expected_ = 1;
};

}  // namespace taggrowth
