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

#include "taggrowth/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <istream>
#include <unordered_set>

#include "taggrowth/casefold.hpp"

namespace taggrowth {
namespace {

// Splits on '\t' into at most `max_fields + 1` pieces so that an extra field
// is detectable.
std::size_t split_tabs(std::string_view line, std::string_view* fields, std::size_t max_fields) {
  std::size_t count = 0;
  std::size_t start = 0;
  for (;;) {
    if (count == max_fields) return max_fields + 1;
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields[count++] = line.substr(start);
      return count;
    }
    fields[count++] = line.substr(start, tab - start);
    start = tab + 1;
  }
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

template <class Int>
bool parse_int(std::string_view text, Int& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

void dedupe_in_place(std::vector<std::string>& tags) {
  if (tags.size() < 2) return;
  std::vector<std::string> kept;
  kept.reserve(tags.size());
  if (tags.size() <= 16) {
    for (auto& tag : tags) {
      if (std::find(kept.begin(), kept.end(), tag) == kept.end()) kept.push_back(std::move(tag));
    }
  } else {
    std::unordered_set<std::string> seen;
    for (auto& tag : tags) {
      if (seen.insert(tag).second) kept.push_back(std::move(tag));
    }
  }
  tags = std::move(kept);
}

}  // namespace

CleaningPolicy CleaningPolicy::defaults() {
  CleaningPolicy policy;
  policy.min_timestamp = 0;
  policy.max_timestamp = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
  policy.max_from_wall_clock = true;
  return policy;
}

void CleaningPolicy::validate() const {
  if (!(min_timestamp < max_timestamp)) {
    throw ConfigError("cleaning policy: min timestamp " + std::to_string(min_timestamp) +
                      " must be smaller than max timestamp " + std::to_string(max_timestamp));
  }
}

CleaningCounts& CleaningCounts::operator+=(const CleaningCounts& other) {
  posts_in += other.posts_in;
  posts_out += other.posts_out;
  dropped_empty += other.dropped_empty;
  dropped_timestamp += other.dropped_timestamp;
  return *this;
}

Post parse_post_line(std::string_view line, std::size_t line_number) {
  line = strip_cr(line);
  std::string_view fields[4];
  const std::size_t n = split_tabs(line, fields, 4);
  if (n != 4) {
    throw ParseError(line_number, "expected 4 tab-separated fields, found " +
                                      (n > 4 ? std::string("more") : std::to_string(n)));
  }
  Post post;
  if (!parse_int(fields[0], post.timestamp)) {
    throw ParseError(line_number, "timestamp is not an integer: '" + std::string(fields[0]) + "'");
  }
  post.user = fields[1];
  post.resource = fields[2];
  std::string_view tags = fields[3];
  std::size_t start = 0;
  while (start <= tags.size()) {
    std::size_t comma = tags.find(',', start);
    if (comma == std::string_view::npos) comma = tags.size();
    if (comma > start) post.tags.emplace_back(tags.substr(start, comma - start));
    start = comma + 1;
  }
  return post;
}

std::string format_post_line(const Post& post) {
  std::string line = std::to_string(post.timestamp);
  line += '\t';
  line += post.user;
  line += '\t';
  line += post.resource;
  line += '\t';
  for (std::size_t i = 0; i < post.tags.size(); ++i) {
    if (i) line += ',';
    line += post.tags[i];
  }
  return line;
}

PostCleaner::PostCleaner(CleaningPolicy policy) : policy_(policy) { policy_.validate(); }

bool PostCleaner::apply(Post& post) {
  ++counts_.posts_in;
  if (post.tags.empty()) {
    ++counts_.dropped_empty;
    return false;
  }
  if (post.timestamp < policy_.min_timestamp || post.timestamp > policy_.max_timestamp) {
    ++counts_.dropped_timestamp;
    return false;
  }
  if (policy_.fold_case) {
    for (auto& tag : post.tags) tag = fold_case(tag);
  }
  if (policy_.dedupe_within_post) dedupe_in_place(post.tags);
  ++counts_.posts_out;
  return true;
}

CleanResult clean_posts(std::vector<Post> posts, const CleaningPolicy& policy) {
  PostCleaner cleaner(policy);
  CleanResult result;
  result.posts.reserve(posts.size());
  for (auto& post : posts) {
    if (cleaner.apply(post)) result.posts.push_back(std::move(post));
  }
  result.counts = cleaner.counts();
  return result;
}

void sort_posts(std::vector<Post>& posts) {
  std::stable_sort(posts.begin(), posts.end(),
                   [](const Post& a, const Post& b) { return a.timestamp < b.timestamp; });
}

void TasEmitter::check_order(const Post& post) {
  if (posts_ > 0 && post.timestamp < last_timestamp_) {
    throw InputError("posts are not sorted by timestamp: post " + std::to_string(posts_ + 1) +
                     " has timestamp " + std::to_string(post.timestamp) + " after " +
                     std::to_string(last_timestamp_) + " (use a sort pass)");
  }
  last_timestamp_ = post.timestamp;
  ++posts_;
}

std::vector<TasRecord> build_tas(std::span<const Post> posts) {
  std::vector<TasRecord> tas;
  std::size_t total = 0;
  for (const auto& post : posts) total += post.tags.size();
  tas.reserve(total);
  TasEmitter emitter;
  for (const auto& post : posts) {
    emitter.emit(post, [&](const TasRecord& record) { tas.push_back(record); });
  }
  return tas;
}

DatasetSummary dataset_summary(std::span<const TasRecord> tas, const CleaningCounts& counts) {
  std::unordered_set<std::string_view> users, resources, tags;
  for (const auto& record : tas) {
    users.insert(record.user);
    resources.insert(record.resource);
    tags.insert(record.tag);
  }
  DatasetSummary summary;
  if (counts.posts_in > 0 || tas.empty()) {
    summary.post_count = counts.posts_out;
  } else {
    // No cleaning counts: adjacent records sharing (user, resource) form a post.
    for (std::size_t i = 0; i < tas.size(); ++i) {
      if (i == 0 || tas[i].user != tas[i - 1].user || tas[i].resource != tas[i - 1].resource) {
        ++summary.post_count;
      }
    }
  }
  summary.dropped_empty_count = counts.dropped_empty;
  summary.dropped_timestamp_count = counts.dropped_timestamp;
  summary.user_count = users.size();
  summary.resource_count = resources.size();
  summary.distinct_tag_count = tags.size();
  summary.total_tag_assignments = tas.size();
  return summary;
}

std::string format_tas_line(const TasRecord& record) {
  std::string line = std::to_string(record.index);
  line += '\t';
  line += record.tag;
  line += '\t';
  line += record.user;
  line += '\t';
  line += record.resource;
  return line;
}

TasRecord parse_tas_line(std::string_view line, std::size_t line_number) {
  line = strip_cr(line);
  std::string_view fields[4];
  const std::size_t n = split_tabs(line, fields, 4);
  if (n != 4) {
    throw ParseError(line_number, "TAS record: expected 4 tab-separated fields, found " +
                                      (n > 4 ? std::string("more") : std::to_string(n)));
  }
  TasRecord record;
  if (!parse_int(fields[0], record.index) || record.index == 0) {
    throw ParseError(line_number, "TAS record: index is not a positive integer: '" +
                                      std::string(fields[0]) + "'");
  }
  if (fields[1].empty()) throw ParseError(line_number, "TAS record: empty tag");
  record.tag = fields[1];
  record.user = fields[2];
  record.resource = fields[3];
  return record;
}

bool TasReader::next(TasRecord& record) {
  while (std::getline(in_, buffer_)) {
    ++line_;
    if (strip_cr(buffer_).empty()) continue;
    record = parse_tas_line(buffer_, line_);
    if (record.index != expected_) {
      throw InputError("line " + std::to_string(line_) + ": TAS index " +
                       std::to_string(record.index) + " out of sequence (expected " +
                       std::to_string(expected_) + ")");
    }
    ++expected_;
    return true;
  }
  return false;
}

}  // namespace taggrowth
