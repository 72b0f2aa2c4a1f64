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

#include "taggrowth/ingest_stream.hpp"

#include <algorithm>
#include <istream>
#include <optional>
#include <thread>

#include "taggrowth/io.hpp"

namespace taggrowth {
namespace {

constexpr std::size_t kChunkLines = 1 << 15;
constexpr std::size_t kKeptErrorLines = 10;

struct ChunkPart {
  std::vector<std::optional<Post>> posts;
  CleaningCounts counts;
  std::vector<ParseError> errors;
};

void process_range(const std::vector<std::string>& lines, const std::vector<std::size_t>& numbers,
                   std::size_t begin, std::size_t end, const CleaningPolicy& policy, ChunkPart& part) {
  PostCleaner cleaner(policy);
  part.posts.resize(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    try {
      Post post = parse_post_line(lines[i], numbers[i]);
      if (cleaner.apply(post)) part.posts[i - begin] = std::move(post);
    } catch (const ParseError& e) {
      part.errors.push_back(e);
    }
  }
  part.counts = cleaner.counts();
}

}  // namespace

IngestStats ingest_posts(std::istream& in, const IngestOptions& options,
                         const std::function<void(Post&)>& sink) {
  options.policy.validate();
  IngestStats stats;
  Checksum checksum;
  std::vector<Post> held;
  bool have_last = false;
  std::int64_t last_timestamp = 0;
  std::uint64_t delivered = 0;

  std::vector<std::string> lines;
  std::vector<std::size_t> numbers;
  const std::size_t workers = static_cast<std::size_t>(std::max(1, options.threads));

  const auto flush = [&] {
    if (lines.empty()) return;
    const std::size_t parts_n = std::min(workers, lines.size());
    std::vector<ChunkPart> parts(parts_n);
    const std::size_t per = (lines.size() + parts_n - 1) / parts_n;
    {
      std::vector<std::jthread> threads;
      for (std::size_t p = 0; p < parts_n; ++p) {
        const std::size_t begin = p * per;
        const std::size_t end = std::min(lines.size(), begin + per);
        if (begin >= end) continue;
        auto job = [&, p, begin, end] { process_range(lines, numbers, begin, end, options.policy, parts[p]); };
        if (p + 1 == parts_n) {
          job();
        } else {
          threads.emplace_back(job);
        }
      }
    }
    for (std::size_t p = 0; p < parts_n; ++p) {
      auto& part = parts[p];
      stats.counts += part.counts;
      for (const auto& err : part.errors) {
        if (!options.skip_parse_errors) throw err;
        ++stats.parse_errors;
        if (stats.error_lines.size() < kKeptErrorLines) stats.error_lines.push_back(err.line());
      }
      for (auto& post : part.posts) {
        if (!post) continue;
        if (options.sort) {
          held.push_back(std::move(*post));
          continue;
        }
        if (have_last && post->timestamp < last_timestamp) {
          throw InputError("posts are not sorted by timestamp: post " + std::to_string(delivered + 1) +
                           " has timestamp " + std::to_string(post->timestamp) + " after " +
                           std::to_string(last_timestamp) + " (use a sort pass)");
        }
        have_last = true;
        last_timestamp = post->timestamp;
        ++delivered;
        sink(*post);
      }
    }
    lines.clear();
    numbers.clear();
  };

  std::string buffer;
  while (std::getline(in, buffer)) {
    ++stats.lines;
    checksum.update(buffer);
    checksum.update("\n");
    std::string_view view = buffer;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.empty()) continue;
    numbers.push_back(stats.lines);
    lines.push_back(std::move(buffer));
    buffer.clear();
    if (lines.size() == kChunkLines) flush();
  }
  flush();
  if (options.sort) {
    sort_posts(held);
    for (auto& post : held) sink(post);
  }
  stats.checksum = checksum.hex();
  return stats;
}

TasTable ingest_to_table(std::istream& in, const IngestOptions& options, IngestStats* stats) {
  TasTable table;
  IngestStats s = ingest_posts(in, options, [&](Post& post) { table.append_post(post); });
  if (stats) *stats = std::move(s);
  return table;
}

void SummaryAccumulator::add(std::string_view tag, std::string_view user, std::string_view resource,
                             bool starts_post) {
  ++records_;
  if (starts_post) ++posts_;
  if (users_.find(user) == users_.end()) users_.emplace(user);
  if (resources_.find(resource) == resources_.end()) resources_.emplace(resource);
  if (tags_.find(tag) == tags_.end()) tags_.emplace(tag);
}

DatasetSummary SummaryAccumulator::summary(const CleaningCounts& counts) const {
  DatasetSummary s;
  s.post_count = counts.posts_in > 0 ? counts.posts_out : posts_;
  s.dropped_empty_count = counts.dropped_empty;
  s.dropped_timestamp_count = counts.dropped_timestamp;
  s.user_count = users_.size();
  s.resource_count = resources_.size();
  s.distinct_tag_count = tags_.size();
  s.total_tag_assignments = records_;
  return s;
}

}  // namespace taggrowth
