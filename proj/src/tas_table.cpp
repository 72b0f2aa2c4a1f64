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

#include "taggrowth/tas_table.hpp"

#include <istream>
#include <ostream>

namespace taggrowth {

std::uint32_t Interner::intern(std::string_view name) {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> Interner::find(std::string_view name) const {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  return std::nullopt;
}

void TasTable::append_post(const Post& post) {
  if (post.tags.empty()) return;
  if (have_timestamp_ && post.timestamp < last_timestamp_) {
    throw InputError("posts are not sorted by timestamp: post " +
                     std::to_string(post_starts_.size() + 1) + " has timestamp " +
                     std::to_string(post.timestamp) + " after " + std::to_string(last_timestamp_) +
                     " (use a sort pass)");
  }
  have_timestamp_ = true;
  last_timestamp_ = post.timestamp;
  const std::uint32_t user = users_.intern(post.user);
  const std::uint32_t resource = resources_.intern(post.resource);
  post_starts_.push_back(rows_.size());
  for (const auto& tag : post.tags) rows_.push_back({tags_.intern(tag), user, resource});
}

void TasTable::append_row(std::string_view tag, std::string_view user, std::string_view resource,
                          bool starts_post) {
  if (starts_post || rows_.empty()) post_starts_.push_back(rows_.size());
  rows_.push_back({tags_.intern(tag), users_.intern(user), resources_.intern(resource)});
}

std::uint64_t TasTable::post_length(std::size_t post) const {
  const std::uint64_t end = post + 1 < post_starts_.size() ? post_starts_[post + 1] : rows_.size();
  return end - post_starts_[post];
}

TasRecord TasTable::record(std::size_t row) const {
  const TasRow& r = rows_[row];
  return {row + 1, tags_.name(r.tag), users_.name(r.user), resources_.name(r.resource)};
}

TasTable read_tas_table(std::istream& in) {
  TasTable table;
  TasReader reader(in);
  TasRecord record, previous;
  bool first = true;
  while (reader.next(record)) {
    const bool starts_post =
        first || record.user != previous.user || record.resource != previous.resource;
    table.append_row(record.tag, record.user, record.resource, starts_post);
    previous = std::move(record);
    first = false;
  }
  return table;
}

DatasetSummary dataset_summary(const TasTable& table, const CleaningCounts& counts) {
  DatasetSummary summary;
  summary.post_count = table.post_count();
  summary.dropped_empty_count = counts.dropped_empty;
  summary.dropped_timestamp_count = counts.dropped_timestamp;
  summary.user_count = table.users().size();
  summary.resource_count = table.resources().size();
  summary.distinct_tag_count = table.tags().size();
  summary.total_tag_assignments = table.size();
  return summary;
}

void write_tas(std::ostream& out, const TasTable& table) {
  std::string line;
  const auto rows = table.rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    line = std::to_string(i + 1);
    line += '\t';
    line += table.tags().name(rows[i].tag);
    line += '\t';
    line += table.users().name(rows[i].user);
    line += '\t';
    line += table.resources().name(rows[i].resource);
    line += '\n';
    out << line;
  }
}

}  // namespace taggrowth
