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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "taggrowth/ingest.hpp"

namespace taggrowth {

// Maps strings to dense ids 0, 1, 2, ... in first-seen order.
class Interner {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_[id]; }
  std::size_t size() const { return names_.size(); }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> ids_;
  std::vector<std::string> names_;
};

struct TasRow {
  std::uint32_t tag;
  std::uint32_t user;
  std::uint32_t resource;
};

// In-memory TAS table with interned columns and post boundaries. Row i has
// global intrinsic time i + 1.
class TasTable {
 public:
  // Appends the post's tags as adjacent rows. Throws InputError if the
  // timestamp decreases; posts without tags are ignored.
  void append_post(const Post& post);

  // Appends one row; `starts_post` marks the first row of a post.
  void append_row(std::string_view tag, std::string_view user, std::string_view resource,
                  bool starts_post);

  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  std::span<const TasRow> rows() const { return rows_; }

  // Row offset of the first row of each post, ascending.
  std::span<const std::uint64_t> post_starts() const { return post_starts_; }
  std::size_t post_count() const { return post_starts_.size(); }
  std::uint64_t post_length(std::size_t post) const;

  const Interner& tags() const { return tags_; }
  const Interner& users() const { return users_; }
  const Interner& resources() const { return resources_; }

  TasRecord record(std::size_t row) const;

 private:
  std::vector<TasRow> rows_;
  std::vector<std::uint64_t> post_starts_;
  Interner tags_;
  Interner users_;
  Interner resources_;
  bool have_timestamp_ = false;
  std::int64_t last_timestamp_ = 0;
};

// Loads a TAS file. Post boundaries are not stored in the format; a new post
// starts whenever (user, resource) differs from the previous row.
TasTable read_tas_table(std::istream& in);

// Census of a table (post_count from its boundaries; drop counts from
// `counts`).
DatasetSummary dataset_summary(const TasTable& table, const CleaningCounts& counts = {});

void write_tas(std::ostream& out, const TasTable& table);

}  // namespace taggrowth
