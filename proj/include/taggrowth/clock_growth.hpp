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

#include <compare>
#include <cstdint>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "taggrowth/error.hpp"
#include "taggrowth/hyperloglog.hpp"
#include "taggrowth/sampling.hpp"
#include "taggrowth/tas_table.hpp"

namespace taggrowth {

enum class ContextKind { global, resource, user };

std::string_view to_string(ContextKind kind);
// Accepts "global", "resource", "user". Throws ConfigError.
ContextKind parse_context_kind(std::string_view text);

// A context in which intrinsic time and vocabulary are measured: the whole
// stream, or the sub-stream of one resource or one user.
struct ContextSelector {
  ContextKind kind = ContextKind::global;
  std::string id;

  static ContextSelector global() { return {}; }
  static ContextSelector resource(std::string id) { return {ContextKind::resource, std::move(id)}; }
  static ContextSelector user(std::string id) { return {ContextKind::user, std::move(id)}; }

  // "global", "resource:<id>" or "user:<id>"
  std::string label() const;

  auto operator<=>(const ContextSelector&) const = default;
};

struct CurvePoint {
  std::uint64_t tau = 0;
  std::uint64_t n = 0;

  bool operator==(const CurvePoint&) const = default;
};

// Curves whose final intrinsic time is below this are flagged low-sample.
inline constexpr std::uint64_t kLowSampleTau = 10;

// Sampled vocabulary size N(tau) of one context. The last sample is always
// (tau_max, n_final).
struct GrowthCurve {
  ContextSelector context;
  std::vector<CurvePoint> samples;
  std::uint64_t tau_max = 0;
  std::uint64_t n_final = 0;
  // Set when N was estimated with a HyperLogLog sketch.
  bool approximate = false;
  double relative_standard_error = 0.0;

  bool low_sample() const { return tau_max < kLowSampleTau; }
};

// Intrinsic-time clock plus vocabulary counter for one context. The caller
// decides whether each tick introduced a new tag.
class CurveRecorder {
 public:
  CurveRecorder(ContextSelector context, SamplingPolicy policy)
      : context_(std::move(context)), cursor_(policy) {}

  void tick(bool is_new) {
    ++tau_;
    n_ += is_new ? 1 : 0;
    if (cursor_.due(tau_)) samples_.push_back({tau_, n_});
  }

  std::uint64_t tau() const { return tau_; }
  std::uint64_t n() const { return n_; }
  const ContextSelector& context() const { return context_; }

  // Throws PreconditionError if nothing was recorded.
  GrowthCurve finish() const;

 private:
  ContextSelector context_;
  CheckpointCursor cursor_;
  std::vector<CurvePoint> samples_;
  std::uint64_t tau_ = 0;
  std::uint64_t n_ = 0;
};

// Exact vocabulary growth of an arbitrary stream of hashable tags.
template <std::ranges::input_range R>
GrowthCurve track_vocabulary(R&& tags, SamplingPolicy policy,
                             ContextSelector context = ContextSelector::global()) {
  using Value = std::remove_cvref_t<std::ranges::range_value_t<R>>;
  std::unordered_set<Value> seen;
  CurveRecorder recorder(std::move(context), policy);
  for (auto&& tag : tags) recorder.tick(seen.insert(tag).second);
  return recorder.finish();
}

// Streaming exact global tracker over tag strings.
class GlobalVocabularyTracker {
 public:
  explicit GlobalVocabularyTracker(SamplingPolicy policy)
      : recorder_(ContextSelector::global(), policy) {}

  void observe(std::string_view tag);
  std::uint64_t distinct() const { return recorder_.n(); }
  GrowthCurve finish() const { return recorder_.finish(); }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::unordered_set<std::string, Hash, std::equal_to<>> seen_;
  CurveRecorder recorder_;
};

// Streaming approximate global tracker: memory is fixed by the sketch
// precision. The curve carries the sketch's relative standard error.
class ApproxVocabularyTracker {
 public:
  ApproxVocabularyTracker(SamplingPolicy policy, int precision = 14);

  void observe(std::string_view tag);
  GrowthCurve finish() const;

 private:
  void record();

  HyperLogLog sketch_;
  CheckpointCursor cursor_;
  std::vector<CurvePoint> samples_;
  std::uint64_t tau_ = 0;
  std::uint64_t last_n_ = 0;
};

// Global vocabulary growth of a table. Throws PreconditionError if empty.
GrowthCurve track_global_vocabulary(const TasTable& table, SamplingPolicy policy);

struct EntityCurves {
  // In selector order, entities that never appear omitted.
  std::vector<GrowthCurve> curves;
  std::vector<ContextSelector> missing;
};

// Local vocabularies of resources and/or users, measured on each entity's own
// intrinsic time (its cumulated tag assignments). One pass over the input.
class EntityVocabularyTracker {
 public:
  // Throws ConfigError for a global selector. Duplicate selectors are merged.
  EntityVocabularyTracker(std::span<const ContextSelector> entities, SamplingPolicy policy);

  void observe(std::string_view tag, std::string_view user, std::string_view resource);
  EntityCurves finish() const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  using SlotMap = std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>>;

  void tick(std::uint32_t slot, std::uint32_t tag);

  std::vector<CurveRecorder> recorders_;
  SlotMap resource_slots_;
  SlotMap user_slots_;
  Interner tags_;
  std::unordered_set<std::uint64_t> seen_;
};

EntityCurves track_entity_vocabularies(const TasTable& table,
                                       std::span<const ContextSelector> entities,
                                       SamplingPolicy policy);

// Selectors for every resource (or user) of the table, in first-seen order.
std::vector<ContextSelector> all_entities(const TasTable& table, ContextKind kind);

// Cumulated number of users U(tau) of a resource: each post on the resource
// adds one user and advances the resource's clock by the post's length.
struct UserAccumulationCurve {
  std::string resource;
  std::vector<CurvePoint> samples;  // (tau, users)
};

struct UserAccumulation {
  std::vector<UserAccumulationCurve> curves;
  std::vector<std::string> missing;
};

class UserAccumulationTracker {
 public:
  explicit UserAccumulationTracker(std::span<const std::string> resources);

  void observe_post(std::string_view resource, std::uint64_t length);
  UserAccumulation finish() const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::vector<UserAccumulationCurve> curves_;
  std::vector<std::uint64_t> tau_;
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> slots_;
};

UserAccumulation track_user_accumulation(const TasTable& table,
                                         std::span<const std::string> resources);

}  // namespace taggrowth
