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

#include "taggrowth/clock_growth.hpp"

#include <algorithm>
#include <cmath>

namespace taggrowth {

std::string_view to_string(ContextKind kind) {
  switch (kind) {
    case ContextKind::global: return "global";
    case ContextKind::resource: return "resource";
    case ContextKind::user: return "user";
  }
  return "global";
}

ContextKind parse_context_kind(std::string_view text) {
  if (text == "global") return ContextKind::global;
  if (text == "resource") return ContextKind::resource;
  if (text == "user") return ContextKind::user;
  throw ConfigError("unknown context kind '" + std::string(text) + "'");
}

std::string ContextSelector::label() const {
  if (kind == ContextKind::global) return "global";
  return std::string(to_string(kind)) + ":" + id;
}

GrowthCurve CurveRecorder::finish() const {
  if (tau_ == 0) {
    throw PreconditionError("empty stream for context " + context_.label() +
                            ": no growth curve is defined");
  }
  GrowthCurve curve;
  curve.context = context_;
  curve.samples = samples_;
  if (curve.samples.empty() || curve.samples.back().tau != tau_) curve.samples.push_back({tau_, n_});
  curve.tau_max = tau_;
  curve.n_final = n_;
  return curve;
}

void GlobalVocabularyTracker::observe(std::string_view tag) {
  bool is_new = false;
  if (seen_.find(tag) == seen_.end()) {
    seen_.emplace(tag);
    is_new = true;
  }
  recorder_.tick(is_new);
}

ApproxVocabularyTracker::ApproxVocabularyTracker(SamplingPolicy policy, int precision)
    : sketch_(precision), cursor_(policy) {}

void ApproxVocabularyTracker::observe(std::string_view tag) {
  sketch_.add(tag);
  ++tau_;
  if (cursor_.due(tau_)) record();
}

void ApproxVocabularyTracker::record() {
  // Clamp so the published curve keeps 1 <= N <= tau and stays monotone.
  const double estimate = std::round(sketch_.estimate());
  auto n = static_cast<std::uint64_t>(std::max(1.0, estimate));
  n = std::clamp(n, std::max<std::uint64_t>(last_n_, 1), tau_);
  last_n_ = n;
  samples_.push_back({tau_, n});
}

GrowthCurve ApproxVocabularyTracker::finish() const {
  if (tau_ == 0) throw PreconditionError("empty stream: no growth curve is defined");
  GrowthCurve curve;
  curve.context = ContextSelector::global();
  curve.samples = samples_;
  if (curve.samples.empty() || curve.samples.back().tau != tau_) {
    ApproxVocabularyTracker copy = *this;
    copy.record();
    curve.samples = copy.samples_;
  }
  curve.tau_max = tau_;
  curve.n_final = curve.samples.back().n;
  curve.approximate = true;
  curve.relative_standard_error = sketch_.relative_standard_error();
  return curve;
}

GrowthCurve track_global_vocabulary(const TasTable& table, SamplingPolicy policy) {
  std::vector<bool> seen(table.tags().size(), false);
  CurveRecorder recorder(ContextSelector::global(), policy);
  for (const TasRow& row : table.rows()) {
    const bool is_new = !seen[row.tag];
    seen[row.tag] = true;
    recorder.tick(is_new);
  }
  return recorder.finish();
}

EntityVocabularyTracker::EntityVocabularyTracker(std::span<const ContextSelector> entities,
                                                 SamplingPolicy policy) {
  for (const auto& selector : entities) {
    if (selector.kind == ContextKind::global) {
      throw ConfigError("entity tracking needs resource or user selectors, got 'global'");
    }
    SlotMap& slots = selector.kind == ContextKind::resource ? resource_slots_ : user_slots_;
    const auto slot = static_cast<std::uint32_t>(recorders_.size());
    if (slots.emplace(selector.id, slot).second) recorders_.emplace_back(selector, policy);
  }
}

void EntityVocabularyTracker::tick(std::uint32_t slot, std::uint32_t tag) {
  const std::uint64_t key = (static_cast<std::uint64_t>(slot) << 32) | tag;
  recorders_[slot].tick(seen_.insert(key).second);
}

void EntityVocabularyTracker::observe(std::string_view tag, std::string_view user,
                                      std::string_view resource) {
  const auto r = resource_slots_.find(resource);
  const auto u = user_slots_.find(user);
  const bool has_r = r != resource_slots_.end();
  const bool has_u = u != user_slots_.end();
  if (!has_r && !has_u) return;
  const std::uint32_t tag_id = tags_.intern(tag);
  if (has_r) tick(r->second, tag_id);
  if (has_u) tick(u->second, tag_id);
}

EntityCurves EntityVocabularyTracker::finish() const {
  EntityCurves result;
  for (const auto& recorder : recorders_) {
    if (recorder.tau() == 0) {
      result.missing.push_back(recorder.context());
    } else {
      result.curves.push_back(recorder.finish());
    }
  }
  return result;
}

EntityCurves track_entity_vocabularies(const TasTable& table,
                                       std::span<const ContextSelector> entities,
                                       SamplingPolicy policy) {
  EntityVocabularyTracker tracker(entities, policy);
  for (const TasRow& row : table.rows()) {
    tracker.observe(table.tags().name(row.tag), table.users().name(row.user),
                    table.resources().name(row.resource));
  }
  return tracker.finish();
}

std::vector<ContextSelector> all_entities(const TasTable& table, ContextKind kind) {
  if (kind == ContextKind::global) throw ConfigError("all_entities: kind must be resource or user");
  const Interner& names = kind == ContextKind::resource ? table.resources() : table.users();
  std::vector<ContextSelector> out;
  out.reserve(names.size());
  for (std::uint32_t i = 0; i < names.size(); ++i) out.push_back({kind, names.name(i)});
  return out;
}

UserAccumulationTracker::UserAccumulationTracker(std::span<const std::string> resources) {
  for (const auto& id : resources) {
    const auto slot = static_cast<std::uint32_t>(curves_.size());
    if (slots_.emplace(id, slot).second) {
      curves_.push_back({id, {}});
      tau_.push_back(0);
    }
  }
}

void UserAccumulationTracker::observe_post(std::string_view resource, std::uint64_t length) {
  const auto it = slots_.find(resource);
  if (it == slots_.end()) return;
  auto& curve = curves_[it->second];
  auto& tau = tau_[it->second];
  tau += length;
  curve.samples.push_back({tau, curve.samples.size() + 1});
}

UserAccumulation UserAccumulationTracker::finish() const {
  UserAccumulation result;
  for (const auto& curve : curves_) {
    if (curve.samples.empty()) {
      result.missing.push_back(curve.resource);
    } else {
      result.curves.push_back(curve);
    }
  }
  return result;
}

UserAccumulation track_user_accumulation(const TasTable& table,
                                         std::span<const std::string> resources) {
  UserAccumulationTracker tracker(resources);
  const auto rows = table.rows();
  for (std::size_t post = 0; post < table.post_count(); ++post) {
    const TasRow& first = rows[table.post_starts()[post]];
    tracker.observe_post(table.resources().name(first.resource), table.post_length(post));
  }
  return tracker.finish();
}

}  // namespace taggrowth
