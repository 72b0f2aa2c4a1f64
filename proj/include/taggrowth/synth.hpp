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
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "taggrowth/error.hpp"
#include "taggrowth/ingest.hpp"

namespace taggrowth {

// Seeded random source. Uses mt19937_64 (whose output sequence is fixed by
// the standard) with its own conversions, so streams are identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

struct ZipfConfig {
  double alpha = 2.0;
  std::optional<std::uint64_t> vocabulary_cap;
  std::uint64_t seed = 1;

  // Throws ConfigError if alpha <= 1 without a cap, alpha < 0, or cap == 0.
  void validate() const;
};

// Draws ranks r >= 1 with p(r) proportional to r^-alpha. Ranks up to 65536
// come from an exact cumulative table; beyond that the tail mass is summed
// analytically (midpoint integral) and inverted in closed form.
class ZipfSampler {
 public:
  explicit ZipfSampler(const ZipfConfig& config);

  std::uint64_t operator()(Rng& rng) const;

  // Normalizing constant of the weights used by the sampler.
  double normalization() const { return head_total_ + tail_total_; }

 private:
  double alpha_;
  std::uint64_t cap_;  // 0 = unbounded
  std::vector<double> head_cdf_;
  double head_total_ = 0.0;
  double tail_total_ = 0.0;
};

// i.i.d. Zipf ranks; deterministic for a fixed seed.
std::vector<std::uint64_t> gen_zipf_stream(const ZipfConfig& config, std::uint64_t length);

struct PitmanYorConfig {
  double discount = 0.5;
  double strength = 1.0;
  std::uint64_t seed = 1;

  // Throws ConfigError unless 0 <= discount < 1 and strength > -discount.
  void validate() const;
};

// Sequential Pitman-Yor (two-parameter Chinese restaurant) process. Draw t + 1
// opens a new tag with probability (strength + discount K) / (strength + t),
// otherwise reuses tag k with probability proportional to count_k - discount.
// Each draw is O(1).
class PitmanYorProcess {
 public:
  PitmanYorProcess(double discount, double strength);

  // Returns the tag id (0, 1, 2, ... in order of creation).
  std::uint64_t draw(Rng& rng);
  // Opens a new tag unconditionally.
  std::uint64_t force_new();

  // Proposes a draw without changing the state. new_tag is true when the
  // draw would open a new tag (its id is then tables()).
  struct Proposal {
    bool new_tag;
    std::uint64_t tag;
  };
  Proposal propose(Rng& rng) const;
  void commit(const Proposal& proposal);

  std::uint64_t customers() const { return customers_; }
  std::uint64_t tables() const { return tables_; }

 private:
  double discount_;
  double strength_;
  std::uint64_t customers_ = 0;
  std::uint64_t tables_ = 0;
  // Tag of every draw except the first draw of each tag.
  std::vector<std::uint32_t> repeats_;
};

std::vector<std::uint64_t> gen_pitman_yor_stream(const PitmanYorConfig& config, std::uint64_t length);

// Streaming counterparts of the two generators above: same draws, written as
// one single-tag post per draw (see write_stream_as_posts) without holding
// the stream in memory.
void write_zipf_posts(std::ostream& out, const ZipfConfig& config, std::uint64_t length,
                      std::int64_t start_timestamp = 1072915200);
void write_pitman_yor_posts(std::ostream& out, const PitmanYorConfig& config, std::uint64_t length,
                            std::int64_t start_timestamp = 1072915200);

// Post length law: geometric body r^(n-1) for n < crossover, stitched
// continuously to a power tail r^(crossover-1) (n / crossover)^-tail_exponent,
// truncated at max_length.
struct PostLengthModel {
  double body_rate = 0.7;
  double tail_exponent = 3.5;
  std::uint32_t crossover = 10;
  std::uint32_t max_length = 1000;

  void validate() const;
  // Normalized probabilities for n = 1..max_length (index n - 1).
  std::vector<double> probabilities() const;
  double mean() const;
};

// Body rate in (0, 1) giving the requested mean (bisection). Throws
// ConfigError when the mean is unreachable.
double calibrate_body_rate(PostLengthModel model, double target_mean);

class PostLengthSampler {
 public:
  explicit PostLengthSampler(const PostLengthModel& model);
  std::uint32_t operator()(Rng& rng) const;

 private:
  std::vector<double> cdf_;
};

// Entity choice per post: a new entity with probability `innovation`,
// otherwise an existing one, picked proportionally to its post count with
// probability `strength` and uniformly otherwise.
struct AttachmentModel {
  double innovation = 0.3;
  double strength = 1.0;
};

struct FolksonomyGenConfig {
  std::uint64_t n_posts = 1000;
  PostLengthModel post_length;
  AttachmentModel resource_popularity{0.35, 1.0};
  AttachmentModel user_activity{0.13, 1.0};
  // Per-resource tag process. Its new tags take their identity from the
  // global process.
  PitmanYorConfig local_tag_process{2.0 / 3.0, 1.0, 0};
  PitmanYorConfig global_tag_process{0.8, 10.0, 0};
  // Probability that a tag slot is drawn straight from the global process.
  double global_coupling = 0.1;
  std::uint64_t seed = 1;
  std::int64_t start_timestamp = 1072915200;  // 2004-01-01T00:00:00Z

  // Calibrated preset: mean post length 3.4, tail exponent 3.5 above 10 tags,
  // local discount 2/3.
  static FolksonomyGenConfig paper_like(std::uint64_t n_posts, std::uint64_t seed);

  void validate() const;
};

// Generator bookkeeping, independent of the analysis code.
struct GeneratorCensus {
  std::uint64_t posts = 0;
  std::uint64_t users = 0;
  std::uint64_t resources = 0;
  std::uint64_t distinct_tags = 0;
  std::uint64_t tag_assignments = 0;
  // Post counts indexed by creation order.
  std::vector<std::uint64_t> resource_posts;
  std::vector<std::uint64_t> user_posts;
};

// Streams posts of a synthetic broad folksonomy. Resources and users are
// chosen by preferential attachment, lengths from PostLengthModel, tags from
// per-resource Pitman-Yor processes sharing a global Pitman-Yor pool. Tags
// within a post are distinct; no two consecutive posts share (user, resource).
// Timestamps are start_timestamp, +1, +2, ...
class FolksonomyGenerator {
 public:
  explicit FolksonomyGenerator(const FolksonomyGenConfig& config);

  // Returns false once n_posts posts were produced.
  bool next(Post& post);

  GeneratorCensus census() const;

  static std::string user_name(std::uint64_t id) { return "u" + std::to_string(id); }
  static std::string resource_name(std::uint64_t id) { return "r" + std::to_string(id); }

 private:
  struct Pool {
    std::vector<std::uint32_t> history;  // entity of every past post
    std::vector<std::uint64_t> counts;
  };
  struct LocalProcess {
    PitmanYorProcess process;
    std::vector<std::uint32_t> dish;  // global tag of each local tag
  };

  std::uint32_t pick(Pool& pool, const AttachmentModel& model);
  std::uint32_t draw_global();
  void fill_tags(std::uint32_t resource, std::uint32_t length, std::vector<std::uint32_t>& out);

  FolksonomyGenConfig config_;
  Rng rng_;
  PostLengthSampler lengths_;
  PitmanYorProcess global_;
  std::vector<LocalProcess> locals_;
  Pool resources_;
  Pool users_;
  std::vector<bool> emitted_;
  GeneratorCensus census_;
  std::uint32_t last_user_ = 0;
  std::uint32_t last_resource_ = 0;
};

// Writes all posts of the configuration in ingest line format.
GeneratorCensus gen_folksonomy(const FolksonomyGenConfig& config, std::ostream& out);

// Writes a tag stream in ingest format, one single-tag post per draw, all by
// user "u0" on resource "r0" with timestamps start, start + 1, ...
void write_stream_as_posts(std::ostream& out, std::span<const std::uint64_t> tags,
                           std::int64_t start_timestamp = 1072915200);

// `key = value` lines; blank lines and lines starting with '#' are skipped.
// Throws ConfigError on a line without '='.
std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& in);

// Keys: alpha, cap, seed.
void apply_setting(ZipfConfig& config, std::string_view key, std::string_view value);
// Keys: d, theta, seed.
void apply_setting(PitmanYorConfig& config, std::string_view key, std::string_view value);
// Keys: n_posts, seed, start_timestamp, length.body_rate, length.mean,
// length.tail_exponent, length.crossover, length.max, resource.innovation,
// resource.strength, user.innovation, user.strength, local.d, local.theta,
// global.d, global.theta, coupling.
void apply_setting(FolksonomyGenConfig& config, std::string_view key, std::string_view value);

}  // namespace taggrowth
