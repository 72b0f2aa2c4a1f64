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

#include "taggrowth/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace taggrowth {

std::uint64_t Rng::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = engine_();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = engine_();
      m = static_cast<unsigned __int128>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// ---------------------------------------------------------------- Zipf

namespace {
constexpr std::uint64_t kZipfHead = 65536;
constexpr std::uint64_t kMaxRank = std::uint64_t{1} << 62;
}  // namespace

void ZipfConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("zipf: alpha must be >= 0");
  if (vocabulary_cap && *vocabulary_cap == 0) throw ConfigError("zipf: vocabulary cap must be >= 1");
  if (!vocabulary_cap && !(alpha > 1.0)) {
    throw ConfigError("zipf: alpha must be > 1 without a vocabulary cap (law not normalizable)");
  }
}

ZipfSampler::ZipfSampler(const ZipfConfig& config)
    : alpha_(config.alpha), cap_(config.vocabulary_cap.value_or(0)) {
  config.validate();
  const std::uint64_t head = cap_ ? std::min(cap_, kZipfHead) : kZipfHead;
  head_cdf_.resize(head);
  double sum = 0.0;
  for (std::uint64_t r = 1; r <= head; ++r) {
    sum += std::pow(static_cast<double>(r), -alpha_);
    head_cdf_[r - 1] = sum;
  }
  head_total_ = sum;
  const double lo = static_cast<double>(head) + 0.5;
  if (!cap_) {
    tail_total_ = std::pow(lo, 1.0 - alpha_) / (alpha_ - 1.0);
  } else if (cap_ > head) {
    const double hi = static_cast<double>(cap_) + 0.5;
    tail_total_ = alpha_ == 1.0 ? std::log(hi / lo)
                                : (std::pow(lo, 1.0 - alpha_) - std::pow(hi, 1.0 - alpha_)) / (alpha_ - 1.0);
  }
}

std::uint64_t ZipfSampler::operator()(Rng& rng) const {
  const double v = rng.uniform() * (head_total_ + tail_total_);
  if (v < head_total_ || tail_total_ == 0.0) {
    auto it = std::upper_bound(head_cdf_.begin(), head_cdf_.end(), v);
    if (it == head_cdf_.end()) --it;
    return static_cast<std::uint64_t>(it - head_cdf_.begin()) + 1;
  }
  // Invert the integral of x^-alpha from head + 1/2.
  const double w = v - head_total_;
  const double lo = static_cast<double>(head_cdf_.size()) + 0.5;
  double x;
  if (alpha_ == 1.0) {
    x = lo * std::exp(w);
  } else {
    const double base = std::pow(lo, 1.0 - alpha_) - w * (alpha_ - 1.0);
    x = base > 0.0 ? std::pow(base, 1.0 / (1.0 - alpha_)) : std::numeric_limits<double>::infinity();
  }
  const std::uint64_t upper = cap_ ? cap_ : kMaxRank;
  const double rounded = std::floor(x + 0.5);
  std::uint64_t rank = !(rounded < static_cast<double>(upper)) ? upper : static_cast<std::uint64_t>(rounded);
  return std::max<std::uint64_t>(rank, head_cdf_.size() + 1);
}

std::vector<std::uint64_t> gen_zipf_stream(const ZipfConfig& config, std::uint64_t length) {
  if (length < 1) throw ConfigError("zipf stream: length must be >= 1");
  ZipfSampler sampler(config);
  Rng rng(config.seed);
  std::vector<std::uint64_t> out(length);
  for (auto& tag : out) tag = sampler(rng);
  return out;
}

// ---------------------------------------------------------------- Pitman-Yor

void PitmanYorConfig::validate() const {
  if (!(discount >= 0.0 && discount < 1.0)) throw ConfigError("pitman-yor: discount must be in [0, 1)");
  if (!(strength > -discount)) throw ConfigError("pitman-yor: strength must be > -discount");
}

PitmanYorProcess::PitmanYorProcess(double discount, double strength)
    : discount_(discount), strength_(strength) {
  PitmanYorConfig{discount, strength, 0}.validate();
}

PitmanYorProcess::Proposal PitmanYorProcess::propose(Rng& rng) const {
  if (customers_ == 0) return {true, tables_};
  const double t = static_cast<double>(customers_);
  const double k = static_cast<double>(tables_);
  const double p_new = (strength_ + discount_ * k) / (strength_ + t);
  if (rng.uniform() < p_new) return {true, tables_};
  // P(k) = (n_k - d) / (t - dK) = (n_k - 1) / (t - dK) + (1 - d) / (t - dK):
  // a repeat draw of the history, or a uniform pick among tags.
  const double denom = t - discount_ * k;
  if (!repeats_.empty() && rng.uniform() * denom < t - k) {
    return {false, repeats_[rng.below(repeats_.size())]};
  }
  return {false, rng.below(tables_)};
}

void PitmanYorProcess::commit(const Proposal& proposal) {
  if (proposal.new_tag) {
    ++tables_;
  } else {
    repeats_.push_back(static_cast<std::uint32_t>(proposal.tag));
  }
  ++customers_;
}

std::uint64_t PitmanYorProcess::draw(Rng& rng) {
  const Proposal p = propose(rng);
  commit(p);
  return p.tag;
}

std::uint64_t PitmanYorProcess::force_new() {
  const Proposal p{true, tables_};
  commit(p);
  return p.tag;
}

std::vector<std::uint64_t> gen_pitman_yor_stream(const PitmanYorConfig& config,
                                                 std::uint64_t length) {
  config.validate();
  if (length < 1) throw ConfigError("pitman-yor stream: length must be >= 1");
  PitmanYorProcess process(config.discount, config.strength);
  Rng rng(config.seed);
  std::vector<std::uint64_t> out(length);
  for (auto& tag : out) tag = process.draw(rng);
  return out;
}

// ---------------------------------------------------------------- post lengths

void PostLengthModel::validate() const {
  if (!(body_rate > 0.0 && body_rate < 1.0)) throw ConfigError("post length: body rate must be in (0, 1)");
  if (!(tail_exponent > 1.0)) throw ConfigError("post length: tail exponent must be > 1");
  if (crossover < 1) throw ConfigError("post length: crossover must be >= 1");
  if (max_length < crossover) throw ConfigError("post length: max length must be >= crossover");
}

std::vector<double> PostLengthModel::probabilities() const {
  validate();
  std::vector<double> p(max_length);
  const double join = std::pow(body_rate, static_cast<double>(crossover) - 1.0);
  double sum = 0.0;
  for (std::uint32_t n = 1; n <= max_length; ++n) {
    p[n - 1] = n < crossover
                   ? std::pow(body_rate, static_cast<double>(n) - 1.0)
                   : join * std::pow(static_cast<double>(n) / crossover, -tail_exponent);
    sum += p[n - 1];
  }
  for (auto& v : p) v /= sum;
  return p;
}

double PostLengthModel::mean() const {
  const auto p = probabilities();
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) m += static_cast<double>(i + 1) * p[i];
  return m;
}

double calibrate_body_rate(PostLengthModel model, double target_mean) {
  double lo = 1e-9, hi = 1.0 - 1e-9;
  model.body_rate = lo;
  const double mean_lo = model.mean();
  model.body_rate = hi;
  const double mean_hi = model.mean();
  if (!(target_mean >= mean_lo && target_mean <= mean_hi)) {
    throw ConfigError("post length: mean " + std::to_string(target_mean) + " not reachable (range " +
                      std::to_string(mean_lo) + " .. " + std::to_string(mean_hi) + ")");
  }
  for (int i = 0; i < 100; ++i) {
    model.body_rate = 0.5 * (lo + hi);
    (model.mean() < target_mean ? lo : hi) = model.body_rate;
  }
  return 0.5 * (lo + hi);
}

PostLengthSampler::PostLengthSampler(const PostLengthModel& model) {
  const auto p = model.probabilities();
  cdf_.resize(p.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) cdf_[i] = (sum += p[i]);
}

std::uint32_t PostLengthSampler::operator()(Rng& rng) const {
  const double u = rng.uniform() * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::uint32_t>(it - cdf_.begin()) + 1;
}

// ---------------------------------------------------------------- folksonomy

FolksonomyGenConfig FolksonomyGenConfig::paper_like(std::uint64_t n_posts, std::uint64_t seed) {
  FolksonomyGenConfig config;
  config.n_posts = n_posts;
  config.seed = seed;
  config.post_length.tail_exponent = 3.5;
  config.post_length.crossover = 10;
  config.post_length.max_length = 1000;
  config.post_length.body_rate = calibrate_body_rate(config.post_length, 3.4);
  config.resource_popularity = {0.35, 1.0};
  config.user_activity = {0.13, 1.0};
  config.local_tag_process = {0.35, 1.0, seed};
  config.global_tag_process = {0.8, 10.0, seed};
  config.global_coupling = 0.1;
  return config;
}

void FolksonomyGenConfig::validate() const {
  if (n_posts < 1) throw ConfigError("folksonomy: n_posts must be >= 1");
  post_length.validate();
  for (const auto* m : {&resource_popularity, &user_activity}) {
    if (!(m->innovation >= 0.0 && m->innovation <= 1.0) || !(m->strength >= 0.0 && m->strength <= 1.0)) {
      throw ConfigError("folksonomy: attachment probabilities must be in [0, 1]");
    }
  }
  local_tag_process.validate();
  global_tag_process.validate();
  if (!(global_coupling >= 0.0 && global_coupling <= 1.0)) {
    throw ConfigError("folksonomy: global coupling must be in [0, 1]");
  }
}

FolksonomyGenerator::FolksonomyGenerator(const FolksonomyGenConfig& config)
    : config_((config.validate(), config)),
      rng_(config.seed),
      lengths_(config.post_length),
      global_(config.global_tag_process.discount, config.global_tag_process.strength) {}

std::uint32_t FolksonomyGenerator::pick(Pool& pool, const AttachmentModel& model) {
  const std::size_t existing = pool.counts.size();
  if (existing == 0 || rng_.uniform() < model.innovation) return static_cast<std::uint32_t>(existing);
  if (rng_.uniform() < model.strength) return pool.history[rng_.below(pool.history.size())];
  return static_cast<std::uint32_t>(rng_.below(existing));
}

std::uint32_t FolksonomyGenerator::draw_global() {
  return static_cast<std::uint32_t>(global_.draw(rng_));
}

void FolksonomyGenerator::fill_tags(std::uint32_t resource, std::uint32_t length,
                                    std::vector<std::uint32_t>& out) {
  constexpr int kMaxAttempts = 64;
  LocalProcess& local = locals_[resource];
  const auto in_post = [&](std::uint32_t tag) {
    return std::find(out.begin(), out.end(), tag) != out.end();
  };
  out.clear();
  while (out.size() < length) {
    std::uint32_t tag = 0;
    bool accepted = false;
    for (int attempt = 0; attempt < kMaxAttempts && !accepted; ++attempt) {
      if (rng_.uniform() < config_.global_coupling) {
        tag = draw_global();
        accepted = !in_post(tag);
        continue;
      }
      const auto proposal = local.process.propose(rng_);
      tag = proposal.new_tag ? draw_global() : local.dish[proposal.tag];
      if (in_post(tag)) continue;
      local.process.commit(proposal);
      if (proposal.new_tag) local.dish.push_back(tag);
      accepted = true;
    }
    if (!accepted) tag = static_cast<std::uint32_t>(global_.force_new());
    out.push_back(tag);
  }
}

bool FolksonomyGenerator::next(Post& post) {
  if (census_.posts >= config_.n_posts) return false;
  const std::uint32_t resource = pick(resources_, config_.resource_popularity);
  std::uint32_t user = pick(users_, config_.user_activity);
  if (census_.posts > 0 && resource == last_resource_) {
    for (int retry = 0; retry < 16 && user == last_user_; ++retry) {
      user = pick(users_, config_.user_activity);
    }
    if (user == last_user_) user = static_cast<std::uint32_t>(users_.counts.size());
  }
  if (resource == resources_.counts.size()) {
    locals_.push_back({PitmanYorProcess(config_.local_tag_process.discount,
                                        config_.local_tag_process.strength),
                       {}});
  }
  const std::uint32_t length = lengths_(rng_);
  std::vector<std::uint32_t> tags;
  tags.reserve(length);
  fill_tags(resource, length, tags);

  for (auto* commit : {&resources_, &users_}) {
    const std::uint32_t id = commit == &resources_ ? resource : user;
    if (id == commit->counts.size()) commit->counts.push_back(0);
    ++commit->counts[id];
    commit->history.push_back(id);
  }
  if (emitted_.size() < global_.tables()) emitted_.resize(global_.tables(), false);
  post.timestamp = config_.start_timestamp + static_cast<std::int64_t>(census_.posts);
  post.user = user_name(user);
  post.resource = resource_name(resource);
  post.tags.clear();
  for (auto tag : tags) {
    if (!emitted_[tag]) {
      emitted_[tag] = true;
      ++census_.distinct_tags;
    }
    post.tags.push_back(std::to_string(tag));
  }
  ++census_.posts;
  census_.tag_assignments += tags.size();
  last_user_ = user;
  last_resource_ = resource;
  return true;
}

GeneratorCensus FolksonomyGenerator::census() const {
  GeneratorCensus c = census_;
  c.resources = resources_.counts.size();
  c.users = users_.counts.size();
  c.resource_posts = resources_.counts;
  c.user_posts = users_.counts;
  return c;
}

GeneratorCensus gen_folksonomy(const FolksonomyGenConfig& config, std::ostream& out) {
  FolksonomyGenerator generator(config);
  Post post;
  std::string line;
  while (generator.next(post)) {
    line = format_post_line(post);
    line += '\n';
    out << line;
  }
  return generator.census();
}

void write_stream_as_posts(std::ostream& out, std::span<const std::uint64_t> tags,
                           std::int64_t start_timestamp) {
  std::string line;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    line = std::to_string(start_timestamp + static_cast<std::int64_t>(i));
    line += "\tu0\tr0\t";
    line += std::to_string(tags[i]);
    line += '\n';
    out << line;
  }
}

namespace {

template <class Draw>
void write_drawn_posts(std::ostream& out, std::uint64_t length, std::int64_t start_timestamp,
                       Draw&& draw) {
  constexpr std::size_t kChunk = 1 << 16;
  std::vector<std::uint64_t> chunk;
  chunk.reserve(kChunk);
  std::int64_t ts = start_timestamp;
  for (std::uint64_t done = 0; done < length;) {
    chunk.clear();
    const std::uint64_t n = std::min<std::uint64_t>(kChunk, length - done);
    for (std::uint64_t i = 0; i < n; ++i) chunk.push_back(draw());
    write_stream_as_posts(out, chunk, ts);
    ts += static_cast<std::int64_t>(n);
    done += n;
  }
}

}  // namespace

void write_zipf_posts(std::ostream& out, const ZipfConfig& config, std::uint64_t length,
                      std::int64_t start_timestamp) {
  if (length < 1) throw ConfigError("zipf stream: length must be >= 1");
  ZipfSampler sampler(config);
  Rng rng(config.seed);
  write_drawn_posts(out, length, start_timestamp, [&] { return sampler(rng); });
}

void write_pitman_yor_posts(std::ostream& out, const PitmanYorConfig& config, std::uint64_t length,
                            std::int64_t start_timestamp) {
  config.validate();
  if (length < 1) throw ConfigError("pitman-yor stream: length must be >= 1");
  PitmanYorProcess process(config.discount, config.strength);
  Rng rng(config.seed);
  write_drawn_posts(out, length, start_timestamp, [&] { return process.draw(rng); });
}

// ---------------------------------------------------------------- settings

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("setting '" + std::string(key) + "': cannot parse '" + std::string(value) + "'");
  }
  return out;
}

[[noreturn]] void unknown_key(std::string_view model, std::string_view key) {
  throw ConfigError("unknown " + std::string(model) + " setting '" + std::string(key) + "'");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    }
    out.emplace_back(std::string(trim(view.substr(0, eq))), std::string(trim(view.substr(eq + 1))));
  }
  return out;
}

void apply_setting(ZipfConfig& config, std::string_view key, std::string_view value) {
  if (key == "alpha") {
    config.alpha = parse_number<double>(key, value);
  } else if (key == "cap") {
    config.vocabulary_cap = parse_number<std::uint64_t>(key, value);
  } else if (key == "seed") {
    config.seed = parse_number<std::uint64_t>(key, value);
  } else {
    unknown_key("zipf", key);
  }
}

void apply_setting(PitmanYorConfig& config, std::string_view key, std::string_view value) {
  if (key == "d") {
    config.discount = parse_number<double>(key, value);
  } else if (key == "theta") {
    config.strength = parse_number<double>(key, value);
  } else if (key == "seed") {
    config.seed = parse_number<std::uint64_t>(key, value);
  } else {
    unknown_key("pitman-yor", key);
  }
}

void apply_setting(FolksonomyGenConfig& config, std::string_view key, std::string_view value) {
  const auto num = [&] { return parse_number<double>(key, value); };
  if (key == "n_posts") {
    config.n_posts = parse_number<std::uint64_t>(key, value);
  } else if (key == "seed") {
    config.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "start_timestamp") {
    config.start_timestamp = parse_number<std::int64_t>(key, value);
  } else if (key == "length.body_rate") {
    config.post_length.body_rate = num();
  } else if (key == "length.mean") {
    config.post_length.body_rate = calibrate_body_rate(config.post_length, num());
  } else if (key == "length.tail_exponent") {
    config.post_length.tail_exponent = num();
  } else if (key == "length.crossover") {
    config.post_length.crossover = parse_number<std::uint32_t>(key, value);
  } else if (key == "length.max") {
    config.post_length.max_length = parse_number<std::uint32_t>(key, value);
  } else if (key == "resource.innovation") {
    config.resource_popularity.innovation = num();
  } else if (key == "resource.strength") {
    config.resource_popularity.strength = num();
  } else if (key == "user.innovation") {
    config.user_activity.innovation = num();
  } else if (key == "user.strength") {
    config.user_activity.strength = num();
  } else if (key == "local.d") {
    config.local_tag_process.discount = num();
  } else if (key == "local.theta") {
    config.local_tag_process.strength = num();
  } else if (key == "global.d") {
    config.global_tag_process.discount = num();
  } else if (key == "global.theta") {
    config.global_tag_process.strength = num();
  } else if (key == "coupling") {
    config.global_coupling = num();
  } else {
    unknown_key("folksonomy", key);
  }
}

}  // namespace taggrowth
