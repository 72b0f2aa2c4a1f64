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

#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "taggrowth/clock_growth.hpp"
#include "taggrowth/fit.hpp"
#include "taggrowth/ingest_stream.hpp"
#include "taggrowth/synth.hpp"

using namespace taggrowth;

namespace {

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

double stderr_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1) / double(v.size()));
}

std::uint64_t distinct(const std::vector<std::uint64_t>& s) {
  return std::set<std::uint64_t>(s.begin(), s.end()).size();
}

}  // namespace

TEST_CASE("rng helpers") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.below(7) < 7);
  }
  Rng a(9), b(9);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("zipf config validation") {
  CHECK_THROWS_AS(ZipfConfig({1.0, std::nullopt, 1}).validate(), ConfigError);
  CHECK_THROWS_AS(ZipfConfig({0.5, std::nullopt, 1}).validate(), ConfigError);
  CHECK_NOTHROW(ZipfConfig({1.0, 1000, 1}).validate());
  CHECK_THROWS_AS(gen_zipf_stream({2.0, std::nullopt, 1}, 0), ConfigError);
}

TEST_CASE("zipf streams are deterministic") {
  CHECK(gen_zipf_stream({2.0, std::nullopt, 5}, 10000) == gen_zipf_stream({2.0, std::nullopt, 5}, 10000));
  CHECK(gen_zipf_stream({2.0, std::nullopt, 5}, 10000) != gen_zipf_stream({2.0, std::nullopt, 6}, 10000));
  std::ostringstream a, b;
  write_zipf_posts(a, {2.0, std::nullopt, 5}, 70000);
  write_stream_as_posts(b, gen_zipf_stream({2.0, std::nullopt, 5}, 70000));
  CHECK(a.str() == b.str());
}

TEST_CASE("zipf rank-frequency slope") {
  const auto s = gen_zipf_stream({2.0, std::nullopt, 11}, 1000000);
  std::map<std::uint64_t, double> freq;
  for (auto r : s) freq[r] += 1.0;
  std::vector<double> x, y;
  for (std::uint64_t r = 1; r <= 100; ++r) {
    x.push_back(std::log10(double(r)));
    y.push_back(std::log10(freq[r]));
  }
  CHECK(least_squares(x, y).slope == doctest::Approx(-2.0).epsilon(0.1 / 2.0));
}

TEST_CASE("zipf sampler: capped law matches exact probabilities, tail beyond the table is reachable") {
  ZipfSampler capped({1.0, 10, 1});
  Rng rng(3);
  std::vector<double> counts(11, 0.0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) counts[capped(rng)] += 1.0;
  double h = 0.0;
  for (int r = 1; r <= 10; ++r) h += 1.0 / r;
  for (int r = 1; r <= 10; ++r) CHECK(counts[r] / n == doctest::Approx(1.0 / r / h).epsilon(0.05));

  // With alpha = 1.2 a sizeable share of draws lands beyond the exact head.
  const auto s = gen_zipf_stream({1.2, std::nullopt, 2}, 200000);
  CHECK(*std::max_element(s.begin(), s.end()) > 65536);
}

TEST_CASE("zipf vocabulary follows the Heaps relation against a naive sampler") {
  // Naive inverse transform over a capped table of 10^6 ranks.
  oracle::PowerLawSampler naive(2.0, 1000000, 17);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100000; ++i) seen.insert(naive());
  const auto s = gen_zipf_stream({2.0, std::nullopt, 17}, 100000);
  const double ours = double(distinct(s));
  CHECK(ours == doctest::Approx(double(seen.size())).epsilon(0.05));
  CHECK(endpoint_gamma(distinct(s), s.size()) == doctest::Approx(0.5).epsilon(0.05 / 0.5));

  const auto steep = gen_zipf_stream({10.0, std::nullopt, 1}, 100000);
  CHECK(distinct(steep) <= 6);
  CHECK(endpoint_gamma(distinct(steep), steep.size()) < 0.2);
}

TEST_CASE("pitman-yor config validation") {
  CHECK_THROWS_AS(PitmanYorConfig({1.0, 1.0, 1}).validate(), ConfigError);
  CHECK_THROWS_AS(PitmanYorConfig({-0.1, 1.0, 1}).validate(), ConfigError);
  CHECK_THROWS_AS(PitmanYorConfig({0.5, -0.5, 1}).validate(), ConfigError);
  CHECK_NOTHROW(PitmanYorConfig({0.5, -0.4, 1}).validate());
}

TEST_CASE("pitman-yor basics") {
  const auto one = gen_pitman_yor_stream({0.8, 10, 1}, 1);
  CHECK(one.size() == 1);
  CHECK(distinct(one) == 1);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = gen_pitman_yor_stream({0.5, 1.0, seed}, 2000);
    const auto k = distinct(s);
    CHECK(k >= 1);
    CHECK(k <= s.size());
    // Tags are numbered in order of first appearance.
    std::uint64_t next = 0;
    for (auto t : s) {
      CHECK(t <= next);
      if (t == next) ++next;
    }
  }
  CHECK(gen_pitman_yor_stream({0.8, 10, 3}, 5000) == gen_pitman_yor_stream({0.8, 10, 3}, 5000));
  std::ostringstream a, b;
  write_pitman_yor_posts(a, {0.8, 10, 3}, 70000);
  write_stream_as_posts(b, gen_pitman_yor_stream({0.8, 10, 3}, 70000));
  CHECK(a.str() == b.str());
}

TEST_CASE("pitman-yor with d = 0 matches the analytic table count") {
  const double theta = 5.0;
  const std::uint64_t n = 10000;
  std::vector<double> k;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) k.push_back(double(distinct(gen_pitman_yor_stream({0.0, theta, seed}, n))));
  const double expected = oracle::dirichlet_expected_tables(theta, n);
  CHECK(std::abs(mean_of(k) - expected) < 4.0 * stderr_of(k));
}

TEST_CASE("pitman-yor agrees with the naive seating oracle") {
  for (const auto& [d, theta] : std::vector<std::pair<double, double>>{{0.5, 1.0}, {0.8, 10.0}, {0.3, -0.2}}) {
    const std::uint64_t n = 3000;
    std::vector<double> ours, naive;
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
      ours.push_back(double(distinct(gen_pitman_yor_stream({d, theta, seed}, n))));
      oracle::NaivePitmanYor ref(d, theta, seed + 1000);
      for (std::uint64_t i = 0; i < n; ++i) ref.draw();
      naive.push_back(double(ref.tables()));
    }
    const double se = std::hypot(stderr_of(ours), stderr_of(naive));
    CHECK(std::abs(mean_of(ours) - mean_of(naive)) < 4.0 * se);
    CHECK(std::abs(mean_of(ours) - oracle::pitman_yor_expected_tables(d, theta, n)) < 4.0 * stderr_of(ours));
  }
}

TEST_CASE("pitman-yor with d = 0 grows logarithmically") {
  std::vector<double> g;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto c = track_vocabulary(gen_pitman_yor_stream({0.0, 5.0, seed}, 1000000), SamplingPolicy::log_spaced());
    g.push_back(loglog_regression_exponent(c, last_decades(c, 1)).gamma);
  }
  // Local slope of 5 ln(1 + n / 5) across the last decade.
  const double analytic = std::log10(std::log1p(1e6 / 5.0) / std::log1p(1e5 / 5.0));
  CHECK(mean_of(g) == doctest::Approx(analytic).epsilon(0.03 / analytic));
  CHECK(mean_of(g) < 0.12);
}

TEST_CASE("per-resource pitman-yor with d = 2/3: local endpoint exponent") {
  std::vector<double> g;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = gen_pitman_yor_stream({2.0 / 3.0, 1.0, seed}, 100000);
    const auto c = track_vocabulary(s, SamplingPolicy::log_spaced(), ContextSelector::resource("r"));
    g.push_back(endpoint_exponent(c).gamma);
  }
  CHECK(mean_of(g) == doctest::Approx(2.0 / 3.0).epsilon(0.07 / (2.0 / 3.0)));
}

TEST_CASE("post length model") {
  PostLengthModel m;
  const auto p = m.probabilities();
  CHECK(p.size() == 1000);
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] <= p[i - 1]);
  // Power tail above the crossover.
  CHECK(p[199] / p[99] == doctest::Approx(std::pow(2.0, -3.5)).epsilon(1e-9));

  m.body_rate = calibrate_body_rate(m, 3.4);
  CHECK(m.mean() == doctest::Approx(3.4).epsilon(1e-9));
  PostLengthSampler sample(m);
  Rng rng(8);
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) sum += sample(rng);
  CHECK(sum / n == doctest::Approx(3.4).epsilon(0.02));

  CHECK_THROWS_AS(calibrate_body_rate(m, 200.0), ConfigError);
  PostLengthModel bad;
  bad.crossover = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("folksonomy: determinism, distinct tags per post and no immediate repeats") {
  const auto cfg = FolksonomyGenConfig::paper_like(20000, 3);
  std::ostringstream a, b;
  gen_folksonomy(cfg, a);
  gen_folksonomy(cfg, b);
  CHECK(a.str() == b.str());

  FolksonomyGenerator gen(cfg);
  Post p;
  std::string last_user, last_resource;
  std::int64_t ts = cfg.start_timestamp;
  while (gen.next(p)) {
    CHECK(p.timestamp == ts++);
    REQUIRE(!p.tags.empty());
    CHECK(std::set<std::string>(p.tags.begin(), p.tags.end()).size() == p.tags.size());
    CHECK_FALSE((p.user == last_user && p.resource == last_resource));
    last_user = p.user;
    last_resource = p.resource;
  }
}

TEST_CASE("folksonomy: ingest summary reproduces the generator census") {
  const auto cfg = FolksonomyGenConfig::paper_like(50000, 12);
  std::stringstream text;
  const auto census = gen_folksonomy(cfg, text);
  IngestOptions opts;
  IngestStats stats;
  const TasTable table = ingest_to_table(text, opts, &stats);
  const auto s = dataset_summary(table, stats.counts);
  CHECK(s.post_count == census.posts);
  CHECK(s.user_count == census.users);
  CHECK(s.resource_count == census.resources);
  CHECK(s.distinct_tag_count == census.distinct_tags);
  CHECK(s.total_tag_assignments == census.tag_assignments);
  CHECK(s.dropped_empty_count == 0);
  CHECK(s.dropped_timestamp_count == 0);
}

TEST_CASE("folksonomy: invalid configs fail before any output") {
  auto cfg = FolksonomyGenConfig::paper_like(10, 1);
  cfg.global_coupling = 1.5;
  std::ostringstream out;
  CHECK_THROWS_AS(gen_folksonomy(cfg, out), ConfigError);
  CHECK(out.str().empty());
  cfg = FolksonomyGenConfig::paper_like(10, 1);
  cfg.n_posts = 0;
  CHECK_THROWS_AS(gen_folksonomy(cfg, out), ConfigError);
  cfg = FolksonomyGenConfig::paper_like(10, 1);
  cfg.local_tag_process.discount = 1.0;
  CHECK_THROWS_AS(gen_folksonomy(cfg, out), ConfigError);
  CHECK(out.str().empty());
}

TEST_CASE("settings") {
  std::istringstream in("# comment\nalpha = 1.5\n\ncap=100\r\n");
  ZipfConfig z;
  for (const auto& [k, v] : read_key_values(in)) apply_setting(z, k, v);
  CHECK(z.alpha == 1.5);
  CHECK(z.vocabulary_cap == 100u);
  CHECK_THROWS_AS(apply_setting(z, "beta", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(z, "alpha", "x"), ConfigError);

  PitmanYorConfig py;
  apply_setting(py, "d", "0.25");
  apply_setting(py, "theta", "3");
  CHECK(py.discount == 0.25);
  CHECK(py.strength == 3.0);

  FolksonomyGenConfig f;
  apply_setting(f, "length.mean", "3.4");
  CHECK(f.post_length.mean() == doctest::Approx(3.4).epsilon(1e-9));
  apply_setting(f, "coupling", "0.3");
  apply_setting(f, "local.d", "0.5");
  CHECK(f.global_coupling == 0.3);
  CHECK(f.local_tag_process.discount == 0.5);

  std::istringstream bad("novalue\n");
  CHECK_THROWS_AS(read_key_values(bad), ConfigError);
}
