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

#include <sstream>

#include "doctest.h"
#include "taggrowth/casefold.hpp"
#include "taggrowth/ingest.hpp"
#include "taggrowth/ingest_stream.hpp"
#include "taggrowth/tas_table.hpp"

using namespace taggrowth;

namespace {

CleaningPolicy window(std::int64_t lo, std::int64_t hi) {
  CleaningPolicy p;
  p.min_timestamp = lo;
  p.max_timestamp = hi;
  return p;
}

Post post(std::int64_t ts, std::string user, std::string resource, std::vector<std::string> tags) {
  return {ts, std::move(user), std::move(resource), std::move(tags)};
}

}  // namespace

TEST_CASE("parse_post_line maps fields verbatim") {
  const Post p = parse_post_line("1096228800\tu42\tr7\tweb,design,css");
  CHECK(p.timestamp == 1096228800);
  CHECK(p.user == "u42");
  CHECK(p.resource == "r7");
  CHECK(p.tags == std::vector<std::string>{"web", "design", "css"});
}

TEST_CASE("parse_post_line keeps case and duplicates") {
  const Post p = parse_post_line("5\tu\tr\tWeb,web,WEB\r");
  CHECK(p.tags == std::vector<std::string>{"Web", "web", "WEB"});
}

TEST_CASE("parse_post_line accepts an empty tag list") {
  const Post p = parse_post_line("1096228800\tu42\tr7\t");
  CHECK(p.tags.empty());
  CHECK(parse_post_line("1\tu\tr\t,,").tags.empty());
  CHECK(parse_post_line("1\tu\tr\ta,,b").tags == std::vector<std::string>{"a", "b"});
}

TEST_CASE("parse_post_line rejects malformed lines with the line number") {
  try {
    parse_post_line("xyz\tu1\tr1\ta", 17);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 17);
    CHECK(std::string(e.what()).find("line 17") == 0);
  }
  CHECK_THROWS_AS(parse_post_line("1\tu1\tr1", 3), ParseError);
  CHECK_THROWS_AS(parse_post_line("1\tu1\tr1\ta\tb", 3), ParseError);
  CHECK_THROWS_AS(parse_post_line("", 3), ParseError);
  CHECK_THROWS_AS(parse_post_line("1.5\tu\tr\ta", 3), ParseError);
  CHECK_THROWS_AS(parse_post_line("\tu\tr\ta", 3), ParseError);
}

TEST_CASE("format_post_line round-trips") {
  const Post p = post(-3, "u", "r", {"a", "b"});
  CHECK(format_post_line(p) == "-3\tu\tr\ta,b");
  CHECK(parse_post_line(format_post_line(p)) == p);
}

TEST_CASE("case folding") {
  CHECK(fold_case("DeSiGn") == "design");
  CHECK(fold_case("ÉCOLE") == "école");
  CHECK(fold_case("ΑΘΗΝΑ") == "αθηνα");
  CHECK(fold_case("МОСКВА") == "москва");
  CHECK(fold_case("İ") == "i");
  CHECK(fold_case("c++") == "c++");
  const std::string bad = "A\xff\xfe" "B";
  CHECK(fold_case(bad) == "a\xff\xfe" "b");
}

TEST_CASE("clean_posts drops empty posts") {
  auto r = clean_posts({post(10, "u", "r", {})}, window(0, 100));
  CHECK(r.posts.empty());
  CHECK(r.counts.dropped_empty == 1);
  CHECK(r.counts.posts_in == 1);
}

TEST_CASE("clean_posts folds case and deduplicates keeping the first occurrence") {
  auto r = clean_posts({post(10, "u", "r", {"Design", "DESIGN", "web"})}, window(0, 100));
  REQUIRE(r.posts.size() == 1);
  CHECK(r.posts[0].tags == std::vector<std::string>{"design", "web"});

  CleaningPolicy keep = window(0, 100);
  keep.dedupe_within_post = false;
  r = clean_posts({post(10, "u", "r", {"Design", "DESIGN", "web"})}, keep);
  CHECK(r.posts[0].tags == std::vector<std::string>{"design", "design", "web"});

  CleaningPolicy raw = window(0, 100);
  raw.fold_case = false;
  r = clean_posts({post(10, "u", "r", {"Design", "DESIGN", "Design"})}, raw);
  CHECK(r.posts[0].tags == std::vector<std::string>{"Design", "DESIGN"});
}

TEST_CASE("clean_posts applies the timestamp window inclusively") {
  auto r = clean_posts({post(100, "u", "r", {"a"}), post(101, "u", "r", {"a"}), post(9, "u", "r", {"a"}),
                        post(10, "u", "r", {"a"})},
                       window(10, 100));
  CHECK(r.posts.size() == 2);
  CHECK(r.counts.dropped_timestamp == 2);
  CHECK(r.counts.posts_in == r.counts.posts_out + r.counts.dropped_empty + r.counts.dropped_timestamp);
}

TEST_CASE("empty posts count as empty even with a bad timestamp") {
  auto r = clean_posts({post(1000, "u", "r", {})}, window(0, 100));
  CHECK(r.counts.dropped_empty == 1);
  CHECK(r.counts.dropped_timestamp == 0);
}

TEST_CASE("cleaning policy validation") {
  CHECK_THROWS_AS(window(5, 5).validate(), ConfigError);
  CHECK_NOTHROW(window(4, 5).validate());
  const auto d = CleaningPolicy::defaults();
  CHECK(d.fold_case);
  CHECK(d.dedupe_within_post);
  CHECK(d.max_from_wall_clock);
  CHECK(d.max_timestamp > 1700000000);
}

TEST_CASE("cleaning is idempotent") {
  std::vector<Post> posts{post(1, "u", "r", {"A", "b", "a"}), post(2, "u", "r", {}),
                          post(3, "v", "s", {"X", "x", "Y"}), post(500, "u", "r", {"z"})};
  const auto once = clean_posts(posts, window(0, 100));
  const auto twice = clean_posts(once.posts, window(0, 100));
  CHECK(twice.posts == once.posts);
  CHECK(twice.counts.dropped_empty == 0);
  CHECK(twice.counts.dropped_timestamp == 0);
}

TEST_CASE("case variants yield identical tag columns") {
  const std::vector<Post> a{post(1, "u", "r", {"Web", "CSS"}), post(2, "v", "r", {"wEb"})};
  const std::vector<Post> b{post(1, "u", "r", {"web", "css"}), post(2, "v", "r", {"WEB"})};
  const auto ta = build_tas(clean_posts(a, window(0, 100)).posts);
  const auto tb = build_tas(clean_posts(b, window(0, 100)).posts);
  CHECK(ta == tb);
}

TEST_CASE("build_tas expands posts into consecutive records") {
  const std::vector<Post> posts{post(1, "u1", "r1", {"a", "b"}), post(2, "u2", "r2", {"c"})};
  const auto tas = build_tas(posts);
  REQUIRE(tas.size() == 3);
  CHECK(tas[0] == TasRecord{1, "a", "u1", "r1"});
  CHECK(tas[1] == TasRecord{2, "b", "u1", "r1"});
  CHECK(tas[2] == TasRecord{3, "c", "u2", "r2"});
  CHECK(build_tas(std::vector<Post>{}).empty());

  const auto single = build_tas(std::vector<Post>{post(1, "u", "r", {"a", "b", "c", "d"})});
  REQUIRE(single.size() == 4);
  for (std::size_t i = 0; i < single.size(); ++i) CHECK(single[i].index == i + 1);
}

TEST_CASE("build_tas rejects decreasing timestamps; sorting is stable") {
  std::vector<Post> posts{post(5, "u", "r", {"a"}), post(3, "u", "r", {"b"}), post(3, "v", "r", {"c"}),
                          post(5, "w", "r", {"d"})};
  CHECK_THROWS_AS(build_tas(posts), InputError);
  sort_posts(posts);
  const auto tas = build_tas(posts);
  CHECK(tas[0].tag == "b");
  CHECK(tas[1].tag == "c");
  CHECK(tas[2].tag == "a");
  CHECK(tas[3].tag == "d");
}

TEST_CASE("dataset_summary counts") {
  const std::vector<TasRecord> tas{{1, "a", "u1", "r1"}, {2, "b", "u1", "r1"}, {3, "a", "u2", "r2"}};
  const auto s = dataset_summary(tas);
  CHECK(s.user_count == 2);
  CHECK(s.resource_count == 2);
  CHECK(s.distinct_tag_count == 2);
  CHECK(s.total_tag_assignments == 3);
  CHECK(s.post_count == 2);
  CHECK(dataset_summary(std::vector<TasRecord>{}) == DatasetSummary{});
}

TEST_CASE("TAS lines round-trip and the reader checks indices") {
  const TasRecord r{7, "tag", "user", "res"};
  CHECK(format_tas_line(r) == "7\ttag\tuser\tres");
  CHECK(parse_tas_line(format_tas_line(r)) == r);
  CHECK_THROWS_AS(parse_tas_line("0\ta\tu\tr", 1), ParseError);
  CHECK_THROWS_AS(parse_tas_line("1\t\tu\tr", 1), ParseError);

  std::istringstream good("1\ta\tu\tr\n2\tb\tu\tr\n\n3\tc\tv\tr\n");
  TasReader reader(good);
  TasRecord rec;
  int n = 0;
  while (reader.next(rec)) ++n;
  CHECK(n == 3);

  std::istringstream gap("1\ta\tu\tr\n3\tb\tu\tr\n");
  TasReader bad(gap);
  CHECK(bad.next(rec));
  CHECK_THROWS_AS(bad.next(rec), InputError);
}

TEST_CASE("TasTable infers post boundaries from user/resource changes") {
  std::istringstream in("1\ta\tu1\tr1\n2\tb\tu1\tr1\n3\ta\tu2\tr1\n4\tc\tu2\tr2\n");
  const TasTable table = read_tas_table(in);
  CHECK(table.size() == 4);
  CHECK(table.post_count() == 3);
  CHECK(table.post_length(0) == 2);
  CHECK(table.post_length(2) == 1);
  const auto s = dataset_summary(table);
  CHECK(s.post_count == 3);
  CHECK(s.distinct_tag_count == 3);
  std::ostringstream out;
  write_tas(out, table);
  CHECK(out.str() == "1\ta\tu1\tr1\n2\tb\tu1\tr1\n3\ta\tu2\tr1\n4\tc\tu2\tr2\n");
}

TEST_CASE("streaming ingest matches the batch pipeline for any thread count") {
  std::ostringstream text;
  std::vector<Post> posts;
  for (int i = 0; i < 5000; ++i) {
    Post p = post(1000 + i / 3, "u" + std::to_string(i % 17), "r" + std::to_string(i % 29),
                  {"T" + std::to_string(i % 11), "t" + std::to_string(i % 11), "x" + std::to_string(i % 7)});
    if (i % 13 == 0) p.tags.clear();
    if (i % 101 == 0) p.timestamp = 99999999;
    posts.push_back(p);
    text << format_post_line(p) << '\n';
  }
  const auto policy = window(0, 1000000);
  const auto batch = clean_posts(posts, policy);
  const auto expected = build_tas(batch.posts);

  for (int threads : {1, 3}) {
    IngestOptions opts;
    opts.policy = policy;
    opts.threads = threads;
    std::istringstream in(text.str());
    std::vector<TasRecord> got;
    TasEmitter emitter;
    const auto stats = ingest_posts(in, opts, [&](Post& p) {
      emitter.emit(p, [&](const TasRecord& r) { got.push_back(r); });
    });
    CHECK(got == expected);
    CHECK(stats.counts == batch.counts);
    CHECK(stats.lines == 5000);
  }
}

TEST_CASE("streaming ingest: parse errors abort or are skipped") {
  const std::string text = "1\tu\tr\ta\nbad line\n2\tu\tr\tb\nxyz\tu\tr\tc\n";
  IngestOptions opts;
  opts.policy = window(0, 100);
  {
    std::istringstream in(text);
    try {
      ingest_posts(in, opts, [](Post&) {});
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  opts.skip_parse_errors = true;
  std::istringstream in(text);
  int kept = 0;
  const auto stats = ingest_posts(in, opts, [&](Post&) { ++kept; });
  CHECK(kept == 2);
  CHECK(stats.parse_errors == 2);
  CHECK(stats.error_lines == std::vector<std::size_t>{2, 4});
}

TEST_CASE("streaming ingest: disorder is an error unless sorting is requested") {
  const std::string text = "5\tu\tr\ta\n3\tv\tr\tb\n3\tw\tr\tc\n";
  IngestOptions opts;
  opts.policy = window(0, 100);
  std::istringstream in(text);
  CHECK_THROWS_AS(ingest_posts(in, opts, [](Post&) {}), InputError);
  opts.sort = true;
  std::istringstream again(text);
  std::vector<std::string> users;
  ingest_posts(again, opts, [&](Post& p) { users.push_back(p.user); });
  CHECK(users == std::vector<std::string>{"v", "w", "u"});
}

TEST_CASE("summary accumulator agrees with the table summary") {
  std::istringstream in("1\tu\tr\tA,b\n2\tu\ts\tb\n3\tv\tr\t\n4\tv\tr\tc,C\n");
  IngestOptions opts;
  opts.policy = window(0, 100);
  IngestStats stats;
  const TasTable table = ingest_to_table(in, opts, &stats);
  const auto s = dataset_summary(table, stats.counts);
  CHECK(s.post_count == 3);
  CHECK(s.dropped_empty_count == 1);
  CHECK(s.total_tag_assignments == 4);
  CHECK(s.distinct_tag_count == 3);
  CHECK(s.total_tag_assignments >= s.distinct_tag_count);
  CHECK(s.total_tag_assignments >= s.post_count);

  SummaryAccumulator acc;
  for (std::size_t p = 0; p < table.post_count(); ++p) {
    for (std::uint64_t i = 0; i < table.post_length(p); ++i) {
      const auto r = table.record(table.post_starts()[p] + i);
      acc.add(r.tag, r.user, r.resource, i == 0);
    }
  }
  CHECK(acc.summary(stats.counts) == s);
}
