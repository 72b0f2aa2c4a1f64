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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "taggrowth_cli_test";

struct Run {
  int code;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the tool through the shell; stdout is captured, stderr discarded.
Run run(const std::string& args) {
  fs::create_directories(kDir);
  const auto out = kDir / "stdout.txt";
  const std::string cmd = "cd '" + kDir.string() + "' && " + std::string(TAGGROWTH_BIN) + " " + args + " > '" +
                          out.string() + "' 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

// Same, for pipelines: `cmd` is spliced in verbatim with $T standing for the binary.
Run shell(std::string cmd) {
  fs::create_directories(kDir);
  for (std::size_t pos; (pos = cmd.find("$T")) != std::string::npos;) cmd.replace(pos, 2, TAGGROWTH_BIN);
  const auto out = kDir / "stdout.txt";
  const std::string full = "cd '" + kDir.string() + "' && (" + cmd + ") > '" + out.string() + "' 2> /dev/null";
  const int status = std::system(full.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

void write(const std::string& name, const std::string& text) {
  fs::create_directories(kDir);
  std::ofstream(kDir / name, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("growth on the toy TAS") {
  write("toy.tas", "1\ta\tu1\tr1\n2\tb\tu1\tr1\n3\ta\tu2\tr2\n4\tc\tu2\tr2\n");
  auto r = run("growth --input toy.tas --out global.tsv");
  CHECK(r.code == 0);
  CHECK(slurp(kDir / "global.tsv") == "1\t1\n2\t2\n3\t2\n4\t3\n");
  r = run("growth --input toy.tas --every");
  CHECK(r.out == "1\t1\n2\t2\n3\t2\n4\t3\n");
  r = shell("cat toy.tas | $T growth --input - --out -");
  CHECK(r.out == "1\t1\n2\t2\n3\t2\n4\t3\n");
}

TEST_CASE("ingest writes TAS and summary; posts and TAS give the same growth") {
  write("raw.posts", "10\tu1\tr1\tWeb,web,CSS\n11\tu2\tr1\t\n12\tu2\tr2\tcss,Design\n13\tu3\tr2\tweb\n");
  auto r = run("ingest --input raw.posts --out raw.tas --summary summary.json --max-ts 100");
  REQUIRE(r.code == 0);
  CHECK(slurp(kDir / "raw.tas") == "1\tweb\tu1\tr1\n2\tcss\tu1\tr1\n3\tcss\tu2\tr2\n4\tdesign\tu2\tr2\n5\tweb\tu3\tr2\n");
  const auto j = nlohmann::json::parse(slurp(kDir / "summary.json"));
  CHECK(j["summary"]["post_count"] == 3);
  CHECK(j["summary"]["dropped_empty_count"] == 1);
  CHECK(j["summary"]["total_tag_assignments"] == 5);
  CHECK(j["policy"]["max_timestamp"] == 100);
  const auto a = run("growth --input raw.posts");
  const auto b = run("growth --input raw.tas");
  CHECK(a.out == b.out);
  const auto s1 = run("summary --input raw.tas");
  CHECK(nlohmann::json::parse(s1.out)["summary"]["distinct_tag_count"] == 3);
}

TEST_CASE("exit codes") {
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("growth --per-decade 0").code == 1);
  CHECK(run("growth --input missing.tsv").code == 2);
  write("bad.posts", "xyz\tu\tr\ta\n");
  CHECK(run("growth --input bad.posts --from posts").code == 2);
  CHECK(run("growth --input bad.posts --from posts --on-parse-error=skip").code == 3);
  write("empty.tas", "");
  CHECK(run("growth --input empty.tas").code == 3);
  CHECK(run("synth --model zipf --alpha 1.0").code == 1);
  CHECK(run("synth --model py --d 1.5").code == 1);
  CHECK(run("ingest --input bad.posts --min-ts 5 --max-ts 5").code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("synth | growth | exponents pipeline") {
  const auto r = shell("$T --seed 7 synth --model py --d 0.8 --theta 10 --n 200000 | $T growth | $T exponents");
  REQUIRE(r.code == 0);
  std::istringstream row(r.out);
  std::string id;
  double tau_max = 0, n_final = 0, endpoint = 0, regression = 0;
  row >> id >> tau_max >> n_final >> endpoint >> regression;
  CHECK(id == "global");
  CHECK(tau_max == 200000);
  CHECK(regression == doctest::Approx(0.8).epsilon(0.1));
}

TEST_CASE("synth is deterministic and its census matches summary") {
  CHECK(run("--seed 3 synth --preset paper-like --n 3000 --out a.posts --census census.json").code == 0);
  CHECK(run("--seed 3 synth --preset paper-like --n 3000 --out b.posts").code == 0);
  CHECK(slurp(kDir / "a.posts") == slurp(kDir / "b.posts"));
  const auto census = nlohmann::json::parse(slurp(kDir / "census.json"));
  const auto summary = nlohmann::json::parse(run("summary --input a.posts").out)["summary"];
  CHECK(summary["post_count"] == census["posts"]);
  CHECK(summary["user_count"] == census["users"]);
  CHECK(summary["resource_count"] == census["resources"]);
  CHECK(summary["distinct_tag_count"] == census["distinct_tags"]);
  CHECK(summary["total_tag_assignments"] == census["tag_assignments"]);

  write("zipf.cfg", "alpha = 3\ncap = 50\n");
  CHECK(run("synth --model zipf --config zipf.cfg --n 100 --out z.posts").code == 0);
  CHECK(run("synth --model zipf --set alpha=3 --set cap=50 --n 100 --out z2.posts").code == 0);
  CHECK(slurp(kDir / "z.posts") == slurp(kDir / "z2.posts"));
}

TEST_CASE("local growth, users, postlen, collapse and json reports") {
  REQUIRE(run("--seed 5 synth --preset paper-like --n 20000 --out f.posts").code == 0);
  fs::remove_all(kDir / "local");
  auto r = run("--json-report local.json local-growth --input f.posts --top 3 --out-dir local");
  REQUIRE(r.code == 0);
  const auto rep = nlohmann::json::parse(slurp(kDir / "local.json"));
  CHECK(rep["artifacts"].size() == 3);
  for (const auto& a : rep["artifacts"]) CHECK(fs::file_size(kDir / a["file"].get<std::string>()) > 0);
  CHECK(rep.contains("input_checksum"));

  r = run("local-growth --input f.posts --kind user --ids u0,u1,nobody --out users.tsv");
  CHECK(r.code == 0);
  CHECK(slurp(kDir / "users.tsv").rfind("user:u0\t1\t1\n", 0) == 0);

  r = run("local-growth --input f.posts --ranks 1:1:2");
  CHECK(r.code == 0);
  const auto combined = r.out;
  write("combined.tsv", combined);
  r = run("collapse --input combined.tsv");
  CHECK(r.code == 0);
  CHECK(r.out.find("\t1\t1\n") != std::string::npos);
  r = run("exponents --input combined.tsv --pgamma pg.tsv --pgamma-json pg.json");
  CHECK(r.code == 0);
  std::size_t lines = 0;
  for (char c : r.out) lines += c == '\n';
  CHECK(lines == 2);

  r = run("users --input f.posts --top 2");
  CHECK(r.code == 0);
  CHECK(r.out.find("\t") != std::string::npos);

  r = run("postlen --input f.posts --tail-out tail.tsv --json postlen.json");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("0.5\t1.5\t", 0) == 0);
  const auto pj = nlohmann::json::parse(slurp(kDir / "postlen.json"));
  CHECK(pj["mean"].get<double>() == doctest::Approx(3.4).epsilon(0.05));
}

TEST_CASE("report through the CLI") {
  REQUIRE(run("--seed 2 synth --preset paper-like --n 5000 --out r.posts").code == 0);
  fs::remove_all(kDir / "rep");
  const auto r = run("--json-report rep.json report --input r.posts --out-dir rep --ranks 10:10:50");
  REQUIRE(r.code == 0);
  CHECK(slurp(kDir / "rep.json") == slurp(kDir / "rep" / "report.json"));
  CHECK(run("report --input r.posts").code == 1);
}
