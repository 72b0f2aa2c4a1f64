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
#include <filesystem>
#include <string>

#include "json.hpp"
#include "taggrowth/fit.hpp"
#include "taggrowth/ingest_stream.hpp"
#include "taggrowth/sampling.hpp"

namespace taggrowth {

inline constexpr const char* kToolVersion = "1.0.0";

struct ReportOptions {
  std::filesystem::path input;  // "-" for standard input
  std::filesystem::path out_dir;
  IngestOptions ingest;
  SamplingPolicy sampling = SamplingPolicy::log_spaced(50);
  // Resources whose U(tau) and N(tau) curves are written individually.
  RankSelection showcase{100, 100, 1000};
  std::size_t bucket_size = 1000;
  double regression_decades = 2.0;
  double tail_n_min = 10.0;
  int tail_bins_per_decade = 10;
  std::uint64_t seed = 0;
  // Adds wall-clock timings and peak memory to the report (breaks
  // byte-identical reruns).
  bool timings = false;
};

// Runs the full analysis battery on a post file and writes every artifact
// into out_dir, plus report.json. Returns the report document.
//
// Artifacts: summary.json; growth_global.tsv, exponents_global.tsv,
// rate_global.tsv (global growth); users_<id>.tsv (U(tau) of the showcase
// resources); postlen.tsv, postlen_tail.tsv, postlen.json (post lengths);
// growth_resource_<id>.tsv, collapse_<id>.tsv (showcase vocabularies and
// their rescaled form); exponents_resource_<bucket>.tsv, pgamma_<bucket>.tsv,
// pgamma_<bucket>.json (exponent distributions per popularity bucket);
// exponents_user_top.tsv, pgamma_user-top.tsv, pgamma_user-top.json (most
// active users). Stages that cannot run are listed with a reason.
nlohmann::json run_report(const ReportOptions& options);

// Peak resident set size of this process image in bytes (0 if unknown).
std::uint64_t peak_rss_bytes();

}  // namespace taggrowth
