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

#include "taggrowth/report.hpp"

#include <sys/resource.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "taggrowth/clock_growth.hpp"
#include "taggrowth/io.hpp"
#include "taggrowth/stats.hpp"

namespace taggrowth {

std::uint64_t peak_rss_bytes() {
  // getrusage keeps the pre-exec high-water mark of a vfork-spawned process;
  // VmHWM belongs to the current address space only.
  std::ifstream status("/proc/self/status");
  for (std::string line; std::getline(status, line);) {
    if (line.rfind("VmHWM:", 0) == 0) return std::stoull(line.substr(6)) * 1024;
  }
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
  return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;
}

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

class ReportWriter {
 public:
  ReportWriter(const ReportOptions& options, json& report) : options_(options), report_(report) {
    std::filesystem::create_directories(options.out_dir);
    report_["artifacts"] = json::array();
    report_["stages"] = json::array();
  }

  template <class Fn>
  void write(const std::string& name, const std::string& role, const std::string& figure, Fn&& fn) {
    const auto path = options_.out_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    fn(out);
    out.close();
    if (!out) throw Error("failed writing " + path.string());
    report_["artifacts"].push_back({{"file", name}, {"role", role}, {"figure", figure}});
  }

  void write_json(const std::string& name, const std::string& role, const std::string& figure,
                  const json& doc) {
    write(name, role, figure, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
  }

  json& stage(const std::string& name, const std::string& figure) {
    report_["stages"].push_back({{"name", name}, {"figure", figure}, {"status", "ok"}});
    started_ = Clock::now();
    return report_["stages"].back();
  }

  void finish_stage(json& stage) {
    if (!options_.timings) return;
    const auto ms = std::chrono::duration<double, std::milli>(Clock::now() - started_).count();
    stage["milliseconds"] = ms;
  }

 private:
  const ReportOptions& options_;
  json& report_;
  Clock::time_point started_;
};

void skip(json& stage, const std::string& reason) {
  stage["status"] = "skipped";
  stage["reason"] = reason;
}

std::vector<ContextSelector> selectors(std::span<const RankedEntity> entities, ContextKind kind) {
  std::vector<ContextSelector> out;
  out.reserve(entities.size());
  for (const auto& e : entities) out.push_back({kind, e.id});
  return out;
}

// Exponent table, P(gamma) and its Gaussian fit for one group of curves.
void exponent_battery(ReportWriter& writer, json& stage, const ReportOptions& options,
                      const std::string& kind, const std::string& bucket,
                      const std::string& pgamma_name, const std::string& figure,
                      std::span<const GrowthCurve> curves) {
  std::vector<GrowthCurve> usable;
  std::vector<ExponentRow> rows;
  std::size_t low_sample = 0;
  for (const auto& curve : curves) {
    if (curve.tau_max < 2) continue;
    usable.push_back(curve);
    rows.push_back(exponent_row(curve, options.regression_decades));
    low_sample += curve.low_sample() ? 1 : 0;
  }
  stage["curves"] = curves.size();
  stage["excluded_tau_below_2"] = curves.size() - usable.size();
  stage["low_sample_curves"] = low_sample;
  if (usable.empty()) {
    skip(stage, "no curve with tau_max >= 2");
    return;
  }
  writer.write("exponents_" + kind + "_" + bucket + ".tsv", "growth exponents", figure,
               [&](std::ostream& out) { write_exponents_tsv(out, rows); });
  const ExponentDistribution dist = exponent_distribution(usable);
  writer.write("pgamma_" + pgamma_name + ".tsv", "exponent distribution P(gamma)", figure,
               [&](std::ostream& out) { write_histogram_tsv(out, dist.histogram, false); });
  json doc{{"bucket", pgamma_name},
           {"kind", kind},
           {"curves", dist.curves},
           {"above_one", dist.above_one},
           {"outside_range", dist.outside_range},
           {"peak", histogram_peak(dist.histogram)},
           {"mean_gamma", dist.histogram.mean()},
           {"bin_width", dist.histogram.width(0)}};
  try {
    doc["gaussian_fit"] = to_json(gaussian_fit(dist.histogram));
  } catch (const GaussianFitError& e) {
    doc["gaussian_fit"] = nullptr;
    doc["gaussian_fit_error"] = e.what();
    doc["gaussian_fit_fallback"] = to_json(e.fallback());
  } catch (const PreconditionError& e) {
    doc["gaussian_fit"] = nullptr;
    doc["gaussian_fit_error"] = e.what();
  }
  writer.write_json("pgamma_" + pgamma_name + ".json", "Gaussian fit of P(gamma)", figure, doc);
  stage["peak"] = doc["peak"];
}

}  // namespace

nlohmann::json run_report(const ReportOptions& options) {
  json report;
  report["tool_version"] = kToolVersion;
  report["command"] = "report";
  report["seed"] = options.seed;
  report["policy"] = to_json(options.ingest.policy);
  report["parameters"] = {{"sampling_per_decade", options.sampling.per_decade},
                          {"showcase_ranks",
                           {options.showcase.start, options.showcase.step, options.showcase.stop}},
                          {"bucket_size", options.bucket_size},
                          {"regression_decades", options.regression_decades},
                          {"tail_n_min", options.tail_n_min},
                          {"tail_bins_per_decade", options.tail_bins_per_decade},
                          {"sort", options.ingest.sort},
                          {"skip_parse_errors", options.ingest.skip_parse_errors}};
  ReportWriter writer(options, report);

  // Ingest.
  json& ingest_stage = writer.stage("ingest", "census");
  IngestStats stats;
  TasTable table;
  if (options.input == "-") {
    table = ingest_to_table(std::cin, options.ingest, &stats);
  } else {
    std::ifstream in(options.input, std::ios::binary);
    if (!in) throw InputError("cannot open input " + options.input.string());
    table = ingest_to_table(in, options.ingest, &stats);
  }
  report["input_checksum"] = stats.checksum;
  ingest_stage["lines"] = stats.lines;
  ingest_stage["parse_errors"] = stats.parse_errors;
  if (!stats.error_lines.empty()) ingest_stage["first_error_lines"] = stats.error_lines;
  const DatasetSummary summary = dataset_summary(table, stats.counts);
  report["summary"] = to_json(summary);
  writer.write_json("summary.json", "dataset census and cleaning policy", "census",
                    {{"summary", to_json(summary)}, {"policy", to_json(options.ingest.policy)}});
  writer.finish_stage(ingest_stage);
  if (table.empty()) throw PreconditionError("report: no tag assignments left after cleaning");

  // Global vocabulary growth.
  {
    json& stage = writer.stage("global_growth", "fig1");
    const GrowthCurve curve = track_global_vocabulary(table, options.sampling);
    writer.write("growth_global.tsv", "global vocabulary growth N(tau)", "fig1",
                 [&](std::ostream& out) { write_curve_tsv(out, curve); });
    if (curve.tau_max >= 2) {
      const ExponentRow row = exponent_row(curve, options.regression_decades);
      writer.write("exponents_global.tsv", "global growth exponent", "fig1",
                   [&](std::ostream& out) { write_exponents_tsv(out, std::span(&row, 1)); });
      stage["gamma_endpoint"] = row.gamma_endpoint;
      if (row.gamma_regression) stage["gamma_regression"] = *row.gamma_regression;
    }
    const auto rate = new_tag_rate(curve, 10, 10);
    if (!rate.empty()) {
      writer.write("rate_global.tsv", "new-tag rate dN/dtau", "fig1", [&](std::ostream& out) {
        for (const auto& p : rate) {
          if (p.rate > 0.0) out << format_double(p.tau) << '\t' << format_double(p.rate) << '\n';
        }
      });
      try {
        stage["rate_slope"] = rate_exponent(rate).slope;
      } catch (const PreconditionError&) {
        // fewer than two non-zero rate points
      }
    }
    writer.finish_stage(stage);
  }

  const auto resource_ranking = rank_entities(table, ContextKind::resource);
  std::vector<std::size_t> missing_ranks;
  const auto showcase = select_ranks(resource_ranking, options.showcase, &missing_ranks);

  // User accumulation of the showcase resources.
  {
    json& stage = writer.stage("user_accumulation", "fig2");
    stage["ranks_missing"] = missing_ranks;
    if (showcase.empty()) {
      skip(stage, "only " + std::to_string(resource_ranking.size()) +
                      " resources; no showcase rank is available");
    } else {
      std::vector<std::string> ids;
      for (const auto& e : showcase) ids.push_back(e.id);
      const auto acc = track_user_accumulation(table, ids);
      json list = json::array();
      for (const auto& curve : acc.curves) {
        writer.write("users_" + sanitize_id(curve.resource) + ".tsv", "users U(tau) of a resource",
                     "fig2", [&](std::ostream& out) { write_user_curve_tsv(out, curve); });
        list.push_back(curve.resource);
      }
      stage["resources"] = list;
      if (!missing_ranks.empty()) stage["status"] = "partial";
    }
    writer.finish_stage(stage);
  }

  // Post length distribution.
  {
    json& stage = writer.stage("post_length", "fig3");
    const auto dist = post_length_distribution(table, options.tail_bins_per_decade);
    writer.write("postlen.tsv", "post length distribution P(n)", "fig3",
                 [&](std::ostream& out) { write_histogram_tsv(out, dist.body, true); });
    writer.write("postlen_tail.tsv", "log-binned post length distribution", "fig3",
                 [&](std::ostream& out) { write_histogram_tsv(out, dist.tail, true); });
    json doc{{"mean", dist.mean}, {"total", dist.posts}, {"max_length", dist.max_length},
             {"tail_n_min", options.tail_n_min}};
    try {
      doc["tail_fit"] = to_json(tail_exponent(dist.tail, options.tail_n_min));
    } catch (const TailFitError& e) {
      doc["tail_fit"] = nullptr;
      doc["tail_fit_error"] = e.what();
      doc["tail_fit_error_reason"] =
          e.reason() == TailFitError::Reason::empty_tail ? "empty_tail" : "too_few_bins";
    }
    writer.write_json("postlen.json", "post length mean and tail fit", "fig3", doc);
    stage["mean"] = dist.mean;
    writer.finish_stage(stage);
  }

  // Showcase vocabularies and collapse.
  {
    json& stage = writer.stage("collapse", "fig4");
    if (showcase.empty()) {
      skip(stage, "no showcase resources");
    } else {
      const auto sel = selectors(showcase, ContextKind::resource);
      const auto curves = track_entity_vocabularies(table, sel, options.sampling);
      for (const auto& curve : curves.curves) {
        const std::string id = sanitize_id(curve.context.id);
        writer.write("growth_resource_" + id + ".tsv", "resource vocabulary growth N(tau)", "fig4",
                     [&](std::ostream& out) { write_curve_tsv(out, curve); });
        writer.write("collapse_" + id + ".tsv", "rescaled vocabulary growth", "fig4",
                     [&](std::ostream& out) { write_collapse_tsv(out, rescale_curve(curve)); });
      }
      if (!missing_ranks.empty()) stage["status"] = "partial";
    }
    writer.finish_stage(stage);
  }

  // P(gamma) per popularity bucket.
  {
    const auto buckets = default_buckets(resource_ranking, options.bucket_size);
    std::vector<ContextSelector> all;
    for (const auto& b : buckets) {
      for (std::size_t r = b.rank_lo; r <= b.rank_hi; ++r) {
        all.push_back({ContextKind::resource, resource_ranking[r - 1].id});
      }
    }
    const auto curves = track_entity_vocabularies(table, all, options.sampling);
    std::size_t offset = 0;
    for (const std::string name : {"top", "mid", "bottom"}) {
      json& stage = writer.stage("pgamma_" + name, "fig5");
      const auto it = std::find_if(buckets.begin(), buckets.end(),
                                   [&](const PopularityBucket& b) { return b.name == name; });
      if (it == buckets.end()) {
        skip(stage, "not enough resources in this popularity tier");
        writer.finish_stage(stage);
        continue;
      }
      const std::size_t count = it->rank_hi - it->rank_lo + 1;
      stage["ranks"] = {it->rank_lo, it->rank_hi};
      stage["post_count_range"] = {resource_ranking[it->rank_hi - 1].post_count,
                                   resource_ranking[it->rank_lo - 1].post_count};
      const std::span<const GrowthCurve> group(curves.curves.data() + offset, count);
      offset += count;
      exponent_battery(writer, stage, options, "resource", name, name, "fig5", group);
      writer.finish_stage(stage);
    }
  }

  // Most active users.
  {
    json& stage = writer.stage("pgamma_user-top", "fig6");
    const auto user_ranking = rank_entities(table, ContextKind::user);
    const std::size_t n = std::min(options.bucket_size, user_ranking.size());
    stage["ranks"] = {1, n};
    const auto sel = selectors(std::span(user_ranking).first(n), ContextKind::user);
    const auto curves = track_entity_vocabularies(table, sel, options.sampling);
    exponent_battery(writer, stage, options, "user", "top", "user-top", "fig6", curves.curves);
    writer.finish_stage(stage);
  }

  if (options.timings) report["peak_rss_bytes"] = peak_rss_bytes();

  for (const auto& artifact : report["artifacts"]) {
    const auto path = options.out_dir / artifact["file"].get<std::string>();
    if (!std::filesystem::exists(path) || std::filesystem::file_size(path) == 0) {
      throw Error("artifact " + path.string() + " is missing or empty");
    }
  }
  report["artifacts"].push_back(
      {{"file", "report.json"}, {"role", "run report"}, {"figure", "all"}});
  std::ofstream out(options.out_dir / "report.json", std::ios::binary);
  out << report.dump(2) << '\n';
  if (!out) throw Error("failed writing report.json");
  return report;
}

}  // namespace taggrowth
