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

// taggrowth command line: ingest, analyze and generate tagging streams.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "taggrowth/clock_growth.hpp"
#include "taggrowth/error.hpp"
#include "taggrowth/fit.hpp"
#include "taggrowth/ingest.hpp"
#include "taggrowth/ingest_stream.hpp"
#include "taggrowth/input_source.hpp"
#include "taggrowth/io.hpp"
#include "taggrowth/report.hpp"
#include "taggrowth/stats.hpp"
#include "taggrowth/synth.hpp"
#include "taggrowth/tas_table.hpp"

namespace {

namespace fs = std::filesystem;
namespace tg = taggrowth;
using json = nlohmann::json;

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kPrecondition = 3 };

struct GlobalFlags {
  std::uint64_t seed = 1;
  int threads = 1;
  bool quiet = false;
  bool timings = false;
  std::string json_report;
};

struct IngestFlags {
  std::optional<std::int64_t> min_ts;
  std::optional<std::int64_t> max_ts;
  bool no_fold_case = false;
  bool keep_dup_tags = false;
  std::string on_parse_error = "abort";
  bool sort = false;

  tg::IngestOptions options(int threads) const {
    tg::IngestOptions out;
    if (min_ts) out.policy.min_timestamp = *min_ts;
    if (max_ts) {
      out.policy.max_timestamp = *max_ts;
      out.policy.max_from_wall_clock = false;
    }
    out.policy.fold_case = !no_fold_case;
    out.policy.dedupe_within_post = !keep_dup_tags;
    out.skip_parse_errors = on_parse_error == "skip";
    out.sort = sort;
    out.threads = threads;
    return out;
  }
};

struct SamplingFlags {
  bool every = false;
  int per_decade = 50;

  tg::SamplingPolicy policy() const {
    return every ? tg::SamplingPolicy::every_point() : tg::SamplingPolicy::log_spaced(per_decade);
  }
  json to_json() const {
    return every ? json{{"sampling", "every"}} : json{{"sampling", "log"}, {"per_decade", per_decade}};
  }
};

struct SelectionFlags {
  std::string ids;
  std::string ranks;
  std::size_t top = 0;
  bool all = false;
};

// Everything a subcommand knows about its run; becomes the --json-report.
class RunRecord {
 public:
  RunRecord(const std::string& command, const GlobalFlags& globals) : globals_(globals) {
    doc_["tool_version"] = tg::kToolVersion;
    doc_["command"] = command;
    doc_["seed"] = globals.seed;
    doc_["parameters"] = json::object();
    doc_["artifacts"] = json::array();
  }

  json& doc() { return doc_; }
  json& parameters() { return doc_["parameters"]; }

  void artifact(const std::string& file, const std::string& role, const std::string& figure = "") {
    json entry{{"file", file}, {"role", role}};
    if (!figure.empty()) entry["figure"] = figure;
    doc_["artifacts"].push_back(entry);
  }

  void warn(const std::string& message) {
    doc_["warnings"].push_back(message);
    if (!globals_.quiet) std::cerr << "taggrowth: warning: " << message << '\n';
  }

  void input(tg::InputSource& source) {
    doc_["input"] = source.path();
    doc_["input_checksum"] = source.checksum();
  }

  void write(std::chrono::steady_clock::time_point started) {
    if (globals_.json_report.empty()) return;
    if (globals_.timings) {
      const auto elapsed = std::chrono::steady_clock::now() - started;
      doc_["timings"] = {{"milliseconds", std::chrono::duration<double, std::milli>(elapsed).count()},
                         {"peak_rss_bytes", tg::peak_rss_bytes()}};
    }
    for (const auto& a : doc_["artifacts"]) {
      const auto file = a["file"].get<std::string>();
      if (file == "-") continue;
      if (!fs::exists(file) || fs::file_size(file) == 0) {
        throw tg::Error("artifact " + file + " is missing or empty");
      }
    }
    std::ofstream out(globals_.json_report, std::ios::binary);
    out << doc_.dump(2) << '\n';
    if (!out) throw tg::Error("cannot write report " + globals_.json_report);
  }

 private:
  const GlobalFlags& globals_;
  json doc_;
};

// File or standard output ("-").
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (path == "-") return;
    if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    file_.open(path, std::ios::binary);
    if (!file_) throw tg::Error("cannot write " + path);
  }

  std::ostream& stream() { return path_ == "-" ? std::cout : file_; }

  void close() {
    if (path_ == "-") {
      std::cout.flush();
      if (!std::cout) throw tg::Error("failed writing standard output");
      return;
    }
    file_.close();
    if (!file_) throw tg::Error("failed writing " + path_);
  }

 private:
  std::string path_;
  std::ofstream file_;
};

template <class Fn>
void write_file(RunRecord& record, const std::string& path, const std::string& role,
                const std::string& figure, Fn&& fn) {
  Output out(path);
  fn(out.stream());
  out.close();
  record.artifact(path, role, figure);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

tg::RankSelection parse_ranks(const std::string& text) {
  tg::RankSelection sel;
  char c1 = 0;
  char c2 = 0;
  std::istringstream in(text);
  if (!(in >> sel.start >> c1 >> sel.step >> c2 >> sel.stop) || c1 != ':' || c2 != ':' || !in.eof() ||
      sel.start < 1 || sel.step < 1 || sel.stop < sel.start) {
    throw tg::ConfigError("--ranks expects START:STEP:STOP with 1 <= START <= STOP, got '" + text + "'");
  }
  return sel;
}

// Loads a TAS table from either input format.
tg::TasTable load_table(tg::InputSource& source, tg::InputFormat format, const IngestFlags& ingest,
                        const GlobalFlags& globals, RunRecord& record,
                        tg::CleaningCounts* counts = nullptr) {
  record.doc()["input_format"] = tg::to_string(format);
  if (format == tg::InputFormat::tas) return tg::read_tas_table(source.stream());
  const auto options = ingest.options(globals.threads);
  record.doc()["policy"] = tg::to_json(options.policy);
  tg::IngestStats stats;
  tg::TasTable table = tg::ingest_to_table(source.stream(), options, &stats);
  if (stats.parse_errors > 0) {
    record.warn(std::to_string(stats.parse_errors) + " malformed lines skipped");
  }
  record.doc()["parse_errors"] = stats.parse_errors;
  if (counts) *counts = stats.counts;
  return table;
}

std::vector<std::string> resolve_selection(const SelectionFlags& sel, const tg::TasTable& table,
                                           tg::ContextKind kind, RunRecord& record) {
  json& params = record.parameters();
  if (!sel.ids.empty()) {
    params["selection"] = {{"ids", sel.ids}};
    return split_list(sel.ids);
  }
  std::vector<std::string> ids;
  if (sel.all) {
    params["selection"] = "all";
    for (const auto& c : tg::all_entities(table, kind)) ids.push_back(c.id);
    return ids;
  }
  const auto ranking = tg::rank_entities(table, kind);
  if (sel.top > 0) {
    params["selection"] = {{"top", sel.top}};
    for (std::size_t i = 0; i < std::min(sel.top, ranking.size()); ++i) ids.push_back(ranking[i].id);
    if (sel.top > ranking.size()) {
      record.warn("only " + std::to_string(ranking.size()) + " entities, fewer than --top " +
                  std::to_string(sel.top));
    }
    return ids;
  }
  const auto ranks = parse_ranks(sel.ranks.empty() ? "100:100:1000" : sel.ranks);
  params["selection"] = {{"ranks", {ranks.start, ranks.step, ranks.stop}}};
  std::vector<std::size_t> missing;
  for (const auto& e : tg::select_ranks(ranking, ranks, &missing)) ids.push_back(e.id);
  if (!missing.empty()) {
    record.doc()["missing_ranks"] = missing;
    record.warn(std::to_string(missing.size()) + " requested ranks exceed the " +
                std::to_string(ranking.size()) + " ranked entities");
  }
  return ids;
}

void report_missing(RunRecord& record, const std::vector<std::string>& missing) {
  if (missing.empty()) return;
  record.doc()["missing_ids"] = missing;
  record.warn(std::to_string(missing.size()) + " requested ids do not occur in the input");
}

void add_ingest_flags(CLI::App* cmd, IngestFlags& flags) {
  cmd->add_option("--min-ts", flags.min_ts, "Drop posts with an earlier timestamp (default 0)");
  cmd->add_option("--max-ts", flags.max_ts, "Drop posts with a later timestamp (default: now)");
  cmd->add_flag("--no-fold-case", flags.no_fold_case, "Keep tag case as written");
  cmd->add_flag("--keep-dup-tags", flags.keep_dup_tags, "Keep repeated tags within a post");
  cmd->add_option("--on-parse-error", flags.on_parse_error, "skip or abort on malformed lines")
      ->check(CLI::IsMember({"skip", "abort"}));
  cmd->add_flag("--sort", flags.sort, "Sort posts by timestamp instead of rejecting disorder");
}

void add_sampling_flags(CLI::App* cmd, SamplingFlags& flags) {
  auto* every = cmd->add_flag("--every", flags.every, "Record every tau instead of log-spaced points");
  cmd->add_option("--per-decade", flags.per_decade, "Log-spaced sample points per decade")
      ->check(CLI::Range(1, 1000))
      ->excludes(every);
}

void add_selection_flags(CLI::App* cmd, SelectionFlags& flags, const std::string& what) {
  auto* ids = cmd->add_option("--ids", flags.ids, "Comma-separated " + what + " ids");
  auto* ranks = cmd->add_option("--ranks", flags.ranks,
                                "Popularity ranks START:STEP:STOP (default 100:100:1000)");
  auto* top = cmd->add_option("--top", flags.top, "The K most popular " + what + "s");
  auto* all = cmd->add_flag("--all", flags.all, "Every " + what);
  ids->excludes(ranks, top, all);
  ranks->excludes(top, all);
  top->excludes(all);
}

std::string format_flag_help() { return "Input format: auto, tas or posts"; }

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  const auto started = std::chrono::steady_clock::now();

  CLI::App app{"Vocabulary growth analysis for collaborative tagging streams", "taggrowth"};
  app.set_version_flag("--version", tg::kToolVersion);
  app.require_subcommand(1);
  GlobalFlags globals;
  app.add_option("--seed", globals.seed, "Random seed for generators")->capture_default_str();
  app.add_option("--threads", globals.threads, "Worker threads for parsing")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
  app.add_flag("--quiet", globals.quiet, "Suppress warnings");
  app.add_option("--json-report", globals.json_report, "Write a JSON run report to PATH");
  app.add_flag("--timings", globals.timings, "Include wall time and peak memory in reports");

  std::string input = "-";
  std::string out = "-";
  std::string out_dir;
  std::string from = "auto";
  IngestFlags ingest;
  SamplingFlags sampling;
  SelectionFlags selection;

  const auto add_io = [&](CLI::App* cmd, bool with_format) {
    cmd->add_option("--input,-i", input, "Input file, - for standard input")->capture_default_str();
    cmd->add_option("--out,-o", out, "Output file, - for standard output")->capture_default_str();
    if (with_format) {
      cmd->add_option("--from", from, format_flag_help())
          ->check(CLI::IsMember({"auto", "tas", "posts"}))
          ->capture_default_str();
    }
  };

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Clean posts and write the TAS table");
  add_io(ingest_cmd, false);
  add_ingest_flags(ingest_cmd, ingest);
  std::string summary_path;
  ingest_cmd->add_option("--summary", summary_path, "Also write the dataset summary JSON here");

  // summary
  auto* summary_cmd = app.add_subcommand("summary", "Dataset census as JSON");
  add_io(summary_cmd, true);
  add_ingest_flags(summary_cmd, ingest);

  // growth
  auto* growth_cmd = app.add_subcommand("growth", "Global vocabulary growth N(tau)");
  add_io(growth_cmd, true);
  add_ingest_flags(growth_cmd, ingest);
  add_sampling_flags(growth_cmd, sampling);
  bool approx = false;
  int precision = 14;
  growth_cmd->add_flag("--approx", approx, "Estimate N(tau) with a HyperLogLog sketch");
  growth_cmd->add_option("--precision", precision, "Sketch precision (4..18)")
      ->check(CLI::Range(4, 18))
      ->capture_default_str();

  // local-growth
  auto* local_cmd = app.add_subcommand("local-growth", "Vocabulary growth per resource or user");
  add_io(local_cmd, true);
  add_ingest_flags(local_cmd, ingest);
  add_sampling_flags(local_cmd, sampling);
  add_selection_flags(local_cmd, selection, "entity");
  std::string kind_text = "resource";
  local_cmd->add_option("--kind", kind_text, "resource or user")
      ->check(CLI::IsMember({"resource", "user"}))
      ->capture_default_str();
  local_cmd->add_option("--out-dir", out_dir, "One growth_<kind>_<id>.tsv per entity instead of --out");

  // users
  auto* users_cmd = app.add_subcommand("users", "Distinct users U(tau) per resource");
  add_io(users_cmd, true);
  add_ingest_flags(users_cmd, ingest);
  add_selection_flags(users_cmd, selection, "resource");
  users_cmd->add_option("--out-dir", out_dir, "One users_<id>.tsv per resource instead of --out");

  // postlen
  auto* postlen_cmd = app.add_subcommand("postlen", "Post length distribution P(n)");
  add_io(postlen_cmd, true);
  add_ingest_flags(postlen_cmd, ingest);
  std::string tail_out;
  std::string postlen_json;
  double n_min = 10.0;
  int bins_per_decade = 10;
  postlen_cmd->add_option("--tail-out", tail_out, "Log-binned histogram TSV");
  postlen_cmd->add_option("--json", postlen_json, "Sidecar JSON with mean and tail fit");
  postlen_cmd->add_option("--n-min", n_min, "Smallest length used by the tail fit")->capture_default_str();
  postlen_cmd->add_option("--bins-per-decade", bins_per_decade, "Log bins per decade")
      ->check(CLI::Range(1, 100))
      ->capture_default_str();

  // exponents
  auto* exponents_cmd = app.add_subcommand("exponents", "Growth exponents of curves from growth/local-growth");
  add_io(exponents_cmd, false);
  double decades = 2.0;
  std::string pgamma_out;
  std::string pgamma_json;
  exponents_cmd->add_option("--decades", decades, "Regression window in decades below tau_max")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  exponents_cmd->add_option("--pgamma", pgamma_out, "Histogram of endpoint exponents");
  exponents_cmd->add_option("--pgamma-json", pgamma_json, "Gaussian fit of that histogram");

  // collapse
  auto* collapse_cmd = app.add_subcommand("collapse", "Rescale curves to tau/tau_max, N/N_final");
  add_io(collapse_cmd, false);
  collapse_cmd->add_option("--out-dir", out_dir, "One collapse_<id>.tsv per curve instead of --out");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic tagging stream in post format");
  synth_cmd->add_option("--out,-o", out, "Output file, - for standard output")->capture_default_str();
  std::string model = "folksonomy";
  std::string preset;
  std::uint64_t n = 1000;
  std::optional<double> alpha;
  std::optional<std::uint64_t> cap;
  std::optional<double> discount;
  std::optional<double> theta;
  std::string config_path;
  std::vector<std::string> settings;
  std::string census_path;
  synth_cmd->add_option("--model", model, "zipf, py or folksonomy")
      ->check(CLI::IsMember({"zipf", "py", "folksonomy"}))
      ->capture_default_str();
  synth_cmd->add_option("--preset", preset, "Folksonomy preset")->check(CLI::IsMember({"paper-like"}));
  synth_cmd->add_option("--n", n, "Draws (zipf, py) or posts (folksonomy)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--alpha", alpha, "Zipf exponent");
  synth_cmd->add_option("--cap", cap, "Zipf vocabulary cap");
  synth_cmd->add_option("--d", discount, "Pitman-Yor discount");
  synth_cmd->add_option("--theta", theta, "Pitman-Yor strength");
  synth_cmd->add_option("--config", config_path, "key = value settings file");
  synth_cmd->add_option("--set", settings, "Extra key=value setting (repeatable)");
  synth_cmd->add_option("--census", census_path, "Folksonomy generator census JSON");

  // report
  auto* report_cmd = app.add_subcommand("report", "Full analysis battery over a post stream");
  report_cmd->add_option("--input,-i", input, "Post file, - for standard input")->capture_default_str();
  report_cmd->add_option("--out-dir", out_dir, "Directory for all artifacts")->required();
  add_ingest_flags(report_cmd, ingest);
  add_sampling_flags(report_cmd, sampling);
  std::string showcase;
  std::size_t bucket_size = 1000;
  report_cmd->add_option("--ranks", showcase, "Showcase resource ranks START:STEP:STOP (default 100:100:1000)");
  report_cmd->add_option("--bucket-size", bucket_size, "Entities per popularity bucket")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  report_cmd->add_option("--decades", decades, "Regression window in decades")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  report_cmd->add_option("--n-min", n_min, "Smallest length used by the tail fit")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    auto* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    RunRecord record(name, globals);

    if (name == "ingest") {
      tg::InputSource source(input);
      const auto options = ingest.options(globals.threads);
      record.doc()["policy"] = tg::to_json(options.policy);
      Output output(out);
      std::ostream& os = output.stream();
      tg::TasEmitter emitter;
      // The census needs every distinct user and resource; only pay for it on request.
      std::optional<tg::SummaryAccumulator> acc;
      if (!summary_path.empty()) acc.emplace();
      std::string line;
      std::uint64_t rows = 0;
      const auto stats = tg::ingest_posts(source.stream(), options, [&](tg::Post& post) {
        bool first = true;
        emitter.emit(post, [&](const tg::TasRecord& r) {
          if (acc) acc->add(r.tag, r.user, r.resource, first);
          ++rows;
          first = false;
          line = tg::format_tas_line(r);
          line += '\n';
          os << line;
        });
      });
      output.close();
      record.artifact(out, "tag assignment table");
      record.input(source);
      record.doc()["parse_errors"] = stats.parse_errors;
      if (stats.parse_errors > 0) record.warn(std::to_string(stats.parse_errors) + " malformed lines skipped");
      record.doc()["tas_rows"] = rows;
      if (acc) {
        const auto summary = acc->summary(stats.counts);
        record.doc()["summary"] = tg::to_json(summary);
        write_file(record, summary_path, "dataset summary", "census", [&](std::ostream& s) {
          s << json{{"summary", tg::to_json(summary)}, {"policy", tg::to_json(options.policy)}}.dump(2)
            << '\n';
        });
      }
    } else if (name == "summary") {
      tg::InputSource source(input);
      const auto format = source.resolve(tg::parse_input_format(from));
      record.doc()["input_format"] = tg::to_string(format);
      tg::SummaryAccumulator acc;
      tg::CleaningCounts counts;
      json doc;
      if (format == tg::InputFormat::tas) {
        tg::TasReader reader(source.stream());
        tg::TasRecord r;
        std::string last_user;
        std::string last_resource;
        bool have = false;
        while (reader.next(r)) {
          const bool starts = !have || r.user != last_user || r.resource != last_resource;
          acc.add(r.tag, r.user, r.resource, starts);
          if (starts) {
            last_user = r.user;
            last_resource = r.resource;
            have = true;
          }
        }
      } else {
        const auto options = ingest.options(globals.threads);
        doc["policy"] = tg::to_json(options.policy);
        record.doc()["policy"] = doc["policy"];
        const auto stats = tg::ingest_posts(source.stream(), options, [&](tg::Post& post) {
          bool first = true;
          for (const auto& tag : post.tags) {
            acc.add(tag, post.user, post.resource, first);
            first = false;
          }
        });
        counts = stats.counts;
        record.doc()["parse_errors"] = stats.parse_errors;
      }
      const auto summary = acc.summary(counts);
      doc["summary"] = tg::to_json(summary);
      record.doc()["summary"] = doc["summary"];
      record.input(source);
      write_file(record, out, "dataset summary", "census", [&](std::ostream& s) { s << doc.dump(2) << '\n'; });
    } else if (name == "growth") {
      tg::InputSource source(input);
      const auto format = source.resolve(tg::parse_input_format(from));
      record.doc()["input_format"] = tg::to_string(format);
      record.parameters() = sampling.to_json();
      std::optional<tg::GlobalVocabularyTracker> exact;
      std::optional<tg::ApproxVocabularyTracker> sketch;
      if (approx) {
        sketch.emplace(sampling.policy(), precision);
        record.parameters()["approx_precision"] = precision;
      } else {
        exact.emplace(sampling.policy());
      }
      const auto observe = [&](std::string_view tag) {
        if (exact) {
          exact->observe(tag);
        } else {
          sketch->observe(tag);
        }
      };
      if (format == tg::InputFormat::tas) {
        tg::TasReader reader(source.stream());
        tg::TasRecord r;
        while (reader.next(r)) observe(r.tag);
      } else {
        const auto options = ingest.options(globals.threads);
        record.doc()["policy"] = tg::to_json(options.policy);
        const auto stats = tg::ingest_posts(source.stream(), options, [&](tg::Post& post) {
          for (const auto& tag : post.tags) observe(tag);
        });
        record.doc()["parse_errors"] = stats.parse_errors;
      }
      const tg::GrowthCurve curve = exact ? exact->finish() : sketch->finish();
      record.input(source);
      record.doc()["tau_max"] = curve.tau_max;
      record.doc()["n_final"] = curve.n_final;
      if (curve.approximate) record.doc()["relative_standard_error"] = curve.relative_standard_error;
      write_file(record, out, "global vocabulary growth N(tau)", "fig1",
                 [&](std::ostream& s) { tg::write_curve_tsv(s, curve); });
    } else if (name == "local-growth") {
      tg::InputSource source(input);
      const auto format = source.resolve(tg::parse_input_format(from));
      const tg::TasTable table = load_table(source, format, ingest, globals, record);
      record.input(source);
      const auto kind = tg::parse_context_kind(kind_text);
      record.parameters() = sampling.to_json();
      record.parameters()["kind"] = kind_text;
      std::vector<tg::ContextSelector> selectors;
      for (auto& id : resolve_selection(selection, table, kind, record)) selectors.push_back({kind, id});
      const auto result = tg::track_entity_vocabularies(table, selectors, sampling.policy());
      std::vector<std::string> missing;
      for (const auto& m : result.missing) missing.push_back(m.id);
      report_missing(record, missing);
      if (result.curves.empty()) throw tg::PreconditionError("local-growth: no selected entity occurs in the input");
      if (!out_dir.empty()) {
        for (const auto& curve : result.curves) {
          const auto path = (fs::path(out_dir) / ("growth_" + kind_text + "_" + tg::sanitize_id(curve.context.id) + ".tsv")).string();
          write_file(record, path, "local vocabulary growth N(tau)", "fig4",
                     [&](std::ostream& s) { tg::write_curve_tsv(s, curve); });
        }
      } else {
        write_file(record, out, "local vocabulary growth N(tau), one labelled curve per entity", "fig4",
                   [&](std::ostream& s) { tg::write_curves_combined_tsv(s, result.curves); });
      }
    } else if (name == "users") {
      tg::InputSource source(input);
      const auto format = source.resolve(tg::parse_input_format(from));
      const tg::TasTable table = load_table(source, format, ingest, globals, record);
      record.input(source);
      const auto ids = resolve_selection(selection, table, tg::ContextKind::resource, record);
      const auto result = tg::track_user_accumulation(table, ids);
      report_missing(record, result.missing);
      if (result.curves.empty()) throw tg::PreconditionError("users: no selected resource occurs in the input");
      if (!out_dir.empty()) {
        for (const auto& curve : result.curves) {
          const auto path = (fs::path(out_dir) / ("users_" + tg::sanitize_id(curve.resource) + ".tsv")).string();
          write_file(record, path, "distinct users U(tau) of a resource", "fig2",
                     [&](std::ostream& s) { tg::write_user_curve_tsv(s, curve); });
        }
      } else {
        write_file(record, out, "distinct users U(tau), one labelled curve per resource", "fig2",
                   [&](std::ostream& s) { tg::write_user_curves_combined_tsv(s, result.curves); });
      }
    } else if (name == "postlen") {
      tg::InputSource source(input);
      const auto format = source.resolve(tg::parse_input_format(from));
      record.doc()["input_format"] = tg::to_string(format);
      std::vector<std::uint64_t> lengths;
      if (format == tg::InputFormat::tas) {
        const tg::TasTable table = tg::read_tas_table(source.stream());
        lengths.reserve(table.post_count());
        for (std::size_t p = 0; p < table.post_count(); ++p) lengths.push_back(table.post_length(p));
      } else {
        const auto options = ingest.options(globals.threads);
        record.doc()["policy"] = tg::to_json(options.policy);
        tg::ingest_posts(source.stream(), options,
                         [&](tg::Post& post) { lengths.push_back(post.tags.size()); });
      }
      record.input(source);
      if (lengths.empty()) throw tg::PreconditionError("postlen: no posts in the input");
      const auto dist = tg::post_length_distribution(lengths, bins_per_decade);
      record.parameters() = {{"n_min", n_min}, {"bins_per_decade", bins_per_decade}};
      json doc{{"mean", dist.mean}, {"total", dist.posts}, {"max_length", dist.max_length}, {"n_min", n_min}};
      try {
        doc["tail_fit"] = tg::to_json(tg::tail_exponent(dist.tail, n_min));
      } catch (const tg::TailFitError& e) {
        doc["tail_fit"] = nullptr;
        doc["tail_fit_error"] = e.what();
        record.warn(e.what());
      }
      record.doc()["postlen"] = doc;
      write_file(record, out, "post length distribution P(n)", "fig3",
                 [&](std::ostream& s) { tg::write_histogram_tsv(s, dist.body, true); });
      if (!tail_out.empty()) {
        write_file(record, tail_out, "log-binned post length distribution", "fig3",
                   [&](std::ostream& s) { tg::write_histogram_tsv(s, dist.tail, true); });
      }
      if (!postlen_json.empty()) {
        write_file(record, postlen_json, "post length mean and tail fit", "fig3",
                   [&](std::ostream& s) { s << doc.dump(2) << '\n'; });
      }
    } else if (name == "exponents") {
      tg::InputSource source(input);
      const auto curves = tg::read_curves_tsv(source.stream());
      record.input(source);
      record.parameters() = {{"decades", decades}};
      if (curves.empty()) throw tg::PreconditionError("exponents: no curves in the input");
      std::vector<tg::ExponentRow> rows;
      std::vector<tg::GrowthCurve> usable;
      for (const auto& curve : curves) {
        if (curve.tau_max < 2) continue;
        rows.push_back(tg::exponent_row(curve, decades));
        usable.push_back(curve);
      }
      if (rows.empty()) throw tg::PreconditionError("exponents: every curve has tau_max < 2");
      if (rows.size() < curves.size()) {
        record.warn(std::to_string(curves.size() - rows.size()) + " curves with tau_max < 2 excluded");
      }
      record.doc()["curves"] = rows.size();
      write_file(record, out, "growth exponents", "fig5",
                 [&](std::ostream& s) { tg::write_exponents_tsv(s, rows); });
      if (!pgamma_out.empty() || !pgamma_json.empty()) {
        const auto dist = tg::exponent_distribution(usable);
        if (!pgamma_out.empty()) {
          write_file(record, pgamma_out, "exponent distribution P(gamma)", "fig5",
                     [&](std::ostream& s) { tg::write_histogram_tsv(s, dist.histogram, false); });
        }
        if (!pgamma_json.empty()) {
          json doc{{"curves", dist.curves},
                   {"above_one", dist.above_one},
                   {"outside_range", dist.outside_range},
                   {"peak", tg::histogram_peak(dist.histogram)},
                   {"bin_width", dist.histogram.width(0)}};
          try {
            doc["gaussian_fit"] = tg::to_json(tg::gaussian_fit(dist.histogram));
          } catch (const tg::GaussianFitError& e) {
            doc["gaussian_fit"] = nullptr;
            doc["gaussian_fit_error"] = e.what();
            doc["gaussian_fit_fallback"] = tg::to_json(e.fallback());
          } catch (const tg::PreconditionError& e) {
            doc["gaussian_fit"] = nullptr;
            doc["gaussian_fit_error"] = e.what();
          }
          write_file(record, pgamma_json, "Gaussian fit of P(gamma)", "fig5",
                     [&](std::ostream& s) { s << doc.dump(2) << '\n'; });
        }
      }
    } else if (name == "collapse") {
      tg::InputSource source(input);
      const auto curves = tg::read_curves_tsv(source.stream());
      record.input(source);
      if (curves.empty()) throw tg::PreconditionError("collapse: no curves in the input");
      if (!out_dir.empty()) {
        for (const auto& curve : curves) {
          const std::string id = curve.context.kind == tg::ContextKind::global ? "global" : tg::sanitize_id(curve.context.id);
          write_file(record, (fs::path(out_dir) / ("collapse_" + id + ".tsv")).string(),
                     "rescaled vocabulary growth", "fig4",
                     [&](std::ostream& s) { tg::write_collapse_tsv(s, tg::rescale_curve(curve)); });
        }
      } else {
        write_file(record, out, "rescaled vocabulary growth, one labelled curve per context", "fig4",
                   [&](std::ostream& s) {
                     for (const auto& curve : curves) {
                       std::ostringstream one;
                       tg::write_collapse_tsv(one, tg::rescale_curve(curve));
                       std::istringstream rows(one.str());
                       const std::string label = curve.context.label();
                       for (std::string row; std::getline(rows, row);) s << label << '\t' << row << '\n';
                     }
                   });
      }
    } else if (name == "synth") {
      std::vector<std::pair<std::string, std::string>> kv;
      if (!config_path.empty()) {
        std::ifstream cfg(config_path);
        if (!cfg) throw tg::ConfigError("cannot open config " + config_path);
        kv = tg::read_key_values(cfg);
      }
      for (const auto& s : settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw tg::ConfigError("--set expects key=value, got '" + s + "'");
        kv.emplace_back(s.substr(0, eq), s.substr(eq + 1));
      }
      if (!preset.empty()) model = "folksonomy";
      record.parameters() = {{"model", model}, {"n", n}};
      if (!preset.empty()) record.parameters()["preset"] = preset;
      Output output(out);
      if (model == "zipf") {
        tg::ZipfConfig cfg;
        cfg.seed = globals.seed;
        for (const auto& [k, v] : kv) tg::apply_setting(cfg, k, v);
        if (alpha) cfg.alpha = *alpha;
        if (cap) cfg.vocabulary_cap = *cap;
        cfg.validate();
        record.parameters()["alpha"] = cfg.alpha;
        if (cfg.vocabulary_cap) record.parameters()["cap"] = *cfg.vocabulary_cap;
        record.doc()["seed"] = cfg.seed;
        tg::write_zipf_posts(output.stream(), cfg, n);
      } else if (model == "py") {
        tg::PitmanYorConfig cfg;
        cfg.seed = globals.seed;
        for (const auto& [k, v] : kv) tg::apply_setting(cfg, k, v);
        if (discount) cfg.discount = *discount;
        if (theta) cfg.strength = *theta;
        cfg.validate();
        record.parameters()["d"] = cfg.discount;
        record.parameters()["theta"] = cfg.strength;
        record.doc()["seed"] = cfg.seed;
        tg::write_pitman_yor_posts(output.stream(), cfg, n);
      } else {
        tg::FolksonomyGenConfig cfg = preset.empty() ? tg::FolksonomyGenConfig{} : tg::FolksonomyGenConfig::paper_like(n, globals.seed);
        cfg.n_posts = n;
        cfg.seed = globals.seed;
        if (preset.empty() && alpha) throw tg::ConfigError("--alpha applies to the zipf model only");
        for (const auto& [k, v] : kv) tg::apply_setting(cfg, k, v);
        if (discount) cfg.local_tag_process.discount = *discount;
        if (theta) cfg.local_tag_process.strength = *theta;
        cfg.validate();
        record.doc()["seed"] = cfg.seed;
        record.parameters()["n_posts"] = cfg.n_posts;
        record.parameters()["length.body_rate"] = cfg.post_length.body_rate;
        record.parameters()["local"] = {cfg.local_tag_process.discount, cfg.local_tag_process.strength};
        record.parameters()["global"] = {cfg.global_tag_process.discount, cfg.global_tag_process.strength};
        record.parameters()["coupling"] = cfg.global_coupling;
        const auto census = tg::gen_folksonomy(cfg, output.stream());
        json c{{"posts", census.posts},
               {"users", census.users},
               {"resources", census.resources},
               {"distinct_tags", census.distinct_tags},
               {"tag_assignments", census.tag_assignments}};
        record.doc()["census"] = c;
      }
      output.close();
      record.artifact(out, "synthetic post stream");
      if (!census_path.empty() && record.doc().contains("census")) {
        write_file(record, census_path, "generator census", "census",
                   [&](std::ostream& s) { s << record.doc()["census"].dump(2) << '\n'; });
      }
    } else if (name == "report") {
      tg::ReportOptions options;
      options.input = input;
      options.out_dir = out_dir;
      options.ingest = ingest.options(globals.threads);
      options.sampling = sampling.policy();
      if (!showcase.empty()) options.showcase = parse_ranks(showcase);
      options.bucket_size = bucket_size;
      options.regression_decades = decades;
      options.tail_n_min = n_min;
      options.seed = globals.seed;
      options.timings = globals.timings;
      const json report = tg::run_report(options);
      if (!globals.quiet) {
        for (const auto& stage : report["stages"]) {
          if (stage["status"] != "ok") {
            std::cerr << "taggrowth: stage " << stage["name"].get<std::string>() << " "
                      << stage["status"].get<std::string>();
            if (stage.contains("reason")) std::cerr << ": " << stage["reason"].get<std::string>();
            std::cerr << '\n';
          }
        }
      }
      if (!globals.json_report.empty()) {
        std::ofstream copy(globals.json_report, std::ios::binary);
        copy << report.dump(2) << '\n';
        if (!copy) throw tg::Error("cannot write report " + globals.json_report);
      }
      return kOk;
    }
    record.write(started);
    return kOk;
  } catch (const tg::ConfigError& e) {
    std::cerr << "taggrowth: configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const tg::ParseError& e) {
    std::cerr << "taggrowth: parse error: " << e.what() << '\n';
    return kInput;
  } catch (const tg::InputError& e) {
    std::cerr << "taggrowth: input error: " << e.what() << '\n';
    return kInput;
  } catch (const tg::PreconditionError& e) {
    std::cerr << "taggrowth: precondition failed: " << e.what() << '\n';
    return kPrecondition;
  } catch (const tg::Error& e) {
    std::cerr << "taggrowth: error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "taggrowth: error: " << e.what() << '\n';
    return kInput;
  }
}
