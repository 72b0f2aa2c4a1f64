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

#include "taggrowth/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "taggrowth/hyperloglog.hpp"

namespace taggrowth {

std::string format_double(double value) {
  if (std::isnan(value)) return "NA";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string sanitize_id(std::string_view id) {
  std::string out;
  out.reserve(id.size());
  bool changed = id.empty();
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    out.push_back(ok ? c : '_');
    changed |= !ok;
  }
  if (!out.empty() && out.front() == '.') {
    out.front() = '_';
    changed = true;
  }
  if (changed) {
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "-%08x", static_cast<unsigned>(hash64(id) & 0xFFFFFFFFu));
    out += suffix;
  }
  return out;
}

void Checksum::update(std::string_view bytes) {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= 0x100000001B3ULL;
  }
}

std::string Checksum::hex() const {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(state_));
  return buffer;
}

void write_curve_tsv(std::ostream& out, const GrowthCurve& curve) {
  std::string line;
  for (const auto& p : curve.samples) {
    line = std::to_string(p.tau);
    line += '\t';
    line += std::to_string(p.n);
    line += '\n';
    out << line;
  }
}

void write_curves_combined_tsv(std::ostream& out, std::span<const GrowthCurve> curves) {
  std::string line;
  for (const auto& curve : curves) {
    const std::string label = curve.context.label();
    for (const auto& p : curve.samples) {
      line = label;
      line += '\t';
      line += std::to_string(p.tau);
      line += '\t';
      line += std::to_string(p.n);
      line += '\n';
      out << line;
    }
  }
}

ContextSelector parse_context_label(std::string_view label) {
  if (label == "global") return ContextSelector::global();
  const auto colon = label.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("context label '" + std::string(label) + "' must be global, resource:<id> or user:<id>");
  }
  const ContextKind kind = parse_context_kind(label.substr(0, colon));
  if (kind == ContextKind::global) throw ConfigError("global context takes no id");
  return {kind, std::string(label.substr(colon + 1))};
}

namespace {

std::uint64_t parse_u64(std::string_view text, std::size_t line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, "expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::vector<GrowthCurve> read_curves_tsv(std::istream& in) {
  std::vector<GrowthCurve> curves;
  std::string buffer;
  std::size_t line = 0;
  while (std::getline(in, buffer)) {
    ++line;
    std::string_view view = buffer;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.empty()) continue;
    const auto fields = split(view, '\t');
    ContextSelector context;
    std::size_t offset = 0;
    if (fields.size() == 3) {
      context = parse_context_label(fields[0]);
      offset = 1;
    } else if (fields.size() != 2) {
      throw ParseError(line, "curve row: expected 2 or 3 tab-separated fields");
    }
    const CurvePoint point{parse_u64(fields[offset], line), parse_u64(fields[offset + 1], line)};
    if (curves.empty() || curves.back().context != context) {
      curves.push_back({});
      curves.back().context = context;
    }
    GrowthCurve& curve = curves.back();
    if (!curve.samples.empty() && point.tau <= curve.samples.back().tau) {
      throw InputError("line " + std::to_string(line) + ": tau must increase within a curve");
    }
    if (point.tau == 0 || point.n > point.tau) {
      throw InputError("line " + std::to_string(line) + ": need 1 <= tau and n <= tau");
    }
    curve.samples.push_back(point);
    curve.tau_max = point.tau;
    curve.n_final = point.n;
  }
  return curves;
}

void write_user_curve_tsv(std::ostream& out, const UserAccumulationCurve& curve) {
  std::string line;
  for (const auto& p : curve.samples) {
    line = std::to_string(p.tau);
    line += '\t';
    line += std::to_string(p.n);
    line += '\n';
    out << line;
  }
}

void write_user_curves_combined_tsv(std::ostream& out, std::span<const UserAccumulationCurve> curves) {
  std::string line;
  for (const auto& curve : curves) {
    for (const auto& p : curve.samples) {
      line = curve.resource;
      line += '\t';
      line += std::to_string(p.tau);
      line += '\t';
      line += std::to_string(p.n);
      line += '\n';
      out << line;
    }
  }
}

void write_histogram_tsv(std::ostream& out, const Histogram& histogram, bool skip_empty) {
  std::string line;
  for (std::size_t i = 0; i < histogram.bins(); ++i) {
    if (skip_empty && histogram.counts()[i] == 0) continue;
    line = format_double(histogram.left(i));
    line += '\t';
    line += format_double(histogram.right(i));
    line += '\t';
    line += std::to_string(histogram.counts()[i]);
    line += '\t';
    line += format_double(histogram.density(i));
    line += '\n';
    out << line;
  }
}

void write_collapse_tsv(std::ostream& out, const RescaledCurve& curve) {
  std::string line;
  for (const auto& p : curve.samples) {
    line = format_double(p.x);
    line += '\t';
    line += format_double(p.y);
    line += '\n';
    out << line;
  }
}

ExponentRow exponent_row(const GrowthCurve& curve, double decades) {
  ExponentRow row;
  row.id = curve.context.kind == ContextKind::global ? "global" : curve.context.id;
  row.tau_max = curve.tau_max;
  row.n_final = curve.n_final;
  row.gamma_endpoint = endpoint_exponent(curve).gamma;
  row.low_sample = curve.low_sample();
  try {
    const auto est = loglog_regression_exponent(curve, last_decades(curve, decades));
    row.gamma_regression = est.gamma;
    row.residual = est.residual;
  } catch (const PreconditionError&) {
    // Too few samples in the window: leave the regression columns empty.
  }
  return row;
}

void write_exponents_tsv(std::ostream& out, std::span<const ExponentRow> rows) {
  std::string line;
  for (const auto& row : rows) {
    line = row.id;
    line += '\t';
    line += std::to_string(row.tau_max);
    line += '\t';
    line += std::to_string(row.n_final);
    line += '\t';
    line += format_double(row.gamma_endpoint);
    line += '\t';
    line += row.gamma_regression ? format_double(*row.gamma_regression) : "NA";
    line += '\t';
    line += row.residual ? format_double(*row.residual) : "NA";
    line += '\n';
    out << line;
  }
}

nlohmann::json to_json(const CleaningPolicy& policy) {
  nlohmann::json j;
  j["min_timestamp"] = policy.min_timestamp;
  if (policy.max_from_wall_clock) {
    j["max_timestamp"] = "wall-clock";
  } else {
    j["max_timestamp"] = policy.max_timestamp;
  }
  j["fold_case"] = policy.fold_case;
  j["dedupe_within_post"] = policy.dedupe_within_post;
  return j;
}

nlohmann::json to_json(const DatasetSummary& s) {
  return {{"post_count", s.post_count},
          {"dropped_empty_count", s.dropped_empty_count},
          {"dropped_timestamp_count", s.dropped_timestamp_count},
          {"user_count", s.user_count},
          {"resource_count", s.resource_count},
          {"distinct_tag_count", s.distinct_tag_count},
          {"total_tag_assignments", s.total_tag_assignments}};
}

nlohmann::json to_json(const GaussianFit& fit) {
  return {{"mean", fit.mean},         {"sigma", fit.sigma},           {"amplitude", fit.amplitude},
          {"residual", fit.residual}, {"iterations", fit.iterations}, {"good", fit.good}};
}

nlohmann::json to_json(const TailFit& fit) {
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"rms_residual", fit.rms_residual},
          {"bins_used", fit.bins_used},
          {"heavy_tailed", fit.heavy_tailed}};
}

nlohmann::json to_json(const ExponentEstimate& e) {
  nlohmann::json j{{"gamma", e.gamma},
                   {"method", std::string(to_string(e.method))},
                   {"tau_max", e.tau_max},
                   {"n_final", e.n_final}};
  if (e.window) j["window"] = {e.window->lo, e.window->hi};
  if (e.residual) j["residual"] = *e.residual;
  if (e.curvature) j["curvature"] = *e.curvature;
  return j;
}

}  // namespace taggrowth
