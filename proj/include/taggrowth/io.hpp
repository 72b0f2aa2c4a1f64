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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "taggrowth/clock_growth.hpp"
#include "taggrowth/fit.hpp"
#include "taggrowth/ingest.hpp"
#include "taggrowth/stats.hpp"

namespace taggrowth {

// Shortest representation that round-trips (std::to_chars).
std::string format_double(double value);

// Characters outside [A-Za-z0-9._-] become '_'; if anything changed, a short
// hash of the original id is appended so distinct ids keep distinct names.
std::string sanitize_id(std::string_view id);

// FNV-1a over a byte stream, reported as 16 hex digits.
class Checksum {
 public:
  void update(std::string_view bytes);
  std::uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xCBF29CE484222325ULL;
};

// `tau<TAB>n_distinct`
void write_curve_tsv(std::ostream& out, const GrowthCurve& curve);
// `context<TAB>tau<TAB>n_distinct`, context as ContextSelector::label().
void write_curves_combined_tsv(std::ostream& out, std::span<const GrowthCurve> curves);
// Reads either layout. Two-column input yields one global curve. Throws
// ParseError on malformed rows and InputError on non-increasing tau.
std::vector<GrowthCurve> read_curves_tsv(std::istream& in);
ContextSelector parse_context_label(std::string_view label);

// `tau<TAB>users`
void write_user_curve_tsv(std::ostream& out, const UserAccumulationCurve& curve);
// `resource<TAB>tau<TAB>users`
void write_user_curves_combined_tsv(std::ostream& out, std::span<const UserAccumulationCurve> curves);

// `bin_left<TAB>bin_right<TAB>count<TAB>density`. With skip_empty, zero-count
// bins are left out so every row can go on a log axis.
void write_histogram_tsv(std::ostream& out, const Histogram& histogram, bool skip_empty);

// `x<TAB>y`
void write_collapse_tsv(std::ostream& out, const RescaledCurve& curve);

// One row of an exponents table.
struct ExponentRow {
  std::string id;
  std::uint64_t tau_max = 0;
  std::uint64_t n_final = 0;
  double gamma_endpoint = 0.0;
  std::optional<double> gamma_regression;
  std::optional<double> residual;
  bool low_sample = false;
};

// Endpoint exponent plus regression over the last `decades` decades (or the
// whole curve when it is shorter); regression fields stay empty when the
// window holds too few samples. Throws PreconditionError for tau_max < 2.
ExponentRow exponent_row(const GrowthCurve& curve, double decades = 2.0);

// `id<TAB>tau_max<TAB>n_final<TAB>gamma_endpoint<TAB>gamma_regression<TAB>residual`,
// missing values written as NA.
void write_exponents_tsv(std::ostream& out, std::span<const ExponentRow> rows);

nlohmann::json to_json(const CleaningPolicy& policy);
nlohmann::json to_json(const DatasetSummary& summary);
nlohmann::json to_json(const GaussianFit& fit);
nlohmann::json to_json(const TailFit& fit);
nlohmann::json to_json(const ExponentEstimate& estimate);

}  // namespace taggrowth
