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
#include <span>
#include <vector>

#include "taggrowth/error.hpp"
#include "taggrowth/tas_table.hpp"

namespace taggrowth {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  // Root-mean-square of the residuals y - (slope * x + intercept).
  double rms_residual = 0.0;
  std::size_t points = 0;
};

// Ordinary least squares y = slope * x + intercept. Needs >= 2 points with
// distinct x; throws PreconditionError otherwise.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

// Counts over strictly increasing bin edges. Bin i is [edges[i], edges[i+1]),
// the last bin also includes its right edge. Density of a bin is
// count / (total * width), so sum(density * width) == 1 for a non-empty
// histogram.
class Histogram {
 public:
  enum class Binning { custom, linear, unit, log, log_integer };

  explicit Histogram(std::vector<double> edges, Binning binning = Binning::custom,
                     int bins_per_decade = 0);

  // `bins` equal-width bins covering [lo, hi].
  static Histogram linear(double lo, double hi, std::size_t bins);
  // One bin per integer lo..hi, edges at half integers.
  static Histogram unit(std::int64_t lo, std::int64_t hi);
  // Geometric edges lo * 10^(k / bins_per_decade) up to the first edge >= hi.
  static Histogram log_binned(double lo, double hi, int bins_per_decade);
  // Log binning for integer data: geometric edges snapped to half integers and
  // de-duplicated, so every bin covers a whole number of integers and its
  // width equals that number.
  static Histogram log_binned_integer(std::int64_t lo, std::int64_t hi, int bins_per_decade);

  // Returns false (and counts the value as outside) if x is out of range.
  bool add(double x, std::uint64_t weight = 1);

  // Bin-wise addition. Throws ConfigError unless the edges are identical.
  void merge(const Histogram& other);

  std::size_t bins() const { return counts_.size(); }
  std::span<const double> edges() const { return edges_; }
  std::span<const std::uint64_t> counts() const { return counts_; }
  std::uint64_t total() const { return total_; }
  std::uint64_t outside() const { return outside_; }
  Binning binning() const { return binning_; }
  int bins_per_decade() const { return bins_per_decade_; }

  double left(std::size_t i) const { return edges_[i]; }
  double right(std::size_t i) const { return edges_[i + 1]; }
  double width(std::size_t i) const { return edges_[i + 1] - edges_[i]; }
  // Arithmetic center for linear binnings, geometric center for log binnings.
  double center(std::size_t i) const;
  double density(std::size_t i) const;
  std::vector<double> densities() const;

  // Count-weighted mean of bin centers.
  double mean() const;

 private:
  std::vector<double> edges_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  std::uint64_t outside_ = 0;
  Binning binning_;
  int bins_per_decade_;
};

// Number of tags per post.
struct PostLengthDistribution {
  Histogram body;  // unit bins 1..max length
  Histogram tail;  // integer log bins, 10 per decade by default
  double mean = 0.0;
  std::uint64_t posts = 0;
  std::uint64_t max_length = 0;
};

// Throws PreconditionError for an empty input or a zero length.
PostLengthDistribution post_length_distribution(std::span<const std::uint64_t> lengths,
                                                int tail_bins_per_decade = 10);
PostLengthDistribution post_length_distribution(const TasTable& table,
                                                int tail_bins_per_decade = 10);
PostLengthDistribution post_length_distribution(std::span<const Post> posts,
                                                int tail_bins_per_decade = 10);

struct TailFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::size_t bins_used = 0;
  // False when the density does not decay faster than 1/n.
  bool heavy_tailed = false;
};

class TailFitError : public PreconditionError {
 public:
  enum class Reason { empty_tail, too_few_bins };

  TailFitError(Reason reason, const std::string& what) : PreconditionError(what), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

inline constexpr std::size_t kMinTailBins = 5;

// Least-squares slope of log10(density) against log10(bin center) over the
// non-empty bins whose center is >= n_min.
TailFit tail_exponent(const Histogram& histogram, double n_min);

}  // namespace taggrowth
