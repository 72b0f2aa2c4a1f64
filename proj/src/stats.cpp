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

#include "taggrowth/stats.hpp"

#include <algorithm>
#include <cmath>

namespace taggrowth {

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw PreconditionError("least squares: x and y differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw PreconditionError("least squares: need at least 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw PreconditionError("least squares: all x values are equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
  fit.points = n;
  return fit;
}

Histogram::Histogram(std::vector<double> edges, Binning binning, int bins_per_decade)
    : edges_(std::move(edges)), binning_(binning), bins_per_decade_(bins_per_decade) {
  if (edges_.size() < 2) throw ConfigError("histogram: need at least two edges");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i] > edges_[i - 1])) throw ConfigError("histogram: edges must be strictly increasing");
  }
  counts_.assign(edges_.size() - 1, 0);
}

namespace {

// Rounds to 12 decimals so that evenly spaced edges such as 0.06 print as
// written instead of 0.05999999999999999. Leaves huge magnitudes alone.
double tidy(double x) {
  const double scaled = x * 1e12;
  if (!(std::abs(scaled) < 9e15)) return x;
  return std::round(scaled) / 1e12;
}

}  // namespace

Histogram Histogram::linear(double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw ConfigError("histogram: invalid linear binning");
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = tidy(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins));
  }
  edges.front() = lo;
  edges.back() = hi;
  return Histogram(std::move(edges), Binning::linear);
}

Histogram Histogram::unit(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ConfigError("histogram: invalid unit binning");
  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(hi - lo + 2));
  for (std::int64_t v = lo; v <= hi + 1; ++v) edges.push_back(static_cast<double>(v) - 0.5);
  return Histogram(std::move(edges), Binning::unit);
}

Histogram Histogram::log_binned(double lo, double hi, int bins_per_decade) {
  if (!(lo > 0.0) || !(hi > lo) || bins_per_decade < 1) {
    throw ConfigError("histogram: invalid log binning");
  }
  std::vector<double> edges{lo};
  for (int k = 1; edges.back() < hi; ++k) {
    edges.push_back(lo * std::pow(10.0, static_cast<double>(k) / bins_per_decade));
  }
  return Histogram(std::move(edges), Binning::log, bins_per_decade);
}

Histogram Histogram::log_binned_integer(std::int64_t lo, std::int64_t hi, int bins_per_decade) {
  if (lo < 1 || hi < lo || bins_per_decade < 1) throw ConfigError("histogram: invalid log binning");
  std::vector<double> edges{static_cast<double>(lo) - 0.5};
  const double top = static_cast<double>(hi) + 0.5;
  for (int k = 1; edges.back() < top; ++k) {
    const double g = static_cast<double>(lo) * std::pow(10.0, static_cast<double>(k) / bins_per_decade);
    const double snapped = std::round(g) - 0.5;
    if (snapped > edges.back()) edges.push_back(std::min(snapped, top));
  }
  return Histogram(std::move(edges), Binning::log_integer, bins_per_decade);
}

bool Histogram::add(double x, std::uint64_t weight) {
  if (!(x >= edges_.front()) || !(x <= edges_.back())) {
    outside_ += weight;
    return false;
  }
  auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  std::size_t bin = static_cast<std::size_t>(it - edges_.begin());
  bin = bin == 0 ? 0 : std::min(bin - 1, counts_.size() - 1);
  counts_[bin] += weight;
  total_ += weight;
  return true;
}

void Histogram::merge(const Histogram& other) {
  if (other.edges_ != edges_) throw ConfigError("histogram merge: bin edges differ");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
  outside_ += other.outside_;
}

double Histogram::center(std::size_t i) const {
  switch (binning_) {
    case Binning::log:
      return std::sqrt(edges_[i] * edges_[i + 1]);
    case Binning::log_integer: {
      const double first = edges_[i] + 0.5;
      const double last = edges_[i + 1] - 0.5;
      return std::sqrt(first * last);
    }
    case Binning::linear:
      return tidy(0.5 * (edges_[i] + edges_[i + 1]));
    default:
      return 0.5 * (edges_[i] + edges_[i + 1]);
  }
}

double Histogram::density(std::size_t i) const {
  if (total_ == 0) return 0.0;
  return static_cast<double>(counts_[i]) / (static_cast<double>(total_) * width(i));
}

std::vector<double> Histogram::densities() const {
  std::vector<double> out(counts_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = density(i);
  return out;
}

double Histogram::mean() const {
  if (total_ == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < counts_.size(); ++i) sum += center(i) * static_cast<double>(counts_[i]);
  return sum / static_cast<double>(total_);
}

PostLengthDistribution post_length_distribution(std::span<const std::uint64_t> lengths,
                                                int tail_bins_per_decade) {
  if (lengths.empty()) throw PreconditionError("post length distribution: empty post stream");
  std::uint64_t max_length = 0;
  std::uint64_t sum = 0;
  for (auto n : lengths) {
    if (n == 0) throw PreconditionError("post length distribution: post without tags (clean first)");
    max_length = std::max(max_length, n);
    sum += n;
  }
  PostLengthDistribution dist{Histogram::unit(1, static_cast<std::int64_t>(max_length)),
                              Histogram::log_binned_integer(1, static_cast<std::int64_t>(max_length),
                                                            tail_bins_per_decade),
                              0.0, lengths.size(), max_length};
  for (auto n : lengths) {
    dist.body.add(static_cast<double>(n));
    dist.tail.add(static_cast<double>(n));
  }
  dist.mean = static_cast<double>(sum) / static_cast<double>(lengths.size());
  return dist;
}

PostLengthDistribution post_length_distribution(const TasTable& table, int tail_bins_per_decade) {
  std::vector<std::uint64_t> lengths(table.post_count());
  for (std::size_t i = 0; i < lengths.size(); ++i) lengths[i] = table.post_length(i);
  return post_length_distribution(lengths, tail_bins_per_decade);
}

PostLengthDistribution post_length_distribution(std::span<const Post> posts,
                                                int tail_bins_per_decade) {
  std::vector<std::uint64_t> lengths;
  lengths.reserve(posts.size());
  for (const auto& post : posts) lengths.push_back(post.tags.size());
  return post_length_distribution(lengths, tail_bins_per_decade);
}

TailFit tail_exponent(const Histogram& histogram, double n_min) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < histogram.bins(); ++i) {
    if (histogram.center(i) < n_min || histogram.counts()[i] == 0) continue;
    x.push_back(std::log10(histogram.center(i)));
    y.push_back(std::log10(histogram.density(i)));
  }
  if (x.empty()) {
    throw TailFitError(TailFitError::Reason::empty_tail,
                       "tail exponent: no non-empty bins above n_min = " + std::to_string(n_min));
  }
  if (x.size() < kMinTailBins) {
    throw TailFitError(TailFitError::Reason::too_few_bins,
                       "tail exponent: only " + std::to_string(x.size()) +
                           " non-empty bins above n_min, need " + std::to_string(kMinTailBins));
  }
  const LinearFit line = least_squares(x, y);
  return {line.slope, line.intercept, line.rms_residual, line.points, line.slope < -1.0};
}

}  // namespace taggrowth
