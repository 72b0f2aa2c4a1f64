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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taggrowth/clock_growth.hpp"
#include "taggrowth/stats.hpp"

namespace taggrowth {

enum class ExponentMethod { endpoint, loglog_regression };

std::string_view to_string(ExponentMethod method);

// Closed intrinsic-time interval [lo, hi].
struct FitWindow {
  std::uint64_t lo = 1;
  std::uint64_t hi = 1;
};

struct ExponentEstimate {
  double gamma = 0.0;
  ExponentMethod method = ExponentMethod::endpoint;
  std::uint64_t tau_max = 0;
  std::uint64_t n_final = 0;
  std::optional<FitWindow> window;
  // Regression only: RMS residual in log10 units.
  std::optional<double> residual;
  // Regression only: slope over the upper half of the window minus slope
  // over the lower half (in log tau). Close to zero for a power law, clearly
  // negative for logarithmic growth.
  std::optional<double> curvature;
};

// gamma = log(n_final) / log(tau_max).
double endpoint_gamma(std::uint64_t n_final, std::uint64_t tau_max);

// Throws PreconditionError when tau_max < 2.
ExponentEstimate endpoint_exponent(const GrowthCurve& curve);

// Window covering the last `decades` decades of the curve: [tau_max / 10^d, tau_max].
FitWindow last_decades(const GrowthCurve& curve, double decades);

inline constexpr std::size_t kMinRegressionSamples = 5;

// Least-squares slope of log N against log tau over the samples inside the
// window. Throws PreconditionError with fewer than 5 samples in the window.
ExponentEstimate loglog_regression_exponent(const GrowthCurve& curve, FitWindow window);

struct RescaledPoint {
  double x = 0.0;
  double y = 0.0;
};

// Growth curve with both axes divided by their final values.
struct RescaledCurve {
  ContextSelector context;
  std::vector<RescaledPoint> samples;
  std::uint64_t tau_max = 0;
  std::uint64_t n_final = 0;
};

RescaledCurve rescale_curve(const GrowthCurve& curve);

struct RankedEntity {
  std::string id;
  std::uint64_t post_count = 0;

  bool operator==(const RankedEntity&) const = default;
};

// Entities by descending post count; ties keep first-appearance order.
std::vector<RankedEntity> rank_entities(const TasTable& table, ContextKind kind);

// Ranks start, start + step, ..., up to stop (1-based, inclusive).
struct RankSelection {
  std::size_t start = 100;
  std::size_t step = 100;
  std::size_t stop = 1000;
};

// Entities at the selected ranks. Ranks beyond the end of the list are
// skipped and reported through `missing_ranks` when given.
std::vector<RankedEntity> select_ranks(std::span<const RankedEntity> ranking,
                                       const RankSelection& selection,
                                       std::vector<std::size_t>* missing_ranks = nullptr);

// Contiguous 1-based rank range [rank_lo, rank_hi].
struct PopularityBucket {
  std::string name;
  std::size_t rank_lo = 1;
  std::size_t rank_hi = 1;
};

// Three tiers: "top" = ranks 1..size; "bottom" = the first `size` ranks whose
// post count lies in [3, 5] (a handful of users); "mid" = `size` ranks starting
// at the first rank whose post count drops to the geometric mean of the top
// bucket's smallest count and 5. Tiers that cannot be formed are omitted.
std::vector<PopularityBucket> default_buckets(std::span<const RankedEntity> ranking,
                                              std::size_t size = 1000);

// Default P(gamma) binning: width 0.02 over [0, 1.2].
Histogram default_gamma_binning();

struct ExponentDistribution {
  Histogram histogram;
  std::size_t curves = 0;
  // gamma > 1 (binned anyway).
  std::size_t above_one = 0;
  // gamma outside the binning range (not binned).
  std::size_t outside_range = 0;
};

// Endpoint exponents of the curves binned into a copy of `binning`. Throws
// PreconditionError for an empty set or a curve with tau_max < 2.
ExponentDistribution exponent_distribution(std::span<const GrowthCurve> curves,
                                           const Histogram& binning = default_gamma_binning());

// Center of the highest-density bin (first one on ties).
double histogram_peak(const Histogram& histogram);

// amplitude * exp(-(x - mean)^2 / (2 sigma^2)) fitted to bin densities.
struct GaussianFit {
  double mean = 0.0;
  double sigma = 0.0;
  double amplitude = 0.0;
  // sqrt(sum (d_i - f_i)^2 / sum d_i^2) over all bins.
  double residual = 0.0;
  int iterations = 0;
  // residual <= the acceptance threshold.
  bool good = false;
};

struct GaussianFitOptions {
  int max_iterations = 200;
  double residual_threshold = 0.25;
};

inline constexpr std::size_t kMinGaussianBins = 4;

class GaussianFitError : public PreconditionError {
 public:
  GaussianFitError(const std::string& what, GaussianFit fallback)
      : PreconditionError(what), fallback_(fallback) {}
  // Moment-based estimates.
  const GaussianFit& fallback() const { return fallback_; }

 private:
  GaussianFit fallback_;
};

// Levenberg-Marquardt fit of the bin-averaged Gaussian to the densities,
// started from the histogram's moments. Needs >= 4 non-empty bins (throws
// PreconditionError); throws GaussianFitError when it does not converge.
GaussianFit gaussian_fit(const Histogram& histogram, const GaussianFitOptions& options = {});

struct RatePoint {
  double tau = 0.0;   // geometric center of the interval
  double rate = 0.0;  // new tags per assignment inside the interval
};

// New-tag rate dN/dtau between consecutive log-spaced checkpoints
// 10^(k / bins_per_decade) >= tau_lo that are present among the curve's samples.
std::vector<RatePoint> new_tag_rate(const GrowthCurve& curve, int bins_per_decade,
                                    std::uint64_t tau_lo = 1);

// Slope of log rate against log tau over the non-zero rate points; estimates
// gamma - 1.
LinearFit rate_exponent(std::span<const RatePoint> rate);

}  // namespace taggrowth
