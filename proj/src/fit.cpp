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

#include "taggrowth/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace taggrowth {

std::string_view to_string(ExponentMethod method) {
  return method == ExponentMethod::endpoint ? "endpoint" : "loglog_regression";
}

double endpoint_gamma(std::uint64_t n_final, std::uint64_t tau_max) {
  if (tau_max < 2) throw PreconditionError("endpoint exponent undefined for tau_max < 2");
  if (n_final <= 1) return 0.0;
  return std::log(static_cast<double>(n_final)) / std::log(static_cast<double>(tau_max));
}

ExponentEstimate endpoint_exponent(const GrowthCurve& curve) {
  if (curve.tau_max < 2) {
    throw PreconditionError("endpoint exponent undefined for " + curve.context.label() +
                            ": tau_max = " + std::to_string(curve.tau_max) + " < 2");
  }
  ExponentEstimate est;
  est.gamma = endpoint_gamma(curve.n_final, curve.tau_max);
  est.method = ExponentMethod::endpoint;
  est.tau_max = curve.tau_max;
  est.n_final = curve.n_final;
  return est;
}

FitWindow last_decades(const GrowthCurve& curve, double decades) {
  const double lo = static_cast<double>(curve.tau_max) / std::pow(10.0, decades);
  return {static_cast<std::uint64_t>(std::max(1.0, std::ceil(lo))), curve.tau_max};
}

namespace {

LinearFit fit_log_points(std::span<const CurvePoint> points) {
  std::vector<double> x, y;
  x.reserve(points.size());
  y.reserve(points.size());
  for (const auto& p : points) {
    x.push_back(std::log10(static_cast<double>(p.tau)));
    y.push_back(std::log10(static_cast<double>(p.n)));
  }
  return least_squares(x, y);
}

}  // namespace

ExponentEstimate loglog_regression_exponent(const GrowthCurve& curve, FitWindow window) {
  std::vector<CurvePoint> points;
  for (const auto& p : curve.samples) {
    if (p.tau >= window.lo && p.tau <= window.hi && p.n > 0) points.push_back(p);
  }
  if (points.size() < kMinRegressionSamples) {
    throw PreconditionError("log-log regression for " + curve.context.label() + ": only " +
                            std::to_string(points.size()) + " samples in window [" +
                            std::to_string(window.lo) + ", " + std::to_string(window.hi) +
                            "], need " + std::to_string(kMinRegressionSamples));
  }
  const LinearFit line = fit_log_points(points);
  ExponentEstimate est;
  est.gamma = line.slope;
  est.method = ExponentMethod::loglog_regression;
  est.tau_max = curve.tau_max;
  est.n_final = curve.n_final;
  est.window = window;
  est.residual = line.rms_residual;

  // Split at the middle of the window in log tau.
  const double mid = 0.5 * (std::log10(static_cast<double>(points.front().tau)) +
                            std::log10(static_cast<double>(points.back().tau)));
  std::vector<CurvePoint> lower, upper;
  for (const auto& p : points) {
    (std::log10(static_cast<double>(p.tau)) <= mid ? lower : upper).push_back(p);
  }
  if (lower.size() >= 2 && upper.size() >= 2) {
    est.curvature = fit_log_points(upper).slope - fit_log_points(lower).slope;
  }
  return est;
}

RescaledCurve rescale_curve(const GrowthCurve& curve) {
  if (curve.tau_max < 1 || curve.n_final < 1 || curve.samples.empty()) {
    throw PreconditionError("rescale: curve for " + curve.context.label() + " is empty");
  }
  RescaledCurve out;
  out.context = curve.context;
  out.tau_max = curve.tau_max;
  out.n_final = curve.n_final;
  const double tau_max = static_cast<double>(curve.tau_max);
  const double n_final = static_cast<double>(curve.n_final);
  out.samples.reserve(curve.samples.size());
  for (const auto& p : curve.samples) {
    out.samples.push_back({static_cast<double>(p.tau) / tau_max, static_cast<double>(p.n) / n_final});
  }
  return out;
}

std::vector<RankedEntity> rank_entities(const TasTable& table, ContextKind kind) {
  if (kind == ContextKind::global) throw ConfigError("rank_entities: kind must be resource or user");
  const Interner& names = kind == ContextKind::resource ? table.resources() : table.users();
  std::vector<std::uint64_t> counts(names.size(), 0);
  const auto rows = table.rows();
  for (const auto start : table.post_starts()) {
    const TasRow& row = rows[start];
    ++counts[kind == ContextKind::resource ? row.resource : row.user];
  }
  std::vector<std::uint32_t> order(names.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  // Ids are assigned in first-appearance order, so a stable sort keeps ties
  // in that order.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return counts[a] > counts[b]; });
  std::vector<RankedEntity> ranking;
  ranking.reserve(order.size());
  for (auto id : order) ranking.push_back({names.name(id), counts[id]});
  return ranking;
}

std::vector<RankedEntity> select_ranks(std::span<const RankedEntity> ranking,
                                       const RankSelection& selection,
                                       std::vector<std::size_t>* missing_ranks) {
  if (selection.start < 1 || selection.step < 1) {
    throw ConfigError("rank selection: start and step must be >= 1");
  }
  std::vector<RankedEntity> out;
  for (std::size_t rank = selection.start; rank <= selection.stop; rank += selection.step) {
    if (rank <= ranking.size()) {
      out.push_back(ranking[rank - 1]);
    } else if (missing_ranks) {
      missing_ranks->push_back(rank);
    }
  }
  return out;
}

std::vector<PopularityBucket> default_buckets(std::span<const RankedEntity> ranking,
                                              std::size_t size) {
  std::vector<PopularityBucket> buckets;
  if (ranking.empty() || size == 0) return buckets;
  const std::size_t n = ranking.size();
  const std::size_t top_hi = std::min(size, n);
  buckets.push_back({"top", 1, top_hi});

  constexpr std::uint64_t kFewHi = 5;
  constexpr std::uint64_t kFewLo = 3;
  const auto first_at_most = [&](double threshold, std::size_t from) {
    std::size_t rank = from;
    while (rank <= n && static_cast<double>(ranking[rank - 1].post_count) > threshold) ++rank;
    return rank;
  };

  std::size_t bottom_lo = first_at_most(static_cast<double>(kFewHi), top_hi + 1);
  std::size_t bottom_hi = bottom_lo;
  while (bottom_hi <= n && bottom_hi < bottom_lo + size && ranking[bottom_hi - 1].post_count >= kFewLo) {
    ++bottom_hi;
  }
  const bool have_bottom = bottom_hi > bottom_lo;

  const double threshold =
      std::sqrt(static_cast<double>(ranking[top_hi - 1].post_count) * static_cast<double>(kFewHi));
  const std::size_t mid_lo = first_at_most(threshold, top_hi + 1);
  const std::size_t mid_end = std::min(mid_lo + size, have_bottom ? bottom_lo : n + 1);
  if (mid_lo < mid_end && mid_lo <= n) buckets.push_back({"mid", mid_lo, mid_end - 1});
  if (have_bottom) buckets.push_back({"bottom", bottom_lo, bottom_hi - 1});
  return buckets;
}

Histogram default_gamma_binning() { return Histogram::linear(0.0, 1.2, 60); }

ExponentDistribution exponent_distribution(std::span<const GrowthCurve> curves,
                                           const Histogram& binning) {
  if (curves.empty()) throw PreconditionError("exponent distribution: empty set of curves");
  ExponentDistribution dist{Histogram(std::vector<double>(binning.edges().begin(), binning.edges().end()),
                                      binning.binning(), binning.bins_per_decade()),
                            curves.size(), 0, 0};
  for (const auto& curve : curves) {
    const double gamma = endpoint_exponent(curve).gamma;
    if (gamma > 1.0) ++dist.above_one;
    if (!dist.histogram.add(gamma)) ++dist.outside_range;
  }
  return dist;
}

double histogram_peak(const Histogram& histogram) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < histogram.bins(); ++i) {
    if (histogram.density(i) > histogram.density(best)) best = i;
  }
  return histogram.center(best);
}

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / kSqrt2Pi; }

struct BinData {
  std::vector<double> a, b, d;
};

// Bin-averaged Gaussian density and its gradient with respect to
// (amplitude, mean, log sigma).
void model(const BinData& data, const std::array<double, 3>& p, std::vector<double>& f,
           std::vector<std::array<double, 3>>* jac) {
  const double amp = p[0], mu = p[1], sigma = std::exp(p[2]);
  const std::size_t n = data.d.size();
  f.resize(n);
  if (jac) jac->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = data.b[i] - data.a[i];
    const double za = (data.a[i] - mu) / sigma;
    const double zb = (data.b[i] - mu) / sigma;
    const double mass = normal_cdf(zb) - normal_cdf(za);
    const double scale = amp * kSqrt2Pi / w;
    f[i] = scale * sigma * mass;
    if (jac) {
      const double pa = normal_pdf(za), pb = normal_pdf(zb);
      (*jac)[i][0] = kSqrt2Pi * sigma * mass / w;
      (*jac)[i][1] = scale * (pa - pb);
      (*jac)[i][2] = sigma * scale * (mass - (zb * pb - za * pa));
    }
  }
}

double sum_sq(const BinData& data, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += (data.d[i] - f[i]) * (data.d[i] - f[i]);
  return s;
}

bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> v,
            std::array<double, 3>& x) {
  for (int c = 0; c < 3; ++c) {
    int pivot = c;
    for (int r = c + 1; r < 3; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[pivot][c])) pivot = r;
    }
    if (std::abs(m[pivot][c]) < 1e-300) return false;
    std::swap(m[c], m[pivot]);
    std::swap(v[c], v[pivot]);
    for (int r = c + 1; r < 3; ++r) {
      const double k = m[r][c] / m[c][c];
      for (int cc = c; cc < 3; ++cc) m[r][cc] -= k * m[c][cc];
      v[r] -= k * v[c];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = v[r];
    for (int c = r + 1; c < 3; ++c) s -= m[r][c] * x[c];
    x[r] = s / m[r][r];
  }
  return true;
}

}  // namespace

GaussianFit gaussian_fit(const Histogram& histogram, const GaussianFitOptions& options) {
  std::size_t non_empty = 0;
  for (auto c : histogram.counts()) non_empty += c > 0 ? 1 : 0;
  if (non_empty < kMinGaussianBins) {
    throw PreconditionError("gaussian fit: " + std::to_string(non_empty) +
                            " non-empty bins, need " + std::to_string(kMinGaussianBins));
  }
  BinData data;
  double mean = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < histogram.bins(); ++i) {
    data.a.push_back(histogram.left(i));
    data.b.push_back(histogram.right(i));
    data.d.push_back(histogram.density(i));
    const double mass = histogram.density(i) * histogram.width(i);
    mean += mass * histogram.center(i);
    norm += mass;
  }
  mean /= norm;
  double var = 0.0;
  for (std::size_t i = 0; i < histogram.bins(); ++i) {
    const double c = histogram.center(i) - mean;
    var += histogram.density(i) * histogram.width(i) * c * c;
  }
  var /= norm;
  double sigma0 = std::sqrt(var);
  if (!(sigma0 > 0.0)) sigma0 = histogram.width(0);

  GaussianFit fallback;
  fallback.mean = mean;
  fallback.sigma = sigma0;
  fallback.amplitude = norm / (sigma0 * kSqrt2Pi);

  double data_sq = 0.0;
  for (double d : data.d) data_sq += d * d;

  std::array<double, 3> p{fallback.amplitude, mean, std::log(sigma0)};
  std::vector<double> f, trial_f;
  std::vector<std::array<double, 3>> jac;
  model(data, p, f, &jac);
  double sse = sum_sq(data, f);
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_iterations && !converged; ++iter) {
    std::array<std::array<double, 3>, 3> jtj{};
    std::array<double, 3> jtr{};
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double r = data.d[i] - f[i];
      for (int u = 0; u < 3; ++u) {
        jtr[u] += jac[i][u] * r;
        for (int v = 0; v < 3; ++v) jtj[u][v] += jac[i][u] * jac[i][v];
      }
    }
    bool stepped = false;
    while (lambda < 1e20) {
      auto m = jtj;
      for (int u = 0; u < 3; ++u) m[u][u] += lambda * std::max(jtj[u][u], 1e-300);
      std::array<double, 3> delta{};
      if (!solve3(m, jtr, delta)) {
        lambda *= 10.0;
        continue;
      }
      const std::array<double, 3> trial{p[0] + delta[0], p[1] + delta[1], p[2] + delta[2]};
      model(data, trial, trial_f, nullptr);
      const double trial_sse = sum_sq(data, trial_f);
      if (std::isfinite(trial_sse) && trial_sse <= sse) {
        const double gain = sse - trial_sse;
        p = trial;
        model(data, p, f, &jac);
        const double step = std::abs(delta[0]) / std::max(std::abs(p[0]), 1e-300) +
                            std::abs(delta[1]) + std::abs(delta[2]);
        converged = gain <= 1e-10 * sse + 1e-300 || step < 1e-10;
        sse = trial_sse;
        lambda = std::max(lambda / 10.0, 1e-12);
        stepped = true;
        break;
      }
      lambda *= 10.0;
    }
    // No downhill step exists at any damping: stationary point.
    if (!stepped) converged = true;
  }
  if (!converged) {
    throw GaussianFitError("gaussian fit did not converge after " +
                               std::to_string(options.max_iterations) + " iterations",
                           fallback);
  }
  GaussianFit fit;
  fit.amplitude = p[0];
  fit.mean = p[1];
  fit.sigma = std::exp(p[2]);
  fit.residual = data_sq > 0.0 ? std::sqrt(sse / data_sq) : 0.0;
  fit.iterations = iter;
  fit.good = fit.residual <= options.residual_threshold && fit.amplitude > 0.0;
  return fit;
}

std::vector<RatePoint> new_tag_rate(const GrowthCurve& curve, int bins_per_decade,
                                    std::uint64_t tau_lo) {
  if (bins_per_decade < 1) throw ConfigError("new tag rate: bins_per_decade must be >= 1");
  const auto n_at = [&](std::uint64_t tau) -> std::optional<std::uint64_t> {
    auto it = std::lower_bound(curve.samples.begin(), curve.samples.end(), tau,
                               [](const CurvePoint& p, std::uint64_t t) { return p.tau < t; });
    if (it == curve.samples.end() || it->tau != tau) return std::nullopt;
    return it->n;
  };
  std::vector<std::uint64_t> marks;
  for (int k = 0;; ++k) {
    const auto c = static_cast<std::uint64_t>(
        std::llround(std::pow(10.0, static_cast<double>(k) / bins_per_decade)));
    if (c > curve.tau_max) break;
    if (c >= tau_lo && (marks.empty() || c > marks.back())) marks.push_back(c);
  }
  std::vector<RatePoint> out;
  for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
    const auto n0 = n_at(marks[i]);
    const auto n1 = n_at(marks[i + 1]);
    if (!n0 || !n1) continue;
    const double dt = static_cast<double>(marks[i + 1] - marks[i]);
    out.push_back({std::sqrt(static_cast<double>(marks[i]) * static_cast<double>(marks[i + 1])),
                   static_cast<double>(*n1 - *n0) / dt});
  }
  return out;
}

LinearFit rate_exponent(std::span<const RatePoint> rate) {
  std::vector<double> x, y;
  for (const auto& p : rate) {
    if (p.rate <= 0.0) continue;
    x.push_back(std::log10(p.tau));
    y.push_back(std::log10(p.rate));
  }
  return least_squares(x, y);
}

}  // namespace taggrowth
