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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace oracle {

std::uint64_t rescan_distinct(const std::vector<std::uint32_t>& tags, std::uint64_t tau) {
  std::set<std::uint32_t> seen(tags.begin(), tags.begin() + static_cast<std::ptrdiff_t>(tau));
  return seen.size();
}

std::vector<std::uint32_t> global_tags(const taggrowth::TasTable& table) {
  std::vector<std::uint32_t> out;
  for (const auto& row : table.rows()) out.push_back(row.tag);
  return out;
}

std::vector<std::uint32_t> resource_tags(const taggrowth::TasTable& table, std::uint32_t resource) {
  std::vector<std::uint32_t> out;
  for (const auto& row : table.rows()) {
    if (row.resource == resource) out.push_back(row.tag);
  }
  return out;
}

std::vector<std::uint32_t> user_tags(const taggrowth::TasTable& table, std::uint32_t user) {
  std::vector<std::uint32_t> out;
  for (const auto& row : table.rows()) {
    if (row.user == user) out.push_back(row.tag);
  }
  return out;
}

taggrowth::TasTable random_table(std::mt19937_64& rng, std::size_t rows) {
  std::uniform_int_distribution<int> users(0, 7);
  std::uniform_int_distribution<int> resources(0, 11);
  std::uniform_int_distribution<int> length(1, 6);
  std::geometric_distribution<int> tag(0.02);
  taggrowth::TasTable table;
  std::int64_t ts = 1000;
  while (table.size() < rows) {
    taggrowth::Post post;
    post.timestamp = ts++;
    post.user = "u" + std::to_string(users(rng));
    post.resource = "r" + std::to_string(resources(rng));
    const int n = std::min<int>(length(rng), static_cast<int>(rows - table.size()));
    for (int i = 0; i < n; ++i) post.tags.push_back("t" + std::to_string(tag(rng)));
    table.append_post(post);
  }
  return table;
}

std::uint64_t NaivePitmanYor::draw() {
  const double k = static_cast<double>(counts_.size());
  const double t = static_cast<double>(customers_);
  ++customers_;
  const double p_new = customers_ == 1 ? 1.0 : (theta_ + d_ * k) / (theta_ + t);
  double u = u_(rng_);
  if (u < p_new) {
    counts_.push_back(1);
    return counts_.size() - 1;
  }
  // Existing table i with probability (c_i - d) / (t - d K).
  double target = (u - p_new) / (1.0 - p_new) * (t - d_ * k);
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    target -= static_cast<double>(counts_[i]) - d_;
    if (target < 0.0) {
      ++counts_[i];
      return i;
    }
  }
  ++counts_.back();
  return counts_.size() - 1;
}

double dirichlet_expected_tables(double theta, std::uint64_t n) {
  double sum = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) sum += theta / (theta + static_cast<double>(i));
  return sum;
}

double pitman_yor_expected_tables(double discount, double theta, std::uint64_t n) {
  if (discount == 0.0) return dirichlet_expected_tables(theta, n);
  if (theta <= 0.0) {
    // Gamma changes sign below zero; take the rising-factorial ratio term by term.
    double ratio = 1.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      ratio *= (theta + discount + static_cast<double>(i)) / (theta + static_cast<double>(i));
    }
    return theta / discount * (ratio - 1.0);
  }
  const double x = static_cast<double>(n);
  const double ratio = std::exp(std::lgamma(theta + discount + x) + std::lgamma(theta) -
                                std::lgamma(theta + discount) - std::lgamma(theta + x));
  return theta / discount * (ratio - 1.0);
}

PowerLawSampler::PowerLawSampler(double alpha, std::uint64_t max, std::uint64_t seed) : rng_(seed) {
  cdf_.reserve(max);
  double total = 0.0;
  for (std::uint64_t n = 1; n <= max; ++n) {
    total += std::pow(static_cast<double>(n), -alpha);
    cdf_.push_back(total);
  }
  for (auto& c : cdf_) c /= total;
}

std::uint64_t PowerLawSampler::operator()() {
  const double u = u_(rng_);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1)) + 1;
}

}  // namespace oracle
