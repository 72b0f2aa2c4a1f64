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

// Slow, obviously-correct reference implementations used to cross-check the
// library in tests.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "taggrowth/tas_table.hpp"

namespace oracle {

// Distinct count of tags[0..tau) rebuilt from an empty set.
std::uint64_t rescan_distinct(const std::vector<std::uint32_t>& tags, std::uint64_t tau);

// Tag ids of the global stream and of each resource/user sub-stream.
std::vector<std::uint32_t> global_tags(const taggrowth::TasTable& table);
std::vector<std::uint32_t> resource_tags(const taggrowth::TasTable& table, std::uint32_t resource);
std::vector<std::uint32_t> user_tags(const taggrowth::TasTable& table, std::uint32_t user);

// Random TAS stream of `rows` assignments spread over a few users/resources.
taggrowth::TasTable random_table(std::mt19937_64& rng, std::size_t rows);

// Chinese-restaurant style Pitman-Yor: linear scan over tables per draw.
class NaivePitmanYor {
 public:
  NaivePitmanYor(double discount, double strength, std::uint64_t seed)
      : d_(discount), theta_(strength), rng_(seed) {}

  std::uint64_t draw();
  std::size_t tables() const { return counts_.size(); }

 private:
  double d_;
  double theta_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> u_{0.0, 1.0};
  std::vector<std::uint64_t> counts_;
  std::uint64_t customers_ = 0;
};

// E[K] after n draws of the d = 0 process: sum_{i<n} theta / (theta + i).
double dirichlet_expected_tables(double theta, std::uint64_t n);

// Exact E[K] after n draws for general (d, theta).
double pitman_yor_expected_tables(double discount, double theta, std::uint64_t n);

// Discrete power law P(n) ~ n^-alpha on [1, max], by table lookup.
class PowerLawSampler {
 public:
  PowerLawSampler(double alpha, std::uint64_t max, std::uint64_t seed);
  std::uint64_t operator()();

 private:
  std::vector<double> cdf_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> u_{0.0, 1.0};
};

}  // namespace oracle
