// Copyright 2026 The hopscan Authors.
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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hopscan/embedding.hpp"
#include "json.hpp"

namespace hopscan {

// Workload for the analytical comparison. Token lengths and hop counts may
// be fractional averages.
struct WorkloadParams {
  double queries = 1;
  double hops = 1;
  double passages = 1;
  double query_tokens = 1;    // query plus previously retrieved context
  double passage_tokens = 1;

  // Throws InvalidArgument unless every field is positive and finite.
  void validate() const;
};

// Abstract cost units (token-passes), not FLOPs or seconds.
struct CostFunctions {
  std::function<double(double)> model;   // forward pass over L tokens
  std::function<double(double)> search;  // search over P stored vectors

  // model(L) = L, search(P) = P.
  static CostFunctions linear();
};

// Results saturate at the largest finite double instead of overflowing.
double cross_encoder_cost(const WorkloadParams& w, const CostFunctions& f);

struct DenseCost {
  double offline = 0.0;
  double online = 0.0;
};

DenseCost dense_cost(const WorkloadParams& w, const CostFunctions& f);

struct BenchConfig {
  std::vector<std::size_t> corpus_sizes{1000, 10000, 100000};
  std::size_t trials = 3;
  std::size_t queries = 2;
  std::size_t hops = 2;
  std::size_t passage_words = 40;
  std::size_t k = 10;
  // Fitted cross-path slope over dense-online slope must exceed this.
  double min_slope_ratio = 5.0;
  // Coefficient of variation across trials above which a warning is added.
  double noise_threshold = 0.20;
  std::uint64_t seed = 1;
};

struct BenchRow {
  std::size_t corpus_size = 0;
  double cross_seconds = 0.0;
  double cross_cv = 0.0;
  double dense_offline_seconds = 0.0;
  double dense_online_seconds = 0.0;
  double dense_online_cv = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  double cross_slope = 0.0;         // seconds per passage
  double dense_online_slope = 0.0;  // seconds per passage
  double slope_ratio = 0.0;
  bool passes = false;
  std::vector<std::string> warnings;
};

// Least-squares slope of y over x.
double fitted_slope(std::span<const double> x, std::span<const double> y);

// Times, per corpus size, (a) a per-candidate scoring loop that embeds every
// (chain, passage) pair at every hop, standing in for a cross-encoder, and
// (b) building the index once and then embedding the chain and searching at
// every hop. Runs on the calling thread only.
BenchReport bench_empirical(const BenchConfig& config,
                            const EmbeddingProvider& provider);

nlohmann::json bench_report_json(const BenchReport& report,
                                 const BenchConfig& config);

}  // namespace hopscan
