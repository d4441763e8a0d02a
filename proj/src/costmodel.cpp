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

#include "hopscan/costmodel.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "hopscan/error.hpp"
#include "hopscan/index.hpp"

namespace hopscan {

namespace {

double saturate(double v) {
  constexpr double kMax = std::numeric_limits<double>::max();
  if (std::isnan(v)) return kMax;
  return std::min(v, kMax);
}

}  // namespace

void WorkloadParams::validate() const {
  for (double v : {queries, hops, passages, query_tokens, passage_tokens}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("workload parameters must be positive and finite");
    }
  }
}

CostFunctions CostFunctions::linear() {
  return {[](double l) { return l; }, [](double p) { return p; }};
}

double cross_encoder_cost(const WorkloadParams& w, const CostFunctions& f) {
  w.validate();
  return saturate(w.queries * w.hops * w.passages *
                  f.model(w.query_tokens + w.passage_tokens));
}

DenseCost dense_cost(const WorkloadParams& w, const CostFunctions& f) {
  w.validate();
  return {saturate(w.passages * f.model(w.passage_tokens)),
          saturate(w.queries * w.hops *
                   (f.model(w.query_tokens) + f.search(w.passages)))};
}

double fitted_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("slope fit needs >= 2 paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw InvalidArgument("slope fit needs distinct x values");
  return sxy / sxx;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Stats {
  double mean = 0.0;
  double cv = 0.0;
};

Stats summarize(const std::vector<double>& xs) {
  Stats s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - s.mean) * (x - s.mean);
  var /= static_cast<double>(xs.size());
  s.cv = s.mean > 0.0 ? std::sqrt(var) / s.mean : 0.0;
  return s;
}

std::string random_words(std::mt19937_64& rng, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += 'w';
    out += std::to_string(rng() % 50000);
  }
  return out;
}

const std::string kBenchInstruction = "bench";

}  // namespace

BenchReport bench_empirical(const BenchConfig& config,
                            const EmbeddingProvider& provider) {
  if (config.corpus_sizes.size() < 2) {
    throw InvalidArgument("bench needs at least two corpus sizes");
  }
  if (config.trials == 0 || config.queries == 0 || config.hops == 0) {
    throw InvalidArgument("trials, queries and hops must be positive");
  }
  BenchReport report;
  std::mt19937_64 rng(config.seed);
  std::vector<std::string> queries;
  for (std::size_t q = 0; q < config.queries; ++q) {
    queries.push_back(random_words(rng, 12));
  }

  for (std::size_t size : config.corpus_sizes) {
    std::vector<Passage> corpus;
    corpus.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
      corpus.push_back(
          {"p" + std::to_string(i), "", random_words(rng, config.passage_words)});
    }

    std::vector<double> cross_t, offline_t, online_t;
    for (std::size_t trial = 0; trial < config.trials; ++trial) {
      // Cross path: every candidate re-encoded with the chain at every hop.
      auto start = Clock::now();
      for (const auto& q : queries) {
        std::string chain = q;
        for (std::size_t h = 0; h < config.hops; ++h) {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t best_row = 0;
          for (std::size_t i = 0; i < corpus.size(); ++i) {
            const Vector v = provider.embed({chain + "\n" + corpus[i].text,
                                             EmbeddingRole::query_chain,
                                             kBenchInstruction});
            if (v.values[0] > best) {
              best = v.values[0];
              best_row = i;
            }
          }
          chain += "\n" + corpus[best_row].text;
        }
      }
      cross_t.push_back(seconds_since(start));

      start = Clock::now();
      const VectorIndex index = build_index(corpus, provider, kBenchInstruction);
      offline_t.push_back(seconds_since(start));

      start = Clock::now();
      for (const auto& q : queries) {
        std::string chain = q;
        std::vector<std::string> taken;
        for (std::size_t h = 0; h < config.hops; ++h) {
          const Vector v = provider.embed(
              {chain, EmbeddingRole::query_chain, kBenchInstruction});
          const SearchResult r = search(index, v.values, config.k, taken);
          if (r.empty()) break;
          taken.push_back(r.top().passage_id);
          chain += "\n" + corpus[*index.row_of(r.top().passage_id)].text;
        }
      }
      online_t.push_back(seconds_since(start));
    }

    const Stats cross = summarize(cross_t);
    const Stats offline = summarize(offline_t);
    const Stats online = summarize(online_t);
    report.rows.push_back(
        {size, cross.mean, cross.cv, offline.mean, online.mean, online.cv});
    for (auto [name, cv] : {std::pair{"cross", cross.cv},
                            std::pair{"dense_online", online.cv}}) {
      if (cv > config.noise_threshold) {
        report.warnings.push_back(
            "noisy environment: " + std::string(name) + " timings at size " +
            std::to_string(size) + " vary by " +
            std::to_string(static_cast<int>(std::lround(cv * 100))) +
            "% across trials");
      }
    }
  }

  std::vector<double> xs, cross_y, online_y;
  for (const auto& row : report.rows) {
    xs.push_back(static_cast<double>(row.corpus_size));
    cross_y.push_back(row.cross_seconds);
    online_y.push_back(row.dense_online_seconds);
  }
  report.cross_slope = fitted_slope(xs, cross_y);
  report.dense_online_slope = fitted_slope(xs, online_y);
  // A non-positive online slope means search cost is lost in timer noise.
  report.slope_ratio =
      report.dense_online_slope > 0.0
          ? report.cross_slope / report.dense_online_slope
          : std::numeric_limits<double>::infinity();
  report.passes = report.cross_slope > 0.0 &&
                  report.slope_ratio > config.min_slope_ratio;
  return report;
}

nlohmann::json bench_report_json(const BenchReport& report,
                                 const BenchConfig& config) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"corpus_size", r.corpus_size},
                    {"cross_seconds", r.cross_seconds},
                    {"cross_cv", r.cross_cv},
                    {"dense_offline_seconds", r.dense_offline_seconds},
                    {"dense_online_seconds", r.dense_online_seconds},
                    {"dense_online_cv", r.dense_online_cv}});
  }
  const auto ratio = std::isfinite(report.slope_ratio)
                         ? nlohmann::json(report.slope_ratio)
                         : nlohmann::json("inf");
  return {{"rows", rows},
          {"cross_slope", report.cross_slope},
          {"dense_online_slope", report.dense_online_slope},
          {"slope_ratio", ratio},
          {"min_slope_ratio", config.min_slope_ratio},
          {"passes", report.passes},
          {"warnings", report.warnings},
          {"config",
           {{"corpus_sizes", config.corpus_sizes},
            {"trials", config.trials},
            {"queries", config.queries},
            {"hops", config.hops},
            {"passage_words", config.passage_words},
            {"k", config.k},
            {"seed", config.seed}}}};
}

}  // namespace hopscan
