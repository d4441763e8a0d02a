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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hopscan/core.hpp"
#include "hopscan/engine.hpp"
#include "json.hpp"

namespace hopscan {

struct HopHits {
  std::size_t hop = 0;  // 1-based
  double hits = 0.0;
  std::size_t successes = 0;
  std::size_t denominator = 0;

  bool operator==(const HopHits&) const = default;
};

struct HitsTable {
  std::map<std::size_t, std::vector<HopHits>> per_k;
  // Micro average over (instance, hop) pairs; the canonical "Avg".
  std::map<std::size_t, double> avg_per_k;
  // Mean of the per-hop values over hops with a non-zero denominator.
  std::map<std::size_t, double> macro_per_k;
  std::size_t max_hop = 0;
  GoldOrder gold_order = GoldOrder::ordered;
};

// Per-hop Hits@k with sequential gating. Hop h of an instance succeeds at k
// iff a gold passage for that hop is in the top-k for the teacher-forced
// chain AND every earlier hop succeeded at k. The chain continues with the
// gold passage. Hop h's denominator counts every instance whose gold chain
// (truncated to max_hop) reaches h; failed predecessors count as failures.
// For unordered gold, any not-yet-credited gold passage satisfies a hop and
// becomes the continuation. max_hop == 0 means no truncation.
HitsTable evaluate_hits(std::span<const MultiHopInstance> instances,
                        const Retriever& retriever,
                        std::span<const std::size_t> ks, std::size_t max_hop = 0,
                        GoldOrder order = GoldOrder::ordered,
                        std::size_t workers = 1);

struct Diagnostics {
  std::size_t traces = 0;
  std::size_t early_stops = 0;
  std::size_t overshoots = 0;
  std::size_t exact_stops = 0;
  double avg_hops = 0.0;
  double avg_latency_per_hop = 0.0;
  // Mean latency of hop h (index h-1) over the traces that reached it.
  std::vector<double> latency_by_hop;
};

// Compares each trace's hop count with its instance's gold length.
// Throws UnknownInstanceId.
Diagnostics diagnose(std::span<const HopTrace> traces,
                     std::span<const MultiHopInstance> instances);

nlohmann::json hits_report(const HitsTable& table);
nlohmann::json diagnostics_report(const Diagnostics& d);

// Markdown with one row per labelled table; for every k the per-hop values
// (in percent) are followed by the average.
std::string render_hits_markdown(
    std::span<const std::pair<std::string, HitsTable>> rows);
std::string render_diagnostics_markdown(
    std::span<const std::pair<std::string, Diagnostics>> rows);

}  // namespace hopscan
