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

#include "hopscan/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "hopscan/error.hpp"
#include "hopscan/parallel.hpp"

namespace hopscan {

namespace {

// successes[k_idx] = number of leading hops that succeeded at ks[k_idx].
using PrefixLengths = std::vector<std::size_t>;

PrefixLengths ordered_prefixes(const MultiHopInstance& inst, std::size_t hops,
                               const Retriever& retriever,
                               std::span<const std::size_t> ks,
                               std::size_t k_max) {
  PrefixLengths reached(ks.size(), 0);
  std::vector<bool> alive(ks.size(), true);
  for (std::size_t h = 0; h < hops; ++h) {
    const Chain chain = gold_prefix_chain(inst, retriever.corpus(), h,
                                          retriever.options().instructions);
    const auto rank =
        retriever.retrieve_step(chain, k_max).rank_of(inst.gold_chain[h]);
    bool any = false;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (!alive[i]) continue;
      if (rank && *rank < ks[i]) {
        ++reached[i];
        any = true;
      } else {
        alive[i] = false;
      }
    }
    if (!any) break;
  }
  return reached;
}

std::size_t unordered_prefix(const MultiHopInstance& inst, std::size_t hops,
                             const Retriever& retriever, std::size_t k) {
  const auto& opts = retriever.options();
  Chain chain = make_chain(inst.query, inst.task_kind, opts.instructions);
  std::set<std::string> remaining(inst.gold_chain.begin(), inst.gold_chain.end());
  for (std::size_t h = 0; h < hops; ++h) {
    const SearchResult res = retriever.retrieve_step(chain, k);
    const auto hit = std::find_if(
        res.ranked.begin(), res.ranked.end(),
        [&](const ScoredPassage& s) { return remaining.contains(s.passage_id); });
    if (hit == res.ranked.end()) return h;
    remaining.erase(hit->passage_id);
    chain.steps.push_back({retriever.corpus().at(hit->passage_id),
                           ActionKind::eval_relevant, true});
  }
  return hops;
}

}  // namespace

HitsTable evaluate_hits(std::span<const MultiHopInstance> instances,
                        const Retriever& retriever,
                        std::span<const std::size_t> ks, std::size_t max_hop,
                        GoldOrder order, std::size_t workers) {
  if (ks.empty()) throw InvalidArgument("at least one k is required");
  for (std::size_t k : ks) {
    if (k == 0) throw InvalidArgument("k must be >= 1");
  }
  const std::size_t k_max = *std::max_element(ks.begin(), ks.end());
  const auto truncated = [&](const MultiHopInstance& inst) {
    return max_hop == 0 ? inst.hops() : std::min(inst.hops(), max_hop);
  };

  std::vector<PrefixLengths> reached(instances.size());
  parallel_for(instances.size(), workers, [&](std::size_t i) {
    const MultiHopInstance& inst = instances[i];
    validate_instance(inst, &retriever.corpus());
    const std::size_t hops = truncated(inst);
    if (order == GoldOrder::ordered) {
      reached[i] = ordered_prefixes(inst, hops, retriever, ks, k_max);
    } else {
      reached[i].resize(ks.size());
      for (std::size_t j = 0; j < ks.size(); ++j) {
        reached[i][j] = unordered_prefix(inst, hops, retriever, ks[j]);
      }
    }
  });

  HitsTable table;
  table.gold_order = order;
  std::size_t longest = 0;
  for (const auto& inst : instances) longest = std::max(longest, truncated(inst));
  table.max_hop = longest;

  std::vector<std::size_t> denominators(longest, 0);
  for (const auto& inst : instances) {
    for (std::size_t h = 0; h < truncated(inst); ++h) ++denominators[h];
  }
  std::size_t pairs = 0;
  for (std::size_t d : denominators) pairs += d;

  for (std::size_t j = 0; j < ks.size(); ++j) {
    const std::size_t k = ks[j];
    std::vector<HopHits> row(longest);
    for (std::size_t h = 0; h < longest; ++h) {
      row[h].hop = h + 1;
      row[h].denominator = denominators[h];
    }
    for (const auto& r : reached) {
      for (std::size_t h = 0; h < r[j]; ++h) ++row[h].successes;
    }
    std::size_t total = 0;
    double macro = 0.0;
    std::size_t macro_terms = 0;
    for (auto& cell : row) {
      cell.hits = cell.denominator == 0
                      ? 0.0
                      : static_cast<double>(cell.successes) /
                            static_cast<double>(cell.denominator);
      total += cell.successes;
      if (cell.denominator > 0) {
        macro += cell.hits;
        ++macro_terms;
      }
    }
    table.per_k[k] = std::move(row);
    table.avg_per_k[k] =
        pairs == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(pairs);
    table.macro_per_k[k] =
        macro_terms == 0 ? 0.0 : macro / static_cast<double>(macro_terms);
  }
  return table;
}

Diagnostics diagnose(std::span<const HopTrace> traces,
                     std::span<const MultiHopInstance> instances) {
  std::map<std::string_view, std::size_t> gold_length;
  for (const auto& inst : instances) gold_length[inst.id] = inst.hops();

  Diagnostics d;
  d.traces = traces.size();
  std::size_t total_hops = 0;
  double total_latency = 0.0;
  std::vector<double> latency_sum;
  std::vector<std::size_t> latency_count;
  for (const auto& t : traces) {
    const auto it = gold_length.find(t.instance_id);
    if (it == gold_length.end()) throw UnknownInstanceId(t.instance_id);
    const std::size_t n = t.hops.size();
    if (n < it->second) {
      ++d.early_stops;
    } else if (n > it->second) {
      ++d.overshoots;
    } else {
      ++d.exact_stops;
    }
    total_hops += n;
    if (latency_sum.size() < n) {
      latency_sum.resize(n, 0.0);
      latency_count.resize(n, 0);
    }
    for (std::size_t h = 0; h < n; ++h) {
      total_latency += t.hops[h].latency_seconds;
      latency_sum[h] += t.hops[h].latency_seconds;
      ++latency_count[h];
    }
  }
  if (!traces.empty()) {
    d.avg_hops =
        static_cast<double>(total_hops) / static_cast<double>(traces.size());
  }
  if (total_hops > 0) {
    d.avg_latency_per_hop = total_latency / static_cast<double>(total_hops);
  }
  for (std::size_t h = 0; h < latency_sum.size(); ++h) {
    d.latency_by_hop.push_back(latency_sum[h] /
                               static_cast<double>(latency_count[h]));
  }
  return d;
}

nlohmann::json hits_report(const HitsTable& table) {
  nlohmann::json hits = nlohmann::json::object();
  for (const auto& [k, row] : table.per_k) {
    nlohmann::json per_hop = nlohmann::json::array();
    for (const auto& c : row) {
      per_hop.push_back({{"hop", c.hop},
                         {"hits", c.hits},
                         {"successes", c.successes},
                         {"denominator", c.denominator}});
    }
    hits[std::to_string(k)] = {{"per_hop", per_hop},
                               {"avg_micro", table.avg_per_k.at(k)},
                               {"avg_macro", table.macro_per_k.at(k)}};
  }
  return {{"hits", hits},
          {"max_hop", table.max_hop},
          {"gold_order", std::string(to_string(table.gold_order))},
          {"conventions",
           {{"denominator",
             "instances whose gold length reaches the hop; failed "
             "predecessors count as failures"},
            {"average", "avg_micro over (instance, hop) pairs is canonical"},
            {"continuation", "teacher-forced with the gold passage"}}}};
}

nlohmann::json diagnostics_report(const Diagnostics& d) {
  return {{"traces", d.traces},
          {"early_stops", d.early_stops},
          {"overshoots", d.overshoots},
          {"exact_stops", d.exact_stops},
          {"avg_hops", d.avg_hops},
          {"avg_latency_per_hop", d.avg_latency_per_hop},
          {"latency_by_hop", d.latency_by_hop}};
}

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_hits_markdown(
    std::span<const std::pair<std::string, HitsTable>> rows) {
  std::set<std::size_t> ks;
  std::size_t hops = 0;
  for (const auto& [_, t] : rows) {
    for (const auto& [k, __] : t.per_k) ks.insert(k);
    hops = std::max(hops, t.max_hop);
  }
  std::string header = "| Model |";
  std::string rule = "|---|";
  for (std::size_t k : ks) {
    for (std::size_t h = 1; h <= hops; ++h) {
      header += " Hits@" + std::to_string(k) + " hop " + std::to_string(h) + " |";
      rule += "---:|";
    }
    header += " Hits@" + std::to_string(k) + " Avg |";
    rule += "---:|";
  }
  std::string out = header + "\n" + rule + "\n";
  for (const auto& [label, t] : rows) {
    out += "| " + label + " |";
    for (std::size_t k : ks) {
      const auto it = t.per_k.find(k);
      for (std::size_t h = 1; h <= hops; ++h) {
        if (it == t.per_k.end() || h > it->second.size() ||
            it->second[h - 1].denominator == 0) {
          out += " - |";
        } else {
          out += " " + fixed2(100.0 * it->second[h - 1].hits) + " |";
        }
      }
      out += it == t.per_k.end() ? " - |"
                                 : " " + fixed2(100.0 * t.avg_per_k.at(k)) + " |";
    }
    out += "\n";
  }
  return out;
}

std::string render_diagnostics_markdown(
    std::span<const std::pair<std::string, Diagnostics>> rows) {
  std::string out =
      "| Model | Early Stops | Overshoots | Avg. Hops | Avg. Latency / Hop (s) |\n"
      "|---|---:|---:|---:|---:|\n";
  for (const auto& [label, d] : rows) {
    out += "| " + label + " | " + std::to_string(d.early_stops) + " | " +
           std::to_string(d.overshoots) + " | " + fixed2(d.avg_hops) + " | " +
           fixed2(d.avg_latency_per_hop) + " |\n";
  }
  return out;
}

}  // namespace hopscan
