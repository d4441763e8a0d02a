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

#include "hopscan/databuilder.hpp"

#include <fstream>
#include <map>
#include <random>

#include "hopscan/error.hpp"
#include "hopscan/parallel.hpp"
#include "hopscan/text.hpp"

namespace hopscan {

std::string_view to_string(GenerativeLabel label) {
  return label == GenerativeLabel::causal_negative ? "causal_negative"
                                                    : "positive_with_answer";
}

std::uint64_t instance_seed(std::uint64_t seed, std::string_view instance_id) {
  return text::fnv1a64(instance_id,
                       0xcbf29ce484222325ULL ^ (seed * 0x9e3779b97f4a7c15ULL));
}

InstanceSamples build_samples(const MultiHopInstance& instance,
                              const Retriever& retriever,
                              const MiningConfig& mining,
                              std::uint64_t rng_seed) {
  validate_instance(instance, &retriever.corpus());
  const Corpus& corpus = retriever.corpus();
  const auto& opts = retriever.options();

  InstanceSamples out;
  out.instance_id = instance.id;
  out.gold_length = instance.hops();
  std::vector<std::string> causal_negatives;

  for (std::size_t h = 0; h < instance.hops(); ++h) {
    const Chain prompt =
        gold_prefix_chain(instance, corpus, h, opts.instructions);
    const MinedNegatives mined = mine_negatives(instance, h, retriever, mining);

    ContrastiveSample c;
    c.instance_id = instance.id;
    c.hop_index = h;
    c.prompt_text = render_chain(prompt, opts.include_actions);
    c.positive = instance.gold_chain[h];
    c.negatives = mined.negatives;
    c.insufficient_negatives = mined.insufficient;
    out.insufficient_negatives |= mined.insufficient;
    out.contrastive.push_back(std::move(c));

    if (mined.hardest) {
      Chain negative = prompt;
      negative.steps.push_back(
          {corpus.at(*mined.hardest), ActionKind::eval_irrelevant, false});
      causal_negatives.push_back(render_chain(negative, true));
    }
  }

  Chain positive =
      gold_prefix_chain(instance, corpus, instance.hops(), opts.instructions);
  positive.steps.back().retrieve_next = false;
  positive.pending_answer = instance.answer;
  out.generative.push_back({instance.id, render_chain(positive, true),
                            GenerativeLabel::positive_with_answer});

  if (!causal_negatives.empty()) {
    std::mt19937_64 rng(rng_seed);
    const std::size_t pick = rng() % causal_negatives.size();
    out.generative.push_back({instance.id, std::move(causal_negatives[pick]),
                              GenerativeLabel::causal_negative});
  }
  return out;
}

std::vector<InstanceSamples> build_all(std::span<const MultiHopInstance> instances,
                                       const Retriever& retriever,
                                       const MiningConfig& mining,
                                       std::uint64_t seed, std::size_t workers) {
  std::vector<InstanceSamples> out(instances.size());
  parallel_for(instances.size(), workers, [&](std::size_t i) {
    out[i] = build_samples(instances[i], retriever, mining,
                           instance_seed(seed, instances[i].id));
  });
  return out;
}

nlohmann::json training_stats(std::span<const InstanceSamples> samples,
                              std::uint64_t seed) {
  std::size_t max_hops = 4;
  for (const auto& s : samples) max_hops = std::max(max_hops, s.gold_length);
  std::map<std::size_t, std::size_t> per_depth;
  std::map<std::size_t, std::size_t> contrastive_per_hop;
  for (std::size_t h = 1; h <= max_hops; ++h) {
    per_depth[h] = 0;
    contrastive_per_hop[h] = 0;
  }
  std::size_t contrastive = 0, positives = 0, negatives = 0, short_lists = 0;
  for (const auto& s : samples) {
    ++per_depth[s.gold_length];
    for (const auto& c : s.contrastive) {
      ++contrastive_per_hop[c.hop_index + 1];
      ++contrastive;
      if (c.insufficient_negatives) ++short_lists;
    }
    for (const auto& g : s.generative) {
      (g.label_kind == GenerativeLabel::causal_negative ? negatives : positives)++;
    }
  }
  nlohmann::json per_depth_json = nlohmann::json::object();
  for (auto [h, n] : per_depth) per_depth_json[std::to_string(h)] = n;
  nlohmann::json per_hop_json = nlohmann::json::object();
  for (auto [h, n] : contrastive_per_hop) per_hop_json[std::to_string(h)] = n;

  return {{"total_instances", samples.size()},
          {"instances_per_hop_depth", per_depth_json},
          {"contrastive_samples", contrastive},
          {"contrastive_per_hop", per_hop_json},
          {"generative_samples",
           {{"positive_with_answer", positives}, {"causal_negative", negatives}}},
          {"insufficient_negative_lists", short_lists},
          {"seed", seed}};
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + p.string() + " for writing");
  return out;
}

}  // namespace

void export_training_files(std::span<const InstanceSamples> samples,
                           const std::filesystem::path& dir, std::uint64_t seed,
                           const nlohmann::json& metadata) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  auto contrastive = open_out(dir / "contrastive.jsonl");
  auto generative = open_out(dir / "generative.jsonl");
  for (const auto& s : samples) {
    for (const auto& c : s.contrastive) {
      const nlohmann::json j{{"instance_id", c.instance_id},
                             {"hop_index", c.hop_index},
                             {"prompt", c.prompt_text},
                             {"positive", c.positive},
                             {"negatives", c.negatives},
                             {"insufficient_negatives", c.insufficient_negatives}};
      contrastive << j.dump() << '\n';
    }
    for (const auto& g : s.generative) {
      const nlohmann::json j{{"instance_id", g.instance_id},
                             {"label", std::string(to_string(g.label_kind))},
                             {"text", g.text}};
      generative << j.dump() << '\n';
    }
  }
  nlohmann::json stats = training_stats(samples, seed);
  stats["metadata"] = metadata;
  auto stats_out = open_out(dir / "stats.json");
  stats_out << stats.dump(2) << '\n';
  if (!contrastive || !generative || !stats_out) {
    throw IoError("write failed under " + dir.string());
  }
}

}  // namespace hopscan
