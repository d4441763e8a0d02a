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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hopscan/core.hpp"
#include "hopscan/engine.hpp"
#include "hopscan/miner.hpp"
#include "json.hpp"

namespace hopscan {

struct ContrastiveSample {
  std::string instance_id;
  std::size_t hop_index = 0;
  std::string prompt_text;
  std::string positive;
  std::vector<std::string> negatives;
  bool insufficient_negatives = false;

  bool operator==(const ContrastiveSample&) const = default;
};

enum class GenerativeLabel { positive_with_answer, causal_negative };

std::string_view to_string(GenerativeLabel label);

struct GenerativeSample {
  std::string instance_id;
  std::string text;
  GenerativeLabel label_kind = GenerativeLabel::positive_with_answer;

  bool operator==(const GenerativeSample&) const = default;
};

struct InstanceSamples {
  std::string instance_id;
  std::size_t gold_length = 0;
  std::vector<ContrastiveSample> contrastive;
  std::vector<GenerativeSample> generative;
  bool insufficient_negatives = false;

  bool operator==(const InstanceSamples&) const = default;
};

// Training samples for one instance. Per gold hop: a contrastive sample whose
// prompt is the gold chain so far, and a causal-negative candidate (chain so
// far + hardest mined negative marked irrelevant). Then the full gold chain
// ending in the final answer, plus one causal negative drawn uniformly with
// `rng_seed`. Prompts are rendered with actions iff the retriever embeds
// them; generative texts always carry actions.
InstanceSamples build_samples(const MultiHopInstance& instance,
                              const Retriever& retriever,
                              const MiningConfig& mining,
                              std::uint64_t rng_seed);

// Per-instance seed so results do not depend on processing order.
std::uint64_t instance_seed(std::uint64_t seed, std::string_view instance_id);

std::vector<InstanceSamples> build_all(std::span<const MultiHopInstance> instances,
                                       const Retriever& retriever,
                                       const MiningConfig& mining,
                                       std::uint64_t seed,
                                       std::size_t workers = 1);

// Counts per gold hop depth, shaped like a per-hop dataset statistics table.
nlohmann::json training_stats(std::span<const InstanceSamples> samples,
                               std::uint64_t seed);

// Writes contrastive.jsonl, generative.jsonl and stats.json into `dir`.
// `metadata` is embedded in stats.json. Throws IoError.
void export_training_files(std::span<const InstanceSamples> samples,
                           const std::filesystem::path& dir,
                           std::uint64_t seed,
                           const nlohmann::json& metadata = nlohmann::json::object());

}  // namespace hopscan
