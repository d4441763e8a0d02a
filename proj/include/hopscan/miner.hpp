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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hopscan/core.hpp"
#include "hopscan/engine.hpp"
#include "json.hpp"

namespace hopscan {

struct MiningConfig {
  std::size_t negatives_per_positive = 10;
  // Candidates whose cosine to the positive passage exceeds this are
  // treated as near-duplicates of it.
  double similarity_ceiling = 0.95;
  // Nearest candidates fetched before filtering.
  std::size_t pool_size = 100;

  // Throws InvalidArgument.
  void validate() const;
};

struct MinedNegatives {
  std::string instance_id;
  std::size_t hop_index = 0;
  // Hardest first: descending similarity to the hop's query chain.
  std::vector<std::string> negatives;
  std::optional<std::string> hardest;
  // Fewer survivors than requested. The list is never padded.
  bool insufficient = false;

  bool operator==(const MinedNegatives&) const = default;
};

// Mines hard negatives for gold hop `hop_index` (0-based) of `instance`.
// The query is the teacher-forced chain over the preceding gold passages.
// Candidates are dropped when they are gold passages of the instance, when
// they contain the hop's sub-answer (only if a decomposition exists), or
// when they are near-duplicates of the positive passage.
MinedNegatives mine_negatives(const MultiHopInstance& instance,
                              std::size_t hop_index, const Retriever& retriever,
                              const MiningConfig& config);

// Every (instance, hop) pair, instance-major.
std::vector<MinedNegatives> mine_all(std::span<const MultiHopInstance> instances,
                                     const Retriever& retriever,
                                     const MiningConfig& config,
                                     std::size_t workers = 1);

void to_json(nlohmann::json& j, const MinedNegatives& m);
void from_json(const nlohmann::json& j, MinedNegatives& m);

}  // namespace hopscan
