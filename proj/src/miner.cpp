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

#include "hopscan/miner.hpp"

#include <algorithm>

#include "hopscan/error.hpp"
#include "hopscan/parallel.hpp"
#include "hopscan/text.hpp"

namespace hopscan {

void MiningConfig::validate() const {
  if (negatives_per_positive < 1 || negatives_per_positive > pool_size) {
    throw InvalidArgument("need 1 <= negatives_per_positive <= pool_size");
  }
  if (!(similarity_ceiling > 0.0 && similarity_ceiling <= 1.0)) {
    throw InvalidArgument("similarity_ceiling must be in (0, 1]");
  }
}

MinedNegatives mine_negatives(const MultiHopInstance& instance,
                              std::size_t hop_index, const Retriever& retriever,
                              const MiningConfig& config) {
  config.validate();
  if (hop_index >= instance.gold_chain.size()) {
    throw InvalidArgument("hop index " + std::to_string(hop_index) +
                          " out of range for '" + instance.id + "'");
  }
  const VectorIndex& index = retriever.index();
  const Corpus& corpus = retriever.corpus();
  const std::string& positive_id = instance.gold_chain[hop_index];
  const auto positive_row = index.row_of(positive_id);
  if (!positive_row) throw UnknownPassageId(positive_id);
  const auto positive = index.vector(*positive_row);

  const Chain chain = gold_prefix_chain(instance, corpus, hop_index,
                                        retriever.options().instructions);
  const Vector query = retriever.embed_chain(chain);
  const SearchResult pool = search(index, query.values, config.pool_size);

  const std::string* sub_answer = nullptr;
  if (instance.decomposition) {
    sub_answer = &instance.decomposition->at(hop_index).sub_answer;
  }

  MinedNegatives out;
  out.instance_id = instance.id;
  out.hop_index = hop_index;
  for (const auto& cand : pool.ranked) {
    if (out.negatives.size() == config.negatives_per_positive) break;
    const auto& gold = instance.gold_chain;
    if (std::find(gold.begin(), gold.end(), cand.passage_id) != gold.end()) {
      continue;
    }
    if (sub_answer != nullptr &&
        text::contains_normalized(document_text(corpus.at(cand.passage_id)),
                                  *sub_answer)) {
      continue;
    }
    const auto row = index.row_of(cand.passage_id);
    if (dot(index.vector(*row), positive) > config.similarity_ceiling) continue;
    out.negatives.push_back(cand.passage_id);
  }
  if (!out.negatives.empty()) out.hardest = out.negatives.front();
  out.insufficient = out.negatives.size() < config.negatives_per_positive;
  return out;
}

std::vector<MinedNegatives> mine_all(std::span<const MultiHopInstance> instances,
                                     const Retriever& retriever,
                                     const MiningConfig& config,
                                     std::size_t workers) {
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (std::size_t h = 0; h < instances[i].hops(); ++h) jobs.emplace_back(i, h);
  }
  std::vector<MinedNegatives> out(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    out[j] = mine_negatives(instances[jobs[j].first], jobs[j].second, retriever,
                            config);
  });
  return out;
}

void to_json(nlohmann::json& j, const MinedNegatives& m) {
  j = nlohmann::json{{"instance_id", m.instance_id},
                     {"hop_index", m.hop_index},
                     {"negatives", m.negatives},
                     {"hardest", m.hardest ? nlohmann::json(*m.hardest)
                                           : nlohmann::json(nullptr)},
                     {"insufficient", m.insufficient}};
}

void from_json(const nlohmann::json& j, MinedNegatives& m) {
  m.instance_id = j.at("instance_id").get<std::string>();
  m.hop_index = j.at("hop_index").get<std::size_t>();
  m.negatives = j.at("negatives").get<std::vector<std::string>>();
  m.hardest.reset();
  if (!j.at("hardest").is_null()) m.hardest = j["hardest"].get<std::string>();
  m.insufficient = j.at("insufficient").get<bool>();
}

}  // namespace hopscan
