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

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hopscan/core.hpp"
#include "hopscan/embedding.hpp"
#include "hopscan/index.hpp"
#include "json.hpp"

namespace hopscan {

struct RetrievalOptions {
  Instructions instructions;
  // Render Eval / Retrieve next markers into the embedded chain text.
  bool include_actions = true;
  // Never return passages already accepted into the chain.
  bool exclude_retrieved = true;
};

// Binds a corpus, its index and an embedding provider. Holds references; the
// bound objects must outlive the retriever.
class Retriever {
 public:
  // Throws DimensionMismatch when provider and index dimensions differ.
  Retriever(const Corpus& corpus, const VectorIndex& index,
            const EmbeddingProvider& provider, RetrievalOptions options = {});

  // The chain is embedded as a query with its instruction line passed as
  // the request instruction and the remaining lines as text.
  EmbeddingRequest chain_request(const Chain& chain) const;
  Vector embed_chain(const Chain& chain) const;
  SearchResult retrieve_step(const Chain& chain, std::size_t k) const;

  const Corpus& corpus() const { return *corpus_; }
  const VectorIndex& index() const { return *index_; }
  const EmbeddingProvider& provider() const { return *provider_; }
  const RetrievalOptions& options() const { return options_; }

 private:
  const Corpus* corpus_;
  const VectorIndex* index_;
  const EmbeddingProvider* provider_;
  RetrievalOptions options_;
};

enum class StopRule { fixed_hops, score_decrease, control_provider, max_hops_cap };

std::string_view to_string(StopRule rule);
StopRule parse_stop_rule(std::string_view s);

// `max_hops` caps every rule; `hops` is the target for fixed_hops.
struct StopPolicy {
  StopRule rule = StopRule::max_hops_cap;
  std::size_t hops = 0;
  std::size_t max_hops = 10;

  static StopPolicy fixed(std::size_t n, std::size_t cap = 10) {
    return {StopRule::fixed_hops, n, cap};
  }
  static StopPolicy score_decrease(std::size_t cap = 10) {
    return {StopRule::score_decrease, 0, cap};
  }
  static StopPolicy control(std::size_t cap = 10) {
    return {StopRule::control_provider, 0, cap};
  }
  static StopPolicy cap(std::size_t n) { return {StopRule::max_hops_cap, 0, n}; }

  // Throws InvalidArgument.
  void validate() const;
};

struct ControlDecision {
  ActionKind eval = ActionKind::eval_relevant;
  ActionKind next = ActionKind::retrieve_next;
  std::optional<std::string> answer;  // present iff next == final_answer

  void validate() const;
  bool operator==(const ControlDecision&) const = default;
};

// Judges the newest step of a chain (whose eval is not yet set) and picks
// the next action.
class ControlProvider {
 public:
  virtual ~ControlProvider() = default;
  virtual ControlDecision decide(const Chain& chain) const = 0;
};

// Test double driven by gold labels: relevant iff the newest passage is the
// next gold passage; answers once every gold passage is accepted, stops after
// an irrelevant passage.
class OracleControl final : public ControlProvider {
 public:
  explicit OracleControl(MultiHopInstance instance);
  ControlDecision decide(const Chain& chain) const override;

 private:
  MultiHopInstance instance_;
};

std::unique_ptr<ControlProvider> oracle_control(const MultiHopInstance& instance);

struct RemoteControlConfig {
  std::string endpoint;
  std::chrono::milliseconds timeout{30000};
  int retries = 2;
  std::chrono::milliseconds backoff{250};
  std::size_t max_in_flight = 4;
};

// Sends the rendered chain to the service's /generate route and parses the
// returned action lines (see docs/embedding-protocol.md).
class RemoteControl final : public ControlProvider {
 public:
  explicit RemoteControl(RemoteControlConfig config);
  ~RemoteControl() override;
  ControlDecision decide(const Chain& chain) const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Parses "Eval: ...\n<Retrieve next|Stop|Final Answer: ...>".
// Throws ProviderUnavailable on anything else.
ControlDecision parse_control_reply(std::string_view reply);

enum class StopReason { policy_stop, control_stop, cap_reached, corpus_exhausted };

std::string_view to_string(StopReason reason);
StopReason parse_stop_reason(std::string_view s);

struct HopRecord {
  std::string chain_text_before;
  SearchResult ranked;
  std::string accepted;
  std::optional<ActionKind> eval;
  double latency_seconds = 0.0;

  bool operator==(const HopRecord&) const = default;
};

struct HopTrace {
  std::string instance_id;
  std::vector<HopRecord> hops;
  StopReason stop_reason = StopReason::policy_stop;
  std::optional<std::string> final_answer;
  // Top-1 score of a retrieval that was observed but not accepted
  // (score_decrease stops).
  std::optional<double> stop_probe_score;

  bool operator==(const HopTrace&) const = default;
};

struct ChainQuery {
  std::string instance_id;
  std::string query;
  TaskKind task_kind = TaskKind::question_answering;
};

// Runs the hop loop: retrieve, accept the top-1 passage, judge it, and stop
// per policy. Throws InvalidArgument when the control rule has no provider.
HopTrace run_chain(const Retriever& retriever, const ChainQuery& query,
                   const StopPolicy& policy, std::size_t k,
                   const ControlProvider* control = nullptr);

void to_json(nlohmann::json& j, const SearchResult& r);
void from_json(const nlohmann::json& j, SearchResult& r);
void to_json(nlohmann::json& j, const HopTrace& t);
void from_json(const nlohmann::json& j, HopTrace& t);

}  // namespace hopscan
