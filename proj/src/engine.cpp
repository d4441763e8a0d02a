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

#include "hopscan/engine.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "hopscan/error.hpp"
#include "hopscan/text.hpp"
#include "json_http.hpp"

namespace hopscan {

Retriever::Retriever(const Corpus& corpus, const VectorIndex& index,
                     const EmbeddingProvider& provider,
                     RetrievalOptions options)
    : corpus_(&corpus),
      index_(&index),
      provider_(&provider),
      options_(std::move(options)) {
  if (provider.dimension() != index.dimension()) {
    throw DimensionMismatch("provider dimension " +
                            std::to_string(provider.dimension()) +
                            " vs index dimension " +
                            std::to_string(index.dimension()));
  }
}

EmbeddingRequest Retriever::chain_request(const Chain& chain) const {
  std::string rendered = render_chain(chain, options_.include_actions);
  // Line 1 is the instruction; it travels in the request's own field.
  rendered.erase(0, rendered.find('\n') + 1);
  return {std::move(rendered), EmbeddingRole::query_chain,
          chain.instruction_query};
}

Vector Retriever::embed_chain(const Chain& chain) const {
  return provider_->embed(chain_request(chain));
}

SearchResult Retriever::retrieve_step(const Chain& chain, std::size_t k) const {
  const Vector q = embed_chain(chain);
  if (!options_.exclude_retrieved) return search(*index_, q.values, k);
  const auto exclude = chain.passage_ids();
  return search(*index_, q.values, k, exclude);
}

std::string_view to_string(StopRule rule) {
  switch (rule) {
    case StopRule::fixed_hops:
      return "fixed_hops";
    case StopRule::score_decrease:
      return "score_decrease";
    case StopRule::control_provider:
      return "control_provider";
    case StopRule::max_hops_cap:
      return "max_hops_cap";
  }
  return "max_hops_cap";
}

StopRule parse_stop_rule(std::string_view s) {
  for (StopRule r : {StopRule::fixed_hops, StopRule::score_decrease,
                     StopRule::control_provider, StopRule::max_hops_cap}) {
    if (to_string(r) == s) return r;
  }
  throw InvalidArgument("unknown stop rule '" + std::string(s) + "'");
}

void StopPolicy::validate() const {
  if (max_hops < 1) throw InvalidArgument("max hops must be >= 1");
  if (rule == StopRule::fixed_hops && hops < 1) {
    throw InvalidArgument("fixed_hops needs n >= 1");
  }
}

void ControlDecision::validate() const {
  if (eval != ActionKind::eval_relevant && eval != ActionKind::eval_irrelevant) {
    throw InvalidArgument("control eval must be an Eval action");
  }
  if (next != ActionKind::retrieve_next && next != ActionKind::final_answer &&
      next != ActionKind::stop) {
    throw InvalidArgument("control next must be retrieve/answer/stop");
  }
  if (answer.has_value() != (next == ActionKind::final_answer)) {
    throw InvalidArgument("answer must be present exactly for final_answer");
  }
}

OracleControl::OracleControl(MultiHopInstance instance)
    : instance_(std::move(instance)) {
  if (instance_.gold_chain.empty()) {
    throw InvalidArgument("oracle control needs a gold chain");
  }
}

ControlDecision OracleControl::decide(const Chain& chain) const {
  if (chain.steps.empty()) throw InvalidArgument("nothing to judge");
  std::size_t accepted = 0;
  for (std::size_t i = 0; i + 1 < chain.steps.size(); ++i) {
    if (chain.steps[i].eval == ActionKind::eval_relevant) ++accepted;
  }
  const auto& gold = instance_.gold_chain;
  const bool relevant =
      accepted < gold.size() && chain.steps.back().passage.id == gold[accepted];
  if (!relevant) return {ActionKind::eval_irrelevant, ActionKind::stop, {}};
  if (accepted + 1 == gold.size()) {
    return {ActionKind::eval_relevant, ActionKind::final_answer,
            instance_.answer};
  }
  return {ActionKind::eval_relevant, ActionKind::retrieve_next, {}};
}

std::unique_ptr<ControlProvider> oracle_control(
    const MultiHopInstance& instance) {
  return std::make_unique<OracleControl>(instance);
}

ControlDecision parse_control_reply(std::string_view reply) {
  std::vector<std::string_view> lines;
  for (auto line : text::split_lines(reply)) {
    line = text::trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  const auto fail = [&](const std::string& why) {
    return ProviderUnavailable("unparseable control reply (" + why + "): " +
                               std::string(reply));
  };
  if (lines.size() != 2) throw fail("expected two action lines");

  ControlDecision d;
  const auto eval = parse_action(lines[0]);
  if (!eval || (*eval != ActionKind::eval_relevant &&
                *eval != ActionKind::eval_irrelevant)) {
    throw fail("first line is not an Eval action");
  }
  d.eval = *eval;
  const std::string_view answer_marker =
      action_string(ActionKind::final_answer);
  if (lines[1].substr(0, answer_marker.size()) == answer_marker) {
    d.next = ActionKind::final_answer;
    d.answer = std::string(text::trim(lines[1].substr(answer_marker.size())));
    return d;
  }
  const auto next = parse_action(lines[1]);
  if (!next ||
      (*next != ActionKind::retrieve_next && *next != ActionKind::stop)) {
    throw fail("second line is not a control action");
  }
  d.next = *next;
  return d;
}

struct RemoteControl::Impl {
  detail::JsonHttpClient client;
};

RemoteControl::RemoteControl(RemoteControlConfig config)
    : impl_(std::make_unique<Impl>(Impl{detail::JsonHttpClient(
          config.endpoint, config.timeout, config.retries, config.backoff,
          config.max_in_flight)})) {}

RemoteControl::~RemoteControl() = default;

ControlDecision RemoteControl::decide(const Chain& chain) const {
  nlohmann::json body;
  body["text"] = render_chain(chain, true);
  const nlohmann::json reply = impl_->client.post("/generate", body);
  if (!reply.is_object() || !reply.contains("text") ||
      !reply["text"].is_string()) {
    throw ProviderUnavailable("generate response lacks a 'text' string");
  }
  return parse_control_reply(reply["text"].get<std::string>());
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::policy_stop:
      return "policy_stop";
    case StopReason::control_stop:
      return "control_stop";
    case StopReason::cap_reached:
      return "cap_reached";
    case StopReason::corpus_exhausted:
      return "corpus_exhausted";
  }
  return "policy_stop";
}

StopReason parse_stop_reason(std::string_view s) {
  for (StopReason r : {StopReason::policy_stop, StopReason::control_stop,
                       StopReason::cap_reached, StopReason::corpus_exhausted}) {
    if (to_string(r) == s) return r;
  }
  throw InvalidArgument("unknown stop reason '" + std::string(s) + "'");
}

HopTrace run_chain(const Retriever& retriever, const ChainQuery& query,
                   const StopPolicy& policy, std::size_t k,
                   const ControlProvider* control) {
  policy.validate();
  const bool controlled = policy.rule == StopRule::control_provider;
  if (controlled && control == nullptr) {
    throw InvalidArgument("control_provider policy needs a control provider");
  }
  using Clock = std::chrono::steady_clock;

  const auto& opts = retriever.options();
  Chain chain = make_chain(query.query, query.task_kind, opts.instructions);
  HopTrace trace;
  trace.instance_id = query.instance_id;
  double previous_top = -std::numeric_limits<double>::infinity();

  while (true) {
    const std::size_t done = chain.steps.size();
    if (policy.rule == StopRule::fixed_hops && done >= policy.hops &&
        policy.hops <= policy.max_hops) {
      trace.stop_reason = StopReason::policy_stop;
      break;
    }
    if (done >= policy.max_hops) {
      trace.stop_reason = StopReason::cap_reached;
      break;
    }
    if (!controlled && done > 0) chain.steps.back().retrieve_next = true;

    const auto start = Clock::now();
    HopRecord hop;
    hop.chain_text_before = render_chain(chain, opts.include_actions);
    hop.ranked = retriever.retrieve_step(chain, k);
    if (hop.ranked.empty()) {
      trace.stop_reason = StopReason::corpus_exhausted;
      break;
    }
    const ScoredPassage& top = hop.ranked.top();
    if (policy.rule == StopRule::score_decrease && done > 0 &&
        top.score < previous_top) {
      trace.stop_probe_score = top.score;
      trace.stop_reason = StopReason::policy_stop;
      break;
    }
    previous_top = top.score;
    hop.accepted = top.passage_id;
    chain.steps.push_back({retriever.corpus().at(top.passage_id), {}, false});

    std::optional<ControlDecision> decision;
    if (controlled) {
      decision = control->decide(chain);
      decision->validate();
      chain.steps.back().eval = decision->eval;
    } else {
      chain.steps.back().eval = ActionKind::eval_relevant;
    }
    hop.eval = chain.steps.back().eval;
    hop.latency_seconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    trace.hops.push_back(std::move(hop));

    if (!decision) continue;
    if (decision->next == ActionKind::retrieve_next) {
      chain.steps.back().retrieve_next = true;
      continue;
    }
    if (decision->next == ActionKind::final_answer) {
      chain.pending_answer = decision->answer;
      trace.final_answer = decision->answer;
    }
    trace.stop_reason = StopReason::control_stop;
    break;
  }
  return trace;
}

void to_json(nlohmann::json& j, const SearchResult& r) {
  j = nlohmann::json::array();
  for (const auto& s : r.ranked) {
    j.push_back({{"passage_id", s.passage_id}, {"score", s.score}});
  }
}

void from_json(const nlohmann::json& j, SearchResult& r) {
  r.ranked.clear();
  for (const auto& e : j) {
    r.ranked.push_back(
        {e.at("passage_id").get<std::string>(), e.at("score").get<double>()});
  }
}

void to_json(nlohmann::json& j, const HopTrace& t) {
  nlohmann::json hops = nlohmann::json::array();
  for (const auto& h : t.hops) {
    nlohmann::json hj;
    hj["chain_text_before"] = h.chain_text_before;
    hj["ranked"] = h.ranked;
    hj["accepted"] = h.accepted;
    hj["eval"] = h.eval ? nlohmann::json(std::string(action_string(*h.eval)))
                        : nlohmann::json(nullptr);
    hj["latency_seconds"] = h.latency_seconds;
    hops.push_back(std::move(hj));
  }
  j = nlohmann::json::object();
  j["instance_id"] = t.instance_id;
  j["hops"] = std::move(hops);
  j["stop_reason"] = std::string(to_string(t.stop_reason));
  j["final_answer"] =
      t.final_answer ? nlohmann::json(*t.final_answer) : nlohmann::json(nullptr);
  j["stop_probe_score"] = t.stop_probe_score
                              ? nlohmann::json(*t.stop_probe_score)
                              : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, HopTrace& t) {
  t = HopTrace{};
  t.instance_id = j.at("instance_id").get<std::string>();
  for (const auto& hj : j.at("hops")) {
    HopRecord h;
    h.chain_text_before = hj.at("chain_text_before").get<std::string>();
    h.ranked = hj.at("ranked").get<SearchResult>();
    h.accepted = hj.at("accepted").get<std::string>();
    if (hj.contains("eval") && !hj["eval"].is_null()) {
      const auto eval = parse_action(hj["eval"].get<std::string>());
      if (!eval) throw InvalidArgument("trace hop has an unknown eval");
      h.eval = *eval;
    }
    h.latency_seconds = hj.at("latency_seconds").get<double>();
    t.hops.push_back(std::move(h));
  }
  t.stop_reason = parse_stop_reason(j.at("stop_reason").get<std::string>());
  if (j.contains("final_answer") && !j["final_answer"].is_null()) {
    t.final_answer = j["final_answer"].get<std::string>();
  }
  if (j.contains("stop_probe_score") && !j["stop_probe_score"].is_null()) {
    t.stop_probe_score = j["stop_probe_score"].get<double>();
  }
}

}  // namespace hopscan
