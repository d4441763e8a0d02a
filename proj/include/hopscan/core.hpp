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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hopscan {

enum class TaskKind { question_answering, fact_checking };

std::string_view to_string(TaskKind kind);
// Accepts "question_answering" / "fact_checking"; throws InvalidArgument.
TaskKind parse_task_kind(std::string_view s);

// Whether a dataset's gold evidence has a meaningful hop order.
enum class GoldOrder { ordered, unordered };

std::string_view to_string(GoldOrder order);
GoldOrder parse_gold_order(std::string_view s);

inline constexpr std::string_view kSupported = "SUPPORTED";
inline constexpr std::string_view kRefuted = "REFUTED";

struct Passage {
  std::string id;
  std::string title;  // may be empty
  std::string text;

  bool operator==(const Passage&) const = default;
};

// Stable identity for a passage derived from its content only.
std::string content_passage_id(std::string_view title, std::string_view text);

// An immutable set of passages with unique ids.
class Corpus {
 public:
  Corpus() = default;
  // Throws DuplicatePassageId or EmptyText (blank passage text).
  explicit Corpus(std::vector<Passage> passages);

  const Passage* find(std::string_view id) const;
  // Throws UnknownPassageId.
  const Passage& at(std::string_view id) const;
  // First passage whose title and text match exactly.
  const Passage* find_by_content(std::string_view title,
                                 std::string_view text) const;

  std::span<const Passage> passages() const { return passages_; }
  std::size_t size() const { return passages_.size(); }
  bool empty() const { return passages_.empty(); }

 private:
  std::vector<Passage> passages_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
  std::map<std::string, std::size_t, std::less<>> by_content_;
};

struct SubStep {
  std::string sub_question;
  std::string sub_answer;

  bool operator==(const SubStep&) const = default;
};

struct MultiHopInstance {
  std::string id;
  TaskKind task_kind = TaskKind::question_answering;
  std::string query;
  std::vector<std::string> gold_chain;
  std::optional<std::vector<SubStep>> decomposition;
  std::string answer;

  std::size_t hops() const { return gold_chain.size(); }
  bool operator==(const MultiHopInstance&) const = default;
};

// Structural checks; when corpus is given, also checks every gold id
// resolves (DanglingGoldReference). Other violations throw InvalidArgument.
void validate_instance(const MultiHopInstance& instance,
                       const Corpus* corpus = nullptr);

// ReAct action vocabulary.
enum class ActionKind {
  eval_relevant,
  eval_irrelevant,
  retrieve_next,
  final_answer,
  stop,
};

inline constexpr ActionKind kAllActions[] = {
    ActionKind::eval_relevant, ActionKind::eval_irrelevant,
    ActionKind::retrieve_next, ActionKind::final_answer, ActionKind::stop};

// Canonical surface strings; parse_action is the exact inverse.
std::string_view action_string(ActionKind kind);
std::optional<ActionKind> parse_action(std::string_view s);

// Instruction prefixes for the query-chain side (per task kind) and the
// document side.
struct Instructions {
  std::string question =
      "Given a multi-hop question, retrieve the next passage needed to answer it";
  std::string claim =
      "Given a claim, retrieve the next passage that supports or refutes it";
  std::string document = "Represent the passage for multi-hop retrieval";

  const std::string& query_for(TaskKind kind) const {
    return kind == TaskKind::fact_checking ? claim : question;
  }
  bool operator==(const Instructions&) const = default;
};

inline constexpr std::string_view kDocumentMarker = "Document:";
inline constexpr std::string_view kQuestionMarker = "Question:";
inline constexpr std::string_view kClaimMarker = "Claim:";

struct ChainStep {
  Passage passage;
  std::optional<ActionKind> eval;  // eval_relevant or eval_irrelevant
  bool retrieve_next = false;

  bool operator==(const ChainStep&) const = default;
};

// The evolving retrieval state: instruction, query and accepted passages
// with their action markers.
struct Chain {
  std::string instruction_query;
  TaskKind task_kind = TaskKind::question_answering;
  std::string query;
  std::vector<ChainStep> steps;
  std::optional<std::string> pending_answer;

  std::vector<std::string> passage_ids() const;
  bool operator==(const Chain&) const = default;
};

// Zero-step chain for a query.
Chain make_chain(std::string query, TaskKind task_kind,
                 const Instructions& instructions);

// Teacher-forced chain over the first `hops` gold passages, each marked
// relevant and followed by retrieve_next. Throws UnknownPassageId.
Chain gold_prefix_chain(const MultiHopInstance& instance, const Corpus& corpus,
                        std::size_t hops, const Instructions& instructions);

// Throws InvalidChain when the chain cannot be rendered unambiguously.
void validate_chain(const Chain& chain);

// Canonical chain text. With include_actions=false only the instruction,
// query line and document blocks are emitted.
std::string render_chain(const Chain& chain, bool include_actions);

// Maps a parsed document block back to a passage id.
using PassageResolver =
    std::function<std::string(std::string_view title, std::string_view text)>;

// Throws MalformedChain. Without a resolver, ids are content_passage_id.
Chain parse_chain(std::string_view text, const PassageResolver& resolve = {});
// Resolves blocks against the corpus; unknown blocks throw MalformedChain.
Chain parse_chain(std::string_view text, const Corpus& corpus);

}  // namespace hopscan
