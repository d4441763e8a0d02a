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

#include "hopscan/core.hpp"

#include <algorithm>
#include <set>

#include "hopscan/error.hpp"
#include "hopscan/text.hpp"

namespace hopscan {

namespace {

constexpr std::string_view kTitleSeparator = " | ";
constexpr std::string_view kDocumentPrefix = "Document: ";
constexpr std::string_view kFinalAnswerPrefix = "Final Answer: ";
constexpr std::string_view kEvalPrefix = "Eval:";

bool starts_with(std::string_view s, std::string_view p) {
  return s.substr(0, p.size()) == p;
}

std::string content_key(std::string_view title, std::string_view text) {
  std::string key(title);
  key.push_back('\x1f');
  key.append(text);
  return key;
}

std::string_view query_marker(TaskKind kind) {
  return kind == TaskKind::fact_checking ? kClaimMarker : kQuestionMarker;
}

std::string_view first_line(std::string_view s) {
  return s.substr(0, s.find('\n'));
}

}  // namespace

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::question_answering:
      return "question_answering";
    case TaskKind::fact_checking:
      return "fact_checking";
  }
  return "question_answering";
}

TaskKind parse_task_kind(std::string_view s) {
  if (s == "question_answering") return TaskKind::question_answering;
  if (s == "fact_checking") return TaskKind::fact_checking;
  throw InvalidArgument("unknown task kind '" + std::string(s) + "'");
}

std::string_view to_string(GoldOrder order) {
  return order == GoldOrder::unordered ? "unordered" : "ordered";
}

GoldOrder parse_gold_order(std::string_view s) {
  if (s == "ordered") return GoldOrder::ordered;
  if (s == "unordered") return GoldOrder::unordered;
  throw InvalidArgument("unknown gold order '" + std::string(s) + "'");
}

std::string content_passage_id(std::string_view title, std::string_view text) {
  return "h:" + text::hex64(text::fnv1a64(content_key(title, text)));
}

Corpus::Corpus(std::vector<Passage> passages) : passages_(std::move(passages)) {
  for (std::size_t i = 0; i < passages_.size(); ++i) {
    const Passage& p = passages_[i];
    if (text::trim(p.text).empty()) {
      throw EmptyText("passage '" + p.id + "' has blank text");
    }
    if (!by_id_.emplace(p.id, i).second) {
      throw DuplicatePassageId(p.id);
    }
    by_content_.emplace(content_key(p.title, p.text), i);
  }
}

const Passage* Corpus::find(std::string_view id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &passages_[it->second];
}

const Passage& Corpus::at(std::string_view id) const {
  const Passage* p = find(id);
  if (p == nullptr) throw UnknownPassageId(std::string(id));
  return *p;
}

const Passage* Corpus::find_by_content(std::string_view title,
                                       std::string_view text) const {
  auto it = by_content_.find(content_key(title, text));
  return it == by_content_.end() ? nullptr : &passages_[it->second];
}

void validate_instance(const MultiHopInstance& instance, const Corpus* corpus) {
  const std::string& id = instance.id;
  if (id.empty()) throw InvalidArgument("instance id is empty");
  if (instance.gold_chain.empty()) {
    throw InvalidArgument("instance '" + id + "' has an empty gold chain");
  }
  std::set<std::string_view> seen;
  for (const auto& gid : instance.gold_chain) {
    if (!seen.insert(gid).second) {
      throw InvalidArgument("instance '" + id + "' repeats gold id '" + gid +
                            "'");
    }
    if (corpus != nullptr && corpus->find(gid) == nullptr) {
      throw DanglingGoldReference("instance '" + id + "' references '" + gid +
                                  "'");
    }
  }
  if (instance.decomposition &&
      instance.decomposition->size() != instance.gold_chain.size()) {
    throw InvalidArgument("instance '" + id +
                          "' decomposition length differs from gold chain");
  }
  if (instance.task_kind == TaskKind::fact_checking &&
      instance.answer != kSupported && instance.answer != kRefuted) {
    throw InvalidArgument("instance '" + id + "' verdict must be " +
                          std::string(kSupported) + " or " +
                          std::string(kRefuted));
  }
}

std::string_view action_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::eval_relevant:
      return "Eval: Relevant";
    case ActionKind::eval_irrelevant:
      return "Eval: Irrelevant";
    case ActionKind::retrieve_next:
      return "Retrieve next";
    case ActionKind::final_answer:
      return "Final Answer:";
    case ActionKind::stop:
      return "Stop";
  }
  return "Stop";
}

std::optional<ActionKind> parse_action(std::string_view s) {
  for (ActionKind kind : kAllActions) {
    if (action_string(kind) == s) return kind;
  }
  return std::nullopt;
}

std::vector<std::string> Chain::passage_ids() const {
  std::vector<std::string> ids;
  ids.reserve(steps.size());
  for (const auto& step : steps) ids.push_back(step.passage.id);
  return ids;
}

Chain make_chain(std::string query, TaskKind task_kind,
                 const Instructions& instructions) {
  Chain chain;
  chain.instruction_query = instructions.query_for(task_kind);
  chain.task_kind = task_kind;
  chain.query = std::move(query);
  return chain;
}

Chain gold_prefix_chain(const MultiHopInstance& instance, const Corpus& corpus,
                        std::size_t hops, const Instructions& instructions) {
  Chain chain = make_chain(instance.query, instance.task_kind, instructions);
  hops = std::min(hops, instance.gold_chain.size());
  for (std::size_t h = 0; h < hops; ++h) {
    chain.steps.push_back(
        {corpus.at(instance.gold_chain[h]), ActionKind::eval_relevant, true});
  }
  return chain;
}

void validate_chain(const Chain& chain) {
  if (chain.instruction_query.find('\n') != std::string::npos) {
    throw InvalidChain("instruction spans multiple lines");
  }
  if (chain.query.find('\n') != std::string::npos) {
    throw InvalidChain("query spans multiple lines");
  }
  if (chain.pending_answer &&
      chain.pending_answer->find('\n') != std::string::npos) {
    throw InvalidChain("answer spans multiple lines");
  }
  std::set<std::string_view> ids;
  for (const auto& step : chain.steps) {
    const Passage& p = step.passage;
    if (!ids.insert(p.id).second) {
      throw InvalidChain("passage '" + p.id + "' appears twice");
    }
    if (p.title.find('\n') != std::string::npos ||
        (p.title + std::string(kTitleSeparator)).find(kTitleSeparator) !=
            p.title.size()) {
      throw InvalidChain("title of '" + p.id + "' is not a single field");
    }
    if (text::trim(p.text).empty()) {
      throw InvalidChain("passage '" + p.id + "' has blank text");
    }
    const auto lines = text::split_lines(p.text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::string_view line = lines[i];
      if (i > 0 && (starts_with(line, kEvalPrefix) ||
                    line == action_string(ActionKind::retrieve_next) ||
                    starts_with(line, action_string(ActionKind::final_answer)))) {
        throw InvalidChain("passage '" + p.id + "' contains a marker line");
      }
      if (i > 0 && line.empty() && i + 1 < lines.size() &&
          starts_with(lines[i + 1], kDocumentPrefix)) {
        throw InvalidChain("passage '" + p.id +
                           "' contains a document block boundary");
      }
    }
    if (step.eval && *step.eval != ActionKind::eval_relevant &&
        *step.eval != ActionKind::eval_irrelevant) {
      throw InvalidChain("step eval must be an Eval action");
    }
  }
  if (chain.pending_answer && !chain.steps.empty() &&
      chain.steps.back().retrieve_next) {
    throw InvalidChain("final answer directly after retrieve next");
  }
}

std::string render_chain(const Chain& chain, bool include_actions) {
  std::string out = chain.instruction_query;
  out += '\n';
  out += query_marker(chain.task_kind);
  out += ' ';
  out += chain.query;
  for (const auto& step : chain.steps) {
    const Passage& p = step.passage;
    out += "\n\n";
    out += kDocumentPrefix;
    if (!p.title.empty() ||
        first_line(p.text).find(kTitleSeparator) != std::string_view::npos) {
      out += p.title;
      out += kTitleSeparator;
    }
    out += p.text;
    if (!include_actions) continue;
    if (step.eval) {
      out += '\n';
      out += action_string(*step.eval);
    }
    if (step.retrieve_next) {
      out += '\n';
      out += action_string(ActionKind::retrieve_next);
    }
  }
  if (include_actions && chain.pending_answer) {
    out += '\n';
    out += kFinalAnswerPrefix;
    out += *chain.pending_answer;
  }
  return out;
}

namespace {

enum class BlockState { text, after_eval, after_retrieve };

}  // namespace

Chain parse_chain(std::string_view input, const PassageResolver& resolve) {
  const auto lines = text::split_lines(input);
  if (lines.size() < 2) throw MalformedChain("missing query line");

  Chain chain;
  chain.instruction_query = std::string(lines[0]);
  const std::string_view qline = lines[1];
  const std::string q_prefix = std::string(kQuestionMarker) + " ";
  const std::string c_prefix = std::string(kClaimMarker) + " ";
  if (starts_with(qline, q_prefix)) {
    chain.task_kind = TaskKind::question_answering;
    chain.query = std::string(qline.substr(q_prefix.size()));
  } else if (starts_with(qline, c_prefix)) {
    chain.task_kind = TaskKind::fact_checking;
    chain.query = std::string(qline.substr(c_prefix.size()));
  } else {
    throw MalformedChain("line 2 is neither a question nor a claim");
  }

  const auto is_boundary = [&](std::size_t i) {
    return lines[i].empty() && i + 1 < lines.size() &&
           starts_with(lines[i + 1], kDocumentPrefix);
  };
  const auto resolve_id = [&](const Passage& p) {
    return resolve ? resolve(p.title, p.text)
                   : content_passage_id(p.title, p.text);
  };

  std::optional<ChainStep> current;
  std::string body;
  BlockState state = BlockState::text;

  const auto close_block = [&] {
    if (!current) return;
    const std::string_view content = body;
    const std::string_view head = first_line(content);
    const std::size_t sep = head.find(kTitleSeparator);
    if (sep != std::string_view::npos) {
      current->passage.title = std::string(content.substr(0, sep));
      current->passage.text =
          std::string(content.substr(sep + kTitleSeparator.size()));
    } else {
      current->passage.text = std::string(content);
    }
    if (text::trim(current->passage.text).empty()) {
      throw MalformedChain("truncated document block");
    }
    current->passage.id = resolve_id(current->passage);
    chain.steps.push_back(std::move(*current));
    current.reset();
  };

  std::size_t i = 2;
  while (i < lines.size()) {
    const std::string_view line = lines[i];
    if (is_boundary(i)) {
      close_block();
      current.emplace();
      body = std::string(lines[i + 1].substr(kDocumentPrefix.size()));
      state = BlockState::text;
      i += 2;
      continue;
    }
    if (starts_with(line, kFinalAnswerPrefix)) {
      if (state == BlockState::after_retrieve) {
        throw MalformedChain("final answer directly after retrieve next");
      }
      if (i + 1 != lines.size()) {
        throw MalformedChain("content after final answer");
      }
      chain.pending_answer = std::string(line.substr(kFinalAnswerPrefix.size()));
      ++i;
      continue;
    }
    if (starts_with(line, kEvalPrefix)) {
      const auto action = parse_action(line);
      if (!action || (*action != ActionKind::eval_relevant &&
                      *action != ActionKind::eval_irrelevant)) {
        throw MalformedChain("unknown marker '" + std::string(line) + "'");
      }
      if (!current) throw MalformedChain("Eval before any document");
      if (state != BlockState::text) {
        throw MalformedChain("Eval out of order");
      }
      current->eval = *action;
      state = BlockState::after_eval;
      ++i;
      continue;
    }
    if (line == action_string(ActionKind::retrieve_next)) {
      if (!current) throw MalformedChain("Retrieve next before any document");
      if (state == BlockState::after_retrieve) {
        throw MalformedChain("duplicate Retrieve next");
      }
      current->retrieve_next = true;
      state = BlockState::after_retrieve;
      ++i;
      continue;
    }
    if (starts_with(line, kDocumentPrefix.substr(0, kDocumentPrefix.size() - 1)) &&
        !current) {
      throw MalformedChain("document block without separating blank line");
    }
    if (!current) throw MalformedChain("unexpected text before any document");
    if (state != BlockState::text) {
      throw MalformedChain("text after an action marker");
    }
    body += '\n';
    body += line;
    ++i;
  }
  close_block();
  return chain;
}

Chain parse_chain(std::string_view text, const Corpus& corpus) {
  return parse_chain(text, [&corpus](std::string_view title,
                                     std::string_view body) {
    const Passage* p = corpus.find_by_content(title, body);
    if (p == nullptr) throw MalformedChain("document not found in corpus");
    return p->id;
  });
}

}  // namespace hopscan
