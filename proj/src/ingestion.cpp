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

#include "hopscan/ingestion.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "hopscan/error.hpp"
#include "hopscan/text.hpp"

namespace hopscan {

using nlohmann::json;

std::string_view to_string(SourceFormat format) {
  switch (format) {
    case SourceFormat::canonical_jsonl:
      return "canonical_jsonl";
    case SourceFormat::musique_like:
      return "musique_like";
    case SourceFormat::hotpot_like:
      return "hotpot_like";
    case SourceFormat::fever_like:
      return "fever_like";
  }
  return "canonical_jsonl";
}

SourceFormat parse_source_format(std::string_view s) {
  for (auto f : {SourceFormat::canonical_jsonl, SourceFormat::musique_like,
                 SourceFormat::hotpot_like, SourceFormat::fever_like}) {
    if (to_string(f) == s) return f;
  }
  throw InvalidArgument("unknown source format '" + std::string(s) + "'");
}

void DatasetDescriptor::validate() const {
  if (source_format == SourceFormat::musique_like && !has_decomposition) {
    throw InvalidArgument("musique_like datasets carry decompositions");
  }
  if (max_hops != 0 && min_hops > max_hops) {
    throw InvalidArgument("min_hops exceeds max_hops");
  }
}

namespace {

// Accumulates passages, merging content duplicates onto the first id.
class PassagePool {
 public:
  std::string add(Passage p, std::size_t line, LoadReport& report) {
    ++report.passages_read;
    if (text::trim(p.text).empty()) {
      throw SchemaError(line, "passage '" + p.id + "' has blank text");
    }
    if (auto it = alias_.find(p.id); it != alias_.end()) {
      const Passage& known = passages_[rows_.at(it->second)];
      if (known.title != p.title || known.text != p.text) {
        throw DuplicatePassageId("'" + p.id + "' redefined with other content (line " +
                                 std::to_string(line) + ")");
      }
      return it->second;
    }
    const std::string key = p.title + '\x1f' + p.text;
    if (auto it = by_content_.find(key); it != by_content_.end()) {
      ++report.passages_deduplicated;
      alias_.emplace(p.id, it->second);
      return it->second;
    }
    by_content_.emplace(key, p.id);
    alias_.emplace(p.id, p.id);
    rows_.emplace(p.id, passages_.size());
    passages_.push_back(std::move(p));
    return passages_.back().id;
  }

  std::string canonical(const std::string& id) const {
    auto it = alias_.find(id);
    return it == alias_.end() ? id : it->second;
  }
  bool contains(const std::string& id) const { return rows_.contains(id); }
  std::vector<Passage> take() { return std::move(passages_); }

 private:
  std::vector<Passage> passages_;
  std::map<std::string, std::size_t> rows_;
  std::map<std::string, std::string> alias_;
  std::map<std::string, std::string> by_content_;
};

template <class T>
T field(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key)) {
    throw SchemaError(line, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(line, std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
std::optional<T> optional_field(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return field<T>(j, key, line);
}

// A record in canonical shape plus the passages it defines inline.
struct Record {
  MultiHopInstance instance;
  std::vector<Passage> passages;
  bool skip_label = false;
  std::optional<std::string> reject;
};

Passage passage_from(const json& j, std::size_t line) {
  if (!j.is_object()) throw SchemaError(line, "passage must be an object");
  Passage p;
  p.id = field<std::string>(j, "id", line);
  p.title = optional_field<std::string>(j, "title", line).value_or("");
  p.text = field<std::string>(j, "text", line);
  return p;
}

Record from_canonical(const json& j, std::size_t line,
                      const DatasetDescriptor& d) {
  Record r;
  MultiHopInstance& inst = r.instance;
  inst.id = field<std::string>(j, "id", line);
  if (auto kind = optional_field<std::string>(j, "task_kind", line)) {
    try {
      inst.task_kind = parse_task_kind(*kind);
    } catch (const InvalidArgument& e) {
      throw SchemaError(line, e.what());
    }
  } else {
    inst.task_kind = d.task_kind;
  }
  inst.query = field<std::string>(j, "query", line);
  inst.gold_chain = field<std::vector<std::string>>(j, "gold_chain", line);
  inst.answer = field<std::string>(j, "answer", line);
  if (j.contains("decomposition") && !j["decomposition"].is_null()) {
    if (!j["decomposition"].is_array()) {
      throw SchemaError(line, "field 'decomposition' has the wrong type");
    }
    std::vector<SubStep> steps;
    for (const auto& s : j["decomposition"]) {
      if (!s.is_object()) throw SchemaError(line, "decomposition step must be an object");
      steps.push_back({field<std::string>(s, "sub_question", line),
                       field<std::string>(s, "sub_answer", line)});
    }
    inst.decomposition = std::move(steps);
  }
  if (j.contains("passages")) {
    if (!j["passages"].is_array()) {
      throw SchemaError(line, "field 'passages' has the wrong type");
    }
    for (const auto& p : j["passages"]) r.passages.push_back(passage_from(p, line));
  }
  return r;
}

Record from_musique(const json& j, std::size_t line) {
  Record r;
  MultiHopInstance& inst = r.instance;
  inst.id = field<std::string>(j, "id", line);
  inst.task_kind = TaskKind::question_answering;
  inst.query = field<std::string>(j, "question", line);
  inst.answer = field<std::string>(j, "answer", line);
  const auto paragraphs = field<json>(j, "paragraphs", line);
  if (!paragraphs.is_array()) throw SchemaError(line, "'paragraphs' must be an array");
  std::map<long long, std::string> ids;
  for (const auto& p : paragraphs) {
    const auto idx = field<long long>(p, "idx", line);
    Passage passage{inst.id + "/" + std::to_string(idx),
                    optional_field<std::string>(p, "title", line).value_or(""),
                    field<std::string>(p, "paragraph_text", line)};
    ids[idx] = passage.id;
    r.passages.push_back(std::move(passage));
  }
  const auto steps = field<json>(j, "question_decomposition", line);
  if (!steps.is_array()) {
    throw SchemaError(line, "'question_decomposition' must be an array");
  }
  std::vector<SubStep> decomposition;
  for (const auto& s : steps) {
    const auto support = field<long long>(s, "paragraph_support_idx", line);
    const auto it = ids.find(support);
    inst.gold_chain.push_back(it == ids.end()
                                  ? inst.id + "/" + std::to_string(support)
                                  : it->second);
    decomposition.push_back({field<std::string>(s, "question", line),
                             field<std::string>(s, "answer", line)});
  }
  inst.decomposition = std::move(decomposition);
  return r;
}

Record from_hotpot(const json& j, std::size_t line) {
  Record r;
  MultiHopInstance& inst = r.instance;
  inst.id = j.contains("_id") ? field<std::string>(j, "_id", line)
                              : field<std::string>(j, "id", line);
  inst.task_kind = TaskKind::question_answering;
  inst.query = field<std::string>(j, "question", line);
  inst.answer = field<std::string>(j, "answer", line);
  const auto context = field<json>(j, "context", line);
  if (!context.is_array()) throw SchemaError(line, "'context' must be an array");
  for (const auto& entry : context) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() ||
        !entry[1].is_array()) {
      throw SchemaError(line, "context entries are [title, [sentences]]");
    }
    std::string body;
    for (const auto& sentence : entry[1]) {
      if (!sentence.is_string()) throw SchemaError(line, "sentence must be a string");
      body += sentence.get<std::string>();
    }
    const auto title = entry[0].get<std::string>();
    r.passages.push_back({title, title, std::string(text::trim(body))});
  }
  const auto facts = field<json>(j, "supporting_facts", line);
  if (!facts.is_array()) throw SchemaError(line, "'supporting_facts' must be an array");
  for (const auto& fact : facts) {
    if (!fact.is_array() || fact.empty() || !fact[0].is_string()) {
      throw SchemaError(line, "supporting facts are [title, sentence_id]");
    }
    // Several facts usually point at one paragraph; the chain keeps one entry
    // per paragraph, in first-mention order.
    const auto title = fact[0].get<std::string>();
    if (std::find(inst.gold_chain.begin(), inst.gold_chain.end(), title) ==
        inst.gold_chain.end()) {
      inst.gold_chain.push_back(title);
    }
  }
  return r;
}

Record from_fever(const json& j, std::size_t line, const DatasetDescriptor& d) {
  Record r;
  MultiHopInstance& inst = r.instance;
  inst.id = j.contains("id") && j["id"].is_number()
                ? std::to_string(j["id"].get<long long>())
                : field<std::string>(j, "id", line);
  inst.task_kind = TaskKind::fact_checking;
  inst.query = field<std::string>(j, "claim", line);
  const auto label = text::ascii_lower(field<std::string>(j, "label", line));
  if (label == "supports" || label == "supported") {
    inst.answer = std::string(kSupported);
  } else if (label == "refutes" || label == "refuted" ||
             label == "not_supported") {
    inst.answer = std::string(kRefuted);
  } else {
    r.reject = "unusable label '" + label + "'";
  }
  if (d.supported_only && inst.answer != kSupported) r.skip_label = true;

  const auto evidence = field<json>(j, "evidence", line);
  if (!evidence.is_array()) throw SchemaError(line, "'evidence' must be an array");
  for (const auto& e : evidence) {
    Passage p;
    if (e.is_array() && e.size() == 2 && e[0].is_string() && e[1].is_string()) {
      p.title = e[0].get<std::string>();
      p.text = e[1].get<std::string>();
    } else if (e.is_object()) {
      p.title = optional_field<std::string>(e, "title", line).value_or("");
      p.text = field<std::string>(e, "text", line);
      if (e.contains("id")) p.id = field<std::string>(e, "id", line);
    } else {
      throw SchemaError(line, "evidence entries are [title, text] or objects");
    }
    if (p.id.empty()) p.id = content_passage_id(p.title, p.text);
    inst.gold_chain.push_back(p.id);
    r.passages.push_back(std::move(p));
  }
  return r;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

json parse_line(const std::string& line, std::size_t number) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw SchemaError(number, "record must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw SchemaError(number, std::string("invalid JSON: ") + e.what());
  }
}

void read_corpus_file(const std::filesystem::path& path, PassagePool& pool,
                      LoadReport& report) {
  auto in = open_in(path);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (text::trim(line).empty()) continue;
    pool.add(passage_from(parse_line(line, number), number), number, report);
  }
}

}  // namespace

LoadedDataset load_dataset(const std::filesystem::path& path,
                           const DatasetDescriptor& descriptor) {
  descriptor.validate();
  LoadReport report;
  PassagePool pool;
  if (descriptor.corpus_path) read_corpus_file(*descriptor.corpus_path, pool, report);

  std::vector<std::pair<std::size_t, MultiHopInstance>> staged;
  std::set<std::string> instance_ids;
  auto in = open_in(path);
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (text::trim(raw).empty()) continue;
    ++report.lines_read;
    const json j = parse_line(raw, number);
    Record r;
    switch (descriptor.source_format) {
      case SourceFormat::canonical_jsonl:
        r = from_canonical(j, number, descriptor);
        break;
      case SourceFormat::musique_like:
        r = from_musique(j, number);
        break;
      case SourceFormat::hotpot_like:
        r = from_hotpot(j, number);
        break;
      case SourceFormat::fever_like:
        r = from_fever(j, number, descriptor);
        break;
    }
    for (auto& p : r.passages) pool.add(std::move(p), number, report);

    MultiHopInstance& inst = r.instance;
    if (!instance_ids.insert(inst.id).second) {
      throw SchemaError(number, "duplicate instance id '" + inst.id + "'");
    }
    if (r.reject) {
      report.rejected.push_back({number, inst.id, *r.reject});
      continue;
    }
    if (r.skip_label) {
      ++report.filtered_by_label;
      continue;
    }
    if (inst.gold_chain.empty()) {
      throw SchemaError(number, "gold chain of '" + inst.id + "' is empty");
    }
    if (inst.decomposition && inst.decomposition->size() != inst.gold_chain.size()) {
      throw SchemaError(number, "decomposition length differs from gold chain");
    }
    if (inst.task_kind == TaskKind::fact_checking && inst.answer != kSupported &&
        inst.answer != kRefuted) {
      throw SchemaError(number, "fact-checking answer must be SUPPORTED or REFUTED");
    }

    // Map aliases, then collapse repeated evidence (first occurrence wins,
    // with its decomposition step).
    const std::size_t original = inst.gold_chain.size();
    std::vector<std::string> chain;
    std::vector<SubStep> steps;
    for (std::size_t i = 0; i < original; ++i) {
      const std::string id = pool.canonical(inst.gold_chain[i]);
      if (std::find(chain.begin(), chain.end(), id) != chain.end()) continue;
      chain.push_back(id);
      if (inst.decomposition) steps.push_back((*inst.decomposition)[i]);
    }
    inst.gold_chain = std::move(chain);
    if (inst.decomposition) inst.decomposition = std::move(steps);
    if (inst.gold_chain.size() != original) {
      report.collapsed.push_back({inst.id, original, inst.gold_chain.size()});
    }

    const std::size_t h = inst.gold_chain.size();
    if (h < descriptor.min_hops ||
        (descriptor.max_hops != 0 && h > descriptor.max_hops)) {
      ++report.filtered_by_hops;
      continue;
    }
    staged.emplace_back(number, std::move(inst));
  }

  LoadedDataset out;
  for (auto& [line, inst] : staged) {
    const auto missing =
        std::find_if(inst.gold_chain.begin(), inst.gold_chain.end(),
                     [&](const std::string& id) { return !pool.contains(id); });
    if (missing != inst.gold_chain.end()) {
      if (descriptor.strict) {
        throw DanglingGoldReference("instance '" + inst.id + "' (line " +
                                    std::to_string(line) + ") references '" +
                                    *missing + "'");
      }
      report.rejected.push_back(
          {line, inst.id, "unresolvable gold passage '" + *missing + "'"});
      continue;
    }
    out.instances.push_back(std::move(inst));
  }
  out.corpus = Corpus(pool.take());
  report.instances_loaded = out.instances.size();
  out.report = std::move(report);
  return out;
}

Corpus load_corpus(const std::filesystem::path& path) {
  PassagePool pool;
  LoadReport report;
  read_corpus_file(path, pool, report);
  return Corpus(pool.take());
}

void to_json(json& j, const Passage& p) {
  j = json{{"id", p.id}, {"title", p.title}, {"text", p.text}};
}

void to_json(json& j, const MultiHopInstance& inst) {
  j = json{{"id", inst.id},
           {"task_kind", std::string(to_string(inst.task_kind))},
           {"query", inst.query},
           {"gold_chain", inst.gold_chain},
           {"answer", inst.answer}};
  if (inst.decomposition) {
    json steps = json::array();
    for (const auto& s : *inst.decomposition) {
      steps.push_back({{"sub_question", s.sub_question},
                       {"sub_answer", s.sub_answer}});
    }
    j["decomposition"] = std::move(steps);
  }
}

void write_canonical(const LoadedDataset& dataset,
                     const std::filesystem::path& dataset_path,
                     const std::filesystem::path& corpus_path) {
  std::ofstream corpus(corpus_path, std::ios::binary | std::ios::trunc);
  std::ofstream data(dataset_path, std::ios::binary | std::ios::trunc);
  if (!corpus || !data) throw IoError("cannot open canonical output files");
  for (const auto& p : dataset.corpus.passages()) corpus << json(p).dump() << '\n';
  for (const auto& inst : dataset.instances) data << json(inst).dump() << '\n';
  if (!corpus || !data) throw IoError("write failed for canonical output");
}

json load_report_json(const LoadReport& r) {
  json collapsed = json::array();
  for (const auto& c : r.collapsed) {
    collapsed.push_back({{"instance_id", c.instance_id},
                         {"original_length", c.original_length},
                         {"collapsed_length", c.collapsed_length}});
  }
  json rejected = json::array();
  for (const auto& x : r.rejected) {
    rejected.push_back(
        {{"line", x.line}, {"instance_id", x.instance_id}, {"reason", x.reason}});
  }
  return {{"lines_read", r.lines_read},
          {"passages_read", r.passages_read},
          {"passages_deduplicated", r.passages_deduplicated},
          {"instances_loaded", r.instances_loaded},
          {"filtered_by_hops", r.filtered_by_hops},
          {"filtered_by_label", r.filtered_by_label},
          {"collapsed_chains", collapsed},
          {"rejected", rejected}};
}

HopHistogram stats(std::span<const MultiHopInstance> instances) {
  HopHistogram h;
  for (std::size_t n = 1; n <= 4; ++n) h.per_hop[n] = 0;
  for (const auto& inst : instances) ++h.per_hop[inst.hops()];
  h.total = instances.size();
  return h;
}

json stats_json(const HopHistogram& h) {
  json per_hop = json::object();
  for (auto [hops, n] : h.per_hop) per_hop[std::to_string(hops)] = n;
  return {{"total", h.total}, {"per_hop", per_hop}};
}

}  // namespace hopscan
