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

#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "hopscan/costmodel.hpp"
#include "hopscan/databuilder.hpp"
#include "hopscan/engine.hpp"
#include "hopscan/error.hpp"
#include "hopscan/evaluator.hpp"
#include "hopscan/index.hpp"
#include "hopscan/ingestion.hpp"
#include "hopscan/miner.hpp"
#include "hopscan/parallel.hpp"
#include "json.hpp"

namespace hopscan::cli {

namespace {

using nlohmann::json;

struct Options {
  // Shared.
  std::string provider = "reference";
  std::string endpoint;
  std::size_t dim = ReferenceEmbedder::kDefaultDimension;
  std::uint64_t seed = 0;
  std::size_t workers = default_workers();
  bool no_actions = false;
  std::int64_t timestamp = 0;

  // Paths.
  std::string input;
  std::string dataset;
  std::string corpus;
  std::string idx;
  std::string out;
  std::string out_corpus;
  std::string report;
  std::string markdown;
  std::string traces;

  // ingest
  std::string format = "canonical_jsonl";
  std::string task_kind = "question_answering";
  std::string gold_order = "ordered";
  std::size_t min_hops = 0;
  std::size_t max_gold_hops = 0;
  bool supported_only = false;
  bool strict = false;

  // retrieve / search
  std::string query;
  std::size_t k = 10;
  std::string policy = "control";
  std::size_t max_hops = 4;
  std::size_t fixed_hops = 2;
  std::string control = "remote";
  bool omit_latency = false;

  // evaluate
  std::vector<std::size_t> ks{1, 5, 10};
  std::size_t max_hop = 0;

  // mine / build-dataset
  std::size_t negatives = 10;
  double ceiling = 0.95;
  std::size_t pool = 100;

  // bench
  std::vector<std::size_t> sizes{1000, 10000};
  std::size_t trials = 3;
  double min_ratio = 5.0;

  // report
  std::string label = "hopscan";
};

// Everything that influences outputs. The worker count is left out because
// outputs do not depend on it.
json run_config(const Options& o, const std::string& command) {
  return {{"tool", "hopscan"},
          {"tool_version", HOPSCAN_VERSION},
          {"command", command},
          {"provider", o.provider},
          {"endpoint", o.endpoint},
          {"dim", o.dim},
          {"seed", o.seed},
          {"include_actions", !o.no_actions},
          {"timestamp", o.timestamp},
          {"input", o.input},
          {"dataset", o.dataset},
          {"corpus", o.corpus},
          {"idx", o.idx},
          {"out", o.out},
          {"format", o.format},
          {"task_kind", o.task_kind},
          {"gold_order", o.gold_order},
          {"min_hops", o.min_hops},
          {"max_gold_hops", o.max_gold_hops},
          {"supported_only", o.supported_only},
          {"strict", o.strict},
          {"query", o.query},
          {"k", o.k},
          {"policy", o.policy},
          {"max_hops", o.max_hops},
          {"fixed_hops", o.fixed_hops},
          {"control", o.control},
          {"omit_latency", o.omit_latency},
          {"ks", o.ks},
          {"max_hop", o.max_hop},
          {"negatives", o.negatives},
          {"ceiling", o.ceiling},
          {"pool", o.pool},
          {"sizes", o.sizes},
          {"trials", o.trials},
          {"min_ratio", o.min_ratio}};
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << content;
  if (!f) throw IoError("write failed: " + path);
}

void write_json(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

// JSONL artifacts carry their provenance in a sibling <file>.meta.json.
void write_jsonl(const std::string& path, const std::vector<json>& rows,
                 const json& metadata) {
  std::string body;
  for (const auto& r : rows) body += r.dump() + "\n";
  write_text(path, body);
  write_json(path + ".meta.json", {{"metadata", metadata}, {"records", rows.size()}});
}

json read_json(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

std::unique_ptr<EmbeddingProvider> provider_for(const Options& o) {
  if (o.provider == "reference") return std::make_unique<ReferenceEmbedder>(o.dim);
  RemoteConfig remote;
  remote.endpoint = o.endpoint;
  return make_provider("remote", remote);
}

LoadedDataset load_canonical(const Options& o) {
  DatasetDescriptor d;
  d.name = o.dataset;
  d.corpus_path = o.corpus;
  d.gold_order = parse_gold_order(o.gold_order);
  d.strict = true;
  return load_dataset(o.dataset, d);
}

RetrievalOptions retrieval_options(const VectorIndex& index) {
  RetrievalOptions r;
  r.include_actions = index.metadata().include_actions;
  r.instructions.document = index.metadata().instruction_document;
  return r;
}

std::string control_endpoint(const Options& o) {
  if (!o.endpoint.empty()) return o.endpoint;
  if (const char* env = std::getenv(kEndpointEnvVar)) return env;
  throw InvalidArgument(std::string("remote control needs --endpoint or ") +
                        kEndpointEnvVar);
}

int cmd_ingest(const Options& o, std::ostream& out) {
  DatasetDescriptor d;
  d.name = o.input;
  d.task_kind = parse_task_kind(o.task_kind);
  d.source_format = parse_source_format(o.format);
  d.has_decomposition = d.source_format == SourceFormat::musique_like;
  d.gold_order = parse_gold_order(o.gold_order);
  d.min_hops = o.min_hops;
  d.max_hops = o.max_gold_hops;
  if (!o.corpus.empty()) d.corpus_path = o.corpus;
  d.supported_only = o.supported_only;
  d.strict = o.strict;
  const LoadedDataset data = load_dataset(o.input, d);
  write_canonical(data, o.out, o.out_corpus);
  const json meta = run_config(o, "ingest");
  write_json(o.out + ".meta.json", {{"metadata", meta}});
  write_json(o.out_corpus + ".meta.json", {{"metadata", meta}});
  const json report{{"metadata", meta},
                    {"load", load_report_json(data.report)},
                    {"stats", stats_json(stats(data.instances))}};
  if (!o.report.empty()) write_json(o.report, report);
  out << "loaded " << data.instances.size() << " instances, "
      << data.corpus.size() << " passages\n";
  return 0;
}

int cmd_index_build(const Options& o, std::ostream& out) {
  const Corpus corpus = load_corpus(o.corpus);
  const auto provider = provider_for(o);
  IndexMetadata meta;
  meta.include_actions = !o.no_actions;
  meta.build_timestamp = o.timestamp;
  meta.provenance = run_config(o, "index build").dump();
  const VectorIndex index =
      build_index(corpus.passages(), *provider, Instructions{}.document,
                  std::move(meta), o.workers);
  save_index(index, o.out);
  out << "indexed " << index.size() << " passages (dim " << index.dimension()
      << ")\n";
  return 0;
}

int cmd_index_search(const Options& o, std::ostream& out) {
  const VectorIndex index = load_index(o.idx);
  const auto provider = provider_for(o);
  const Corpus empty;
  const Retriever retriever(empty, index, *provider, retrieval_options(index));
  const Chain chain =
      make_chain(o.query, parse_task_kind(o.task_kind),
                 retriever.options().instructions);
  const SearchResult r = retriever.retrieve_step(chain, o.k);
  const json result{{"metadata", run_config(o, "index search")},
                    {"ranked", json(r)}};
  if (o.out.empty()) {
    out << result.dump(2) << "\n";
  } else {
    write_json(o.out, result);
  }
  return 0;
}

MiningConfig mining_config(const Options& o) {
  MiningConfig m;
  m.negatives_per_positive = o.negatives;
  m.similarity_ceiling = o.ceiling;
  m.pool_size = o.pool;
  m.validate();
  return m;
}

int cmd_mine(const Options& o, std::ostream& out) {
  const MiningConfig mining = mining_config(o);
  const LoadedDataset data = load_canonical(o);
  const VectorIndex index = load_index(o.idx);
  const auto provider = provider_for(o);
  const Retriever retriever(data.corpus, index, *provider, retrieval_options(index));
  const auto mined = mine_all(data.instances, retriever, mining, o.workers);
  std::vector<json> rows(mined.begin(), mined.end());
  write_jsonl(o.out, rows, run_config(o, "mine"));
  std::size_t short_lists = 0;
  for (const auto& m : mined) short_lists += m.insufficient ? 1 : 0;
  out << "mined " << mined.size() << " hop(s), " << short_lists
      << " with fewer negatives than requested\n";
  return 0;
}

int cmd_build_dataset(const Options& o, std::ostream& out) {
  const MiningConfig mining = mining_config(o);
  const LoadedDataset data = load_canonical(o);
  const VectorIndex index = load_index(o.idx);
  const auto provider = provider_for(o);
  const Retriever retriever(data.corpus, index, *provider, retrieval_options(index));
  const auto samples = build_all(data.instances, retriever, mining, o.seed, o.workers);
  export_training_files(samples, o.out, o.seed, run_config(o, "build-dataset"));
  out << "wrote samples for " << samples.size() << " instances to " << o.out
      << "\n";
  return 0;
}

StopPolicy stop_policy(const Options& o) {
  StopPolicy p;
  if (o.policy == "control") {
    p = StopPolicy::control(o.max_hops);
  } else if (o.policy == "score_decrease") {
    p = StopPolicy::score_decrease(o.max_hops);
  } else if (o.policy == "fixed") {
    p = StopPolicy::fixed(o.fixed_hops, o.max_hops);
  } else {
    p = StopPolicy::cap(o.max_hops);
  }
  p.validate();
  return p;
}

int cmd_retrieve(const Options& o, std::ostream& out) {
  const StopPolicy policy = stop_policy(o);
  const VectorIndex index = load_index(o.idx);
  const auto provider = provider_for(o);

  LoadedDataset data;
  if (!o.dataset.empty()) {
    data = load_canonical(o);
  } else {
    if (o.query.empty()) throw InvalidArgument("retrieve needs --query or --dataset");
    data.corpus = load_corpus(o.corpus);
    data.instances.push_back({"query", parse_task_kind(o.task_kind), o.query,
                              {}, std::nullopt, ""});
  }
  const Retriever retriever(data.corpus, index, *provider, retrieval_options(index));

  std::unique_ptr<ControlProvider> remote;
  if (policy.rule == StopRule::control_provider && o.control == "remote") {
    RemoteControlConfig rc;
    rc.endpoint = control_endpoint(o);
    remote = std::make_unique<RemoteControl>(rc);
  }
  if (policy.rule == StopRule::control_provider && o.control == "oracle" &&
      o.dataset.empty()) {
    throw InvalidArgument("oracle control needs --dataset with gold chains");
  }

  std::vector<HopTrace> traces(data.instances.size());
  parallel_for(data.instances.size(), o.workers, [&](std::size_t i) {
    const MultiHopInstance& inst = data.instances[i];
    std::unique_ptr<ControlProvider> oracle;
    const ControlProvider* control = remote.get();
    if (policy.rule == StopRule::control_provider && o.control == "oracle") {
      oracle = oracle_control(inst);
      control = oracle.get();
    }
    traces[i] = run_chain(retriever, {inst.id, inst.query, inst.task_kind},
                          policy, o.k, control);
    if (o.omit_latency) {
      for (auto& h : traces[i].hops) h.latency_seconds = 0.0;
    }
  });
  std::vector<json> rows(traces.begin(), traces.end());
  write_jsonl(o.out, rows, run_config(o, "retrieve"));
  out << "wrote " << traces.size() << " trace(s) to " << o.out << "\n";
  return 0;
}

std::vector<HopTrace> read_traces(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::vector<HopTrace> traces;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    try {
      traces.push_back(json::parse(line).get<HopTrace>());
    } catch (const json::exception& e) {
      throw IoError(path + ": " + e.what());
    }
  }
  return traces;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const LoadedDataset data = load_canonical(o);
  json report{{"metadata", run_config(o, "evaluate")}};
  std::string md;
  if (!o.idx.empty()) {
    const VectorIndex index = load_index(o.idx);
    const auto provider = provider_for(o);
    const Retriever retriever(data.corpus, index, *provider,
                              retrieval_options(index));
    const HitsTable table =
        evaluate_hits(data.instances, retriever, o.ks, o.max_hop,
                      parse_gold_order(o.gold_order), o.workers);
    report["retrieval"] = hits_report(table);
    const std::pair<std::string, HitsTable> row{o.label, table};
    md += render_hits_markdown(std::span(&row, 1));
  }
  if (!o.traces.empty()) {
    const Diagnostics d = diagnose(read_traces(o.traces), data.instances);
    report["end_to_end"] = diagnostics_report(d);
    const std::pair<std::string, Diagnostics> row{o.label, d};
    if (!md.empty()) md += "\n";
    md += render_diagnostics_markdown(std::span(&row, 1));
  }
  if (!report.contains("retrieval") && !report.contains("end_to_end")) {
    throw InvalidArgument("evaluate needs --idx and/or --traces");
  }
  write_json(o.out, report);
  if (!o.markdown.empty()) write_text(o.markdown, md);
  out << md;
  return 0;
}

HitsTable table_from_report(const json& r) {
  HitsTable t;
  t.max_hop = r.at("max_hop").get<std::size_t>();
  t.gold_order = parse_gold_order(r.at("gold_order").get<std::string>());
  for (const auto& [k_str, entry] : r.at("hits").items()) {
    const std::size_t k = std::stoul(k_str);
    std::vector<HopHits> row;
    for (const auto& c : entry.at("per_hop")) {
      row.push_back({c.at("hop").get<std::size_t>(), c.at("hits").get<double>(),
                     c.at("successes").get<std::size_t>(),
                     c.at("denominator").get<std::size_t>()});
    }
    t.per_k[k] = std::move(row);
    t.avg_per_k[k] = entry.at("avg_micro").get<double>();
    t.macro_per_k[k] = entry.at("avg_macro").get<double>();
  }
  return t;
}

int cmd_report(const Options& o, std::ostream& out) {
  const json r = read_json(o.input);
  std::string md;
  try {
    if (r.contains("retrieval")) {
      const std::pair<std::string, HitsTable> row{o.label,
                                                  table_from_report(r["retrieval"])};
      md += render_hits_markdown(std::span(&row, 1));
    }
    if (r.contains("end_to_end")) {
      const auto& e = r["end_to_end"];
      Diagnostics d;
      d.traces = e.at("traces").get<std::size_t>();
      d.early_stops = e.at("early_stops").get<std::size_t>();
      d.overshoots = e.at("overshoots").get<std::size_t>();
      d.exact_stops = e.at("exact_stops").get<std::size_t>();
      d.avg_hops = e.at("avg_hops").get<double>();
      d.avg_latency_per_hop = e.at("avg_latency_per_hop").get<double>();
      const std::pair<std::string, Diagnostics> row{o.label, d};
      if (!md.empty()) md += "\n";
      md += render_diagnostics_markdown(std::span(&row, 1));
    }
  } catch (const json::exception& e) {
    throw IoError(o.input + ": " + e.what());
  }
  if (md.empty()) throw InvalidArgument(o.input + " holds no evaluation results");
  if (o.out.empty()) {
    out << md;
  } else {
    write_text(o.out, md);
  }
  return 0;
}

int cmd_bench(const Options& o, std::ostream& out) {
  BenchConfig config;
  config.corpus_sizes = o.sizes;
  config.trials = o.trials;
  config.min_slope_ratio = o.min_ratio;
  config.seed = o.seed;
  const auto provider = provider_for(o);
  const BenchReport report = bench_empirical(config, *provider);
  json j = bench_report_json(report, config);
  j["metadata"] = run_config(o, "bench");
  write_json(o.out, j);
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
  out << "slope ratio " << report.slope_ratio << " (threshold "
      << config.min_slope_ratio << ")\n";
  return report.passes ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Multi-hop dense retrieval chains: indexing, mining, training "
               "data, retrieval and evaluation",
               "hopscan"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--provider", o.provider, "Embedding provider")
      ->check(CLI::IsMember({"reference", "remote"}))
      ->capture_default_str();
  app.add_option("--endpoint", o.endpoint,
                 std::string("Remote service URL (default: $") + kEndpointEnvVar + ")");
  app.add_option("--dim", o.dim, "Reference embedder dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--workers", o.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  app.add_flag("--no-actions", o.no_actions,
               "Embed query chains without action markers (index build)");
  app.add_option("--timestamp", o.timestamp,
                 "Build timestamp recorded in index metadata")
      ->capture_default_str();

  const auto policies = CLI::IsMember({"control", "score_decrease", "fixed", "cap"});
  const auto task_kinds = CLI::IsMember({"question_answering", "fact_checking"});
  const auto orders = CLI::IsMember({"ordered", "unordered"});

  auto* ingest = app.add_subcommand("ingest", "Normalize a dataset into canonical JSONL");
  ingest->add_option("--input", o.input, "Source dataset")->required();
  ingest->add_option("--format", o.format, "Source format")
      ->check(CLI::IsMember(
          {"canonical_jsonl", "musique_like", "hotpot_like", "fever_like"}))
      ->capture_default_str();
  ingest->add_option("--corpus", o.corpus, "Passages file for canonical input");
  ingest->add_option("--task-kind", o.task_kind)->check(task_kinds)->capture_default_str();
  ingest->add_option("--gold-order", o.gold_order)->check(orders)->capture_default_str();
  ingest->add_option("--min-hops", o.min_hops, "Drop shorter gold chains");
  ingest->add_option("--max-hops", o.max_gold_hops, "Drop longer gold chains");
  ingest->add_flag("--supported-only", o.supported_only, "Keep only SUPPORTED claims");
  ingest->add_flag("--strict", o.strict, "Fail on unresolvable gold passages");
  ingest->add_option("--out", o.out, "Canonical dataset output")->required();
  ingest->add_option("--out-corpus", o.out_corpus, "Canonical corpus output")->required();
  ingest->add_option("--report", o.report, "Load report (JSON)");

  auto* index = app.add_subcommand("index", "Build or query a vector index");
  index->require_subcommand(1);
  auto* build = index->add_subcommand("build", "Embed a corpus into an index file");
  build->add_option("--corpus", o.corpus)->required();
  build->add_option("--out", o.out)->required();
  auto* search_cmd = index->add_subcommand("search", "Top-k passages for a query");
  search_cmd->add_option("--idx", o.idx)->required();
  search_cmd->add_option("--query", o.query)->required();
  search_cmd->add_option("--task-kind", o.task_kind)->check(task_kinds);
  search_cmd->add_option("--k", o.k)->check(CLI::PositiveNumber)->capture_default_str();
  search_cmd->add_option("--out", o.out, "Write JSON here instead of stdout");

  const auto add_dataset = [&](CLI::App* sub) {
    sub->add_option("--dataset", o.dataset, "Canonical dataset")->required();
    sub->add_option("--corpus", o.corpus, "Canonical corpus")->required();
  };
  const auto add_mining = [&](CLI::App* sub) {
    sub->add_option("--negatives", o.negatives, "Negatives per positive")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--ceiling", o.ceiling, "Max cosine to the positive")
        ->capture_default_str();
    sub->add_option("--pool", o.pool, "Candidates fetched before filtering")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  auto* mine = app.add_subcommand("mine", "Mine hard negatives for every gold hop");
  add_dataset(mine);
  mine->add_option("--idx", o.idx)->required();
  mine->add_option("--out", o.out)->required();
  add_mining(mine);

  auto* build_ds = app.add_subcommand("build-dataset",
                                      "Emit contrastive and generative training files");
  add_dataset(build_ds);
  build_ds->add_option("--idx", o.idx)->required();
  build_ds->add_option("--out", o.out, "Output directory")->required();
  add_mining(build_ds);

  auto* retrieve = app.add_subcommand("retrieve", "Run the multi-hop retrieval loop");
  retrieve->add_option("--idx", o.idx)->required();
  retrieve->add_option("--corpus", o.corpus, "Canonical corpus")->required();
  retrieve->add_option("--query", o.query, "Single question or claim");
  retrieve->add_option("--dataset", o.dataset, "Run every instance of a dataset");
  retrieve->add_option("--task-kind", o.task_kind)->check(task_kinds);
  retrieve->add_option("--policy", o.policy)->check(policies)->capture_default_str();
  retrieve->add_option("--control", o.control, "Control provider for --policy control")
      ->check(CLI::IsMember({"remote", "oracle"}))
      ->capture_default_str();
  retrieve->add_option("--k", o.k)->check(CLI::PositiveNumber)->capture_default_str();
  retrieve->add_option("--max-hops", o.max_hops)->check(CLI::PositiveNumber)->capture_default_str();
  retrieve->add_option("--fixed-hops", o.fixed_hops)->check(CLI::PositiveNumber)->capture_default_str();
  retrieve->add_flag("--omit-latency", o.omit_latency, "Record zero latencies");
  retrieve->add_option("--out", o.out, "Trace JSONL")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Per-hop Hits@k and stop diagnostics");
  add_dataset(evaluate);
  evaluate->add_option("--idx", o.idx, "Index for teacher-forced Hits@k");
  evaluate->add_option("--traces", o.traces, "Traces for end-to-end diagnostics");
  evaluate->add_option("--ks", o.ks)->delimiter(',')->check(CLI::PositiveNumber);
  evaluate->add_option("--max-hop", o.max_hop, "Truncate gold chains (0: none)");
  evaluate->add_option("--gold-order", o.gold_order)->check(orders)->capture_default_str();
  evaluate->add_option("--label", o.label, "Row label in markdown")->capture_default_str();
  evaluate->add_option("--markdown", o.markdown, "Also write a markdown table");
  evaluate->add_option("--out", o.out, "report.json")->required();

  auto* bench = app.add_subcommand("bench", "Cross-encoder vs dense cost benchmark");
  bench->add_option("--sizes", o.sizes)->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--trials", o.trials)->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--min-ratio", o.min_ratio)->capture_default_str();
  bench->add_option("--out", o.out)->required();

  auto* report = app.add_subcommand("report", "Render an evaluation report as markdown");
  report->add_option("--input", o.input, "report.json")->required();
  report->add_option("--label", o.label)->capture_default_str();
  report->add_option("--out", o.out, "Write markdown here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(o, out);
    if (build->parsed()) return cmd_index_build(o, out);
    if (search_cmd->parsed()) return cmd_index_search(o, out);
    if (mine->parsed()) return cmd_mine(o, out);
    if (build_ds->parsed()) return cmd_build_dataset(o, out);
    if (retrieve->parsed()) return cmd_retrieve(o, out);
    if (evaluate->parsed()) return cmd_evaluate(o, out);
    if (bench->parsed()) return cmd_bench(o, out);
    if (report->parsed()) return cmd_report(o, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace hopscan::cli
