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

// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Set HOPSCAN_UPDATE_GOLDEN=1 to rewrite the golden training-sample files.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include "cli_support.hpp"
#include "hopscan/costmodel.hpp"
#include "hopscan/databuilder.hpp"
#include "hopscan/evaluator.hpp"
#include "hopscan/ingestion.hpp"
#include "hopscan/miner.hpp"
#include "support.hpp"

namespace hopscan {
namespace {

namespace fs = std::filesystem;

class Failures {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok && list_.size() < 10) list_.push_back(what);
    if (!ok) ++count_;
  }
  bool ok() const { return count_ == 0; }
  std::string summary() const {
    std::ostringstream s;
    s << count_ << " failed check(s)";
    for (const auto& f : list_) s << "\n    - " << f;
    return s.str();
  }

 private:
  std::vector<std::string> list_;
  std::size_t count_ = 0;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// 1. Exact top-k search against a brute-force oracle.
void index_exactness(Failures& f) {
  std::mt19937_64 rng(101);
  const std::vector<std::size_t> sizes{1, 17, 250, 2000, 10000};
  std::vector<VectorIndex> indexes;
  for (std::size_t n : sizes) indexes.push_back(testing::random_index(rng, n, 32));
  for (int c = 0; c < 1000; ++c) {
    const auto& idx = indexes[c % indexes.size()];
    const std::size_t k = 1 + rng() % 60;
    std::set<std::string> exclude;
    const std::size_t n_ex = rng() % 8;
    for (std::size_t e = 0; e < n_ex; ++e) exclude.insert(idx.id(rng() % idx.size()));
    if (c % 7 == 0) exclude.insert("not-in-index");
    // Some queries coincide with stored vectors to force exact ties.
    std::vector<float> q = testing::random_unit(rng, 32);
    if (c % 3 == 0) {
      const auto v = idx.vector(rng() % idx.size());
      q.assign(v.begin(), v.end());
    }
    const std::vector<std::string> ex(exclude.begin(), exclude.end());
    const auto got = search(idx, q, k, ex).ranked;
    const auto want = testing::brute_force_search(idx, q, k, exclude);
    f.check(got == want, "case " + std::to_string(c) + " (n=" +
                             std::to_string(idx.size()) + ", k=" + std::to_string(k) +
                             ") differs from the oracle");
  }
}

// 25 instances over hop lengths 1-4 with both task kinds.
struct SampleFixture {
  Corpus corpus;
  std::vector<MultiHopInstance> instances;
};

SampleFixture sample_fixture() {
  std::mt19937_64 rng(2024);
  const std::vector<std::string> vocab{
      "river", "castle", "author", "novel",  "born",   "city",    "king",  "war",
      "treaty", "album", "band",   "singer", "film",   "director", "island", "bridge",
      "museum", "painter", "queen", "empire", "harbor", "station", "mayor", "school"};
  const auto words = [&](std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + vocab[rng() % vocab.size()];
    return s;
  };
  SampleFixture fx;
  std::vector<Passage> ps;
  for (std::size_t i = 0; i < 25; ++i) {
    const std::size_t hops = 1 + i % 4;
    MultiHopInstance m;
    m.id = "fx" + std::to_string(100 + i);
    m.task_kind = (i / 4) % 2 ? TaskKind::fact_checking : TaskKind::question_answering;
    const std::string topic = "topic" + std::to_string(i);
    m.query = m.task_kind == TaskKind::question_answering
                  ? "Which " + words(2) + " relates to " + topic + "?"
                  : "The " + words(2) + " of " + topic + " is famous.";
    m.answer = m.task_kind == TaskKind::question_answering
                   ? "Entity " + std::to_string(i)
                   : std::string(i % 3 ? kSupported : kRefuted);
    for (std::size_t h = 0; h < hops; ++h) {
      Passage p{m.id + "-g" + std::to_string(h), "Title " + std::to_string(i) + "." +
                                                     std::to_string(h),
                topic + " hop" + std::to_string(h) + " " + words(6)};
      m.gold_chain.push_back(p.id);
      ps.push_back(std::move(p));
    }
    for (int d = 0; d < 3; ++d) {
      ps.push_back({m.id + "-d" + std::to_string(d), "",
                    topic + " " + words(5) + " hop" + std::to_string(d)});
    }
    fx.instances.push_back(std::move(m));
  }
  for (int n = 0; n < 40; ++n) ps.push_back({"bg" + std::to_string(n), "", words(8)});
  fx.corpus = Corpus(std::move(ps));
  return fx;
}

// 2. Training-sample construction.
void sample_fidelity(Failures& f) {
  const auto fx = sample_fixture();
  const ReferenceEmbedder emb;
  const auto idx = build_index(fx.corpus.passages(), emb, Instructions{}.document);
  const Retriever r(fx.corpus, idx, emb);
  MiningConfig mining;
  mining.negatives_per_positive = 4;
  const auto samples = build_all(fx.instances, r, mining, 11);

  std::set<std::size_t> hop_lengths;
  std::set<TaskKind> kinds;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& m = fx.instances[i];
    const auto& s = samples[i];
    hop_lengths.insert(m.hops());
    kinds.insert(m.task_kind);
    f.check(s.contrastive.size() == m.hops(), m.id + ": contrastive count != H");
    f.check(s.generative.size() == 2, m.id + ": generative count != 2");
    if (s.generative.size() != 2) continue;
    f.check(s.generative[0].label_kind == GenerativeLabel::positive_with_answer &&
                s.generative[1].label_kind == GenerativeLabel::causal_negative,
            m.id + ": generative labels");
    const std::string& pos = s.generative[0].text;
    for (std::size_t h = 0; h < s.contrastive.size(); ++h) {
      const auto& c = s.contrastive[h];
      f.check(pos.starts_with(c.prompt_text) &&
                  pos.compare(c.prompt_text.size(), 12, "\n\nDocument: ") == 0,
              m.id + " hop " + std::to_string(h) + ": prompt is not a prefix of the positive");
      f.check(c.positive == m.gold_chain[h], m.id + ": positive id");
    }
  }
  f.check(hop_lengths == std::set<std::size_t>{1, 2, 3, 4}, "fixture hop lengths");
  f.check(kinds.size() == 2, "fixture task kinds");

  testing::TempDir dir("acceptance-samples");
  export_training_files(samples, dir.path(), 11);
  const fs::path golden = fs::path(HOPSCAN_GOLDEN_DIR) / "samples";
  const bool update = std::getenv("HOPSCAN_UPDATE_GOLDEN") != nullptr;
  for (const std::string name : {"contrastive.jsonl", "generative.jsonl", "stats.json"}) {
    const auto got = testing::read_file(dir.path() / name);
    if (update) {
      fs::create_directories(golden);
      testing::write_file(golden / name, got);
    }
    f.check(fs::exists(golden / name) && got == testing::read_file(golden / name),
            "golden mismatch: " + name);
  }
}

// 3. Negative mining filters.
void mining_filters(Failures& f) {
  const auto suite = testing::planted_leak_suite(20, 5);
  const ReferenceEmbedder emb;
  const auto idx = build_index(suite.corpus.passages(), emb, Instructions{}.document);
  const Retriever r(suite.corpus, idx, emb);
  const MiningConfig cfg;
  std::size_t leaks = 0, close = 0, mined = 0, unfiltered_leaks = 0;
  for (const auto& m : suite.instances) {
    for (std::size_t h = 0; h < m.hops(); ++h) {
      const auto out = mine_negatives(m, h, r, cfg);
      f.check(out == testing::oracle_mine(m, h, r, cfg),
              m.id + " hop " + std::to_string(h) + ": differs from the mining oracle");
      const auto pos = idx.vector(*idx.row_of(m.gold_chain[h]));
      const std::string answer = testing::squash((*m.decomposition)[h].sub_answer);
      for (const auto& id : out.negatives) {
        ++mined;
        const auto& p = suite.corpus.at(id);
        if (testing::squash(p.title + " " + p.text).find(answer) != std::string::npos) ++leaks;
        if (testing::oracle_dot(idx.vector(*idx.row_of(id)), pos) > 0.95 + 1e-9) ++close;
      }
      auto plain = m;
      plain.decomposition.reset();
      for (const auto& id : mine_negatives(plain, h, r, cfg).negatives) {
        const auto& p = suite.corpus.at(id);
        if (testing::squash(p.title + " " + p.text).find(answer) != std::string::npos) {
          ++unfiltered_leaks;
        }
      }
    }
  }
  f.check(leaks == 0, std::to_string(leaks) + " mined negative(s) contain the sub-answer");
  f.check(close == 0, std::to_string(close) + " mined negative(s) exceed cosine 0.95");
  f.check(mined > 0, "nothing was mined");
  f.check(unfiltered_leaks > 0, "planted leaks are not competitive without the filter");
}

std::vector<double> hits_row(const HitsTable& t, std::size_t k) {
  std::vector<double> out;
  for (const auto& c : t.per_k.at(k)) out.push_back(c.hits);
  return out;
}

// 4. Hits@k semantics.
void evaluation_semantics(Failures& f) {
  const auto pf = testing::planted_failure();
  const std::vector<std::size_t> ks{1, 2, 5, 10};
  const auto t = evaluate_hits(pf->instances, *pf->retriever, ks);
  f.check(hits_row(t, 1) == std::vector<double>{1.0, 2.0 / 3.0, 0.0}, "Hits@1 row");
  f.check(hits_row(t, 2) == std::vector<double>{1.0, 1.0, 0.5}, "Hits@2 row");
  f.check(hits_row(t, 5) == std::vector<double>{1.0, 1.0, 0.5}, "Hits@5 row");
  f.check(hits_row(t, 10) == std::vector<double>{1.0, 1.0, 1.0}, "Hits@10 row");
  f.check(t.avg_per_k.at(1) == 5.0 / 8.0, "micro avg @1");
  f.check(t.avg_per_k.at(2) == 7.0 / 8.0, "micro avg @2");
  f.check(t.avg_per_k.at(5) == 7.0 / 8.0, "micro avg @5");
  f.check(t.avg_per_k.at(10) == 1.0, "micro avg @10");
  for (const auto& c : t.per_k.at(1)) {
    f.check(c.denominator == (c.hop == 3 ? 2u : 3u), "denominator at hop " + std::to_string(c.hop));
  }

  const ReferenceEmbedder emb(64);
  const std::vector<std::size_t> all_ks{1, 2, 3, 5, 10, 50};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto w = testing::random_world(1000 + seed);
    const auto idx = build_index(w.corpus.passages(), emb, "d");
    const Retriever r(w.corpus, idx, emb);
    for (auto order : {GoldOrder::ordered, GoldOrder::unordered}) {
      const auto table = evaluate_hits(w.instances, r, all_ks, 0, order);
      for (std::size_t j = 0; j < all_ks.size(); ++j) {
        const auto& row = table.per_k.at(all_ks[j]);
        for (std::size_t h = 0; h < row.size(); ++h) {
          const std::string where = "world " + std::to_string(seed) + " k=" +
                                    std::to_string(all_ks[j]) + " hop " + std::to_string(h + 1);
          if (h > 0) f.check(row[h].successes <= row[h - 1].successes, where + ": cascade");
          if (j > 0) {
            f.check(row[h].hits >= table.per_k.at(all_ks[j - 1])[h].hits, where + ": k-monotone");
          }
        }
      }
    }
  }
}

std::vector<HopTrace> run_all(const Retriever& r, const std::vector<MultiHopInstance>& xs,
                              const StopPolicy& policy, bool oracle) {
  std::vector<HopTrace> out;
  for (const auto& m : xs) {
    const auto control = oracle ? oracle_control(m) : nullptr;
    out.push_back(run_chain(r, {m.id, m.query, m.task_kind}, policy, 10, control.get()));
  }
  return out;
}

// 5. End-to-end solvability of the constructed suite.
void synthetic_solvability(Failures& f) {
  const auto suite = testing::synthetic_suite({});
  const ReferenceEmbedder emb(suite.dim);
  const auto idx = build_index(suite.corpus.passages(), emb, Instructions{}.document);
  const Retriever r(suite.corpus, idx, emb);
  const std::vector<std::size_t> ks{1};
  const auto t = evaluate_hits(suite.instances, r, ks);
  f.check(t.max_hop == 4, "suite does not reach 4 hops");
  for (const auto& c : t.per_k.at(1)) {
    f.check(c.hits == 1.0, "Hits@1 at hop " + std::to_string(c.hop) + " is " +
                               std::to_string(c.hits));
  }
  const auto traces = run_all(r, suite.instances, StopPolicy::control(10), true);
  const auto d = diagnose(traces, suite.instances);
  std::size_t gold_total = 0;
  for (const auto& m : suite.instances) gold_total += m.gold_chain.size();
  const double gold_mean = static_cast<double>(gold_total) / suite.instances.size();
  f.check(suite.instances.size() == 100, "suite size");
  f.check(d.early_stops == 0, std::to_string(d.early_stops) + " early stop(s)");
  f.check(d.overshoots == 0, std::to_string(d.overshoots) + " overshoot(s)");
  f.check(d.avg_hops == gold_mean, "avg_hops " + std::to_string(d.avg_hops) +
                                       " != gold mean " + std::to_string(gold_mean));
}

// 6. score_decrease against oracle control.
void stopping_contrast(Failures& f, std::string& detail) {
  testing::SuiteShape shape;
  shape.seed = 6;
  const auto suite = testing::synthetic_suite(shape);
  const ReferenceEmbedder emb(suite.dim);
  const auto idx = build_index(suite.corpus.passages(), emb, Instructions{}.document);
  const Retriever r(suite.corpus, idx, emb);

  // The suite must actually have decreasing top-1 scores after hop 1.
  std::size_t decreasing = 0;
  for (const auto& m : suite.instances) {
    const auto s1 = r.retrieve_step(gold_prefix_chain(m, suite.corpus, 0, Instructions{}), 1);
    const auto s2 = r.retrieve_step(gold_prefix_chain(m, suite.corpus, 1, Instructions{}), 1);
    if (s2.top().score < s1.top().score) ++decreasing;
  }
  f.check(decreasing == suite.instances.size(),
          "top-1 score decreases after hop 1 for only " + std::to_string(decreasing) +
              " instance(s)");

  const auto sd = diagnose(run_all(r, suite.instances, StopPolicy::score_decrease(10), false),
                           suite.instances);
  const auto oc = diagnose(run_all(r, suite.instances, StopPolicy::control(10), true),
                           suite.instances);
  std::ostringstream s;
  s << "score_decrease early=" << sd.early_stops << " avg_hops=" << sd.avg_hops
    << "; control+oracle early=" << oc.early_stops << " avg_hops=" << oc.avg_hops;
  detail = s.str();
  f.check(sd.early_stops > oc.early_stops, "early stops not strictly higher");
  f.check(sd.avg_hops < oc.avg_hops, "avg_hops not strictly lower");
}

// 7. Cost formulas and the empirical benchmark.
void cost_model(Failures& f, std::string& detail) {
  std::mt19937_64 rng(77);
  const CostFunctions quadratic{[](double l) { return l * l; },
                                [](double p) { return 2.0 * p; }};
  for (int i = 0; i < 50; ++i) {
    // Integer draws keep every oracle product below 2^53, so the double
    // results must match the integer arithmetic exactly.
    const std::uint64_t q = 1 + rng() % 1000, h = 1 + rng() % 4, p = 1 + rng() % 100000,
                        lq = 1 + rng() % 1000, lp = 1 + rng() % 1000;
    const WorkloadParams w{double(q), double(h), double(p), double(lq), double(lp)};
    const std::string tag = "set " + std::to_string(i);
    f.check(cross_encoder_cost(w, CostFunctions::linear()) == double(q * h * p * (lq + lp)),
            tag + ": linear cross");
    const auto d = dense_cost(w, CostFunctions::linear());
    f.check(d.offline == double(p * lp), tag + ": linear dense offline");
    f.check(d.online == double(q * h * (lq + p)), tag + ": linear dense online");
    f.check(cross_encoder_cost(w, quadratic) == double(q * h * p * (lq + lp) * (lq + lp)),
            tag + ": quadratic cross");
    const auto dq = dense_cost(w, quadratic);
    f.check(dq.offline == double(p * lp * lp), tag + ": quadratic dense offline");
    f.check(dq.online == double(q * h * (lq * lq + 2 * p)), tag + ": quadratic dense online");
  }

  BenchConfig config;
  config.corpus_sizes = {1000, 10000, 100000};
  const ReferenceEmbedder emb;
  const auto report = bench_empirical(config, emb);
  std::ostringstream s;
  s << "slope ratio " << report.slope_ratio << " (threshold " << config.min_slope_ratio << ")";
  for (const auto& w : report.warnings) s << "; warning: " << w;
  detail = s.str();
  f.check(config.min_slope_ratio == 5.0, "threshold changed");
  f.check(report.passes && report.slope_ratio > 5.0, "slope ratio below threshold");
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) {
      files[fs::relative(e.path(), dir).string()] = testing::read_file(e.path());
    }
  }
  return files;
}

// 8. Every CLI stage twice, same seed and reference provider, same paths.
void determinism(Failures& f) {
  testing::TempDir dir("acceptance-determinism");
  const auto p = [&](const std::string& name) { return dir.file(name); };
  testing::SuiteShape shape;
  shape.instances = 30;
  shape.distractors = 30;
  const auto suite = testing::synthetic_suite(shape);
  fs::create_directories(dir.path() / "in");
  testing::write_suite_files(suite, dir.path() / "in" / "src.jsonl",
                             dir.path() / "in" / "src_corpus.jsonl");
  const std::vector<std::string> common{"--dim", "2048", "--seed", "13", "--workers", "2"};
  const std::vector<std::string> data{"--dataset", p("data.jsonl"), "--corpus",
                                      p("corpus.jsonl")};
  const auto with = [&](std::vector<std::string> a, const std::vector<std::string>& extra) {
    a.insert(a.end(), extra.begin(), extra.end());
    a.insert(a.end(), common.begin(), common.end());
    return a;
  };
  const std::vector<std::pair<std::string, std::vector<std::string>>> stages{
      {"ingest", with({"ingest", "--input", p("in/src.jsonl"), "--corpus",
                       p("in/src_corpus.jsonl"), "--out", p("data.jsonl"), "--out-corpus",
                       p("corpus.jsonl"), "--report", p("load.json")}, {})},
      {"index build", with({"index", "build", "--corpus", p("corpus.jsonl"), "--out",
                            p("c.idx")}, {})},
      {"index search", with({"index", "search", "--idx", p("c.idx"), "--query",
                             suite.instances[0].query, "--out", p("search.json")}, {})},
      {"mine", with({"mine", "--idx", p("c.idx"), "--out", p("mined.jsonl")}, data)},
      {"build-dataset", with({"build-dataset", "--idx", p("c.idx"), "--out", p("train")}, data)},
      {"retrieve", with({"retrieve", "--idx", p("c.idx"), "--policy", "control", "--control",
                         "oracle", "--omit-latency", "--out", p("traces.jsonl")}, data)},
      {"evaluate", with({"evaluate", "--idx", p("c.idx"), "--traces", p("traces.jsonl"),
                         "--ks", "1,5", "--markdown", p("report.md"), "--out",
                         p("report.json")}, data)},
      {"report", with({"report", "--input", p("report.json"), "--out", p("report2.md")}, {})},
  };
  std::map<std::string, std::string> before;
  for (const auto& [name, args] : stages) {
    const auto first = testing::run_cli(args);
    f.check(first.code == 0, name + " failed: " + first.err);
    const auto after_first = snapshot(dir.path());
    const auto second = testing::run_cli(args);
    f.check(second.code == 0, name + " failed on rerun: " + second.err);
    f.check(first.out == second.out, name + ": stdout differs");
    const auto after_second = snapshot(dir.path());
    std::size_t written = 0;
    for (const auto& [file, bytes] : after_first) {
      if (before.count(file) && before.at(file) == bytes) continue;
      ++written;
      f.check(after_second.count(file) && after_second.at(file) == bytes,
              name + ": " + file + " differs between runs");
    }
    f.check(written > 0, name + " wrote no files");
    f.check(after_second.size() == after_first.size(), name + ": file set differs");
    before = after_second;
  }
}

struct Criterion {
  int number;
  std::string title;
  double limit_seconds;  // 0: no runtime bound
  std::function<void(Failures&, std::string&)> run;
};

}  // namespace
}  // namespace hopscan

int main() {
  using namespace hopscan;
  const std::vector<Criterion> criteria{
      {1, "index exactness vs brute-force oracle", 60,
       [](Failures& f, std::string&) { index_exactness(f); }},
      {2, "training samples: counts, golden texts, prefix property", 5,
       [](Failures& f, std::string&) { sample_fidelity(f); }},
      {3, "mining filters on the planted-leak corpus", 10,
       [](Failures& f, std::string&) { mining_filters(f); }},
      {4, "Hits@k on the planted-failure fixture and 100 random datasets", 0,
       [](Failures& f, std::string&) { evaluation_semantics(f); }},
      {5, "synthetic end-to-end solvability", 30,
       [](Failures& f, std::string&) { synthetic_solvability(f); }},
      {6, "score_decrease vs oracle-controlled stopping", 0, stopping_contrast},
      {7, "cost model oracle and empirical slope ratio", 300, cost_model},
      {8, "byte-identical reruns of every pipeline stage", 0,
       [](Failures& f, std::string&) { determinism(f); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Failures f;
    std::string detail;
    const auto t0 = Clock::now();
    try {
      c.run(f, detail);
    } catch (const std::exception& e) {
      f.check(false, std::string("exception: ") + e.what());
    }
    const double secs = seconds_since(t0);
    if (c.limit_seconds > 0) {
      f.check(secs < c.limit_seconds,
              "runtime " + std::to_string(secs) + " s exceeds " +
                  std::to_string(c.limit_seconds) + " s");
    }
    std::cout << (f.ok() ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.title
              << " (" << std::fixed << std::setprecision(2) << secs << " s)";
    std::cout.unsetf(std::ios::fixed);
    if (!detail.empty()) std::cout << " [" << detail << "]";
    std::cout << "\n";
    if (!f.ok()) {
      std::cout << "    " << f.summary() << "\n";
      ++failed;
    }
    std::cout.flush();
  }
  return failed == 0 ? 0 : 1;
}
