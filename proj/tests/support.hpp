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

// Fixtures and independent oracles shared by the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopscan/core.hpp"
#include "hopscan/embedding.hpp"
#include "hopscan/engine.hpp"
#include "hopscan/error.hpp"
#include "hopscan/index.hpp"
#include "hopscan/miner.hpp"

namespace hopscan::testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("hopscan-" + tag + "-" + std::to_string(rd()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << body;
}

// Returns vectors fixed in advance for exact request texts. Anything else is
// a test bug and throws.
class ScriptedEmbedder final : public EmbeddingProvider {
 public:
  explicit ScriptedEmbedder(std::size_t dim) : dim_(dim) {}

  void set(const std::string& text, std::vector<float> v) {
    double n = 0;
    for (float x : v) n += static_cast<double>(x) * x;
    n = std::sqrt(n);
    for (float& x : v) x = static_cast<float>(x / n);
    table_[text] = std::move(v);
  }

  std::string name() const override { return "scripted"; }
  std::size_t dimension() const override { return dim_; }
  Vector embed(const EmbeddingRequest& r) const override {
    const auto it = table_.find(r.text);
    if (it == table_.end()) throw InvalidArgument("unscripted text: " + r.text);
    return {it->second};
  }

 private:
  std::size_t dim_;
  std::map<std::string, std::vector<float>> table_;
};

inline std::vector<float> one_hot(std::size_t dim, std::size_t i) {
  std::vector<float> v(dim, 0.0f);
  v[i] = 1.0f;
  return v;
}

inline double oracle_dot(std::span<const float> a, std::span<const float> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += double(a[i]) * double(b[i]);
  return s;
}

// Full scan, full sort, then cut. Written independently of search().
inline std::vector<ScoredPassage> brute_force_search(
    const VectorIndex& index, std::span<const float> q, std::size_t k,
    const std::set<std::string>& exclude = {}) {
  std::vector<ScoredPassage> all;
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (exclude.count(index.id(r))) continue;
    all.push_back({index.id(r), oracle_dot(index.vector(r), q)});
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.passage_id < b.passage_id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

inline std::vector<float> random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g;
  std::vector<double> d(dim);
  double n = 0;
  for (auto& x : d) {
    x = g(rng);
    n += x * x;
  }
  n = std::sqrt(n);
  std::vector<float> v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = static_cast<float>(d[i] / n);
  return v;
}

// Every fifth vector repeats an earlier one so ties occur.
inline VectorIndex random_index(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  VectorIndex idx(dim, {"test", "doc", true, 0, ""});
  std::vector<std::vector<float>> kept;
  for (std::size_t i = 0; i < n; ++i) {
    auto v = (i % 5 == 4 && !kept.empty()) ? kept[rng() % kept.size()]
                                           : random_unit(rng, dim);
    kept.push_back(v);
    idx.add("p" + std::to_string(rng() % 100000) + "-" + std::to_string(i), v);
  }
  return idx;
}

struct RandomWorld {
  Corpus corpus;
  std::vector<MultiHopInstance> instances;
};

inline RandomWorld random_world(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Passage> ps;
  const std::size_t n = 15 + rng() % 20;
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    for (int w = 0; w < 6; ++w) text += " v" + std::to_string(rng() % 25);
    ps.push_back({"p" + std::to_string(i), "", text});
  }
  RandomWorld w;
  for (int i = 0; i < 8; ++i) {
    MultiHopInstance m{"i" + std::to_string(i), TaskKind::question_answering,
                       "v" + std::to_string(rng() % 25) + " v" + std::to_string(rng() % 25),
                       {}, std::nullopt, "a"};
    const std::size_t hops = 1 + rng() % 4;
    std::set<std::size_t> used;
    while (m.gold_chain.size() < hops) {
      const std::size_t p = rng() % n;
      if (used.insert(p).second) m.gold_chain.push_back(ps[p].id);
    }
    w.instances.push_back(std::move(m));
  }
  w.corpus = Corpus(std::move(ps));
  return w;
}

inline std::string squash(std::string_view s) {
  std::string out;
  bool space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

// Scores the whole corpus, keeps the pool, applies the three filters one by
// one, then cuts.
inline MinedNegatives oracle_mine(const MultiHopInstance& m, std::size_t hop,
                           const Retriever& r, const MiningConfig& cfg) {
  const auto& index = r.index();
  const auto q = r.embed_chain(
      gold_prefix_chain(m, r.corpus(), hop, r.options().instructions));
  auto ranked = brute_force_search(index, q.values, cfg.pool_size);
  const auto pos = index.vector(*index.row_of(m.gold_chain[hop]));
  MinedNegatives out{m.id, hop, {}, std::nullopt, false};
  for (const auto& c : ranked) {
    if (std::count(m.gold_chain.begin(), m.gold_chain.end(), c.passage_id)) continue;
    if (m.decomposition) {
      const auto& p = r.corpus().at(c.passage_id);
      const std::string doc = p.title.empty() ? p.text : p.title + " | " + p.text;
      if (squash(doc).find(squash((*m.decomposition)[hop].sub_answer)) !=
          std::string::npos) {
        continue;
      }
    }
    if (oracle_dot(index.vector(*index.row_of(c.passage_id)), pos) >
        cfg.similarity_ceiling) {
      continue;
    }
    out.negatives.push_back(c.passage_id);
  }
  if (out.negatives.size() > cfg.negatives_per_positive) {
    out.negatives.resize(cfg.negatives_per_positive);
  }
  if (!out.negatives.empty()) out.hardest = out.negatives.front();
  out.insufficient = out.negatives.size() < cfg.negatives_per_positive;
  return out;
}


// A corpus for the reference embedder whose nearest neighbours are known by
// construction. Instance i owns bridge tokens b0..bH, each hashed to a bucket
// no other token of the suite touches. The query carries b0; gold passage h
// carries b(h-1) and bh. Teacher-forced chains therefore share a bucket with
// exactly one unretrieved passage: the next gold one. Every other passage has
// the same norm and scores the same, so the gold passage wins strictly.
struct SyntheticSuite {
  Corpus corpus;
  std::vector<MultiHopInstance> instances;
  std::size_t dim = 0;
};

struct SuiteShape {
  std::size_t instances = 100;
  std::size_t min_hops = 2;
  std::size_t max_hops = 4;
  std::size_t distractors = 50;
  std::size_t dim = 2048;
  std::size_t query_repeat = 3;
  std::uint64_t seed = 1;
};

inline SyntheticSuite synthetic_suite(const SuiteShape& shape) {
  const ReferenceEmbedder emb(shape.dim);
  const Instructions inst;
  std::set<std::size_t> used;
  const std::string fixed =
      inst.question + " " + inst.claim + " " + inst.document +
      " Question Claim Document Eval Relevant Irrelevant Retrieve next Final "
      "Answer Stop which record follows is linked to";
  for (const auto& t : ReferenceEmbedder::tokenize(fixed)) used.insert(emb.bucket(t));

  std::size_t next = 0;
  const auto fresh = [&] {
    for (;;) {
      std::string t = "z" + std::to_string(next++) + "q";
      const std::size_t b = emb.bucket(t);
      if (used.insert(b).second) return t;
      if (used.size() >= shape.dim) throw std::runtime_error("suite: out of buckets");
    }
  };
  const auto rep = [](const std::string& t, std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + t;
    return s;
  };

  std::mt19937_64 rng(shape.seed);
  std::vector<Passage> passages;
  SyntheticSuite suite;
  suite.dim = shape.dim;
  const std::size_t span = shape.max_hops - shape.min_hops + 1;
  for (std::size_t i = 0; i < shape.instances; ++i) {
    const std::size_t hops = shape.min_hops + rng() % span;
    std::vector<std::string> bridge;
    for (std::size_t h = 0; h <= hops; ++h) bridge.push_back(fresh());
    MultiHopInstance m;
    m.id = "syn" + std::to_string(1000 + i);
    m.task_kind = i % 2 ? TaskKind::fact_checking : TaskKind::question_answering;
    m.query = m.task_kind == TaskKind::question_answering
                  ? "which record follows " + rep(bridge[0], shape.query_repeat)
                  : rep(bridge[0], shape.query_repeat) + " is linked to";
    m.answer = m.task_kind == TaskKind::question_answering ? "answer " + bridge[hops]
                                                           : std::string(kSupported);
    for (std::size_t h = 1; h <= hops; ++h) {
      Passage p{m.id + "-g" + std::to_string(h), "",
                rep(bridge[h - 1], 2) + " " + rep(bridge[h], 2)};
      m.gold_chain.push_back(p.id);
      passages.push_back(std::move(p));
    }
    suite.instances.push_back(std::move(m));
  }
  for (std::size_t d = 0; d < shape.distractors; ++d) {
    const auto a = fresh();
    const auto b = fresh();
    passages.push_back({"dis" + std::to_string(1000 + d), "",
                        rep(a, 2) + " " + rep(b, 2)});
  }
  suite.corpus = Corpus(std::move(passages));
  return suite;
}

// Mining fixture: every hop has passages that leak its sub-answer (in varied
// case and spacing), an exact copy of its positive, and a near copy, all of
// them lexically close to the hop's chain so they land in the candidate pool.
struct LeakSuite {
  Corpus corpus;
  std::vector<MultiHopInstance> instances;
};

inline LeakSuite planted_leak_suite(std::size_t instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> fillers = {
      "river", "castle", "engine", "garden", "violin", "harbor", "meadow",
      "lantern", "glacier", "orchard", "compass", "falcon", "canyon", "pepper"};
  const auto words = [&](std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += " " + fillers[rng() % fillers.size()];
    return s;
  };
  std::vector<Passage> ps;
  LeakSuite suite;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::string tag = "inst" + std::to_string(i);
    const std::size_t hops = 2 + i % 2;
    MultiHopInstance m;
    m.id = "leak-" + std::to_string(i);
    m.query = "what links " + tag + " topic" + std::to_string(i) + words(2);
    std::vector<SubStep> steps;
    for (std::size_t h = 0; h < hops; ++h) {
      const std::string ans = "Answer" + std::to_string(i) + " Token" + std::to_string(h);
      const std::string key = tag + " topic" + std::to_string(i) + " hop" + std::to_string(h);
      Passage gold{m.id + "-g" + std::to_string(h), "",
                   key + (h % 2 == 0 ? " " + ans : std::string()) + words(8)};
      ps.push_back(gold);
      m.gold_chain.push_back(gold.id);
      steps.push_back({"sub question " + std::to_string(h), ans});
      ps.push_back({m.id + "-copy" + std::to_string(h), "", gold.text});
      ps.push_back({m.id + "-near" + std::to_string(h), "", gold.text + " extra"});
      std::string shouted = ans;
      for (auto& c : shouted) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      const auto space = shouted.find(' ');
      shouted.replace(space, 1, "  \n ");
      ps.push_back({m.id + "-leakA" + std::to_string(h), "", key + " " + shouted + words(4)});
      ps.push_back({m.id + "-leakB" + std::to_string(h), "Leak", key + words(3) + " " + ans});
      ps.push_back({m.id + "-clean" + std::to_string(h), "", key + words(6)});
    }
    m.decomposition = steps;
    m.answer = steps.back().sub_answer;
    suite.instances.push_back(std::move(m));
  }
  for (std::size_t d = 0; d < 10; ++d) {
    ps.push_back({"noise" + std::to_string(d), "", "noise" + words(6)});
  }
  suite.corpus = Corpus(std::move(ps));
  return suite;
}

// Three instances whose gold ranks are scripted directly. Passages are one-hot
// vectors; each teacher-forced chain is a weight vector over passages.
//   A (3 hops): gold ranks 1, 2, 1
//   B (2 hops): gold ranks 1, 1
//   C (3 hops): gold ranks 1, 1, 6
struct PlantedFailure {
  Corpus corpus;
  std::vector<MultiHopInstance> instances;
  ScriptedEmbedder emb{14};
  VectorIndex index;
  std::unique_ptr<Retriever> retriever;
};

inline std::unique_ptr<PlantedFailure> planted_failure() {
  auto f = std::make_unique<PlantedFailure>();
  const std::vector<std::string> ids{"A1", "A2", "A3", "B1", "B2", "C1", "C2",
                                     "C3", "D1", "D2", "D3", "D4", "D5", "D6"};
  std::vector<Passage> ps;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ps.push_back({ids[i], "", "passage " + ids[i]});
    f->emb.set("passage " + ids[i], one_hot(ids.size(), i));
  }
  f->corpus = Corpus(ps);
  f->index = build_index(f->corpus.passages(), f->emb, "doc");
  f->retriever = std::make_unique<Retriever>(f->corpus, f->index, f->emb);
  const auto row = [&](const std::string& id) {
    return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin());
  };
  const std::map<std::string, std::vector<std::size_t>> ranks{
      {"A", {1, 2, 1}}, {"B", {1, 1}}, {"C", {1, 1, 6}}};
  const std::vector<float> decoy{0.9f, 0.85f, 0.8f, 0.75f, 0.7f, 0.65f};
  for (const auto& [name, hop_ranks] : ranks) {
    MultiHopInstance m{name, TaskKind::question_answering, "query " + name, {},
                       std::nullopt, "answer " + name};
    for (std::size_t h = 1; h <= hop_ranks.size(); ++h) {
      m.gold_chain.push_back(name + std::to_string(h));
    }
    for (std::size_t h = 0; h < hop_ranks.size(); ++h) {
      std::vector<float> w(ids.size(), 0.0f);
      w[row(m.gold_chain[h])] = 0.5f;
      for (std::size_t d = 0; d + 1 < hop_ranks[h]; ++d) {
        w[row("D" + std::to_string(d + 1))] = decoy[d];
      }
      const Chain c = gold_prefix_chain(m, f->corpus, h, Instructions{});
      f->emb.set(f->retriever->chain_request(c).text, w);
    }
    f->instances.push_back(std::move(m));
  }
  return f;
}

}  // namespace hopscan::testing
