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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hopscan/core.hpp"
#include "json.hpp"

namespace hopscan {

enum class SourceFormat { canonical_jsonl, musique_like, hotpot_like, fever_like };

std::string_view to_string(SourceFormat format);
SourceFormat parse_source_format(std::string_view s);

struct DatasetDescriptor {
  std::string name;
  TaskKind task_kind = TaskKind::question_answering;
  bool has_decomposition = false;
  GoldOrder gold_order = GoldOrder::ordered;
  SourceFormat source_format = SourceFormat::canonical_jsonl;
  // Keep only instances whose (collapsed) gold length is within bounds;
  // 0 leaves a bound open.
  std::size_t min_hops = 0;
  std::size_t max_hops = 0;
  // Passages file ({id, title, text} per line) loaded before the dataset.
  std::optional<std::filesystem::path> corpus_path;
  // fever_like: keep only SUPPORTED claims.
  bool supported_only = false;
  // Throw DanglingGoldReference instead of rejecting the instance.
  bool strict = false;

  // Throws InvalidArgument (e.g. musique_like without decomposition).
  void validate() const;
};

struct CollapsedChain {
  std::string instance_id;
  std::size_t original_length = 0;
  std::size_t collapsed_length = 0;
};

struct RejectedInstance {
  std::size_t line = 0;
  std::string instance_id;
  std::string reason;
};

struct LoadReport {
  std::size_t lines_read = 0;
  std::size_t passages_read = 0;
  std::size_t passages_deduplicated = 0;
  std::size_t instances_loaded = 0;
  std::size_t filtered_by_hops = 0;
  std::size_t filtered_by_label = 0;
  std::vector<CollapsedChain> collapsed;
  std::vector<RejectedInstance> rejected;
};

struct LoadedDataset {
  Corpus corpus;
  std::vector<MultiHopInstance> instances;
  LoadReport report;
};

// Streams the file once, normalizing the source format into canonical
// instances. Passages with identical title and text collapse to the first
// id seen; repeated evidence inside a gold chain collapses to its first
// occurrence. Throws SchemaError (with line), DuplicatePassageId (same id,
// different content), DanglingGoldReference in strict mode, IoError.
LoadedDataset load_dataset(const std::filesystem::path& path,
                           const DatasetDescriptor& descriptor);

// Passages file only.
Corpus load_corpus(const std::filesystem::path& path);

// Canonical dataset and corpus files; load_dataset reads them back to the
// same instances.
void write_canonical(const LoadedDataset& dataset,
                     const std::filesystem::path& dataset_path,
                     const std::filesystem::path& corpus_path);

void to_json(nlohmann::json& j, const MultiHopInstance& inst);
void to_json(nlohmann::json& j, const Passage& p);
nlohmann::json load_report_json(const LoadReport& report);

struct HopHistogram {
  std::map<std::size_t, std::size_t> per_hop;  // gold length -> instances
  std::size_t total = 0;

  bool operator==(const HopHistogram&) const = default;
};

// Buckets 1..4 are always present (possibly zero).
HopHistogram stats(std::span<const MultiHopInstance> instances);
nlohmann::json stats_json(const HopHistogram& h);

}  // namespace hopscan
