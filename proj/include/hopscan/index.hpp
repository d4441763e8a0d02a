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
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hopscan/core.hpp"
#include "hopscan/embedding.hpp"

namespace hopscan {

struct IndexMetadata {
  std::string provider_name;
  std::string instruction_document;
  // Whether query chains searched against this index carry action markers.
  bool include_actions = true;
  std::int64_t build_timestamp = 0;
  std::string provenance;  // serialized run configuration, may be empty

  bool operator==(const IndexMetadata&) const = default;
};

struct ScoredPassage {
  std::string passage_id;
  double score = 0.0;

  bool operator==(const ScoredPassage&) const = default;
};

// Descending by score, ties by ascending passage id.
struct SearchResult {
  std::vector<ScoredPassage> ranked;

  bool empty() const { return ranked.empty(); }
  std::size_t size() const { return ranked.size(); }
  const ScoredPassage& top() const { return ranked.front(); }
  // 0-based rank of the passage, if present.
  std::optional<std::size_t> rank_of(std::string_view passage_id) const;
  bool operator==(const SearchResult&) const = default;
};

// Flat store of unit vectors keyed by passage id. Rows are kept in insertion
// order; vectors are packed contiguously.
class VectorIndex {
 public:
  VectorIndex() = default;
  VectorIndex(std::size_t dimension, IndexMetadata metadata);

  // Throws DuplicatePassageId, DimensionMismatch, or InvalidArgument for a
  // vector that is not unit length.
  void add(std::string passage_id, std::span<const float> vector);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return ids_.size(); }
  const IndexMetadata& metadata() const { return metadata_; }

  const std::string& id(std::size_t row) const { return ids_[row]; }
  std::span<const float> vector(std::size_t row) const {
    return {data_.data() + row * dimension_, dimension_};
  }
  std::optional<std::size_t> row_of(std::string_view passage_id) const;

  bool operator==(const VectorIndex& other) const;

 private:
  std::size_t dimension_ = 0;
  IndexMetadata metadata_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::map<std::string, std::size_t, std::less<>> rows_;
};

inline constexpr double kUnitNormTolerance = 1e-5;

// Embeds every passage as a document (title and text joined by " | " when a
// title exists). Throws DuplicatePassageId, ProviderUnavailable.
VectorIndex build_index(std::span<const Passage> corpus,
                        const EmbeddingProvider& provider,
                        const std::string& instruction_document,
                        IndexMetadata metadata = {}, std::size_t workers = 1);

// Text embedded for a passage on the document side.
std::string document_text(const Passage& passage);

// Exact top-k by dot product over entries not in `exclude`.
// Throws DimensionMismatch, InvalidArgument (k == 0).
SearchResult search(const VectorIndex& index, std::span<const float> query,
                    std::size_t k,
                    std::span<const std::string> exclude = {});

inline constexpr std::uint32_t kIndexFormatVersion = 1;

// Little-endian binary layout documented in docs/index-format.md.
void save_index(const VectorIndex& index, const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_index(const VectorIndex& index);
// Throws CorruptIndex, IoError.
VectorIndex load_index(const std::filesystem::path& path);
VectorIndex deserialize_index(std::span<const std::uint8_t> bytes);

}  // namespace hopscan
