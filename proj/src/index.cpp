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

#include "hopscan/index.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "hopscan/error.hpp"
#include "hopscan/parallel.hpp"

namespace hopscan {

std::optional<std::size_t> SearchResult::rank_of(
    std::string_view passage_id) const {
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i].passage_id == passage_id) return i;
  }
  return std::nullopt;
}

VectorIndex::VectorIndex(std::size_t dimension, IndexMetadata metadata)
    : dimension_(dimension), metadata_(std::move(metadata)) {
  if (dimension_ == 0) throw InvalidArgument("index dimension must be > 0");
}

void VectorIndex::add(std::string passage_id, std::span<const float> vector) {
  if (vector.size() != dimension_) {
    throw DimensionMismatch("vector for '" + passage_id + "' has " +
                            std::to_string(vector.size()) + " values, index " +
                            std::to_string(dimension_));
  }
  if (std::abs(l2_norm(vector) - 1.0) > kUnitNormTolerance) {
    throw InvalidArgument("vector for '" + passage_id + "' is not unit length");
  }
  if (rows_.contains(passage_id)) throw DuplicatePassageId(passage_id);
  rows_.emplace(passage_id, ids_.size());
  ids_.push_back(std::move(passage_id));
  data_.insert(data_.end(), vector.begin(), vector.end());
}

std::optional<std::size_t> VectorIndex::row_of(
    std::string_view passage_id) const {
  auto it = rows_.find(passage_id);
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

bool VectorIndex::operator==(const VectorIndex& other) const {
  return dimension_ == other.dimension_ && metadata_ == other.metadata_ &&
         ids_ == other.ids_ && data_ == other.data_;
}

std::string document_text(const Passage& passage) {
  if (passage.title.empty()) return passage.text;
  return passage.title + " | " + passage.text;
}

VectorIndex build_index(std::span<const Passage> corpus,
                        const EmbeddingProvider& provider,
                        const std::string& instruction_document,
                        IndexMetadata metadata, std::size_t workers) {
  if (corpus.empty()) throw InvalidArgument("cannot index an empty corpus");
  std::set<std::string_view> seen;
  for (const auto& p : corpus) {
    if (!seen.insert(p.id).second) throw DuplicatePassageId(p.id);
  }

  metadata.provider_name = provider.name();
  metadata.instruction_document = instruction_document;

  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (corpus.size() + kChunk - 1) / kChunk;
  std::vector<std::vector<Vector>> embedded(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(corpus.size(), begin + kChunk);
    std::vector<EmbeddingRequest> requests;
    requests.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      requests.push_back({document_text(corpus[i]), EmbeddingRole::document,
                          instruction_document});
    }
    embedded[c] = provider.embed_batch(requests);
  });

  VectorIndex index(provider.dimension(), std::move(metadata));
  std::size_t i = 0;
  for (const auto& chunk : embedded) {
    for (const auto& v : chunk) index.add(corpus[i++].id, v.values);
  }
  return index;
}

SearchResult search(const VectorIndex& index, std::span<const float> query,
                    std::size_t k, std::span<const std::string> exclude) {
  if (query.size() != index.dimension()) {
    throw DimensionMismatch("query has " + std::to_string(query.size()) +
                            " values, index " +
                            std::to_string(index.dimension()));
  }
  if (k == 0) throw InvalidArgument("k must be >= 1");

  std::vector<bool> excluded(index.size(), false);
  for (const auto& id : exclude) {
    if (auto row = index.row_of(id)) excluded[*row] = true;
  }

  struct Candidate {
    double score;
    std::size_t row;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(index.size());
  for (std::size_t row = 0; row < index.size(); ++row) {
    if (excluded[row]) continue;
    candidates.push_back({dot(query, index.vector(row)), row});
  }

  const auto better = [&index](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return index.id(a.row) < index.id(b.row);
  };
  const std::size_t n = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + n,
                    candidates.end(), better);

  SearchResult result;
  result.ranked.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.ranked.push_back({index.id(candidates[i].row), candidates[i].score});
  }
  return result;
}

namespace {

constexpr std::uint8_t kMagic[4] = {'H', 'S', 'I', 'X'};

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u32(bits);
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }
  std::span<const std::uint8_t> view() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_++]} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_++]} << (8 * i);
    return v;
  }
  float f32() {
    const std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw CorruptIndex("truncated file");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc(std::span<const std::uint8_t> bytes) {
  uLong c = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in bounded chunks.
  constexpr std::size_t kMaxChunk = 1u << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kMaxChunk) {
    const std::size_t len = std::min(kMaxChunk, bytes.size() - off);
    c = crc32(c, bytes.data() + off, static_cast<uInt>(len));
  }
  return static_cast<std::uint32_t>(c);
}

}  // namespace

std::vector<std::uint8_t> serialize_index(const VectorIndex& index) {
  Writer w;
  for (std::uint8_t b : kMagic) w.u8(b);
  w.u32(kIndexFormatVersion);
  w.u32(static_cast<std::uint32_t>(index.dimension()));
  w.u64(index.size());
  const IndexMetadata& m = index.metadata();
  w.str(m.provider_name);
  w.str(m.instruction_document);
  w.u8(m.include_actions ? 1 : 0);
  w.u64(static_cast<std::uint64_t>(m.build_timestamp));
  w.str(m.provenance);
  for (std::size_t row = 0; row < index.size(); ++row) w.str(index.id(row));
  for (std::size_t row = 0; row < index.size(); ++row) {
    for (float x : index.vector(row)) w.f32(x);
  }
  w.u32(crc(w.view()));
  return w.take();
}

VectorIndex deserialize_index(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof kMagic + 4 ||
      !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw CorruptIndex("bad magic");
  }
  Reader header(bytes.subspan(sizeof kMagic));
  const std::uint32_t version = header.u32();
  if (version != kIndexFormatVersion) {
    throw CorruptIndex("unsupported format version " + std::to_string(version));
  }
  if (bytes.size() < sizeof kMagic + 8) throw CorruptIndex("truncated file");
  const auto body = bytes.first(bytes.size() - 4);
  Reader tail(bytes.last(4));
  if (crc(body) != tail.u32()) throw CorruptIndex("checksum mismatch");

  Reader r(body.subspan(sizeof kMagic + 4));
  const std::uint32_t dimension = r.u32();
  const std::uint64_t count = r.u64();
  IndexMetadata m;
  m.provider_name = r.str();
  m.instruction_document = r.str();
  m.include_actions = r.u8() != 0;
  m.build_timestamp = static_cast<std::int64_t>(r.u64());
  m.provenance = r.str();
  if (dimension == 0) throw CorruptIndex("zero dimension");
  // Each entry needs at least a length prefix plus its packed vector.
  if (count > r.remaining() / (4 + 4ull * dimension)) {
    throw CorruptIndex("entry count exceeds file size");
  }
  std::vector<std::string> ids(count);
  for (auto& id : ids) id = r.str();
  VectorIndex index(dimension, std::move(m));
  std::vector<float> v(dimension);
  for (std::uint64_t row = 0; row < count; ++row) {
    for (auto& x : v) x = r.f32();
    try {
      index.add(std::move(ids[row]), v);
    } catch (const Error& e) {
      throw CorruptIndex(e.what());
    }
  }
  if (r.remaining() != 0) throw CorruptIndex("trailing bytes");
  return index;
}

void save_index(const VectorIndex& index, const std::filesystem::path& path) {
  const auto bytes = serialize_index(index);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

VectorIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_index(bytes);
}

}  // namespace hopscan
