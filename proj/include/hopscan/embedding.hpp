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

#include <chrono>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hopscan {

struct Vector {
  std::vector<float> values;

  std::size_t dim() const { return values.size(); }
  bool operator==(const Vector&) const = default;
};

// Dot product accumulated in double, in index order. Every scoring path
// in the library goes through this so results are reproducible bit for bit.
double dot(std::span<const float> a, std::span<const float> b);
double l2_norm(std::span<const float> v);

enum class EmbeddingRole { query_chain, document };

std::string_view to_string(EmbeddingRole role);
EmbeddingRole parse_embedding_role(std::string_view s);

struct EmbeddingRequest {
  std::string text;
  EmbeddingRole role = EmbeddingRole::document;
  std::string instruction;
};

// Produces fixed-dimension unit vectors. Implementations must be safe for
// concurrent calls.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  // Throws EmptyText or ProviderUnavailable.
  virtual Vector embed(const EmbeddingRequest& request) const = 0;
  // Atomic: either every request is embedded or the call throws.
  virtual std::vector<Vector> embed_batch(
      std::span<const EmbeddingRequest> requests) const;
};

// Hashed bag-of-tokens embedder. Tokens are maximal runs of ASCII
// alphanumerics (bytes >= 0x80 count as token characters), lowercased. Each
// token adds +-1 to one of `dimension` buckets chosen by FNV-1a; the sum is
// L2-normalized. The instruction is tokenized ahead of the text.
class ReferenceEmbedder final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDefaultDimension = 256;

  explicit ReferenceEmbedder(std::size_t dimension = kDefaultDimension);

  std::string name() const override { return "reference"; }
  std::size_t dimension() const override { return dimension_; }
  Vector embed(const EmbeddingRequest& request) const override;

  // Exposed for building corpora with known geometry.
  static std::vector<std::string> tokenize(std::string_view s);
  std::size_t bucket(std::string_view token) const;
  float sign(std::string_view token) const;

 private:
  std::size_t dimension_;
};

struct RemoteConfig {
  std::string endpoint;  // e.g. http://127.0.0.1:8080
  std::size_t dimension = 0;  // 0: probe the service on first use
  std::chrono::milliseconds timeout{30000};
  int retries = 2;
  std::chrono::milliseconds backoff{250};  // doubled after every attempt
  std::size_t max_in_flight = 4;
  std::size_t max_batch = 64;
};

inline constexpr const char* kEndpointEnvVar = "HOPSCAN_EMBEDDING_URL";

// Client for the JSON embedding service documented in
// docs/embedding-protocol.md.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(RemoteConfig config);
  ~RemoteEmbedder() override;

  std::string name() const override { return "remote"; }
  std::size_t dimension() const override;
  Vector embed(const EmbeddingRequest& request) const override;
  std::vector<Vector> embed_batch(
      std::span<const EmbeddingRequest> requests) const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// "reference" or "remote"; the remote endpoint falls back to the
// HOPSCAN_EMBEDDING_URL environment variable.
std::unique_ptr<EmbeddingProvider> make_provider(std::string_view kind,
                                                 RemoteConfig remote = {});

}  // namespace hopscan
