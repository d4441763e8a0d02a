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

#include "hopscan/embedding.hpp"

#include <cmath>
#include <cstdlib>

#include "hopscan/error.hpp"
#include "hopscan/text.hpp"

namespace hopscan {

double dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch(std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return s;
}

double l2_norm(std::span<const float> v) { return std::sqrt(dot(v, v)); }

std::string_view to_string(EmbeddingRole role) {
  return role == EmbeddingRole::document ? "document" : "query_chain";
}

EmbeddingRole parse_embedding_role(std::string_view s) {
  if (s == "document") return EmbeddingRole::document;
  if (s == "query_chain") return EmbeddingRole::query_chain;
  throw InvalidArgument("unknown embedding role '" + std::string(s) + "'");
}

std::vector<Vector> EmbeddingProvider::embed_batch(
    std::span<const EmbeddingRequest> requests) const {
  std::vector<Vector> out;
  out.reserve(requests.size());
  for (const auto& r : requests) out.push_back(embed(r));
  return out;
}

ReferenceEmbedder::ReferenceEmbedder(std::size_t dimension)
    : dimension_(dimension) {
  if (dimension_ == 0) throw InvalidArgument("embedding dimension must be > 0");
}

std::vector<std::string> ReferenceEmbedder::tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    const bool word = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                      (c >= 'A' && c <= 'Z') || c >= 0x80;
    if (word) {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                         : ch);
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::size_t ReferenceEmbedder::bucket(std::string_view token) const {
  return static_cast<std::size_t>(text::fnv1a64(token) % dimension_);
}

float ReferenceEmbedder::sign(std::string_view token) const {
  return (text::fnv1a64(token) >> 63) != 0 ? -1.0f : 1.0f;
}

Vector ReferenceEmbedder::embed(const EmbeddingRequest& request) const {
  if (text::trim(request.text).empty()) throw EmptyText("empty request text");
  std::vector<double> acc(dimension_, 0.0);
  const auto add = [&](std::string_view s) {
    for (const auto& tok : tokenize(s)) acc[bucket(tok)] += sign(tok);
  };
  add(request.instruction);
  add(request.text);

  double norm = 0.0;
  for (double x : acc) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw EmptyText("text has no embeddable tokens");
  Vector v;
  v.values.resize(dimension_);
  for (std::size_t i = 0; i < dimension_; ++i) {
    v.values[i] = static_cast<float>(acc[i] / norm);
  }
  return v;
}

std::unique_ptr<EmbeddingProvider> make_provider(std::string_view kind,
                                                 RemoteConfig remote) {
  if (kind == "reference") return std::make_unique<ReferenceEmbedder>();
  if (kind == "remote") {
    if (remote.endpoint.empty()) {
      if (const char* env = std::getenv(kEndpointEnvVar)) remote.endpoint = env;
    }
    if (remote.endpoint.empty()) {
      throw InvalidArgument(std::string("remote provider needs an endpoint (") +
                            kEndpointEnvVar + ")");
    }
    return std::make_unique<RemoteEmbedder>(std::move(remote));
  }
  throw InvalidArgument("unknown provider '" + std::string(kind) + "'");
}

}  // namespace hopscan
