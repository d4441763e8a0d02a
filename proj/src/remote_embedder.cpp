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

#include <mutex>

#include "hopscan/embedding.hpp"
#include "hopscan/error.hpp"
#include "json_http.hpp"

namespace hopscan {

struct RemoteEmbedder::Impl {
  RemoteConfig config;
  detail::JsonHttpClient client;
  mutable std::once_flag probe_once;
  mutable std::size_t dimension = 0;

  explicit Impl(RemoteConfig c)
      : config(std::move(c)),
        client(config.endpoint, config.timeout, config.retries, config.backoff,
               config.max_in_flight),
        dimension(config.dimension) {}

  std::vector<Vector> call(std::span<const EmbeddingRequest> group,
                           std::size_t expected_dim) const {
    nlohmann::json body;
    body["texts"] = nlohmann::json::array();
    for (const auto& r : group) body["texts"].push_back(r.text);
    body["role"] = std::string(to_string(group.front().role));
    body["instruction"] = group.front().instruction;

    const nlohmann::json reply = client.post("/embed", body);
    if (!reply.is_object() || !reply.contains("vectors") ||
        !reply["vectors"].is_array()) {
      throw ProviderUnavailable("response lacks a 'vectors' array");
    }
    const auto& rows = reply["vectors"];
    if (rows.size() != group.size()) {
      throw ProviderUnavailable("expected " + std::to_string(group.size()) +
                                " vectors, got " + std::to_string(rows.size()));
    }
    std::vector<Vector> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
      Vector v;
      try {
        v.values = row.get<std::vector<float>>();
      } catch (const nlohmann::json::exception&) {
        throw ProviderUnavailable("vector is not an array of numbers");
      }
      if (expected_dim != 0 && v.dim() != expected_dim) {
        throw DimensionMismatch("service returned " + std::to_string(v.dim()) +
                                " values, expected " +
                                std::to_string(expected_dim));
      }
      const double norm = l2_norm(v.values);
      if (!(norm > 0.0)) throw ProviderUnavailable("service returned a zero vector");
      for (float& x : v.values) x = static_cast<float>(x / norm);
      out.push_back(std::move(v));
    }
    return out;
  }

  std::size_t resolved_dimension() const {
    std::call_once(probe_once, [this] {
      if (dimension != 0) return;
      const EmbeddingRequest probe{"dimension probe", EmbeddingRole::document,
                                   ""};
      dimension = call(std::span(&probe, 1), 0).front().dim();
    });
    return dimension;
  }
};

RemoteEmbedder::RemoteEmbedder(RemoteConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

RemoteEmbedder::~RemoteEmbedder() = default;

std::size_t RemoteEmbedder::dimension() const {
  return impl_->resolved_dimension();
}

Vector RemoteEmbedder::embed(const EmbeddingRequest& request) const {
  return embed_batch(std::span(&request, 1)).front();
}

std::vector<Vector> RemoteEmbedder::embed_batch(
    std::span<const EmbeddingRequest> requests) const {
  for (const auto& r : requests) {
    if (r.text.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw EmptyText("empty request text");
    }
  }
  const std::size_t dim = dimension();
  std::vector<Vector> out;
  out.reserve(requests.size());
  std::size_t start = 0;
  while (start < requests.size()) {
    // One HTTP call per run of requests sharing role and instruction.
    std::size_t end = start + 1;
    while (end < requests.size() && end - start < impl_->config.max_batch &&
           requests[end].role == requests[start].role &&
           requests[end].instruction == requests[start].instruction) {
      ++end;
    }
    auto part = impl_->call(requests.subspan(start, end - start), dim);
    for (auto& v : part) out.push_back(std::move(v));
    start = end;
  }
  return out;
}

}  // namespace hopscan
