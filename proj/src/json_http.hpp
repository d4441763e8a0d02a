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
#include <memory>
#include <semaphore>
#include <string>

#include "json.hpp"

namespace hopscan::detail {

// POSTs JSON bodies to an HTTP service with a timeout, bounded retries with
// exponential backoff, and a cap on concurrent requests. Transport failures
// and non-2xx responses surface as ProviderUnavailable once retries run out.
class JsonHttpClient {
 public:
  JsonHttpClient(const std::string& endpoint, std::chrono::milliseconds timeout,
                 int retries, std::chrono::milliseconds backoff,
                 std::size_t max_in_flight);

  nlohmann::json post(const std::string& path,
                      const nlohmann::json& body) const;

  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string endpoint_;
  std::string host_;       // scheme://host[:port]
  std::string base_path_;  // optional path prefix without trailing slash
  std::chrono::milliseconds timeout_;
  int retries_;
  std::chrono::milliseconds backoff_;
  std::unique_ptr<std::counting_semaphore<1024>> in_flight_;
};

}  // namespace hopscan::detail
