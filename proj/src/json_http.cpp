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

#include "json_http.hpp"

#include <thread>

#include "hopscan/error.hpp"
#include "httplib.h"

namespace hopscan::detail {

JsonHttpClient::JsonHttpClient(const std::string& endpoint,
                               std::chrono::milliseconds timeout, int retries,
                               std::chrono::milliseconds backoff,
                               std::size_t max_in_flight)
    : endpoint_(endpoint),
      timeout_(timeout),
      retries_(retries < 0 ? 0 : retries),
      backoff_(backoff) {
  const auto scheme = endpoint.find("://");
  if (scheme == std::string::npos) {
    throw InvalidArgument("endpoint must start with http:// or https://: " +
                          endpoint);
  }
  const auto slash = endpoint.find('/', scheme + 3);
  host_ = endpoint.substr(0, slash);
  if (slash != std::string::npos) {
    base_path_ = endpoint.substr(slash);
    while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
  }
  const std::size_t limit = max_in_flight == 0 ? 1 : std::min<std::size_t>(max_in_flight, 1024);
  in_flight_ = std::make_unique<std::counting_semaphore<1024>>(
      static_cast<std::ptrdiff_t>(limit));
}

nlohmann::json JsonHttpClient::post(const std::string& path,
                                    const nlohmann::json& body) const {
  const std::string payload = body.dump();
  const std::string target = base_path_ + path;
  std::string last_error;
  auto delay = backoff_;

  in_flight_->acquire();
  struct Release {
    std::counting_semaphore<1024>* s;
    ~Release() { s->release(); }
  } release{in_flight_.get()};

  for (int attempt = 0; attempt <= retries_; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    httplib::Client client(host_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    auto res = client.Post(target, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP status " + std::to_string(res->status);
      if (res->status >= 400 && res->status < 500) break;
      continue;
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("invalid JSON response: ") + e.what();
      break;
    }
  }
  throw ProviderUnavailable(endpoint_ + target + ": " + last_error);
}

}  // namespace hopscan::detail
