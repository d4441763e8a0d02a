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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hopscan::text {

// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
constexpr std::uint64_t fnv1a64(std::string_view s,
                                std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ascii_lower(std::string_view s);

std::string_view trim(std::string_view s);

// Collapses runs of ASCII whitespace to one space and trims both ends.
std::string normalize_whitespace(std::string_view s);

// Case-insensitive (ASCII) substring test after whitespace normalization of
// both sides. An empty needle never matches.
bool contains_normalized(std::string_view haystack, std::string_view needle);

std::vector<std::string_view> split_lines(std::string_view s);

std::string hex64(std::uint64_t v);

}  // namespace hopscan::text
