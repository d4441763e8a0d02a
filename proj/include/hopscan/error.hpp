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
#include <stdexcept>
#include <string>

namespace hopscan {

// Base class for every domain error. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HOPSCAN_DEFINE_ERROR(Name)            \
  class Name : public Error {                 \
   public:                                    \
    explicit Name(const std::string& what)    \
        : Error(#Name ": " + what) {}         \
  }

HOPSCAN_DEFINE_ERROR(InvalidChain);
HOPSCAN_DEFINE_ERROR(MalformedChain);
HOPSCAN_DEFINE_ERROR(EmptyText);
HOPSCAN_DEFINE_ERROR(ProviderUnavailable);
HOPSCAN_DEFINE_ERROR(DuplicatePassageId);
HOPSCAN_DEFINE_ERROR(UnknownPassageId);
HOPSCAN_DEFINE_ERROR(DimensionMismatch);
HOPSCAN_DEFINE_ERROR(CorruptIndex);
HOPSCAN_DEFINE_ERROR(UnknownInstanceId);
HOPSCAN_DEFINE_ERROR(DanglingGoldReference);
HOPSCAN_DEFINE_ERROR(InvalidArgument);
HOPSCAN_DEFINE_ERROR(IoError);

#undef HOPSCAN_DEFINE_ERROR

// Schema violations carry the 1-based line number of the offending record.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& what)
      : Error("SchemaError: line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace hopscan
