/*
Copyright 2026 The Howl Lab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef HOWL_COMMON_HPP_
#define HOWL_COMMON_HPP_

#include <stdexcept>
#include <string>

namespace howl {

enum class ErrorKind {
  kEmptyInput,
  kShape,
  kConfig,
  kNumeric,
  kUndefined,
  kTraining,
  kIo,
};

const char* ErrorKindName(ErrorKind kind);

// All library failures are reported through this exception type; |kind()|
// lets callers (notably the CLI) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace howl

#endif  // HOWL_COMMON_HPP_
