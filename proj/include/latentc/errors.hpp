// Copyright 2026 The latentconcepts Authors
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

#include <exception>
#include <string>
#include <utility>

namespace latentc {

/// Broad failure category. Maps one-to-one onto the CLI exit codes.
enum class ErrorKind {
  usage,      // exit 2
  data,       // exit 3
  invariant,  // exit 4
};

/// Base exception for everything the toolkit throws on purpose.
///
/// A pipeline stage may tag an in-flight error with its name; `what()` then
/// reads "stage: message".
class Error : public std::exception {
 public:
  Error(ErrorKind kind, std::string message)
      : kind_(kind), message_(std::move(message)) {
    rebuild();
  }

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }
  const std::string& message() const noexcept { return message_; }

  /// Sets the stage only if no inner stage claimed the error first.
  void set_stage(std::string stage) {
    if (stage_.empty()) {
      stage_ = std::move(stage);
      rebuild();
    }
  }

  const char* what() const noexcept override { return full_.c_str(); }

 private:
  void rebuild() { full_ = stage_.empty() ? message_ : stage_ + ": " + message_; }

  ErrorKind kind_;
  std::string message_;
  std::string stage_;
  std::string full_;
};

inline Error usage_error(std::string msg) { return Error(ErrorKind::usage, std::move(msg)); }
inline Error data_error(std::string msg) { return Error(ErrorKind::data, std::move(msg)); }
inline Error invariant_error(std::string msg) {
  return Error(ErrorKind::invariant, std::move(msg));
}

/// Runs `fn`, tagging any latentc::Error escaping it with `stage`.
template <typename Fn>
decltype(auto) with_stage(const char* stage, Fn&& fn) {
  try {
    return std::forward<Fn>(fn)();
  } catch (Error& e) {
    e.set_stage(stage);
    throw;
  }
}

}  // namespace latentc
