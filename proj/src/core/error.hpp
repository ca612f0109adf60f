/*
 * Copyright 2026 The cotrainlab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef COTRAIN_CORE_ERROR_HPP_
#define COTRAIN_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace cotrain {

enum class ErrorCode {
  kInvalidArgument = 1,
  kIo = 2,
  kConfig = 3,
  kNumeric = 4,
  kAuditFailed = 5,
};

// All failures raised by the library. `field` names the offending
// configuration field when there is one, so config loaders can attach a
// file/line location.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace cotrain

#endif  // COTRAIN_CORE_ERROR_HPP_
