/*
 * Copyright 2026 The softsensor Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SOFTSENSOR_CORE_ERROR_HPP
#define SOFTSENSOR_CORE_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace softsensor {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kConfig,
  kUnknownModel,
  kIntegrationDiverged,
  kObserverDiverged,
  kTrainingFailed,
  kSingularSet,
  kIo,
};

const char* to_string(ErrorCode code);

/// Error raised by every core routine. Numeric failures carry the step index
/// at which they were detected.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> step = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<std::size_t>& step() const noexcept { return step_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> step_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace softsensor

#endif  // SOFTSENSOR_CORE_ERROR_HPP
