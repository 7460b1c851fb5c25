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

#include "core/error.hpp"

namespace softsensor {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kUnknownModel: return "unknown-model";
    case ErrorCode::kIntegrationDiverged: return "integration-diverged";
    case ErrorCode::kObserverDiverged: return "observer-diverged";
    case ErrorCode::kTrainingFailed: return "training-failed";
    case ErrorCode::kSingularSet: return "singular-set";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message,
                     const std::optional<std::size_t>& step) {
  std::string out = std::string(to_string(code)) + ": " + message;
  if (step) out += " (step " + std::to_string(*step) + ")";
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> step)
    : std::runtime_error(decorate(code, message, step)),
      code_(code),
      step_(step) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace softsensor
