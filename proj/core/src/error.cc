// Copyright 2026 The slowroute Authors.
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

#include "slowroute/error.h"

#include <string>

namespace slowroute {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kInfeasibleFlow:
      return "InfeasibleFlow";
    case ErrorCode::kPathExplosion:
      return "PathExplosion";
    case ErrorCode::kNoPath:
      return "NoPath";
    case ErrorCode::kSingularTransform:
      return "SingularTransform";
    case ErrorCode::kNotConverged:
      return "NotConverged";
    case ErrorCode::kDegenerateInstance:
      return "DegenerateInstance";
    case ErrorCode::kDimensionTooLarge:
      return "DimensionTooLarge";
    case ErrorCode::kInvalidBounds:
      return "InvalidBounds";
    case ErrorCode::kPreconditionViolated:
      return "PreconditionViolated";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kValidationError:
      return "ValidationError";
    case ErrorCode::kUnknownInstance:
      return "UnknownInstance";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace slowroute
