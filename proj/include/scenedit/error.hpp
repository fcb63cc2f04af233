// Copyright 2026 The scenedit Authors
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace scenedit {

enum class ErrorCode {
    kParseError,
    kUnsupportedFormat,
    kIoError,
    kDegenerateGeometry,
    kInvalidScale,
    kAmbiguousPrompt,
    kBackendError,
    kSchemaViolation,
    kInvalidTask,
    kAllBackendsFailed,
    kNotFound,
    kEmptySelection,
    kNoValidImages,
    kUnknownCategory,
    kImageBackendError,
    kNoSupportSurface,
    kClusterTooSmall,
    kNoFeasibleLocation,
    kUnknownTag,
    kEmptyHistory,
    kConfigError,
};

/// Name used in reports and HTTP bodies, e.g. "NotFound".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace scenedit
