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

#include "scenedit/error.hpp"

namespace scenedit {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kParseError: return "ParseError";
        case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::kIoError: return "IoError";
        case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
        case ErrorCode::kInvalidScale: return "InvalidScale";
        case ErrorCode::kAmbiguousPrompt: return "AmbiguousPrompt";
        case ErrorCode::kBackendError: return "BackendError";
        case ErrorCode::kSchemaViolation: return "SchemaViolation";
        case ErrorCode::kInvalidTask: return "InvalidTask";
        case ErrorCode::kAllBackendsFailed: return "AllBackendsFailed";
        case ErrorCode::kNotFound: return "NotFound";
        case ErrorCode::kEmptySelection: return "EmptySelection";
        case ErrorCode::kNoValidImages: return "NoValidImages";
        case ErrorCode::kUnknownCategory: return "UnknownCategory";
        case ErrorCode::kImageBackendError: return "ImageBackendError";
        case ErrorCode::kNoSupportSurface: return "NoSupportSurface";
        case ErrorCode::kClusterTooSmall: return "ClusterTooSmall";
        case ErrorCode::kNoFeasibleLocation: return "NoFeasibleLocation";
        case ErrorCode::kUnknownTag: return "UnknownTag";
        case ErrorCode::kEmptyHistory: return "EmptyHistory";
        case ErrorCode::kConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace scenedit
