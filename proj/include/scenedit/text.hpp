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

#include <cctype>
#include <string>
#include <string_view>

namespace scenedit {

/// Lower-case, underscores read as spaces, runs of whitespace collapsed.
inline std::string normalize_label(std::string_view s) {
    std::string out;
    bool space = false;
    for (char raw : s) {
        const auto c = static_cast<unsigned char>(raw);
        if (std::isspace(c) || c == '_') {
            space = !out.empty();
            continue;
        }
        if (space) out += ' ';
        space = false;
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

/// Last word of a normalized phrase.
inline std::string head_noun(const std::string& phrase) {
    const auto pos = phrase.rfind(' ');
    return pos == std::string::npos ? phrase : phrase.substr(pos + 1);
}

}  // namespace scenedit
