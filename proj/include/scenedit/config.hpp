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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "scenedit/edit.hpp"

namespace scenedit {

/// Everything the CLI and the service need to run edits.
///
/// Config files hold one `key = value` per line; `#` starts a comment.
/// Keys match the field names below (FilterConfig fields are prefixed with
/// `filter.`, e.g. `filter.threshold = 0.9`). Credentials never go here:
/// clients read the variable named by `*_api_key_env` instead.
struct RunConfig {
    std::optional<std::filesystem::path> scene;
    std::optional<std::filesystem::path> annotations;
    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> report;
    std::optional<std::filesystem::path> session_dir;

    std::string asset_sources = "generator,library,procedural";
    std::optional<std::filesystem::path> asset_library;
    std::filesystem::path asset_aliases;
    std::string generator_url;

    std::string nlp = "fallback";
    std::string nlp_url;
    std::string nlp_model = "gpt-4";
    std::string nlp_api_key_env = "SCENEDIT_NLP_API_KEY";

    std::string grounding = "annotations";
    std::string grounding_url;
    double grounding_threshold = 0.5;
    std::filesystem::path synonyms;

    std::string scale_source = "priors";
    double scale_cap = 0.8;
    int scale_samples = 5;
    std::filesystem::path scale_priors;
    std::string image_url;
    std::string detector_url;

    std::string placement = "location";  // location | center
    bool refine = true;
    double cascade_epsilon = 0.02;
    double subdivision_factor = 2.0;
    FilterConfig filter;

    std::uint64_t seed = 0;
    std::string host = "127.0.0.1";
    int port = 8080;
    double client_timeout_s = 60.0;
    std::string api_key_env = "SCENEDIT_API_KEY";

    RunConfig();

    /// Applies one key. Throws ConfigError on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
};

/// Throws ConfigError (bad syntax or keys) or IoError.
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = RunConfig());

/// Checks ranges and that referenced files exist. Throws ConfigError.
void validate_run_config(const RunConfig& config, bool need_scene);

/// Builds the edit configuration and the backend objects it names.
EditConfig make_edit_config(const RunConfig& config);

/// Directory holding the shipped JSON tables.
std::filesystem::path default_data_dir();

}  // namespace scenedit
