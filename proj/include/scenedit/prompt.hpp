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

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenedit/http_client.hpp"

namespace scenedit {

enum class EditKind { kInsert, kReplace, kDelete };

std::string_view to_string(EditKind kind);

/// Parsed intent of one instruction.
///
/// For Insert the grounding entity is where the primaries go, for Replace it
/// is the object being replaced, and for Delete it is the object to remove.
struct EditTask {
    EditKind kind = EditKind::kInsert;
    std::vector<std::string> primary_entities;
    std::string grounding_entity;
    std::string raw_prompt;
    std::string rationale;  // free text from a language model, never interpreted

    bool operator==(const EditTask&) const = default;
};

/// {"kind":"insert|replace|delete","primary":[...],"grounding":"...","rationale":"..."}
nlohmann::json to_json(const EditTask& task);

/// Throws SchemaViolation.
EditTask task_from_json(const nlohmann::json& j);

/// Returns the task unchanged; throws InvalidTask naming the broken rule.
EditTask validate_task(EditTask task);

/// Rule-based parser. Throws AmbiguousPrompt when no pattern matches.
EditTask parse_prompt(std::string_view prompt);

/// A chat-style model that answers a prompt with text.
class LanguageModelClient {
public:
    virtual ~LanguageModelClient() = default;
    virtual std::string complete(const std::string& system, const std::string& user) = 0;
};

/// OpenAI-compatible chat completions endpoint. The reply may also be a bare
/// EditTask object, which is passed through as text.
class HttpLanguageModelClient : public LanguageModelClient {
public:
    HttpLanguageModelClient(HttpEndpoint endpoint, std::string model)
        : endpoint_(std::move(endpoint)), model_(std::move(model)) {}
    std::string complete(const std::string& system, const std::string& user) override;

private:
    HttpEndpoint endpoint_;
    std::mutex mutex_;  // one request in flight per client
    std::string model_;
};

/// Instruction given to the language model. Written for this project.
std::string_view task_system_prompt();

enum class NlpBackend { kFallback, kClient };

NlpBackend parse_nlp_backend(std::string_view name);

/// Throws AmbiguousPrompt, BackendError, SchemaViolation or InvalidTask.
EditTask classify_and_extract(std::string_view prompt, NlpBackend backend, LanguageModelClient* client = nullptr);

}  // namespace scenedit
