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

#include "scenedit/prompt.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "scenedit/error.hpp"

namespace scenedit {

using nlohmann::json;

std::string_view to_string(EditKind kind) {
    switch (kind) {
        case EditKind::kInsert: return "insert";
        case EditKind::kReplace: return "replace";
        case EditKind::kDelete: return "delete";
    }
    return "insert";
}

json to_json(const EditTask& task) {
    json j = {{"kind", to_string(task.kind)}, {"primary", task.primary_entities}, {"grounding", task.grounding_entity}};
    if (!task.rationale.empty()) j["rationale"] = task.rationale;
    if (!task.raw_prompt.empty()) j["prompt"] = task.raw_prompt;
    return j;
}

EditTask task_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::kSchemaViolation, "edit task must be a JSON object");
    EditTask t;
    const auto kind = j.find("kind");
    if (kind == j.end() || !kind->is_string()) throw Error(ErrorCode::kSchemaViolation, "edit task needs a string 'kind'");
    std::string k = kind->get<std::string>();
    std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::tolower(c); });
    if (k == "insert") t.kind = EditKind::kInsert;
    else if (k == "replace") t.kind = EditKind::kReplace;
    else if (k == "delete") t.kind = EditKind::kDelete;
    else throw Error(ErrorCode::kSchemaViolation, "unknown task kind '" + k + "'");

    if (const auto p = j.find("primary"); p != j.end() && !p->is_null()) {
        if (p->is_string()) {
            t.primary_entities.push_back(p->get<std::string>());
        } else if (p->is_array()) {
            for (const auto& e : *p) {
                if (!e.is_string()) throw Error(ErrorCode::kSchemaViolation, "'primary' entries must be strings");
                t.primary_entities.push_back(e.get<std::string>());
            }
        } else {
            throw Error(ErrorCode::kSchemaViolation, "'primary' must be a list of strings");
        }
    }
    if (const auto g = j.find("grounding"); g != j.end() && !g->is_null()) {
        if (!g->is_string()) throw Error(ErrorCode::kSchemaViolation, "'grounding' must be a string");
        t.grounding_entity = g->get<std::string>();
    }
    if (const auto r = j.find("rationale"); r != j.end() && r->is_string()) t.rationale = r->get<std::string>();
    if (const auto r = j.find("prompt"); r != j.end() && r->is_string()) t.raw_prompt = r->get<std::string>();
    return t;
}

EditTask validate_task(EditTask task) {
    for (const auto& p : task.primary_entities) {
        if (p.empty()) throw Error(ErrorCode::kInvalidTask, "primary entity names must be nonempty");
    }
    switch (task.kind) {
        case EditKind::kInsert:
            if (task.grounding_entity.empty()) throw Error(ErrorCode::kInvalidTask, "insert needs a grounding entity");
            if (task.primary_entities.empty()) throw Error(ErrorCode::kInvalidTask, "insert needs at least one primary entity");
            break;
        case EditKind::kReplace:
            if (task.grounding_entity.empty()) throw Error(ErrorCode::kInvalidTask, "replace needs the object being replaced");
            break;
        case EditKind::kDelete:
            if (!task.primary_entities.empty()) throw Error(ErrorCode::kInvalidTask, "delete takes no primary entities");
            if (task.grounding_entity.empty()) throw Error(ErrorCode::kInvalidTask, "delete needs the object to remove");
            break;
    }
    return task;
}

// ---------------------------------------------------------------------------
// Fallback grammar

namespace {

using Tokens = std::vector<std::string>;

Tokens tokenize(std::string_view text) {
    Tokens out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
    };
    for (char raw : text) {
        const auto c = static_cast<unsigned char>(raw);
        if (std::isalnum(c) || c == '#' || c == '-' || c == '\'' || c == '_') {
            cur += static_cast<char>(std::tolower(c));
        } else if (c == ',' || c == '&') {
            flush();
            out.emplace_back(",");
        } else {
            flush();
        }
    }
    flush();
    return out;
}

bool one_of(const std::string& w, std::initializer_list<std::string_view> set) {
    return std::find(set.begin(), set.end(), w) != set.end();
}

bool is_insert_verb(const std::string& w) { return one_of(w, {"place", "put", "insert", "add", "set"}); }
bool is_replace_verb(const std::string& w) { return one_of(w, {"replace", "swap", "substitute"}); }
bool is_delete_verb(const std::string& w) { return one_of(w, {"delete", "remove"}); }
bool is_on(const std::string& w) { return one_of(w, {"on", "onto", "over", "atop", "upon"}); }
bool is_determiner(const std::string& w) {
    return one_of(w, {"a", "an", "the", "some", "another", "this", "that", "these", "those", "my", "our", "your"});
}
// Words that end a noun phrase.
bool is_phrase_break(const std::string& w) {
    return one_of(w, {"near", "next", "beside", "behind", "in", "inside", "at", "from", "with", "by", "for", "to", "that",
                      "which", "so", "please", "and", "then", "of"}) ||
           is_on(w);
}

std::string phrase(const Tokens& t, std::size_t begin, std::size_t end, bool stop_at_break) {
    while (begin < end && is_determiner(t[begin])) ++begin;
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (t[i] == "," || (stop_at_break && is_phrase_break(t[i]))) break;
        if (!out.empty()) out += ' ';
        out += t[i];
    }
    return out;
}

std::vector<std::string> phrase_list(const Tokens& t, std::size_t begin, std::size_t end) {
    std::vector<std::string> out;
    std::size_t start = begin;
    for (std::size_t i = begin; i <= end; ++i) {
        if (i == end || t[i] == "," || t[i] == "and") {
            std::string p = phrase(t, start, i, false);
            if (!p.empty()) out.push_back(std::move(p));
            start = i + 1;
        }
    }
    return out;
}

// Index of the first binding preposition at or after `from`, with its length
// ("on top of" spans three tokens).
std::pair<std::size_t, std::size_t> find_on(const Tokens& t, std::size_t from) {
    for (std::size_t i = from; i < t.size(); ++i) {
        if (t[i] == "on" && i + 2 < t.size() && t[i + 1] == "top" && t[i + 2] == "of") return {i, 3};
        if (is_on(t[i])) return {i, 1};
    }
    return {t.size(), 0};
}

std::size_t find_word(const Tokens& t, std::size_t from, std::initializer_list<std::string_view> words) {
    for (std::size_t i = from; i < t.size(); ++i) {
        if (one_of(t[i], words)) return i;
    }
    return t.size();
}

[[noreturn]] void ambiguous(std::string_view prompt, const std::string& why) {
    throw Error(ErrorCode::kAmbiguousPrompt, "'" + std::string(prompt) + "': " + why);
}

}  // namespace

EditTask parse_prompt(std::string_view prompt) {
    const Tokens t = tokenize(prompt);
    std::size_t verb = 0;
    while (verb < t.size() && !is_insert_verb(t[verb]) && !is_replace_verb(t[verb]) && !is_delete_verb(t[verb])) ++verb;
    if (verb == t.size()) ambiguous(prompt, "no edit verb found");

    EditTask task;
    task.raw_prompt = std::string(prompt);
    const std::string& v = t[verb];
    if (is_insert_verb(v)) {
        task.kind = EditKind::kInsert;
        const auto [on, len] = find_on(t, verb + 1);
        if (len == 0) ambiguous(prompt, "no placement preposition (on, onto, over, atop)");
        task.primary_entities = phrase_list(t, verb + 1, on);
        task.grounding_entity = phrase(t, on + len, t.size(), true);
        if (task.primary_entities.empty()) ambiguous(prompt, "nothing to place");
    } else if (is_replace_verb(v)) {
        task.kind = EditKind::kReplace;
        if (v == "substitute") {
            // "substitute <new> for <old>"; "substitute <old> with <new>" falls through below.
            const std::size_t f = find_word(t, verb + 1, {"for"});
            if (f < t.size()) {
                task.primary_entities = phrase_list(t, verb + 1, f);
                task.grounding_entity = phrase(t, f + 1, t.size(), true);
            }
        }
        if (task.grounding_entity.empty()) {
            const std::size_t w = find_word(t, verb + 1, {"with", "by", "for"});
            task.grounding_entity = phrase(t, verb + 1, w, true);
            if (w < t.size()) task.primary_entities = phrase_list(t, w + 1, t.size());
        }
    } else {
        task.kind = EditKind::kDelete;
        task.grounding_entity = phrase(t, verb + 1, t.size(), true);
    }
    if (task.grounding_entity.empty()) ambiguous(prompt, "no object named");
    return task;
}

// ---------------------------------------------------------------------------
// Language-model path

std::string_view task_system_prompt() {
    return R"(You turn one instruction for editing a 3D room into JSON.
Decide whether the instruction inserts new objects, replaces an existing object, or deletes an existing object.
Reply with one JSON object and nothing else:
{"kind": "insert" | "replace" | "delete",
 "primary": [names of objects to create, in the order mentioned],
 "grounding": "name of the existing object",
 "rationale": "optional short note"}
For insert, "grounding" is the object the new ones are placed on.
For replace, "grounding" is the object being replaced and "primary" holds its substitute, or is empty if none is named.
For delete, "grounding" is the object to remove and "primary" is empty.
Use short lowercase noun phrases without articles.)";
}

std::string HttpLanguageModelClient::complete(const std::string& system, const std::string& user) {
    const std::lock_guard lock(mutex_);
    json body = {{"model", model_},
                 {"temperature", 0},
                 {"messages", json::array({{{"role", "system"}, {"content", system}}, {{"role", "user"}, {"content", user}}})}};
    const std::string reply = http_post_json(endpoint_, body);
    const json j = json::parse(reply, nullptr, false);
    if (j.is_discarded()) return reply;
    if (j.contains("choices")) {
        try {
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw Error(ErrorCode::kSchemaViolation, std::string("chat completion without message content: ") + e.what());
        }
    }
    return reply;
}

NlpBackend parse_nlp_backend(std::string_view name) {
    if (name == "fallback") return NlpBackend::kFallback;
    if (name == "client") return NlpBackend::kClient;
    throw Error(ErrorCode::kConfigError, "nlp backend must be 'fallback' or 'client', got '" + std::string(name) + "'");
}

namespace {

std::optional<EditTask> read_task_reply(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        const auto open = text.find('{');
        const auto close = text.rfind('}');
        if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
        j = json::parse(text.substr(open, close - open + 1), nullptr, false);
        if (j.is_discarded()) return std::nullopt;
    }
    try {
        return task_from_json(j);
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

EditTask classify_and_extract(std::string_view prompt, NlpBackend backend, LanguageModelClient* client) {
    const bool blank = std::all_of(prompt.begin(), prompt.end(), [](unsigned char c) { return std::isspace(c); });
    if (blank) throw Error(ErrorCode::kAmbiguousPrompt, "empty prompt");
    if (backend == NlpBackend::kFallback) return validate_task(parse_prompt(prompt));

    if (!client) throw Error(ErrorCode::kBackendError, "language model backend selected but no client configured");
    const std::string system(task_system_prompt());
    std::string user(prompt);
    std::string reply = client->complete(system, user);
    auto task = read_task_reply(reply);
    if (!task) {
        user += "\n\nYour previous reply did not match the JSON schema. Reply with the JSON object only.";
        reply = client->complete(system, user);
        task = read_task_reply(reply);
    }
    if (!task) throw Error(ErrorCode::kSchemaViolation, "language model reply does not match the task schema: " + reply.substr(0, 200));
    task->raw_prompt = std::string(prompt);
    return validate_task(std::move(*task));
}

}  // namespace scenedit
