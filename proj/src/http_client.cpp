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

#include "scenedit/http_client.hpp"

#include <cstdlib>
#include <regex>

#include <httplib.h>

#include "scenedit/error.hpp"

namespace scenedit {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host:port
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw Error(ErrorCode::kBackendError, "malformed endpoint URL '" + url + "'");
    return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

void configure(httplib::Client& cli, double timeout_s) {
    const auto secs = static_cast<time_t>(timeout_s);
    const auto usecs = static_cast<time_t>((timeout_s - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
}

}  // namespace

std::string http_post_json(const HttpEndpoint& endpoint, const nlohmann::json& body) {
    const SplitUrl u = split_url(endpoint.url);
    httplib::Client cli(u.origin);
    configure(cli, endpoint.timeout_s);
    httplib::Headers headers;
    for (const auto& [k, v] : endpoint.headers) headers.emplace(k, v);
    if (!endpoint.api_key_env.empty()) {
        if (const char* key = std::getenv(endpoint.api_key_env.c_str())) headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto res = cli.Post(u.path, headers, body.dump(), "application/json");
    if (!res) throw Error(ErrorCode::kBackendError, endpoint.url + ": " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) {
        throw Error(ErrorCode::kBackendError, endpoint.url + ": HTTP " + std::to_string(res->status));
    }
    return res->body;
}

std::string http_get(const std::string& url, double timeout_s) {
    const SplitUrl u = split_url(url);
    httplib::Client cli(u.origin);
    configure(cli, timeout_s);
    auto res = cli.Get(u.path);
    if (!res) throw Error(ErrorCode::kBackendError, url + ": " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) throw Error(ErrorCode::kBackendError, url + ": HTTP " + std::to_string(res->status));
    return res->body;
}

}  // namespace scenedit
