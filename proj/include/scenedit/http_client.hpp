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

#include <map>
#include <string>

#include <json.hpp>

namespace scenedit {

/// A remote JSON endpoint. Credentials are read from the environment
/// variable named by api_key_env, if set, and sent as a bearer token.
struct HttpEndpoint {
    std::string url;  // http://host[:port]/path (https when built with OpenSSL)
    std::map<std::string, std::string> headers;
    std::string api_key_env;
    double timeout_s = 60.0;
};

/// POSTs a JSON body and returns the response body.
/// Throws BackendError on transport failure or a non-2xx status.
std::string http_post_json(const HttpEndpoint& endpoint, const nlohmann::json& body);

/// Plain GET, used for URL-referenced payloads. Throws BackendError.
std::string http_get(const std::string& url, double timeout_s = 60.0);

}  // namespace scenedit
