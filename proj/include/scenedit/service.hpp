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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "scenedit/edit.hpp"
#include "scenedit/error.hpp"

namespace scenedit {

/// HTTP status used for an error code in service responses.
int http_status(ErrorCode code);

struct ServiceOptions {
    std::optional<std::filesystem::path> session_root;  // persist each session under root/<id>
};

/// JSON-over-HTTP front end to EditSession.
///
///   POST /sessions                     {"scene": path, "annotations": path}
///                                      or {"mesh": base64, "format": "ply", "annotations": {...}}
///   GET  /sessions/{id}/mesh[?format=gltf]
///   POST /sessions/{id}/edits          {"prompt": text} or an EditTask object
///   POST /sessions/{id}/translate      {"tag": 3 | "box#3", "points": [[x, y, z], ...]}
///   POST /sessions/{id}/rotate         {"tag": ..., "angle": radians, "direction": "cw" | "ccw"}
///   POST /sessions/{id}/undo
///   GET  /sessions/{id}/trace          placement trace of the latest insert
///   GET  /sessions/{id}/objects        registry with bounding boxes
///   GET  /sessions/{id}/log            replayable op log
///
/// Writes to one session are serialized; a write that finds the session busy
/// gets 409 rather than waiting.
class EditService {
public:
    EditService(EditConfig config, ServiceOptions options = {});
    ~EditService();
    EditService(const EditService&) = delete;
    EditService& operator=(const EditService&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port or throws IoError.
    int bind(const std::string& host, int port);
    /// Serves until stop(). Call after bind().
    void listen();
    void stop();
    /// Blocks until the server accepts connections.
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace scenedit
