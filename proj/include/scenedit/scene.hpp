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
#include <vector>

#include <json.hpp>

#include "scenedit/mesh.hpp"

namespace scenedit {

/// Per-vertex dataset labels, as shipped in an annotation sidecar:
///   {"vertex_labels": [...], "instance_ids": [...]}
struct VertexAnnotations {
    std::vector<std::string> labels;
    std::vector<std::int64_t> instance_ids;
};

/// A scene mesh plus optional annotations and the registry of objects merged
/// into it. Registry face sets come from the mesh's face tags, so they are
/// disjoint by construction.
struct Scene {
    TriangleMesh mesh;
    std::optional<VertexAnnotations> annotations;
    std::map<std::uint32_t, std::string> registry;  // tag id -> tag name, e.g. "box#1"
    std::uint32_t next_tag = 1;
    std::string source_ref;  // path or id handed to remote grounding services
};

/// Throws ParseError when the arrays disagree with the vertex count.
VertexAnnotations load_annotations(const std::filesystem::path& path, std::size_t vertex_count);
VertexAnnotations annotations_from_json(const nlohmann::json& j, std::size_t vertex_count);
nlohmann::json annotations_to_json(const VertexAnnotations& a);

Scene load_scene(const std::filesystem::path& mesh_path, const std::optional<std::filesystem::path>& annotation_path);

/// Checks the Scene invariants; throws ParseError.
void validate_scene(const Scene& scene);

std::optional<std::uint32_t> find_tag(const Scene& scene, std::string_view name);

/// Vertex ids used by the faces of a tag, ascending.
std::vector<std::uint32_t> tag_vertices(const Scene& scene, std::uint32_t tag);

/// Merges a placed object and registers it as "<label>#<id>". The object's
/// vertices are annotated with `label` and a fresh instance id.
std::uint32_t add_object(Scene& scene, const TriangleMesh& object, const std::string& label);

/// Removes faces and the vertices only they used, keeping annotations and the
/// registry in step. Returns the old-to-new vertex map.
std::vector<std::int64_t> remove_scene_faces(Scene& scene, const std::vector<char>& drop_face);

/// Byte-exact serialization of everything that defines a scene state.
std::string scene_state_bytes(const Scene& scene);
std::uint64_t scene_hash(const Scene& scene);

}  // namespace scenedit
