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

#include "scenedit/scene.hpp"

#include <algorithm>
#include <cstring>

#include "scenedit/error.hpp"
#include "scenedit/mesh_io.hpp"

namespace scenedit {

using nlohmann::json;

VertexAnnotations annotations_from_json(const json& j, std::size_t vertex_count) {
    if (!j.is_object() || !j.contains("vertex_labels")) throw Error(ErrorCode::kParseError, "annotation JSON needs vertex_labels");
    VertexAnnotations a;
    try {
        a.labels = j.at("vertex_labels").get<std::vector<std::string>>();
        if (j.contains("instance_ids")) {
            a.instance_ids = j.at("instance_ids").get<std::vector<std::int64_t>>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kParseError, std::string("annotation JSON: ") + e.what());
    }
    if (a.instance_ids.empty()) {
        // Without instance ids every distinct label is one instance.
        std::map<std::string, std::int64_t> ids;
        for (const auto& l : a.labels) a.instance_ids.push_back(ids.emplace(l, static_cast<std::int64_t>(ids.size())).first->second);
    }
    if (a.labels.size() != vertex_count || a.instance_ids.size() != vertex_count) {
        throw Error(ErrorCode::kParseError, "annotation length " + std::to_string(a.labels.size()) +
                                                " does not match vertex count " + std::to_string(vertex_count));
    }
    return a;
}

VertexAnnotations load_annotations(const std::filesystem::path& path, std::size_t vertex_count) {
    const json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kParseError, "annotation file does not parse: " + path.string());
    return annotations_from_json(j, vertex_count);
}

json annotations_to_json(const VertexAnnotations& a) {
    return {{"vertex_labels", a.labels}, {"instance_ids", a.instance_ids}};
}

Scene load_scene(const std::filesystem::path& mesh_path, const std::optional<std::filesystem::path>& annotation_path) {
    Scene scene;
    scene.mesh = load_mesh(mesh_path);
    scene.source_ref = mesh_path.string();
    if (annotation_path) scene.annotations = load_annotations(*annotation_path, scene.mesh.vertices.size());
    return scene;
}

void validate_scene(const Scene& scene) {
    validate_mesh(scene.mesh);
    if (scene.annotations) {
        const auto n = scene.mesh.vertices.size();
        if (scene.annotations->labels.size() != n || scene.annotations->instance_ids.size() != n) {
            throw Error(ErrorCode::kParseError, "annotation arrays out of step with vertices");
        }
    }
    for (auto t : scene.mesh.face_tags) {
        if (t != kUntagged && !scene.registry.contains(t)) throw Error(ErrorCode::kParseError, "face tag without registry entry");
    }
}

std::optional<std::uint32_t> find_tag(const Scene& scene, std::string_view name) {
    for (const auto& [id, n] : scene.registry) {
        if (n == name) return id;
    }
    return std::nullopt;
}

std::vector<std::uint32_t> tag_vertices(const Scene& scene, std::uint32_t tag) {
    std::vector<std::uint32_t> out;
    for (std::size_t f = 0; f < scene.mesh.faces.size(); ++f) {
        if (scene.mesh.tag_of(f) != tag) continue;
        out.insert(out.end(), scene.mesh.faces[f].begin(), scene.mesh.faces[f].end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::uint32_t add_object(Scene& scene, const TriangleMesh& object, const std::string& label) {
    const std::uint32_t tag = scene.next_tag++;
    TriangleMesh clean = object;
    clean.face_tags.clear();
    clean.vertex_normals.clear();
    scene.mesh = merge(scene.mesh, clean, tag);
    scene.mesh.vertex_normals.clear();
    if (scene.annotations) {
        std::int64_t next_instance = 0;
        for (auto id : scene.annotations->instance_ids) next_instance = std::max(next_instance, id + 1);
        scene.annotations->labels.resize(scene.mesh.vertices.size(), label);
        scene.annotations->instance_ids.resize(scene.mesh.vertices.size(), next_instance);
    }
    scene.registry[tag] = label + "#" + std::to_string(tag);
    return tag;
}

std::vector<std::int64_t> remove_scene_faces(Scene& scene, const std::vector<char>& drop_face) {
    FaceRemoval removal = remove_faces(scene.mesh, [&](std::size_t f) { return drop_face[f] != 0; });
    if (scene.annotations) {
        VertexAnnotations next;
        for (std::size_t v = 0; v < removal.vertex_map.size(); ++v) {
            if (removal.vertex_map[v] < 0) continue;
            next.labels.push_back(scene.annotations->labels[v]);
            next.instance_ids.push_back(scene.annotations->instance_ids[v]);
        }
        scene.annotations = std::move(next);
    }
    scene.mesh = std::move(removal.mesh);
    for (auto it = scene.registry.begin(); it != scene.registry.end();) {
        const bool alive = std::any_of(scene.mesh.face_tags.begin(), scene.mesh.face_tags.end(),
                                       [&](std::uint32_t t) { return t == it->first; });
        it = alive ? std::next(it) : scene.registry.erase(it);
    }
    return removal.vertex_map;
}

namespace {
template <typename T>
void put(std::string& out, const T& v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    out.append(raw, sizeof(T));
}
void put_vecs(std::string& out, const std::vector<Vec3>& vs) {
    put(out, vs.size());
    for (const auto& v : vs) {
        put(out, v.x());
        put(out, v.y());
        put(out, v.z());
    }
}
void put_str(std::string& out, const std::string& s) {
    put(out, s.size());
    out += s;
}
}  // namespace

std::string scene_state_bytes(const Scene& scene) {
    std::string out;
    const TriangleMesh& m = scene.mesh;
    put_vecs(out, m.vertices);
    put(out, m.faces.size());
    for (const auto& f : m.faces) put(out, f);
    put_vecs(out, m.vertex_normals);
    put_vecs(out, m.vertex_colors);
    put(out, m.face_tags.size());
    for (auto t : m.face_tags) put(out, t);
    put(out, scene.annotations.has_value());
    if (scene.annotations) {
        put(out, scene.annotations->labels.size());
        for (const auto& l : scene.annotations->labels) put_str(out, l);
        for (auto id : scene.annotations->instance_ids) put(out, id);
    }
    put(out, scene.registry.size());
    for (const auto& [id, name] : scene.registry) {
        put(out, id);
        put_str(out, name);
    }
    put(out, scene.next_tag);
    return out;
}

std::uint64_t scene_hash(const Scene& scene) {
    // FNV-1a, 64 bit.
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : scene_state_bytes(scene)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace scenedit
