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

#include "scenedit/grounding.hpp"

#include <algorithm>
#include <map>

#include "scenedit/error.hpp"
#include "scenedit/mesh_io.hpp"
#include "scenedit/text.hpp"

namespace scenedit {

using nlohmann::json;

namespace {

GroundedObject make_grounded(const Scene& scene, std::vector<std::uint32_t> ids, std::string label, double confidence,
                             std::int64_t instance) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    GroundedObject g;
    g.submesh = extract_submesh(scene.mesh, ids);
    g.vertex_ids = std::move(ids);
    g.aabb = compute_aabb(g.submesh);
    g.label = std::move(label);
    g.confidence = confidence;
    g.instance_id = instance;
    return g;
}

GroundedObject ground_annotations(const Scene& scene, const std::string& query, const GroundingOptions& options) {
    if (!scene.annotations) throw Error(ErrorCode::kNotFound, "scene has no annotations to ground '" + query + "'");
    const auto& a = *scene.annotations;
    static const SynonymTable kNoSynonyms;
    const SynonymTable& syn = options.synonyms ? *options.synonyms : kNoSynonyms;

    auto collect = [&](const std::string& q) {
        std::map<std::int64_t, std::vector<std::uint32_t>> instances;
        for (std::size_t v = 0; v < a.labels.size(); ++v) {
            if (syn.matches(a.labels[v], q)) instances[a.instance_ids[v]].push_back(static_cast<std::uint32_t>(v));
        }
        return instances;
    };
    auto instances = collect(query);
    if (instances.empty() && head_noun(query) != query) instances = collect(head_noun(query));
    if (instances.empty()) throw Error(ErrorCode::kNotFound, "no instance labeled '" + query + "'");

    // std::map iterates ids ascending, so strict > keeps the lowest id on ties.
    auto best = instances.begin();
    for (auto it = instances.begin(); it != instances.end(); ++it) {
        if (it->second.size() > best->second.size()) best = it;
    }
    if (options.log && instances.size() > 1) {
        options.log->push_back(std::to_string(instances.size()) + " instances match '" + query + "'; kept instance " +
                               std::to_string(best->first));
    }
    const std::string label = a.labels[best->second.front()];
    return make_grounded(scene, best->second, label, 1.0, best->first);
}

GroundedObject ground_client(const Scene& scene, const std::string& query, const GroundingOptions& options) {
    if (!options.client) throw Error(ErrorCode::kBackendError, "grounding client backend selected but no client configured");
    const auto masks = options.client->segment(scene.source_ref, query);
    const InstanceMask* best = nullptr;
    for (const auto& m : masks) {
        if (m.score < options.confidence_threshold || m.vertex_indices.empty()) continue;
        for (auto v : m.vertex_indices) {
            if (v >= scene.mesh.vertices.size()) throw Error(ErrorCode::kBackendError, "grounding client returned an out-of-range vertex");
        }
        if (!best || m.score > best->score) best = &m;
    }
    if (!best) throw Error(ErrorCode::kNotFound, "no instance of '" + query + "' above confidence threshold");
    if (options.log && masks.size() > 1) options.log->push_back(std::to_string(masks.size()) + " proposals for '" + query + "'");
    return make_grounded(scene, best->vertex_indices, best->label.empty() ? query : best->label, best->score, -1);
}

}  // namespace

SynonymTable::SynonymTable(std::vector<std::vector<std::string>> groups) {
    for (auto& g : groups) {
        std::vector<std::string> norm;
        for (auto& s : g) norm.push_back(normalize_label(s));
        groups_.push_back(std::move(norm));
    }
}

SynonymTable SynonymTable::load(const std::filesystem::path& path) {
    const json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded() || !j.contains("groups")) throw Error(ErrorCode::kParseError, "synonym table needs a groups array");
    return SynonymTable(j["groups"].get<std::vector<std::vector<std::string>>>());
}

bool SynonymTable::matches(std::string_view label, std::string_view query) const {
    const std::string l = normalize_label(label), q = normalize_label(query);
    if (l == q) return true;
    for (const auto& g : groups_) {
        if (std::find(g.begin(), g.end(), l) != g.end() && std::find(g.begin(), g.end(), q) != g.end()) return true;
    }
    return false;
}

std::vector<InstanceMask> HttpGroundingClient::segment(const std::string& scene_ref, const std::string& query) {
    const std::lock_guard lock(mutex_);
    const std::string body = http_post_json(endpoint_, {{"scene", scene_ref}, {"query", query}});
    const json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kBackendError, "grounding response is not a JSON object");
    std::vector<InstanceMask> out;
    auto read_one = [&](const json& inst) {
        InstanceMask m;
        try {
            m.vertex_indices = inst.at("vertex_indices").get<std::vector<std::uint32_t>>();
            m.score = inst.value("score", 1.0);
            m.label = inst.value("label", std::string());
        } catch (const json::exception& e) {
            throw Error(ErrorCode::kBackendError, std::string("grounding response: ") + e.what());
        }
        out.push_back(std::move(m));
    };
    if (j.contains("instances")) {
        for (const auto& inst : j["instances"]) read_one(inst);
    } else {
        read_one(j);
    }
    return out;
}

GroundedObject ground(const Scene& scene, std::string_view entity_name, const GroundingOptions& options) {
    const std::string query = normalize_label(entity_name);
    if (query.empty()) throw Error(ErrorCode::kNotFound, "empty grounding entity");
    return options.backend == GroundingBackend::kClient ? ground_client(scene, query, options)
                                                        : ground_annotations(scene, query, options);
}

TriangleMesh extract_submesh(const TriangleMesh& mesh, std::span<const std::uint32_t> vertex_ids) {
    if (vertex_ids.empty()) throw Error(ErrorCode::kEmptySelection, "no vertices selected");
    std::vector<std::uint32_t> ids(vertex_ids.begin(), vertex_ids.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::vector<std::int64_t> remap(mesh.vertices.size(), -1);
    TriangleMesh out;
    out.name = mesh.name;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] >= mesh.vertices.size()) throw Error(ErrorCode::kEmptySelection, "vertex id out of range");
        remap[ids[i]] = static_cast<std::int64_t>(i);
        out.vertices.push_back(mesh.vertices[ids[i]]);
        if (mesh.has_colors()) out.vertex_colors.push_back(mesh.vertex_colors[ids[i]]);
    }
    for (const auto& f : mesh.faces) {
        if (remap[f[0]] < 0 || remap[f[1]] < 0 || remap[f[2]] < 0) continue;
        out.faces.push_back({static_cast<std::uint32_t>(remap[f[0]]), static_cast<std::uint32_t>(remap[f[1]]),
                             static_cast<std::uint32_t>(remap[f[2]])});
    }
    return out;
}

}  // namespace scenedit
