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
#include <span>
#include <mutex>
#include <string>
#include <vector>

#include "scenedit/http_client.hpp"
#include "scenedit/scene.hpp"

namespace scenedit {

/// Groups of interchangeable labels (couch/sofa, desk/table, ...), loaded from
///   {"groups": [["couch", "sofa"], ...]}
class SynonymTable {
public:
    SynonymTable() = default;
    explicit SynonymTable(std::vector<std::vector<std::string>> groups);
    static SynonymTable load(const std::filesystem::path& path);

    /// Case-insensitive equality up to synonym groups.
    bool matches(std::string_view label, std::string_view query) const;

private:
    std::vector<std::vector<std::string>> groups_;  // lower-cased
};

struct GroundedObject {
    TriangleMesh submesh;
    std::vector<std::uint32_t> vertex_ids;  // ascending indices into the scene mesh
    std::string label;
    Aabb aabb;
    double confidence = 1.0;
    std::int64_t instance_id = -1;
};

/// One instance proposed by a segmentation backend.
struct InstanceMask {
    std::vector<std::uint32_t> vertex_indices;
    double score = 0.0;
    std::string label;
};

/// Open-vocabulary 3D instance segmentation service.
class GroundingClient {
public:
    virtual ~GroundingClient() = default;
    virtual std::vector<InstanceMask> segment(const std::string& scene_ref, const std::string& query) = 0;
};

/// POST {"scene": ref, "query": text}
///   -> {"instances": [{"vertex_indices": [...], "score": s, "label": "..."}]}
/// A bare {"vertex_indices": [...], "score": s} is accepted as one instance.
class HttpGroundingClient : public GroundingClient {
public:
    explicit HttpGroundingClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
    std::vector<InstanceMask> segment(const std::string& scene_ref, const std::string& query) override;

private:
    HttpEndpoint endpoint_;
    std::mutex mutex_;  // one request in flight per client
};

enum class GroundingBackend { kAnnotations, kClient };

struct GroundingOptions {
    GroundingBackend backend = GroundingBackend::kAnnotations;
    const SynonymTable* synonyms = nullptr;
    GroundingClient* client = nullptr;
    double confidence_threshold = 0.5;  // client path only
    std::vector<std::string>* log = nullptr;  // receives notes about discarded matches
};

/// Highest-scoring instance matching entity_name. Annotation instances score
/// by vertex count; ties go to the lowest instance id. Throws NotFound.
GroundedObject ground(const Scene& scene, std::string_view entity_name, const GroundingOptions& options);

/// Vertices at `vertex_ids` (deduplicated, ascending) and the faces whose
/// three corners are all selected. Throws EmptySelection.
TriangleMesh extract_submesh(const TriangleMesh& mesh, std::span<const std::uint32_t> vertex_ids);

}  // namespace scenedit
