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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "scenedit/http_client.hpp"
#include "scenedit/mesh.hpp"

namespace scenedit {

enum class AssetSource { kGenerator, kLibrary, kProcedural };

std::string_view to_string(AssetSource source);

/// Parses "generator,library,procedural". Throws ConfigError on unknown or
/// repeated names and on an empty list.
std::vector<AssetSource> parse_asset_sources(std::string_view list);

struct AssetRequest {
    std::string entity_name;
    std::vector<AssetSource> source_preference{AssetSource::kGenerator, AssetSource::kLibrary, AssetSource::kProcedural};
    std::uint64_t seed = 0;
};

struct AssetRecord {
    TriangleMesh mesh;  // XY-centered at the origin, min Z = 0
    AssetSource source = AssetSource::kProcedural;
    std::string entity_name;
    bool canonical_up = true;  // false when a generated mesh's base could not be found
    std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// Procedural primitives. All are closed, outward-facing and vertex-welded, with
// an axis-aligned bounding box of size (1, 1, 1) centered at the origin.

TriangleMesh make_box(int subdivisions = 4);
TriangleMesh make_cylinder(int segments = 24, int stacks = 4, int cap_rings = 2);
TriangleMesh make_cone(int segments = 24, int stacks = 4, int cap_rings = 2);
TriangleMesh make_sphere(int segments = 24, int stacks = 12);

/// Name -> primitive with per-axis proportions, loaded from
///   {"default": "box", "aliases": {"cup": {"primitive": "cylinder", "size": [1, 1, 1.2]}, ...}}
/// The primitives box, sphere, cylinder and cone are always known.
class PrimitiveCatalog {
public:
    struct Entry {
        std::string primitive;
        Vec3 size = Vec3::Ones();
    };

    PrimitiveCatalog() = default;
    static PrimitiveCatalog from_json(const nlohmann::json& j);
    static PrimitiveCatalog load(const std::filesystem::path& path);

    /// Exact name, then its last word, then the default entry if one is set.
    std::optional<Entry> lookup(std::string_view name) const;
    TriangleMesh build(std::string_view name) const;  // throws NotFound

private:
    std::map<std::string, Entry> aliases_;
    std::optional<Entry> default_;
};

/// Text-to-3D model behind some service.
class MeshGeneratorClient {
public:
    virtual ~MeshGeneratorClient() = default;
    virtual TriangleMesh generate(const std::string& entity_name, std::uint64_t seed) = 0;
};

/// POST {"prompt": name, "seed": s}
///   -> {"format": "obj|ply|gltf|glb", "data": base64} or {"format": ..., "url": "..."}
class HttpMeshGeneratorClient : public MeshGeneratorClient {
public:
    explicit HttpMeshGeneratorClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
    TriangleMesh generate(const std::string& entity_name, std::uint64_t seed) override;

private:
    HttpEndpoint endpoint_;
    std::mutex mutex_;  // one request in flight per client
};

/// Moves the bounding-box XY center to the origin and the minimum Z to 0.
TriangleMesh normalize_asset(const TriangleMesh& mesh);

/// Turns the mesh so its largest flat boundary region faces -Z. Returns
/// false and leaves the mesh as is when no such region stands out.
bool orient_base_down(TriangleMesh& mesh);

/// Sorted, unique file stems of the mesh files in dir. Throws IoError.
std::vector<std::string> list_library(const std::filesystem::path& dir);

struct AssetProviderConfig {
    std::optional<std::filesystem::path> library_dir;
    std::shared_ptr<MeshGeneratorClient> generator;
    PrimitiveCatalog catalog;
};

/// Resolves requests through the preferred sources and caches results by
/// (name, source, seed). Safe for concurrent use; concurrent requests for the
/// same key share one computation.
class AssetProvider {
public:
    explicit AssetProvider(AssetProviderConfig config) : config_(std::move(config)) {}

    /// Throws AllBackendsFailed listing the cause per source.
    AssetRecord acquire(const AssetRequest& request);

    std::size_t generator_calls() const { return generator_calls_; }
    std::size_t cache_size() const;

private:
    using Key = std::tuple<std::string, AssetSource, std::uint64_t>;
    AssetRecord produce(const std::string& name, AssetSource source, std::uint64_t seed);

    AssetProviderConfig config_;
    mutable std::mutex mutex_;
    std::map<Key, std::shared_future<AssetRecord>> cache_;
    std::atomic<std::size_t> generator_calls_{0};
};

}  // namespace scenedit
