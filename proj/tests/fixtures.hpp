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
#include <random>
#include <string>

#include "scenedit/asset.hpp"
#include "scenedit/bench.hpp"
#include "scenedit/config.hpp"
#include "scenedit/edit.hpp"
#include "scenedit/mesh.hpp"

namespace scenedit::testing {

/// Upward-facing grid of (nx + 1) x (ny + 1) vertices starting at (x0, y0).
inline TriangleMesh plate(double x0, double y0, int nx, int ny, double spacing, double z = 0.0) {
    TriangleMesh m;
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) m.vertices.emplace_back(x0 + i * spacing, y0 + j * spacing, z);
    }
    auto id = [&](int i, int j) { return static_cast<std::uint32_t>(j * (nx + 1) + i); };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return m;
}

/// Closed axis-aligned box with the given center and extents.
inline TriangleMesh box(const Vec3& center, const Vec3& size, int subdivisions = 4) {
    TriangleMesh m = make_box(subdivisions);
    for (auto& v : m.vertices) v = center + v.cwiseProduct(size);
    m.vertex_normals.clear();
    return m;
}

inline TriangleMesh cube(const Vec3& center, double side, int subdivisions = 4) {
    return box(center, Vec3::Constant(side), subdivisions);
}

class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() / ("scenedit_test_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Offline configuration: procedural assets, prior-table scales, shipped tables.
inline EditConfig offline_config() {
    RunConfig run;
    run.asset_sources = "procedural";
    return make_edit_config(run);
}

/// Empty table (no clutter) with a 1.4 x 0.8 m top at 0.75 m.
inline Scene empty_table_scene() {
    TableSceneSpec spec;
    return make_table_scene(spec);
}

/// Table with the left half (x < 0) covered by one wide box.
inline Scene half_cluttered_table_scene() {
    TableSceneSpec spec;
    spec.clutter.push_back({ClutterShape::kBox, Vec2(-0.35, 0.0), Vec3(0.7, 0.8, 0.2)});
    return make_table_scene(spec);
}

}  // namespace scenedit::testing
