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
#include <string>
#include <vector>

#include <json.hpp>

#include "scenedit/placement.hpp"
#include "scenedit/scene.hpp"

namespace scenedit {

enum class ClutterShape { kBox, kCylinder };

struct ClutterItem {
    ClutterShape shape = ClutterShape::kBox;
    Vec2 center = Vec2::Zero();
    Vec3 size = Vec3(0.1, 0.1, 0.1);
};

/// A floor, a four-legged table and clutter standing on the table top. The
/// top is a dense single-sided grid with holes carved under the clutter, the
/// way a scan never sees the surface under an object.
struct TableSceneSpec {
    double width = 1.4;   // X
    double depth = 0.8;   // Y
    double height = 0.75;
    double grid_spacing = 0.02;
    double floor_half_extent = 2.0;
    std::vector<ClutterItem> clutter;
};

/// Labels: "floor", "table", "clutter" (one instance per item). The table top
/// is centered on the origin.
Scene make_table_scene(const TableSceneSpec& spec);

/// Random table with 3 to 6 non-overlapping clutter items. One item sits
/// near the middle of the table with probability 0.7.
TableSceneSpec random_table_spec(std::uint64_t seed);

struct BenchOptions {
    int scenes = 50;
    std::uint64_t seed = 1;
    FilterConfig filter;
};

struct BenchCell {
    double mean_penetration = 0.0;  // percent of object vertices
    std::size_t samples = 0;
};

struct BenchReport {
    BenchCell center_no_refine;
    BenchCell center_refine;
    BenchCell location_no_refine;
    BenchCell location_refine;
    int scenes_requested = 0;
    int scenes_failed = 0;
    std::vector<std::string> warnings;

    std::string to_csv() const;
    nlohmann::json to_json() const;
};

/// Places one procedural primary per random scene with both strategies,
/// with and without rotation refinement. A scene where either strategy
/// fails is left out of every cell and counted in scenes_failed.
BenchReport run_placement_bench(const BenchOptions& options);

}  // namespace scenedit
