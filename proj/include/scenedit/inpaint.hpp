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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenedit/mesh.hpp"

namespace scenedit {

/// Closed chain of boundary vertices. Consecutive vertices are joined by an
/// edge used by exactly one face, and the order runs against that face's
/// winding, so triangles emitted in loop order close the hole consistently.
using BoundaryLoop = std::vector<std::uint32_t>;

/// Undirected edges used by exactly one face.
std::vector<std::pair<std::uint32_t, std::uint32_t>> boundary_edges(const TriangleMesh& mesh);

/// A walk that passes through a vertex twice is split there into simple loops.
std::vector<BoundaryLoop> boundary_loops(const TriangleMesh& mesh);

/// Ear-clips the loop after projecting it onto its best-fit plane. Returns
/// nullopt when the projected polygon intersects itself.
std::optional<std::vector<Face>> triangulate_loop(const TriangleMesh& mesh, const BoundaryLoop& loop);

struct FilledLoop {
    std::size_t boundary_vertex_count = 0;
    std::size_t fill_face_begin = 0;
    std::size_t fill_face_count = 0;
    std::size_t added_vertices = 0;
};

struct InpaintReport {
    std::vector<FilledLoop> filled;
    std::size_t skipped_loops = 0;
    double max_edge = 0.0;  // effective refinement threshold
    std::vector<std::string> warnings;
};

nlohmann::json to_json(const InpaintReport& r);

/// Triangulates each loop and refines the new faces by bisecting interior
/// edges longer than max_edge (raised to the loop's longest edge, which is
/// never split). New faces and vertices are appended; new faces are untagged
/// and new vertex colors average the nearest original vertices.
InpaintReport fill_loops(TriangleMesh& mesh, const std::vector<BoundaryLoop>& loops, double max_edge);

}  // namespace scenedit
