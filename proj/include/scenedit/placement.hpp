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
#include <span>
#include <vector>

#include <json.hpp>

#include "scenedit/mesh.hpp"
#include "scenedit/sdf.hpp"

namespace scenedit {

/// Tunables for support-surface extraction, the voxel hierarchy and the
/// rotation sweep.
struct FilterConfig {
    int n = 3;                             // filter side, in cells
    double threshold = 0.9;                // window mean must exceed this
    double up_angle_tolerance_deg = 15.0;  // max angle between normal and +Z
    double dbscan_eps = 0.0;               // meters; <= 0 selects 2x median NN spacing
    int dbscan_min_pts = 10;
    int rotation_steps = 24;
    int z_neighbors = 16;
    double contact_epsilon = 0.005;  // meters
    double base_fraction = 0.05;     // lowest fraction of object height that forms the base

    /// Throws ConfigError.
    void validate() const;
};

struct SupportCluster {
    std::vector<std::uint32_t> vertex_ids;  // into the mesh / point set it was built from
    std::vector<Vec3> points;
    double z_level = 0.0;  // mean Z

    Aabb aabb() const { return compute_aabb(points); }
};

/// Binary occupancy grid over the XY footprint of a support cluster.
/// Rows run along +Y, columns along +X; cell (r, c) of a level-L grid is the
/// output of the window whose lower-left level-(L-1) cell is (r, c).
struct VoxelGrid {
    Vec2 origin = Vec2::Zero();  // minimum X/Y of the cluster
    double cell_size = 0.0;
    int rows = 0;
    int cols = 0;
    int level = 0;
    std::vector<std::uint8_t> cells;  // row-major

    std::uint8_t at(int r, int c) const { return cells[static_cast<std::size_t>(r) * cols + c]; }
    std::uint8_t& at(int r, int c) { return cells[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t count_ones() const;
};

struct PenetrationReport {
    double fraction = 0.0;
    std::size_t vertex_count = 0;
    std::vector<std::uint32_t> offending_vertex_ids;
};

struct PlacementResult {
    Vec3 location = Vec3::Zero();
    int levels = 0;
    std::size_t cluster_index = 0;
    SupportCluster chosen_cluster;
    int x_id = 0;  // 1-based column of the chosen cell in the final grid
    int y_id = 0;  // 1-based row
    Vec2 origin = Vec2::Zero();
    double cell_size = 0.0;
    double rotation_z = 0.0;
    double penetration_before = 0.0;
    double penetration_after = 0.0;
    std::vector<VoxelGrid> candidate_trace;  // level 0 .. levels
};

/// Ids of vertices whose normal is within the up-angle tolerance of +Z.
/// Normals are computed when the mesh has none. Throws NoSupportSurface.
std::vector<std::uint32_t> filter_up_vertices(const TriangleMesh& grounding, const FilterConfig& cfg);

/// Twice the median nearest-neighbor spacing.
double default_dbscan_eps(std::span<const Vec3> points);

/// Label per point, -1 for noise. Clusters are numbered in discovery order.
std::vector<int> dbscan(std::span<const Vec3> points, double eps, int min_pts);

/// DBSCAN clusters, largest first (ties: lowest member index first).
/// vertex_ids index `points`. Throws NoSupportSurface when all points are noise.
std::vector<SupportCluster> cluster_support(std::span<const Vec3> points, const FilterConfig& cfg);

/// Level-0 grid with cell size primary_width / n. Throws ClusterTooSmall.
VoxelGrid build_voxel_grid(const SupportCluster& cluster, double primary_width, const FilterConfig& cfg);

/// One n x n, stride-1 averaging pass; a cell is 1 iff the window mean is
/// strictly greater than the threshold.
VoxelGrid convolve_level(const VoxelGrid& grid, const FilterConfig& cfg);

/// Runs convolve_level until the next pass would have no 1s or the grid is
/// smaller than the filter. Returns every grid kept, level 0 first.
std::vector<VoxelGrid> build_hierarchy(const VoxelGrid& level0, const FilterConfig& cfg);

/// Center coordinate of a chosen final-grid cell:
///   x = x0 + (x_id + levels - 0.5) * s,  y likewise, with 1-based ids.
Vec2 grid_location(const Vec2& origin, double cell_size, int levels, int x_id, int y_id);

/// Chebyshev distance from every cell to the nearest 0 cell, where the ring
/// outside the grid counts as 0.
std::vector<int> chebyshev_clearance(const VoxelGrid& grid);

/// Scene geometry that makes a support vertex unusable when a ray cast
/// straight up from it hits something within `clearance` meters.
struct Obstacles {
    const SignedDistanceField* field = nullptr;
    double clearance = 0.0;
};

/// Location on the grounding object's support surface for an object of the
/// given footprint width. Throws NoSupportSurface / NoFeasibleLocation.
PlacementResult find_location(const TriangleMesh& grounding, double primary_width, const FilterConfig& cfg,
                              const Obstacles& obstacles = {});

/// Baseline placement at the XY center of the grounding object's bounding
/// box, with Z from the largest support cluster.
PlacementResult center_location(const TriangleMesh& grounding, const FilterConfig& cfg);

/// Fraction of object vertices on the interior side of the nearest scene
/// surface. Vertices within contact_epsilon of support_z are never counted.
PenetrationReport penetration_percent(const TriangleMesh& object, const SignedDistanceField& scene_sdf,
                                      std::optional<double> support_z = std::nullopt, double contact_epsilon = 0.0);

/// Mean XY of the vertices in the lowest base_fraction of the object's
/// height, at the object's minimum Z.
Vec3 base_centroid(const TriangleMesh& object, double base_fraction = 0.05);

/// Rotates the object by angle about the vertical axis through its base
/// centroid, then moves the base centroid onto location.
TriangleMesh place_object(const TriangleMesh& object, const Vec3& location, double angle, double base_fraction = 0.05);

/// Sweeps rotation_steps angles in [0, 2pi) and keeps the one with least
/// penetration (ties: smallest angle). `object` is the unplaced asset.
PlacementResult refine_rotation(const TriangleMesh& object, PlacementResult placement,
                                const SignedDistanceField& scene_sdf, const FilterConfig& cfg);

nlohmann::json trace_to_json(const PlacementResult& result);
nlohmann::json placement_to_json(const PlacementResult& result);

}  // namespace scenedit
