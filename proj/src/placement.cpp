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

#include "scenedit/placement.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "scenedit/error.hpp"
#include "scenedit/kdtree.hpp"

namespace scenedit {

using nlohmann::json;

void FilterConfig::validate() const {
    if (n < 2) throw Error(ErrorCode::kConfigError, "filter size n must be >= 2");
    if (!(threshold > 0.0 && threshold <= 1.0)) throw Error(ErrorCode::kConfigError, "threshold must lie in (0, 1]");
    if (rotation_steps < 1) throw Error(ErrorCode::kConfigError, "rotation_steps must be >= 1");
    if (dbscan_min_pts < 1) throw Error(ErrorCode::kConfigError, "dbscan_min_pts must be >= 1");
    if (z_neighbors < 1) throw Error(ErrorCode::kConfigError, "z_neighbors must be >= 1");
    if (!(up_angle_tolerance_deg >= 0.0 && up_angle_tolerance_deg <= 90.0)) {
        throw Error(ErrorCode::kConfigError, "up_angle_tolerance must lie in [0, 90] degrees");
    }
    if (contact_epsilon < 0.0) throw Error(ErrorCode::kConfigError, "contact_epsilon must be >= 0");
    if (!(base_fraction > 0.0 && base_fraction <= 1.0)) throw Error(ErrorCode::kConfigError, "base_fraction must lie in (0, 1]");
}

std::size_t VoxelGrid::count_ones() const {
    return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

std::vector<std::uint32_t> filter_up_vertices(const TriangleMesh& grounding, const FilterConfig& cfg) {
    const TriangleMesh with_normals = grounding.has_normals() ? grounding : compute_vertex_normals(grounding);
    const double cos_tol = std::cos(cfg.up_angle_tolerance_deg * std::numbers::pi / 180.0);
    std::vector<std::uint32_t> kept;
    for (std::size_t v = 0; v < with_normals.vertices.size(); ++v) {
        if (!with_normals.has_defined_normal(v)) continue;
        // Small slack so a normal exactly at the tolerance survives rounding.
        if (with_normals.vertex_normals[v].z() >= cos_tol - 1e-12) kept.push_back(static_cast<std::uint32_t>(v));
    }
    if (kept.empty()) throw Error(ErrorCode::kNoSupportSurface, "no upward-facing vertices on the grounding object");
    return kept;
}

double default_dbscan_eps(std::span<const Vec3> points) {
    if (points.size() < 2) return 0.0;
    KdTree<3> tree(std::vector<Vec3>(points.begin(), points.end()));
    std::vector<double> nn;
    nn.reserve(points.size());
    for (const auto& p : points) {
        const auto idx = tree.knn(p, 2);
        if (idx.size() == 2) nn.push_back((tree.point(idx[1]) - p).norm());
    }
    auto mid = nn.begin() + static_cast<std::ptrdiff_t>(nn.size() / 2);
    std::nth_element(nn.begin(), mid, nn.end());
    return 2.0 * *mid;
}

std::vector<int> dbscan(std::span<const Vec3> points, double eps, int min_pts) {
    constexpr int kUnvisited = -2;
    constexpr int kNoise = -1;
    KdTree<3> tree(std::vector<Vec3>(points.begin(), points.end()));
    std::vector<int> label(points.size(), kUnvisited);
    int cluster = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (label[i] != kUnvisited) continue;
        const auto seeds = tree.radius_search(points[i], eps);
        if (static_cast<int>(seeds.size()) < min_pts) {
            label[i] = kNoise;
            continue;
        }
        label[i] = cluster;
        std::deque<std::uint32_t> queue(seeds.begin(), seeds.end());
        while (!queue.empty()) {
            const std::uint32_t q = queue.front();
            queue.pop_front();
            if (label[q] == kNoise) label[q] = cluster;  // border point
            if (label[q] != kUnvisited) continue;
            label[q] = cluster;
            const auto nbrs = tree.radius_search(points[q], eps);
            if (static_cast<int>(nbrs.size()) >= min_pts) queue.insert(queue.end(), nbrs.begin(), nbrs.end());
        }
        ++cluster;
    }
    return label;
}

std::vector<SupportCluster> cluster_support(std::span<const Vec3> points, const FilterConfig& cfg) {
    if (points.empty()) throw Error(ErrorCode::kNoSupportSurface, "no points to cluster");
    // The derived radius gets a relative slack so neighbors exactly two grid
    // steps away are not lost to rounding.
    double eps = cfg.dbscan_eps > 0.0 ? cfg.dbscan_eps : default_dbscan_eps(points) * (1.0 + 1e-6);
    if (!(eps > 0.0)) eps = std::numeric_limits<double>::min();
    const auto labels = dbscan(points, eps, cfg.dbscan_min_pts);
    const int count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<SupportCluster> clusters(static_cast<std::size_t>(std::max(count, 0)));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) continue;
        auto& c = clusters[static_cast<std::size_t>(labels[i])];
        c.vertex_ids.push_back(static_cast<std::uint32_t>(i));
        c.points.push_back(points[i]);
    }
    if (clusters.empty()) throw Error(ErrorCode::kNoSupportSurface, "all support points are DBSCAN noise");
    for (auto& c : clusters) {
        double z = 0.0;
        for (const auto& p : c.points) z += p.z();
        c.z_level = z / static_cast<double>(c.points.size());
    }
    std::stable_sort(clusters.begin(), clusters.end(), [](const SupportCluster& a, const SupportCluster& b) {
        if (a.vertex_ids.size() != b.vertex_ids.size()) return a.vertex_ids.size() > b.vertex_ids.size();
        return a.vertex_ids.front() < b.vertex_ids.front();
    });
    return clusters;
}

VoxelGrid build_voxel_grid(const SupportCluster& cluster, double primary_width, const FilterConfig& cfg) {
    if (!(primary_width > 0.0)) throw Error(ErrorCode::kConfigError, "primary width must be positive");
    const Aabb box = cluster.aabb();
    VoxelGrid grid;
    grid.cell_size = primary_width / cfg.n;
    grid.origin = Vec2(box.min.x(), box.min.y());
    const double s = grid.cell_size;
    // The 1e-9 slack keeps an exact multiple of s from spilling into an extra
    // column through rounding.
    grid.cols = std::max(1, static_cast<int>(std::ceil((box.max.x() - box.min.x()) / s - 1e-9)));
    grid.rows = std::max(1, static_cast<int>(std::ceil((box.max.y() - box.min.y()) / s - 1e-9)));
    if (grid.rows < cfg.n || grid.cols < cfg.n) {
        throw Error(ErrorCode::kClusterTooSmall, "support cluster is " + std::to_string(grid.rows) + "x" +
                                                     std::to_string(grid.cols) + " cells, filter needs " +
                                                     std::to_string(cfg.n));
    }
    grid.cells.assign(static_cast<std::size_t>(grid.rows) * grid.cols, 0);
    for (const auto& p : cluster.points) {
        const int c = std::clamp(static_cast<int>(std::floor((p.x() - grid.origin.x()) / s)), 0, grid.cols - 1);
        const int r = std::clamp(static_cast<int>(std::floor((p.y() - grid.origin.y()) / s)), 0, grid.rows - 1);
        grid.at(r, c) = 1;
    }
    return grid;
}

VoxelGrid convolve_level(const VoxelGrid& grid, const FilterConfig& cfg) {
    const int n = cfg.n;
    VoxelGrid out;
    out.origin = grid.origin;
    out.cell_size = grid.cell_size;
    out.level = grid.level + 1;
    out.rows = std::max(0, grid.rows - n + 1);
    out.cols = std::max(0, grid.cols - n + 1);
    out.cells.assign(static_cast<std::size_t>(out.rows) * out.cols, 0);
    if (out.rows == 0 || out.cols == 0) return out;

    // Summed-area table; window sums are exact integers.
    const int W = grid.cols + 1;
    std::vector<int> sat(static_cast<std::size_t>(grid.rows + 1) * W, 0);
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            sat[(r + 1) * W + c + 1] = grid.at(r, c) + sat[r * W + c + 1] + sat[(r + 1) * W + c] - sat[r * W + c];
        }
    }
    const double area = static_cast<double>(n) * n;
    for (int r = 0; r < out.rows; ++r) {
        for (int c = 0; c < out.cols; ++c) {
            const int sum = sat[(r + n) * W + c + n] - sat[r * W + c + n] - sat[(r + n) * W + c] + sat[r * W + c];
            out.at(r, c) = (sum / area > cfg.threshold) ? 1 : 0;
        }
    }
    return out;
}

std::vector<VoxelGrid> build_hierarchy(const VoxelGrid& level0, const FilterConfig& cfg) {
    std::vector<VoxelGrid> trace{level0};
    while (trace.back().rows >= cfg.n && trace.back().cols >= cfg.n) {
        VoxelGrid next = convolve_level(trace.back(), cfg);
        if (next.count_ones() == 0) break;
        trace.push_back(std::move(next));
    }
    return trace;
}

Vec2 grid_location(const Vec2& origin, double cell_size, int levels, int x_id, int y_id) {
    return {origin.x() + (x_id + levels - 0.5) * cell_size, origin.y() + (y_id + levels - 0.5) * cell_size};
}

std::vector<int> chebyshev_clearance(const VoxelGrid& grid) {
    const int R = grid.rows, C = grid.cols;
    std::vector<int> d(static_cast<std::size_t>(R) * C);
    auto at = [&](int r, int c) -> int& { return d[static_cast<std::size_t>(r) * C + c]; };
    for (int r = 0; r < R; ++r) {
        for (int c = 0; c < C; ++c) {
            at(r, c) = grid.at(r, c) ? std::min({r + 1, c + 1, R - r, C - c}) : 0;
        }
    }
    // Two-pass chessboard distance transform.
    for (int r = 0; r < R; ++r) {
        for (int c = 0; c < C; ++c) {
            int& v = at(r, c);
            if (r > 0) {
                v = std::min(v, at(r - 1, c) + 1);
                if (c > 0) v = std::min(v, at(r - 1, c - 1) + 1);
                if (c + 1 < C) v = std::min(v, at(r - 1, c + 1) + 1);
            }
            if (c > 0) v = std::min(v, at(r, c - 1) + 1);
        }
    }
    for (int r = R - 1; r >= 0; --r) {
        for (int c = C - 1; c >= 0; --c) {
            int& v = at(r, c);
            if (r + 1 < R) {
                v = std::min(v, at(r + 1, c) + 1);
                if (c > 0) v = std::min(v, at(r + 1, c - 1) + 1);
                if (c + 1 < C) v = std::min(v, at(r + 1, c + 1) + 1);
            }
            if (c + 1 < C) v = std::min(v, at(r, c + 1) + 1);
        }
    }
    return d;
}

namespace {

double support_height(const SupportCluster& cluster, const Vec2& xy, int k) {
    std::vector<Vec2> pts;
    pts.reserve(cluster.points.size());
    for (const auto& p : cluster.points) pts.emplace_back(p.x(), p.y());
    KdTree<2> tree(std::move(pts));
    const auto nn = tree.knn(xy, static_cast<std::size_t>(k));
    double z = 0.0;
    for (auto i : nn) z += cluster.points[i].z();
    return nn.empty() ? cluster.z_level : z / static_cast<double>(nn.size());
}

struct SupportClusters {
    std::vector<SupportCluster> clusters;  // vertex_ids index the grounding mesh
};

SupportClusters grounding_clusters(const TriangleMesh& grounding, const FilterConfig& cfg, const Obstacles& obstacles) {
    auto up = filter_up_vertices(grounding, cfg);
    if (obstacles.field && obstacles.clearance > 0.0) {
        const Vec3 dir = Vec3::UnitZ();
        std::erase_if(up, [&](std::uint32_t v) {
            const Vec3 origin = grounding.vertices[v] + cfg.contact_epsilon * dir;
            return obstacles.field->raycast(origin, dir, obstacles.clearance).has_value();
        });
        if (up.empty()) throw Error(ErrorCode::kNoFeasibleLocation, "every support vertex is covered by other geometry");
    }
    std::vector<Vec3> pts;
    pts.reserve(up.size());
    for (auto v : up) pts.push_back(grounding.vertices[v]);
    SupportClusters out{cluster_support(pts, cfg)};
    for (auto& c : out.clusters) {
        for (auto& id : c.vertex_ids) id = up[id];
    }
    return out;
}

}  // namespace

PlacementResult find_location(const TriangleMesh& grounding, double primary_width, const FilterConfig& cfg,
                              const Obstacles& obstacles) {
    cfg.validate();
    if (grounding.empty()) throw Error(ErrorCode::kNoSupportSurface, "grounding mesh is empty");
    const auto support = grounding_clusters(grounding, cfg, obstacles);

    std::string reasons;
    for (std::size_t ci = 0; ci < support.clusters.size(); ++ci) {
        const SupportCluster& cluster = support.clusters[ci];
        VoxelGrid level0;
        try {
            level0 = build_voxel_grid(cluster, primary_width, cfg);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::kClusterTooSmall) throw;
            reasons += " cluster " + std::to_string(ci) + ": too small;";
            continue;
        }
        auto trace = build_hierarchy(level0, cfg);
        // Level 0 alone means no n x n footprint passed the threshold.
        if (trace.size() < 2) {
            reasons += " cluster " + std::to_string(ci) + ": no window passes the threshold;";
            continue;
        }
        const VoxelGrid& final_grid = trace.back();
        const int levels = final_grid.level;
        const auto clearance = chebyshev_clearance(level0);

        Vec2 centroid = Vec2::Zero();
        for (const auto& p : cluster.points) centroid += p.head<2>();
        centroid /= static_cast<double>(cluster.points.size());

        // Most clearance wins; ties go to the cell nearest the cluster centroid,
        // then to the lowest row and column.
        int best_r = -1, best_c = -1, best_score = -1;
        double best_d2 = 0.0;
        for (int r = 0; r < final_grid.rows; ++r) {
            for (int c = 0; c < final_grid.cols; ++c) {
                if (!final_grid.at(r, c)) continue;
                const Vec2 xy = grid_location(level0.origin, level0.cell_size, levels, c + 1, r + 1);
                const int c0 = std::clamp(static_cast<int>(std::floor((xy.x() - level0.origin.x()) / level0.cell_size)), 0, level0.cols - 1);
                const int r0 = std::clamp(static_cast<int>(std::floor((xy.y() - level0.origin.y()) / level0.cell_size)), 0, level0.rows - 1);
                const int score = clearance[static_cast<std::size_t>(r0) * level0.cols + c0];
                const double d2 = (xy - centroid).squaredNorm();
                if (score > best_score || (score == best_score && d2 < best_d2 - 1e-9 * level0.cell_size * level0.cell_size)) {
                    best_score = score;
                    best_d2 = d2;
                    best_r = r;
                    best_c = c;
                }
            }
        }

        PlacementResult result;
        result.levels = levels;
        result.cluster_index = ci;
        result.chosen_cluster = cluster;
        result.x_id = best_c + 1;
        result.y_id = best_r + 1;
        result.origin = level0.origin;
        result.cell_size = level0.cell_size;
        const Vec2 xy = grid_location(result.origin, result.cell_size, levels, result.x_id, result.y_id);
        result.location = Vec3(xy.x(), xy.y(), support_height(cluster, xy, cfg.z_neighbors));
        result.candidate_trace = std::move(trace);
        return result;
    }
    throw Error(ErrorCode::kNoFeasibleLocation, "no support cluster can hold the object;" + reasons);
}

PlacementResult center_location(const TriangleMesh& grounding, const FilterConfig& cfg) {
    cfg.validate();
    const auto support = grounding_clusters(grounding, cfg, {});
    const Aabb box = compute_aabb(grounding);
    const Vec2 xy(box.center().x(), box.center().y());
    PlacementResult result;
    result.chosen_cluster = support.clusters.front();
    result.location = Vec3(xy.x(), xy.y(), support_height(result.chosen_cluster, xy, cfg.z_neighbors));
    return result;
}

PenetrationReport penetration_percent(const TriangleMesh& object, const SignedDistanceField& scene_sdf,
                                      std::optional<double> support_z, double contact_epsilon) {
    PenetrationReport report;
    report.vertex_count = object.vertices.size();
    if (object.vertices.empty()) return report;
    for (std::size_t v = 0; v < object.vertices.size(); ++v) {
        const Vec3& p = object.vertices[v];
        if (support_z && std::abs(p.z() - *support_z) <= contact_epsilon) continue;
        if (scene_sdf.query(p) < 0.0) report.offending_vertex_ids.push_back(static_cast<std::uint32_t>(v));
    }
    report.fraction = static_cast<double>(report.offending_vertex_ids.size()) / static_cast<double>(report.vertex_count);
    return report;
}

Vec3 base_centroid(const TriangleMesh& object, double base_fraction) {
    const Aabb box = compute_aabb(object);
    const double cutoff = box.min.z() + base_fraction * (box.max.z() - box.min.z());
    Vec2 sum = Vec2::Zero();
    std::size_t count = 0;
    for (const auto& v : object.vertices) {
        if (v.z() <= cutoff) {
            sum += Vec2(v.x(), v.y());
            ++count;
        }
    }
    if (count == 0) return {box.center().x(), box.center().y(), box.min.z()};
    sum /= static_cast<double>(count);
    return {sum.x(), sum.y(), box.min.z()};
}

TriangleMesh place_object(const TriangleMesh& object, const Vec3& location, double angle, double base_fraction) {
    const Vec3 base = base_centroid(object, base_fraction);
    RigidTransform t;
    t.rotation_z = angle;
    // v' = R (v - base) + location
    const Vec3 rotated_base = RigidTransform{angle, Vec3::Zero(), 1.0}.apply(base);
    t.translation = location - rotated_base;
    return apply_transform(object, t);
}

PlacementResult refine_rotation(const TriangleMesh& object, PlacementResult placement, const SignedDistanceField& scene_sdf,
                                const FilterConfig& cfg) {
    cfg.validate();
    const double support_z = placement.location.z();
    double best = 0.0;
    int best_step = 0;
    for (int k = 0; k < cfg.rotation_steps; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / cfg.rotation_steps;
        const TriangleMesh placed = place_object(object, placement.location, angle, cfg.base_fraction);
        const double frac = penetration_percent(placed, scene_sdf, support_z, cfg.contact_epsilon).fraction;
        if (k == 0) {
            placement.penetration_before = frac;
            best = frac;
        } else if (frac < best) {
            best = frac;
            best_step = k;
        }
    }
    placement.rotation_z = 2.0 * std::numbers::pi * best_step / cfg.rotation_steps;
    placement.penetration_after = best;
    return placement;
}

json trace_to_json(const PlacementResult& result) {
    json grids = json::array();
    for (const auto& g : result.candidate_trace) {
        json rows = json::array();
        for (int r = 0; r < g.rows; ++r) {
            json row = json::array();
            for (int c = 0; c < g.cols; ++c) row.push_back(g.at(r, c));
            rows.push_back(std::move(row));
        }
        grids.push_back({{"level", g.level}, {"rows", g.rows}, {"cols", g.cols}, {"cells", std::move(rows)}});
    }
    return {{"origin", {result.origin.x(), result.origin.y()}},
            {"cell_size", result.cell_size},
            {"levels", result.levels},
            {"chosen", {{"x_id", result.x_id}, {"y_id", result.y_id}}},
            {"grids", std::move(grids)}};
}

json placement_to_json(const PlacementResult& result) {
    return {{"location", {result.location.x(), result.location.y(), result.location.z()}},
            {"levels", result.levels},
            {"cluster_index", result.cluster_index},
            {"cluster_z_level", result.chosen_cluster.z_level},
            {"x_id", result.x_id},
            {"y_id", result.y_id},
            {"origin", {result.origin.x(), result.origin.y()}},
            {"cell_size", result.cell_size},
            {"rotation_z", result.rotation_z},
            {"penetration_before", result.penetration_before},
            {"penetration_after", result.penetration_after}};
}

}  // namespace scenedit
