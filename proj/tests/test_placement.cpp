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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "scenedit/error.hpp"
#include "scenedit/grounding.hpp"
#include "scenedit/placement.hpp"

namespace scenedit {
namespace {

using testing::box;
using testing::cube;
using testing::plate;

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::kConfigError;
}

TriangleMesh tilted_plate(double degrees) {
    TriangleMesh m = plate(0, 0, 5, 5, 0.1);
    const double t = degrees * std::numbers::pi / 180.0;
    for (auto& v : m.vertices) v = Vec3(v.x() * std::cos(t), v.y(), v.x() * std::sin(t));
    return m;
}

TEST(FilterUp, PlateWallAndTilt) {
    FilterConfig cfg;
    const TriangleMesh flat = plate(0, 0, 4, 4, 0.1);
    EXPECT_EQ(filter_up_vertices(flat, cfg).size(), flat.vertices.size());

    TriangleMesh wall = plate(0, 0, 4, 4, 0.1);
    for (auto& v : wall.vertices) v = Vec3(v.x(), 0.0, v.y());
    EXPECT_EQ(code_of([&] { filter_up_vertices(wall, cfg); }), ErrorCode::kNoSupportSurface);

    EXPECT_EQ(code_of([&] { filter_up_vertices(tilted_plate(cfg.up_angle_tolerance_deg + 5), cfg); }),
              ErrorCode::kNoSupportSurface);
    const TriangleMesh shallow = tilted_plate(cfg.up_angle_tolerance_deg - 5);
    EXPECT_EQ(filter_up_vertices(shallow, cfg).size(), shallow.vertices.size());
}

TEST(Dbscan, TwoPlatesApartGiveTwoClusters) {
    std::vector<Vec3> pts;
    for (const auto& v : plate(0, 0, 10, 10, 0.02).vertices) pts.push_back(v);
    for (const auto& v : plate(0, 0, 6, 6, 0.02, 1.0).vertices) pts.push_back(v);
    FilterConfig cfg;
    cfg.dbscan_eps = 0.05;
    const auto clusters = cluster_support(pts, cfg);
    ASSERT_EQ(clusters.size(), 2u);
    EXPECT_EQ(clusters[0].points.size(), 121u);
    EXPECT_EQ(clusters[1].points.size(), 49u);
    EXPECT_NEAR(clusters[1].z_level, 1.0, 1e-12);
    auto sizes = oracle::dbscan_component_sizes(pts, 0.05, cfg.dbscan_min_pts);
    EXPECT_EQ(sizes, (std::vector<std::size_t>{49, 121}));
}

TEST(Dbscan, SinglePlateIsOneClusterAndScatteredPointsAreNoise) {
    std::vector<Vec3> pts;
    for (const auto& v : plate(0, 0, 8, 8, 0.05).vertices) pts.push_back(v);
    FilterConfig cfg;
    EXPECT_EQ(cluster_support(pts, cfg).size(), 1u);
    EXPECT_EQ(cluster_support(pts, cfg)[0].points.size(), pts.size());

    const std::vector<Vec3> scattered = {Vec3(0, 0, 0), Vec3(5, 0, 0), Vec3(0, 5, 0)};
    cfg.dbscan_min_pts = 4;
    cfg.dbscan_eps = 0.1;
    EXPECT_EQ(code_of([&] { cluster_support(scattered, cfg); }), ErrorCode::kNoSupportSurface);
}

TEST(Dbscan, RandomBlobsMatchComponentOracle) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 0.05);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec3> pts;
        const int blobs = 1 + trial % 4;
        for (int b = 0; b < blobs; ++b) {
            const Vec3 c(b * 1.0, (trial % 3) * 0.5, 0.0);
            for (int i = 0; i < 40; ++i) pts.push_back(c + Vec3(g(rng), g(rng), 0.0));
        }
        for (int i = 0; i < 5; ++i) pts.push_back(Vec3(10.0 + 3.0 * i, -7.0, 0.0));
        const auto labels = dbscan(pts, 0.08, 1);
        int count = 0;
        for (int l : labels) count = std::max(count, l + 1);
        std::vector<std::size_t> sizes(static_cast<std::size_t>(count), 0);
        for (int l : labels) {
            ASSERT_GE(l, 0);
            ++sizes[static_cast<std::size_t>(l)];
        }
        std::sort(sizes.begin(), sizes.end());
        EXPECT_EQ(sizes, oracle::dbscan_component_sizes(pts, 0.08, 1));
    }
}

SupportCluster cluster_of(const TriangleMesh& m) {
    SupportCluster c;
    c.points = m.vertices;
    for (std::uint32_t i = 0; i < m.vertices.size(); ++i) c.vertex_ids.push_back(i);
    return c;
}

TEST(VoxelGrid, SixBySixPlateAndHoles) {
    FilterConfig cfg;
    const double s = 0.1;
    // 6s x 6s plate sampled at s / 4.
    const SupportCluster full = cluster_of(plate(0, 0, 24, 24, s / 4));
    const VoxelGrid g = build_voxel_grid(full, 3 * s, cfg);
    EXPECT_EQ(g.rows, 6);
    EXPECT_EQ(g.cols, 6);
    EXPECT_EQ(g.count_ones(), 36u);
    EXPECT_DOUBLE_EQ(g.cell_size, s);

    SupportCluster holed = full;
    std::erase_if(holed.points, [&](const Vec3& p) { return p.x() > 2 * s && p.x() < 3 * s && p.y() > 2 * s && p.y() < 3 * s; });
    const VoxelGrid h = build_voxel_grid(holed, 3 * s, cfg);
    EXPECT_EQ(h.at(2, 2), 0);
    EXPECT_EQ(h.count_ones(), 35u);

    EXPECT_EQ(code_of([&] { build_voxel_grid(cluster_of(plate(0, 0, 8, 8, s / 4)), 3 * s, cfg); }), ErrorCode::kClusterTooSmall);
}

TEST(VoxelGrid, SixBySixShrinksToTwoByTwo) {
    FilterConfig cfg;
    VoxelGrid g;
    g.rows = g.cols = 6;
    g.cell_size = 0.1;
    g.cells.assign(36, 1);
    const auto trace = build_hierarchy(g, cfg);
    ASSERT_EQ(trace.size(), 3u);
    EXPECT_EQ(trace[1].rows, 4);
    EXPECT_EQ(trace[1].cols, 4);
    EXPECT_EQ(trace[2].rows, 2);
    EXPECT_EQ(trace[2].cols, 2);
    EXPECT_EQ(trace[2].level, 2);
    EXPECT_EQ(trace[2].count_ones(), 4u);
}

TEST(VoxelGrid, ConvolutionMatchesOracle) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        FilterConfig cfg;
        cfg.n = 2 + trial % 3;
        cfg.threshold = std::array{0.5, 0.9, 1.0}[trial % 3];
        VoxelGrid g;
        g.rows = std::uniform_int_distribution<int>(cfg.n, 20)(rng);
        g.cols = std::uniform_int_distribution<int>(cfg.n, 20)(rng);
        const double density = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
        for (int i = 0; i < g.rows * g.cols; ++i) g.cells.push_back(std::bernoulli_distribution(density)(rng));
        const VoxelGrid out = convolve_level(g, cfg);
        EXPECT_EQ(out.rows, g.rows - cfg.n + 1);
        EXPECT_EQ(out.cols, g.cols - cfg.n + 1);
        EXPECT_EQ(out.cells, oracle::convolve(g.cells, g.rows, g.cols, cfg.n, cfg.threshold));
        EXPECT_EQ(out.origin, g.origin);

        // Every 1 at level L comes from a window at L-1 whose mean passed.
        const auto trace = build_hierarchy(g, cfg);
        for (std::size_t l = 1; l < trace.size(); ++l) {
            EXPECT_EQ(trace[l].cells, oracle::convolve(trace[l - 1].cells, trace[l - 1].rows, trace[l - 1].cols, cfg.n, cfg.threshold));
            EXPECT_GT(trace[l].count_ones(), 0u);
        }
    }
}

TEST(VoxelGrid, ChebyshevClearanceMatchesBruteForce) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        VoxelGrid g;
        g.rows = std::uniform_int_distribution<int>(1, 12)(rng);
        g.cols = std::uniform_int_distribution<int>(1, 12)(rng);
        for (int i = 0; i < g.rows * g.cols; ++i) g.cells.push_back(std::bernoulli_distribution(0.8)(rng));
        const auto d = chebyshev_clearance(g);
        for (int r = 0; r < g.rows; ++r) {
            for (int c = 0; c < g.cols; ++c) {
                int best = std::min({r + 1, c + 1, g.rows - r, g.cols - c});
                if (!g.at(r, c)) best = 0;
                for (int rr = 0; rr < g.rows; ++rr) {
                    for (int cc = 0; cc < g.cols; ++cc) {
                        if (!g.at(rr, cc)) best = std::min(best, std::max(std::abs(rr - r), std::abs(cc - c)));
                    }
                }
                EXPECT_EQ(d[static_cast<std::size_t>(r) * g.cols + c], best);
            }
        }
    }
}

TEST(FindLocation, GridLocationFormula) {
    const Vec2 xy = grid_location(Vec2(0, 0), 0.1, 2, 1, 1);
    EXPECT_NEAR(xy.x(), 0.25, 1e-15);
    EXPECT_NEAR(xy.y(), 0.25, 1e-15);
}

TEST(FindLocation, EmptyTableLandsNearTheCentroid) {
    FilterConfig cfg;
    const TriangleMesh top = plate(0, 0, 60, 40, 0.02, 0.75);
    const PlacementResult r = find_location(top, 0.15, cfg);
    EXPECT_NEAR(r.location.z(), 0.75, 1e-12);
    EXPECT_LE(std::abs(r.location.x() - 0.6), r.cell_size);
    EXPECT_LE(std::abs(r.location.y() - 0.4), r.cell_size);
    const Aabb box = r.chosen_cluster.aabb();
    EXPECT_GE(r.location.x(), box.min.x());
    EXPECT_LE(r.location.x(), box.max.x());
    EXPECT_EQ(r.candidate_trace.size(), static_cast<std::size_t>(r.levels + 1));
}

TEST(FindLocation, AvoidsTheClutteredHalf) {
    FilterConfig cfg;
    TriangleMesh top = plate(0, 0, 60, 40, 0.02, 0.75);
    // No up-vertices under clutter on the left half, except a thin rim
    // that keeps the cluster spanning the whole table.
    top = remove_faces(top, [&](std::size_t f) {
              for (auto v : top.faces[f]) {
                  const Vec3& p = top.vertices[v];
                  if (p.x() > 0.04 && p.x() < 0.59 && p.y() > 0.04 && p.y() < 0.76) return true;
              }
              return false;
          }).mesh;
    const PlacementResult r = find_location(top, 0.15, cfg);
    EXPECT_GT(r.location.x(), 0.6);

    // Oracle: the chosen cell has the best level-0 clearance among survivors.
    const VoxelGrid& level0 = r.candidate_trace.front();
    const auto clearance = chebyshev_clearance(level0);
    int best = -1;
    const VoxelGrid& last = r.candidate_trace.back();
    auto score_at = [&](int row, int col) {
        const Vec2 xy = grid_location(level0.origin, level0.cell_size, r.levels, col + 1, row + 1);
        const int c0 = std::clamp(static_cast<int>(std::floor((xy.x() - level0.origin.x()) / level0.cell_size)), 0, level0.cols - 1);
        const int r0 = std::clamp(static_cast<int>(std::floor((xy.y() - level0.origin.y()) / level0.cell_size)), 0, level0.rows - 1);
        return clearance[static_cast<std::size_t>(r0) * level0.cols + c0];
    };
    for (int row = 0; row < last.rows; ++row) {
        for (int col = 0; col < last.cols; ++col) {
            if (last.at(row, col)) best = std::max(best, score_at(row, col));
        }
    }
    EXPECT_EQ(score_at(r.y_id - 1, r.x_id - 1), best);
}

TEST(FindLocation, ThresholdOneFootprintIsAllOnes) {
    FilterConfig cfg;
    cfg.threshold = std::nextafter(1.0, 0.0);
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        TriangleMesh top = plate(0, 0, 50, 50, 0.02);
        const Vec2 hole(std::uniform_real_distribution<double>(0.1, 0.9)(rng), std::uniform_real_distribution<double>(0.1, 0.9)(rng));
        top = remove_faces(top, [&](std::size_t f) {
                  const Vec3 c = (top.vertices[top.faces[f][0]] + top.vertices[top.faces[f][1]] + top.vertices[top.faces[f][2]]) / 3;
                  return (Vec2(c.x(), c.y()) - hole).norm() < 0.15;
              }).mesh;
        PlacementResult r;
        try {
            r = find_location(top, 0.12, cfg);
        } catch (const Error&) {
            continue;
        }
        const VoxelGrid& l0 = r.candidate_trace.front();
        const int span = r.levels * (cfg.n - 1) + 1;
        for (int i = 0; i < span; ++i) {
            for (int j = 0; j < span; ++j) EXPECT_EQ(l0.at(r.y_id - 1 + i, r.x_id - 1 + j), 1);
        }
    }
}

TEST(FindLocation, TranslationInvariance) {
    FilterConfig cfg;
    TriangleMesh top = plate(0, 0, 40, 30, 0.02, 0.7);
    const PlacementResult a = find_location(top, 0.1, cfg);
    const Vec3 offset(3.25, -1.5, 0.5);
    for (auto& v : top.vertices) v += offset;
    const PlacementResult b = find_location(top, 0.1, cfg);
    EXPECT_LE((b.location - a.location - offset).norm(), 1e-9);
}

TEST(FindLocation, NoFeasibleLocation) {
    FilterConfig cfg;
    EXPECT_EQ(code_of([&] { find_location(plate(0, 0, 10, 10, 0.02), 1.0, cfg); }), ErrorCode::kNoFeasibleLocation);
}

TEST(FindLocation, ObstaclesRemoveCoveredSupport) {
    FilterConfig cfg;
    const TriangleMesh top = plate(0, 0, 60, 40, 0.02);
    // A shelf hovering 0.1 m over the right half.
    const TriangleMesh scene = merge(top, box(Vec3(0.9, 0.4, 0.15), Vec3(0.6, 0.8, 0.02)), kUntagged);
    const SignedDistanceField sdf(scene);
    const PlacementResult tall = find_location(top, 0.15, cfg, Obstacles{&sdf, 0.3});
    EXPECT_LT(tall.location.x(), 0.6);
}

TEST(Penetration, SeparatedContainedAndHalfEmbedded) {
    const SignedDistanceField big(cube(Vec3(0, 0, 0), 2.0));
    EXPECT_DOUBLE_EQ(penetration_percent(cube(Vec3(0, 0, 5), 0.5), big).fraction, 0.0);
    const auto inside = penetration_percent(cube(Vec3(0.1, 0, 0), 0.5), big);
    EXPECT_DOUBLE_EQ(inside.fraction, 1.0);
    EXPECT_EQ(inside.offending_vertex_ids.size(), inside.vertex_count);

    // Slab top at z = 0; a cube with 5 vertex layers straddles it.
    const SignedDistanceField slab(box(Vec3(0, 0, -0.5), Vec3(4, 4, 1)));
    const TriangleMesh half = cube(Vec3(0, 0, 0.01), 0.4);
    std::size_t below = 0;
    for (const auto& v : half.vertices) below += v.z() < 0;
    const auto r = penetration_percent(half, slab);
    EXPECT_NEAR(r.fraction, static_cast<double>(below) / half.vertices.size(), 1e-12);
    EXPECT_NEAR(r.fraction, 0.5, 0.2);

    const SignedDistanceField table(plate(-1, -1, 20, 20, 0.1, 0.0));
    EXPECT_DOUBLE_EQ(penetration_percent(cube(Vec3(0, 0, 0.5 + 0.25), 0.5), table).fraction, 0.0);
}

TEST(Penetration, ContactBandIsIgnoredAndOrderDoesNotMatter) {
    const SignedDistanceField table(plate(-1, -1, 20, 20, 0.1, 0.0));
    TriangleMesh resting = cube(Vec3(0, 0, 0.25 - 0.003), 0.5);
    EXPECT_GT(penetration_percent(resting, table).fraction, 0.0);
    EXPECT_DOUBLE_EQ(penetration_percent(resting, table, 0.0, 0.005).fraction, 0.0);

    TriangleMesh sunk = cube(Vec3(0.05, 0, 0.1), 0.5);
    const double f = penetration_percent(sunk, table).fraction;
    std::reverse(sunk.vertices.begin(), sunk.vertices.end());
    EXPECT_DOUBLE_EQ(penetration_percent(sunk, table).fraction, f);
}

TEST(Penetration, AgreesWithRayParity) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::vector<TriangleMesh> fixtures = {cube(Vec3::Zero(), 1.2), box(Vec3(0.2, 0, 0), Vec3(1.5, 0.6, 0.9)),
                                                normalize_asset(make_sphere(24, 12)), make_cylinder(24, 4, 2), make_cone(24, 4, 2)};
    int agree = 0, total = 0;
    for (const auto& mesh : fixtures) {
        const SignedDistanceField sdf(mesh);
        for (int i = 0; i < 200; ++i) {
            TriangleMesh point;
            point.vertices.emplace_back(u(rng), u(rng), u(rng));
            agree += (penetration_percent(point, sdf).fraction == 1.0) == oracle::inside(mesh, point.vertices[0]);
            ++total;
        }
    }
    EXPECT_GE(agree, total * 995 / 1000);
}

TEST(Refine, NeverIncreasesPenetration) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    const TriangleMesh scene = merge(plate(-1, -1, 20, 20, 0.1), box(Vec3(0.2, 0.1, 0.25), Vec3(0.3, 0.6, 0.5)), kUntagged);
    const SignedDistanceField sdf(scene);
    FilterConfig cfg;
    cfg.rotation_steps = 8;
    const TriangleMesh object = normalize_asset(box(Vec3::Zero(), Vec3(0.6, 0.1, 0.2)));
    for (int i = 0; i < 200; ++i) {
        PlacementResult p;
        p.location = Vec3(u(rng), u(rng), 0.0);
        const PlacementResult r = refine_rotation(object, p, sdf, cfg);
        EXPECT_LE(r.penetration_after, r.penetration_before);
        const TriangleMesh placed = place_object(object, p.location, 0.0, cfg.base_fraction);
        EXPECT_DOUBLE_EQ(r.penetration_before, penetration_percent(placed, sdf, 0.0, cfg.contact_epsilon).fraction);
    }
}

TEST(Refine, SymmetricCylinderKeepsZeroAndOneStepIsIdentity) {
    const SignedDistanceField sdf(merge(plate(-1, -1, 20, 20, 0.1), cube(Vec3(0.3, 0, 0.2), 0.4), kUntagged));
    FilterConfig cfg;
    cfg.rotation_steps = 24;
    const TriangleMesh cyl = normalize_asset(make_cylinder(24, 4, 2));
    PlacementResult p;
    p.location = Vec3(-0.5, 0.0, 0.0);
    EXPECT_DOUBLE_EQ(refine_rotation(cyl, p, sdf, cfg).rotation_z, 0.0);

    cfg.rotation_steps = 1;
    p.location = Vec3(0.0, 0.0, 0.0);
    const PlacementResult one = refine_rotation(normalize_asset(box(Vec3::Zero(), Vec3(1.0, 0.1, 0.2))), p, sdf, cfg);
    EXPECT_DOUBLE_EQ(one.rotation_z, 0.0);
    EXPECT_DOUBLE_EQ(one.penetration_after, one.penetration_before);
}

TEST(Refine, LongBoxTurnsParallelToTheWall) {
    // Wall along Y at x = 0.3; a long box centered at the origin along X
    // pokes into it until it turns parallel.
    const TriangleMesh scene = merge(plate(-1, -1, 20, 20, 0.1), box(Vec3(0.5, 0, 0.5), Vec3(0.4, 2.0, 1.0)), kUntagged);
    const SignedDistanceField sdf(scene);
    FilterConfig cfg;
    const TriangleMesh object = normalize_asset(box(Vec3::Zero(), Vec3(1.0, 0.1, 0.2), 8));
    PlacementResult p;
    p.location = Vec3(0.0, 0.0, 0.0);
    const PlacementResult coarse = refine_rotation(object, p, sdf, cfg);
    EXPECT_GT(coarse.penetration_before, 0.0);
    EXPECT_DOUBLE_EQ(coarse.penetration_after, 0.0);

    // Finer sweep agrees that the winning coarse bin is penetration-free.
    FilterConfig fine = cfg;
    fine.rotation_steps = cfg.rotation_steps * 10;
    double best = 1.0;
    double best_angle = 0.0;
    for (int k = 0; k < fine.rotation_steps; ++k) {
        const double a = 2 * std::numbers::pi * k / fine.rotation_steps;
        const double f = penetration_percent(place_object(object, p.location, a), sdf, 0.0, cfg.contact_epsilon).fraction;
        if (f < best) {
            best = f;
            best_angle = a;
        }
    }
    EXPECT_DOUBLE_EQ(best, 0.0);
    EXPECT_NEAR(std::abs(std::sin(coarse.rotation_z)), 1.0, 0.3);
    EXPECT_NEAR(std::abs(std::sin(best_angle)), 1.0, 0.3);
}

TEST(PlaceObject, BaseCentroidLandsOnLocation) {
    const TriangleMesh object = normalize_asset(box(Vec3::Zero(), Vec3(0.4, 0.2, 0.3)));
    const Vec3 loc(1.0, -2.0, 0.75);
    const TriangleMesh placed = place_object(object, loc, 0.7);
    const Vec3 base = base_centroid(placed);
    EXPECT_LE((base - loc).norm(), 1e-12);
}

TEST(Trace, SerializesEveryLevel) {
    FilterConfig cfg;
    const PlacementResult r = find_location(plate(0, 0, 30, 30, 0.02), 0.1, cfg);
    const auto j = trace_to_json(r);
    EXPECT_EQ(j["grids"].size(), r.candidate_trace.size());
    EXPECT_EQ(j["chosen"]["x_id"], r.x_id);
    EXPECT_EQ(j["grids"][0]["cells"].size(), static_cast<std::size_t>(r.candidate_trace[0].rows));
}

TEST(FilterConfig, Validation) {
    FilterConfig cfg;
    cfg.n = 1;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = FilterConfig();
    cfg.threshold = 0.0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = FilterConfig();
    cfg.rotation_steps = 0;
    EXPECT_THROW(cfg.validate(), Error);
}

}  // namespace
}  // namespace scenedit
