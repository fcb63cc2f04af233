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

#include "scenedit/bench.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "scenedit/asset.hpp"
#include "scenedit/error.hpp"
#include "scenedit/grounding.hpp"

namespace scenedit {

namespace {

class SceneBuilder {
public:
    void add(const TriangleMesh& part, const std::string& label, std::int64_t instance) {
        mesh_ = merge(mesh_, part, kUntagged);
        labels_.resize(mesh_.vertices.size(), label);
        instances_.resize(mesh_.vertices.size(), instance);
    }

    Scene finish() {
        Scene s;
        s.mesh = std::move(mesh_);
        s.mesh.face_tags.clear();
        s.mesh.name = "table_scene";
        s.annotations = VertexAnnotations{std::move(labels_), std::move(instances_)};
        return s;
    }

private:
    TriangleMesh mesh_;
    std::vector<std::string> labels_;
    std::vector<std::int64_t> instances_;
};

// Unit primitive scaled to size with its base at z0 and XY center at c.
TriangleMesh sized(TriangleMesh m, const Vec3& size, const Vec2& c, double z0) {
    for (auto& v : m.vertices) {
        v = Vec3(v.x() * size.x() + c.x(), v.y() * size.y() + c.y(), (v.z() + 0.5) * size.z() + z0);
    }
    m.vertex_normals.clear();
    return m;
}

// Upward-facing grid over [x0, x1] x [y0, y1] at height z; vertices for which
// keep() is false are dropped along with their faces.
TriangleMesh grid_plane(double x0, double x1, double y0, double y1, double z, double spacing,
                        const std::function<bool(double, double)>& keep) {
    const int nx = std::max(1, static_cast<int>(std::round((x1 - x0) / spacing)));
    const int ny = std::max(1, static_cast<int>(std::round((y1 - y0) / spacing)));
    TriangleMesh m;
    std::vector<std::int64_t> index(static_cast<std::size_t>(nx + 1) * (ny + 1), -1);
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const double x = x0 + (x1 - x0) * i / nx;
            const double y = y0 + (y1 - y0) * j / ny;
            if (!keep(x, y)) continue;
            index[static_cast<std::size_t>(j) * (nx + 1) + i] = static_cast<std::int64_t>(m.vertices.size());
            m.vertices.emplace_back(x, y, z);
        }
    }
    auto at = [&](int i, int j) { return index[static_cast<std::size_t>(j) * (nx + 1) + i]; };
    auto tri = [&](std::int64_t a, std::int64_t b, std::int64_t c) {
        if (a >= 0 && b >= 0 && c >= 0) {
            m.faces.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(c)});
        }
    };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            tri(at(i, j), at(i + 1, j), at(i + 1, j + 1));
            tri(at(i, j), at(i + 1, j + 1), at(i, j + 1));
        }
    }
    std::vector<std::int64_t> remap(m.vertices.size(), -1);
    TriangleMesh out;
    for (auto& f : m.faces) {
        for (auto& v : f) {
            if (remap[v] < 0) {
                remap[v] = static_cast<std::int64_t>(out.vertices.size());
                out.vertices.push_back(m.vertices[v]);
            }
            v = static_cast<std::uint32_t>(remap[v]);
        }
    }
    out.faces = std::move(m.faces);
    return out;
}

bool under_item(const ClutterItem& c, double x, double y, double margin) {
    const double hx = 0.5 * c.size.x() + margin;
    const double hy = 0.5 * c.size.y() + margin;
    if (c.shape == ClutterShape::kBox) return std::abs(x - c.center.x()) < hx && std::abs(y - c.center.y()) < hy;
    const double dx = (x - c.center.x()) / hx;
    const double dy = (y - c.center.y()) / hy;
    return dx * dx + dy * dy < 1.0;
}

void add_sample(BenchCell& cell, double value) {
    cell.mean_penetration += (value - cell.mean_penetration) / static_cast<double>(++cell.samples);
}

}  // namespace

Scene make_table_scene(const TableSceneSpec& spec) {
    SceneBuilder b;
    const double f = spec.floor_half_extent;
    b.add(grid_plane(-f, f, -f, f, 0.0, 0.1, [](double, double) { return true; }), "floor", 0);

    const double hx = 0.5 * spec.width;
    const double hy = 0.5 * spec.depth;
    const double margin = 0.5 * spec.grid_spacing;
    auto visible = [&](double x, double y) {
        for (const auto& c : spec.clutter) {
            if (under_item(c, x, y, -margin)) return false;
        }
        return true;
    };
    TriangleMesh top = grid_plane(-hx, hx, -hy, hy, spec.height, spec.grid_spacing, visible);
    const double leg = 0.05;
    const double leg_top = spec.height - 0.06;
    for (int sx : {-1, 1}) {
        for (int sy : {-1, 1}) {
            const Vec2 c(sx * (hx - leg), sy * (hy - leg));
            top = merge(top, sized(make_box(2), Vec3(leg, leg, leg_top), c, 0.0), kUntagged);
        }
    }
    b.add(top, "table", 1);

    std::int64_t instance = 2;
    for (const auto& c : spec.clutter) {
        const TriangleMesh unit = c.shape == ClutterShape::kBox ? make_box(4) : make_cylinder(24, 4, 2);
        b.add(sized(unit, c.size, c.center, spec.height), "clutter", instance++);
    }
    return b.finish();
}

TableSceneSpec random_table_spec(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    TableSceneSpec spec;
    spec.width = uni(1.0, 1.6);
    spec.depth = uni(0.6, 1.0);
    spec.height = uni(0.7, 0.8);
    const int count = std::uniform_int_distribution<int>(3, 6)(rng);
    const bool centered = uni(0.0, 1.0) < 0.7;
    int attempts = 0;
    while (static_cast<int>(spec.clutter.size()) < count && attempts++ < 500) {
        ClutterItem c;
        c.shape = uni(0.0, 1.0) < 0.5 ? ClutterShape::kBox : ClutterShape::kCylinder;
        c.size = Vec3(uni(0.1, 0.3), uni(0.1, 0.3), uni(0.05, 0.3));
        if (c.shape == ClutterShape::kCylinder) c.size.y() = c.size.x();
        const double mx = 0.5 * spec.width - 0.5 * c.size.x() - 0.03;
        const double my = 0.5 * spec.depth - 0.5 * c.size.y() - 0.03;
        if (spec.clutter.empty() && centered) {
            c.center = Vec2(uni(-0.05, 0.05), uni(-0.05, 0.05));
        } else {
            c.center = Vec2(uni(-mx, mx), uni(-my, my));
        }
        bool clear = true;
        for (const auto& o : spec.clutter) {
            const Vec2 gap = (o.center - c.center).cwiseAbs() - 0.5 * (o.size.head<2>() + c.size.head<2>());
            if (gap.x() < 0.02 && gap.y() < 0.02) clear = false;
        }
        if (clear) spec.clutter.push_back(c);
    }
    return spec;
}

std::string BenchReport::to_csv() const {
    std::ostringstream out;
    out.precision(6);
    out << "method,no_refine,refine,samples\n";
    out << "center_baseline," << center_no_refine.mean_penetration << ',' << center_refine.mean_penetration << ','
        << center_no_refine.samples << '\n';
    out << "location_finder," << location_no_refine.mean_penetration << ',' << location_refine.mean_penetration << ','
        << location_no_refine.samples << '\n';
    return out.str();
}

nlohmann::json BenchReport::to_json() const {
    auto cell = [](const BenchCell& c) { return nlohmann::json{{"mean_penetration", c.mean_penetration}, {"samples", c.samples}}; };
    return {{"center_baseline", {{"no_refine", cell(center_no_refine)}, {"refine", cell(center_refine)}}},
            {"location_finder", {{"no_refine", cell(location_no_refine)}, {"refine", cell(location_refine)}}},
            {"scenes_requested", scenes_requested},
            {"scenes_failed", scenes_failed},
            {"warnings", warnings}};
}

BenchReport run_placement_bench(const BenchOptions& options) {
    options.filter.validate();
    BenchReport report;
    report.scenes_requested = options.scenes;
    if (options.scenes <= 0) {
        report.warnings.push_back("no scenes requested; the report is empty");
        return report;
    }
    for (int i = 0; i < options.scenes; ++i) {
        const std::uint64_t seed = options.seed * 1000003ULL + static_cast<std::uint64_t>(i);
        try {
            const TableSceneSpec spec = random_table_spec(seed);
            const Scene scene = make_table_scene(spec);
            std::vector<std::uint32_t> table_ids;
            for (std::size_t v = 0; v < scene.annotations->labels.size(); ++v) {
                if (scene.annotations->labels[v] == "table") table_ids.push_back(static_cast<std::uint32_t>(v));
            }
            const TriangleMesh grounding = extract_submesh(scene.mesh, table_ids);
            const SignedDistanceField sdf(scene.mesh);

            std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
            auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
            const Vec3 size(uni(0.12, 0.25), uni(0.12, 0.25), uni(0.1, 0.3));
            const TriangleMesh object = normalize_asset(sized(uni(0.0, 1.0) < 0.5 ? make_box(4) : make_cylinder(24, 4, 2), size, Vec2::Zero(), 0.0));

            const Vec3 ext = compute_aabb(object).extent();
            const PlacementResult center = center_location(grounding, options.filter);
            const PlacementResult located =
                find_location(grounding, std::max(ext.x(), ext.y()), options.filter, Obstacles{&sdf, ext.z()});

            auto unrefined = [&](const PlacementResult& p) {
                const TriangleMesh placed = place_object(object, p.location, 0.0, options.filter.base_fraction);
                return 100.0 * penetration_percent(placed, sdf, p.location.z(), options.filter.contact_epsilon).fraction;
            };
            auto refined = [&](const PlacementResult& p) {
                return 100.0 * refine_rotation(object, p, sdf, options.filter).penetration_after;
            };
            const double c0 = unrefined(center), c1 = refined(center);
            const double l0 = unrefined(located), l1 = refined(located);
            add_sample(report.center_no_refine, c0);
            add_sample(report.center_refine, c1);
            add_sample(report.location_no_refine, l0);
            add_sample(report.location_refine, l1);
        } catch (const Error& e) {
            ++report.scenes_failed;
            report.warnings.push_back("scene " + std::to_string(i) + ": " + e.what());
        }
    }
    return report;
}

}  // namespace scenedit
