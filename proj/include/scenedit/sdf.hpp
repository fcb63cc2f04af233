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
#include <vector>

#include "scenedit/mesh.hpp"

namespace scenedit {

/// Which part of a triangle the closest point landed on.
enum class TriangleFeature : std::uint8_t { kFace, kEdge01, kEdge12, kEdge20, kVertex0, kVertex1, kVertex2 };

struct TrianglePoint {
    Vec3 point;
    TriangleFeature feature;
};

TrianglePoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

struct ClosestHit {
    Vec3 point;
    std::size_t face = 0;
    TriangleFeature feature = TriangleFeature::kFace;
    double distance = 0.0;
};

struct RayHit {
    double t = 0.0;
    std::size_t face = 0;
    Vec3 point;
};

/// Axis-aligned bounding volume hierarchy over the faces of a mesh.
class TriangleBvh {
public:
    TriangleBvh() = default;
    explicit TriangleBvh(const TriangleMesh& mesh);

    /// Requires at least one face.
    ClosestHit closest(const TriangleMesh& mesh, const Vec3& p) const;

    /// Nearest hit with t in (0, t_max]; dir need not be normalized.
    std::optional<RayHit> raycast(const TriangleMesh& mesh, const Vec3& origin, const Vec3& dir,
                                  double t_max = std::numeric_limits<double>::infinity()) const;

private:
    struct Node {
        Aabb box;
        std::uint32_t left = 0;   // child index, or first face slot for leaves
        std::uint32_t right = 0;  // child index, or face count for leaves
        bool leaf = false;
    };
    std::uint32_t build(const TriangleMesh& mesh, std::vector<Vec3>& centroids, std::uint32_t begin, std::uint32_t end);

    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
    std::vector<Aabb> face_boxes_;
};

/// Signed distance to a triangle mesh. Inside/outside comes from the
/// angle-weighted pseudo-normal at the closest surface feature, which stays
/// well defined on open, non-watertight scans. Negative means inside.
///
/// Immutable after construction; concurrent queries are safe.
class SignedDistanceField {
public:
    /// Throws DegenerateGeometry when the mesh has no faces.
    explicit SignedDistanceField(TriangleMesh mesh);

    double query(const Vec3& p) const;
    ClosestHit closest(const Vec3& p) const { return bvh_.closest(mesh_, p); }
    std::optional<RayHit> raycast(const Vec3& origin, const Vec3& dir,
                                  double t_max = std::numeric_limits<double>::infinity()) const {
        return bvh_.raycast(mesh_, origin, dir, t_max);
    }

    /// Pseudo-normal of the feature a closest-point query landed on.
    Vec3 pseudo_normal(const ClosestHit& hit) const;

    const TriangleMesh& mesh() const { return mesh_; }

private:
    TriangleMesh mesh_;
    TriangleBvh bvh_;
    std::vector<Vec3> face_normals_;
    std::vector<Vec3> vertex_pseudo_normals_;
    // Per face, per edge (01, 12, 20): sum of the normals of faces sharing it.
    std::vector<std::array<Vec3, 3>> edge_pseudo_normals_;
};

}  // namespace scenedit
