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

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace scenedit {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Face = std::array<std::uint32_t, 3>;

/// Face tag 0 marks geometry that did not come from a merge.
inline constexpr std::uint32_t kUntagged = 0;

/// Indexed triangle soup. Coordinates are meters, +Z is up.
///
/// Optional per-vertex arrays (normals, colors) are either empty or sized to
/// the vertex count. A vertex with no incident faces gets a NaN normal after
/// compute_vertex_normals(); use has_defined_normal() to test for it.
/// face_tags is either empty (everything untagged) or sized to the face count.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::vector<Vec3> vertex_normals;
    std::vector<Vec3> vertex_colors;  // linear RGB in [0, 1]
    std::vector<std::uint32_t> face_tags;
    std::string name;

    bool empty() const { return vertices.empty(); }
    bool has_normals() const { return !vertex_normals.empty(); }
    bool has_colors() const { return !vertex_colors.empty(); }
    bool has_tags() const { return !face_tags.empty(); }
    bool has_defined_normal(std::size_t v) const;
    std::uint32_t tag_of(std::size_t f) const { return face_tags.empty() ? kUntagged : face_tags[f]; }
};

struct Aabb {
    Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

    bool valid() const { return (min.array() <= max.array()).all(); }
    Vec3 extent() const { return max - min; }
    Vec3 center() const { return 0.5 * (min + max); }
    void expand(const Vec3& p) {
        min = min.cwiseMin(p);
        max = max.cwiseMax(p);
    }
    void expand(const Aabb& o) {
        min = min.cwiseMin(o.min);
        max = max.cwiseMax(o.max);
    }
    bool contains(const Aabb& inner, double tol = 0.0) const;
    bool intersects_xy(const Aabb& o) const;
};

/// Scale, then rotate about +Z through the origin, then translate.
struct RigidTransform {
    double rotation_z = 0.0;
    Vec3 translation = Vec3::Zero();
    double uniform_scale = 1.0;

    Vec3 apply(const Vec3& p) const;
};

Aabb compute_aabb(std::span<const Vec3> points);
inline Aabb compute_aabb(const TriangleMesh& mesh) { return compute_aabb(mesh.vertices); }

Vec3 face_normal(const TriangleMesh& mesh, std::size_t f);  // unit, or zero for degenerate faces
double face_area(const TriangleMesh& mesh, std::size_t f);

/// Throws ParseError naming the first violated TriangleMesh invariant.
void validate_mesh(const TriangleMesh& mesh);

/// Angle-weighted average of incident face normals.
/// Throws DegenerateGeometry when a vertex touches only zero-area faces.
TriangleMesh compute_vertex_normals(const TriangleMesh& mesh);

/// Throws InvalidScale when uniform_scale <= 0. Existing normals are rotated.
TriangleMesh apply_transform(const TriangleMesh& mesh, const RigidTransform& t);

/// Concatenates object after scene; object faces carry `tag` unless the object
/// is already tagged, in which case its own tags are kept.
TriangleMesh merge(const TriangleMesh& scene, const TriangleMesh& object, std::uint32_t tag);

/// Uses one more than the largest tag present in scene.
TriangleMesh merge(const TriangleMesh& scene, const TriangleMesh& object);

std::uint32_t max_tag(const TriangleMesh& mesh);

struct FaceRemoval {
    TriangleMesh mesh;
    /// old vertex index -> new index, or -1 when the vertex was dropped.
    std::vector<std::int64_t> vertex_map;
};

/// Drops faces for which `remove` is true, then drops every vertex that was
/// used by a removed face and by no surviving face. Vertices that were never
/// referenced are kept.
FaceRemoval remove_faces(const TriangleMesh& mesh, const std::function<bool(std::size_t)>& remove);

TriangleMesh remove_tag(const TriangleMesh& mesh, std::uint32_t tag);

/// Faces carrying `tag`, in index order.
std::vector<std::size_t> faces_with_tag(const TriangleMesh& mesh, std::uint32_t tag);

/// Median over unique edges; 0 for a mesh without faces.
double median_edge_length(const TriangleMesh& mesh);

}  // namespace scenedit
