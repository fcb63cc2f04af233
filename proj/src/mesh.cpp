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

#include "scenedit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <Eigen/Geometry>

#include "scenedit/error.hpp"

namespace scenedit {

bool TriangleMesh::has_defined_normal(std::size_t v) const {
    return v < vertex_normals.size() && vertex_normals[v].allFinite();
}

bool Aabb::contains(const Aabb& inner, double tol) const {
    return (inner.min.array() >= min.array() - tol).all() && (inner.max.array() <= max.array() + tol).all();
}

bool Aabb::intersects_xy(const Aabb& o) const {
    return min.x() <= o.max.x() && o.min.x() <= max.x() && min.y() <= o.max.y() && o.min.y() <= max.y();
}

Vec3 RigidTransform::apply(const Vec3& p) const {
    const Vec3 q = uniform_scale * p;
    if (rotation_z == 0.0) return q + translation;
    const double c = std::cos(rotation_z);
    const double s = std::sin(rotation_z);
    return Vec3(c * q.x() - s * q.y(), s * q.x() + c * q.y(), q.z()) + translation;
}

Aabb compute_aabb(std::span<const Vec3> points) {
    Aabb box;
    for (const auto& p : points) box.expand(p);
    return box;
}

Vec3 face_normal(const TriangleMesh& mesh, std::size_t f) {
    const auto& t = mesh.faces[f];
    const Vec3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]]).cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    const double len = n.norm();
    return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

double face_area(const TriangleMesh& mesh, std::size_t f) {
    const auto& t = mesh.faces[f];
    return 0.5 * (mesh.vertices[t[1]] - mesh.vertices[t[0]]).cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]).norm();
}

void validate_mesh(const TriangleMesh& mesh) {
    const std::size_t n = mesh.vertices.size();
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& t = mesh.faces[f];
        for (auto idx : t) {
            if (idx >= n) throw Error(ErrorCode::kParseError, "face " + std::to_string(f) + " index out of range");
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            throw Error(ErrorCode::kParseError, "face " + std::to_string(f) + " repeats a vertex");
        }
    }
    if (mesh.has_normals()) {
        if (mesh.vertex_normals.size() != n) throw Error(ErrorCode::kParseError, "normal count mismatch");
        for (const auto& nrm : mesh.vertex_normals) {
            if (nrm.allFinite() && std::abs(nrm.norm() - 1.0) > 1e-6) {
                throw Error(ErrorCode::kParseError, "vertex normal is not unit length");
            }
        }
    }
    if (mesh.has_colors() && mesh.vertex_colors.size() != n) throw Error(ErrorCode::kParseError, "color count mismatch");
    if (mesh.has_tags() && mesh.face_tags.size() != mesh.faces.size()) {
        throw Error(ErrorCode::kParseError, "face tag count mismatch");
    }
}

TriangleMesh compute_vertex_normals(const TriangleMesh& mesh) {
    TriangleMesh out = mesh;
    const std::size_t n = mesh.vertices.size();
    std::vector<Vec3> acc(n, Vec3::Zero());
    std::vector<bool> touched(n, false);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& t = mesh.faces[f];
        const Vec3 fn = face_normal(mesh, f);
        for (int k = 0; k < 3; ++k) {
            touched[t[k]] = true;
            if (fn.isZero()) continue;
            const Vec3 e1 = (mesh.vertices[t[(k + 1) % 3]] - mesh.vertices[t[k]]).normalized();
            const Vec3 e2 = (mesh.vertices[t[(k + 2) % 3]] - mesh.vertices[t[k]]).normalized();
            const double angle = std::acos(std::clamp(e1.dot(e2), -1.0, 1.0));
            acc[t[k]] += angle * fn;
        }
    }
    out.vertex_normals.assign(n, Vec3::Constant(std::numeric_limits<double>::quiet_NaN()));
    for (std::size_t v = 0; v < n; ++v) {
        if (!touched[v]) continue;
        const double len = acc[v].norm();
        if (len <= 0.0) {
            throw Error(ErrorCode::kDegenerateGeometry,
                        "vertex " + std::to_string(v) + " has only zero-area incident faces");
        }
        out.vertex_normals[v] = acc[v] / len;
    }
    return out;
}

TriangleMesh apply_transform(const TriangleMesh& mesh, const RigidTransform& t) {
    if (!(t.uniform_scale > 0.0)) throw Error(ErrorCode::kInvalidScale, "uniform_scale must be positive");
    TriangleMesh out = mesh;
    for (auto& v : out.vertices) v = t.apply(v);
    if (out.has_normals()) {
        const Eigen::Matrix3d rot = Eigen::AngleAxisd(t.rotation_z, Vec3::UnitZ()).toRotationMatrix();
        for (auto& nrm : out.vertex_normals) {
            if (nrm.allFinite()) nrm = (rot * nrm).normalized();
        }
    }
    return out;
}

std::uint32_t max_tag(const TriangleMesh& mesh) {
    std::uint32_t m = kUntagged;
    for (auto t : mesh.face_tags) m = std::max(m, t);
    return m;
}

TriangleMesh merge(const TriangleMesh& scene, const TriangleMesh& object, std::uint32_t tag) {
    TriangleMesh out = scene;
    const auto offset = static_cast<std::uint32_t>(scene.vertices.size());
    out.vertices.insert(out.vertices.end(), object.vertices.begin(), object.vertices.end());
    out.faces.reserve(scene.faces.size() + object.faces.size());
    for (const auto& f : object.faces) out.faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});

    // Optional arrays survive only if at least one side has them; the other
    // side is padded.
    const Vec3 nan3 = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
    if (scene.has_normals() || object.has_normals()) {
        out.vertex_normals = scene.has_normals() ? scene.vertex_normals : std::vector<Vec3>(scene.vertices.size(), nan3);
        if (object.has_normals()) {
            out.vertex_normals.insert(out.vertex_normals.end(), object.vertex_normals.begin(), object.vertex_normals.end());
        } else {
            out.vertex_normals.resize(out.vertices.size(), nan3);
        }
    }
    if (scene.has_colors() || object.has_colors()) {
        const Vec3 grey = Vec3::Constant(0.7);
        out.vertex_colors = scene.has_colors() ? scene.vertex_colors : std::vector<Vec3>(scene.vertices.size(), grey);
        if (object.has_colors()) {
            out.vertex_colors.insert(out.vertex_colors.end(), object.vertex_colors.begin(), object.vertex_colors.end());
        } else {
            out.vertex_colors.resize(out.vertices.size(), grey);
        }
    }
    out.face_tags = scene.has_tags() ? scene.face_tags : std::vector<std::uint32_t>(scene.faces.size(), kUntagged);
    if (object.has_tags()) {
        out.face_tags.insert(out.face_tags.end(), object.face_tags.begin(), object.face_tags.end());
    } else {
        out.face_tags.resize(out.faces.size(), tag);
    }
    return out;
}

TriangleMesh merge(const TriangleMesh& scene, const TriangleMesh& object) {
    return merge(scene, object, max_tag(scene) + 1);
}

FaceRemoval remove_faces(const TriangleMesh& mesh, const std::function<bool(std::size_t)>& remove) {
    const std::size_t nv = mesh.vertices.size();
    std::vector<char> used_by_removed(nv, 0), used_by_kept(nv, 0);
    std::vector<char> drop_face(mesh.faces.size(), 0);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        drop_face[f] = remove(f) ? 1 : 0;
        for (auto v : mesh.faces[f]) (drop_face[f] ? used_by_removed : used_by_kept)[v] = 1;
    }

    FaceRemoval result;
    result.vertex_map.assign(nv, -1);
    TriangleMesh& out = result.mesh;
    out.name = mesh.name;
    std::int64_t next = 0;
    for (std::size_t v = 0; v < nv; ++v) {
        if (used_by_removed[v] && !used_by_kept[v]) continue;
        result.vertex_map[v] = next++;
        out.vertices.push_back(mesh.vertices[v]);
        if (mesh.has_normals()) out.vertex_normals.push_back(mesh.vertex_normals[v]);
        if (mesh.has_colors()) out.vertex_colors.push_back(mesh.vertex_colors[v]);
    }
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        if (drop_face[f]) continue;
        const auto& t = mesh.faces[f];
        out.faces.push_back({static_cast<std::uint32_t>(result.vertex_map[t[0]]),
                             static_cast<std::uint32_t>(result.vertex_map[t[1]]),
                             static_cast<std::uint32_t>(result.vertex_map[t[2]])});
        if (mesh.has_tags()) out.face_tags.push_back(mesh.face_tags[f]);
    }
    // A mesh that only ever had untagged faces stays without a tag array.
    if (out.has_tags() && std::all_of(out.face_tags.begin(), out.face_tags.end(), [](auto t) { return t == kUntagged; })) {
        out.face_tags.clear();
    }
    return result;
}

TriangleMesh remove_tag(const TriangleMesh& mesh, std::uint32_t tag) {
    return remove_faces(mesh, [&](std::size_t f) { return mesh.tag_of(f) == tag; }).mesh;
}

std::vector<std::size_t> faces_with_tag(const TriangleMesh& mesh, std::uint32_t tag) {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        if (mesh.tag_of(f) == tag) out.push_back(f);
    }
    return out;
}

double median_edge_length(const TriangleMesh& mesh) {
    std::unordered_set<std::uint64_t> seen;
    std::vector<double> lengths;
    for (const auto& t : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            std::uint32_t a = t[k], b = t[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            if (seen.insert((std::uint64_t{a} << 32) | b).second) {
                lengths.push_back((mesh.vertices[a] - mesh.vertices[b]).norm());
            }
        }
    }
    if (lengths.empty()) return 0.0;
    auto mid = lengths.begin() + static_cast<std::ptrdiff_t>(lengths.size() / 2);
    std::nth_element(lengths.begin(), mid, lengths.end());
    return *mid;
}

}  // namespace scenedit
