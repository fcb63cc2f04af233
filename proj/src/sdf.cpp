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

#include "scenedit/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "scenedit/error.hpp"

namespace scenedit {

namespace {

constexpr std::uint32_t kLeafSize = 4;

double squared_distance_to_box(const Aabb& box, const Vec3& p) {
    const Vec3 d = (box.min - p).cwiseMax(p - box.max).cwiseMax(Vec3::Zero());
    return d.squaredNorm();
}

// Slab test; returns entry distance or nullopt.
std::optional<double> ray_box(const Aabb& box, const Vec3& origin, const Vec3& inv_dir, double t_max) {
    double t0 = 0.0, t1 = t_max;
    for (int a = 0; a < 3; ++a) {
        double ta = (box.min[a] - origin[a]) * inv_dir[a];
        double tb = (box.max[a] - origin[a]) * inv_dir[a];
        if (std::isnan(ta) || std::isnan(tb)) {
            // Ray parallel to the slab and origin on its plane.
            if (origin[a] < box.min[a] || origin[a] > box.max[a]) return std::nullopt;
            continue;
        }
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return std::nullopt;
    }
    return t0;
}

// Moller-Trumbore.
std::optional<double> ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 pv = d.cross(e2);
    const double det = e1.dot(pv);
    if (std::abs(det) < 1e-300) return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 tv = o - a;
    const double u = tv.dot(pv) * inv;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 qv = tv.cross(e1);
    const double v = d.dot(qv) * inv;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    return e2.dot(qv) * inv;
}

}  // namespace

// Ericson, Real-Time Collision Detection, 5.1.5, extended to report the
// feature the closest point lies on.
TrianglePoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return {a, TriangleFeature::kVertex0};

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return {b, TriangleFeature::kVertex1};

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double v = d1 / (d1 - d3);
        return {a + v * ab, TriangleFeature::kEdge01};
    }

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return {c, TriangleFeature::kVertex2};

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double w = d2 / (d2 - d6);
        return {a + w * ac, TriangleFeature::kEdge20};
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return {b + w * (c - b), TriangleFeature::kEdge12};
    }

    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    return {a + ab * v + ac * w, TriangleFeature::kFace};
}

TriangleBvh::TriangleBvh(const TriangleMesh& mesh) {
    const auto n = static_cast<std::uint32_t>(mesh.faces.size());
    order_.resize(n);
    face_boxes_.resize(n);
    std::vector<Vec3> centroids(n);
    for (std::uint32_t f = 0; f < n; ++f) {
        order_[f] = f;
        Aabb box;
        for (auto v : mesh.faces[f]) box.expand(mesh.vertices[v]);
        face_boxes_[f] = box;
        centroids[f] = box.center();
    }
    nodes_.reserve(n > 0 ? 2 * n / kLeafSize + 2 : 1);
    if (n > 0) build(mesh, centroids, 0, n);
}

std::uint32_t TriangleBvh::build(const TriangleMesh& mesh, std::vector<Vec3>& centroids, std::uint32_t begin,
                                 std::uint32_t end) {
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Aabb box, centroid_box;
    for (std::uint32_t i = begin; i < end; ++i) {
        box.expand(face_boxes_[order_[i]]);
        centroid_box.expand(centroids[order_[i]]);
    }
    nodes_[index].box = box;
    if (end - begin <= kLeafSize) {
        nodes_[index].leaf = true;
        nodes_[index].left = begin;
        nodes_[index].right = end - begin;
        return index;
    }
    int axis = 0;
    centroid_box.extent().maxCoeff(&axis);
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         if (centroids[a][axis] != centroids[b][axis]) return centroids[a][axis] < centroids[b][axis];
                         return a < b;
                     });
    const std::uint32_t left = build(mesh, centroids, begin, mid);
    const std::uint32_t right = build(mesh, centroids, mid, end);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
}

ClosestHit TriangleBvh::closest(const TriangleMesh& mesh, const Vec3& p) const {
    ClosestHit best;
    double best_sq = std::numeric_limits<double>::infinity();
    if (nodes_.empty()) return best;
    std::vector<std::uint32_t> stack{0};
    stack.reserve(64);
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (squared_distance_to_box(node.box, p) >= best_sq) continue;
        if (node.leaf) {
            for (std::uint32_t i = node.left; i < node.left + node.right; ++i) {
                const std::uint32_t f = order_[i];
                const auto& t = mesh.faces[f];
                const TrianglePoint tp = closest_point_on_triangle(p, mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
                const double sq = (tp.point - p).squaredNorm();
                // Ties resolved toward the lower face index for determinism.
                if (sq < best_sq || (sq == best_sq && f < best.face)) {
                    best_sq = sq;
                    best.point = tp.point;
                    best.face = f;
                    best.feature = tp.feature;
                }
            }
            continue;
        }
        const double dl = squared_distance_to_box(nodes_[node.left].box, p);
        const double dr = squared_distance_to_box(nodes_[node.right].box, p);
        // Push the farther child first so the nearer one is expanded next.
        if (dl <= dr) {
            stack.push_back(node.right);
            stack.push_back(node.left);
        } else {
            stack.push_back(node.left);
            stack.push_back(node.right);
        }
    }
    best.distance = std::sqrt(best_sq);
    return best;
}

std::optional<RayHit> TriangleBvh::raycast(const TriangleMesh& mesh, const Vec3& origin, const Vec3& dir,
                                           double t_max) const {
    if (nodes_.empty()) return std::nullopt;
    const Vec3 inv_dir = dir.cwiseInverse();
    std::optional<RayHit> best;
    double best_t = t_max;
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (!ray_box(node.box, origin, inv_dir, best_t)) continue;
        if (node.leaf) {
            for (std::uint32_t i = node.left; i < node.left + node.right; ++i) {
                const std::uint32_t f = order_[i];
                const auto& t = mesh.faces[f];
                const auto hit = ray_triangle(origin, dir, mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
                if (hit && *hit > 0.0 && (*hit < best_t || (best && *hit == best_t && f < best->face))) {
                    best_t = *hit;
                    best = RayHit{*hit, f, origin + *hit * dir};
                }
            }
            continue;
        }
        stack.push_back(node.left);
        stack.push_back(node.right);
    }
    return best;
}

SignedDistanceField::SignedDistanceField(TriangleMesh mesh) : mesh_(std::move(mesh)) {
    if (mesh_.faces.empty()) throw Error(ErrorCode::kDegenerateGeometry, "signed distance field needs at least one face");
    bvh_ = TriangleBvh(mesh_);

    const std::size_t nf = mesh_.faces.size();
    face_normals_.resize(nf);
    vertex_pseudo_normals_.assign(mesh_.vertices.size(), Vec3::Zero());
    std::unordered_map<std::uint64_t, Vec3> edge_sums;
    edge_sums.reserve(nf * 2);
    auto edge_key = [](std::uint32_t a, std::uint32_t b) {
        if (a > b) std::swap(a, b);
        return (std::uint64_t{a} << 32) | b;
    };
    for (std::size_t f = 0; f < nf; ++f) {
        const auto& t = mesh_.faces[f];
        const Vec3 n = face_normal(mesh_, f);
        face_normals_[f] = n;
        for (int k = 0; k < 3; ++k) {
            const Vec3 e1 = mesh_.vertices[t[(k + 1) % 3]] - mesh_.vertices[t[k]];
            const Vec3 e2 = mesh_.vertices[t[(k + 2) % 3]] - mesh_.vertices[t[k]];
            const double denom = e1.norm() * e2.norm();
            if (denom > 0.0) vertex_pseudo_normals_[t[k]] += std::acos(std::clamp(e1.dot(e2) / denom, -1.0, 1.0)) * n;
            edge_sums.try_emplace(edge_key(t[k], t[(k + 1) % 3]), Vec3::Zero()).first->second += n;
        }
    }
    edge_pseudo_normals_.resize(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        const auto& t = mesh_.faces[f];
        for (int k = 0; k < 3; ++k) edge_pseudo_normals_[f][k] = edge_sums[edge_key(t[k], t[(k + 1) % 3])];
    }
}

Vec3 SignedDistanceField::pseudo_normal(const ClosestHit& hit) const {
    const auto& t = mesh_.faces[hit.face];
    switch (hit.feature) {
        case TriangleFeature::kFace: return face_normals_[hit.face];
        case TriangleFeature::kEdge01: return edge_pseudo_normals_[hit.face][0];
        case TriangleFeature::kEdge12: return edge_pseudo_normals_[hit.face][1];
        case TriangleFeature::kEdge20: return edge_pseudo_normals_[hit.face][2];
        case TriangleFeature::kVertex0: return vertex_pseudo_normals_[t[0]];
        case TriangleFeature::kVertex1: return vertex_pseudo_normals_[t[1]];
        case TriangleFeature::kVertex2: return vertex_pseudo_normals_[t[2]];
    }
    return face_normals_[hit.face];
}

double SignedDistanceField::query(const Vec3& p) const {
    const ClosestHit hit = closest(p);
    if (hit.distance == 0.0) return 0.0;
    const double side = (p - hit.point).dot(pseudo_normal(hit));
    return side < 0.0 ? -hit.distance : hit.distance;
}

}  // namespace scenedit
