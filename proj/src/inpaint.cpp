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

#include "scenedit/inpaint.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>

#include "scenedit/kdtree.hpp"

namespace scenedit {

using nlohmann::json;

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

std::vector<std::pair<std::uint32_t, std::uint32_t>> boundary_edges(const TriangleMesh& mesh) {
    std::map<std::uint64_t, int> count;
    for (const auto& f : mesh.faces) {
        for (int i = 0; i < 3; ++i) ++count[edge_key(f[i], f[(i + 1) % 3])];
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (const auto& [k, c] : count) {
        if (c == 1) out.emplace_back(static_cast<std::uint32_t>(k >> 32), static_cast<std::uint32_t>(k & 0xffffffffu));
    }
    return out;
}

namespace {

// Splits a walk that revisits a vertex into simple loops, closing one each
// time the walk comes back to a vertex already on the stack.
void split_pinched(const BoundaryLoop& walk, std::vector<BoundaryLoop>& out) {
    std::vector<std::uint32_t> stack;
    std::unordered_map<std::uint32_t, std::size_t> pos;
    for (const auto v : walk) {
        const auto it = pos.find(v);
        if (it == pos.end()) {
            pos.emplace(v, stack.size());
            stack.push_back(v);
            continue;
        }
        const std::size_t from = it->second;
        if (stack.size() - from >= 3) out.emplace_back(stack.begin() + static_cast<std::ptrdiff_t>(from), stack.end());
        for (std::size_t i = from + 1; i < stack.size(); ++i) pos.erase(stack[i]);
        stack.resize(from + 1);
    }
    if (stack.size() >= 3) out.push_back(std::move(stack));
}

}  // namespace

std::vector<BoundaryLoop> boundary_loops(const TriangleMesh& mesh) {
    std::unordered_map<std::uint64_t, int> count;
    for (const auto& f : mesh.faces) {
        for (int i = 0; i < 3; ++i) ++count[edge_key(f[i], f[(i + 1) % 3])];
    }
    // A face edge a->b on the boundary becomes hole edge b->a.
    std::map<std::uint32_t, std::vector<std::uint32_t>> out_edges;
    for (const auto& f : mesh.faces) {
        for (int i = 0; i < 3; ++i) {
            const std::uint32_t a = f[i], b = f[(i + 1) % 3];
            if (count[edge_key(a, b)] == 1) out_edges[b].push_back(a);
        }
    }
    for (auto& [v, next] : out_edges) std::sort(next.begin(), next.end());

    std::vector<BoundaryLoop> loops;
    for (auto& [start, _] : out_edges) {
        while (!out_edges[start].empty()) {
            BoundaryLoop loop{start};
            std::uint32_t cur = start;
            bool closed = false;
            while (true) {
                auto& next = out_edges[cur];
                if (next.empty()) break;
                const std::uint32_t v = next.front();
                next.erase(next.begin());
                if (v == start) {
                    closed = true;
                    break;
                }
                loop.push_back(v);
                cur = v;
                if (loop.size() > mesh.vertices.size() + 1) break;
            }
            if (closed) split_pinched(loop, loops);
        }
    }
    return loops;
}

namespace {

using P2 = Eigen::Vector2d;

double cross2(const P2& a, const P2& b, const P2& c) { return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x(); }

bool segments_touch(const P2& p1, const P2& p2, const P2& q1, const P2& q2) {
    const double d1 = cross2(q1, q2, p1), d2 = cross2(q1, q2, p2);
    const double d3 = cross2(p1, p2, q1), d4 = cross2(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    auto on_segment = [](const P2& a, const P2& b, const P2& p) {
        return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= p.y() &&
               p.y() <= std::max(a.y(), b.y());
    };
    return (d1 == 0 && on_segment(q1, q2, p1)) || (d2 == 0 && on_segment(q1, q2, p2)) || (d3 == 0 && on_segment(p1, p2, q1)) ||
           (d4 == 0 && on_segment(p1, p2, q2));
}

bool in_triangle(const P2& p, const P2& a, const P2& b, const P2& c) {
    return cross2(a, b, p) >= 0 && cross2(b, c, p) >= 0 && cross2(c, a, p) >= 0;
}

}  // namespace

std::optional<std::vector<Face>> triangulate_loop(const TriangleMesh& mesh, const BoundaryLoop& loop) {
    const std::size_t n = loop.size();
    if (n < 3) return std::nullopt;
    if (std::set<std::uint32_t>(loop.begin(), loop.end()).size() != n) return std::nullopt;
    if (n == 3) return std::vector<Face>{{loop[0], loop[1], loop[2]}};

    // Newell normal; the loop winds counter-clockwise around it.
    Vec3 normal = Vec3::Zero(), center = Vec3::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& a = mesh.vertices[loop[i]];
        const Vec3& b = mesh.vertices[loop[(i + 1) % n]];
        normal += a.cross(b);
        center += a;
    }
    center /= static_cast<double>(n);
    if (normal.norm() < 1e-15) return std::nullopt;
    normal.normalize();
    const Vec3 e1 = normal.unitOrthogonal();
    const Vec3 e2 = normal.cross(e1);
    std::vector<P2> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 d = mesh.vertices[loop[i]] - center;
        p[i] = P2(d.dot(e1), d.dot(e2));
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_touch(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) return std::nullopt;
        }
    }

    // Collinear triples must not count as ears.
    double extent2 = 0.0;
    for (const auto& q : p) extent2 = std::max(extent2, q.squaredNorm());
    const double min_cross = 1e-12 * extent2;

    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::vector<Face> faces;
    faces.reserve(n - 2);
    std::size_t cursor = 0;
    while (idx.size() > 3) {
        const std::size_t m = idx.size();
        std::optional<std::size_t> ear;
        std::size_t fallback = 0;
        double fallback_cross = -std::numeric_limits<double>::infinity();
        for (std::size_t step = 0; step < m && !ear; ++step) {
            const std::size_t k = (cursor + step) % m;
            const P2& a = p[idx[(k + m - 1) % m]];
            const P2& b = p[idx[k]];
            const P2& c = p[idx[(k + 1) % m]];
            const double cr = cross2(a, b, c);
            if (cr > fallback_cross) {
                fallback_cross = cr;
                fallback = k;
            }
            if (cr <= min_cross) continue;
            bool blocked = false;
            for (std::size_t q = 0; q < m && !blocked; ++q) {
                if (q == k || q == (k + 1) % m || q == (k + m - 1) % m) continue;
                const P2& x = p[idx[q]];
                if (x == a || x == b || x == c) continue;
                blocked = in_triangle(x, a, b, c);
            }
            if (!blocked) ear = k;
        }
        const std::size_t k = ear.value_or(fallback);
        faces.push_back({loop[idx[(k + m - 1) % m]], loop[idx[k]], loop[idx[(k + 1) % m]]});
        idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(k));
        cursor = k % idx.size();
    }
    faces.push_back({loop[idx[0]], loop[idx[1]], loop[idx[2]]});
    return faces;
}

json to_json(const InpaintReport& r) {
    json loops = json::array();
    for (const auto& l : r.filled) {
        loops.push_back({{"boundary_vertex_count", l.boundary_vertex_count},
                         {"fill_face_begin", l.fill_face_begin},
                         {"fill_face_count", l.fill_face_count},
                         {"added_vertices", l.added_vertices}});
    }
    return {{"filled", std::move(loops)}, {"skipped_loops", r.skipped_loops}, {"max_edge", r.max_edge}, {"warnings", r.warnings}};
}

namespace {

// Bisects interior edges of faces [begin, end) longest first until none is
// longer than max_edge. Returns false if the split budget ran out.
bool refine(TriangleMesh& mesh, std::size_t begin, double max_edge) {
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> edge_faces;
    auto add_face = [&](std::size_t f) {
        const Face& t = mesh.faces[f];
        for (int i = 0; i < 3; ++i) edge_faces[edge_key(t[i], t[(i + 1) % 3])].push_back(f);
    };
    auto drop = [&](std::uint64_t key, std::size_t f) {
        auto& v = edge_faces[key];
        v.erase(std::remove(v.begin(), v.end(), f), v.end());
    };
    for (std::size_t f = begin; f < mesh.faces.size(); ++f) add_face(f);

    using Item = std::tuple<double, std::uint32_t, std::uint32_t>;
    std::priority_queue<Item> heap;
    auto push = [&](std::uint32_t a, std::uint32_t b) {
        if (a > b) std::swap(a, b);
        const double len = (mesh.vertices[a] - mesh.vertices[b]).norm();
        if (len > max_edge && edge_faces[edge_key(a, b)].size() == 2) heap.emplace(len, a, b);
    };
    for (const auto& [key, faces] : edge_faces) push(static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key & 0xffffffffu));

    constexpr std::size_t kBudget = 1000000;
    std::size_t splits = 0;
    while (!heap.empty()) {
        const auto [len, a, b] = heap.top();
        heap.pop();
        const auto key = edge_key(a, b);
        const auto it = edge_faces.find(key);
        if (it == edge_faces.end() || it->second.size() != 2) continue;
        if (++splits > kBudget) return false;

        const auto m = static_cast<std::uint32_t>(mesh.vertices.size());
        mesh.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
        const std::vector<std::size_t> faces = it->second;
        edge_faces.erase(key);
        std::vector<std::uint32_t> opposite;
        for (std::size_t f : faces) {
            Face t = mesh.faces[f];
            while (!((t[0] == a && t[1] == b) || (t[0] == b && t[1] == a))) std::rotate(t.begin(), t.begin() + 1, t.end());
            const std::uint32_t x = t[0], y = t[1], c = t[2];
            drop(edge_key(y, c), f);
            drop(edge_key(c, x), f);
            mesh.faces[f] = {x, m, c};
            const std::size_t g = mesh.faces.size();
            mesh.faces.push_back({m, y, c});
            add_face(f);
            add_face(g);
            opposite.push_back(c);
        }
        push(a, m);
        push(m, b);
        for (auto c : opposite) push(m, c);
    }
    return true;
}

}  // namespace

InpaintReport fill_loops(TriangleMesh& mesh, const std::vector<BoundaryLoop>& loops, double max_edge) {
    InpaintReport report;
    const std::size_t original_vertices = mesh.vertices.size();
    for (std::size_t li = 0; li < loops.size(); ++li) {
        const auto& loop = loops[li];
        auto tris = triangulate_loop(mesh, loop);
        if (!tris) {
            ++report.skipped_loops;
            report.warnings.push_back("hole with " + std::to_string(loop.size()) +
                                      " boundary vertices projects onto a self-intersecting polygon; left open");
            continue;
        }
        double longest = 0.0;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            longest = std::max(longest, (mesh.vertices[loop[i]] - mesh.vertices[loop[(i + 1) % loop.size()]]).norm());
        }
        const double threshold = std::max(max_edge, longest);
        report.max_edge = std::max(report.max_edge, threshold);

        FilledLoop filled;
        filled.boundary_vertex_count = loop.size();
        filled.fill_face_begin = mesh.faces.size();
        const std::size_t vertices_before = mesh.vertices.size();
        mesh.faces.insert(mesh.faces.end(), tris->begin(), tris->end());
        if (!refine(mesh, filled.fill_face_begin, threshold)) {
            report.warnings.push_back("hole refinement stopped at its split budget");
        }
        filled.fill_face_count = mesh.faces.size() - filled.fill_face_begin;
        filled.added_vertices = mesh.vertices.size() - vertices_before;
        report.filled.push_back(filled);
    }

    const std::size_t added = mesh.vertices.size() - original_vertices;
    if (mesh.has_tags()) mesh.face_tags.resize(mesh.faces.size(), kUntagged);
    if (mesh.has_normals()) mesh.vertex_normals.resize(mesh.vertices.size(), Vec3::Constant(std::numeric_limits<double>::quiet_NaN()));
    if (mesh.has_colors() && added > 0) {
        KdTree<3> tree(std::vector<Vec3>(mesh.vertices.begin(), mesh.vertices.begin() + static_cast<std::ptrdiff_t>(original_vertices)));
        for (std::size_t v = original_vertices; v < mesh.vertices.size(); ++v) {
            const auto nn = tree.knn(mesh.vertices[v], 6);
            Vec3 c = Vec3::Zero();
            for (auto i : nn) c += mesh.vertex_colors[i];
            mesh.vertex_colors.push_back(nn.empty() ? Vec3::Constant(0.7) : Vec3(c / static_cast<double>(nn.size())));
        }
    }
    return report;
}

}  // namespace scenedit
