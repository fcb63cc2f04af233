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

#include "scenedit/asset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>

#include "scenedit/base64.hpp"
#include "scenedit/error.hpp"
#include "scenedit/mesh_io.hpp"
#include "scenedit/text.hpp"

namespace scenedit {

using nlohmann::json;

std::string_view to_string(AssetSource source) {
    switch (source) {
        case AssetSource::kGenerator: return "generator";
        case AssetSource::kLibrary: return "library";
        case AssetSource::kProcedural: return "procedural";
    }
    return "procedural";
}

std::vector<AssetSource> parse_asset_sources(std::string_view list) {
    std::vector<AssetSource> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        std::size_t end = list.find(',', start);
        if (end == std::string_view::npos) end = list.size();
        const std::string name = normalize_label(list.substr(start, end - start));
        AssetSource s;
        if (name == "generator") s = AssetSource::kGenerator;
        else if (name == "library") s = AssetSource::kLibrary;
        else if (name == "procedural") s = AssetSource::kProcedural;
        else throw Error(ErrorCode::kConfigError, "unknown asset source '" + name + "'");
        if (std::find(out.begin(), out.end(), s) != out.end()) throw Error(ErrorCode::kConfigError, "asset source listed twice: " + name);
        out.push_back(s);
        start = end + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Primitives

TriangleMesh make_box(int k) {
    k = std::max(k, 1);
    TriangleMesh m;
    m.name = "box";
    std::map<std::array<int, 3>, std::uint32_t> index;
    auto vertex = [&](std::array<int, 3> p) {
        auto [it, fresh] = index.emplace(p, static_cast<std::uint32_t>(m.vertices.size()));
        if (fresh) m.vertices.emplace_back(p[0] / double(k) - 0.5, p[1] / double(k) - 0.5, p[2] / double(k) - 0.5);
        return it->second;
    };
    for (int axis = 0; axis < 3; ++axis) {
        for (int side : {0, k}) {
            // (u, v, axis) is right-handed, so u x v points along +axis.
            int u = (axis + 1) % 3, v = (axis + 2) % 3;
            if (side == 0) std::swap(u, v);
            for (int i = 0; i < k; ++i) {
                for (int j = 0; j < k; ++j) {
                    auto at = [&](int a, int b) {
                        std::array<int, 3> p{};
                        p[axis] = side;
                        p[u] = a;
                        p[v] = b;
                        return vertex(p);
                    };
                    const auto p00 = at(i, j), p10 = at(i + 1, j), p11 = at(i + 1, j + 1), p01 = at(i, j + 1);
                    m.faces.push_back({p00, p10, p11});
                    m.faces.push_back({p00, p11, p01});
                }
            }
        }
    }
    return m;
}

namespace {

// Shared builder for surfaces of revolution around Z. `rings` lists
// (radius, z) from bottom to top; a zero radius is a single pole vertex.
// Flat caps with `cap_rings` concentric rings close any open end.
TriangleMesh revolve(const std::vector<std::pair<double, double>>& rings, int segments, int cap_rings, std::string name) {
    TriangleMesh m;
    m.name = std::move(name);
    std::vector<std::vector<std::uint32_t>> ids;
    for (const auto& [r, z] : rings) {
        std::vector<std::uint32_t> ring;
        if (r == 0.0) {
            ring.assign(static_cast<std::size_t>(segments), static_cast<std::uint32_t>(m.vertices.size()));
            m.vertices.emplace_back(0.0, 0.0, z);
        } else {
            for (int j = 0; j < segments; ++j) {
                const double t = 2.0 * std::numbers::pi * j / segments;
                ring.push_back(static_cast<std::uint32_t>(m.vertices.size()));
                m.vertices.emplace_back(r * std::cos(t), r * std::sin(t), z);
            }
        }
        ids.push_back(std::move(ring));
    }
    auto band = [&](const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
        for (int j = 0; j < segments; ++j) {
            const int k = (j + 1) % segments;
            if (a[j] != a[k]) m.faces.push_back({a[j], a[k], b[k]});
            if (b[j] != b[k]) m.faces.push_back({a[j], b[k], b[j]});
        }
    };
    for (std::size_t l = 0; l + 1 < ids.size(); ++l) band(ids[l], ids[l + 1]);

    auto cap = [&](std::size_t which, bool top) {
        const auto [r, z] = rings[which];
        if (r == 0.0) return;
        std::vector<std::uint32_t> outer = ids[which];
        for (int q = cap_rings - 1; q >= 0; --q) {
            std::vector<std::uint32_t> inner;
            const double rq = r * q / cap_rings;
            if (q == 0) {
                inner.assign(static_cast<std::size_t>(segments), static_cast<std::uint32_t>(m.vertices.size()));
                m.vertices.emplace_back(0.0, 0.0, z);
            } else {
                for (int j = 0; j < segments; ++j) {
                    const double t = 2.0 * std::numbers::pi * j / segments;
                    inner.push_back(static_cast<std::uint32_t>(m.vertices.size()));
                    m.vertices.emplace_back(rq * std::cos(t), rq * std::sin(t), z);
                }
            }
            // Outer-to-inner bands face +Z; the bottom cap flips them.
            for (int j = 0; j < segments; ++j) {
                const int k = (j + 1) % segments;
                std::array<Face, 2> tri{Face{outer[j], outer[k], inner[k]}, Face{outer[j], inner[k], inner[j]}};
                for (auto& f : tri) {
                    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) continue;
                    if (!top) std::swap(f[1], f[2]);
                    m.faces.push_back(f);
                }
            }
            outer = std::move(inner);
        }
    };
    cap(0, false);
    cap(rings.size() - 1, true);
    return m;
}

}  // namespace

TriangleMesh make_cylinder(int segments, int stacks, int cap_rings) {
    segments = std::max(segments, 3);
    stacks = std::max(stacks, 1);
    std::vector<std::pair<double, double>> rings;
    for (int l = 0; l <= stacks; ++l) rings.emplace_back(0.5, -0.5 + static_cast<double>(l) / stacks);
    return revolve(rings, segments, std::max(cap_rings, 1), "cylinder");
}

TriangleMesh make_cone(int segments, int stacks, int cap_rings) {
    segments = std::max(segments, 3);
    stacks = std::max(stacks, 1);
    std::vector<std::pair<double, double>> rings;
    for (int l = 0; l <= stacks; ++l) {
        const double t = static_cast<double>(l) / stacks;
        rings.emplace_back(0.5 * (1.0 - t), -0.5 + t);
    }
    return revolve(rings, segments, std::max(cap_rings, 1), "cone");
}

TriangleMesh make_sphere(int segments, int stacks) {
    segments = std::max(segments, 3);
    stacks = std::max(stacks, 2);
    std::vector<std::pair<double, double>> rings;
    for (int l = 0; l <= stacks; ++l) {
        const double phi = -0.5 * std::numbers::pi + std::numbers::pi * l / stacks;
        const double r = (l == 0 || l == stacks) ? 0.0 : 0.5 * std::cos(phi);
        rings.emplace_back(r, 0.5 * std::sin(phi));
    }
    return revolve(rings, segments, 1, "sphere");
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

bool is_primitive(const std::string& name) {
    return name == "box" || name == "cube" || name == "sphere" || name == "cylinder" || name == "cone";
}

PrimitiveCatalog::Entry entry_from_json(const json& j) {
    PrimitiveCatalog::Entry e;
    if (j.is_string()) {
        e.primitive = j.get<std::string>();
    } else {
        e.primitive = j.at("primitive").get<std::string>();
        if (j.contains("size")) {
            const auto s = j.at("size").get<std::vector<double>>();
            if (s.size() != 3 || *std::min_element(s.begin(), s.end()) <= 0.0) {
                throw Error(ErrorCode::kParseError, "alias size must be three positive numbers");
            }
            e.size = Vec3(s[0], s[1], s[2]);
        }
    }
    e.primitive = normalize_label(e.primitive);
    if (!is_primitive(e.primitive)) throw Error(ErrorCode::kParseError, "unknown primitive '" + e.primitive + "'");
    return e;
}

}  // namespace

PrimitiveCatalog PrimitiveCatalog::from_json(const json& j) {
    PrimitiveCatalog c;
    try {
        if (j.contains("default") && !j["default"].is_null()) c.default_ = entry_from_json(j["default"]);
        if (j.contains("aliases")) {
            for (const auto& [name, value] : j["aliases"].items()) c.aliases_[normalize_label(name)] = entry_from_json(value);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kParseError, std::string("alias table: ") + e.what());
    }
    return c;
}

PrimitiveCatalog PrimitiveCatalog::load(const std::filesystem::path& path) {
    const json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kParseError, "alias table does not parse: " + path.string());
    return from_json(j);
}

std::optional<PrimitiveCatalog::Entry> PrimitiveCatalog::lookup(std::string_view raw) const {
    const std::string name = normalize_label(raw);
    for (const std::string& key : {name, head_noun(name)}) {
        if (auto it = aliases_.find(key); it != aliases_.end()) return it->second;
        if (is_primitive(key)) return Entry{key, Vec3::Ones()};
    }
    return default_;
}

TriangleMesh PrimitiveCatalog::build(std::string_view name) const {
    const auto e = lookup(name);
    if (!e) throw Error(ErrorCode::kNotFound, "no primitive for '" + std::string(name) + "'");
    // Dense enough that a top face holds a support cluster of its own.
    TriangleMesh m;
    if (e->primitive == "sphere") m = make_sphere();
    else if (e->primitive == "cylinder") m = make_cylinder(32, 4, 6);
    else if (e->primitive == "cone") m = make_cone(32, 4, 6);
    else m = make_box(8);
    for (auto& v : m.vertices) v = v.cwiseProduct(e->size);
    m.name = normalize_label(name);
    return m;
}

// ---------------------------------------------------------------------------
// Generator

TriangleMesh HttpMeshGeneratorClient::generate(const std::string& entity_name, std::uint64_t seed) {
    const std::lock_guard lock(mutex_);
    const std::string body = http_post_json(endpoint_, {{"prompt", entity_name}, {"seed", seed}});
    const json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kBackendError, "generator response is not a JSON object");
    const std::string format = j.value("format", std::string("glb"));
    std::string payload;
    if (j.contains("data")) {
        payload = base64_decode(j["data"].get<std::string>());
    } else if (j.contains("url")) {
        payload = http_get(j["url"].get<std::string>(), endpoint_.timeout_s);
    } else {
        throw Error(ErrorCode::kBackendError, "generator response has neither data nor url");
    }
    return parse_mesh(payload, parse_format(format));
}

TriangleMesh normalize_asset(const TriangleMesh& mesh) {
    const Aabb box = compute_aabb(mesh);
    const Vec3 shift(-box.center().x(), -box.center().y(), -box.min.z());
    TriangleMesh out = mesh;
    for (auto& v : out.vertices) v += shift;
    out.face_tags.clear();
    return out;
}

bool orient_base_down(TriangleMesh& mesh) {
    const Aabb box = compute_aabb(mesh);
    if (!box.valid()) return false;
    const double tol = 0.02 * box.extent().maxCoeff();
    const double cos_tol = std::cos(10.0 * std::numbers::pi / 180.0);
    // Directions +X, -X, +Y, -Y, +Z, -Z.
    std::array<double, 6> flat{};
    double total = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Vec3 n = face_normal(mesh, f);
        const double area = face_area(mesh, f);
        total += area;
        for (int d = 0; d < 6; ++d) {
            const int axis = d / 2;
            const double sign = d % 2 == 0 ? 1.0 : -1.0;
            if (sign * n[axis] < cos_tol) continue;
            const double plane = sign > 0 ? box.max[axis] : box.min[axis];
            const bool on_boundary = std::all_of(mesh.faces[f].begin(), mesh.faces[f].end(), [&](std::uint32_t v) {
                return std::abs(mesh.vertices[v][axis] - plane) <= tol;
            });
            if (on_boundary) flat[d] += area;
        }
    }
    const int best = static_cast<int>(std::max_element(flat.begin(), flat.end()) - flat.begin());
    // A base must cover a noticeable share of the surface.
    if (flat[best] < 0.05 * total) return false;
    // Keep the current base unless another side is clearly flatter.
    if (flat[5] >= 0.8 * flat[best]) return true;
    Eigen::Matrix3d r;
    switch (best) {
        case 0: r = Eigen::AngleAxisd(0.5 * std::numbers::pi, Vec3::UnitY()).toRotationMatrix(); break;
        case 1: r = Eigen::AngleAxisd(-0.5 * std::numbers::pi, Vec3::UnitY()).toRotationMatrix(); break;
        case 2: r = Eigen::AngleAxisd(-0.5 * std::numbers::pi, Vec3::UnitX()).toRotationMatrix(); break;
        case 3: r = Eigen::AngleAxisd(0.5 * std::numbers::pi, Vec3::UnitX()).toRotationMatrix(); break;
        default: r = Eigen::AngleAxisd(std::numbers::pi, Vec3::UnitX()).toRotationMatrix(); break;
    }
    for (auto& v : mesh.vertices) v = r * v;
    for (auto& n : mesh.vertex_normals) n = r * n;
    return true;
}

// ---------------------------------------------------------------------------
// Library

namespace {

bool is_mesh_file(const std::filesystem::path& p) {
    try {
        format_from_path(p);
        return true;
    } catch (const Error&) {
        return false;
    }
}

std::vector<std::filesystem::path> library_files(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorCode::kIoError, "asset library is not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && is_mesh_file(entry.path())) files.push_back(entry.path());
    }
    if (ec) throw Error(ErrorCode::kIoError, "cannot list asset library: " + ec.message());
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace

std::vector<std::string> list_library(const std::filesystem::path& dir) {
    std::set<std::string> names;
    for (const auto& p : library_files(dir)) names.insert(p.stem().string());
    return {names.begin(), names.end()};
}

// ---------------------------------------------------------------------------
// Provider

std::size_t AssetProvider::cache_size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

AssetRecord AssetProvider::produce(const std::string& name, AssetSource source, std::uint64_t seed) {
    AssetRecord rec;
    rec.entity_name = name;
    rec.source = source;
    TriangleMesh mesh;
    switch (source) {
        case AssetSource::kGenerator: {
            if (!config_.generator) throw Error(ErrorCode::kBackendError, "no generator configured");
            ++generator_calls_;
            mesh = config_.generator->generate(name, seed);
            if (!orient_base_down(mesh)) {
                rec.canonical_up = false;
                rec.warnings.push_back("no flat base found on generated '" + name + "'; orientation left as generated");
            }
            break;
        }
        case AssetSource::kLibrary: {
            if (!config_.library_dir) throw Error(ErrorCode::kNotFound, "no asset library configured");
            const auto files = library_files(*config_.library_dir);
            std::optional<std::filesystem::path> hit;
            for (const std::string& key : {name, head_noun(name)}) {
                for (const auto& p : files) {
                    if (normalize_label(p.stem().string()) == key) {
                        hit = p;
                        break;
                    }
                }
                if (hit) break;
            }
            if (!hit) throw Error(ErrorCode::kNotFound, "no library asset named '" + name + "'");
            mesh = load_mesh(*hit);
            break;
        }
        case AssetSource::kProcedural:
            mesh = config_.catalog.build(name);
            break;
    }
    if (mesh.empty() || mesh.faces.empty()) throw Error(ErrorCode::kDegenerateGeometry, "asset mesh is empty");
    rec.mesh = normalize_asset(mesh);
    rec.mesh.vertex_normals.clear();
    const Vec3 ext = compute_aabb(rec.mesh).extent();
    if (!(ext.minCoeff() > 1e-9 * ext.maxCoeff())) throw Error(ErrorCode::kDegenerateGeometry, "asset is flat along some axis");
    return rec;
}

AssetRecord AssetProvider::acquire(const AssetRequest& request) {
    const std::string name = normalize_label(request.entity_name);
    if (name.empty()) throw Error(ErrorCode::kInvalidTask, "asset request needs an entity name");
    if (request.source_preference.empty()) throw Error(ErrorCode::kConfigError, "asset source preference is empty");
    for (std::size_t i = 0; i < request.source_preference.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (request.source_preference[i] == request.source_preference[j]) {
                throw Error(ErrorCode::kConfigError, "asset source preference repeats a source");
            }
        }
    }

    std::string causes;
    for (const AssetSource source : request.source_preference) {
        const Key key{name, source, request.seed};
        std::shared_future<AssetRecord> future;
        std::optional<std::promise<AssetRecord>> promise;
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(key); it != cache_.end()) {
                future = it->second;
            } else {
                promise.emplace();
                future = promise->get_future().share();
                cache_.emplace(key, future);
            }
        }
        if (promise) {
            try {
                promise->set_value(produce(name, source, request.seed));
            } catch (...) {
                promise->set_exception(std::current_exception());
                std::lock_guard lock(mutex_);
                cache_.erase(key);
            }
        }
        try {
            return future.get();
        } catch (const std::exception& e) {
            causes += std::string(to_string(source)) + ": " + e.what() + "; ";
        }
    }
    throw Error(ErrorCode::kAllBackendsFailed, "no source produced '" + name + "': " + causes);
}

}  // namespace scenedit
