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

#include "scenedit/mesh_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <Eigen/Geometry>
#include <json.hpp>

#include "scenedit/base64.hpp"
#include "scenedit/error.hpp"

namespace scenedit {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kDegenerateArea = 1e-12;

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Drops degenerate faces, checks indices, and leaves the mesh satisfying the
// TriangleMesh invariants.
void finalize_loaded(TriangleMesh& mesh, LoadStats* stats) {
    if (mesh.vertices.empty()) throw Error(ErrorCode::kParseError, "mesh has no vertices");
    std::vector<Face> kept;
    kept.reserve(mesh.faces.size());
    std::size_t dropped = 0;
    for (const auto& f : mesh.faces) {
        for (auto idx : f) {
            if (idx >= mesh.vertices.size()) throw Error(ErrorCode::kParseError, "face index out of range");
        }
        const bool repeated = f[0] == f[1] || f[1] == f[2] || f[0] == f[2];
        const double area =
            repeated ? 0.0
                     : 0.5 * (mesh.vertices[f[1]] - mesh.vertices[f[0]]).cross(mesh.vertices[f[2]] - mesh.vertices[f[0]]).norm();
        if (repeated || area < kDegenerateArea) {
            ++dropped;
            continue;
        }
        kept.push_back(f);
    }
    mesh.faces = std::move(kept);
    mesh.vertex_normals.clear();
    if (stats) stats->dropped_degenerate_faces = dropped;
}

void append_number(std::string& out, double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, end);
}

// ---------------------------------------------------------------- OBJ

std::int64_t parse_obj_index(std::string_view token, std::size_t count) {
    const auto slash = token.find('/');
    if (slash != std::string_view::npos) token = token.substr(0, slash);
    std::int64_t idx = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), idx);
    if (ec != std::errc() || idx == 0) throw Error(ErrorCode::kParseError, "bad OBJ face index '" + std::string(token) + "'");
    return idx > 0 ? idx - 1 : static_cast<std::int64_t>(count) + idx;
}

TriangleMesh parse_obj(std::string_view text) {
    TriangleMesh mesh;
    std::vector<Vec3> colors;
    bool all_colored = true;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind) || kind[0] == '#') continue;
        if (kind == "v") {
            std::vector<double> vals;
            double x;
            while (ls >> x) vals.push_back(x);
            if (vals.size() < 3) throw Error(ErrorCode::kParseError, "OBJ line " + std::to_string(line_no) + ": short vertex");
            mesh.vertices.emplace_back(vals[0], vals[1], vals[2]);
            if (vals.size() >= 6) {
                colors.emplace_back(vals[3], vals[4], vals[5]);
            } else {
                all_colored = false;
            }
        } else if (kind == "f") {
            std::vector<std::int64_t> idx;
            std::string tok;
            while (ls >> tok) idx.push_back(parse_obj_index(tok, mesh.vertices.size()));
            if (idx.size() < 3) throw Error(ErrorCode::kParseError, "OBJ line " + std::to_string(line_no) + ": short face");
            for (auto i : idx) {
                if (i < 0) throw Error(ErrorCode::kParseError, "OBJ line " + std::to_string(line_no) + ": index out of range");
            }
            for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
                mesh.faces.push_back({static_cast<std::uint32_t>(idx[0]), static_cast<std::uint32_t>(idx[k]),
                                      static_cast<std::uint32_t>(idx[k + 1])});
            }
        }
    }
    if (all_colored && colors.size() == mesh.vertices.size() && !colors.empty()) mesh.vertex_colors = std::move(colors);
    return mesh;
}

// ---------------------------------------------------------------- PLY

enum class PlyType { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32, kFloat32, kFloat64 };

PlyType parse_ply_type(const std::string& name) {
    if (name == "char" || name == "int8") return PlyType::kInt8;
    if (name == "uchar" || name == "uint8") return PlyType::kUint8;
    if (name == "short" || name == "int16") return PlyType::kInt16;
    if (name == "ushort" || name == "uint16") return PlyType::kUint16;
    if (name == "int" || name == "int32") return PlyType::kInt32;
    if (name == "uint" || name == "uint32") return PlyType::kUint32;
    if (name == "float" || name == "float32") return PlyType::kFloat32;
    if (name == "double" || name == "float64") return PlyType::kFloat64;
    throw Error(ErrorCode::kParseError, "unknown PLY type '" + name + "'");
}

std::size_t ply_type_size(PlyType t) {
    switch (t) {
        case PlyType::kInt8:
        case PlyType::kUint8: return 1;
        case PlyType::kInt16:
        case PlyType::kUint16: return 2;
        case PlyType::kInt32:
        case PlyType::kUint32:
        case PlyType::kFloat32: return 4;
        case PlyType::kFloat64: return 8;
    }
    return 0;
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::kFloat32;
    bool is_list = false;
    PlyType count_type = PlyType::kUint8;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;
};

enum class PlyEncoding { kAscii, kBinaryLe, kBinaryBe };

class PlyReader {
public:
    PlyReader(std::string_view body, PlyEncoding enc) : body_(body), enc_(enc) {}

    double read(PlyType t) {
        if (enc_ == PlyEncoding::kAscii) return read_ascii();
        const std::size_t n = ply_type_size(t);
        if (pos_ + n > body_.size()) throw Error(ErrorCode::kParseError, "PLY body truncated");
        std::array<unsigned char, 8> raw{};
        std::memcpy(raw.data(), body_.data() + pos_, n);
        pos_ += n;
        const bool native_le = std::endian::native == std::endian::little;
        if ((enc_ == PlyEncoding::kBinaryLe) != native_le) std::reverse(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(n));
        switch (t) {
            case PlyType::kInt8: return static_cast<double>(std::bit_cast<std::int8_t>(raw[0]));
            case PlyType::kUint8: return raw[0];
            case PlyType::kInt16: { std::int16_t v; std::memcpy(&v, raw.data(), 2); return v; }
            case PlyType::kUint16: { std::uint16_t v; std::memcpy(&v, raw.data(), 2); return v; }
            case PlyType::kInt32: { std::int32_t v; std::memcpy(&v, raw.data(), 4); return v; }
            case PlyType::kUint32: { std::uint32_t v; std::memcpy(&v, raw.data(), 4); return v; }
            case PlyType::kFloat32: { float v; std::memcpy(&v, raw.data(), 4); return v; }
            case PlyType::kFloat64: { double v; std::memcpy(&v, raw.data(), 8); return v; }
        }
        return 0.0;
    }

private:
    double read_ascii() {
        while (pos_ < body_.size() && std::isspace(static_cast<unsigned char>(body_[pos_]))) ++pos_;
        if (pos_ >= body_.size()) throw Error(ErrorCode::kParseError, "PLY body truncated");
        const char* begin = body_.data() + pos_;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(begin, body_.data() + body_.size(), v);
        if (ec != std::errc()) throw Error(ErrorCode::kParseError, "bad PLY ascii value");
        pos_ += static_cast<std::size_t>(ptr - begin);
        return v;
    }

    std::string_view body_;
    PlyEncoding enc_;
    std::size_t pos_ = 0;
};

TriangleMesh parse_ply(std::string_view bytes) {
    if (bytes.substr(0, 3) != "ply") throw Error(ErrorCode::kParseError, "missing PLY magic");
    const auto header_end = bytes.find("end_header");
    if (header_end == std::string_view::npos) throw Error(ErrorCode::kParseError, "missing end_header");
    auto body_start = bytes.find('\n', header_end);
    if (body_start == std::string_view::npos) body_start = bytes.size();
    else ++body_start;

    std::istringstream header{std::string(bytes.substr(0, header_end))};
    std::vector<PlyElement> elements;
    PlyEncoding enc = PlyEncoding::kAscii;
    std::string line;
    while (std::getline(header, line)) {
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "format") {
            std::string f;
            ls >> f;
            if (f == "ascii") enc = PlyEncoding::kAscii;
            else if (f == "binary_little_endian") enc = PlyEncoding::kBinaryLe;
            else if (f == "binary_big_endian") enc = PlyEncoding::kBinaryBe;
            else throw Error(ErrorCode::kParseError, "unknown PLY format '" + f + "'");
        } else if (kw == "element") {
            PlyElement e;
            ls >> e.name >> e.count;
            elements.push_back(std::move(e));
        } else if (kw == "property") {
            if (elements.empty()) throw Error(ErrorCode::kParseError, "PLY property before element");
            PlyProperty p;
            std::string t;
            ls >> t;
            if (t == "list") {
                std::string ct, it;
                ls >> ct >> it >> p.name;
                p.is_list = true;
                p.count_type = parse_ply_type(ct);
                p.type = parse_ply_type(it);
            } else {
                p.type = parse_ply_type(t);
                ls >> p.name;
            }
            elements.back().properties.push_back(std::move(p));
        }
    }

    TriangleMesh mesh;
    PlyReader reader(bytes.substr(body_start), enc);
    for (const auto& e : elements) {
        const bool is_vertex = e.name == "vertex";
        const bool is_face = e.name == "face";
        int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1, iface = -1;
        for (std::size_t k = 0; k < e.properties.size(); ++k) {
            const auto& n = e.properties[k].name;
            const int ik = static_cast<int>(k);
            if (n == "x") ix = ik;
            else if (n == "y") iy = ik;
            else if (n == "z") iz = ik;
            else if (n == "red" || n == "r") ir = ik;
            else if (n == "green" || n == "g") ig = ik;
            else if (n == "blue" || n == "b") ib = ik;
            else if (n == "vertex_indices" || n == "vertex_index") iface = ik;
        }
        if (is_vertex && (ix < 0 || iy < 0 || iz < 0)) throw Error(ErrorCode::kParseError, "PLY vertex lacks x/y/z");
        const bool colored = is_vertex && ir >= 0 && ig >= 0 && ib >= 0;
        std::vector<double> scalars(e.properties.size());
        std::vector<double> list;
        for (std::size_t i = 0; i < e.count; ++i) {
            list.clear();
            for (std::size_t k = 0; k < e.properties.size(); ++k) {
                const auto& p = e.properties[k];
                if (p.is_list) {
                    const auto n = static_cast<std::size_t>(reader.read(p.count_type));
                    for (std::size_t j = 0; j < n; ++j) {
                        const double v = reader.read(p.type);
                        if (static_cast<int>(k) == iface) list.push_back(v);
                    }
                } else {
                    scalars[k] = reader.read(p.type);
                }
            }
            if (is_vertex) {
                mesh.vertices.emplace_back(scalars[ix], scalars[iy], scalars[iz]);
                if (colored) {
                    const bool bytes8 = e.properties[ir].type == PlyType::kUint8;
                    const double scale = bytes8 ? 1.0 / 255.0 : 1.0;
                    mesh.vertex_colors.emplace_back(scalars[ir] * scale, scalars[ig] * scale, scalars[ib] * scale);
                }
            } else if (is_face && iface >= 0) {
                if (list.size() < 3) throw Error(ErrorCode::kParseError, "PLY face with fewer than 3 indices");
                for (double v : list) {
                    if (v < 0) throw Error(ErrorCode::kParseError, "negative PLY face index");
                }
                for (std::size_t j = 1; j + 1 < list.size(); ++j) {
                    mesh.faces.push_back({static_cast<std::uint32_t>(list[0]), static_cast<std::uint32_t>(list[j]),
                                          static_cast<std::uint32_t>(list[j + 1])});
                }
            }
        }
    }
    return mesh;
}

// ---------------------------------------------------------------- glTF

constexpr std::uint32_t kGlbMagic = 0x46546C67;  // "glTF"
constexpr std::uint32_t kChunkJson = 0x4E4F534A;
constexpr std::uint32_t kChunkBin = 0x004E4942;

std::uint32_t read_u32(std::string_view bytes, std::size_t at) {
    if (at + 4 > bytes.size()) throw Error(ErrorCode::kParseError, "GLB truncated");
    std::uint32_t v;
    std::memcpy(&v, bytes.data() + at, 4);
    return v;
}

Vec3 y_up_to_z_up(const Vec3& p) { return {p.x(), -p.z(), p.y()}; }
Vec3 z_up_to_y_up(const Vec3& p) { return {p.x(), p.z(), -p.y()}; }

class GltfDocument {
public:
    GltfDocument(json doc, std::string glb_bin, fs::path base_dir)
        : doc_(std::move(doc)), glb_bin_(std::move(glb_bin)), base_dir_(std::move(base_dir)) {
        for (const auto& b : doc_.value("buffers", json::array())) {
            if (b.contains("uri")) {
                const std::string uri = b["uri"];
                const auto comma = uri.find(',');
                if (uri.rfind("data:", 0) == 0 && comma != std::string::npos) {
                    buffers_.push_back(base64_decode(std::string_view(uri).substr(comma + 1)));
                } else {
                    if (base_dir_.empty()) throw Error(ErrorCode::kParseError, "external glTF buffer without base directory");
                    buffers_.push_back(read_file(base_dir_ / uri));
                }
            } else {
                buffers_.push_back(glb_bin_);
            }
        }
    }

    // Reads an accessor as doubles, row-major (count x components).
    std::vector<double> accessor(std::size_t index, int& components) const {
        const json& acc = doc_.at("accessors").at(index);
        const std::string type = acc.at("type");
        components = type == "SCALAR" ? 1 : type == "VEC2" ? 2 : type == "VEC3" ? 3 : type == "VEC4" ? 4 : 0;
        if (components == 0) throw Error(ErrorCode::kParseError, "unsupported accessor type " + type);
        const int ctype = acc.at("componentType");
        const std::size_t count = acc.at("count");
        const bool normalized = acc.value("normalized", false);
        std::vector<double> out(count * components, 0.0);
        if (!acc.contains("bufferView")) return out;
        const json& view = doc_.at("bufferViews").at(acc.at("bufferView").get<std::size_t>());
        const std::string& buffer = buffers_.at(view.at("buffer").get<std::size_t>());
        const std::size_t csize = ctype == 5120 || ctype == 5121 ? 1 : ctype == 5122 || ctype == 5123 ? 2 : 4;
        const std::size_t stride = view.value("byteStride", std::size_t{0}) ? view.value("byteStride", std::size_t{0})
                                                                          : csize * components;
        const std::size_t base = view.value("byteOffset", std::size_t{0}) + acc.value("byteOffset", std::size_t{0});
        for (std::size_t i = 0; i < count; ++i) {
            for (int c = 0; c < components; ++c) {
                const std::size_t at = base + i * stride + c * csize;
                if (at + csize > buffer.size()) throw Error(ErrorCode::kParseError, "accessor reads past buffer end");
                const char* p = buffer.data() + at;
                double v = 0.0;
                switch (ctype) {
                    case 5120: { std::int8_t x; std::memcpy(&x, p, 1); v = normalized ? std::max(x / 127.0, -1.0) : x; break; }
                    case 5121: { std::uint8_t x; std::memcpy(&x, p, 1); v = normalized ? x / 255.0 : x; break; }
                    case 5122: { std::int16_t x; std::memcpy(&x, p, 2); v = normalized ? std::max(x / 32767.0, -1.0) : x; break; }
                    case 5123: { std::uint16_t x; std::memcpy(&x, p, 2); v = normalized ? x / 65535.0 : x; break; }
                    case 5125: { std::uint32_t x; std::memcpy(&x, p, 4); v = x; break; }
                    case 5126: { float x; std::memcpy(&x, p, 4); v = x; break; }
                    default: throw Error(ErrorCode::kParseError, "unsupported componentType");
                }
                out[i * components + c] = v;
            }
        }
        return out;
    }

    void append_mesh(std::size_t mesh_index, const Eigen::Matrix4d& world, TriangleMesh& out, bool& colors_ok) const {
        const json& m = doc_.at("meshes").at(mesh_index);
        for (const auto& prim : m.value("primitives", json::array())) {
            if (prim.value("mode", 4) != 4) continue;
            const auto& attrs = prim.at("attributes");
            if (!attrs.contains("POSITION")) continue;
            int pc = 0;
            const auto pos = accessor(attrs.at("POSITION").get<std::size_t>(), pc);
            if (pc != 3) throw Error(ErrorCode::kParseError, "POSITION must be VEC3");
            const auto offset = static_cast<std::uint32_t>(out.vertices.size());
            const std::size_t n = pos.size() / 3;
            for (std::size_t i = 0; i < n; ++i) {
                const Eigen::Vector4d p = world * Eigen::Vector4d(pos[3 * i], pos[3 * i + 1], pos[3 * i + 2], 1.0);
                out.vertices.push_back(y_up_to_z_up(p.head<3>()));
            }
            if (attrs.contains("COLOR_0")) {
                int cc = 0;
                const auto col = accessor(attrs.at("COLOR_0").get<std::size_t>(), cc);
                for (std::size_t i = 0; i < n; ++i) out.vertex_colors.emplace_back(col[cc * i], col[cc * i + 1], col[cc * i + 2]);
            } else {
                colors_ok = false;
                out.vertex_colors.resize(out.vertices.size(), Vec3::Constant(0.7));
            }
            if (prim.contains("indices")) {
                int ic = 0;
                const auto idx = accessor(prim.at("indices").get<std::size_t>(), ic);
                for (std::size_t i = 0; i + 2 < idx.size(); i += 3) {
                    out.faces.push_back({offset + static_cast<std::uint32_t>(idx[i]), offset + static_cast<std::uint32_t>(idx[i + 1]),
                                         offset + static_cast<std::uint32_t>(idx[i + 2])});
                }
            } else {
                for (std::uint32_t i = 0; i + 2 < n; i += 3) out.faces.push_back({offset + i, offset + i + 1, offset + i + 2});
            }
        }
    }

    static Eigen::Matrix4d local_matrix(const json& node) {
        Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
        if (node.contains("matrix")) {
            const auto& a = node["matrix"];
            for (int c = 0; c < 4; ++c)
                for (int r = 0; r < 4; ++r) m(r, c) = a.at(c * 4 + r).get<double>();
            return m;
        }
        Eigen::Affine3d t = Eigen::Affine3d::Identity();
        if (node.contains("translation")) {
            const auto& v = node["translation"];
            t.translate(Vec3(v[0], v[1], v[2]));
        }
        if (node.contains("rotation")) {
            const auto& q = node["rotation"];
            t.rotate(Eigen::Quaterniond(q[3].get<double>(), q[0].get<double>(), q[1].get<double>(), q[2].get<double>()));
        }
        if (node.contains("scale")) {
            const auto& s = node["scale"];
            t.scale(Vec3(s[0], s[1], s[2]));
        }
        return t.matrix();
    }

    void visit(std::size_t node_index, const Eigen::Matrix4d& parent, TriangleMesh& out, bool& colors_ok, int depth) const {
        if (depth > 64) throw Error(ErrorCode::kParseError, "glTF node hierarchy too deep");
        const json& node = doc_.at("nodes").at(node_index);
        const Eigen::Matrix4d world = parent * local_matrix(node);
        if (node.contains("mesh")) append_mesh(node["mesh"].get<std::size_t>(), world, out, colors_ok);
        for (const auto& child : node.value("children", json::array())) visit(child.get<std::size_t>(), world, out, colors_ok, depth + 1);
    }

    TriangleMesh to_mesh() const {
        TriangleMesh out;
        bool colors_ok = true;
        const auto& scenes = doc_.value("scenes", json::array());
        if (!scenes.empty()) {
            const std::size_t scene = doc_.value("scene", std::size_t{0});
            for (const auto& n : scenes.at(scene).value("nodes", json::array())) {
                visit(n.get<std::size_t>(), Eigen::Matrix4d::Identity(), out, colors_ok, 0);
            }
        } else {
            for (std::size_t i = 0; i < doc_.value("meshes", json::array()).size(); ++i) {
                append_mesh(i, Eigen::Matrix4d::Identity(), out, colors_ok);
            }
        }
        if (!colors_ok || out.vertex_colors.size() != out.vertices.size()) out.vertex_colors.clear();
        return out;
    }

private:
    json doc_;
    std::string glb_bin_;
    fs::path base_dir_;
    std::vector<std::string> buffers_;
};

TriangleMesh parse_gltf(std::string_view bytes, const fs::path& base_dir) {
    if (bytes.size() >= 12 && read_u32(bytes, 0) == kGlbMagic) {
        const std::uint32_t total = read_u32(bytes, 8);
        if (total > bytes.size()) throw Error(ErrorCode::kParseError, "GLB length exceeds payload");
        std::size_t at = 12;
        std::string json_text, bin;
        while (at + 8 <= total) {
            const std::uint32_t len = read_u32(bytes, at);
            const std::uint32_t type = read_u32(bytes, at + 4);
            if (at + 8 + len > total) throw Error(ErrorCode::kParseError, "GLB chunk truncated");
            if (type == kChunkJson) json_text.assign(bytes.substr(at + 8, len));
            else if (type == kChunkBin) bin.assign(bytes.substr(at + 8, len));
            at += 8 + len;
        }
        json doc = json::parse(json_text, nullptr, false);
        if (doc.is_discarded()) throw Error(ErrorCode::kParseError, "GLB JSON chunk does not parse");
        return GltfDocument(std::move(doc), std::move(bin), base_dir).to_mesh();
    }
    json doc = json::parse(bytes, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::kParseError, "glTF JSON does not parse");
    return GltfDocument(std::move(doc), {}, base_dir).to_mesh();
}

struct GltfParts {
    json doc;
    std::string bin;
};

template <typename T>
void append_pod(std::string& out, T v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    out.append(raw, sizeof(T));
}

GltfParts build_gltf(const TriangleMesh& mesh) {
    GltfParts parts;
    std::string& bin = parts.bin;
    json accessors = json::array();
    json views = json::array();

    Eigen::Vector3f lo = Eigen::Vector3f::Constant(std::numeric_limits<float>::max());
    Eigen::Vector3f hi = Eigen::Vector3f::Constant(std::numeric_limits<float>::lowest());
    for (const auto& v : mesh.vertices) {
        const Eigen::Vector3f p = z_up_to_y_up(v).cast<float>();
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
        append_pod(bin, p.x());
        append_pod(bin, p.y());
        append_pod(bin, p.z());
    }
    views.push_back({{"buffer", 0}, {"byteOffset", 0}, {"byteLength", bin.size()}, {"target", 34962}});
    json pos_acc = {{"bufferView", 0}, {"componentType", 5126}, {"count", mesh.vertices.size()}, {"type", "VEC3"}};
    if (!mesh.vertices.empty()) {
        pos_acc["min"] = {lo.x(), lo.y(), lo.z()};
        pos_acc["max"] = {hi.x(), hi.y(), hi.z()};
    }
    accessors.push_back(pos_acc);

    const std::size_t idx_offset = bin.size();
    for (const auto& f : mesh.faces) {
        for (auto i : f) append_pod(bin, i);
    }
    views.push_back({{"buffer", 0}, {"byteOffset", idx_offset}, {"byteLength", bin.size() - idx_offset}, {"target", 34963}});
    accessors.push_back({{"bufferView", 1}, {"componentType", 5125}, {"count", mesh.faces.size() * 3}, {"type", "SCALAR"}});

    json attributes = {{"POSITION", 0}};
    if (mesh.has_colors()) {
        const std::size_t col_offset = bin.size();
        for (const auto& c : mesh.vertex_colors) {
            append_pod(bin, static_cast<float>(c.x()));
            append_pod(bin, static_cast<float>(c.y()));
            append_pod(bin, static_cast<float>(c.z()));
        }
        views.push_back({{"buffer", 0}, {"byteOffset", col_offset}, {"byteLength", bin.size() - col_offset}, {"target", 34962}});
        accessors.push_back({{"bufferView", 2}, {"componentType", 5126}, {"count", mesh.vertex_colors.size()}, {"type", "VEC3"}});
        attributes["COLOR_0"] = 2;
    }

    json primitive = {{"attributes", attributes}, {"indices", 1}, {"mode", 4}};
    json m = {{"primitives", json::array({primitive})}};
    if (!mesh.name.empty()) m["name"] = mesh.name;
    parts.doc = {
        {"asset", {{"version", "2.0"}, {"generator", "scenedit"}}},
        {"scene", 0},
        {"scenes", json::array({{{"nodes", json::array({0})}}})},
        {"nodes", json::array({{{"mesh", 0}}})},
        {"meshes", json::array({m})},
        {"accessors", accessors},
        {"bufferViews", views},
        {"buffers", json::array({{{"byteLength", bin.size()}}})},
    };
    return parts;
}

}  // namespace

MeshFormat parse_format(std::string_view name) {
    const std::string n = lower(name);
    if (n == "obj") return MeshFormat::kObj;
    if (n == "ply") return MeshFormat::kPly;
    if (n == "gltf" || n == "glb") return MeshFormat::kGltf;
    throw Error(ErrorCode::kUnsupportedFormat, "unknown mesh format '" + std::string(name) + "'");
}

MeshFormat format_from_path(const fs::path& path) {
    std::string ext = path.extension().string();
    if (!ext.empty() && ext[0] == '.') ext.erase(0, 1);
    return parse_format(ext);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

TriangleMesh parse_mesh(std::string_view bytes, MeshFormat format, LoadStats* stats) {
    TriangleMesh mesh;
    switch (format) {
        case MeshFormat::kObj: mesh = parse_obj(bytes); break;
        case MeshFormat::kPly: mesh = parse_ply(bytes); break;
        case MeshFormat::kGltf: mesh = parse_gltf(bytes, {}); break;
    }
    finalize_loaded(mesh, stats);
    return mesh;
}

TriangleMesh load_mesh(const fs::path& path, MeshFormat format, LoadStats* stats) {
    if (!fs::exists(path)) throw Error(ErrorCode::kIoError, "no such file " + path.string());
    const std::string bytes = read_file(path);
    TriangleMesh mesh;
    switch (format) {
        case MeshFormat::kObj: mesh = parse_obj(bytes); break;
        case MeshFormat::kPly: mesh = parse_ply(bytes); break;
        case MeshFormat::kGltf: mesh = parse_gltf(bytes, path.parent_path().empty() ? fs::path(".") : path.parent_path()); break;
    }
    finalize_loaded(mesh, stats);
    return mesh;
}

TriangleMesh load_mesh(const fs::path& path) { return load_mesh(path, format_from_path(path)); }

std::string encode_obj(const TriangleMesh& mesh) {
    std::string out = "# scenedit\n";
    out.reserve(mesh.vertices.size() * 48 + mesh.faces.size() * 24);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& v = mesh.vertices[i];
        out += "v ";
        append_number(out, v.x());
        out += ' ';
        append_number(out, v.y());
        out += ' ';
        append_number(out, v.z());
        if (mesh.has_colors()) {
            for (int c = 0; c < 3; ++c) {
                out += ' ';
                append_number(out, mesh.vertex_colors[i][c]);
            }
        }
        out += '\n';
    }
    for (const auto& f : mesh.faces) {
        out += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' + std::to_string(f[2] + 1) + '\n';
    }
    return out;
}

std::string encode_ply(const TriangleMesh& mesh, bool binary) {
    std::string out = "ply\nformat ";
    out += binary ? "binary_little_endian 1.0\n" : "ascii 1.0\n";
    out += "comment scenedit\n";
    out += "element vertex " + std::to_string(mesh.vertices.size()) + "\n";
    out += "property double x\nproperty double y\nproperty double z\n";
    if (mesh.has_colors()) out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out += "element face " + std::to_string(mesh.faces.size()) + "\n";
    out += "property list uchar int vertex_indices\nend_header\n";
    auto to_byte = [](double c) { return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0)); };
    static_assert(std::endian::native == std::endian::little, "binary PLY writer assumes a little-endian host");
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& v = mesh.vertices[i];
        if (binary) {
            append_pod(out, v.x());
            append_pod(out, v.y());
            append_pod(out, v.z());
            if (mesh.has_colors()) {
                for (int c = 0; c < 3; ++c) append_pod(out, to_byte(mesh.vertex_colors[i][c]));
            }
        } else {
            append_number(out, v.x());
            out += ' ';
            append_number(out, v.y());
            out += ' ';
            append_number(out, v.z());
            if (mesh.has_colors()) {
                for (int c = 0; c < 3; ++c) out += ' ' + std::to_string(to_byte(mesh.vertex_colors[i][c]));
            }
            out += '\n';
        }
    }
    for (const auto& f : mesh.faces) {
        if (binary) {
            append_pod(out, std::uint8_t{3});
            for (auto idx : f) append_pod(out, static_cast<std::int32_t>(idx));
        } else {
            out += "3 " + std::to_string(f[0]) + ' ' + std::to_string(f[1]) + ' ' + std::to_string(f[2]) + '\n';
        }
    }
    return out;
}

std::string encode_glb(const TriangleMesh& mesh) {
    GltfParts parts = build_gltf(mesh);
    std::string json_text = parts.doc.dump();
    while (json_text.size() % 4) json_text += ' ';
    std::string& bin = parts.bin;
    while (bin.size() % 4) bin += '\0';
    std::string out;
    const auto total = static_cast<std::uint32_t>(12 + 8 + json_text.size() + 8 + bin.size());
    append_pod(out, kGlbMagic);
    append_pod(out, std::uint32_t{2});
    append_pod(out, total);
    append_pod(out, static_cast<std::uint32_t>(json_text.size()));
    append_pod(out, kChunkJson);
    out += json_text;
    append_pod(out, static_cast<std::uint32_t>(bin.size()));
    append_pod(out, kChunkBin);
    out += bin;
    return out;
}

std::string encode_gltf_json(const TriangleMesh& mesh) {
    GltfParts parts = build_gltf(mesh);
    parts.doc["buffers"][0]["uri"] = "data:application/octet-stream;base64," + base64_encode(parts.bin);
    return parts.doc.dump(1);
}

void save_mesh(const TriangleMesh& mesh, const fs::path& path, MeshFormat format, const SaveOptions& options) {
    std::string bytes;
    switch (format) {
        case MeshFormat::kObj: bytes = encode_obj(mesh); break;
        case MeshFormat::kPly: bytes = encode_ply(mesh, options.ply_binary); break;
        case MeshFormat::kGltf: {
            const bool binary = lower(path.extension().string()) == ".glb" || (path.extension() != ".gltf" && options.gltf_binary);
            bytes = binary ? encode_glb(mesh) : encode_gltf_json(mesh);
            break;
        }
    }
    write_file(path, bytes);
}

void save_mesh(const TriangleMesh& mesh, const fs::path& path) { save_mesh(mesh, path, format_from_path(path)); }

}  // namespace scenedit
