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

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "scenedit/mesh.hpp"

namespace scenedit {

/// kGltf covers both the JSON (.gltf) and binary (.glb) containers; the
/// loader sniffs the magic bytes and the writer picks by file extension.
enum class MeshFormat { kObj, kPly, kGltf };

/// Throws UnsupportedFormat for unknown extensions.
MeshFormat format_from_path(const std::filesystem::path& path);
MeshFormat parse_format(std::string_view name);

struct LoadStats {
    std::size_t dropped_degenerate_faces = 0;
};

/// Faces with area below 1e-12 m^2 or repeated indices are dropped and
/// counted. glTF scenes are converted from Y-up to Z-up.
TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format, LoadStats* stats = nullptr);
TriangleMesh load_mesh(const std::filesystem::path& path);

/// Parses an in-memory OBJ / PLY / glTF / GLB payload.
TriangleMesh parse_mesh(std::string_view bytes, MeshFormat format, LoadStats* stats = nullptr);

struct SaveOptions {
    bool ply_binary = true;  // binary_little_endian with double positions
    bool gltf_binary = true;
};

/// Throws IoError when the file cannot be written.
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format,
               const SaveOptions& options = {});
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);

/// glTF writers. The output is a pure function of the mesh, so equal meshes
/// give byte-identical files.
std::string encode_glb(const TriangleMesh& mesh);
std::string encode_gltf_json(const TriangleMesh& mesh);
std::string encode_obj(const TriangleMesh& mesh);
std::string encode_ply(const TriangleMesh& mesh, bool binary);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace scenedit
