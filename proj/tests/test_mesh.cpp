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
#include "scenedit/base64.hpp"
#include "scenedit/error.hpp"
#include "scenedit/mesh_io.hpp"

namespace scenedit {
namespace {

using testing::cube;
using testing::plate;
using testing::TempDir;

TriangleMesh tetra() {
    TriangleMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    m.faces = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
    return m;
}

TEST(Mesh, ValidateRejectsBadIndices) {
    TriangleMesh m = tetra();
    EXPECT_NO_THROW(validate_mesh(m));
    m.faces.push_back({0, 1, 9});
    EXPECT_THROW(validate_mesh(m), Error);
    m = tetra();
    m.faces.push_back({1, 1, 2});
    EXPECT_THROW(validate_mesh(m), Error);
    m = tetra();
    m.vertex_colors.resize(2);
    EXPECT_THROW(validate_mesh(m), Error);
}

TEST(Mesh, VertexNormalsOfPlatePointUp) {
    const TriangleMesh m = compute_vertex_normals(plate(0, 0, 4, 4, 0.1));
    for (std::size_t v = 0; v < m.vertices.size(); ++v) EXPECT_NEAR(m.vertex_normals[v].z(), 1.0, 1e-12);
}

TEST(Mesh, VertexNormalsOfTetraPointOutward) {
    const TriangleMesh m = compute_vertex_normals(tetra());
    const Vec3 c = Vec3(0.25, 0.25, 0.25);
    for (std::size_t v = 0; v < m.vertices.size(); ++v) EXPECT_GT(m.vertex_normals[v].dot(m.vertices[v] - c), 0.0);
}

TEST(Mesh, UnreferencedVertexGetsNanNormal) {
    TriangleMesh m = tetra();
    m.vertices.emplace_back(5, 5, 5);
    m = compute_vertex_normals(m);
    EXPECT_FALSE(m.has_defined_normal(4));
    EXPECT_TRUE(m.has_defined_normal(0));
}

TEST(Mesh, TransformOrderIsScaleRotateTranslate) {
    RigidTransform t;
    t.uniform_scale = 2.0;
    t.rotation_z = std::numbers::pi / 2;
    t.translation = Vec3(1, 0, 0);
    const Vec3 p = t.apply(Vec3(1, 0, 0));
    EXPECT_NEAR(p.x(), 1.0, 1e-12);
    EXPECT_NEAR(p.y(), 2.0, 1e-12);
    EXPECT_NEAR(p.z(), 0.0, 1e-12);
    t.uniform_scale = 0.0;
    EXPECT_THROW(apply_transform(tetra(), t), Error);
}

TEST(Mesh, MergeTagsObjectFaces) {
    const TriangleMesh scene = tetra();
    const TriangleMesh merged = merge(scene, tetra());
    ASSERT_EQ(merged.faces.size(), 8u);
    EXPECT_EQ(merged.tag_of(0), kUntagged);
    EXPECT_EQ(merged.tag_of(4), 1u);
    const TriangleMesh twice = merge(merged, tetra());
    EXPECT_EQ(twice.tag_of(8), 2u);
    EXPECT_EQ(faces_with_tag(twice, 1).size(), 4u);
    const TriangleMesh removed = remove_tag(twice, 1);
    EXPECT_EQ(removed.vertices.size(), 8u);
    EXPECT_EQ(removed.faces.size(), 8u);
    EXPECT_TRUE(faces_with_tag(removed, 1).empty());
    EXPECT_NO_THROW(validate_mesh(removed));
}

TEST(Mesh, RemoveFacesKeepsSharedAndUnreferencedVertices) {
    TriangleMesh m = plate(0, 0, 2, 1, 1.0);
    m.vertices.emplace_back(9, 9, 9);
    const FaceRemoval r = remove_faces(m, [](std::size_t f) { return f == 0; });
    EXPECT_EQ(r.mesh.faces.size(), 3u);
    // Face 0 is (0, 1, 4); vertex 0 is used by face 1, so nothing is dropped.
    EXPECT_EQ(r.mesh.vertices.size(), m.vertices.size());
    const FaceRemoval all = remove_faces(m, [](std::size_t) { return true; });
    EXPECT_EQ(all.mesh.vertices.size(), 1u);
    EXPECT_EQ(all.vertex_map.back(), 0);
}

TEST(Mesh, MedianEdgeLength) {
    EXPECT_DOUBLE_EQ(median_edge_length(TriangleMesh{}), 0.0);
    // 2x2 grid of unit squares: 12 axis edges of length 1, 4 diagonals.
    EXPECT_DOUBLE_EQ(median_edge_length(plate(0, 0, 2, 2, 1.0)), 1.0);
}

TEST(Base64, RoundTripAndRejectsGarbage) {
    std::mt19937 rng(3);
    for (int len = 0; len < 64; ++len) {
        std::string s(static_cast<std::size_t>(len), '\0');
        for (auto& c : s) c = static_cast<char>(rng() & 0xff);
        EXPECT_EQ(base64_decode(base64_encode(s)), s);
    }
    EXPECT_EQ(base64_encode("foobar"), "Zm9vYmFy");
    EXPECT_EQ(base64_encode("fo"), "Zm8=");
    EXPECT_THROW(base64_decode("Zm9v*mFy"), Error);
}

void expect_same_geometry(const TriangleMesh& a, const TriangleMesh& b, double tol) {
    ASSERT_EQ(a.vertices.size(), b.vertices.size());
    ASSERT_EQ(a.faces.size(), b.faces.size());
    for (std::size_t i = 0; i < a.vertices.size(); ++i) EXPECT_LE((a.vertices[i] - b.vertices[i]).norm(), tol);
    for (std::size_t f = 0; f < a.faces.size(); ++f) EXPECT_EQ(a.faces[f], b.faces[f]);
}

class FormatRoundTrip : public ::testing::TestWithParam<std::string> {};

TEST_P(FormatRoundTrip, GeometrySurvives) {
    TempDir dir;
    TriangleMesh m = cube(Vec3(0.3, -1.2, 0.7), 0.37);
    m.vertex_colors.assign(m.vertices.size(), Vec3(0.25, 0.5, 0.75));
    const auto path = dir / ("mesh." + GetParam());
    save_mesh(m, path);
    const TriangleMesh back = load_mesh(path);
    const bool exact = GetParam() == "ply";
    expect_same_geometry(m, back, exact ? 0.0 : 1e-6);
    ASSERT_TRUE(back.has_colors());
    EXPECT_LE((back.vertex_colors[0] - Vec3(0.25, 0.5, 0.75)).norm(), 1e-2);
}

INSTANTIATE_TEST_SUITE_P(Mesh, FormatRoundTrip, ::testing::Values("ply", "obj", "gltf", "glb"));

TEST(MeshIo, AsciiPlyAndQuadsTriangulate) {
    const std::string ply =
        "ply\nformat ascii 1.0\nelement vertex 4\nproperty float x\nproperty float y\nproperty float z\n"
        "element face 1\nproperty list uchar int vertex_indices\nend_header\n"
        "0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
    const TriangleMesh m = parse_mesh(ply, MeshFormat::kPly);
    EXPECT_EQ(m.vertices.size(), 4u);
    EXPECT_EQ(m.faces.size(), 2u);
}

TEST(MeshIo, ObjNegativeIndicesAndDegenerateFaces) {
    const std::string obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 2 0 0\nf -4 -3 -2\nf 1 2 4\n";
    LoadStats stats;
    const TriangleMesh m = parse_mesh(obj, MeshFormat::kObj, &stats);
    EXPECT_EQ(m.faces.size(), 1u);
    EXPECT_EQ(stats.dropped_degenerate_faces, 1u);
}

TEST(MeshIo, MalformedInputsFailCleanly) {
    EXPECT_THROW(parse_mesh("ply\nformat ascii 1.0\n", MeshFormat::kPly), Error);
    EXPECT_THROW(parse_mesh("v 0 0\n", MeshFormat::kObj), Error);
    EXPECT_THROW(parse_mesh("glTF\x02\x00\x00\x00", MeshFormat::kGltf), Error);
    EXPECT_THROW(parse_mesh("{not json", MeshFormat::kGltf), Error);
    EXPECT_THROW(format_from_path("scene.stl"), Error);
    EXPECT_THROW(load_mesh("/nonexistent/scene.ply"), Error);
}

TEST(MeshIo, GlbIsAPureFunctionOfTheMesh) {
    const TriangleMesh m = cube(Vec3(1, 2, 3), 0.5);
    EXPECT_EQ(encode_glb(m), encode_glb(m));
    const std::string glb = encode_glb(m);
    EXPECT_EQ(glb.substr(0, 4), "glTF");
    expect_same_geometry(m, parse_mesh(glb, MeshFormat::kGltf), 1e-6);
}

}  // namespace
}  // namespace scenedit
