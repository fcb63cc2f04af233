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

#include <chrono>
#include <thread>

#include "fixtures.hpp"
#include "scenedit/asset.hpp"
#include "scenedit/config.hpp"
#include "scenedit/error.hpp"
#include "scenedit/inpaint.hpp"
#include "scenedit/mesh_io.hpp"

namespace scenedit {
namespace {

using testing::box;
using testing::TempDir;

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::kConfigError;
}

void expect_closed_unit_primitive(const TriangleMesh& m) {
    EXPECT_NO_THROW(validate_mesh(m));
    EXPECT_TRUE(boundary_edges(m).empty());
    const Aabb b = compute_aabb(m);
    EXPECT_LE((b.extent() - Vec3::Ones()).norm(), 1e-12);
    EXPECT_LE(b.center().norm(), 1e-12);
    // Outward facing: positive enclosed volume.
    double volume = 0.0;
    for (const auto& f : m.faces) volume += m.vertices[f[0]].dot(m.vertices[f[1]].cross(m.vertices[f[2]])) / 6.0;
    EXPECT_GT(volume, 0.0);
}

TEST(Primitives, ClosedOutwardUnitBoxes) {
    expect_closed_unit_primitive(make_box());
    expect_closed_unit_primitive(make_cylinder());
    expect_closed_unit_primitive(make_cone());
    expect_closed_unit_primitive(make_sphere());
    double volume = 0.0;
    const TriangleMesh cube = make_box(3);
    for (const auto& f : cube.faces) volume += cube.vertices[f[0]].dot(cube.vertices[f[1]].cross(cube.vertices[f[2]])) / 6.0;
    EXPECT_NEAR(volume, 1.0, 1e-12);
}

TEST(Catalog, LookupOrder) {
    const PrimitiveCatalog catalog = PrimitiveCatalog::load(default_data_dir() / "asset_aliases.json");
    EXPECT_EQ(catalog.lookup("cup")->primitive, "cylinder");
    EXPECT_EQ(catalog.lookup("coffee cup")->primitive, "cylinder");
    EXPECT_EQ(catalog.lookup("sphere")->primitive, "sphere");
    EXPECT_EQ(catalog.lookup("hyperdrive")->primitive, "box");
    const TriangleMesh book = catalog.build("book");
    const Vec3 ext = compute_aabb(book).extent();
    EXPECT_NEAR(ext.y() / ext.x(), 0.75, 1e-12);

    const PrimitiveCatalog strict = PrimitiveCatalog::from_json({{"aliases", {{"cup", {{"primitive", "cylinder"}}}}}});
    EXPECT_FALSE(strict.lookup("hyperdrive").has_value());
    EXPECT_EQ(code_of([&] { strict.build("hyperdrive"); }), ErrorCode::kNotFound);
    EXPECT_THROW(PrimitiveCatalog::from_json({{"aliases", {{"cup", {{"primitive", "torus"}}}}}}), Error);
}

TEST(Sources, ParseList) {
    EXPECT_EQ(parse_asset_sources("library, procedural"), (std::vector<AssetSource>{AssetSource::kLibrary, AssetSource::kProcedural}));
    EXPECT_THROW(parse_asset_sources(""), Error);
    EXPECT_THROW(parse_asset_sources("library,library"), Error);
    EXPECT_THROW(parse_asset_sources("magic"), Error);
}

AssetProvider procedural_provider() {
    AssetProviderConfig cfg;
    cfg.catalog = PrimitiveCatalog::load(default_data_dir() / "asset_aliases.json");
    return AssetProvider(std::move(cfg));
}

TEST(Acquire, ProceduralBoxIsNormalizedUnitCube) {
    AssetProvider provider = procedural_provider();
    const AssetRecord rec = provider.acquire({"box", {AssetSource::kProcedural}, 0});
    EXPECT_EQ(rec.source, AssetSource::kProcedural);
    const Aabb b = compute_aabb(rec.mesh);
    EXPECT_NEAR(b.min.z(), 0.0, 1e-15);
    EXPECT_LE((b.extent() - Vec3::Ones()).norm(), 1e-12);
    EXPECT_NEAR(b.center().x(), 0.0, 1e-15);
    EXPECT_NEAR(b.center().y(), 0.0, 1e-15);
    // Normalization is idempotent.
    const TriangleMesh again = normalize_asset(rec.mesh);
    EXPECT_EQ(again.vertices, rec.mesh.vertices);
    EXPECT_EQ(code_of([&] { provider.acquire({"", {AssetSource::kProcedural}, 0}); }), ErrorCode::kInvalidTask);
}

TEST(Library, ListingAndLookup) {
    TempDir dir;
    EXPECT_TRUE(list_library(dir.path()).empty());
    save_mesh(box(Vec3::Zero(), Vec3(0.1, 0.1, 0.12)), dir / "cup.obj");
    save_mesh(box(Vec3::Zero(), Vec3(0.1, 0.1, 0.3)), dir / "vase.ply");
    save_mesh(box(Vec3::Zero(), Vec3(0.2, 0.1, 0.12)), dir / "cup.ply");
    write_file(dir / "notes.txt", "not a mesh");
    EXPECT_EQ(list_library(dir.path()), (std::vector<std::string>{"cup", "vase"}));
    EXPECT_EQ(code_of([] { list_library("/nonexistent/library"); }), ErrorCode::kIoError);

    save_mesh(box(Vec3(3, 3, 3), Vec3(0.3, 0.2, 0.25)), dir / "teapot.obj");
    AssetProviderConfig cfg;
    cfg.library_dir = dir.path();
    AssetProvider provider(std::move(cfg));
    const AssetRecord rec = provider.acquire({"teapot", {AssetSource::kLibrary}, 0});
    EXPECT_EQ(rec.source, AssetSource::kLibrary);
    EXPECT_LE((compute_aabb(rec.mesh).extent() - Vec3(0.3, 0.2, 0.25)).norm(), 1e-6);
    EXPECT_EQ(provider.acquire({"blue teapot", {AssetSource::kLibrary}, 0}).source, AssetSource::kLibrary);
}

class StubGenerator : public MeshGeneratorClient {
public:
    explicit StubGenerator(TriangleMesh mesh, std::chrono::milliseconds delay = {}) : mesh_(std::move(mesh)), delay_(delay) {}
    TriangleMesh generate(const std::string&, std::uint64_t seed) override {
        ++calls;
        std::this_thread::sleep_for(delay_);
        if (fail) throw Error(ErrorCode::kBackendError, "generator is down");
        TriangleMesh m = mesh_;
        for (auto& v : m.vertices) v.x() += 1e-3 * static_cast<double>(seed);
        return m;
    }
    std::atomic<int> calls{0};
    bool fail = false;

private:
    TriangleMesh mesh_;
    std::chrono::milliseconds delay_;
};

TEST(Generator, CacheHitsAreByteIdentical) {
    auto gen = std::make_shared<StubGenerator>(box(Vec3(0, 0, 0), Vec3(0.3, 0.2, 0.4)));
    AssetProviderConfig cfg;
    cfg.generator = gen;
    AssetProvider provider(std::move(cfg));
    const AssetRecord a = provider.acquire({"lamp", {AssetSource::kGenerator}, 7});
    const AssetRecord b = provider.acquire({"lamp", {AssetSource::kGenerator}, 7});
    EXPECT_EQ(encode_ply(a.mesh, true), encode_ply(b.mesh, true));
    EXPECT_EQ(gen->calls, 1);
    provider.acquire({"lamp", {AssetSource::kGenerator}, 8});
    EXPECT_EQ(gen->calls, 2);
    EXPECT_EQ(provider.generator_calls(), 2u);
}

TEST(Generator, ConcurrentRequestsShareOneGeneration) {
    auto gen = std::make_shared<StubGenerator>(box(Vec3(0, 0, 0), Vec3(0.3, 0.2, 0.4)), std::chrono::milliseconds(50));
    AssetProviderConfig cfg;
    cfg.generator = gen;
    AssetProvider provider(std::move(cfg));
    std::vector<std::thread> threads;
    std::vector<std::string> bytes(8);
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&, i] { bytes[i] = encode_ply(provider.acquire({"chair", {AssetSource::kGenerator}, 1}).mesh, true); });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(gen->calls, 1);
    for (const auto& b : bytes) EXPECT_EQ(b, bytes[0]);
}

TEST(Generator, FallsThroughAndReportsEveryCause) {
    auto gen = std::make_shared<StubGenerator>(box(Vec3::Zero(), Vec3::Ones()));
    gen->fail = true;
    AssetProviderConfig cfg;
    cfg.generator = gen;
    cfg.catalog = PrimitiveCatalog::load(default_data_dir() / "asset_aliases.json");
    AssetProvider provider(std::move(cfg));
    const AssetRecord rec = provider.acquire({"cup", {AssetSource::kGenerator, AssetSource::kLibrary, AssetSource::kProcedural}, 0});
    EXPECT_EQ(rec.source, AssetSource::kProcedural);
    // Failures are not cached: a recovered generator is asked again.
    gen->fail = false;
    EXPECT_EQ(provider.acquire({"cup", {AssetSource::kGenerator}, 0}).source, AssetSource::kGenerator);

    AssetProvider empty{AssetProviderConfig{}};
    try {
        empty.acquire({"cup", {AssetSource::kGenerator, AssetSource::kLibrary}, 0});
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kAllBackendsFailed);
        EXPECT_NE(std::string(e.what()).find("generator"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("library"), std::string::npos);
    }
}

TEST(Generator, FlatOrEmptyMeshesFallThrough) {
    auto gen = std::make_shared<StubGenerator>(testing::plate(0, 0, 3, 3, 0.1));
    AssetProviderConfig cfg;
    cfg.generator = gen;
    cfg.catalog = PrimitiveCatalog::load(default_data_dir() / "asset_aliases.json");
    AssetProvider provider(std::move(cfg));
    EXPECT_EQ(provider.acquire({"rug", {AssetSource::kGenerator, AssetSource::kProcedural}, 0}).source, AssetSource::kProcedural);
}

TEST(Orientation, LargestFlatSideGoesDown) {
    // Tall thin slab lying on its narrow edge: the big faces point along X.
    TriangleMesh slab = box(Vec3::Zero(), Vec3(0.1, 1.0, 0.8));
    ASSERT_TRUE(orient_base_down(slab));
    EXPECT_NEAR(compute_aabb(slab).extent().z(), 0.1, 1e-9);

    // Upside-down cone: the disk ends up at the bottom.
    TriangleMesh cone = make_cone();
    for (auto& v : cone.vertices) v.z() = -v.z();
    for (auto& f : cone.faces) std::swap(f[1], f[2]);
    ASSERT_TRUE(orient_base_down(cone));
    cone = normalize_asset(cone);
    int on_floor = 0;
    for (const auto& v : cone.vertices) on_floor += std::abs(v.z()) < 1e-9;
    EXPECT_GT(on_floor, 10);

    TriangleMesh sphere = make_sphere();
    EXPECT_FALSE(orient_base_down(sphere));

    auto gen = std::make_shared<StubGenerator>(make_sphere());
    AssetProviderConfig cfg;
    cfg.generator = gen;
    AssetProvider provider(std::move(cfg));
    const AssetRecord rec = provider.acquire({"ball", {AssetSource::kGenerator}, 0});
    EXPECT_FALSE(rec.canonical_up);
    EXPECT_FALSE(rec.warnings.empty());
}

}  // namespace
}  // namespace scenedit
