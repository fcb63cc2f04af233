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

#include <atomic>
#include <cstdlib>

#include "fixtures.hpp"
#include "mock_server.hpp"
#include "scenedit/asset.hpp"
#include "scenedit/base64.hpp"
#include "scenedit/error.hpp"
#include "scenedit/grounding.hpp"
#include "scenedit/http_client.hpp"
#include "scenedit/mesh_io.hpp"
#include "scenedit/prompt.hpp"
#include "scenedit/scale.hpp"

namespace scenedit {
namespace {

using nlohmann::json;
using testing::MockServer;

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::kConfigError;
}

HttpEndpoint endpoint(const MockServer& s, const std::string& path) {
    HttpEndpoint e;
    e.url = s.url(path);
    e.timeout_s = 5.0;
    return e;
}

TEST(Transport, StatusAndBearerKey) {
    MockServer s;
    std::string auth;
    s.server().Post("/echo", [&](const httplib::Request& req, httplib::Response& res) {
        auth = req.get_header_value("Authorization");
        res.set_content(req.body, "application/json");
    });
    s.server().Post("/fail", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
    s.start();

    ::setenv("SCENEDIT_TEST_KEY", "sekrit", 1);
    HttpEndpoint e = endpoint(s, "/echo");
    e.api_key_env = "SCENEDIT_TEST_KEY";
    EXPECT_EQ(json::parse(http_post_json(e, {{"a", 1}}))["a"], 1);
    EXPECT_EQ(auth, "Bearer sekrit");
    e.api_key_env = "SCENEDIT_TEST_KEY_UNSET";
    http_post_json(e, json::object());
    EXPECT_EQ(auth, "");

    EXPECT_EQ(code_of([&] { http_post_json(endpoint(s, "/fail"), json::object()); }), ErrorCode::kBackendError);
    EXPECT_EQ(code_of([&] { http_get(s.url("/missing"), 5.0); }), ErrorCode::kBackendError);
    HttpEndpoint bad;
    bad.url = "not a url";
    EXPECT_EQ(code_of([&] { http_post_json(bad, json::object()); }), ErrorCode::kBackendError);
    s.stop();
    EXPECT_EQ(code_of([&] { http_post_json(endpoint(s, "/echo"), json::object()); }), ErrorCode::kBackendError);
}

TEST(LanguageModel, ChatCompletionRoundTrip) {
    MockServer s;
    json seen;
    s.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        const json reply = {{"choices", {{{"message", {{"role", "assistant"},
                                                        {"content", R"({"kind":"insert","primary":["fern"],"grounding":"shelf"})"}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });
    s.start();
    HttpLanguageModelClient client(endpoint(s, "/v1/chat/completions"), "some-model");
    const EditTask t = classify_and_extract("put a fern on the shelf", NlpBackend::kClient, &client);
    EXPECT_EQ(t.primary_entities, std::vector<std::string>{"fern"});
    EXPECT_EQ(t.grounding_entity, "shelf");
    EXPECT_EQ(seen["model"], "some-model");
    EXPECT_EQ(seen["messages"][0]["role"], "system");
    EXPECT_EQ(seen["messages"][1]["content"], "put a fern on the shelf");
}

TEST(Grounding, ParsesInstances) {
    MockServer s;
    s.server().Post("/ground", [](const httplib::Request& req, httplib::Response& res) {
        const json q = json::parse(req.body);
        json out;
        if (q["query"] == "table") {
            out = {{"instances", {{{"vertex_indices", {0, 1, 2}}, {"score", 0.9}, {"label", "table"}}}}};
        } else {
            out = {{"vertex_indices", {3}}, {"score", 0.2}};
        }
        res.set_content(out.dump(), "application/json");
    });
    s.server().Post("/broken", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"instances":[{"score":1}]})", "application/json");
    });
    s.start();
    HttpGroundingClient client(endpoint(s, "/ground"));
    const auto masks = client.segment("scene", "table");
    ASSERT_EQ(masks.size(), 1u);
    EXPECT_EQ(masks[0].vertex_indices, (std::vector<std::uint32_t>{0, 1, 2}));
    EXPECT_EQ(masks[0].label, "table");
    const auto bare = client.segment("scene", "cup");
    ASSERT_EQ(bare.size(), 1u);
    EXPECT_DOUBLE_EQ(bare[0].score, 0.2);
    HttpGroundingClient broken(endpoint(s, "/broken"));
    EXPECT_EQ(code_of([&] { broken.segment("scene", "x"); }), ErrorCode::kBackendError);
}

TEST(Generator, InlineAndUrlPayloads) {
    const TriangleMesh mesh = testing::box(Vec3(0, 0, 0.5), Vec3(0.4, 0.3, 1.0));
    const std::string glb = encode_glb(mesh);
    MockServer s;
    std::atomic<int> in_flight{0}, max_in_flight{0};
    s.server().Post("/gen", [&](const httplib::Request& req, httplib::Response& res) {
        const int now = ++in_flight;
        max_in_flight = std::max(max_in_flight.load(), now);
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        const json q = json::parse(req.body);
        json out;
        if (q["prompt"] == "lamp") out = {{"format", "glb"}, {"data", base64_encode(glb)}};
        else out = {{"format", "ply"}, {"url", "/files/a.ply"}};
        --in_flight;
        res.set_content(out.dump(), "application/json");
    });
    s.server().Get("/files/a.ply", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(encode_ply(mesh, true), "application/octet-stream");
    });
    s.start();
    HttpMeshGeneratorClient client(endpoint(s, "/gen"));
    const TriangleMesh lamp = client.generate("lamp", 3);
    EXPECT_EQ(lamp.faces.size(), mesh.faces.size());
    EXPECT_LE((compute_aabb(lamp).extent() - Vec3(0.4, 0.3, 1.0)).norm(), 1e-6);

    s.server().Post("/gen2", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(json{{"format", "ply"}, {"url", s.url("/files/a.ply")}}.dump(), "application/json");
    });
    HttpMeshGeneratorClient by_url(endpoint(s, "/gen2"));
    EXPECT_EQ(by_url.generate("vase", 0).faces.size(), mesh.faces.size());

    // Concurrent callers on one client are serialized.
    std::vector<std::thread> threads;
    for (int i = 0; i < 4; ++i) threads.emplace_back([&] { client.generate("lamp", 0); });
    for (auto& t : threads) t.join();
    EXPECT_EQ(max_in_flight.load(), 1);
}

TEST(ImageAndDetector, RoundTrip) {
    MockServer s;
    json detector_request;
    s.server().Post("/image", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(json{{"image", base64_encode(std::string("\x89PNG", 4))}}.dump(), "application/json");
    });
    s.server().Post("/detect", [&](const httplib::Request& req, httplib::Response& res) {
        detector_request = json::parse(req.body);
        const json out = {{"boxes", {{{"label", "cup"}, {"score", 0.9}, {"box", {10, 10, 40, 50}}},
                                     {{"label", "table"}, {"score", 0.8}, {"box", {0, 0, 100, 80}}}}}};
        res.set_content(out.dump(), "application/json");
    });
    s.server().Post("/noimage", [](const httplib::Request&, httplib::Response& res) { res.set_content("{}", "application/json"); });
    s.start();
    HttpImageClient images(endpoint(s, "/image"));
    HttpDetectorClient detector(endpoint(s, "/detect"));
    ScaleOptions opt;
    opt.source = ScaleSource::kDetector;
    opt.k_images = 2;
    opt.images = &images;
    opt.detector = &detector;
    const ScaleEstimate est = estimate_scale("cup", "table", opt);
    EXPECT_DOUBLE_EQ(est.scale, 0.3);
    EXPECT_EQ(est.samples.size(), 2u);
    EXPECT_EQ(base64_decode(detector_request["image"].get<std::string>()), std::string("\x89PNG", 4));
    EXPECT_EQ(detector_request["labels"], (json{"cup", "table"}));

    HttpImageClient broken(endpoint(s, "/noimage"));
    opt.images = &broken;
    EXPECT_EQ(code_of([&] { estimate_scale("cup", "table", opt); }), ErrorCode::kImageBackendError);
}

}  // namespace
}  // namespace scenedit
