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

#include <future>
#include <thread>

#include "fixtures.hpp"
#include "scenedit/base64.hpp"
#include "scenedit/mesh_io.hpp"
#include "scenedit/service.hpp"

// After Eigen: resolv.h defines a _res macro.
#include <httplib.h>

namespace scenedit {
namespace {

using nlohmann::json;

class RunningService {
public:
    explicit RunningService(EditConfig cfg, ServiceOptions opt = {}) : service_(std::move(cfg), std::move(opt)) {
        port_ = service_.bind("127.0.0.1", 0);
        thread_ = std::thread([this] { service_.listen(); });
        service_.wait_until_ready();
    }
    ~RunningService() {
        service_.stop();
        thread_.join();
    }
    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port_);
        c.set_read_timeout(60, 0);
        return c;
    }

private:
    EditService service_;
    std::thread thread_;
    int port_ = 0;
};

json scene_body(const Scene& s) {
    return {{"mesh", base64_encode(encode_ply(s.mesh, true))}, {"format", "ply"}, {"annotations", annotations_to_json(*s.annotations)}};
}

std::string create_session(httplib::Client& c, const Scene& s) {
    auto res = c.Post("/sessions", scene_body(s).dump(), "application/json");
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 201);
    return json::parse(res->body)["id"].get<std::string>();
}

TEST(Service, SessionLifecycle) {
    RunningService svc(testing::offline_config());
    auto c = svc.client();
    EXPECT_EQ(c.Get("/health")->status, 200);
    const std::string id = create_session(c, testing::empty_table_scene());

    auto mesh = c.Get("/sessions/" + id + "/mesh");
    ASSERT_TRUE(mesh);
    EXPECT_EQ(mesh->status, 200);
    EXPECT_EQ(mesh->body.substr(0, 4), "glTF");
    const TriangleMesh loaded = parse_mesh(mesh->body, MeshFormat::kGltf);
    EXPECT_EQ(loaded.faces.size(), testing::empty_table_scene().mesh.faces.size());
    auto gltf = c.Get("/sessions/" + id + "/mesh?format=gltf");
    EXPECT_EQ(json::parse(gltf->body)["asset"]["version"], "2.0");

    auto edit = c.Post("/sessions/" + id + "/edits", R"({"prompt":"place a box on the table"})", "application/json");
    ASSERT_EQ(edit->status, 200);
    const json outcome = json::parse(edit->body);
    EXPECT_EQ(outcome["operation"], "insert");
    // The mutation is in the log by the time the response arrives.
    EXPECT_EQ(json::parse(c.Get("/sessions/" + id + "/log")->body).size(), 1u);
    const json trace = json::parse(c.Get("/sessions/" + id + "/trace")->body);
    EXPECT_EQ(trace["placements"].size(), 1u);
    const json objects = json::parse(c.Get("/sessions/" + id + "/objects")->body);
    EXPECT_EQ(objects["objects"][0]["name"], "box#1");

    EXPECT_EQ(c.Post("/sessions/" + id + "/rotate", R"({"tag":"box#1","angle_deg":45,"direction":"cw"})", "application/json")->status, 200);
    EXPECT_EQ(c.Post("/sessions/" + id + "/translate", R"({"tag":1,"points":[[0.2,0.1,0.75]]})", "application/json")->status, 200);
    const json task = {{"kind", "delete"}, {"primary", json::array()}, {"grounding", "box#1"}};
    EXPECT_EQ(c.Post("/sessions/" + id + "/edits", task.dump(), "application/json")->status, 200);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(c.Post("/sessions/" + id + "/undo", "", "application/json")->status, 200);
    EXPECT_EQ(c.Get("/sessions/" + id + "/mesh")->body, mesh->body);

    auto empty = c.Post("/sessions/" + id + "/undo", "", "application/json");
    EXPECT_EQ(empty->status, 409);
    EXPECT_EQ(json::parse(empty->body)["error"], "EmptyHistory");
    EXPECT_FALSE(json::parse(empty->body)["message"].get<std::string>().empty());
}

TEST(Service, ErrorStatuses) {
    RunningService svc(testing::offline_config());
    auto c = svc.client();
    EXPECT_EQ(c.Get("/sessions/nope/mesh")->status, 404);
    EXPECT_EQ(c.Post("/sessions/nope/edits", R"({"prompt":"place a box on the table"})", "application/json")->status, 404);
    EXPECT_EQ(c.Post("/sessions", "not json", "application/json")->status, 400);
    EXPECT_EQ(c.Post("/sessions", R"({"scene":"/nonexistent.ply"})", "application/json")->status, 500);

    const std::string id = create_session(c, testing::empty_table_scene());
    auto unknown_tag = c.Post("/sessions/" + id + "/rotate", R"({"tag":"lamp#7","angle":1.0})", "application/json");
    EXPECT_EQ(unknown_tag->status, 404);
    EXPECT_EQ(json::parse(unknown_tag->body)["error"], "UnknownTag");
    auto invalid = c.Post("/sessions/" + id + "/edits", R"({"kind":"insert","primary":[],"grounding":"table"})", "application/json");
    EXPECT_EQ(invalid->status, 422);
    EXPECT_EQ(json::parse(invalid->body)["error"], "InvalidTask");
    EXPECT_EQ(c.Post("/sessions/" + id + "/edits", R"({"prompt":"make it nicer"})", "application/json")->status, 422);
    auto missing = c.Post("/sessions/" + id + "/edits", R"({"prompt":"place a box on the unicorn"})", "application/json");
    EXPECT_EQ(missing->status, 422);
    EXPECT_EQ(json::parse(missing->body)["error"], "NotFound");
    EXPECT_EQ(http_status(ErrorCode::kBackendError), 502);
}

TEST(Service, ConcurrentWritesOnOneSessionConflict) {
    EditConfig cfg = testing::offline_config();
    std::promise<void> entered;
    std::shared_future<void> release_signal;
    std::promise<void> release;
    release_signal = release.get_future().share();
    std::atomic<bool> first{true};
    cfg.fault_hook = [&](std::string_view stage) {
        if (stage == "place" && first.exchange(false)) {
            entered.set_value();
            release_signal.wait();
        }
    };
    RunningService svc(cfg);
    auto c = svc.client();
    const std::string id = create_session(c, testing::empty_table_scene());
    const std::string other = create_session(c, testing::empty_table_scene());

    auto slow = std::async(std::launch::async, [&] {
        auto cc = svc.client();
        return cc.Post("/sessions/" + id + "/edits", R"({"prompt":"place a box on the table"})", "application/json")->status;
    });
    entered.get_future().wait();
    auto busy = c.Post("/sessions/" + id + "/edits", R"({"prompt":"place a cup on the table"})", "application/json");
    EXPECT_EQ(busy->status, 409);
    EXPECT_EQ(json::parse(busy->body)["error"], "SessionBusy");
    // Other sessions and reads are not blocked by the writer lock.
    EXPECT_EQ(c.Post("/sessions/" + other + "/edits", R"({"prompt":"place a cup on the table"})", "application/json")->status, 200);
    release.set_value();
    EXPECT_EQ(slow.get(), 200);
    EXPECT_EQ(json::parse(c.Get("/sessions/" + id + "/log")->body).size(), 1u);
}

TEST(Service, PersistsSessions) {
    testing::TempDir root;
    {
        RunningService svc(testing::offline_config(), ServiceOptions{root.path()});
        auto c = svc.client();
        const std::string id = create_session(c, testing::empty_table_scene());
        c.Post("/sessions/" + id + "/edits", R"({"prompt":"place a box on the table"})", "application/json");
        const EditSession replayed = EditSession::replay(root / id, testing::offline_config());
        EXPECT_EQ(encode_glb(replayed.scene().mesh), c.Get("/sessions/" + id + "/mesh")->body);
    }
}

}  // namespace
}  // namespace scenedit
