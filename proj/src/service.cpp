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

#include "scenedit/service.hpp"

#include <atomic>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>

#include <httplib.h>

#include "scenedit/base64.hpp"
#include "scenedit/mesh_io.hpp"

namespace scenedit {

using nlohmann::json;

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::kUnknownTag: return 404;
        case ErrorCode::kEmptyHistory: return 409;
        case ErrorCode::kParseError:
        case ErrorCode::kUnsupportedFormat: return 400;
        case ErrorCode::kBackendError:
        case ErrorCode::kImageBackendError: return 502;
        case ErrorCode::kIoError:
        case ErrorCode::kConfigError: return 500;
        default: return 422;
    }
}

namespace {

struct Slot {
    explicit Slot(EditSession s) : session(std::move(s)) {}
    EditSession session;
    std::mutex writer;
    std::shared_mutex state;
};

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    reply(res, status, {{"error", code}, {"message", message}});
}

json parse_body(const httplib::Request& req) {
    json j = json::parse(req.body.empty() ? std::string("{}") : req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kParseError, "request body must be a JSON object");
    return j;
}

Vec3 point_from(const json& p) {
    if (!p.is_array() || p.size() != 3) throw Error(ErrorCode::kParseError, "points are [x, y, z] arrays");
    return {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
}

}  // namespace

struct EditService::Impl {
    EditConfig config;
    ServiceOptions options;
    httplib::Server server;
    std::mutex sessions_mutex;
    std::map<std::string, std::shared_ptr<Slot>> sessions;
    std::atomic<std::uint64_t> next_id{1};

    std::shared_ptr<Slot> find(const std::string& id) {
        std::lock_guard lock(sessions_mutex);
        auto it = sessions.find(id);
        return it == sessions.end() ? nullptr : it->second;
    }

    // Runs fn with errors mapped to HTTP statuses.
    template <typename Fn>
    void guarded(httplib::Response& res, Fn&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            reply_error(res, http_status(e.code()), to_string(e.code()), e.what());
        } catch (const json::exception& e) {
            reply_error(res, 400, "ParseError", e.what());
        } catch (const std::exception& e) {
            reply_error(res, 500, "InternalError", e.what());
        }
    }

    template <typename Fn>
    void read(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
        guarded(res, [&] {
            auto slot = find(req.matches[1]);
            if (!slot) return reply_error(res, 404, "UnknownSession", "no session " + req.matches[1].str());
            std::shared_lock lock(slot->state);
            fn(slot->session);
        });
    }

    template <typename Fn>
    void write(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
        guarded(res, [&] {
            auto slot = find(req.matches[1]);
            if (!slot) return reply_error(res, 404, "UnknownSession", "no session " + req.matches[1].str());
            std::unique_lock writer(slot->writer, std::try_to_lock);
            if (!writer.owns_lock()) return reply_error(res, 409, "SessionBusy", "another edit on this session is in progress");
            std::unique_lock lock(slot->state);
            fn(slot->session);
        });
    }

    void create(const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const json body = parse_body(req);
            Scene scene;
            if (body.contains("scene")) {
                const std::filesystem::path path = body["scene"].get<std::string>();
                scene.mesh = load_mesh(path);
                scene.source_ref = path.string();
            } else if (body.contains("mesh")) {
                scene.mesh = parse_mesh(base64_decode(body["mesh"].get<std::string>()),
                                        parse_format(body.value("format", std::string("glb"))));
                scene.source_ref = body.value("scene_ref", std::string());
            } else {
                throw Error(ErrorCode::kParseError, "session needs 'scene' (path) or 'mesh' (base64)");
            }
            if (body.contains("annotations")) {
                const json& a = body["annotations"];
                scene.annotations = a.is_string() ? load_annotations(a.get<std::string>(), scene.mesh.vertices.size())
                                                  : annotations_from_json(a, scene.mesh.vertices.size());
            }
            const std::string id = "s" + std::to_string(next_id++);
            auto slot = std::make_shared<Slot>(EditSession(id, std::move(scene), config));
            if (options.session_root) slot->session.persist_to(*options.session_root / id);
            const auto& m = slot->session.scene().mesh;
            const json out = {{"id", id}, {"vertices", m.vertices.size()}, {"faces", m.faces.size()}};
            {
                std::lock_guard lock(sessions_mutex);
                sessions.emplace(id, std::move(slot));
            }
            reply(res, 201, out);
        });
    }

    void routes() {
        server.set_payload_max_length(std::size_t{1} << 30);
        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) { create(req, res); });

        server.Get(R"(/sessions/([^/]+)/mesh)", [this](const httplib::Request& req, httplib::Response& res) {
            read(req, res, [&](EditSession& s) {
                if (req.get_param_value("format") == "gltf") {
                    res.set_content(encode_gltf_json(s.scene().mesh), "model/gltf+json");
                } else {
                    res.set_content(encode_glb(s.scene().mesh), "model/gltf-binary");
                }
            });
        });

        server.Post(R"(/sessions/([^/]+)/edits)", [this](const httplib::Request& req, httplib::Response& res) {
            write(req, res, [&](EditSession& s) {
                const json body = parse_body(req);
                EditOutcome out;
                if (body.contains("prompt")) {
                    out = s.apply_prompt(body["prompt"].get<std::string>());
                } else {
                    const json& t = body.contains("task") ? body["task"] : body;
                    std::optional<TriangleMesh> provided;
                    if (body.contains("provided_mesh")) {
                        const json& pm = body["provided_mesh"];
                        provided = parse_mesh(base64_decode(pm.at("data").get<std::string>()),
                                              parse_format(pm.value("format", std::string("ply"))));
                    }
                    out = s.apply_task(task_from_json(t), provided);
                }
                reply(res, 200, to_json(out));
            });
        });

        server.Post(R"(/sessions/([^/]+)/translate)", [this](const httplib::Request& req, httplib::Response& res) {
            write(req, res, [&](EditSession& s) {
                const json body = parse_body(req);
                std::vector<Vec3> pts;
                for (const auto& p : body.at("points")) pts.push_back(point_from(p));
                const json& tag = body.at("tag");
                const auto id = s.resolve_tag(tag.is_string() ? tag.get<std::string>() : std::to_string(tag.get<std::uint32_t>()));
                reply(res, 200, to_json(s.translate(id, pts)));
            });
        });

        server.Post(R"(/sessions/([^/]+)/rotate)", [this](const httplib::Request& req, httplib::Response& res) {
            write(req, res, [&](EditSession& s) {
                const json body = parse_body(req);
                const json& tag = body.at("tag");
                const auto id = s.resolve_tag(tag.is_string() ? tag.get<std::string>() : std::to_string(tag.get<std::uint32_t>()));
                const double angle = body.contains("angle_deg") ? body["angle_deg"].get<double>() * std::numbers::pi / 180.0
                                                                : body.at("angle").get<double>();
                const auto dir = parse_direction(body.value("direction", std::string("ccw")));
                reply(res, 200, to_json(s.rotate(id, angle, dir)));
            });
        });

        server.Post(R"(/sessions/([^/]+)/undo)", [this](const httplib::Request& req, httplib::Response& res) {
            write(req, res, [&](EditSession& s) { reply(res, 200, to_json(s.undo())); });
        });

        server.Get(R"(/sessions/([^/]+)/trace)", [this](const httplib::Request& req, httplib::Response& res) {
            read(req, res, [&](EditSession& s) {
                json items = json::array();
                for (const auto& p : s.last_placements()) {
                    items.push_back({{"tag", p.tag}, {"name", p.name}, {"placement", placement_to_json(p.placement)},
                                     {"trace", trace_to_json(p.placement)}});
                }
                reply(res, 200, {{"placements", std::move(items)}});
            });
        });

        server.Get(R"(/sessions/([^/]+)/objects)", [this](const httplib::Request& req, httplib::Response& res) {
            read(req, res, [&](EditSession& s) {
                json items = json::array();
                for (const auto& [tag, name] : s.scene().registry) {
                    Aabb box;
                    for (auto v : tag_vertices(s.scene(), tag)) box.expand(s.scene().mesh.vertices[v]);
                    items.push_back({{"tag", tag},
                                     {"name", name},
                                     {"aabb", {{"min", {box.min.x(), box.min.y(), box.min.z()}},
                                               {"max", {box.max.x(), box.max.y(), box.max.z()}}}}});
                }
                reply(res, 200, {{"objects", std::move(items)}, {"history", s.history_size()}});
            });
        });

        server.Get(R"(/sessions/([^/]+)/log)", [this](const httplib::Request& req, httplib::Response& res) {
            read(req, res, [&](EditSession& s) { reply(res, 200, s.op_log()); });
        });

        server.Get("/health", [](const httplib::Request&, httplib::Response& res) { reply(res, 200, {{"status", "ok"}}); });
    }
};

EditService::EditService(EditConfig config, ServiceOptions options) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    impl_->options = std::move(options);
    impl_->routes();
}

EditService::~EditService() { stop(); }

int EditService::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) throw Error(ErrorCode::kIoError, "cannot bind " + host);
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) throw Error(ErrorCode::kIoError, "cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void EditService::listen() { impl_->server.listen_after_bind(); }

void EditService::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void EditService::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace scenedit
