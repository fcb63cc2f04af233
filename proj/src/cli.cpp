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

#include "scenedit/cli.hpp"

#include <algorithm>
#include <csignal>
#include <optional>

#include <CLI11.hpp>

#include "scenedit/bench.hpp"
#include "scenedit/config.hpp"
#include "scenedit/error.hpp"
#include "scenedit/mesh_io.hpp"
#include "scenedit/service.hpp"

namespace scenedit {

using nlohmann::json;

namespace {

struct EditArgs {
    std::optional<std::string> config;
    std::optional<std::string> scene;
    std::optional<std::string> annotations;
    std::string prompt;
    std::optional<std::string> out;
    std::optional<std::string> report;
    std::optional<std::string> session_dir;
    std::optional<std::string> nlp;
    std::optional<std::string> asset_sources;
    std::optional<std::string> asset_library;
    std::optional<std::string> scale_source;
    std::optional<double> scale_cap;
    std::optional<int> scale_samples;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> placement;
    bool no_refine = false;
    std::vector<std::string> overrides;
};

struct ServeArgs {
    std::optional<std::string> config;
    std::optional<std::string> host;
    std::optional<int> port;
    std::optional<std::string> session_dir;
};

struct BenchArgs {
    int scenes = 50;
    std::uint64_t seed = 1;
    std::optional<std::string> out;
    std::optional<std::string> json_out;
};

struct ReplayArgs {
    std::optional<std::string> config;
    std::string session_dir;
    std::optional<std::string> out;
};

RunConfig base_config(const std::optional<std::string>& path) {
    return path ? load_run_config(*path) : RunConfig();
}

void apply_overrides(RunConfig& c, const std::vector<std::string>& overrides) {
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::kConfigError, "--set expects key=value, got '" + kv + "'");
        c.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
}

RunConfig edit_config(const EditArgs& a) {
    RunConfig c = base_config(a.config);
    if (a.scene) c.scene = *a.scene;
    if (a.annotations) c.annotations = *a.annotations;
    if (a.out) c.out = *a.out;
    if (a.report) c.report = *a.report;
    if (a.session_dir) c.session_dir = *a.session_dir;
    if (a.nlp) c.nlp = *a.nlp;
    if (a.asset_sources) c.asset_sources = *a.asset_sources;
    if (a.asset_library) c.asset_library = *a.asset_library;
    if (a.scale_source) c.scale_source = *a.scale_source;
    if (a.scale_cap) c.scale_cap = *a.scale_cap;
    if (a.scale_samples) c.scale_samples = *a.scale_samples;
    if (a.seed) c.seed = *a.seed;
    if (a.placement) c.placement = *a.placement;
    if (a.no_refine) c.refine = false;
    apply_overrides(c, a.overrides);
    validate_run_config(c, true);
    return c;
}

void emit_report(const RunConfig& c, const json& report, std::ostream& out) {
    if (c.report) {
        write_file(*c.report, report.dump(2) + "\n");
    } else {
        out << report.dump(2) << '\n';
    }
}

int run_edit(const EditArgs& a, std::ostream& out, std::ostream& err) {
    RunConfig c;
    EditConfig cfg;
    try {
        c = edit_config(a);
        cfg = make_edit_config(c);
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }
    try {
        Scene scene = load_scene(*c.scene, c.annotations);
        EditSession session("cli", std::move(scene), cfg);
        if (c.session_dir) session.persist_to(*c.session_dir);
        const EditOutcome outcome = session.apply_prompt(a.prompt);
        if (c.out) save_mesh(session.scene().mesh, *c.out);
        json report = to_json(outcome);
        report["status"] = "ok";
        emit_report(c, report, out);
        return kExitOk;
    } catch (const Error& e) {
        err << to_string(e.code()) << ": " << e.what() << '\n';
        emit_report(c, {{"status", "error"}, {"error", to_string(e.code())}, {"message", e.what()}}, out);
        return kExitEditFailed;
    }
}

EditService* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

int run_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
    RunConfig c;
    EditConfig cfg;
    try {
        c = base_config(a.config);
        if (a.host) c.host = *a.host;
        if (a.port) c.port = *a.port;
        if (a.session_dir) c.session_dir = *a.session_dir;
        cfg = make_edit_config(c);
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }
    try {
        ServiceOptions options;
        if (c.session_dir) options.session_root = *c.session_dir;
        EditService service(std::move(cfg), options);
        const int port = service.bind(c.host, c.port);
        out << "listening on " << c.host << ':' << port << std::endl;
        g_service = &service;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        service.listen();
        g_service = nullptr;
        return kExitOk;
    } catch (const Error& e) {
        err << to_string(e.code()) << ": " << e.what() << '\n';
        return kExitEditFailed;
    }
}

int run_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
    BenchOptions options;
    options.scenes = a.scenes;
    options.seed = a.seed;
    const BenchReport report = run_placement_bench(options);
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    if (a.out) {
        write_file(*a.out, report.to_csv());
    } else {
        out << report.to_csv();
    }
    if (a.json_out) write_file(*a.json_out, report.to_json().dump(2) + "\n");
    return kExitOk;
}

int run_replay(const ReplayArgs& a, std::ostream& out, std::ostream& err) {
    EditConfig cfg;
    try {
        cfg = make_edit_config(base_config(a.config));
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }
    try {
        const EditSession session = EditSession::replay(a.session_dir, cfg);
        if (a.out) save_mesh(session.scene().mesh, *a.out);
        out << json{{"operations", session.op_log().size()}, {"scene_hash", scene_hash(session.scene())}}.dump() << '\n';
        return kExitOk;
    } catch (const Error& e) {
        err << to_string(e.code()) << ": " << e.what() << '\n';
        return kExitEditFailed;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Text-driven 3D scene editing", "scenedit"};
    app.require_subcommand(1);

    EditArgs edit;
    auto* e = app.add_subcommand("edit", "apply one prompt to a scene");
    e->add_option("--config", edit.config, "key = value config file");
    e->add_option("--scene", edit.scene, "scene mesh (ply, obj, gltf, glb)");
    e->add_option("--annotations", edit.annotations, "per-vertex label sidecar (json)");
    e->add_option("--prompt", edit.prompt, "edit instruction")->required();
    e->add_option("--out", edit.out, "edited mesh; format from the extension");
    e->add_option("--report", edit.report, "JSON report path (default: stdout)");
    e->add_option("--session-dir", edit.session_dir, "persist the initial scene and op log here");
    e->add_option("--nlp", edit.nlp, "fallback | client");
    e->add_option("--asset-source", edit.asset_sources, "comma list of generator, library, procedural");
    e->add_option("--asset-library", edit.asset_library, "directory of named meshes");
    e->add_option("--scale-source", edit.scale_source, "priors | detector");
    e->add_option("--scale-cap", edit.scale_cap, "largest allowed scale factor");
    e->add_option("--scale-samples", edit.scale_samples, "images sampled per scale estimate");
    e->add_option("--seed", edit.seed, "seed for generators and image sampling");
    e->add_option("--placement", edit.placement, "location | center");
    e->add_flag("--no-refine", edit.no_refine, "skip the rotation sweep");
    e->add_option("--set", edit.overrides, "config override key=value, e.g. filter.n=4");

    ServeArgs serve;
    auto* s = app.add_subcommand("serve", "run the HTTP editing service");
    s->add_option("--config", serve.config, "key = value config file");
    s->add_option("--host", serve.host, "bind address");
    s->add_option("--port", serve.port, "port (0 picks a free one)");
    s->add_option("--session-dir", serve.session_dir, "persist sessions under this directory");

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "placement penetration on synthetic cluttered tables");
    b->add_option("--scenes", bench.scenes, "number of scenes")->check(CLI::NonNegativeNumber);
    b->add_option("--seed", bench.seed, "suite seed");
    b->add_option("--out", bench.out, "CSV output (default: stdout)");
    b->add_option("--json", bench.json_out, "JSON output");

    ReplayArgs replay;
    auto* r = app.add_subcommand("replay", "rebuild a persisted session from its op log");
    r->add_option("--config", replay.config, "key = value config file");
    r->add_option("--session-dir", replay.session_dir, "session directory")->required();
    r->add_option("--out", replay.out, "final mesh");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& pe) {
        const int code = app.exit(pe, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    if (e->parsed()) return run_edit(edit, out, err);
    if (s->parsed()) return run_serve(serve, out, err);
    if (b->parsed()) return run_bench(bench, out, err);
    return run_replay(replay, out, err);
}

}  // namespace scenedit
