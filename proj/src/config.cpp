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

#include "scenedit/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>

#include "scenedit/error.hpp"
#include "scenedit/mesh_io.hpp"

#ifndef SCENEDIT_DATA_DIR
#define SCENEDIT_DATA_DIR "data"
#endif

namespace scenedit {

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("SCENEDIT_DATA_DIR"); env && *env) return env;
    return SCENEDIT_DATA_DIR;
}

RunConfig::RunConfig()
    : asset_aliases(default_data_dir() / "asset_aliases.json"),
      synonyms(default_data_dir() / "synonyms.json"),
      scale_priors(default_data_dir() / "scale_priors.json") {}

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::kConfigError, key + ": expected a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long i = std::stoll(v, &used);
        if (used == v.size()) return i;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::kConfigError, key + ": expected an integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(ErrorCode::kConfigError, key + ": expected true or false, got '" + v + "'");
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    using Setter = std::function<void(const std::string&)>;
    auto path = [](std::optional<std::filesystem::path>& p) { return [&p](const std::string& v) { p = v; }; };
    auto str = [](std::string& s) { return [&s](const std::string& v) { s = v; }; };
    auto dbl = [&key](double& d) { return [&d, &key](const std::string& v) { d = to_double(key, v); }; };
    auto integer = [&key](int& i) { return [&i, &key](const std::string& v) { i = static_cast<int>(to_int(key, v)); }; };
    const std::map<std::string, Setter> table = {
        {"scene", path(scene)},
        {"annotations", path(annotations)},
        {"out", path(out)},
        {"report", path(report)},
        {"session_dir", path(session_dir)},
        {"asset_sources", str(asset_sources)},
        {"asset_library", path(asset_library)},
        {"asset_aliases", [this](const std::string& v) { asset_aliases = v; }},
        {"generator_url", str(generator_url)},
        {"nlp", str(nlp)},
        {"nlp_url", str(nlp_url)},
        {"nlp_model", str(nlp_model)},
        {"nlp_api_key_env", str(nlp_api_key_env)},
        {"grounding", str(grounding)},
        {"grounding_url", str(grounding_url)},
        {"grounding_threshold", dbl(grounding_threshold)},
        {"synonyms", [this](const std::string& v) { synonyms = v; }},
        {"scale_source", str(scale_source)},
        {"scale_cap", dbl(scale_cap)},
        {"scale_samples", integer(scale_samples)},
        {"scale_priors", [this](const std::string& v) { scale_priors = v; }},
        {"image_url", str(image_url)},
        {"detector_url", str(detector_url)},
        {"placement", str(placement)},
        {"refine", [this, &key](const std::string& v) { refine = to_bool(key, v); }},
        {"cascade_epsilon", dbl(cascade_epsilon)},
        {"subdivision_factor", dbl(subdivision_factor)},
        {"seed", [this, &key](const std::string& v) { seed = static_cast<std::uint64_t>(to_int(key, v)); }},
        {"host", str(host)},
        {"port", integer(port)},
        {"client_timeout_s", dbl(client_timeout_s)},
        {"api_key_env", str(api_key_env)},
        {"filter.n", integer(filter.n)},
        {"filter.threshold", dbl(filter.threshold)},
        {"filter.up_angle_tolerance_deg", dbl(filter.up_angle_tolerance_deg)},
        {"filter.dbscan_eps", dbl(filter.dbscan_eps)},
        {"filter.dbscan_min_pts", integer(filter.dbscan_min_pts)},
        {"filter.rotation_steps", integer(filter.rotation_steps)},
        {"filter.z_neighbors", integer(filter.z_neighbors)},
        {"filter.contact_epsilon", dbl(filter.contact_epsilon)},
        {"filter.base_fraction", dbl(filter.base_fraction)},
    };
    const auto it = table.find(key);
    if (it == table.end()) throw Error(ErrorCode::kConfigError, "unknown config key '" + key + "'");
    it->second(value);
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kConfigError, "cannot read config file " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::kConfigError, path.string() + ":" + std::to_string(line_no) + ": expected key = value");
        }
        base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

void validate_run_config(const RunConfig& c, bool need_scene) {
    auto must_exist = [](const std::optional<std::filesystem::path>& p, const char* what) {
        if (p && !std::filesystem::exists(*p)) throw Error(ErrorCode::kConfigError, std::string(what) + " not found: " + p->string());
    };
    if (need_scene && !c.scene) throw Error(ErrorCode::kConfigError, "no scene given");
    must_exist(c.scene, "scene");
    must_exist(c.annotations, "annotation file");
    must_exist(c.asset_library, "asset library");
    if (c.port < 1 || c.port > 65535) throw Error(ErrorCode::kConfigError, "port must be in [1, 65535]");
    if (!(c.scale_cap > 0.0)) throw Error(ErrorCode::kConfigError, "scale cap must be positive");
    if (c.scale_samples < 1) throw Error(ErrorCode::kConfigError, "scale samples must be at least 1");
    if (c.placement != "location" && c.placement != "center") throw Error(ErrorCode::kConfigError, "placement must be location or center");
    c.filter.validate();
    parse_asset_sources(c.asset_sources);
    parse_nlp_backend(c.nlp);
    parse_scale_source(c.scale_source);
    if (c.grounding != "annotations" && c.grounding != "client") throw Error(ErrorCode::kConfigError, "grounding must be annotations or client");
    if (c.nlp == "client" && c.nlp_url.empty()) throw Error(ErrorCode::kConfigError, "nlp client needs nlp_url");
    if (c.grounding == "client" && c.grounding_url.empty()) throw Error(ErrorCode::kConfigError, "grounding client needs grounding_url");
    if (c.scale_source == "detector" && (c.image_url.empty() || c.detector_url.empty())) {
        throw Error(ErrorCode::kConfigError, "detector scale source needs image_url and detector_url");
    }
}

EditConfig make_edit_config(const RunConfig& c) {
    validate_run_config(c, false);
    auto endpoint = [&](const std::string& url, const std::string& key_env) {
        HttpEndpoint e;
        e.url = url;
        e.api_key_env = key_env;
        e.timeout_s = c.client_timeout_s;
        return e;
    };
    EditConfig cfg;
    cfg.filter = c.filter;
    cfg.nlp = parse_nlp_backend(c.nlp);
    cfg.grounding = c.grounding == "client" ? GroundingBackend::kClient : GroundingBackend::kAnnotations;
    cfg.grounding_threshold = c.grounding_threshold;
    cfg.asset_sources = parse_asset_sources(c.asset_sources);
    cfg.scale_source = parse_scale_source(c.scale_source);
    cfg.scale_cap = c.scale_cap;
    cfg.scale_samples = c.scale_samples;
    cfg.seed = c.seed;
    cfg.placement = c.placement == "center" ? PlacementStrategy::kCenter : PlacementStrategy::kLocationFinder;
    cfg.refine = c.refine;
    cfg.cascade_epsilon = c.cascade_epsilon;
    cfg.subdivision_factor = c.subdivision_factor;

    AssetProviderConfig assets;
    assets.library_dir = c.asset_library;
    if (!c.generator_url.empty()) assets.generator = std::make_shared<HttpMeshGeneratorClient>(endpoint(c.generator_url, c.api_key_env));
    try {
        assets.catalog = PrimitiveCatalog::load(c.asset_aliases);
        cfg.backends.synonyms = std::make_shared<SynonymTable>(SynonymTable::load(c.synonyms));
        cfg.backends.priors = std::make_shared<ScalePriorTable>(ScalePriorTable::load(c.scale_priors));
    } catch (const Error& e) {
        throw Error(ErrorCode::kConfigError, e.what());
    }
    cfg.backends.assets = std::make_shared<AssetProvider>(std::move(assets));
    if (!c.grounding_url.empty()) cfg.backends.grounding_client = std::make_shared<HttpGroundingClient>(endpoint(c.grounding_url, c.api_key_env));
    if (!c.nlp_url.empty()) {
        cfg.backends.language_model = std::make_shared<HttpLanguageModelClient>(endpoint(c.nlp_url, c.nlp_api_key_env), c.nlp_model);
    }
    if (!c.image_url.empty()) cfg.backends.images = std::make_shared<HttpImageClient>(endpoint(c.image_url, c.api_key_env));
    if (!c.detector_url.empty()) cfg.backends.detector = std::make_shared<HttpDetectorClient>(endpoint(c.detector_url, c.api_key_env));
    return cfg;
}

}  // namespace scenedit
