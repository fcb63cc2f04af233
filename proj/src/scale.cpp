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

#include "scenedit/scale.hpp"

#include <algorithm>

#include "scenedit/base64.hpp"
#include "scenedit/error.hpp"
#include "scenedit/mesh_io.hpp"
#include "scenedit/text.hpp"

namespace scenedit {

using nlohmann::json;

ScaleSource parse_scale_source(std::string_view name) {
    if (name == "detector") return ScaleSource::kDetector;
    if (name == "priors" || name == "prior_table") return ScaleSource::kPriorTable;
    throw Error(ErrorCode::kConfigError, "scale source must be 'detector' or 'priors', got '" + std::string(name) + "'");
}

json to_json(const ScaleEstimate& s) {
    json samples = json::array();
    for (const auto& x : s.samples) {
        samples.push_back({{"primary_width", x.primary_width}, {"grounding_width", x.grounding_width}, {"ratio", x.ratio}});
    }
    return {{"scale", s.scale},
            {"raw_scale", s.raw_scale},
            {"source", s.source == ScaleSource::kDetector ? "detector" : "prior_table"},
            {"clamped", s.clamped},
            {"samples", std::move(samples)}};
}

GeneratedImage HttpImageClient::generate(const std::string& prompt, std::uint64_t seed) {
    const std::lock_guard lock(mutex_);
    const json j = json::parse(http_post_json(endpoint_, {{"prompt", prompt}, {"seed", seed}}), nullptr, false);
    if (j.is_discarded() || !j.contains("image") || !j["image"].is_string()) {
        throw Error(ErrorCode::kImageBackendError, "image response needs a base64 'image'");
    }
    return {base64_decode(j["image"].get<std::string>()), j.value("mime", std::string("image/png"))};
}

std::vector<BoundingBox2D> HttpDetectorClient::detect(const GeneratedImage& image, const std::vector<std::string>& labels) {
    const std::lock_guard lock(mutex_);
    const json j = json::parse(
        http_post_json(endpoint_, {{"image", base64_encode(image.data)}, {"mime", image.mime}, {"labels", labels}}), nullptr, false);
    if (j.is_discarded() || !j.contains("boxes")) throw Error(ErrorCode::kBackendError, "detector response needs 'boxes'");
    std::vector<BoundingBox2D> out;
    try {
        for (const auto& b : j["boxes"]) {
            const auto xyxy = b.at("box").get<std::vector<double>>();
            if (xyxy.size() != 4) throw Error(ErrorCode::kBackendError, "detector box needs four numbers");
            out.push_back({xyxy[0], xyxy[1], xyxy[2], xyxy[3], b.value("label", std::string()), b.value("score", 1.0)});
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kBackendError, std::string("detector response: ") + e.what());
    }
    return out;
}

ScalePriorTable ScalePriorTable::from_json(const json& j) {
    ScalePriorTable t;
    try {
        if (j.contains("widths")) {
            for (const auto& [k, v] : j["widths"].items()) {
                const double w = v.get<double>();
                if (!(w > 0.0)) throw Error(ErrorCode::kParseError, "prior width for '" + k + "' must be positive");
                t.widths_[normalize_label(k)] = w;
            }
        }
        if (j.contains("pairs")) {
            for (const auto& [k, v] : j["pairs"].items()) {
                const auto bar = k.find('|');
                if (bar == std::string::npos) throw Error(ErrorCode::kParseError, "pair key needs 'primary|grounding': " + k);
                t.pairs_[normalize_label(k.substr(0, bar)) + "|" + normalize_label(k.substr(bar + 1))] = v.get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kParseError, std::string("scale prior table: ") + e.what());
    }
    return t;
}

ScalePriorTable ScalePriorTable::load(const std::filesystem::path& path) {
    const json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kParseError, "scale prior table does not parse: " + path.string());
    return from_json(j);
}

std::optional<double> ScalePriorTable::width(std::string_view category) const {
    const std::string name = normalize_label(category);
    for (const std::string& key : {name, head_noun(name)}) {
        if (auto it = widths_.find(key); it != widths_.end()) return it->second;
    }
    return std::nullopt;
}

double ScalePriorTable::ratio(std::string_view primary, std::string_view grounding) const {
    const std::string p = normalize_label(primary), g = normalize_label(grounding);
    for (const auto& key : {p + "|" + g, head_noun(p) + "|" + head_noun(g)}) {
        if (auto it = pairs_.find(key); it != pairs_.end()) return it->second;
    }
    const auto wp = width(p), wg = width(g);
    if (!wp) throw Error(ErrorCode::kUnknownCategory, "no prior width for '" + p + "'");
    if (!wg) throw Error(ErrorCode::kUnknownCategory, "no prior width for '" + g + "'");
    return *wp / *wg;
}

ScaleEstimate scale_from_samples(std::vector<ScaleSample> samples, double max_scale_cap) {
    if (samples.empty()) throw Error(ErrorCode::kNoValidImages, "no scale samples");
    ScaleEstimate s;
    s.raw_scale = std::min_element(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.ratio < b.ratio; })->ratio;
    s.clamped = s.raw_scale > max_scale_cap;
    s.scale = s.clamped ? max_scale_cap : s.raw_scale;
    s.samples = std::move(samples);
    return s;
}

namespace {

const BoundingBox2D* best_box(const std::vector<BoundingBox2D>& boxes, const std::string& label) {
    const BoundingBox2D* best = nullptr;
    for (const auto& b : boxes) {
        if (!b.valid() || normalize_label(b.label) != label) continue;
        if (!best || b.score > best->score) best = &b;
    }
    return best;
}

}  // namespace

ScaleEstimate estimate_scale(std::string_view primary, std::string_view grounding, const ScaleOptions& options) {
    if (!(options.max_scale_cap > 0.0)) throw Error(ErrorCode::kConfigError, "scale cap must be positive");
    if (options.source == ScaleSource::kPriorTable) {
        if (!options.priors) throw Error(ErrorCode::kUnknownCategory, "no scale prior table configured");
        const double r = options.priors->ratio(primary, grounding);
        ScaleEstimate s = scale_from_samples({ScaleSample{0.0, 0.0, r}}, options.max_scale_cap);
        s.source = ScaleSource::kPriorTable;
        return s;
    }

    if (options.k_images < 1) throw Error(ErrorCode::kConfigError, "scale sample count must be at least 1");
    if (!options.images || !options.detector) throw Error(ErrorCode::kImageBackendError, "image or detector client not configured");
    const std::string p = normalize_label(primary), g = normalize_label(grounding);
    const std::string prompt = "a " + p + " on a " + g;
    std::vector<ScaleSample> samples;
    for (int i = 0; i < options.k_images; ++i) {
        GeneratedImage image;
        try {
            image = options.images->generate(prompt, options.seed + static_cast<std::uint64_t>(i));
        } catch (const Error& e) {
            throw Error(ErrorCode::kImageBackendError, e.what());
        }
        const auto boxes = options.detector->detect(image, {p, g});
        const BoundingBox2D* bp = best_box(boxes, p);
        const BoundingBox2D* bg = best_box(boxes, g);
        if (!bp || !bg) continue;
        samples.push_back({bp->width(), bg->width(), bp->width() / bg->width()});
    }
    if (samples.empty()) throw Error(ErrorCode::kNoValidImages, "no image showed both '" + p + "' and '" + g + "'");
    ScaleEstimate s = scale_from_samples(std::move(samples), options.max_scale_cap);
    s.source = ScaleSource::kDetector;
    return s;
}

TriangleMesh apply_scale(const TriangleMesh& object, const ScaleEstimate& s, const Aabb& grounding_aabb) {
    const double object_width = compute_aabb(object).extent().x();
    const double target = s.scale * grounding_aabb.extent().x();
    if (!(object_width > 0.0) || !(target > 0.0)) throw Error(ErrorCode::kInvalidScale, "zero width in scale application");
    TriangleMesh out = apply_transform(object, RigidTransform{0.0, Vec3::Zero(), target / object_width});
    const double min_z = compute_aabb(out).min.z();
    for (auto& v : out.vertices) v.z() -= min_z;
    return out;
}

}  // namespace scenedit
