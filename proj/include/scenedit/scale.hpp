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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenedit/http_client.hpp"
#include "scenedit/mesh.hpp"

namespace scenedit {

struct BoundingBox2D {
    double x_min = 0, y_min = 0, x_max = 0, y_max = 0;  // pixels
    std::string label;
    double score = 0.0;

    double width() const { return x_max - x_min; }
    bool valid() const { return x_max > x_min && y_max > y_min; }
};

struct ScaleSample {
    double primary_width = 0.0;    // W_p, pixels
    double grounding_width = 0.0;  // W_g, pixels
    double ratio = 0.0;
};

enum class ScaleSource { kDetector, kPriorTable };

ScaleSource parse_scale_source(std::string_view name);  // "detector" | "priors"

struct ScaleEstimate {
    double scale = 1.0;
    double raw_scale = 1.0;  // before the cap
    std::vector<ScaleSample> samples;
    ScaleSource source = ScaleSource::kPriorTable;
    bool clamped = false;
};

nlohmann::json to_json(const ScaleEstimate& s);

struct GeneratedImage {
    std::string data;  // encoded image bytes
    std::string mime = "image/png";
};

class ImageClient {
public:
    virtual ~ImageClient() = default;
    virtual GeneratedImage generate(const std::string& prompt, std::uint64_t seed) = 0;
};

class DetectorClient {
public:
    virtual ~DetectorClient() = default;
    virtual std::vector<BoundingBox2D> detect(const GeneratedImage& image, const std::vector<std::string>& labels) = 0;
};

/// POST {"prompt": text, "seed": s} -> {"image": base64, "mime": "..."}
class HttpImageClient : public ImageClient {
public:
    explicit HttpImageClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
    GeneratedImage generate(const std::string& prompt, std::uint64_t seed) override;

private:
    HttpEndpoint endpoint_;
    std::mutex mutex_;  // one request in flight per client
};

/// POST {"image": base64, "labels": [...]}
///   -> {"boxes": [{"label": l, "score": s, "box": [x_min, y_min, x_max, y_max]}]}
class HttpDetectorClient : public DetectorClient {
public:
    explicit HttpDetectorClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
    std::vector<BoundingBox2D> detect(const GeneratedImage& image, const std::vector<std::string>& labels) override;

private:
    HttpEndpoint endpoint_;
    std::mutex mutex_;  // one request in flight per client
};

/// Typical physical widths per category, in meters, plus optional direct
/// ratios for specific pairs:
///   {"widths": {"cup": 0.09, ...}, "pairs": {"cup|table": 0.075, ...}}
class ScalePriorTable {
public:
    ScalePriorTable() = default;
    static ScalePriorTable from_json(const nlohmann::json& j);
    static ScalePriorTable load(const std::filesystem::path& path);

    std::optional<double> width(std::string_view category) const;  // exact name, then last word
    /// Pair entry, else the ratio of widths. Throws UnknownCategory.
    double ratio(std::string_view primary, std::string_view grounding) const;

private:
    std::map<std::string, double> widths_;
    std::map<std::string, double> pairs_;
};

struct ScaleOptions {
    ScaleSource source = ScaleSource::kPriorTable;
    double max_scale_cap = 0.8;
    int k_images = 5;
    std::uint64_t seed = 0;
    const ScalePriorTable* priors = nullptr;
    ImageClient* images = nullptr;
    DetectorClient* detector = nullptr;
};

/// Minimum of the per-sample ratios (or the prior-table ratio), clamped to
/// the cap. Throws NoValidImages, UnknownCategory or ImageBackendError.
ScaleEstimate estimate_scale(std::string_view primary, std::string_view grounding, const ScaleOptions& options);

/// Min over ratios, then the cap. Exposed for direct testing.
ScaleEstimate scale_from_samples(std::vector<ScaleSample> samples, double max_scale_cap);

/// Uniformly scales the object about the origin so its X width becomes
/// s.scale times the grounding X width, then puts its minimum Z at 0.
TriangleMesh apply_scale(const TriangleMesh& object, const ScaleEstimate& s, const Aabb& grounding_aabb);

}  // namespace scenedit
