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

#include <deque>

#include "fixtures.hpp"
#include "scenedit/config.hpp"
#include "scenedit/error.hpp"
#include "scenedit/scale.hpp"

namespace scenedit {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::kConfigError;
}

ScaleSample ratio_sample(double wp, double wg) { return {wp, wg, wp / wg}; }

TEST(MinRule, SingleAndMultipleSamples) {
    const ScaleEstimate one = scale_from_samples({ratio_sample(50, 100)}, 0.8);
    EXPECT_EQ(one.scale, 0.5);
    EXPECT_FALSE(one.clamped);
    const ScaleEstimate three = scale_from_samples({{0, 0, 0.6}, {0, 0, 0.4}, {0, 0, 0.5}}, 0.8);
    EXPECT_EQ(three.scale, 0.4);
    EXPECT_EQ(three.samples.size(), 3u);
    const ScaleEstimate capped = scale_from_samples({{0, 0, 3.0}}, 1.0);
    EXPECT_EQ(capped.scale, 1.0);
    EXPECT_EQ(capped.raw_scale, 3.0);
    EXPECT_TRUE(capped.clamped);
    EXPECT_EQ(to_json(capped)["clamped"], true);
    EXPECT_EQ(code_of([] { scale_from_samples({}, 0.8); }), ErrorCode::kNoValidImages);
}

TEST(PriorTable, RatiosAndLookup) {
    const ScalePriorTable priors = ScalePriorTable::load(default_data_dir() / "scale_priors.json");
    EXPECT_NEAR(priors.ratio("cup", "table"), 0.075, 1e-12);
    EXPECT_NEAR(priors.ratio("red cup", "dining table"), 0.075, 1e-12);
    EXPECT_EQ(code_of([&] { priors.ratio("flux capacitor", "table"); }), ErrorCode::kUnknownCategory);

    const ScalePriorTable pairs = ScalePriorTable::from_json({{"widths", {{"a", 1.0}, {"b", 4.0}}}, {"pairs", {{"a|b", 0.5}}}});
    EXPECT_EQ(pairs.ratio("a", "b"), 0.5);
    EXPECT_EQ(pairs.ratio("b", "a"), 4.0);

    ScaleOptions opt;
    opt.priors = &priors;
    const ScaleEstimate s = estimate_scale("cup", "table", opt);
    EXPECT_NEAR(s.scale, 0.075, 1e-12);
    EXPECT_EQ(s.source, ScaleSource::kPriorTable);
    opt.priors = nullptr;
    EXPECT_EQ(code_of([&] { estimate_scale("cup", "table", opt); }), ErrorCode::kUnknownCategory);
}

class StubImages : public ImageClient {
public:
    GeneratedImage generate(const std::string& prompt, std::uint64_t seed) override {
        prompts.push_back(prompt);
        seeds.push_back(seed);
        if (fail) throw Error(ErrorCode::kBackendError, "image service down");
        return {std::to_string(seed), "image/png"};
    }
    std::vector<std::string> prompts;
    std::vector<std::uint64_t> seeds;
    bool fail = false;
};

// Answers per image with scripted primary and grounding widths; a width of 0
// leaves that label undetected.
class StubDetector : public DetectorClient {
public:
    explicit StubDetector(std::deque<std::pair<double, double>> widths) : widths_(std::move(widths)) {}
    std::vector<BoundingBox2D> detect(const GeneratedImage&, const std::vector<std::string>& labels) override {
        const auto [wp, wg] = widths_.front();
        widths_.pop_front();
        std::vector<BoundingBox2D> out;
        if (wp > 0) {
            out.push_back({0, 0, 5, 5, labels[0], 0.1});  // weaker duplicate, ignored
            out.push_back({10, 10, 10 + wp, 40, labels[0], 0.9});
        }
        out.push_back({0, 0, 1, 1, "lamp", 0.99});
        if (wg > 0) out.push_back({0, 0, wg, 300, labels[1], 0.8});
        return out;
    }

private:
    std::deque<std::pair<double, double>> widths_;
};

TEST(Detector, MinimumOverValidImages) {
    StubImages images;
    StubDetector detector({{60, 100}, {0, 100}, {40, 100}, {50, 0}, {45, 100}});
    ScaleOptions opt;
    opt.source = ScaleSource::kDetector;
    opt.images = &images;
    opt.detector = &detector;
    opt.seed = 10;
    const ScaleEstimate s = estimate_scale("Cup", "table", opt);
    EXPECT_EQ(s.samples.size(), 3u);
    EXPECT_DOUBLE_EQ(s.scale, 0.4);
    EXPECT_EQ(s.source, ScaleSource::kDetector);
    EXPECT_EQ(images.seeds, (std::vector<std::uint64_t>{10, 11, 12, 13, 14}));
    EXPECT_EQ(images.prompts.front(), "a cup on a table");
}

TEST(Detector, Failures) {
    StubImages images;
    StubDetector nothing({{0, 100}, {50, 0}});
    ScaleOptions opt;
    opt.source = ScaleSource::kDetector;
    opt.k_images = 2;
    opt.images = &images;
    opt.detector = &nothing;
    EXPECT_EQ(code_of([&] { estimate_scale("cup", "table", opt); }), ErrorCode::kNoValidImages);
    images.fail = true;
    StubDetector unused({{1, 1}});
    opt.detector = &unused;
    EXPECT_EQ(code_of([&] { estimate_scale("cup", "table", opt); }), ErrorCode::kImageBackendError);
    opt.images = nullptr;
    EXPECT_EQ(code_of([&] { estimate_scale("cup", "table", opt); }), ErrorCode::kImageBackendError);
    EXPECT_THROW(parse_scale_source("magic"), Error);
}

TEST(ApplyScale, WidthRatioAndAspect) {
    const TriangleMesh unit = testing::box(Vec3(0, 0, 0.5), Vec3(1.0, 0.5, 1.0));
    Aabb ground;
    ground.expand(Vec3(0, 0, 0));
    ground.expand(Vec3(1.2, 0.8, 0.75));
    ScaleEstimate s;
    s.scale = 0.075;
    const TriangleMesh out = apply_scale(unit, s, ground);
    const Vec3 ext = compute_aabb(out).extent();
    EXPECT_NEAR(ext.x(), 0.09, 1e-12);
    EXPECT_NEAR(ext.y() / ext.x(), 0.5, 1e-12);
    EXPECT_NEAR(ext.z() / ext.x(), 1.0, 1e-12);
    EXPECT_NEAR(compute_aabb(out).min.z(), 0.0, 1e-15);

    s.scale = 0.0;
    EXPECT_EQ(code_of([&] { apply_scale(unit, s, ground); }), ErrorCode::kInvalidScale);
}

}  // namespace
}  // namespace scenedit
