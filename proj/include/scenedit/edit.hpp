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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenedit/asset.hpp"
#include "scenedit/grounding.hpp"
#include "scenedit/inpaint.hpp"
#include "scenedit/placement.hpp"
#include "scenedit/prompt.hpp"
#include "scenedit/scale.hpp"
#include "scenedit/scene.hpp"

namespace scenedit {

/// Services an edit may call. Only `assets` is required.
struct Backends {
    std::shared_ptr<AssetProvider> assets;
    std::shared_ptr<const SynonymTable> synonyms;
    std::shared_ptr<const ScalePriorTable> priors;
    std::shared_ptr<GroundingClient> grounding_client;
    std::shared_ptr<LanguageModelClient> language_model;
    std::shared_ptr<ImageClient> images;
    std::shared_ptr<DetectorClient> detector;
};

enum class PlacementStrategy { kLocationFinder, kCenter };

/// Thrown by EditConfig::fault_hook to simulate a failure at a pipeline stage.
class InjectedFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EditConfig {
    FilterConfig filter;
    NlpBackend nlp = NlpBackend::kFallback;
    GroundingBackend grounding = GroundingBackend::kAnnotations;
    double grounding_threshold = 0.5;
    std::vector<AssetSource> asset_sources{AssetSource::kGenerator, AssetSource::kLibrary, AssetSource::kProcedural};
    ScaleSource scale_source = ScaleSource::kPriorTable;
    double scale_cap = 0.8;
    int scale_samples = 5;
    std::uint64_t seed = 0;
    PlacementStrategy placement = PlacementStrategy::kLocationFinder;
    bool refine = true;
    double cascade_epsilon = 0.02;    // meters between a resting object's base and the support height
    double subdivision_factor = 2.0;  // fill edges are refined down to this many median scene edges
    /// Called with a stage name ("ground", "acquire", "scale", "place",
    /// "merge", "inpaint", "commit", ...); may throw InjectedFault.
    std::function<void(std::string_view)> fault_hook;
    Backends backends;
};

enum class RotationDirection { kClockwise, kCounterClockwise };

RotationDirection parse_direction(std::string_view name);  // "cw" | "ccw"

struct ObjectPlacement {
    std::uint32_t tag = 0;
    std::string name;
    std::string asset_source;
    ScaleEstimate scale;
    PlacementResult placement;
};

struct EditOutcome {
    std::string operation;
    std::optional<EditTask> task;
    std::vector<ObjectPlacement> placements;
    std::vector<std::uint32_t> affected_tags;  // added, moved or removed
    std::vector<std::string> warnings;
    std::optional<InpaintReport> inpaint;
    std::uint64_t scene_hash = 0;
};

nlohmann::json to_json(const EditOutcome& outcome);

/// One scene being edited, with its undo history and replayable op log.
/// Operations are atomic: they work on a copy and commit only on success.
/// Not internally synchronized; callers serialize writes.
class EditSession {
public:
    EditSession(std::string id, Scene initial, EditConfig config);

    const std::string& id() const { return id_; }
    const Scene& scene() const { return scene_; }
    const Scene& initial_scene() const { return initial_; }
    const EditConfig& config() const { return config_; }
    std::size_t history_size() const { return history_.size(); }
    const nlohmann::json& op_log() const { return op_log_; }
    const std::vector<ObjectPlacement>& last_placements() const { return last_placements_; }

    EditOutcome apply_prompt(std::string_view prompt);
    EditOutcome apply_task(const EditTask& task, const std::optional<TriangleMesh>& provided_mesh = std::nullopt);

    EditOutcome insert(const EditTask& task);
    /// Stops at the first failure after at least one object has been placed.
    std::vector<EditOutcome> insert_iterative(const EditTask& task);
    EditOutcome remove(const EditTask& task);
    EditOutcome replace(const EditTask& task, const std::optional<TriangleMesh>& provided_mesh = std::nullopt);
    EditOutcome translate(std::uint32_t tag, const std::vector<Vec3>& points);
    EditOutcome rotate(std::uint32_t tag, double angle, RotationDirection direction);
    /// Throws EmptyHistory.
    EditOutcome undo();

    /// Resolves a registry name ("box#3") or a decimal tag. Throws UnknownTag.
    std::uint32_t resolve_tag(std::string_view name_or_id) const;

    /// Writes the initial scene and op log into dir; later operations keep
    /// the log file current.
    void persist_to(const std::filesystem::path& dir);

    /// Rebuilds a session from a persisted directory by replaying its log.
    static EditSession replay(const std::filesystem::path& dir, EditConfig config);

private:
    void log(nlohmann::json entry);
    void commit(Scene next, nlohmann::json entry, EditOutcome& outcome);
    void fault(std::string_view stage) const;
    EditOutcome replay_entry(const nlohmann::json& entry);

    std::string id_;
    Scene initial_;
    Scene scene_;
    EditConfig config_;
    std::vector<Scene> history_;
    nlohmann::json op_log_ = nlohmann::json::array();
    std::vector<ObjectPlacement> last_placements_;
    std::optional<std::filesystem::path> persist_dir_;
};

/// Exact JSON form of a scene state (doubles keep full precision).
nlohmann::json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);

}  // namespace scenedit
