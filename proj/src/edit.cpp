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

#include "scenedit/edit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <set>
#include <unordered_map>

#include "scenedit/base64.hpp"
#include "scenedit/error.hpp"
#include "scenedit/kdtree.hpp"
#include "scenedit/mesh_io.hpp"
#include "scenedit/text.hpp"

namespace scenedit {

using nlohmann::json;

RotationDirection parse_direction(std::string_view name) {
    const std::string n = normalize_label(name);
    if (n == "cw" || n == "clockwise") return RotationDirection::kClockwise;
    if (n == "ccw" || n == "counterclockwise" || n == "anticlockwise") return RotationDirection::kCounterClockwise;
    throw Error(ErrorCode::kInvalidTask, "rotation direction must be cw or ccw, got '" + std::string(name) + "'");
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

json to_json(const EditOutcome& o) {
    json placements = json::array();
    for (const auto& p : o.placements) {
        placements.push_back({{"tag", p.tag},
                              {"name", p.name},
                              {"asset_source", p.asset_source},
                              {"scale", to_json(p.scale)},
                              {"placement", placement_to_json(p.placement)}});
    }
    json j = {{"operation", o.operation},
              {"placements", std::move(placements)},
              {"affected_tags", o.affected_tags},
              {"warnings", o.warnings},
              {"scene_hash", hex64(o.scene_hash)}};
    j["task"] = o.task ? to_json(*o.task) : json();
    j["inpaint"] = o.inpaint ? to_json(*o.inpaint) : json();
    return j;
}

// ---------------------------------------------------------------------------
// Scene snapshots

namespace {

json vec_array(const std::vector<Vec3>& vs) {
    json out = json::array();
    for (const auto& v : vs) {
        for (int i = 0; i < 3; ++i) out.push_back(std::isnan(v[i]) ? json() : json(v[i]));
    }
    return out;
}

std::vector<Vec3> vec_array_from(const json& j) {
    if (j.size() % 3 != 0) throw Error(ErrorCode::kParseError, "vector array length is not a multiple of 3");
    std::vector<Vec3> out(j.size() / 3);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& x = j[i];
        out[i / 3][static_cast<int>(i % 3)] = x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>();
    }
    return out;
}

}  // namespace

json scene_to_json(const Scene& scene) {
    const TriangleMesh& m = scene.mesh;
    json faces = json::array();
    for (const auto& f : m.faces) {
        for (auto v : f) faces.push_back(v);
    }
    json registry = json::object();
    for (const auto& [tag, name] : scene.registry) registry[std::to_string(tag)] = name;
    return {{"name", m.name},
            {"vertices", vec_array(m.vertices)},
            {"faces", std::move(faces)},
            {"normals", vec_array(m.vertex_normals)},
            {"colors", vec_array(m.vertex_colors)},
            {"face_tags", m.face_tags},
            {"annotations", scene.annotations ? annotations_to_json(*scene.annotations) : json()},
            {"registry", std::move(registry)},
            {"next_tag", scene.next_tag},
            {"source_ref", scene.source_ref}};
}

Scene scene_from_json(const json& j) {
    Scene s;
    try {
        s.mesh.name = j.value("name", std::string());
        s.mesh.vertices = vec_array_from(j.at("vertices"));
        const auto faces = j.at("faces").get<std::vector<std::uint32_t>>();
        if (faces.size() % 3 != 0) throw Error(ErrorCode::kParseError, "face array length is not a multiple of 3");
        for (std::size_t i = 0; i < faces.size(); i += 3) s.mesh.faces.push_back({faces[i], faces[i + 1], faces[i + 2]});
        s.mesh.vertex_normals = vec_array_from(j.at("normals"));
        s.mesh.vertex_colors = vec_array_from(j.at("colors"));
        s.mesh.face_tags = j.at("face_tags").get<std::vector<std::uint32_t>>();
        if (!j.at("annotations").is_null()) s.annotations = annotations_from_json(j["annotations"], s.mesh.vertices.size());
        for (const auto& [k, v] : j.at("registry").items()) s.registry[static_cast<std::uint32_t>(std::stoul(k))] = v.get<std::string>();
        s.next_tag = j.at("next_tag").get<std::uint32_t>();
        s.source_ref = j.value("source_ref", std::string());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kParseError, std::string("scene snapshot: ") + e.what());
    }
    validate_scene(s);
    return s;
}

// ---------------------------------------------------------------------------
// Pipeline pieces

namespace {

std::string registry_label(const std::string& name) { return name.substr(0, name.rfind('#')); }

GroundedObject grounded_from_tag(const Scene& scene, std::uint32_t tag) {
    GroundedObject g;
    g.vertex_ids = tag_vertices(scene, tag);
    g.submesh = extract_submesh(scene.mesh, g.vertex_ids);
    g.aabb = compute_aabb(g.submesh);
    g.label = registry_label(scene.registry.at(tag));
    return g;
}

struct Pipeline {
    const EditConfig& cfg;
    std::function<void(std::string_view)> fault;

    GroundingOptions grounding_options(std::vector<std::string>* log) const {
        GroundingOptions o;
        o.backend = cfg.grounding;
        o.synonyms = cfg.backends.synonyms.get();
        o.client = cfg.backends.grounding_client.get();
        o.confidence_threshold = cfg.grounding_threshold;
        o.log = log;
        return o;
    }

    // Registry names first ("box#2"), then the grounding backend, then
    // registry labels for scenes without annotations.
    GroundedObject resolve(const Scene& scene, const std::string& entity, std::vector<std::string>& warnings) const {
        const std::string name = normalize_label(entity);
        for (const auto& [tag, reg] : scene.registry) {
            if (normalize_label(reg) == name) return grounded_from_tag(scene, tag);
        }
        try {
            return ground(scene, entity, grounding_options(&warnings));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::kNotFound) throw;
            static const SynonymTable kNone;
            const SynonymTable& syn = cfg.backends.synonyms ? *cfg.backends.synonyms : kNone;
            for (const auto& [tag, reg] : scene.registry) {
                const std::string label = registry_label(reg);
                if (syn.matches(label, name) || syn.matches(label, head_noun(name))) return grounded_from_tag(scene, tag);
            }
            throw;
        }
    }

    ScaleEstimate scale(const std::string& primary, const std::string& grounding_entity, const std::string& grounding_label) const {
        ScaleOptions o;
        o.source = cfg.scale_source;
        o.max_scale_cap = cfg.scale_cap;
        o.k_images = cfg.scale_samples;
        o.seed = cfg.seed;
        o.priors = cfg.backends.priors.get();
        o.images = cfg.backends.images.get();
        o.detector = cfg.backends.detector.get();
        try {
            return estimate_scale(primary, grounding_entity, o);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::kUnknownCategory || grounding_label == normalize_label(grounding_entity)) throw;
            return estimate_scale(primary, grounding_label, o);
        }
    }

    AssetRecord acquire(const std::string& name) const {
        if (!cfg.backends.assets) throw Error(ErrorCode::kConfigError, "no asset provider configured");
        AssetRequest req;
        req.entity_name = name;
        req.source_preference = cfg.asset_sources;
        req.seed = cfg.seed;
        return cfg.backends.assets->acquire(req);
    }

    ObjectPlacement insert_one(Scene& work, const std::string& primary, const std::string& grounding_entity,
                               std::vector<std::string>& warnings) const {
        fault("ground");
        const GroundedObject g = resolve(work, grounding_entity, warnings);
        fault("acquire");
        AssetRecord asset = acquire(primary);
        warnings.insert(warnings.end(), asset.warnings.begin(), asset.warnings.end());
        fault("scale");
        ObjectPlacement out;
        out.scale = scale(primary, grounding_entity, g.label);
        if (out.scale.clamped) {
            warnings.push_back("scale for '" + primary + "' clamped from " + std::to_string(out.scale.raw_scale) + " to " +
                               std::to_string(out.scale.scale));
        }
        const TriangleMesh object = apply_scale(asset.mesh, out.scale, g.aabb);

        fault("place");
        const SignedDistanceField sdf(work.mesh);
        const Vec3 ext = compute_aabb(object).extent();
        const FilterConfig& fc = cfg.filter;
        PlacementResult pr = cfg.placement == PlacementStrategy::kCenter
                                 ? center_location(g.submesh, fc)
                                 : find_location(g.submesh, std::max(ext.x(), ext.y()), fc, Obstacles{&sdf, ext.z()});
        if (cfg.refine) {
            pr = refine_rotation(object, pr, sdf, fc);
        } else {
            const TriangleMesh at0 = place_object(object, pr.location, 0.0, fc.base_fraction);
            pr.rotation_z = 0.0;
            pr.penetration_before = pr.penetration_after =
                penetration_percent(at0, sdf, pr.location.z(), fc.contact_epsilon).fraction;
        }
        const TriangleMesh placed = place_object(object, pr.location, pr.rotation_z, fc.base_fraction);

        fault("merge");
        out.tag = add_object(work, placed, normalize_label(primary));
        out.name = work.registry.at(out.tag);
        out.asset_source = std::string(to_string(asset.source));
        out.placement = std::move(pr);
        return out;
    }

    std::vector<double> support_levels(const TriangleMesh& mesh) const {
        std::vector<double> out;
        try {
            std::vector<Vec3> pts;
            for (auto v : filter_up_vertices(mesh, cfg.filter)) pts.push_back(mesh.vertices[v]);
            for (const auto& c : cluster_support(pts, cfg.filter)) out.push_back(c.z_level);
        } catch (const Error&) {
            // no support surface: nothing can rest on it
        }
        return out;
    }

    // Removes the grounded object (and, with cascade, registered objects
    // resting on it), then fills the holes the removal opened.
    InpaintReport delete_object(Scene& work, const GroundedObject& g, bool cascade, std::vector<std::uint32_t>& removed_tags) const {
        TriangleMesh& mesh = work.mesh;
        std::vector<char> selected(mesh.vertices.size(), 0);
        for (auto v : g.vertex_ids) selected[v] = 1;
        std::vector<char> drop(mesh.faces.size(), 0);
        for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
            const auto& t = mesh.faces[f];
            drop[f] = selected[t[0]] || selected[t[1]] || selected[t[2]];
        }

        if (cascade) {
            std::deque<std::pair<Aabb, std::vector<double>>> supports;
            supports.emplace_back(g.aabb, support_levels(g.submesh));
            std::set<std::uint32_t> gone;
            while (!supports.empty()) {
                const auto [box, levels] = supports.front();
                supports.pop_front();
                for (const auto& [tag, name] : work.registry) {
                    if (gone.contains(tag)) continue;
                    const auto faces = faces_with_tag(mesh, tag);
                    if (std::all_of(faces.begin(), faces.end(), [&](std::size_t f) { return drop[f] != 0; })) continue;
                    const GroundedObject obj = grounded_from_tag(work, tag);
                    const double base_z = obj.aabb.min.z();
                    const bool rests = std::any_of(levels.begin(), levels.end(),
                                                   [&](double z) { return std::abs(base_z - z) <= cfg.cascade_epsilon; });
                    if (!rests || !obj.aabb.intersects_xy(box)) continue;
                    gone.insert(tag);
                    for (auto f : faces) drop[f] = 1;
                    supports.emplace_back(obj.aabb, support_levels(obj.submesh));
                }
            }
        }
        for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
            if (drop[f] && mesh.tag_of(f) != kUntagged) removed_tags.push_back(mesh.tag_of(f));
        }
        std::sort(removed_tags.begin(), removed_tags.end());
        removed_tags.erase(std::unique(removed_tags.begin(), removed_tags.end()), removed_tags.end());

        fault("inpaint");
        const double median = median_edge_length(mesh);
        std::unordered_map<std::uint64_t, int> old_count;
        auto key = [](std::uint32_t a, std::uint32_t b) {
            if (a > b) std::swap(a, b);
            return (static_cast<std::uint64_t>(a) << 32) | b;
        };
        for (const auto& t : mesh.faces) {
            for (int i = 0; i < 3; ++i) ++old_count[key(t[i], t[(i + 1) % 3])];
        }
        const auto vertex_map = remove_scene_faces(work, drop);
        std::vector<std::uint32_t> to_old(work.mesh.vertices.size());
        for (std::size_t v = 0; v < vertex_map.size(); ++v) {
            if (vertex_map[v] >= 0) to_old[static_cast<std::size_t>(vertex_map[v])] = static_cast<std::uint32_t>(v);
        }

        // Only holes the removal opened are filled; pre-existing scan holes stay.
        std::vector<BoundaryLoop> loops;
        for (auto& loop : boundary_loops(work.mesh)) {
            bool opened = false;
            for (std::size_t i = 0; i < loop.size() && !opened; ++i) {
                opened = old_count[key(to_old[loop[i]], to_old[loop[(i + 1) % loop.size()]])] >= 2;
            }
            if (opened) loops.push_back(std::move(loop));
        }
        const std::size_t before = work.mesh.vertices.size();
        InpaintReport report = fill_loops(work.mesh, loops, cfg.subdivision_factor * median);

        if (work.annotations && work.mesh.vertices.size() > before) {
            KdTree<3> tree(std::vector<Vec3>(work.mesh.vertices.begin(), work.mesh.vertices.begin() + static_cast<std::ptrdiff_t>(before)));
            for (std::size_t v = before; v < work.mesh.vertices.size(); ++v) {
                const auto nn = tree.knn(work.mesh.vertices[v], 1);
                const std::size_t src = nn.empty() ? 0 : nn.front();
                work.annotations->labels.push_back(nn.empty() ? std::string("unknown") : work.annotations->labels[src]);
                work.annotations->instance_ids.push_back(nn.empty() ? -1 : work.annotations->instance_ids[src]);
            }
        }
        return report;
    }
};

void check_kind(const EditTask& task, EditKind kind) {
    if (task.kind != kind) {
        throw Error(ErrorCode::kInvalidTask, "expected a " + std::string(to_string(kind)) + " task, got " + std::string(to_string(task.kind)));
    }
}

json task_entry(const char* op, const EditTask& task) {
    json t = to_json(task);
    if (!task.raw_prompt.empty()) t["prompt"] = task.raw_prompt;
    return {{"op", op}, {"task", std::move(t)}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Session

EditSession::EditSession(std::string id, Scene initial, EditConfig config)
    : id_(std::move(id)), initial_(std::move(initial)), scene_(initial_), config_(std::move(config)) {
    config_.filter.validate();
    validate_scene(initial_);
}

void EditSession::fault(std::string_view stage) const {
    if (config_.fault_hook) config_.fault_hook(stage);
}

void EditSession::log(json entry) {
    json next = op_log_;
    next.push_back(std::move(entry));
    if (persist_dir_) write_file(*persist_dir_ / "op_log.json", next.dump(1));
    op_log_ = std::move(next);
}

void EditSession::commit(Scene next, json entry, EditOutcome& outcome) {
    fault("commit");
    validate_scene(next);
    log(std::move(entry));
    history_.push_back(std::move(scene_));
    scene_ = std::move(next);
    outcome.scene_hash = scene_hash(scene_);
    if (!outcome.placements.empty()) last_placements_ = outcome.placements;
}

std::uint32_t EditSession::resolve_tag(std::string_view name_or_id) const {
    std::uint32_t id = 0;
    const auto* end = name_or_id.data() + name_or_id.size();
    if (auto [p, ec] = std::from_chars(name_or_id.data(), end, id); ec == std::errc() && p == end) {
        if (scene_.registry.contains(id)) return id;
    }
    if (auto t = find_tag(scene_, name_or_id)) return *t;
    throw Error(ErrorCode::kUnknownTag, "no placed object '" + std::string(name_or_id) + "'");
}

EditOutcome EditSession::apply_prompt(std::string_view prompt) {
    return apply_task(classify_and_extract(prompt, config_.nlp, config_.backends.language_model.get()));
}

EditOutcome EditSession::apply_task(const EditTask& task, const std::optional<TriangleMesh>& provided_mesh) {
    switch (task.kind) {
        case EditKind::kInsert: return insert(task);
        case EditKind::kReplace: return replace(task, provided_mesh);
        case EditKind::kDelete: return remove(task);
    }
    throw Error(ErrorCode::kInvalidTask, "unknown task kind");
}

EditOutcome EditSession::insert(const EditTask& raw) {
    const EditTask task = validate_task(raw);
    check_kind(task, EditKind::kInsert);
    const Pipeline pipe{config_, [this](std::string_view s) { fault(s); }};
    EditOutcome out;
    out.operation = "insert";
    out.task = task;
    Scene work = scene_;
    for (std::size_t i = 0; i < task.primary_entities.size(); ++i) {
        Scene next = work;
        try {
            out.placements.push_back(pipe.insert_one(next, task.primary_entities[i], task.grounding_entity, out.warnings));
        } catch (const Error& e) {
            if (i == 0) throw;
            out.warnings.push_back("placed " + std::to_string(i) + " of " + std::to_string(task.primary_entities.size()) +
                                   " objects; stopped at '" + task.primary_entities[i] + "': " + e.what());
            break;
        }
        out.affected_tags.push_back(out.placements.back().tag);
        work = std::move(next);
    }
    commit(std::move(work), task_entry("insert", task), out);
    return out;
}

std::vector<EditOutcome> EditSession::insert_iterative(const EditTask& task) {
    const EditOutcome all = insert(task);
    std::vector<EditOutcome> out;
    for (const auto& p : all.placements) {
        EditOutcome one;
        one.operation = all.operation;
        one.task = all.task;
        one.placements = {p};
        one.affected_tags = {p.tag};
        one.scene_hash = all.scene_hash;
        out.push_back(std::move(one));
    }
    out.back().warnings = all.warnings;
    return out;
}

EditOutcome EditSession::remove(const EditTask& raw) {
    const EditTask task = validate_task(raw);
    check_kind(task, EditKind::kDelete);
    const Pipeline pipe{config_, [this](std::string_view s) { fault(s); }};
    EditOutcome out;
    out.operation = "delete";
    out.task = task;
    Scene work = scene_;
    fault("ground");
    const GroundedObject g = pipe.resolve(work, task.grounding_entity, out.warnings);
    out.inpaint = pipe.delete_object(work, g, true, out.affected_tags);
    out.warnings.insert(out.warnings.end(), out.inpaint->warnings.begin(), out.inpaint->warnings.end());
    commit(std::move(work), task_entry("delete", task), out);
    return out;
}

EditOutcome EditSession::replace(const EditTask& raw, const std::optional<TriangleMesh>& provided_input) {
    const EditTask task = validate_task(raw);
    // The log stores provided meshes as binary PLY; going through that
    // encoding here makes a replayed replace see exactly the same mesh.
    std::optional<TriangleMesh> provided_mesh;
    std::string provided_ply;
    if (provided_input) {
        validate_mesh(*provided_input);
        provided_ply = encode_ply(*provided_input, true);
        provided_mesh = parse_mesh(provided_ply, MeshFormat::kPly);
    }
    check_kind(task, EditKind::kReplace);
    const Pipeline pipe{config_, [this](std::string_view s) { fault(s); }};
    const FilterConfig& fc = config_.filter;
    EditOutcome out;
    out.operation = "replace";
    out.task = task;
    Scene work = scene_;

    fault("ground");
    const GroundedObject target = pipe.resolve(work, task.grounding_entity, out.warnings);
    const Aabb box = target.aabb;
    const Vec3 base = base_centroid(target.submesh, fc.base_fraction);
    out.inpaint = pipe.delete_object(work, target, false, out.affected_tags);
    out.warnings.insert(out.warnings.end(), out.inpaint->warnings.begin(), out.inpaint->warnings.end());

    fault("acquire");
    ObjectPlacement placement;
    TriangleMesh replacement;
    std::string label;
    if (provided_mesh) {
        if (provided_mesh->faces.empty()) throw Error(ErrorCode::kDegenerateGeometry, "provided replacement mesh has no faces");
        replacement = normalize_asset(*provided_mesh);
        replacement.vertex_normals.clear();
        placement.asset_source = "provided";
        label = task.primary_entities.empty() ? target.label : task.primary_entities.front();
    } else {
        // Without a named substitute, a similar object of the same category.
        label = task.primary_entities.empty() ? target.label : task.primary_entities.front();
        AssetRecord rec = pipe.acquire(label);
        out.warnings.insert(out.warnings.end(), rec.warnings.begin(), rec.warnings.end());
        replacement = std::move(rec.mesh);
        placement.asset_source = std::string(to_string(rec.source));
    }

    fault("scale");
    const Vec3 have = compute_aabb(replacement).extent();
    const Vec3 want = box.extent();
    double s = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (have[a] > 0.0 && want[a] > 0.0) s = std::min(s, want[a] / have[a]);
    }
    if (!std::isfinite(s)) throw Error(ErrorCode::kInvalidScale, "replacement or target has no extent to fit");
    replacement = normalize_asset(apply_transform(replacement, RigidTransform{0.0, Vec3::Zero(), s}));
    placement.scale.scale = placement.scale.raw_scale = s;

    fault("place");
    TriangleMesh placed = place_object(replacement, base, 0.0, fc.base_fraction);
    const Aabb got = compute_aabb(placed);
    Vec3 shift = Vec3::Zero();
    for (int a = 0; a < 3; ++a) {
        if (got.min[a] < box.min[a]) shift[a] = box.min[a] - got.min[a];
        else if (got.max[a] > box.max[a]) shift[a] = box.max[a] - got.max[a];
    }
    for (auto& v : placed.vertices) v += shift;
    placement.placement.location = base + shift;
    if (!work.mesh.faces.empty()) {
        const SignedDistanceField sdf(work.mesh);
        placement.placement.penetration_before = placement.placement.penetration_after =
            penetration_percent(placed, sdf, placement.placement.location.z(), fc.contact_epsilon).fraction;
    }

    fault("merge");
    placement.tag = add_object(work, placed, normalize_label(label));
    placement.name = work.registry.at(placement.tag);
    out.affected_tags.push_back(placement.tag);
    out.placements.push_back(std::move(placement));

    json entry = task_entry("replace", task);
    if (provided_mesh) entry["provided_mesh"] = base64_encode(provided_ply);
    commit(std::move(work), std::move(entry), out);
    return out;
}

EditOutcome EditSession::translate(std::uint32_t tag, const std::vector<Vec3>& points) {
    if (!scene_.registry.contains(tag)) throw Error(ErrorCode::kUnknownTag, "no placed object with tag " + std::to_string(tag));
    if (points.empty()) throw Error(ErrorCode::kInvalidTask, "translate needs at least one point");
    EditOutcome out;
    out.operation = "translate";
    Scene work = scene_;
    fault("ground");
    const auto verts = tag_vertices(work, tag);
    const TriangleMesh object = extract_submesh(work.mesh, verts);
    const Vec3 base = base_centroid(object, config_.filter.base_fraction);

    Vec3 target = Vec3::Zero();
    for (const auto& p : points) target += p;
    target /= static_cast<double>(points.size());
    fault("place");
    // Support height under the target, ignoring the object being moved.
    const TriangleMesh rest = remove_tag(work.mesh, tag);
    if (!rest.faces.empty()) {
        const SignedDistanceField sdf(rest);
        const double probe = 0.01;
        if (auto hit = sdf.raycast(Vec3(target.x(), target.y(), target.z() + probe), -Vec3::UnitZ())) target.z() = hit->point.z();
    }
    const Vec3 delta = target - base;
    for (auto v : verts) work.mesh.vertices[v] += delta;
    out.affected_tags = {tag};

    json pts = json::array();
    for (const auto& p : points) pts.push_back(vec_json(p));
    commit(std::move(work), {{"op", "translate"}, {"tag", tag}, {"points", std::move(pts)}}, out);
    return out;
}

EditOutcome EditSession::rotate(std::uint32_t tag, double angle, RotationDirection direction) {
    if (!scene_.registry.contains(tag)) throw Error(ErrorCode::kUnknownTag, "no placed object with tag " + std::to_string(tag));
    if (!std::isfinite(angle)) throw Error(ErrorCode::kInvalidTask, "rotation angle must be finite");
    EditOutcome out;
    out.operation = "rotate";
    Scene work = scene_;
    fault("ground");
    const auto verts = tag_vertices(work, tag);
    const Vec3 base = base_centroid(extract_submesh(work.mesh, verts), config_.filter.base_fraction);
    const double theta = direction == RotationDirection::kCounterClockwise ? angle : -angle;
    const double c = std::cos(theta), s = std::sin(theta);
    fault("place");
    for (auto v : verts) {
        Vec3& p = work.mesh.vertices[v];
        const double x = p.x() - base.x(), y = p.y() - base.y();
        p.x() = base.x() + c * x - s * y;
        p.y() = base.y() + s * x + c * y;
        if (work.mesh.has_normals()) {
            Vec3& n = work.mesh.vertex_normals[v];
            n = Vec3(c * n.x() - s * n.y(), s * n.x() + c * n.y(), n.z());
        }
    }
    out.affected_tags = {tag};
    commit(std::move(work),
           {{"op", "rotate"},
            {"tag", tag},
            {"angle", angle},
            {"direction", direction == RotationDirection::kClockwise ? "cw" : "ccw"}},
           out);
    return out;
}

EditOutcome EditSession::undo() {
    if (history_.empty()) throw Error(ErrorCode::kEmptyHistory, "nothing to undo");
    fault("commit");
    log({{"op", "undo"}});
    scene_ = std::move(history_.back());
    history_.pop_back();
    EditOutcome out;
    out.operation = "undo";
    out.scene_hash = scene_hash(scene_);
    return out;
}

void EditSession::persist_to(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create session directory " + dir.string() + ": " + ec.message());
    write_file(dir / "initial_scene.json", scene_to_json(initial_).dump());
    write_file(dir / "op_log.json", op_log_.dump(1));
    persist_dir_ = dir;
}

EditOutcome EditSession::replay_entry(const json& entry) {
    const std::string op = entry.at("op").get<std::string>();
    if (op == "undo") return undo();
    if (op == "translate") {
        std::vector<Vec3> pts;
        for (const auto& p : entry.at("points")) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
        return translate(entry.at("tag").get<std::uint32_t>(), pts);
    }
    if (op == "rotate") {
        return rotate(entry.at("tag").get<std::uint32_t>(), entry.at("angle").get<double>(),
                      parse_direction(entry.at("direction").get<std::string>()));
    }
    const EditTask task = task_from_json(entry.at("task"));
    if (op == "insert") return insert(task);
    if (op == "delete") return remove(task);
    if (op == "replace") {
        std::optional<TriangleMesh> provided;
        if (entry.contains("provided_mesh")) provided = parse_mesh(base64_decode(entry["provided_mesh"].get<std::string>()), MeshFormat::kPly);
        return replace(task, provided);
    }
    throw Error(ErrorCode::kParseError, "unknown op '" + op + "' in session log");
}

EditSession EditSession::replay(const std::filesystem::path& dir, EditConfig config) {
    const json initial = json::parse(read_file(dir / "initial_scene.json"), nullptr, false);
    const json log = json::parse(read_file(dir / "op_log.json"), nullptr, false);
    if (initial.is_discarded() || log.is_discarded() || !log.is_array()) {
        throw Error(ErrorCode::kParseError, "session directory does not hold a readable scene and log: " + dir.string());
    }
    EditSession session(dir.filename().string(), scene_from_json(initial), std::move(config));
    try {
        for (const auto& entry : log) session.replay_entry(entry);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kParseError, std::string("session log: ") + e.what());
    }
    session.persist_dir_ = dir;
    return session;
}

}  // namespace scenedit
