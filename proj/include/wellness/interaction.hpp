#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "wellness/errors.hpp"
#include "wellness/events.hpp"
#include "wellness/facial.hpp"

namespace wellness {

enum class HoiAction { sit_on, watch, eat_at, drink_with };

inline const char* to_string(HoiAction a) {
    switch (a) {
        case HoiAction::sit_on: return "sit_on";
        case HoiAction::watch: return "watch";
        case HoiAction::eat_at: return "eat_at";
        default: return "drink_with";
    }
}

inline std::optional<HoiAction> hoi_action_from_string(const std::string& s) {
    if (s == "sit_on") return HoiAction::sit_on;
    if (s == "watch") return HoiAction::watch;
    if (s == "eat_at") return HoiAction::eat_at;
    if (s == "drink_with") return HoiAction::drink_with;
    return std::nullopt;
}

struct HoiCandidate {
    std::string person_id;
    std::string object_id;
    HoiAction action = HoiAction::sit_on;
    std::uint64_t start_frame = 0;
    std::uint64_t end_frame = 0;
    double s_h = 0.0;    // human branch
    double s_o = 0.0;    // object branch
    double s_h_a = 0.0;  // human-action branch
    double s_ho_a = 0.0; // interaction branch
};

// Four-way product fusion of the branch scores.
inline double hoi_score(const HoiCandidate& c) { return c.s_h * c.s_o * c.s_h_a * c.s_ho_a; }

enum class NodeKind { person, object };

struct SceneNode {
    std::string node_id;
    NodeKind kind = NodeKind::person;
    std::string category;            // role name or object category
    std::set<std::string> attributes; // activity names active in the window
};

struct SceneEdge {
    std::string src;
    std::string dst;
    std::string relation;
    double weight = 0.0;
    std::uint64_t start_frame = 0;
    std::uint64_t end_frame = 0;
};

struct SceneGraph {
    std::uint64_t window_start = 0;
    std::uint64_t window_end = 0;
    std::map<std::string, SceneNode> nodes;
    std::vector<SceneEdge> edges;
};

struct RelationshipSummary {
    std::string person_a; // lexicographically smaller id
    std::string person_b;
    double average_talk_seconds_per_day = 0.0;
    bool is_close = false;
};

// Relation weights for the wellness node feature; talking dominates.
struct RelationWeights {
    std::map<std::string, double> weights = {
        {"talking_to", 1.0}, {"sit_on", 0.1}, {"watch", 0.2}, {"eat_at", 0.2}, {"drink_with", 0.2},
    };

    double weight_for(const std::string& relation) const {
        auto it = weights.find(relation);
        return it == weights.end() ? 0.0 : it->second;
    }
};

// Builds the scene graph for one frame window. Node set is exactly the union
// of ids referenced by accepted inputs: HOI candidates contribute
// person->object edges, activity intervals contribute person attributes, and
// (speaker, active_listener) pairs found frame-by-frame contribute directed
// talking_to edges weighted by their window-overlap fraction.
inline SceneGraph build_scene_graph(std::span<const FrameEvent> frames,
                                    const std::vector<ActivityInterval>& intervals,
                                    const std::vector<HoiCandidate>& accepted_hoi) {
    SceneGraph graph;
    if (frames.empty()) return graph;
    graph.window_start = frames.front().frame_index;
    graph.window_end = frames.back().frame_index;

    std::map<std::string, Role> person_roles;
    std::map<std::string, std::string> object_cats;
    for (const auto& frame : frames) {
        for (const auto& person : frame.persons) person_roles.emplace(person.person_id, person.role);
        for (const auto& obj : frame.objects) object_cats.emplace(obj.object_id, obj.category_name());
    }

    auto ensure_person = [&](const std::string& id) -> SceneNode& {
        auto role_it = person_roles.find(id);
        if (role_it == person_roles.end()) throw DanglingReference(id);
        auto [it, inserted] = graph.nodes.try_emplace(id);
        if (inserted) {
            it->second.node_id = id;
            it->second.kind = NodeKind::person;
            it->second.category = to_string(role_it->second);
        }
        return it->second;
    };
    auto ensure_object = [&](const std::string& id) -> SceneNode& {
        auto cat_it = object_cats.find(id);
        if (cat_it == object_cats.end()) throw DanglingReference(id);
        auto [it, inserted] = graph.nodes.try_emplace(id);
        if (inserted) {
            it->second.node_id = id;
            it->second.kind = NodeKind::object;
            it->second.category = cat_it->second;
        }
        return it->second;
    };

    for (const auto& c : accepted_hoi) {
        ensure_person(c.person_id);
        ensure_object(c.object_id);
        SceneEdge e;
        e.src = c.person_id;
        e.dst = c.object_id;
        e.relation = to_string(c.action);
        e.weight = hoi_score(c);
        e.start_frame = std::max(c.start_frame, graph.window_start);
        e.end_frame = std::min(c.end_frame, graph.window_end);
        graph.edges.push_back(std::move(e));
    }

    std::map<std::uint64_t, std::set<std::string>> speakers_by_frame;
    for (const auto& iv : intervals) {
        if (iv.end_frame < graph.window_start || iv.start_frame > graph.window_end) continue;
        ensure_person(iv.person_id).attributes.insert(to_string(iv.activity));
        if (iv.activity == Activity::talk_speaker) {
            const std::uint64_t lo = std::max(iv.start_frame, graph.window_start);
            const std::uint64_t hi = std::min(iv.end_frame, graph.window_end);
            for (std::uint64_t f = lo; f <= hi; ++f) speakers_by_frame[f].insert(iv.person_id);
        }
    }

    // (speaker, listener) -> frames active in this window
    std::map<std::pair<std::string, std::string>, std::uint64_t> pair_frames;
    for (const auto& frame : frames) {
        auto it = speakers_by_frame.find(frame.frame_index);
        if (it == speakers_by_frame.end()) continue;
        for (const auto& [speaker, listener] : talking_pairs(frame, it->second))
            ++pair_frames[{speaker, listener}];
    }
    const double window_frames = static_cast<double>(frames.size());
    for (const auto& [pair, count] : pair_frames) {
        ensure_person(pair.first);
        ensure_person(pair.second);
        SceneEdge e;
        e.src = pair.first;
        e.dst = pair.second;
        e.relation = "talking_to";
        e.weight = clamp01(static_cast<double>(count) / window_frames);
        e.start_frame = graph.window_start;
        e.end_frame = graph.window_end;
        graph.edges.push_back(std::move(e));
    }

    std::sort(graph.edges.begin(), graph.edges.end(), [](const SceneEdge& a, const SceneEdge& b) {
        return std::tie(a.src, a.dst, a.relation, a.start_frame) <
               std::tie(b.src, b.dst, b.relation, b.start_frame);
    });
    return graph;
}

// Mines close relationships from per-day directed talking durations. The two
// directions of a pair are summed; the average divides by the number of
// observed days, so silent days count against the pair.
inline std::vector<RelationshipSummary> close_relationships(
    const std::vector<std::map<std::pair<std::string, std::string>, double>>& talk_seconds_by_day,
    double t_th_seconds) {
    const std::size_t days = talk_seconds_by_day.size();
    std::map<std::pair<std::string, std::string>, double> totals;
    for (const auto& day : talk_seconds_by_day) {
        for (const auto& [pair, seconds] : day) {
            auto key = pair.first < pair.second ? pair : std::make_pair(pair.second, pair.first);
            totals[key] += seconds;
        }
    }
    std::vector<RelationshipSummary> out;
    for (const auto& [pair, total] : totals) {
        RelationshipSummary r;
        r.person_a = pair.first;
        r.person_b = pair.second;
        r.average_talk_seconds_per_day = days > 0 ? total / static_cast<double>(days) : 0.0;
        r.is_close = r.average_talk_seconds_per_day > t_th_seconds;
        out.push_back(std::move(r));
    }
    return out;
}

// Mental-wellness node feature: relation-weighted sum over all edges
// incident to the person.
inline double wellness_feature(const SceneGraph& graph, const std::string& person_id,
                               const RelationWeights& weights) {
    auto it = graph.nodes.find(person_id);
    if (it == graph.nodes.end() || it->second.kind != NodeKind::person)
        throw PersonNotFound(person_id);
    double sum = 0.0;
    for (const auto& e : graph.edges) {
        if (e.src != person_id && e.dst != person_id) continue;
        sum += weights.weight_for(e.relation) * e.weight;
    }
    return sum;
}

} // namespace wellness
