#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wellness/errors.hpp"
#include "wellness/geometry.hpp"

namespace wellness {

inline constexpr int kLandmarkCount = 68;
// iBUG indices used by the facial rules.
inline constexpr int kUpperLip = 62;
inline constexpr int kLowerLip = 66;
inline constexpr std::array<int, 4> kUpperEyelid = {37, 38, 43, 44};
inline constexpr std::array<int, 4> kLowerEyelid = {40, 41, 46, 47};

enum class Role { senior, caregiver, unknown };

inline const char* to_string(Role r) {
    switch (r) {
        case Role::senior: return "senior";
        case Role::caregiver: return "caregiver";
        default: return "unknown";
    }
}

inline std::optional<Role> role_from_string(const std::string& s) {
    if (s == "senior") return Role::senior;
    if (s == "caregiver") return Role::caregiver;
    if (s == "unknown") return Role::unknown;
    return std::nullopt;
}

struct FaceObservation {
    BBox face_box;
    std::array<Point, kLandmarkCount> landmarks{};
    std::optional<std::string> assigned_person;
};

struct Joint {
    Point p;
    double confidence = 0.0;
};

struct PoseObservation {
    std::map<std::string, Joint> joints;

    const Joint* find(const std::string& name) const {
        auto it = joints.find(name);
        return it == joints.end() ? nullptr : &it->second;
    }
};

struct PersonObservation {
    std::string person_id;
    BBox person_box;
    Role role = Role::unknown;
    std::optional<FaceObservation> face;
    std::optional<PoseObservation> pose;
    std::optional<Point> gaze;
};

enum class ObjectCategory { chair, tv, table, bottle, cup, other };

struct ObjectDetection {
    std::string object_id;
    ObjectCategory category = ObjectCategory::other;
    std::string other_label; // set when category == other
    BBox box;
    double score = 0.0;

    std::string category_name() const {
        switch (category) {
            case ObjectCategory::chair: return "chair";
            case ObjectCategory::tv: return "tv";
            case ObjectCategory::table: return "table";
            case ObjectCategory::bottle: return "bottle";
            case ObjectCategory::cup: return "cup";
            default: return other_label.empty() ? "other" : other_label;
        }
    }

    static ObjectDetection with_category(std::string id, const std::string& cat, BBox box, double score) {
        ObjectDetection d;
        d.object_id = std::move(id);
        d.box = box;
        d.score = score;
        if (cat == "chair") d.category = ObjectCategory::chair;
        else if (cat == "tv") d.category = ObjectCategory::tv;
        else if (cat == "table") d.category = ObjectCategory::table;
        else if (cat == "bottle") d.category = ObjectCategory::bottle;
        else if (cat == "cup") d.category = ObjectCategory::cup;
        else { d.category = ObjectCategory::other; d.other_label = cat; }
        return d;
    }
};

struct FrameEvent {
    std::uint64_t frame_index = 0;
    std::uint64_t timestamp_ms = 0;
    std::string camera_id;
    std::vector<PersonObservation> persons;
    std::vector<ObjectDetection> objects;
};

// Single-frame validation; returns a reason string on the first violated
// invariant, empty optional when the frame is well formed. Cross-frame
// monotonicity is the stream parser's job.
inline std::optional<std::string> validate_frame(const FrameEvent& frame) {
    std::vector<const std::string*> ids;
    ids.reserve(frame.persons.size());
    for (const auto& person : frame.persons) {
        if (person.person_id.empty()) return "person with empty id";
        for (const auto* seen : ids) {
            if (*seen == person.person_id) return "duplicate person_id '" + person.person_id + "'";
        }
        ids.push_back(&person.person_id);
        if (!person.person_box.valid()) return "invalid person box for '" + person.person_id + "'";
        if (person.face && !person.face->face_box.valid())
            return "invalid face box for '" + person.person_id + "'";
        if (person.gaze) {
            const double n = norm(*person.gaze);
            if (std::abs(n - 1.0) > 1e-6)
                return "gaze for '" + person.person_id + "' is not a unit vector";
        }
        if (person.pose) {
            for (const auto& [name, joint] : person.pose->joints) {
                if (joint.confidence < 0.0 || joint.confidence > 1.0)
                    return "joint '" + name + "' confidence outside [0,1]";
            }
        }
    }
    for (const auto& obj : frame.objects) {
        if (obj.object_id.empty()) return "object with empty id";
        if (!obj.box.valid()) return "invalid object box for '" + obj.object_id + "'";
        if (obj.score < 0.0 || obj.score > 1.0)
            return "object score outside [0,1] for '" + obj.object_id + "'";
    }
    return std::nullopt;
}

// Pairs every face with the person whose box maximizes IoU with the face box.
// Greedy over all (face, person) pairs in descending IoU so the assignment is
// injective; ties break toward the lexicographically smaller person_id, then
// the lower face index. Faces with zero IoU everywhere stay unassigned.
inline FrameEvent associate_faces(FrameEvent frame) {
    struct Candidate {
        double iou_value;
        std::size_t face_idx;   // index into persons that carries the face
        std::size_t person_idx; // candidate owner
    };
    std::vector<Candidate> candidates;
    for (std::size_t f = 0; f < frame.persons.size(); ++f) {
        if (!frame.persons[f].face) continue;
        frame.persons[f].face->assigned_person.reset();
        for (std::size_t p = 0; p < frame.persons.size(); ++p) {
            const double v = iou(frame.persons[f].face->face_box, frame.persons[p].person_box);
            if (v > 0.0) candidates.push_back({v, f, p});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
        if (a.iou_value != b.iou_value) return a.iou_value > b.iou_value;
        const std::string& pa = frame.persons[a.person_idx].person_id;
        const std::string& pb = frame.persons[b.person_idx].person_id;
        if (pa != pb) return pa < pb;
        return a.face_idx < b.face_idx;
    });
    std::vector<bool> face_taken(frame.persons.size(), false);
    std::vector<bool> person_taken(frame.persons.size(), false);
    for (const auto& c : candidates) {
        if (face_taken[c.face_idx] || person_taken[c.person_idx]) continue;
        face_taken[c.face_idx] = true;
        person_taken[c.person_idx] = true;
        frame.persons[c.face_idx].face->assigned_person = frame.persons[c.person_idx].person_id;
    }
    return frame;
}

// Mean Euclidean distance between two landmark trajectories over a window of
// W frames centered at index i, truncated at the series boundaries. Frames
// where either point is missing are excluded; absent when nothing remains.
inline std::optional<double> windowed_distance(const std::vector<std::optional<Point>>& p1_series,
                                               const std::vector<std::optional<Point>>& p2_series,
                                               int window, std::ptrdiff_t i) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(std::min(p1_series.size(), p2_series.size()));
    const std::ptrdiff_t half = window / 2;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min(n - 1, i + half);
    double sum = 0.0;
    int count = 0;
    for (std::ptrdiff_t k = lo; k <= hi; ++k) {
        if (!p1_series[k] || !p2_series[k]) continue;
        sum += distance(*p1_series[k], *p2_series[k]);
        ++count;
    }
    if (count == 0) return std::nullopt;
    return sum / count;
}

struct WindowStats {
    double mean = 0.0;
    double stddev = 0.0; // population form
    int count = 0;
};

// Windowed mean and population stddev of a scalar series with gaps, same
// window convention as windowed_distance.
inline std::optional<WindowStats> windowed_stats(const std::vector<std::optional<double>>& series,
                                                 int window, std::ptrdiff_t i) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(series.size());
    const std::ptrdiff_t half = window / 2;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min(n - 1, i + half);
    double sum = 0.0;
    int count = 0;
    for (std::ptrdiff_t k = lo; k <= hi; ++k) {
        if (!series[k]) continue;
        sum += *series[k];
        ++count;
    }
    if (count == 0) return std::nullopt;
    const double mean = sum / count;
    double var = 0.0;
    for (std::ptrdiff_t k = lo; k <= hi; ++k) {
        if (!series[k]) continue;
        var += (*series[k] - mean) * (*series[k] - mean);
    }
    return WindowStats{mean, std::sqrt(var / count), count};
}

} // namespace wellness
