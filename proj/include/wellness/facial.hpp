#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wellness/events.hpp"

namespace wellness {

enum class Activity {
    yawn,
    blink,
    nap,
    talk_speaker,
    talk_listener,
    sit_on_chair,
    watch_tv,
    eating,
    drinking,
    exercise,
};

inline const char* to_string(Activity a) {
    switch (a) {
        case Activity::yawn: return "yawn";
        case Activity::blink: return "blink";
        case Activity::nap: return "nap";
        case Activity::talk_speaker: return "talk_speaker";
        case Activity::talk_listener: return "talk_listener";
        case Activity::sit_on_chair: return "sit_on_chair";
        case Activity::watch_tv: return "watch_tv";
        case Activity::eating: return "eating";
        case Activity::drinking: return "drinking";
        default: return "exercise";
    }
}

inline std::optional<Activity> activity_from_string(const std::string& s) {
    static const std::map<std::string, Activity> table = {
        {"yawn", Activity::yawn},
        {"blink", Activity::blink},
        {"nap", Activity::nap},
        {"talk_speaker", Activity::talk_speaker},
        {"talk_listener", Activity::talk_listener},
        {"sit_on_chair", Activity::sit_on_chair},
        {"watch_tv", Activity::watch_tv},
        {"eating", Activity::eating},
        {"drinking", Activity::drinking},
        {"exercise", Activity::exercise},
    };
    auto it = table.find(s);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

struct ActivityInterval {
    std::string person_id;
    Activity activity = Activity::yawn;
    std::uint64_t start_frame = 0;
    std::uint64_t end_frame = 0; // inclusive
    double confidence = 0.0;

    std::uint64_t duration_frames() const { return end_frame - start_frame + 1; }
};

struct PersonThresholds {
    double d_thrl = 0.0; // lip-gap threshold, pixels
    double d_thre = 0.0; // eye-gap threshold, pixels
};

struct FacialThresholds {
    double d_thrl = 10.0;
    double d_thre = 6.0;
    int f_thr = 75;           // closure duration boundary between blink and nap, frames
    int window = 5;           // W for the windowed distance
    double talk_std_thr = 1.5; // lip-gap oscillation threshold, pixels
    int min_yawn_frames = 10;
    int min_talk_frames = 10;
    std::map<std::string, PersonThresholds> per_person_overrides;

    PersonThresholds for_person(const std::string& person_id) const {
        auto it = per_person_overrides.find(person_id);
        if (it != per_person_overrides.end()) return it->second;
        return {d_thrl, d_thre};
    }
};

enum class TalkRole { speaker, active_listener, inactive_bystander };

inline const char* to_string(TalkRole r) {
    switch (r) {
        case TalkRole::speaker: return "speaker";
        case TalkRole::active_listener: return "active_listener";
        default: return "inactive_bystander";
    }
}

struct SpeakerRole {
    std::string person_id;
    TalkRole role = TalkRole::inactive_bystander;
    std::uint64_t frame_index = 0;
};

// One person's face track: the face observation (if any) per frame of a
// contiguous frame range starting at first_frame.
struct FaceTrack {
    std::string person_id;
    std::uint64_t first_frame = 0;
    std::vector<std::optional<FaceObservation>> faces;
};

namespace detail {

inline std::optional<Point> lip_upper(const std::optional<FaceObservation>& f) {
    if (!f) return std::nullopt;
    return f->landmarks[kUpperLip];
}

inline std::optional<Point> lip_lower(const std::optional<FaceObservation>& f) {
    if (!f) return std::nullopt;
    return f->landmarks[kLowerLip];
}

inline std::optional<Point> eyelid_mean(const std::optional<FaceObservation>& f,
                                        const std::array<int, 4>& indices) {
    if (!f) return std::nullopt;
    Point acc{0.0, 0.0};
    for (int idx : indices) acc = acc + f->landmarks[idx];
    return acc * 0.25;
}

// Per-frame gap series between two landmark trajectories.
inline std::vector<std::optional<double>> gap_series(const FaceTrack& track, bool lips) {
    std::vector<std::optional<Point>> a(track.faces.size()), b(track.faces.size());
    for (std::size_t i = 0; i < track.faces.size(); ++i) {
        if (lips) {
            a[i] = lip_upper(track.faces[i]);
            b[i] = lip_lower(track.faces[i]);
        } else {
            a[i] = eyelid_mean(track.faces[i], kUpperEyelid);
            b[i] = eyelid_mean(track.faces[i], kLowerEyelid);
        }
    }
    std::vector<std::optional<double>> gaps(track.faces.size());
    for (std::size_t i = 0; i < track.faces.size(); ++i) {
        if (a[i] && b[i]) gaps[i] = distance(*a[i], *b[i]);
    }
    return gaps;
}

inline std::vector<std::optional<double>> smoothed(const std::vector<std::optional<double>>& gaps,
                                                   int window) {
    std::vector<std::optional<double>> out(gaps.size());
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (auto s = windowed_stats(gaps, window, static_cast<std::ptrdiff_t>(i))) out[i] = s->mean;
    }
    return out;
}

// Collects maximal runs of `active` frames into intervals; confidence is the
// clamped mean of the per-frame margin values over the run.
template <typename MarginFn>
inline std::vector<ActivityInterval> collect_runs(const FaceTrack& track,
                                                  const std::vector<bool>& active,
                                                  Activity activity, std::uint64_t min_frames,
                                                  MarginFn margin) {
    std::vector<ActivityInterval> out;
    std::size_t i = 0;
    while (i < active.size()) {
        if (!active[i]) { ++i; continue; }
        std::size_t j = i;
        double margin_sum = 0.0;
        while (j < active.size() && active[j]) {
            margin_sum += margin(j);
            ++j;
        }
        const std::uint64_t len = static_cast<std::uint64_t>(j - i);
        if (len >= min_frames) {
            ActivityInterval iv;
            iv.person_id = track.person_id;
            iv.activity = activity;
            iv.start_frame = track.first_frame + i;
            iv.end_frame = track.first_frame + j - 1;
            iv.confidence = clamp01(margin_sum / static_cast<double>(len));
            out.push_back(std::move(iv));
        }
        i = j;
    }
    return out;
}

} // namespace detail

// Yawning: maximal runs where the windowed inner-lip gap exceeds d_thrl.
// Runs shorter than min_yawn_frames are speech artifacts and dropped.
inline std::vector<ActivityInterval> detect_yawns(const FaceTrack& track,
                                                  const FacialThresholds& thr) {
    const auto pt = thr.for_person(track.person_id);
    const auto gaps = detail::gap_series(track, /*lips=*/true);
    const auto smooth = detail::smoothed(gaps, thr.window);
    std::vector<bool> active(smooth.size(), false);
    for (std::size_t i = 0; i < smooth.size(); ++i)
        active[i] = track.faces[i].has_value() && smooth[i] && *smooth[i] > pt.d_thrl;
    return detail::collect_runs(track, active, Activity::yawn,
                                static_cast<std::uint64_t>(std::max(1, thr.min_yawn_frames)),
                                [&](std::size_t i) { return (*smooth[i] - pt.d_thrl) / pt.d_thrl; });
}

// Eye closures: maximal runs where the windowed eyelid gap is below d_thre,
// labeled nap when the closure lasts more than f_thr frames, blink otherwise.
inline std::vector<ActivityInterval> detect_eye_closures(const FaceTrack& track,
                                                         const FacialThresholds& thr) {
    const auto pt = thr.for_person(track.person_id);
    const auto gaps = detail::gap_series(track, /*lips=*/false);
    const auto smooth = detail::smoothed(gaps, thr.window);
    std::vector<bool> active(smooth.size(), false);
    for (std::size_t i = 0; i < smooth.size(); ++i)
        active[i] = track.faces[i].has_value() && smooth[i] && *smooth[i] < pt.d_thre;
    auto intervals = detail::collect_runs(track, active, Activity::blink, 1,
                                          [&](std::size_t i) { return (pt.d_thre - *smooth[i]) / pt.d_thre; });
    for (auto& iv : intervals) {
        if (iv.duration_frames() > static_cast<std::uint64_t>(thr.f_thr)) iv.activity = Activity::nap;
    }
    return intervals;
}

// Speaking, stage one of the two-stage talking rule: the lip gap oscillates
// (windowed stddev above talk_std_thr) while its windowed mean stays below
// the yawn threshold.
inline std::vector<ActivityInterval> detect_speaking(const FaceTrack& track,
                                                     const FacialThresholds& thr) {
    const auto pt = thr.for_person(track.person_id);
    const auto gaps = detail::gap_series(track, /*lips=*/true);
    std::vector<std::optional<WindowStats>> stats(gaps.size());
    for (std::size_t i = 0; i < gaps.size(); ++i)
        stats[i] = windowed_stats(gaps, thr.window, static_cast<std::ptrdiff_t>(i));
    std::vector<bool> active(gaps.size(), false);
    for (std::size_t i = 0; i < gaps.size(); ++i)
        active[i] = track.faces[i].has_value() && stats[i] &&
                    stats[i]->stddev > thr.talk_std_thr && stats[i]->mean < pt.d_thrl;
    return detail::collect_runs(track, active, Activity::talk_speaker,
                                static_cast<std::uint64_t>(std::max(1, thr.min_talk_frames)),
                                [&](std::size_t i) {
                                    return (stats[i]->stddev - thr.talk_std_thr) / thr.talk_std_thr;
                                });
}

// Stage two: every non-speaker whose gaze ray (origin at own face-box center)
// passes through some speaker's face box is an active listener; everyone else
// not speaking is an inactive bystander. Exactly one role per person.
inline std::vector<SpeakerRole> classify_listeners(const FrameEvent& frame,
                                                   const std::set<std::string>& speakers) {
    std::vector<const PersonObservation*> speaker_obs;
    for (const auto& person : frame.persons) {
        if (speakers.count(person.person_id) && person.face) speaker_obs.push_back(&person);
    }
    std::vector<SpeakerRole> roles;
    roles.reserve(frame.persons.size());
    for (const auto& person : frame.persons) {
        SpeakerRole r;
        r.person_id = person.person_id;
        r.frame_index = frame.frame_index;
        if (speakers.count(person.person_id)) {
            r.role = TalkRole::speaker;
        } else if (person.gaze && person.face) {
            const Point origin = person.face->face_box.center();
            bool hit = false;
            for (const auto* sp : speaker_obs) {
                if (ray_intersects_box(origin, *person.gaze, sp->face->face_box)) { hit = true; break; }
            }
            r.role = hit ? TalkRole::active_listener : TalkRole::inactive_bystander;
        } else {
            r.role = TalkRole::inactive_bystander;
        }
        roles.push_back(std::move(r));
    }
    return roles;
}

// Directed (speaker, listener) pairs for one frame, the edge-level view that
// scene graphs and relationship mining consume.
inline std::vector<std::pair<std::string, std::string>> talking_pairs(
    const FrameEvent& frame, const std::set<std::string>& speakers) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::vector<const PersonObservation*> speaker_obs;
    for (const auto& person : frame.persons) {
        if (speakers.count(person.person_id) && person.face) speaker_obs.push_back(&person);
    }
    for (const auto& person : frame.persons) {
        if (speakers.count(person.person_id) || !person.gaze || !person.face) continue;
        const Point origin = person.face->face_box.center();
        for (const auto* sp : speaker_obs) {
            if (ray_intersects_box(origin, *person.gaze, sp->face->face_box))
                pairs.emplace_back(sp->person_id, person.person_id);
        }
    }
    return pairs;
}

} // namespace wellness
