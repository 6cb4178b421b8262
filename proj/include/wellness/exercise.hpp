#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wellness/errors.hpp"
#include "wellness/events.hpp"

namespace wellness {

enum class Side { left, right };

inline const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }

enum class ExerciseCategory { low_frequency, high_frequency, left_arm, right_arm };

inline const char* to_string(ExerciseCategory c) {
    switch (c) {
        case ExerciseCategory::low_frequency: return "low_frequency";
        case ExerciseCategory::high_frequency: return "high_frequency";
        case ExerciseCategory::left_arm: return "left_arm";
        default: return "right_arm";
    }
}

inline std::optional<ExerciseCategory> exercise_category_from_string(const std::string& s) {
    if (s == "low_frequency") return ExerciseCategory::low_frequency;
    if (s == "high_frequency") return ExerciseCategory::high_frequency;
    if (s == "left_arm") return ExerciseCategory::left_arm;
    if (s == "right_arm") return ExerciseCategory::right_arm;
    return std::nullopt;
}

struct EisWeights {
    double lambda_a = 1.0 / 3.0;
    double lambda_r = 1.0 / 3.0;
    double lambda_s = 1.0 / 3.0;
};

struct MetaFeatures {
    double f_angle = 0.0;
    double f_range = 0.0;
    double f_speed = 0.0;
};

struct EisSample {
    std::string person_id;
    std::uint64_t start_frame = 0;
    std::uint64_t end_frame = 0;
    Side side = Side::left;
    MetaFeatures meta;
    double f_eis = 0.0;
};

struct ExerciseSession {
    std::string session_id;
    ExerciseCategory category = ExerciseCategory::low_frequency;
    std::uint64_t start_frame = 0;
    std::uint64_t end_frame = 0;
    std::vector<std::string> participants;
};

struct EisParams {
    EisWeights weights;
    double range_norm = 2.0;     // wrist sweeps of this many torso widths saturate f_range
    int t_norm_frames = 12;      // reference time-to-peak for f_speed
    int window_frames = 50;      // sliding analysis window (50% overlap)
    double joint_conf_min = 0.3;
    std::string reference_person; // ratio-to-reference denominator
};

inline const char* shoulder_joint(Side s) { return s == Side::left ? "shoulder_l" : "shoulder_r"; }
inline const char* elbow_joint(Side s) { return s == Side::left ? "elbow_l" : "elbow_r"; }
inline const char* wrist_joint(Side s) { return s == Side::left ? "wrist_l" : "wrist_r"; }

// Angle between the shoulder->elbow and elbow->wrist vectors, in [0, pi].
// Absent when a joint is missing, below the confidence floor, or a vector is
// degenerate (< 1e-6 px).
inline std::optional<double> elbow_angle(const PoseObservation& pose, Side side,
                                         double joint_conf_min = 0.0) {
    const Joint* shoulder = pose.find(shoulder_joint(side));
    const Joint* elbow = pose.find(elbow_joint(side));
    const Joint* wrist = pose.find(wrist_joint(side));
    for (const Joint* j : {shoulder, elbow, wrist}) {
        if (!j || j->confidence < joint_conf_min) return std::nullopt;
    }
    const Point se = elbow->p - shoulder->p;
    const Point ew = wrist->p - elbow->p;
    const double n1 = norm(se);
    const double n2 = norm(ew);
    if (n1 < 1e-6 || n2 < 1e-6) return std::nullopt;
    const double c = std::clamp(dot(se, ew) / (n1 * n2), -1.0, 1.0);
    return std::acos(c);
}

// The three normalized meta-features of arm movement over one analysis
// window:
//   f_angle — elbow-angle excursion over the window, as a fraction of pi
//   f_range — largest pairwise wrist displacement, normalized by body scale
//             (median shoulder-to-shoulder distance) times range_norm
//   f_speed — how quickly the peak displacement was reached, t_norm/t_peak
//             capped at 1; zero displacement gives 0 by convention
inline MetaFeatures meta_features(const std::vector<std::optional<PoseObservation>>& track,
                                  Side side, const EisParams& params) {
    constexpr double kPi = 3.14159265358979323846;
    int valid_poses = 0;
    for (const auto& pose : track)
        if (pose) ++valid_poses;
    if (valid_poses < 2) throw InsufficientPose("meta_features needs >= 2 valid poses in window");

    MetaFeatures out;

    double angle_min = std::numeric_limits<double>::infinity();
    double angle_max = -std::numeric_limits<double>::infinity();
    int angle_count = 0;
    for (const auto& pose : track) {
        if (!pose) continue;
        if (auto a = elbow_angle(*pose, side, params.joint_conf_min)) {
            angle_min = std::min(angle_min, *a);
            angle_max = std::max(angle_max, *a);
            ++angle_count;
        }
    }
    if (angle_count >= 2) out.f_angle = clamp01((angle_max - angle_min) / kPi);

    std::vector<std::optional<Point>> wrists(track.size());
    std::vector<double> torso_widths;
    for (std::size_t i = 0; i < track.size(); ++i) {
        if (!track[i]) continue;
        const Joint* w = track[i]->find(wrist_joint(side));
        if (w && w->confidence >= params.joint_conf_min) wrists[i] = w->p;
        const Joint* sl = track[i]->find("shoulder_l");
        const Joint* sr = track[i]->find("shoulder_r");
        if (sl && sr && sl->confidence >= params.joint_conf_min && sr->confidence >= params.joint_conf_min)
            torso_widths.push_back(distance(sl->p, sr->p));
    }

    double max_disp = 0.0;
    std::size_t peak_index = 0;
    for (std::size_t i = 0; i < wrists.size(); ++i) {
        if (!wrists[i]) continue;
        for (std::size_t j = i + 1; j < wrists.size(); ++j) {
            if (!wrists[j]) continue;
            const double d = distance(*wrists[i], *wrists[j]);
            if (d > max_disp) { max_disp = d; peak_index = j; }
        }
    }

    double torso_scale = 0.0;
    if (!torso_widths.empty()) {
        std::sort(torso_widths.begin(), torso_widths.end());
        const std::size_t n = torso_widths.size();
        torso_scale = (n % 2 == 1) ? torso_widths[n / 2]
                                   : 0.5 * (torso_widths[n / 2 - 1] + torso_widths[n / 2]);
    }

    if (max_disp > 0.0 && torso_scale > 0.0)
        out.f_range = clamp01(max_disp / (params.range_norm * torso_scale));
    if (max_disp > 0.0 && peak_index > 0)
        out.f_speed = std::min(1.0, static_cast<double>(params.t_norm_frames) /
                                        static_cast<double>(peak_index));
    return out;
}

// Eq-style weighted combination of the meta-features.
inline double exercise_intensity(const MetaFeatures& meta, const EisWeights& w) {
    return w.lambda_a * meta.f_angle + w.lambda_r * meta.f_range + w.lambda_s * meta.f_speed;
}

struct PersonSessionStats {
    std::string person_id;
    double mean = 0.0;
    double stddev = 0.0; // population form
    std::size_t sample_count = 0;
    std::optional<double> ratio_to_reference;
};

// Per-person mean/stddev of f_eis over the samples falling inside the
// session span, plus each person's mean relative to the reference person's.
inline std::vector<PersonSessionStats> session_summary(const std::vector<EisSample>& samples,
                                                       const ExerciseSession& session,
                                                       const std::string& reference_person) {
    std::map<std::string, std::vector<double>> by_person;
    for (const auto& s : samples) {
        if (s.start_frame >= session.start_frame && s.end_frame <= session.end_frame)
            by_person[s.person_id].push_back(s.f_eis);
    }
    std::optional<double> ref_mean;
    if (auto it = by_person.find(reference_person); it != by_person.end()) {
        double sum = 0.0;
        for (double v : it->second) sum += v;
        ref_mean = sum / static_cast<double>(it->second.size());
    }
    std::vector<PersonSessionStats> out;
    for (const auto& [person, values] : by_person) {
        PersonSessionStats st;
        st.person_id = person;
        st.sample_count = values.size();
        double sum = 0.0;
        for (double v : values) sum += v;
        st.mean = sum / static_cast<double>(values.size());
        double var = 0.0;
        for (double v : values) var += (v - st.mean) * (v - st.mean);
        st.stddev = std::sqrt(var / static_cast<double>(values.size()));
        if (ref_mean && *ref_mean != 0.0) st.ratio_to_reference = st.mean / *ref_mean;
        out.push_back(std::move(st));
    }
    return out;
}

// Which arm(s) a session category scores.
inline std::vector<Side> sides_for_category(ExerciseCategory cat) {
    switch (cat) {
        case ExerciseCategory::left_arm: return {Side::left};
        case ExerciseCategory::right_arm: return {Side::right};
        default: return {Side::left, Side::right};
    }
}

} // namespace wellness
