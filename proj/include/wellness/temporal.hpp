#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wellness/errors.hpp"

namespace wellness {

// The K=5 activity order of the external clip classifier; score vectors in
// the wire format follow this order.
inline const std::vector<std::string>& temporal_activities() {
    static const std::vector<std::string> names = {"sit_on_chair", "watch_tv", "eating",
                                                   "drinking", "exercise"};
    return names;
}

struct Clip {
    std::uint64_t clip_index = 0;
    std::uint64_t start_frame = 0;
    std::uint64_t end_frame = 0;
    std::vector<double> scores; // probability vector over `activities`
};

struct ClipScoreSeries {
    std::string person_id;
    std::vector<std::string> activities;
    std::vector<Clip> clips;

    std::optional<std::string> validate() const {
        std::optional<std::uint64_t> prev;
        for (const auto& clip : clips) {
            if (clip.scores.size() != activities.size()) return "score vector length mismatch";
            double sum = 0.0;
            for (double s : clip.scores) {
                if (s < 0.0 || s > 1.0) return "score outside [0,1]";
                sum += s;
            }
            if (std::abs(sum - 1.0) > 1e-6) return "scores do not sum to 1";
            if (prev && clip.clip_index <= *prev) return "clip_index not strictly increasing";
            prev = clip.clip_index;
        }
        return std::nullopt;
    }
};

// Per-activity smoothing window lengths.
struct WindowPlan {
    std::map<std::string, int> windows;

    int window_for(const std::string& activity) const {
        auto it = windows.find(activity);
        return it == windows.end() ? 1 : it->second;
    }
};

struct LabeledInstance {
    std::string person_id;
    std::uint64_t start_frame = 0;
    std::uint64_t end_frame = 0;
    std::set<std::string> true_activities;
};

// Sliding-mean smoothing of the score vectors: clip i becomes the mean of
// clips [i - W/2, i + W/2], truncated at the ends with the divisor equal to
// the number of clips actually included. Averaging probability vectors keeps
// the simplex, so no renormalization is needed.
inline ClipScoreSeries smooth_predictions(const ClipScoreSeries& series, int window) {
    ClipScoreSeries out = series;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(series.clips.size());
    const std::ptrdiff_t half = window / 2;
    const std::size_t k = series.activities.size();
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi = std::min(n - 1, i + half);
        std::vector<double> acc(k, 0.0);
        for (std::ptrdiff_t j = lo; j <= hi; ++j)
            for (std::size_t a = 0; a < k; ++a) acc[a] += series.clips[j].scores[a];
        const double inv = 1.0 / static_cast<double>(hi - lo + 1);
        for (std::size_t a = 0; a < k; ++a) out.clips[i].scores[a] = acc[a] * inv;
    }
    return out;
}

// One channel smoothed in isolation, other channels untouched. This is the
// quantity the per-activity grid search scores.
inline std::vector<double> smooth_channel(const ClipScoreSeries& series, std::size_t channel,
                                          int window) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(series.clips.size());
    const std::ptrdiff_t half = window / 2;
    std::vector<double> out(series.clips.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi = std::min(n - 1, i + half);
        double acc = 0.0;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) acc += series.clips[j].scores[channel];
        out[i] = acc / static_cast<double>(hi - lo + 1);
    }
    return out;
}

// Channel-wise smoothing with per-activity windows. Different windows break
// the simplex, so the result is renormalized per clip.
inline ClipScoreSeries smooth_per_activity(const ClipScoreSeries& series, const WindowPlan& plan) {
    ClipScoreSeries out = series;
    std::vector<std::vector<double>> channels(series.activities.size());
    for (std::size_t a = 0; a < series.activities.size(); ++a)
        channels[a] = smooth_channel(series, a, plan.window_for(series.activities[a]));
    for (std::size_t i = 0; i < series.clips.size(); ++i) {
        double sum = 0.0;
        for (std::size_t a = 0; a < channels.size(); ++a) sum += channels[a][i];
        for (std::size_t a = 0; a < channels.size(); ++a)
            out.clips[i].scores[a] = sum > 0.0 ? channels[a][i] / sum : series.clips[i].scores[a];
    }
    return out;
}

// True when the |truth| highest-scoring activities are exactly the truth set.
// Score ties break by activity-list order (earlier index ranks higher).
inline bool topk_correct(const std::vector<double>& pred_scores,
                         const std::vector<std::string>& activities,
                         const std::set<std::string>& truth) {
    const std::size_t k = truth.size();
    std::vector<std::size_t> order(pred_scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pred_scores[a] > pred_scores[b]; });
    std::set<std::string> top;
    for (std::size_t r = 0; r < k && r < order.size(); ++r) top.insert(activities[order[r]]);
    return top == truth;
}

// Non-interpolated average precision: instances ranked by descending score
// (stable on ties), AP = sum of precision at each positive rank / positives.
// Absent when there are no positives.
inline std::optional<double> average_precision(const std::vector<std::pair<double, bool>>& scored) {
    std::vector<std::size_t> order(scored.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scored[a].first > scored[b].first;
    });
    double positives_seen = 0.0;
    double precision_sum = 0.0;
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (scored[order[r]].second) {
            positives_seen += 1.0;
            precision_sum += positives_seen / static_cast<double>(r + 1);
        }
    }
    if (positives_seen == 0.0) return std::nullopt;
    return precision_sum / positives_seen;
}

// Unweighted mean over the activities that have an AP (>= 1 positive).
inline std::optional<double> mean_ap(const std::vector<std::optional<double>>& per_activity) {
    double sum = 0.0;
    int count = 0;
    for (const auto& ap : per_activity) {
        if (!ap) continue;
        sum += *ap;
        ++count;
    }
    if (count == 0) return std::nullopt;
    return sum / count;
}

// One series together with the labeled instances that refer to its frame
// numbering (one person over one contiguous stream). Evaluation pools rows
// across units, so multi-day corpora stay unambiguous.
struct EvalUnit {
    ClipScoreSeries series;
    std::vector<LabeledInstance> labels;
};

// Finds the clip a label refers to: exact span match first, otherwise the
// clip with maximal frame overlap (ties to the smaller clip_index). Nothing
// when the label touches no clip.
inline std::optional<std::size_t> match_label_to_clip(const ClipScoreSeries& series,
                                                      const LabeledInstance& label) {
    std::optional<std::size_t> best;
    std::uint64_t best_overlap = 0;
    for (std::size_t c = 0; c < series.clips.size(); ++c) {
        const Clip& clip = series.clips[c];
        if (clip.start_frame == label.start_frame && clip.end_frame == label.end_frame) return c;
        const std::uint64_t lo = std::max(clip.start_frame, label.start_frame);
        const std::uint64_t hi = std::min(clip.end_frame, label.end_frame);
        if (lo > hi) continue;
        const std::uint64_t overlap = hi - lo + 1;
        if (overlap > best_overlap) { best_overlap = overlap; best = c; }
    }
    return best;
}

namespace detail {

// (score, is_positive) rows for one activity over the given channel values.
inline void append_score_rows(const EvalUnit& unit, const std::vector<double>& channel,
                              const std::string& activity,
                              std::vector<std::pair<double, bool>>& rows) {
    for (const auto& label : unit.labels) {
        if (label.person_id != unit.series.person_id) continue;
        if (auto c = match_label_to_clip(unit.series, label))
            rows.emplace_back(channel[*c], label.true_activities.count(activity) > 0);
    }
}

} // namespace detail

// Per-activity grid search over candidate window lengths, maximizing that
// activity's AP with only its own channel smoothed. Ties go to the smaller
// window.
inline WindowPlan grid_search_windows(const std::vector<EvalUnit>& units,
                                      const std::vector<int>& candidate_windows) {
    std::size_t label_count = 0;
    for (const auto& unit : units) label_count += unit.labels.size();
    if (label_count == 0) throw NoLabels();
    if (units.empty() || candidate_windows.empty())
        throw Error("grid search needs at least one series and one candidate window");
    const auto& activities = units.front().series.activities;
    std::vector<int> candidates = candidate_windows;
    std::sort(candidates.begin(), candidates.end());

    WindowPlan plan;
    for (std::size_t a = 0; a < activities.size(); ++a) {
        int best_w = candidates.front();
        double best_ap = -1.0;
        for (int w : candidates) {
            std::vector<std::pair<double, bool>> rows;
            for (const auto& unit : units) {
                const auto channel = smooth_channel(unit.series, a, w);
                detail::append_score_rows(unit, channel, activities[a], rows);
            }
            const auto ap = average_precision(rows);
            const double v = ap.value_or(-1.0);
            if (v > best_ap) { best_ap = v; best_w = w; }
        }
        plan.windows[activities[a]] = best_w;
    }
    return plan;
}

} // namespace wellness
