#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wellness/cooccur.hpp"
#include "wellness/errors.hpp"
#include "wellness/facial.hpp"
#include "wellness/temporal.hpp"

namespace wellness {

// Maps frame indices of one day's stream to seconds-of-day.
struct FrameClock {
    double fps = 25.0;
    double stream_start_s = 0.0; // second-of-day of frame 0

    double seconds_of_day(std::uint64_t frame) const {
        return stream_start_s + static_cast<double>(frame) / fps;
    }
    // Half-open time span [t(start), t(end+1)) of an inclusive frame interval.
    std::pair<double, double> span_seconds(std::uint64_t start_frame, std::uint64_t end_frame) const {
        return {seconds_of_day(start_frame), seconds_of_day(end_frame + 1)};
    }
};

struct TemporalHeatmap {
    std::string person_id;
    std::string date; // ISO yyyy-mm-dd
    std::vector<std::string> activities;
    std::vector<std::vector<double>> cells; // [activity][bin], values in [0,1]
    double start_s = 0.0;                   // second-of-day of bin 0
    double bin_width_s = 300.0;

    std::size_t bin_count() const { return cells.empty() ? 0 : cells.front().size(); }
};

enum class TrendMetric { nap_minutes, yawn_count, blink_rate_per_min, mean_eis, talk_minutes };

inline const char* to_string(TrendMetric m) {
    switch (m) {
        case TrendMetric::nap_minutes: return "nap_minutes";
        case TrendMetric::yawn_count: return "yawn_count";
        case TrendMetric::blink_rate_per_min: return "blink_rate_per_min";
        case TrendMetric::mean_eis: return "mean_eis";
        default: return "talk_minutes";
    }
}

inline std::optional<TrendMetric> trend_metric_from_string(const std::string& s) {
    if (s == "nap_minutes") return TrendMetric::nap_minutes;
    if (s == "yawn_count") return TrendMetric::yawn_count;
    if (s == "blink_rate_per_min") return TrendMetric::blink_rate_per_min;
    if (s == "mean_eis") return TrendMetric::mean_eis;
    if (s == "talk_minutes") return TrendMetric::talk_minutes;
    return std::nullopt;
}

struct TrendPoint {
    std::string date;
    double value = 0.0;
};

struct TrendSeries {
    std::string person_id;
    TrendMetric metric = TrendMetric::nap_minutes;
    std::vector<TrendPoint> points; // dates strictly increasing
};

enum class AlertKind { metric_deviation, expected_activity_missing };

inline const char* to_string(AlertKind k) {
    return k == AlertKind::metric_deviation ? "metric_deviation" : "expected_activity_missing";
}

struct Alert {
    std::string person_id;
    AlertKind kind = AlertKind::metric_deviation;
    std::string date;
    double severity = 0.0;         // |z| or gap length in bins
    bool severity_infinite = false; // zero-variance baseline with any deviation
    std::string message;
    // bin span for expected_activity_missing
    std::size_t gap_start_bin = 0;
    std::size_t gap_end_bin = 0;
};

namespace detail {

inline double overlap_seconds(double a_lo, double a_hi, double b_lo, double b_hi) {
    const double lo = std::max(a_lo, b_lo);
    const double hi = std::min(a_hi, b_hi);
    return hi > lo ? hi - lo : 0.0;
}

} // namespace detail

// One person's day as an activity x time-bin grid. Rows named in `scores`'
// activity list are filled with the overlap-weighted mean clip probability
// per bin; all other rows are interval coverage fractions.
inline TemporalHeatmap activity_heatmap(const std::string& person_id, const std::string& date,
                                        const std::vector<ActivityInterval>& intervals,
                                        const ClipScoreSeries& scores,
                                        const std::vector<std::string>& row_activities,
                                        const FrameClock& clock, double start_s,
                                        std::size_t n_bins, double bin_width_s) {
    TemporalHeatmap hm;
    hm.person_id = person_id;
    hm.date = date;
    hm.activities = row_activities;
    hm.start_s = start_s;
    hm.bin_width_s = bin_width_s;
    hm.cells.assign(row_activities.size(), std::vector<double>(n_bins, 0.0));

    for (std::size_t r = 0; r < row_activities.size(); ++r) {
        const std::string& activity = row_activities[r];
        auto chan_it = std::find(scores.activities.begin(), scores.activities.end(), activity);
        if (chan_it != scores.activities.end()) {
            const std::size_t chan = static_cast<std::size_t>(chan_it - scores.activities.begin());
            std::vector<double> weight(n_bins, 0.0);
            for (const auto& clip : scores.clips) {
                const auto [lo, hi] = clock.span_seconds(clip.start_frame, clip.end_frame);
                for (std::size_t b = 0; b < n_bins; ++b) {
                    const double b_lo = start_s + static_cast<double>(b) * bin_width_s;
                    const double ov = detail::overlap_seconds(lo, hi, b_lo, b_lo + bin_width_s);
                    if (ov <= 0.0) continue;
                    hm.cells[r][b] += ov * clip.scores[chan];
                    weight[b] += ov;
                }
            }
            for (std::size_t b = 0; b < n_bins; ++b)
                hm.cells[r][b] = weight[b] > 0.0 ? clamp01(hm.cells[r][b] / weight[b]) : 0.0;
        } else {
            for (const auto& iv : intervals) {
                if (iv.person_id != person_id || to_string(iv.activity) != activity) continue;
                const auto [lo, hi] = clock.span_seconds(iv.start_frame, iv.end_frame);
                for (std::size_t b = 0; b < n_bins; ++b) {
                    const double b_lo = start_s + static_cast<double>(b) * bin_width_s;
                    hm.cells[r][b] += detail::overlap_seconds(lo, hi, b_lo, b_lo + bin_width_s);
                }
            }
            for (std::size_t b = 0; b < n_bins; ++b)
                hm.cells[r][b] = clamp01(hm.cells[r][b] / bin_width_s);
        }
    }
    return hm;
}

enum class HourlyMetric { nap_minutes, yawn_count, blink_count };

inline const char* to_string(HourlyMetric m) {
    switch (m) {
        case HourlyMetric::nap_minutes: return "nap_minutes";
        case HourlyMetric::yawn_count: return "yawn_count";
        default: return "blink_count";
    }
}

// 24-bin histogram: nap minutes are split across hour boundaries by overlap,
// yawn/blink events count once in the hour they start.
inline std::array<double, 24> hourly_histogram(const std::vector<ActivityInterval>& intervals,
                                               const FrameClock& clock, HourlyMetric metric) {
    std::array<double, 24> bins{};
    for (const auto& iv : intervals) {
        if (metric == HourlyMetric::nap_minutes) {
            if (iv.activity != Activity::nap) continue;
            const auto [lo, hi] = clock.span_seconds(iv.start_frame, iv.end_frame);
            for (int h = 0; h < 24; ++h) {
                const double sec = detail::overlap_seconds(lo, hi, h * 3600.0, (h + 1) * 3600.0);
                bins[h] += sec / 60.0;
            }
        } else {
            const Activity wanted =
                metric == HourlyMetric::yawn_count ? Activity::yawn : Activity::blink;
            if (iv.activity != wanted) continue;
            const int h = static_cast<int>(clock.seconds_of_day(iv.start_frame) / 3600.0);
            if (h >= 0 && h < 24) bins[h] += 1.0;
        }
    }
    return bins;
}

// Scans one heatmap row for contiguous runs of bins below presence_thr that
// last at least min_gap bins. Bins overlapping an off-schedule window are
// treated as scheduled absences and break runs.
inline std::vector<Alert> expected_activity_gaps(const TemporalHeatmap& heatmap,
                                                 const std::string& activity, double presence_thr,
                                                 std::size_t min_gap,
                                                 const std::vector<std::pair<double, double>>&
                                                     off_schedule_s = {}) {
    auto row_it = std::find(heatmap.activities.begin(), heatmap.activities.end(), activity);
    if (row_it == heatmap.activities.end())
        throw Error("activity '" + activity + "' not present in heatmap");
    const auto& row = heatmap.cells[static_cast<std::size_t>(row_it - heatmap.activities.begin())];

    auto excluded = [&](std::size_t b) {
        const double lo = heatmap.start_s + static_cast<double>(b) * heatmap.bin_width_s;
        for (const auto& [w_lo, w_hi] : off_schedule_s)
            if (detail::overlap_seconds(lo, lo + heatmap.bin_width_s, w_lo, w_hi) > 0.0) return true;
        return false;
    };

    std::vector<Alert> alerts;
    std::size_t b = 0;
    while (b < row.size()) {
        if (row[b] >= presence_thr || excluded(b)) { ++b; continue; }
        std::size_t e = b;
        while (e + 1 < row.size() && row[e + 1] < presence_thr && !excluded(e + 1)) ++e;
        const std::size_t len = e - b + 1;
        if (len >= min_gap) {
            Alert a;
            a.person_id = heatmap.person_id;
            a.kind = AlertKind::expected_activity_missing;
            a.date = heatmap.date;
            a.severity = static_cast<double>(len);
            a.gap_start_bin = b;
            a.gap_end_bin = e;
            a.message = "expected activity '" + activity + "' missing for " +
                        std::to_string(len) + " bins";
            alerts.push_back(std::move(a));
        }
        b = e + 1;
    }
    return alerts;
}

// Rolling z-score anomaly detection. The first baseline_days points are
// warm-up and never alert; afterwards each day is scored against the mean and
// population stddev of the prior baseline_days values. A zero-variance
// baseline with any deviation is an infinite-severity alert.
inline std::vector<Alert> detect_metric_anomalies(const TrendSeries& series, double alert_z,
                                                  std::size_t baseline_days) {
    if (series.points.size() < baseline_days + 1)
        throw TooShort("trend series shorter than baseline + 1");
    std::vector<Alert> alerts;
    for (std::size_t i = baseline_days; i < series.points.size(); ++i) {
        double mean = 0.0;
        for (std::size_t j = i - baseline_days; j < i; ++j) mean += series.points[j].value;
        mean /= static_cast<double>(baseline_days);
        double var = 0.0;
        for (std::size_t j = i - baseline_days; j < i; ++j) {
            const double d = series.points[j].value - mean;
            var += d * d;
        }
        const double stddev = std::sqrt(var / static_cast<double>(baseline_days));
        const double dev = series.points[i].value - mean;

        Alert a;
        a.person_id = series.person_id;
        a.kind = AlertKind::metric_deviation;
        a.date = series.points[i].date;
        if (stddev == 0.0) {
            if (dev == 0.0) continue;
            a.severity_infinite = true;
            a.severity = std::numeric_limits<double>::infinity();
        } else {
            const double z = dev / stddev;
            if (std::abs(z) < alert_z) continue;
            a.severity = z;
        }
        a.message = std::string(to_string(series.metric)) + " deviates from baseline on " + a.date;
        alerts.push_back(std::move(a));
    }
    return alerts;
}

// Pearson correlation between two daily metric series over identical dates.
inline double cross_metric_correlation(const TrendSeries& a, const TrendSeries& b) {
    if (a.points.size() != b.points.size())
        throw DateMismatch("trend series cover different numbers of days");
    std::vector<double> va, vb;
    va.reserve(a.points.size());
    vb.reserve(b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        if (a.points[i].date != b.points[i].date)
            throw DateMismatch("trend series dates differ at index " + std::to_string(i));
        va.push_back(a.points[i].value);
        vb.push_back(b.points[i].value);
    }
    const auto m = correlation_matrix({"a", "b"}, {va, vb});
    return m.eta[0][1];
}

} // namespace wellness
