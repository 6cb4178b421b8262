#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wellness/cooccur.hpp"
#include "wellness/errors.hpp"
#include "wellness/exercise.hpp"
#include "wellness/facial.hpp"
#include "wellness/interaction.hpp"

namespace wellness {

namespace config_detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, delim)) parts.push_back(trim(item));
    return parts;
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    }
}

inline long long parse_int(const std::string& key, const std::string& value) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

// Flat `key = value` file; '#' starts a comment, blank lines ignored.
inline std::vector<std::pair<std::string, std::string>> read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
        pairs.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return pairs;
}

inline std::string format_double(double v) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

} // namespace config_detail

struct TrendsParams {
    double bin_width_s = 300.0;
    double presence_thr = 0.5;
    int min_gap_bins = 2;
    double alert_z = 3.0;
    int baseline_days = 7;
    std::vector<std::string> heatmap_activities = {"sit_on_chair", "watch_tv", "eating", "drinking",
                                                   "exercise", "nap", "yawn", "talk_speaker"};
    std::vector<std::string> gap_activities = {"sit_on_chair"};
    std::vector<std::pair<double, double>> off_schedule_s; // e.g. exercise slots
};

struct EngineConfig {
    FacialThresholds facial;
    EisParams eis;
    std::vector<int> candidate_windows = {1, 3, 5, 7, 9, 11, 15, 21};
    int fixed_window = 5; // smoothing fallback when no labels are available
    CorrectionMode cooccur_mode = CorrectionMode::multi_label;
    double cooccur_gain = 1.0;
    int cooccur_smooth_window = 31; // clips; coarsens rule-based channels for the matrix
    std::vector<std::string> cooccur_activities = {"sit_on_chair", "watch_tv", "eating", "drinking",
                                                   "exercise", "yawn", "nap", "talk_speaker"};
    double hoi_thr = 0.25;
    double t_th_seconds = 120.0;
    int interaction_window_frames = 750;
    RelationWeights relation_weights;
    TrendsParams trends;
    double fps = 25.0;
    double day_start_s = 28800.0; // streams start at 08:00 by default

    // Applies one dotted key; unknown keys are rejected.
    void apply(const std::string& key, const std::string& value) {
        using namespace config_detail;
        if (key == "facial.d_thrl") facial.d_thrl = parse_double(key, value);
        else if (key == "facial.d_thre") facial.d_thre = parse_double(key, value);
        else if (key == "facial.f_thr_frames") facial.f_thr = static_cast<int>(parse_int(key, value));
        else if (key == "facial.window") facial.window = static_cast<int>(parse_int(key, value));
        else if (key == "facial.talk_std_thr") facial.talk_std_thr = parse_double(key, value);
        else if (key == "facial.min_yawn_frames") facial.min_yawn_frames = static_cast<int>(parse_int(key, value));
        else if (key == "facial.min_talk_frames") facial.min_talk_frames = static_cast<int>(parse_int(key, value));
        else if (key.rfind("facial.overrides.", 0) == 0) {
            const std::string rest = key.substr(17);
            const auto dot = rest.rfind('.');
            if (dot == std::string::npos || dot == 0)
                throw ConfigError("expected facial.overrides.<person>.d_thrl or .d_thre, got '" + key + "'");
            const std::string person = rest.substr(0, dot);
            const std::string field = rest.substr(dot + 1);
            auto& ov = facial.per_person_overrides;
            if (ov.find(person) == ov.end()) ov[person] = {facial.d_thrl, facial.d_thre};
            if (field == "d_thrl") ov[person].d_thrl = parse_double(key, value);
            else if (field == "d_thre") ov[person].d_thre = parse_double(key, value);
            else throw ConfigError("unknown override field '" + field + "' in '" + key + "'");
        }
        else if (key == "eis.lambda_a") eis.weights.lambda_a = parse_double(key, value);
        else if (key == "eis.lambda_r") eis.weights.lambda_r = parse_double(key, value);
        else if (key == "eis.lambda_s") eis.weights.lambda_s = parse_double(key, value);
        else if (key == "eis.range_norm") eis.range_norm = parse_double(key, value);
        else if (key == "eis.t_norm_frames") eis.t_norm_frames = static_cast<int>(parse_int(key, value));
        else if (key == "eis.window_frames") eis.window_frames = static_cast<int>(parse_int(key, value));
        else if (key == "eis.joint_conf_min") eis.joint_conf_min = parse_double(key, value);
        else if (key == "eis.reference_person") eis.reference_person = value;
        else if (key == "temporal.candidate_windows") {
            candidate_windows.clear();
            for (const auto& part : split(value, ','))
                candidate_windows.push_back(static_cast<int>(parse_int(key, part)));
            if (candidate_windows.empty()) throw ConfigError("empty candidate window list");
        }
        else if (key == "temporal.fixed_window") fixed_window = static_cast<int>(parse_int(key, value));
        else if (key == "cooccur.mode") {
            if (value == "exclusive") cooccur_mode = CorrectionMode::exclusive;
            else if (value == "multi_label") cooccur_mode = CorrectionMode::multi_label;
            else throw ConfigError("cooccur.mode must be exclusive or multi_label");
        }
        else if (key == "cooccur.gain") cooccur_gain = parse_double(key, value);
        else if (key == "cooccur.smooth_window")
            cooccur_smooth_window = static_cast<int>(parse_int(key, value));
        else if (key == "cooccur.activities") cooccur_activities = split(value, ',');
        else if (key == "interaction.hoi_thr") hoi_thr = parse_double(key, value);
        else if (key == "interaction.t_th_seconds") t_th_seconds = parse_double(key, value);
        else if (key == "interaction.window_frames")
            interaction_window_frames = static_cast<int>(parse_int(key, value));
        else if (key.rfind("interaction.weight.", 0) == 0)
            relation_weights.weights[key.substr(19)] = parse_double(key, value);
        else if (key == "trends.bin_width_s") trends.bin_width_s = parse_double(key, value);
        else if (key == "trends.presence_thr") trends.presence_thr = parse_double(key, value);
        else if (key == "trends.min_gap_bins") trends.min_gap_bins = static_cast<int>(parse_int(key, value));
        else if (key == "trends.alert_z") trends.alert_z = parse_double(key, value);
        else if (key == "trends.baseline_days") trends.baseline_days = static_cast<int>(parse_int(key, value));
        else if (key == "trends.heatmap_activities") trends.heatmap_activities = split(value, ',');
        else if (key == "trends.gap_activities") trends.gap_activities = split(value, ',');
        else if (key == "trends.off_schedule") {
            trends.off_schedule_s.clear();
            if (!value.empty()) {
                for (const auto& slot : split(value, ';')) {
                    const auto parts = split(slot, '-');
                    if (parts.size() != 2)
                        throw ConfigError("trends.off_schedule slots must be start-end seconds");
                    trends.off_schedule_s.emplace_back(parse_double(key, parts[0]),
                                                       parse_double(key, parts[1]));
                }
            }
        }
        else if (key == "io.fps") fps = parse_double(key, value);
        else if (key == "io.day_start_s") day_start_s = parse_double(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    }

    void validate() const {
        if (facial.d_thrl <= 0.0 || facial.d_thre <= 0.0)
            throw ConfigError("facial thresholds must be positive");
        if (facial.f_thr < 1 || facial.window < 1)
            throw ConfigError("facial.f_thr_frames and facial.window must be >= 1");
        const auto& w = eis.weights;
        if (w.lambda_a < 0.0 || w.lambda_r < 0.0 || w.lambda_s < 0.0 ||
            w.lambda_a + w.lambda_r + w.lambda_s <= 0.0)
            throw ConfigError("eis weights must be non-negative with positive sum");
        for (int cw : candidate_windows)
            if (cw < 1) throw ConfigError("candidate windows must be >= 1");
        if (fps <= 0.0) throw ConfigError("io.fps must be positive");
    }

    static EngineConfig load(const std::string& path,
                             const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
        EngineConfig cfg;
        for (const auto& [k, v] : config_detail::read_kv_file(path)) cfg.apply(k, v);
        for (const auto& [k, v] : overrides) cfg.apply(k, v);
        cfg.validate();
        return cfg;
    }

    // Full dump in a stable key order; load(write(x)) == x.
    std::string serialize() const {
        using config_detail::format_double;
        std::ostringstream out;
        out << "facial.d_thrl = " << format_double(facial.d_thrl) << "\n";
        out << "facial.d_thre = " << format_double(facial.d_thre) << "\n";
        out << "facial.f_thr_frames = " << facial.f_thr << "\n";
        out << "facial.window = " << facial.window << "\n";
        out << "facial.talk_std_thr = " << format_double(facial.talk_std_thr) << "\n";
        out << "facial.min_yawn_frames = " << facial.min_yawn_frames << "\n";
        out << "facial.min_talk_frames = " << facial.min_talk_frames << "\n";
        for (const auto& [person, ov] : facial.per_person_overrides) {
            out << "facial.overrides." << person << ".d_thrl = " << format_double(ov.d_thrl) << "\n";
            out << "facial.overrides." << person << ".d_thre = " << format_double(ov.d_thre) << "\n";
        }
        out << "eis.lambda_a = " << format_double(eis.weights.lambda_a) << "\n";
        out << "eis.lambda_r = " << format_double(eis.weights.lambda_r) << "\n";
        out << "eis.lambda_s = " << format_double(eis.weights.lambda_s) << "\n";
        out << "eis.range_norm = " << format_double(eis.range_norm) << "\n";
        out << "eis.t_norm_frames = " << eis.t_norm_frames << "\n";
        out << "eis.window_frames = " << eis.window_frames << "\n";
        out << "eis.joint_conf_min = " << format_double(eis.joint_conf_min) << "\n";
        out << "eis.reference_person = " << eis.reference_person << "\n";
        out << "temporal.candidate_windows = ";
        for (std::size_t i = 0; i < candidate_windows.size(); ++i)
            out << (i ? "," : "") << candidate_windows[i];
        out << "\n";
        out << "temporal.fixed_window = " << fixed_window << "\n";
        out << "cooccur.mode = "
            << (cooccur_mode == CorrectionMode::exclusive ? "exclusive" : "multi_label") << "\n";
        out << "cooccur.gain = " << format_double(cooccur_gain) << "\n";
        out << "cooccur.smooth_window = " << cooccur_smooth_window << "\n";
        out << "cooccur.activities = ";
        for (std::size_t i = 0; i < cooccur_activities.size(); ++i)
            out << (i ? "," : "") << cooccur_activities[i];
        out << "\n";
        out << "interaction.hoi_thr = " << format_double(hoi_thr) << "\n";
        out << "interaction.t_th_seconds = " << format_double(t_th_seconds) << "\n";
        out << "interaction.window_frames = " << interaction_window_frames << "\n";
        for (const auto& [rel, weight] : relation_weights.weights)
            out << "interaction.weight." << rel << " = " << format_double(weight) << "\n";
        out << "trends.bin_width_s = " << format_double(trends.bin_width_s) << "\n";
        out << "trends.presence_thr = " << format_double(trends.presence_thr) << "\n";
        out << "trends.min_gap_bins = " << trends.min_gap_bins << "\n";
        out << "trends.alert_z = " << format_double(trends.alert_z) << "\n";
        out << "trends.baseline_days = " << trends.baseline_days << "\n";
        out << "trends.heatmap_activities = ";
        for (std::size_t i = 0; i < trends.heatmap_activities.size(); ++i)
            out << (i ? "," : "") << trends.heatmap_activities[i];
        out << "\n";
        out << "trends.gap_activities = ";
        for (std::size_t i = 0; i < trends.gap_activities.size(); ++i)
            out << (i ? "," : "") << trends.gap_activities[i];
        out << "\n";
        out << "trends.off_schedule = ";
        for (std::size_t i = 0; i < trends.off_schedule_s.size(); ++i)
            out << (i ? ";" : "") << format_double(trends.off_schedule_s[i].first) << "-"
                << format_double(trends.off_schedule_s[i].second);
        out << "\n";
        out << "io.fps = " << format_double(fps) << "\n";
        out << "io.day_start_s = " << format_double(day_start_s) << "\n";
        return out.str();
    }
};

} // namespace wellness
