#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wellness/config.hpp"
#include "wellness/errors.hpp"
#include "wellness/events.hpp"
#include "wellness/exercise.hpp"
#include "wellness/facial.hpp"
#include "wellness/interaction.hpp"
#include "wellness/rng.hpp"
#include "wellness/temporal.hpp"

namespace wellness {

struct NoiseModel {
    double landmark_sigma = 0.0;    // px jitter on landmarks and joints
    double score_temperature = 0.25; // clip-score softmax temperature
    double score_sigma = 0.0;       // logit noise
    double confusion_prob = 0.0;    // per-clip chance the score vector points at a wrong activity
    double dropout = 0.0;           // per-frame chance of losing a face or pose observation
};

struct PlantSpec {
    bool nap_eis_anticorrelation = false;
    int anomaly_day = -1;   // day index with a yawn burst for senior_0
    int chair_gap_day = -1; // day index when senior_0 leaves the chair
    double chair_gap_start_frac = 0.215;
    double chair_gap_len_s = 120.0;
};

struct ScenarioSpec {
    std::uint64_t seed = 42;
    int n_seniors = 2;
    int n_caregivers = 1;
    int n_days = 1;
    std::string base_date = "2026-03-01";
    double day_length_s = 1800.0;
    double fps = 5.0;
    double day_start_s = 28800.0; // 08:00
    double clip_len_s = 4.0;
    double clip_stride_s = 2.0;
    double nap_len_s = 90.0;
    double yawn_len_s = 2.0;
    double blinks_per_min = 6.0;
    double conversation_len_s = 120.0;
    double drink_len_s = 8.0;
    NoiseModel noise;
    PlantSpec plant;

    void validate() const {
        if (fps <= 0.0) throw InvalidSpec("fps must be positive");
        if (n_seniors < 1) throw InvalidSpec("need at least one senior");
        if (n_caregivers < 0) throw InvalidSpec("negative caregiver count");
        if (n_days < 1) throw InvalidSpec("need at least one day");
        if (day_length_s < 900.0) throw InvalidSpec("day_length_s must be >= 900");
        if (clip_len_s <= 0.0 || clip_stride_s <= 0.0) throw InvalidSpec("clip geometry invalid");
        for (double p : {noise.dropout, noise.confusion_prob})
            if (p < 0.0 || p > 1.0) throw InvalidSpec("probabilities must be in [0,1]");
        if (noise.score_temperature <= 0.0) throw InvalidSpec("score_temperature must be positive");
        if (yawn_len_s * fps < 3.0) throw InvalidSpec("yawn_len_s too short for this fps (needs >= 3 frames)");
    }

    void apply(const std::string& key, const std::string& value) {
        using namespace config_detail;
        if (key == "scenario.seed") seed = static_cast<std::uint64_t>(parse_int(key, value));
        else if (key == "scenario.n_seniors") n_seniors = static_cast<int>(parse_int(key, value));
        else if (key == "scenario.n_caregivers") n_caregivers = static_cast<int>(parse_int(key, value));
        else if (key == "scenario.n_days") n_days = static_cast<int>(parse_int(key, value));
        else if (key == "scenario.base_date") base_date = value;
        else if (key == "scenario.day_length_s") day_length_s = parse_double(key, value);
        else if (key == "scenario.fps") fps = parse_double(key, value);
        else if (key == "scenario.day_start_s") day_start_s = parse_double(key, value);
        else if (key == "scenario.clip_len_s") clip_len_s = parse_double(key, value);
        else if (key == "scenario.clip_stride_s") clip_stride_s = parse_double(key, value);
        else if (key == "scenario.nap_len_s") nap_len_s = parse_double(key, value);
        else if (key == "scenario.yawn_len_s") yawn_len_s = parse_double(key, value);
        else if (key == "scenario.blinks_per_min") blinks_per_min = parse_double(key, value);
        else if (key == "scenario.conversation_len_s") conversation_len_s = parse_double(key, value);
        else if (key == "scenario.drink_len_s") drink_len_s = parse_double(key, value);
        else if (key == "scenario.noise.landmark_sigma") noise.landmark_sigma = parse_double(key, value);
        else if (key == "scenario.noise.score_temperature") noise.score_temperature = parse_double(key, value);
        else if (key == "scenario.noise.score_sigma") noise.score_sigma = parse_double(key, value);
        else if (key == "scenario.noise.confusion_prob") noise.confusion_prob = parse_double(key, value);
        else if (key == "scenario.noise.dropout") noise.dropout = parse_double(key, value);
        else if (key == "scenario.plant.nap_eis_anticorr") plant.nap_eis_anticorrelation = parse_bool(key, value);
        else if (key == "scenario.plant.anomaly_day") plant.anomaly_day = static_cast<int>(parse_int(key, value));
        else if (key == "scenario.plant.chair_gap_day") plant.chair_gap_day = static_cast<int>(parse_int(key, value));
        else if (key == "scenario.plant.chair_gap_start_frac") plant.chair_gap_start_frac = parse_double(key, value);
        else if (key == "scenario.plant.chair_gap_len_s") plant.chair_gap_len_s = parse_double(key, value);
        else throw ConfigError("unknown scenario key '" + key + "'");
    }

    static ScenarioSpec load(const std::string& path,
                             const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
        ScenarioSpec spec;
        for (const auto& [k, v] : config_detail::read_kv_file(path)) spec.apply(k, v);
        for (const auto& [k, v] : overrides) spec.apply(k, v);
        spec.validate();
        return spec;
    }

    std::string serialize() const {
        using config_detail::format_double;
        std::ostringstream out;
        out << "scenario.seed = " << seed << "\n";
        out << "scenario.n_seniors = " << n_seniors << "\n";
        out << "scenario.n_caregivers = " << n_caregivers << "\n";
        out << "scenario.n_days = " << n_days << "\n";
        out << "scenario.base_date = " << base_date << "\n";
        out << "scenario.day_length_s = " << format_double(day_length_s) << "\n";
        out << "scenario.fps = " << format_double(fps) << "\n";
        out << "scenario.day_start_s = " << format_double(day_start_s) << "\n";
        out << "scenario.clip_len_s = " << format_double(clip_len_s) << "\n";
        out << "scenario.clip_stride_s = " << format_double(clip_stride_s) << "\n";
        out << "scenario.nap_len_s = " << format_double(nap_len_s) << "\n";
        out << "scenario.yawn_len_s = " << format_double(yawn_len_s) << "\n";
        out << "scenario.blinks_per_min = " << format_double(blinks_per_min) << "\n";
        out << "scenario.conversation_len_s = " << format_double(conversation_len_s) << "\n";
        out << "scenario.drink_len_s = " << format_double(drink_len_s) << "\n";
        out << "scenario.noise.landmark_sigma = " << format_double(noise.landmark_sigma) << "\n";
        out << "scenario.noise.score_temperature = " << format_double(noise.score_temperature) << "\n";
        out << "scenario.noise.score_sigma = " << format_double(noise.score_sigma) << "\n";
        out << "scenario.noise.confusion_prob = " << format_double(noise.confusion_prob) << "\n";
        out << "scenario.noise.dropout = " << format_double(noise.dropout) << "\n";
        out << "scenario.plant.nap_eis_anticorr = "
            << (plant.nap_eis_anticorrelation ? "true" : "false") << "\n";
        out << "scenario.plant.anomaly_day = " << plant.anomaly_day << "\n";
        out << "scenario.plant.chair_gap_day = " << plant.chair_gap_day << "\n";
        out << "scenario.plant.chair_gap_start_frac = " << format_double(plant.chair_gap_start_frac) << "\n";
        out << "scenario.plant.chair_gap_len_s = " << format_double(plant.chair_gap_len_s) << "\n";
        return out.str();
    }
};

// Everything the generator knows about one synthesized day.
struct SynthDay {
    std::string date;
    std::vector<FrameEvent> frames;
    std::map<std::string, std::vector<Clip>> clips_by_person;
    std::vector<HoiCandidate> hoi;
    std::vector<LabeledInstance> labels;
    std::vector<ExerciseSession> sessions;
    std::vector<ActivityInterval> truth_intervals; // facial events and activity bouts
    std::map<std::pair<std::string, std::string>, double> truth_talk_seconds;
};

namespace synth_detail {

// Planted facial geometry. Detector thresholds sit exactly at the midpoint of
// the two states, which makes windowed-mean detection recover event
// boundaries exactly in the noiseless case.
constexpr double kLipIdle = 2.0;
constexpr double kLipYawn = 18.0;
constexpr double kLipThr = 10.0; // midpoint of idle/yawn
constexpr double kTalkLow = 2.0;
constexpr double kTalkHigh = 8.0;
constexpr double kEyeOpen = 10.0;
constexpr double kEyeClosed = 2.0;
constexpr double kEyeThr = 6.0; // midpoint of open/closed
constexpr double kTalkStdThr = 1.5;

constexpr double kUpperArm = 45.0;
constexpr double kForearm = 50.0;
constexpr double kShoulderHalf = 25.0; // torso scale = 50

struct FrameSpan {
    std::uint64_t begin = 0; // inclusive
    std::uint64_t end = 0;   // exclusive

    bool contains(std::uint64_t f) const { return f >= begin && f < end; }
    std::uint64_t length() const { return end - begin; }
};

enum class LipState { idle, yawn, talk };
enum class EyeState { open, closed };

struct PersonPlan {
    std::string id;
    Role role = Role::senior;
    int seat = 0;
    double exercise_intent = 0.0;
    std::vector<FrameSpan> yawns, naps, blinks, talks;
    std::vector<std::pair<FrameSpan, std::string>> listens; // span, speaker id
    std::map<std::string, std::vector<FrameSpan>> bouts;    // temporal activity name -> spans
};

inline double quantize(double v) { return std::round(v * 100.0) / 100.0; }

inline Point seat_center(int seat) { return {140.0 + 240.0 * seat, 300.0}; }

inline BBox person_box(int seat) {
    const Point c = seat_center(seat);
    return {c.x - 60.0, 180.0, c.x + 60.0, 460.0};
}

inline Point face_center(int seat) {
    const Point c = seat_center(seat);
    return {c.x, 215.0};
}

inline BBox face_box(int seat) {
    const Point f = face_center(seat);
    return {f.x - 30.0, f.y - 30.0, f.x + 30.0, f.y + 30.0};
}

// Canonical 68-point layout for one face with the requested lip and eyelid
// gaps. Only the rule-relevant points matter to the detectors; the rest form
// a plausible static face.
inline std::array<Point, kLandmarkCount> make_landmarks(Point c, double lip_gap, double eye_gap) {
    std::array<Point, kLandmarkCount> lm{};
    constexpr double pi = 3.14159265358979323846;
    for (int i = 0; i <= 16; ++i) { // jaw arc
        const double t = pi * (1.0 - static_cast<double>(i) / 16.0);
        lm[i] = {c.x + 28.0 * std::cos(t), c.y + 8.0 + 20.0 * std::sin(t)};
    }
    for (int i = 17; i <= 21; ++i) lm[i] = {c.x - 24.0 + 4.5 * (i - 17), c.y - 18.0}; // brows
    for (int i = 22; i <= 26; ++i) lm[i] = {c.x + 6.0 + 4.5 * (i - 22), c.y - 18.0};
    for (int i = 27; i <= 30; ++i) lm[i] = {c.x, c.y - 10.0 + 3.0 * (i - 27)}; // nose bridge
    for (int i = 31; i <= 35; ++i) lm[i] = {c.x - 6.0 + 3.0 * (i - 31), c.y + 2.0};

    const Point eye_l{c.x - 15.0, c.y - 8.0};
    const Point eye_r{c.x + 15.0, c.y - 8.0};
    const double h = eye_gap * 0.5;
    lm[36] = {eye_l.x - 6.0, eye_l.y};
    lm[37] = {eye_l.x - 3.0, eye_l.y - h};
    lm[38] = {eye_l.x + 3.0, eye_l.y - h};
    lm[39] = {eye_l.x + 6.0, eye_l.y};
    lm[40] = {eye_l.x + 3.0, eye_l.y + h};
    lm[41] = {eye_l.x - 3.0, eye_l.y + h};
    lm[42] = {eye_r.x - 6.0, eye_r.y};
    lm[43] = {eye_r.x - 3.0, eye_r.y - h};
    lm[44] = {eye_r.x + 3.0, eye_r.y - h};
    lm[45] = {eye_r.x + 6.0, eye_r.y};
    lm[46] = {eye_r.x + 3.0, eye_r.y + h};
    lm[47] = {eye_r.x - 3.0, eye_r.y + h};

    const Point mouth{c.x, c.y + 14.0};
    for (int i = 48; i <= 59; ++i) { // outer lips
        const double t = 2.0 * pi * static_cast<double>(i - 48) / 12.0;
        lm[i] = {mouth.x - 10.0 * std::cos(t), mouth.y + (6.0 + lip_gap * 0.5) * std::sin(t)};
    }
    const double g = lip_gap * 0.5;
    lm[60] = {mouth.x - 6.0, mouth.y};
    lm[61] = {mouth.x - 3.0, mouth.y - g};
    lm[62] = {mouth.x, mouth.y - g};
    lm[63] = {mouth.x + 3.0, mouth.y - g};
    lm[64] = {mouth.x + 6.0, mouth.y};
    lm[65] = {mouth.x + 3.0, mouth.y + g};
    lm[66] = {mouth.x, mouth.y + g};
    lm[67] = {mouth.x - 3.0, mouth.y + g};
    return lm;
}

} // namespace synth_detail

class ScenarioGenerator {
public:
    explicit ScenarioGenerator(ScenarioSpec spec) : spec_(std::move(spec)) {
        spec_.validate();
    }

    const ScenarioSpec& spec() const { return spec_; }

    std::vector<std::string> person_ids() const {
        std::vector<std::string> ids;
        for (int i = 0; i < spec_.n_seniors; ++i) ids.push_back("senior_" + std::to_string(i));
        for (int i = 0; i < spec_.n_caregivers; ++i) ids.push_back("caregiver_" + std::to_string(i));
        return ids;
    }

    std::uint64_t day_frames() const {
        return static_cast<std::uint64_t>(std::llround(spec_.day_length_s * spec_.fps));
    }

    std::string date_for_day(int day) const {
        using namespace std::chrono;
        int y = 0, m = 0, d = 0;
        if (std::sscanf(spec_.base_date.c_str(), "%d-%d-%d", &y, &m, &d) != 3)
            throw InvalidSpec("base_date must be yyyy-mm-dd");
        const year_month_day base{year{y} / m / d};
        if (!base.ok()) throw InvalidSpec("base_date is not a valid date");
        const year_month_day ymd{sys_days(base) + days(day)};
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
        return buf;
    }

    // Engine configuration whose thresholds match the planted margins.
    EngineConfig matched_config() const {
        using namespace synth_detail;
        EngineConfig cfg;
        cfg.facial.d_thrl = kLipThr;
        cfg.facial.d_thre = kEyeThr;
        cfg.facial.window = 5;
        cfg.facial.f_thr = std::max(2, static_cast<int>(std::llround(3.0 * spec_.fps)));
        cfg.facial.talk_std_thr = kTalkStdThr;
        cfg.facial.min_yawn_frames =
            std::max(2, static_cast<int>(std::llround(0.5 * spec_.yawn_len_s * spec_.fps)));
        cfg.facial.min_talk_frames = std::max(3, static_cast<int>(std::llround(2.0 * spec_.fps)));
        cfg.eis.window_frames = std::max(8, static_cast<int>(std::llround(4.0 * spec_.fps)));
        cfg.eis.t_norm_frames = std::max(2, static_cast<int>(std::llround(1.2 * spec_.fps)));
        cfg.eis.reference_person = spec_.n_caregivers > 0 ? "caregiver_0" : "senior_0";
        cfg.interaction_window_frames = std::max(10, static_cast<int>(std::llround(60.0 * spec_.fps)));
        cfg.fps = spec_.fps;
        cfg.day_start_s = spec_.day_start_s;
        cfg.trends.bin_width_s = std::max(30.0, spec_.day_length_s / 60.0);
        cfg.trends.presence_thr = 0.34;
        cfg.trends.min_gap_bins = 2;
        // guided exercise happens off the chair; do not alert for it
        const double ex_lo = spec_.day_start_s + 0.52 * spec_.day_length_s - cfg.trends.bin_width_s;
        const double ex_hi = spec_.day_start_s + 0.60 * spec_.day_length_s + cfg.trends.bin_width_s;
        cfg.trends.off_schedule_s = {{ex_lo, ex_hi}};
        return cfg;
    }

    SynthDay generate_day(int day) const;

private:
    std::uint64_t s2f(double seconds) const {
        return static_cast<std::uint64_t>(std::llround(seconds * spec_.fps));
    }
    std::uint64_t frac2f(double frac) const { return s2f(frac * spec_.day_length_s); }

    // Smooth day-to-day wellness driver for the planted long-term effects.
    double wellness(int day) const {
        return 0.5 + 0.42 * std::cos(2.0 * 3.14159265358979323846 * day / 7.0 + 0.9);
    }

    std::vector<synth_detail::PersonPlan> build_plans(int day) const;

    ScenarioSpec spec_;
};

inline std::vector<synth_detail::PersonPlan> ScenarioGenerator::build_plans(int day) const {
    using namespace synth_detail;
    const std::uint64_t n = day_frames();
    const std::uint64_t sep = 6; // min spacing between facial events, > facial window

    const double w_d = wellness(day);
    const double nap_factor =
        spec_.plant.nap_eis_anticorrelation ? std::clamp(1.7 - 1.2 * w_d, 0.3, 1.6) : 1.0;
    const double intent_factor =
        spec_.plant.nap_eis_anticorrelation ? 0.35 + 0.65 * w_d : 1.0;

    std::vector<PersonPlan> plans;
    const auto ids = person_ids();
    for (std::size_t p = 0; p < ids.size(); ++p) {
        PersonPlan plan;
        plan.id = ids[p];
        plan.seat = static_cast<int>(p);
        plan.role = plan.id.rfind("senior", 0) == 0 ? Role::senior : Role::caregiver;
        plans.push_back(std::move(plan));
    }

    const FrameSpan exercise{frac2f(0.52), frac2f(0.60)};
    const FrameSpan tv{frac2f(0.04), frac2f(0.20)};
    const FrameSpan meal{frac2f(0.34), frac2f(0.42)};
    const FrameSpan conv1{frac2f(0.44),
                          frac2f(0.44) + s2f(spec_.conversation_len_s *
                                             (1.0 + 0.12 * ((day * 5) % 3 - 1)))};
    const FrameSpan conv2{frac2f(0.68), frac2f(0.68) + s2f(spec_.conversation_len_s * 0.4)};

    for (auto& plan : plans) {
        const bool is_senior = plan.role == Role::senior;
        const int senior_index = plan.seat; // seniors are seated first

        // chair gap applies to senior_0 on the planted day
        std::vector<FrameSpan> not_sitting = {exercise};
        if (is_senior && senior_index == 0 && day == spec_.plant.chair_gap_day) {
            const std::uint64_t gs = frac2f(spec_.plant.chair_gap_start_frac);
            not_sitting.push_back({gs, gs + s2f(spec_.plant.chair_gap_len_s)});
        }
        std::sort(not_sitting.begin(), not_sitting.end(),
                  [](const FrameSpan& a, const FrameSpan& b) { return a.begin < b.begin; });
        std::uint64_t cursor = 0;
        for (const auto& hole : not_sitting) {
            if (hole.begin > cursor) plan.bouts["sit_on_chair"].push_back({cursor, hole.begin});
            cursor = std::max(cursor, hole.end);
        }
        if (cursor < n) plan.bouts["sit_on_chair"].push_back({cursor, n});

        plan.bouts["exercise"].push_back(exercise);
        plan.exercise_intent = is_senior
                                   ? (0.55 + 0.3 * (senior_index % 2)) * intent_factor
                                   : 1.0;

        plan.bouts["eating"].push_back(meal);
        for (int b = 0; b < 3; ++b) {
            const std::uint64_t ds = frac2f(0.35 + 0.03 * b);
            plan.bouts["drinking"].push_back({ds, ds + s2f(spec_.drink_len_s)});
        }

        if (is_senior) {
            plan.bouts["watch_tv"].push_back(tv);

            // two drowsy windows: yawns interleaved with short dozes
            for (const double drowsy_frac : {0.62, 0.79}) {
                const std::uint64_t base = frac2f(drowsy_frac);
                for (int cycle = 0; cycle < 2; ++cycle) {
                    const std::uint64_t cs = base + s2f(30.0 * cycle);
                    plan.yawns.push_back({cs, cs + s2f(spec_.yawn_len_s)});
                    const std::uint64_t doze = cs + s2f(10.0);
                    plan.naps.push_back({doze, doze + s2f(4.0 + cycle)});
                }
            }
            // scattered extra yawns vary by day; anomaly day buries senior_0 in them
            int extra = (day % 3) + (senior_index == 0 && day == spec_.plant.anomaly_day ? 20 : 0);
            for (int yx = 0; yx < extra; ++yx) {
                const std::uint64_t ys = frac2f(0.645) + s2f(8.0 * (yx + 1));
                plan.yawns.push_back({ys, ys + s2f(spec_.yawn_len_s)});
            }

            // two proper naps, lengths driven by the wellness pattern
            const double nap_len = std::min(spec_.nap_len_s * nap_factor, 0.055 * spec_.day_length_s);
            const double senior_shift = 0.012 * senior_index;
            for (const double nap_frac : {0.72, 0.87}) {
                const std::uint64_t ns = frac2f(nap_frac + senior_shift);
                plan.naps.push_back({ns, ns + s2f(nap_len)});
            }
        } else {
            // caregivers yawn rarely
            const std::uint64_t ys = frac2f(0.63) + s2f(4.0 * (day % 2));
            plan.yawns.push_back({ys, ys + s2f(spec_.yawn_len_s)});
        }
    }

    // conversations: (senior_0, caregiver_0 | senior_1) with per-day speaker swap
    auto add_conversation = [&](const FrameSpan& span, const std::string& a, const std::string& b) {
        const std::string speaker = (day % 2 == 0) ? a : b;
        const std::string listener = (day % 2 == 0) ? b : a;
        for (auto& plan : plans) {
            if (plan.id == speaker) plan.talks.push_back(span);
            if (plan.id == listener) plan.listens.push_back({span, speaker});
        }
    };
    const std::string partner1 = spec_.n_caregivers > 0 ? "caregiver_0"
                                 : (spec_.n_seniors > 1 ? "senior_1" : "");
    if (!partner1.empty() && conv1.end <= n) add_conversation(conv1, "senior_0", partner1);
    if (spec_.n_seniors > 1 && conv2.end <= n) add_conversation(conv2, "senior_0", "senior_1");

    // blinks fill whatever eye-time is left, steering clear of closures
    for (auto& plan : plans) {
        const std::uint64_t blink_len = std::max<std::uint64_t>(3, s2f(0.2));
        const std::uint64_t period = std::max<std::uint64_t>(blink_len + 2 * sep,
                                                             s2f(60.0 / spec_.blinks_per_min));
        const std::uint64_t phase = (static_cast<std::uint64_t>(day) * 7 + plan.seat * 3) % period;
        for (std::uint64_t t = sep + phase; t + blink_len + sep < n; t += period) {
            const FrameSpan blink{t, t + blink_len};
            bool clash = false;
            for (const auto& nap : plan.naps) {
                if (blink.end + sep > nap.begin && blink.begin < nap.end + sep) { clash = true; break; }
            }
            if (!clash) plan.blinks.push_back(blink);
        }
        std::sort(plan.blinks.begin(), plan.blinks.end(),
                  [](const FrameSpan& a, const FrameSpan& b) { return a.begin < b.begin; });
        std::sort(plan.naps.begin(), plan.naps.end(),
                  [](const FrameSpan& a, const FrameSpan& b) { return a.begin < b.begin; });
        std::sort(plan.yawns.begin(), plan.yawns.end(),
                  [](const FrameSpan& a, const FrameSpan& b) { return a.begin < b.begin; });

        // the noiseless margins the detectors rely on: events separated and
        // inside the day
        auto assert_spans = [&](const std::vector<FrameSpan>& spans, const char* what) {
            for (std::size_t i = 0; i < spans.size(); ++i) {
                if (spans[i].end > n || spans[i].length() < 3)
                    throw InvalidSpec(std::string(what) + " span out of range or too short");
                if (i > 0 && spans[i].begin < spans[i - 1].end + sep)
                    throw InvalidSpec(std::string(what) + " spans too close for the rule window");
            }
        };
        assert_spans(plan.yawns, "yawn");
        assert_spans(plan.naps, "nap");
        assert_spans(plan.blinks, "blink");
    }
    return plans;
}

inline SynthDay ScenarioGenerator::generate_day(int day) const {
    using namespace synth_detail;
    SynthDay out;
    out.date = date_for_day(day);
    const std::uint64_t n = day_frames();
    const double fps = spec_.fps;
    auto plans = build_plans(day);

    Rng day_rng = Rng(spec_.seed).fork(static_cast<std::uint64_t>(day) + 1);

    // --- frames
    out.frames.reserve(n);
    std::vector<Rng> person_rng;
    for (std::size_t p = 0; p < plans.size(); ++p)
        person_rng.push_back(day_rng.fork(100 + p));

    for (std::uint64_t f = 0; f < n; ++f) {
        FrameEvent frame;
        frame.frame_index = f;
        frame.timestamp_ms = static_cast<std::uint64_t>(std::llround(f * 1000.0 / fps));
        frame.camera_id = "cam0";

        for (std::size_t p = 0; p < plans.size(); ++p) {
            const auto& plan = plans[p];
            Rng& rng = person_rng[p];
            PersonObservation person;
            person.person_id = plan.id;
            person.role = plan.role;
            person.person_box = person_box(plan.seat);

            // facial state
            LipState lip = LipState::idle;
            for (const auto& s : plan.yawns) if (s.contains(f)) { lip = LipState::yawn; break; }
            if (lip == LipState::idle)
                for (const auto& s : plan.talks) if (s.contains(f)) { lip = LipState::talk; break; }
            EyeState eye = EyeState::open;
            for (const auto& s : plan.naps) if (s.contains(f)) { eye = EyeState::closed; break; }
            if (eye == EyeState::open)
                for (const auto& s : plan.blinks) if (s.contains(f)) { eye = EyeState::closed; break; }

            double lip_gap = kLipIdle;
            if (lip == LipState::yawn) lip_gap = kLipYawn;
            else if (lip == LipState::talk) lip_gap = (f % 2 == 0) ? kTalkHigh : kTalkLow;
            const double eye_gap = eye == EyeState::open ? kEyeOpen : kEyeClosed;

            const bool drop_face = spec_.noise.dropout > 0.0 && rng.bernoulli(spec_.noise.dropout);
            if (!drop_face) {
                FaceObservation face;
                face.face_box = face_box(plan.seat);
                face.landmarks = make_landmarks(face_center(plan.seat), lip_gap, eye_gap);
                if (spec_.noise.landmark_sigma > 0.0) {
                    for (auto& pt : face.landmarks) {
                        pt.x += rng.normal(0.0, spec_.noise.landmark_sigma);
                        pt.y += rng.normal(0.0, spec_.noise.landmark_sigma);
                    }
                }
                for (auto& pt : face.landmarks) { pt.x = quantize(pt.x); pt.y = quantize(pt.y); }
                person.face = std::move(face);
            }

            // gaze only matters around conversations
            std::optional<std::string> listening_to;
            for (const auto& [span, speaker] : plan.listens)
                if (span.contains(f)) { listening_to = speaker; break; }
            bool speaking_now = false;
            for (const auto& s : plan.talks) if (s.contains(f)) { speaking_now = true; break; }
            std::optional<std::string> active_speaker;
            for (const auto& other : plans) {
                for (const auto& s : other.talks)
                    if (s.contains(f)) { active_speaker = other.id; break; }
                if (active_speaker) break;
            }
            if (listening_to) {
                // all faces share one row, so the gaze toward the speaker is
                // exactly horizontal
                const PersonPlan* sp = nullptr;
                for (const auto& other : plans) if (other.id == *listening_to) sp = &other;
                const double dir = face_center(sp->seat).x >= face_center(plan.seat).x ? 1.0 : -1.0;
                person.gaze = Point{dir, 0.0};
            } else if (active_speaker && !speaking_now) {
                const PersonPlan* sp = nullptr;
                for (const auto& other : plans) if (other.id == *active_speaker) sp = &other;
                const double dir = face_center(plan.seat).x >= face_center(sp->seat).x ? 1.0 : -1.0;
                person.gaze = Point{dir, 0.0};
            }

            // pose: arms at rest except during exercise
            bool exercising = false;
            for (const auto& s : plan.bouts.at("exercise")) if (s.contains(f)) { exercising = true; break; }
            const bool drop_pose = spec_.noise.dropout > 0.0 && rng.bernoulli(spec_.noise.dropout);
            if (!drop_pose) {
                PoseObservation pose;
                const Point c = seat_center(plan.seat);
                const Point sh_l{c.x - kShoulderHalf, c.y - 60.0};
                const Point sh_r{c.x + kShoulderHalf, c.y - 60.0};
                const Point el_l{sh_l.x, sh_l.y + kUpperArm};
                const Point el_r{sh_r.x, sh_r.y + kUpperArm};
                constexpr double pi = 3.14159265358979323846;
                double theta_l = pi / 2.0, theta_r = pi / 2.0;
                if (exercising) {
                    const auto& sessions_span = plan.bouts.at("exercise").front();
                    const double t_local = static_cast<double>(f - sessions_span.begin) / fps;
                    const ExerciseCategory cat = static_cast<ExerciseCategory>(day % 4);
                    const double freq = cat == ExerciseCategory::high_frequency ? 0.4 : 0.1;
                    const double swing = 1.2 * plan.exercise_intent;
                    const double osc = 0.5 * (1.0 - std::cos(2.0 * pi * freq * t_local));
                    const auto sides = sides_for_category(cat);
                    for (Side side : sides) {
                        if (side == Side::left) theta_l = pi / 2.0 - swing * osc;
                        else theta_r = pi / 2.0 - swing * osc;
                    }
                }
                const Point wr_l{el_l.x + kForearm * std::cos(theta_l), el_l.y + kForearm * std::sin(theta_l)};
                const Point wr_r{el_r.x + kForearm * std::cos(theta_r), el_r.y + kForearm * std::sin(theta_r)};
                auto put = [&](const char* name, Point pt) {
                    if (spec_.noise.landmark_sigma > 0.0) {
                        pt.x += rng.normal(0.0, spec_.noise.landmark_sigma);
                        pt.y += rng.normal(0.0, spec_.noise.landmark_sigma);
                    }
                    pose.joints[name] = Joint{{quantize(pt.x), quantize(pt.y)}, 0.9};
                };
                put("shoulder_l", sh_l);
                put("shoulder_r", sh_r);
                put("elbow_l", el_l);
                put("elbow_r", el_r);
                put("wrist_l", wr_l);
                put("wrist_r", wr_r);
                person.pose = std::move(pose);
            }
            frame.persons.push_back(std::move(person));
        }

        // static furniture
        auto add_object = [&](const std::string& id, const std::string& cat, BBox box) {
            frame.objects.push_back(ObjectDetection::with_category(id, cat, box, 0.95));
        };
        add_object("tv_0", "tv", {20.0, 60.0, 150.0, 150.0});
        add_object("table_0", "table", {120.0, 400.0, 120.0 + 240.0 * plans.size(), 470.0});
        for (const auto& plan : plans) {
            const Point c = seat_center(plan.seat);
            add_object("chair_" + plan.id, "chair", {c.x - 50.0, 380.0, c.x + 50.0, 470.0});
            add_object("cup_" + plan.id, "cup", {c.x - 8.0, 402.0, c.x + 8.0, 424.0});
        }
        out.frames.push_back(std::move(frame));
    }

    // --- clip scores and labels
    const std::uint64_t clip_len = std::max<std::uint64_t>(1, s2f(spec_.clip_len_s));
    const std::uint64_t stride = std::max<std::uint64_t>(1, s2f(spec_.clip_stride_s));
    const auto& activities = temporal_activities();
    for (std::size_t p = 0; p < plans.size(); ++p) {
        const auto& plan = plans[p];
        Rng rng = day_rng.fork(500 + p);
        std::vector<Clip>& clips = out.clips_by_person[plan.id];
        std::uint64_t index = 0;
        for (std::uint64_t start = 0; start + clip_len <= n; start += stride, ++index) {
            Clip clip;
            clip.clip_index = index;
            clip.start_frame = start;
            clip.end_frame = start + clip_len - 1;
            std::set<std::string> truth;
            for (const auto& [name, spans] : plan.bouts) {
                std::uint64_t covered = 0;
                for (const auto& s : spans) {
                    const std::uint64_t lo = std::max(s.begin, start);
                    const std::uint64_t hi = std::min(s.end, start + clip_len);
                    if (hi > lo) covered += hi - lo;
                }
                if (covered * 2 >= clip_len) truth.insert(name);
            }
            std::vector<double> logits(activities.size(), 0.0);
            if (rng.bernoulli(spec_.noise.confusion_prob)) {
                logits[rng.uniform_index(activities.size())] = 1.0;
            } else {
                for (std::size_t a = 0; a < activities.size(); ++a)
                    if (truth.count(activities[a])) logits[a] = 1.0;
            }
            double max_l = -1e300;
            for (std::size_t a = 0; a < activities.size(); ++a) {
                if (spec_.noise.score_sigma > 0.0) logits[a] += rng.normal(0.0, spec_.noise.score_sigma);
                logits[a] /= spec_.noise.score_temperature;
                max_l = std::max(max_l, logits[a]);
            }
            double sum = 0.0;
            clip.scores.resize(activities.size());
            for (std::size_t a = 0; a < activities.size(); ++a) {
                clip.scores[a] = std::exp(logits[a] - max_l);
                sum += clip.scores[a];
            }
            for (auto& s : clip.scores) s /= sum;
            clips.push_back(clip);

            if (!truth.empty()) {
                LabeledInstance label;
                label.person_id = plan.id;
                label.start_frame = clip.start_frame;
                label.end_frame = clip.end_frame;
                label.true_activities = truth;
                out.labels.push_back(std::move(label));
            }
        }
    }

    // --- HOI candidates: positives per scheduled bout, a few sub-threshold
    // negatives per person
    Rng hoi_rng = day_rng.fork(900);
    auto high = [&]() { return 0.88 + 0.1 * hoi_rng.uniform(); };
    auto low = [&]() { return 0.05 + 0.15 * hoi_rng.uniform(); };
    for (const auto& plan : plans) {
        auto emit = [&](const std::string& object, HoiAction action, const FrameSpan& span,
                        bool positive) {
            HoiCandidate c;
            c.person_id = plan.id;
            c.object_id = object;
            c.action = action;
            c.start_frame = span.begin;
            c.end_frame = span.end > 0 ? span.end - 1 : 0;
            c.s_h = high();
            c.s_o = high();
            c.s_h_a = positive ? high() : low();
            c.s_ho_a = positive ? high() : low();
            out.hoi.push_back(std::move(c));
        };
        for (const auto& s : plan.bouts.at("sit_on_chair")) emit("chair_" + plan.id, HoiAction::sit_on, s, true);
        if (auto it = plan.bouts.find("watch_tv"); it != plan.bouts.end())
            for (const auto& s : it->second) emit("tv_0", HoiAction::watch, s, true);
        for (const auto& s : plan.bouts.at("eating")) emit("table_0", HoiAction::eat_at, s, true);
        for (const auto& s : plan.bouts.at("drinking")) emit("cup_" + plan.id, HoiAction::drink_with, s, true);
        // distractor: watching the tv while napping never happened
        emit("tv_0", HoiAction::watch, {frac2f(0.74), frac2f(0.76)}, false);
    }

    // --- sessions, truth intervals, talk seconds
    ExerciseSession session;
    session.session_id = out.date + "_ex0";
    session.category = static_cast<ExerciseCategory>(day % 4);
    session.start_frame = frac2f(0.52);
    session.end_frame = frac2f(0.60) - 1;
    for (const auto& plan : plans) session.participants.push_back(plan.id);
    out.sessions.push_back(std::move(session));

    for (const auto& plan : plans) {
        auto add_truth = [&](Activity act, const FrameSpan& s) {
            if (s.length() == 0) return;
            ActivityInterval iv;
            iv.person_id = plan.id;
            iv.activity = act;
            iv.start_frame = s.begin;
            iv.end_frame = s.end - 1;
            iv.confidence = 1.0;
            out.truth_intervals.push_back(std::move(iv));
        };
        for (const auto& s : plan.yawns) add_truth(Activity::yawn, s);
        for (const auto& s : plan.blinks) add_truth(Activity::blink, s);
        for (const auto& s : plan.naps) add_truth(Activity::nap, s);
        for (const auto& s : plan.talks) add_truth(Activity::talk_speaker, s);
        for (const auto& [s, speaker] : plan.listens) {
            add_truth(Activity::talk_listener, s);
            out.truth_talk_seconds[{speaker, plan.id}] += static_cast<double>(s.length()) / fps;
        }
        for (const auto& [name, spans] : plan.bouts) {
            const auto act = activity_from_string(name);
            for (const auto& s : spans) add_truth(*act, s);
        }
    }
    std::sort(out.truth_intervals.begin(), out.truth_intervals.end(),
              [](const ActivityInterval& a, const ActivityInterval& b) {
                  return std::tie(a.person_id, a.activity, a.start_frame) <
                         std::tie(b.person_id, b.activity, b.start_frame);
              });
    return out;
}

} // namespace wellness
