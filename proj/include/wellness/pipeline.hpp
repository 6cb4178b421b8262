#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wellness/config.hpp"
#include "wellness/cooccur.hpp"
#include "wellness/csv_io.hpp"
#include "wellness/events.hpp"
#include "wellness/exercise.hpp"
#include "wellness/facial.hpp"
#include "wellness/interaction.hpp"
#include "wellness/jsonl_io.hpp"
#include "wellness/svg.hpp"
#include "wellness/synth.hpp"
#include "wellness/temporal.hpp"
#include "wellness/trends.hpp"

namespace wellness {

struct AnalyzeOptions {
    bool skip_bad_records = false;
    int jobs = 1;
};

struct AnalyzeResult {
    std::uint64_t frames = 0;
    std::uint64_t skipped = 0;
    double elapsed_s = 0.0;

    double frames_per_second() const { return elapsed_s > 0.0 ? frames / elapsed_s : 0.0; }
};

// ---------------------------------------------------------------------------
// synth: materialize a scenario in the wire formats

inline void run_synth(const ScenarioSpec& spec, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    ScenarioGenerator gen(spec);
    atomic_write_file(out_dir / "scenario.conf", spec.serialize());
    atomic_write_file(out_dir / "engine.conf", gen.matched_config().serialize());
    for (int d = 0; d < spec.n_days; ++d) {
        const SynthDay day = gen.generate_day(d);
        const fs::path day_dir = out_dir / "days" / day.date;
        std::string frames;
        for (const auto& frame : day.frames) {
            frames += serialize_frame(frame);
            frames += '\n';
        }
        atomic_write_file(day_dir / "frames.jsonl", frames);

        std::string clips;
        for (const auto& [person, person_clips] : day.clips_by_person)
            for (const auto& clip : person_clips) {
                clips += serialize_clip(person, clip);
                clips += '\n';
            }
        atomic_write_file(day_dir / "clip_scores.jsonl", clips);

        std::string hoi;
        for (const auto& c : day.hoi) {
            hoi += serialize_hoi(c);
            hoi += '\n';
        }
        atomic_write_file(day_dir / "hoi.jsonl", hoi);
        atomic_write_file(day_dir / "labels.csv", serialize_labels(day.labels));
        atomic_write_file(day_dir / "sessions.csv", serialize_sessions(day.sessions));

        const fs::path truth_dir = out_dir / "truth" / day.date;
        atomic_write_file(truth_dir / "intervals.csv", serialize_intervals(day.truth_intervals));
        atomic_write_file(truth_dir / "talk_pairs.csv", serialize_talk_pairs(day.truth_talk_seconds));
    }
}

// ---------------------------------------------------------------------------
// analyze

namespace pipeline_detail {

namespace fs = std::filesystem;

inline std::vector<std::string> list_day_dirs(const fs::path& root) {
    std::vector<std::string> days;
    const fs::path days_dir = root / "days";
    if (!fs::exists(days_dir)) return days;
    for (const auto& entry : fs::directory_iterator(days_dir))
        if (entry.is_directory()) days.push_back(entry.path().filename().string());
    std::sort(days.begin(), days.end());
    return days;
}

struct PersonTracks {
    FaceTrack face;
    std::vector<std::optional<PoseObservation>> poses;
};

// Per-person contiguous tracks over the day span; face observations follow
// the associate_faces assignment, not the carrying observation.
inline std::map<std::string, PersonTracks> build_tracks(const std::vector<FrameEvent>& frames) {
    std::map<std::string, PersonTracks> tracks;
    if (frames.empty()) return tracks;
    const std::uint64_t first = frames.front().frame_index;
    const std::uint64_t last = frames.back().frame_index;
    const std::size_t span = static_cast<std::size_t>(last - first + 1);
    for (const auto& frame : frames)
        for (const auto& person : frame.persons) {
            auto [it, inserted] = tracks.try_emplace(person.person_id);
            if (inserted) {
                it->second.face.person_id = person.person_id;
                it->second.face.first_frame = first;
                it->second.face.faces.resize(span);
                it->second.poses.resize(span);
            }
        }
    for (const auto& frame : frames) {
        const std::size_t off = static_cast<std::size_t>(frame.frame_index - first);
        for (const auto& person : frame.persons) {
            if (person.pose) tracks[person.person_id].poses[off] = *person.pose;
            if (person.face && person.face->assigned_person)
                tracks[*person.face->assigned_person].face.faces[off] = *person.face;
        }
    }
    return tracks;
}

struct DayAnalysis {
    std::string date;
    std::uint64_t frame_count = 0; // highest frame index + 1
    std::uint64_t parsed = 0;
    std::uint64_t skipped = 0;
    std::vector<ActivityInterval> intervals;
    std::map<std::pair<std::string, std::string>, double> talk_seconds;
    std::vector<EisSample> samples;
    std::map<std::string, ClipScoreSeries> series;
    std::map<std::string, std::vector<LabeledInstance>> labels;
};

inline double frames_to_minutes(std::uint64_t n_frames, double fps) {
    return static_cast<double>(n_frames) / fps / 60.0;
}

// One activity's per-clip coverage fraction of detected intervals.
inline std::vector<double> coverage_channel(const ClipScoreSeries& series,
                                            const std::vector<ActivityInterval>& intervals,
                                            const std::string& person, Activity activity) {
    std::vector<double> out(series.clips.size(), 0.0);
    for (std::size_t c = 0; c < series.clips.size(); ++c) {
        const Clip& clip = series.clips[c];
        const std::uint64_t len = clip.end_frame - clip.start_frame + 1;
        std::uint64_t covered = 0;
        for (const auto& iv : intervals) {
            if (iv.person_id != person || iv.activity != activity) continue;
            const std::uint64_t lo = std::max(iv.start_frame, clip.start_frame);
            const std::uint64_t hi = std::min(iv.end_frame, clip.end_frame);
            if (lo <= hi) covered += hi - lo + 1;
        }
        out[c] = std::min(1.0, static_cast<double>(covered) / static_cast<double>(len));
    }
    return out;
}

inline std::vector<double> boxcar(const std::vector<double>& v, int window) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
    const std::ptrdiff_t half = window / 2;
    std::vector<double> out(v.size(), 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi = std::min(n - 1, i + half);
        double acc = 0.0;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) acc += v[j];
        out[i] = acc / static_cast<double>(hi - lo + 1);
    }
    return out;
}

inline DayAnalysis analyze_day(const fs::path& in_day, const fs::path& out_day,
                               const EngineConfig& cfg, bool skip_bad) {
    DayAnalysis day;
    day.date = in_day.filename().string();

    std::vector<FrameEvent> frames;
    {
        std::ifstream in(in_day / "frames.jsonl", std::ios::binary);
        if (in) {
            FrameStreamParser parser(in, skip_bad);
            while (auto frame = parser.next()) frames.push_back(associate_faces(std::move(*frame)));
            day.skipped = parser.skipped();
        }
    }
    day.parsed = frames.size();
    if (!frames.empty()) day.frame_count = frames.back().frame_index + 1;

    auto tracks = build_tracks(frames);

    // facial rules per person
    for (auto& [person, track] : tracks) {
        auto yawns = detect_yawns(track.face, cfg.facial);
        auto closures = detect_eye_closures(track.face, cfg.facial);
        auto talks = detect_speaking(track.face, cfg.facial);
        day.intervals.insert(day.intervals.end(), yawns.begin(), yawns.end());
        day.intervals.insert(day.intervals.end(), closures.begin(), closures.end());
        day.intervals.insert(day.intervals.end(), talks.begin(), talks.end());
    }

    // stage two of talking: listener roles and speaker->listener seconds
    if (!frames.empty()) {
        const std::uint64_t first = frames.front().frame_index;
        const std::size_t span = static_cast<std::size_t>(day.frame_count - first);
        std::map<std::string, std::vector<bool>> listener_marks;
        std::map<std::uint64_t, std::set<std::string>> speakers_by_frame;
        for (const auto& iv : day.intervals) {
            if (iv.activity != Activity::talk_speaker) continue;
            for (std::uint64_t f = iv.start_frame; f <= iv.end_frame; ++f)
                speakers_by_frame[f].insert(iv.person_id);
        }
        std::map<std::pair<std::string, std::string>, std::uint64_t> pair_frames;
        for (const auto& frame : frames) {
            auto it = speakers_by_frame.find(frame.frame_index);
            if (it == speakers_by_frame.end()) continue;
            for (const auto& role : classify_listeners(frame, it->second)) {
                if (role.role != TalkRole::active_listener) continue;
                auto [mit, inserted] = listener_marks.try_emplace(role.person_id);
                if (inserted) mit->second.resize(span, false);
                mit->second[static_cast<std::size_t>(role.frame_index - first)] = true;
            }
            for (const auto& pair : talking_pairs(frame, it->second)) ++pair_frames[pair];
        }
        for (const auto& [person, marks] : listener_marks) {
            std::size_t i = 0;
            while (i < marks.size()) {
                if (!marks[i]) { ++i; continue; }
                std::size_t j = i;
                while (j < marks.size() && marks[j]) ++j;
                ActivityInterval iv;
                iv.person_id = person;
                iv.activity = Activity::talk_listener;
                iv.start_frame = first + i;
                iv.end_frame = first + j - 1;
                iv.confidence = 1.0;
                day.intervals.push_back(std::move(iv));
                i = j;
            }
        }
        for (const auto& [pair, count] : pair_frames)
            day.talk_seconds[pair] = static_cast<double>(count) / cfg.fps;
    }

    std::sort(day.intervals.begin(), day.intervals.end(),
              [](const ActivityInterval& a, const ActivityInterval& b) {
                  return std::tie(a.person_id, a.activity, a.start_frame) <
                         std::tie(b.person_id, b.activity, b.start_frame);
              });

    // exercise intensity over the session manifest
    std::vector<ExerciseSession> sessions;
    if (fs::exists(in_day / "sessions.csv")) sessions = parse_sessions(in_day / "sessions.csv");
    std::ostringstream summary_csv;
    summary_csv << "session_id,person,mean,stddev,samples,ratio_to_reference\n";
    for (const auto& session : sessions) {
        const std::uint64_t win = static_cast<std::uint64_t>(std::max(2, cfg.eis.window_frames));
        const std::uint64_t step = std::max<std::uint64_t>(1, win / 2);
        std::vector<EisSample> session_samples;
        for (const auto& [person, track] : tracks) {
            const std::uint64_t first = track.face.first_frame;
            for (std::uint64_t w0 = session.start_frame; w0 + win <= session.end_frame + 1;
                 w0 += step) {
                if (w0 < first) continue;
                const std::size_t off = static_cast<std::size_t>(w0 - first);
                if (off + win > track.poses.size()) break;
                std::vector<std::optional<PoseObservation>> window(
                    track.poses.begin() + static_cast<std::ptrdiff_t>(off),
                    track.poses.begin() + static_cast<std::ptrdiff_t>(off + win));
                for (Side side : sides_for_category(session.category)) {
                    try {
                        EisSample sample;
                        sample.person_id = person;
                        sample.start_frame = w0;
                        sample.end_frame = w0 + win - 1;
                        sample.side = side;
                        sample.meta = meta_features(window, side, cfg.eis);
                        sample.f_eis = exercise_intensity(sample.meta, cfg.eis.weights);
                        session_samples.push_back(sample);
                    } catch (const InsufficientPose&) {
                        // window without usable poses contributes nothing
                    }
                }
            }
        }
        for (const auto& st :
             session_summary(session_samples, session, cfg.eis.reference_person)) {
            summary_csv << session.session_id << ',' << st.person_id << ',' << format_num(st.mean)
                        << ',' << format_num(st.stddev) << ',' << st.sample_count << ','
                        << (st.ratio_to_reference ? format_num(*st.ratio_to_reference) : "")
                        << '\n';
        }
        day.samples.insert(day.samples.end(), session_samples.begin(), session_samples.end());
    }

    // clip scores and labels
    if (fs::exists(in_day / "clip_scores.jsonl")) {
        std::ifstream in(in_day / "clip_scores.jsonl", std::ios::binary);
        for (auto& series : parse_clip_scores(in)) day.series[series.person_id] = std::move(series);
    }
    if (fs::exists(in_day / "labels.csv")) {
        for (auto& label : parse_labels(in_day / "labels.csv"))
            day.labels[label.person_id].push_back(std::move(label));
    }

    // scene graphs over fixed windows
    std::string graphs_jsonl;
    if (!frames.empty()) {
        std::vector<HoiCandidate> accepted;
        if (fs::exists(in_day / "hoi.jsonl")) {
            std::ifstream in(in_day / "hoi.jsonl", std::ios::binary);
            for (auto& c : parse_hoi_stream(in))
                if (hoi_score(c) >= cfg.hoi_thr) accepted.push_back(std::move(c));
        }
        const std::uint64_t first = frames.front().frame_index;
        const std::uint64_t win = static_cast<std::uint64_t>(std::max(1, cfg.interaction_window_frames));
        for (std::uint64_t w0 = first; w0 < day.frame_count; w0 += win) {
            const std::uint64_t w1 = std::min(day.frame_count, w0 + win);
            std::size_t lo = static_cast<std::size_t>(w0 - first);
            std::size_t hi = static_cast<std::size_t>(w1 - first);
            hi = std::min<std::size_t>(hi, frames.size());
            lo = std::min(lo, hi);
            std::vector<HoiCandidate> window_hoi;
            for (const auto& c : accepted)
                if (c.start_frame < w1 && c.end_frame >= w0) window_hoi.push_back(c);
            const SceneGraph graph =
                build_scene_graph(std::span<const FrameEvent>(frames.data() + lo, hi - lo),
                                  day.intervals, window_hoi);
            graphs_jsonl += serialize_scene_graph(graph);
            graphs_jsonl += '\n';
        }
    }

    // per-day artifacts
    std::string raw_scores;
    for (const auto& [person, series] : day.series)
        for (const auto& clip : series.clips) {
            raw_scores += serialize_clip(person, clip);
            raw_scores += '\n';
        }
    atomic_write_file(out_day / "intervals.csv", serialize_intervals(day.intervals));
    atomic_write_file(out_day / "talk_pairs.csv", serialize_talk_pairs(day.talk_seconds));
    atomic_write_file(out_day / "eis_samples.csv", serialize_eis_samples(day.samples));
    atomic_write_file(out_day / "eis_summary.csv", summary_csv.str());
    atomic_write_file(out_day / "scores_raw.jsonl", raw_scores);
    atomic_write_file(out_day / "scene_graphs.jsonl", graphs_jsonl);
    atomic_write_file(out_day / "day_meta.txt", "frames = " + std::to_string(day.frame_count) + "\n");
    return day;
}

} // namespace pipeline_detail

inline AnalyzeResult run_analyze(const std::filesystem::path& input_dir, const EngineConfig& cfg,
                                 const std::filesystem::path& out_dir,
                                 const AnalyzeOptions& opt = {}) {
    namespace fs = std::filesystem;
    using namespace pipeline_detail;
    const auto t0 = std::chrono::steady_clock::now();

    const auto days = list_day_dirs(input_dir);
    std::vector<DayAnalysis> results(days.size());

    // days are independent; spread them over the worker pool
    {
        std::atomic<std::size_t> next{0};
        std::mutex err_mutex;
        std::exception_ptr first_error;
        auto worker = [&]() {
            for (std::size_t i = next.fetch_add(1); i < days.size(); i = next.fetch_add(1)) {
                try {
                    results[i] = analyze_day(input_dir / "days" / days[i],
                                             out_dir / "days" / days[i], cfg,
                                             opt.skip_bad_records);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        const int jobs = std::max(1, opt.jobs);
        std::vector<std::thread> pool;
        for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    // pooled smoothing plan
    std::vector<EvalUnit> units;
    bool have_labels = false;
    for (const auto& day : results)
        for (const auto& [person, series] : day.series) {
            EvalUnit unit;
            unit.series = series;
            if (auto it = day.labels.find(person); it != day.labels.end()) unit.labels = it->second;
            have_labels = have_labels || !unit.labels.empty();
            units.push_back(std::move(unit));
        }
    WindowPlan plan;
    if (have_labels && !units.empty()) {
        plan = grid_search_windows(units, cfg.candidate_windows);
    } else {
        for (const auto& a : temporal_activities()) plan.windows[a] = cfg.fixed_window;
    }
    atomic_write_file(out_dir / "window_plan.txt", serialize_window_plan(plan));

    // smooth, correlate, correct
    std::map<std::string, std::map<std::string, ClipScoreSeries>> smoothed; // date -> person -> series
    for (auto& day : results)
        for (const auto& [person, series] : day.series)
            smoothed[day.date][person] = smooth_per_activity(series, plan);

    const auto& matrix_acts = cfg.cooccur_activities;
    std::vector<std::vector<double>> streams(matrix_acts.size());
    for (const auto& day : results) {
        for (const auto& [person, series] : day.series) {
            const auto& sm = smoothed[day.date][person];
            for (std::size_t a = 0; a < matrix_acts.size(); ++a) {
                std::vector<double> channel;
                auto it = std::find(sm.activities.begin(), sm.activities.end(), matrix_acts[a]);
                if (it != sm.activities.end()) {
                    const std::size_t chan = static_cast<std::size_t>(it - sm.activities.begin());
                    channel.reserve(sm.clips.size());
                    for (const auto& clip : sm.clips) channel.push_back(clip.scores[chan]);
                } else if (auto act = activity_from_string(matrix_acts[a])) {
                    channel = coverage_channel(series, day.intervals, person, *act);
                } else {
                    channel.assign(series.clips.size(), 0.0);
                }
                channel = boxcar(channel, cfg.cooccur_smooth_window);
                streams[a].insert(streams[a].end(), channel.begin(), channel.end());
            }
        }
    }
    std::optional<CorrelationMatrix> matrix;
    if (!streams.empty() && streams.front().size() >= 2) {
        matrix = correlation_matrix(matrix_acts, streams);
        atomic_write_file(out_dir / "corr_matrix.csv", serialize_correlation_matrix(*matrix));
    }

    // the 5-channel submatrix drives the per-clip correction, applied exactly
    // once per clip
    CorrelationMatrix sub = CorrelationMatrix::identity(temporal_activities());
    if (matrix) {
        const auto& acts = temporal_activities();
        for (std::size_t i = 0; i < acts.size(); ++i)
            for (std::size_t j = 0; j < acts.size(); ++j) {
                auto it_i = std::find(matrix_acts.begin(), matrix_acts.end(), acts[i]);
                auto it_j = std::find(matrix_acts.begin(), matrix_acts.end(), acts[j]);
                if (it_i != matrix_acts.end() && it_j != matrix_acts.end())
                    sub.eta[i][j] = matrix->eta[static_cast<std::size_t>(it_i - matrix_acts.begin())]
                                               [static_cast<std::size_t>(it_j - matrix_acts.begin())];
            }
    }
    for (const auto& day : results) {
        std::string smooth_lines, corrected_lines;
        for (const auto& [person, sm] : smoothed[day.date]) {
            ClipScoreSeries corrected = sm;
            for (auto& clip : corrected.clips)
                clip.scores = correct_predictions(clip.scores, sub, cfg.cooccur_mode, cfg.cooccur_gain);
            for (std::size_t c = 0; c < sm.clips.size(); ++c) {
                smooth_lines += serialize_clip(person, sm.clips[c]);
                smooth_lines += '\n';
                corrected_lines += serialize_clip(person, corrected.clips[c]);
                corrected_lines += '\n';
            }
        }
        atomic_write_file(out_dir / "days" / day.date / "scores_smoothed.jsonl", smooth_lines);
        atomic_write_file(out_dir / "days" / day.date / "scores_corrected.jsonl", corrected_lines);
    }

    // daily wellness metrics per person
    std::set<std::string> persons;
    for (const auto& day : results) {
        for (const auto& iv : day.intervals) persons.insert(iv.person_id);
        for (const auto& [person, series] : day.series) persons.insert(person);
    }
    for (const auto& person : persons) {
        std::map<TrendMetric, TrendSeries> series;
        for (TrendMetric m : {TrendMetric::nap_minutes, TrendMetric::yawn_count,
                              TrendMetric::blink_rate_per_min, TrendMetric::mean_eis,
                              TrendMetric::talk_minutes}) {
            series[m].person_id = person;
            series[m].metric = m;
        }
        for (const auto& day : results) {
            double nap_min = 0.0, yawns = 0.0, blinks = 0.0, talk_min = 0.0;
            for (const auto& iv : day.intervals) {
                if (iv.person_id != person) continue;
                if (iv.activity == Activity::nap)
                    nap_min += frames_to_minutes(iv.duration_frames(), cfg.fps);
                else if (iv.activity == Activity::yawn) yawns += 1.0;
                else if (iv.activity == Activity::blink) blinks += 1.0;
                else if (iv.activity == Activity::talk_speaker)
                    talk_min += frames_to_minutes(iv.duration_frames(), cfg.fps);
            }
            double eis_sum = 0.0;
            std::size_t eis_count = 0;
            for (const auto& s : day.samples) {
                if (s.person_id != person) continue;
                eis_sum += s.f_eis;
                ++eis_count;
            }
            const double day_minutes = frames_to_minutes(day.frame_count, cfg.fps);
            series[TrendMetric::nap_minutes].points.push_back({day.date, nap_min});
            series[TrendMetric::yawn_count].points.push_back({day.date, yawns});
            series[TrendMetric::blink_rate_per_min].points.push_back(
                {day.date, day_minutes > 0.0 ? blinks / day_minutes : 0.0});
            series[TrendMetric::mean_eis].points.push_back(
                {day.date, eis_count > 0 ? eis_sum / static_cast<double>(eis_count) : 0.0});
            series[TrendMetric::talk_minutes].points.push_back({day.date, talk_min});
        }
        for (const auto& [metric, s] : series)
            atomic_write_file(out_dir / "trends" / person / (std::string(to_string(metric)) + ".csv"),
                              serialize_trend(s));
    }

    // close relationships over the whole span
    std::vector<std::map<std::pair<std::string, std::string>, double>> talk_by_day;
    for (const auto& day : results) talk_by_day.push_back(day.talk_seconds);
    std::ostringstream rel_csv;
    rel_csv << "person_a,person_b,avg_talk_s_per_day,is_close\n";
    if (!talk_by_day.empty()) {
        for (const auto& r : close_relationships(talk_by_day, cfg.t_th_seconds))
            rel_csv << r.person_a << ',' << r.person_b << ','
                    << format_num(r.average_talk_seconds_per_day) << ','
                    << (r.is_close ? "true" : "false") << '\n';
    }
    atomic_write_file(out_dir / "relationships.csv", rel_csv.str());
    atomic_write_file(out_dir / "engine.conf", cfg.serialize());

    AnalyzeResult res;
    for (const auto& day : results) {
        res.frames += day.parsed;
        res.skipped += day.skipped;
    }
    res.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// ---------------------------------------------------------------------------
// eval: the ablation table

enum class SlidingMode { off, fixed, dynamic };

struct EvalOptions {
    std::optional<SlidingMode> sliding; // restrict to one cell when set
    std::optional<bool> cooccur;
};

struct EvalRow {
    std::string name;
    std::vector<std::optional<double>> ap;
    std::optional<double> map;
};

struct EvalResult {
    std::vector<std::string> activities;
    std::vector<EvalRow> rows;
    WindowPlan plan;
    int best_fixed_window = 1;

    std::string to_csv() const {
        std::ostringstream out;
        out << "config";
        for (const auto& a : activities) out << ',' << a;
        out << ",mAP\n";
        for (const auto& row : rows) {
            out << row.name;
            for (const auto& ap : row.ap) out << ',' << (ap ? format_num(*ap) : "");
            out << ',' << (row.map ? format_num(*row.map) : "") << '\n';
        }
        return out.str();
    }
};

namespace pipeline_detail {

// AP over all units for each activity, given per-unit channel values.
inline EvalRow score_cell(const std::string& name, const std::vector<EvalUnit>& units,
                          const std::vector<std::vector<std::vector<double>>>& channels) {
    const auto& acts = units.front().series.activities;
    EvalRow row;
    row.name = name;
    for (std::size_t a = 0; a < acts.size(); ++a) {
        std::vector<std::pair<double, bool>> rows;
        for (std::size_t u = 0; u < units.size(); ++u)
            wellness::detail::append_score_rows(units[u], channels[u][a], acts[a], rows);
        row.ap.push_back(average_precision(rows));
    }
    row.map = mean_ap(row.ap);
    return row;
}

// Channel values for one smoothing configuration, optionally corrected with
// the correlation feedback (eta computed from these same channels).
inline std::vector<std::vector<std::vector<double>>> build_channels(
    const std::vector<EvalUnit>& units, const std::optional<WindowPlan>& plan, int uniform_w,
    bool cooccur, const EngineConfig& cfg) {
    const auto& acts = units.front().series.activities;
    std::vector<std::vector<std::vector<double>>> channels(units.size());
    for (std::size_t u = 0; u < units.size(); ++u) {
        channels[u].resize(acts.size());
        for (std::size_t a = 0; a < acts.size(); ++a) {
            const int w = plan ? plan->window_for(acts[a]) : uniform_w;
            channels[u][a] = smooth_channel(units[u].series, a, w);
        }
    }
    if (!cooccur) return channels;

    std::vector<std::vector<double>> streams(acts.size());
    for (std::size_t u = 0; u < units.size(); ++u)
        for (std::size_t a = 0; a < acts.size(); ++a)
            streams[a].insert(streams[a].end(), channels[u][a].begin(), channels[u][a].end());
    const auto eta = correlation_matrix(acts, streams);
    for (std::size_t u = 0; u < units.size(); ++u) {
        const std::size_t n_clips = units[u].series.clips.size();
        for (std::size_t c = 0; c < n_clips; ++c) {
            std::vector<double> p(acts.size());
            for (std::size_t a = 0; a < acts.size(); ++a) p[a] = channels[u][a][c];
            p = correct_predictions(p, eta, cfg.cooccur_mode, cfg.cooccur_gain);
            for (std::size_t a = 0; a < acts.size(); ++a) channels[u][a][c] = p[a];
        }
    }
    return channels;
}

} // namespace pipeline_detail

// Loads the analysis raw scores plus labels and computes the AP table across
// the ablation cells. `labels_root` is the dataset root (days/<date>/labels.csv).
inline EvalResult run_eval(const std::filesystem::path& analysis_dir,
                           const std::filesystem::path& labels_root, const EngineConfig& cfg,
                           const EvalOptions& opt = {}) {
    namespace fs = std::filesystem;
    using namespace pipeline_detail;

    std::vector<EvalUnit> units;
    for (const auto& date : list_day_dirs(analysis_dir)) {
        const fs::path scores_path = analysis_dir / "days" / date / "scores_raw.jsonl";
        if (!fs::exists(scores_path)) continue;
        std::ifstream in(scores_path, std::ios::binary);
        auto series_list = parse_clip_scores(in);
        fs::path labels_path = labels_root / "days" / date / "labels.csv";
        if (!fs::exists(labels_path)) labels_path = labels_root / date / "labels.csv";
        if (!fs::exists(labels_path) && fs::is_regular_file(labels_root)) labels_path = labels_root;
        std::map<std::string, std::vector<LabeledInstance>> by_person;
        if (fs::exists(labels_path))
            for (auto& label : parse_labels(labels_path)) by_person[label.person_id].push_back(label);
        for (auto& series : series_list) {
            EvalUnit unit;
            if (auto it = by_person.find(series.person_id); it != by_person.end())
                unit.labels = it->second;
            unit.series = std::move(series);
            units.push_back(std::move(unit));
        }
    }
    std::size_t n_labels = 0;
    for (const auto& unit : units) n_labels += unit.labels.size();
    if (units.empty() || n_labels == 0) throw NoLabels();

    EvalResult result;
    result.activities = units.front().series.activities;
    result.plan = grid_search_windows(units, cfg.candidate_windows);

    // best single fixed window by mAP
    std::optional<double> best_map;
    for (int w : cfg.candidate_windows) {
        const auto channels = build_channels(units, std::nullopt, w, false, cfg);
        const auto row = score_cell("fixed", units, channels);
        if (row.map && (!best_map || *row.map > *best_map)) {
            best_map = row.map;
            result.best_fixed_window = w;
        }
    }

    auto want = [&](SlidingMode s, bool c) {
        if (opt.sliding && *opt.sliding != s) return false;
        if (opt.cooccur && *opt.cooccur != c) return false;
        return true;
    };
    struct Cell {
        std::string name;
        SlidingMode sliding;
        bool cooccur;
    };
    const std::vector<Cell> cells = {
        {"baseline", SlidingMode::off, false},
        {"baseline+fixed_sliding", SlidingMode::fixed, false},
        {"baseline+sliding", SlidingMode::dynamic, false},
        {"baseline+cooccur", SlidingMode::off, true},
        {"baseline+cooccur+sliding", SlidingMode::dynamic, true},
    };
    for (const auto& cell : cells) {
        if (!want(cell.sliding, cell.cooccur)) continue;
        std::optional<WindowPlan> plan;
        int uniform_w = 1;
        if (cell.sliding == SlidingMode::dynamic) plan = result.plan;
        else if (cell.sliding == SlidingMode::fixed) uniform_w = result.best_fixed_window;
        const auto channels = build_channels(units, plan, uniform_w, cell.cooccur, cfg);
        auto row = score_cell(cell.name, units, channels);
        if (cell.sliding == SlidingMode::fixed)
            row.name += " (W=" + std::to_string(result.best_fixed_window) + ")";
        result.rows.push_back(std::move(row));
    }

    atomic_write_file(analysis_dir / "eval" / "ap_table.csv", result.to_csv());
    atomic_write_file(analysis_dir / "eval" / "window_plan.txt", serialize_window_plan(result.plan));
    return result;
}

// ---------------------------------------------------------------------------
// report: SVG/DOT renderings and the alert log

inline std::vector<Alert> run_report(const std::filesystem::path& analysis_dir,
                                     const std::filesystem::path& out_dir,
                                     const EngineConfig& cfg) {
    namespace fs = std::filesystem;
    using namespace pipeline_detail;
    std::vector<Alert> alerts;

    const FrameClock clock{cfg.fps, cfg.day_start_s};
    for (const auto& date : list_day_dirs(analysis_dir)) {
        const fs::path day_dir = analysis_dir / "days" / date;
        std::uint64_t frame_count = 0;
        if (fs::exists(day_dir / "day_meta.txt")) {
            for (const auto& [k, v] : config_detail::read_kv_file((day_dir / "day_meta.txt").string()))
                if (k == "frames") frame_count = csv_detail::to_uint(v, "day meta frames");
        }
        std::vector<ActivityInterval> intervals;
        if (fs::exists(day_dir / "intervals.csv")) intervals = parse_intervals(day_dir / "intervals.csv");
        std::map<std::string, ClipScoreSeries> series;
        if (fs::exists(day_dir / "scores_smoothed.jsonl")) {
            std::ifstream in(day_dir / "scores_smoothed.jsonl", std::ios::binary);
            for (auto& s : parse_clip_scores(in)) series[s.person_id] = std::move(s);
        }
        std::set<std::string> persons;
        for (const auto& iv : intervals) persons.insert(iv.person_id);
        for (const auto& [person, s] : series) persons.insert(person);

        const double day_seconds = frame_count > 0 ? static_cast<double>(frame_count) / cfg.fps : 0.0;
        const std::size_t n_bins = day_seconds > 0.0
            ? static_cast<std::size_t>(std::ceil(day_seconds / cfg.trends.bin_width_s))
            : 0;

        for (const auto& person : persons) {
            static const ClipScoreSeries empty_series = [] {
                ClipScoreSeries s;
                s.activities = temporal_activities();
                return s;
            }();
            const auto sit = series.find(person);
            const TemporalHeatmap hm = activity_heatmap(
                person, date, intervals, sit != series.end() ? sit->second : empty_series,
                cfg.trends.heatmap_activities, clock, cfg.day_start_s, n_bins,
                cfg.trends.bin_width_s);
            atomic_write_file(out_dir / person / date / "heatmap.svg", svg_heatmap(hm));

            std::vector<ActivityInterval> mine;
            for (const auto& iv : intervals)
                if (iv.person_id == person) mine.push_back(iv);
            for (HourlyMetric metric :
                 {HourlyMetric::nap_minutes, HourlyMetric::yawn_count, HourlyMetric::blink_count}) {
                const auto bins = hourly_histogram(mine, clock, metric);
                std::vector<std::string> labels;
                std::vector<double> values;
                for (int h = 0; h < 24; ++h) {
                    labels.push_back(std::to_string(h));
                    values.push_back(bins[static_cast<std::size_t>(h)]);
                }
                atomic_write_file(out_dir / person / date /
                                      ("hist_" + std::string(to_string(metric)) + ".svg"),
                                  svg_bar_chart(person + " " + date + " " + to_string(metric),
                                                labels, values));
            }
            for (const auto& activity : cfg.trends.gap_activities) {
                if (std::find(hm.activities.begin(), hm.activities.end(), activity) ==
                    hm.activities.end())
                    continue;
                auto gap_alerts = expected_activity_gaps(
                    hm, activity, cfg.trends.presence_thr,
                    static_cast<std::size_t>(std::max(1, cfg.trends.min_gap_bins)),
                    cfg.trends.off_schedule_s);
                alerts.insert(alerts.end(), gap_alerts.begin(), gap_alerts.end());
            }
        }
        // scene graphs to DOT
        if (fs::exists(day_dir / "scene_graphs.jsonl")) {
            std::ifstream in(day_dir / "scene_graphs.jsonl", std::ios::binary);
            for (const auto& graph : parse_scene_graphs(in)) {
                const std::string name =
                    "scenegraph_" + date + "_" + std::to_string(graph.window_start) + ".dot";
                atomic_write_file(out_dir / name, dot_scene_graph(graph));
            }
        }
    }

    // long-term trends and anomaly alerts
    const fs::path trends_dir = analysis_dir / "trends";
    if (fs::exists(trends_dir)) {
        std::vector<std::string> persons;
        for (const auto& entry : fs::directory_iterator(trends_dir))
            if (entry.is_directory()) persons.push_back(entry.path().filename().string());
        std::sort(persons.begin(), persons.end());
        for (const auto& person : persons) {
            for (TrendMetric metric : {TrendMetric::nap_minutes, TrendMetric::yawn_count,
                                       TrendMetric::blink_rate_per_min, TrendMetric::mean_eis,
                                       TrendMetric::talk_minutes}) {
                const fs::path csv = trends_dir / person / (std::string(to_string(metric)) + ".csv");
                if (!fs::exists(csv)) continue;
                const TrendSeries s = parse_trend(csv, person, metric);
                std::vector<std::string> dates;
                std::vector<double> values;
                for (const auto& p : s.points) {
                    dates.push_back(p.date);
                    values.push_back(p.value);
                }
                atomic_write_file(out_dir / person /
                                      ("trend_" + std::string(to_string(metric)) + ".svg"),
                                  svg_line_chart(person + " " + to_string(metric), dates, values));
                if (s.points.size() >= static_cast<std::size_t>(cfg.trends.baseline_days) + 1) {
                    auto metric_alerts = detect_metric_anomalies(
                        s, cfg.trends.alert_z, static_cast<std::size_t>(cfg.trends.baseline_days));
                    alerts.insert(alerts.end(), metric_alerts.begin(), metric_alerts.end());
                }
            }
        }
    }

    if (fs::exists(analysis_dir / "corr_matrix.csv")) {
        const auto matrix = parse_correlation_matrix(analysis_dir / "corr_matrix.csv");
        atomic_write_file(out_dir / "corr_matrix.csv", serialize_correlation_matrix(matrix));
        atomic_write_file(out_dir / "corr_matrix.svg", svg_matrix(matrix));
    }

    std::sort(alerts.begin(), alerts.end(), [](const Alert& a, const Alert& b) {
        return std::tie(a.person_id, a.date, a.kind, a.gap_start_bin) <
               std::tie(b.person_id, b.date, b.kind, b.gap_start_bin);
    });
    std::string alert_lines;
    for (const auto& a : alerts) {
        rapidjson::StringBuffer buf;
        jsonl_detail::JsonWriter w(buf);
        w.StartObject();
        w.Key("person");
        w.String(a.person_id.c_str(), static_cast<rapidjson::SizeType>(a.person_id.size()));
        w.Key("kind");
        w.String(to_string(a.kind));
        w.Key("at");
        w.String(a.date.c_str(), static_cast<rapidjson::SizeType>(a.date.size()));
        w.Key("severity");
        if (a.severity_infinite) w.String("inf");
        else w.Double(a.severity);
        w.Key("msg");
        w.String(a.message.c_str(), static_cast<rapidjson::SizeType>(a.message.size()));
        w.EndObject();
        alert_lines += std::string(buf.GetString(), buf.GetSize());
        alert_lines += '\n';
    }
    atomic_write_file(out_dir / "alerts.jsonl", alert_lines);
    return alerts;
}

} // namespace wellness
