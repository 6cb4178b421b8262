#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wellness/cooccur.hpp"
#include "wellness/errors.hpp"
#include "wellness/exercise.hpp"
#include "wellness/facial.hpp"
#include "wellness/temporal.hpp"
#include "wellness/trends.hpp"

namespace wellness {

// Shortest round-trip decimal form; used everywhere numbers are written so
// that reruns are byte-identical and parse-back is exact.
inline std::string format_num(double v) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

// Write-temp-then-rename so readers never observe a partial file.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoFailure("cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out.good()) throw IoFailure("short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, path, ec);
    if (ec) throw IoFailure("rename to '" + path.string() + "' failed: " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace csv_detail {

inline std::vector<std::string> split_line(const std::string& line, char delim = ',') {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, delim)) fields.push_back(field);
    if (!line.empty() && line.back() == delim) fields.push_back("");
    return fields;
}

inline double to_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw MalformedRecord(0, context + ": expected number, got '" + s + "'");
    }
}

inline std::uint64_t to_uint(const std::string& s, const std::string& context) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw MalformedRecord(0, context + ": expected non-negative integer, got '" + s + "'");
    return v;
}

// Strict table reader: exact header, exact column count per row.
inline std::vector<std::vector<std::string>> read_table(const std::filesystem::path& path,
                                                        const std::string& header) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw MalformedRecord(1, "empty CSV '" + path.string() + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header)
        throw MalformedRecord(1, "unexpected CSV header in '" + path.string() + "': " + line);
    const std::size_t columns = split_line(header).size();
    std::vector<std::vector<std::string>> rows;
    std::uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != columns)
            throw MalformedRecord(line_no, "wrong column count in '" + path.string() + "'");
        rows.push_back(std::move(fields));
    }
    return rows;
}

} // namespace csv_detail

// --- labels: person,start,end,activities (activities ';'-separated)

inline std::string serialize_labels(const std::vector<LabeledInstance>& labels) {
    std::ostringstream out;
    out << "person,start,end,activities\n";
    for (const auto& l : labels) {
        out << l.person_id << ',' << l.start_frame << ',' << l.end_frame << ',';
        bool first = true;
        for (const auto& a : l.true_activities) {
            out << (first ? "" : ";") << a;
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

inline std::vector<LabeledInstance> parse_labels(const std::filesystem::path& path) {
    std::vector<LabeledInstance> labels;
    for (const auto& row : csv_detail::read_table(path, "person,start,end,activities")) {
        LabeledInstance l;
        l.person_id = row[0];
        l.start_frame = csv_detail::to_uint(row[1], "label start");
        l.end_frame = csv_detail::to_uint(row[2], "label end");
        for (const auto& a : csv_detail::split_line(row[3], ';'))
            if (!a.empty()) l.true_activities.insert(a);
        if (l.true_activities.empty())
            throw MalformedRecord(0, "label with empty activity set in '" + path.string() + "'");
        labels.push_back(std::move(l));
    }
    return labels;
}

// --- session manifest: session_id,category,start_frame,end_frame

inline std::string serialize_sessions(const std::vector<ExerciseSession>& sessions) {
    std::ostringstream out;
    out << "session_id,category,start_frame,end_frame\n";
    for (const auto& s : sessions)
        out << s.session_id << ',' << to_string(s.category) << ',' << s.start_frame << ','
            << s.end_frame << '\n';
    return out.str();
}

inline std::vector<ExerciseSession> parse_sessions(const std::filesystem::path& path) {
    std::vector<ExerciseSession> sessions;
    for (const auto& row : csv_detail::read_table(path, "session_id,category,start_frame,end_frame")) {
        ExerciseSession s;
        s.session_id = row[0];
        const auto cat = exercise_category_from_string(row[1]);
        if (!cat) throw MalformedRecord(0, "unknown exercise category '" + row[1] + "'");
        s.category = *cat;
        s.start_frame = csv_detail::to_uint(row[2], "session start");
        s.end_frame = csv_detail::to_uint(row[3], "session end");
        if (s.end_frame < s.start_frame)
            throw MalformedRecord(0, "empty session span for '" + s.session_id + "'");
        sessions.push_back(std::move(s));
    }
    return sessions;
}

// --- detected intervals: person,activity,start_frame,end_frame,confidence

inline std::string serialize_intervals(const std::vector<ActivityInterval>& intervals) {
    std::ostringstream out;
    out << "person,activity,start_frame,end_frame,confidence\n";
    for (const auto& iv : intervals)
        out << iv.person_id << ',' << to_string(iv.activity) << ',' << iv.start_frame << ','
            << iv.end_frame << ',' << format_num(iv.confidence) << '\n';
    return out.str();
}

inline std::vector<ActivityInterval> parse_intervals(const std::filesystem::path& path) {
    std::vector<ActivityInterval> intervals;
    for (const auto& row :
         csv_detail::read_table(path, "person,activity,start_frame,end_frame,confidence")) {
        ActivityInterval iv;
        iv.person_id = row[0];
        const auto act = activity_from_string(row[1]);
        if (!act) throw MalformedRecord(0, "unknown activity '" + row[1] + "'");
        iv.activity = *act;
        iv.start_frame = csv_detail::to_uint(row[2], "interval start");
        iv.end_frame = csv_detail::to_uint(row[3], "interval end");
        iv.confidence = csv_detail::to_double(row[4], "interval confidence");
        intervals.push_back(std::move(iv));
    }
    return intervals;
}

// --- directed talking durations: speaker,listener,seconds

inline std::string serialize_talk_pairs(
    const std::map<std::pair<std::string, std::string>, double>& seconds) {
    std::ostringstream out;
    out << "speaker,listener,seconds\n";
    for (const auto& [pair, sec] : seconds)
        out << pair.first << ',' << pair.second << ',' << format_num(sec) << '\n';
    return out.str();
}

inline std::map<std::pair<std::string, std::string>, double> parse_talk_pairs(
    const std::filesystem::path& path) {
    std::map<std::pair<std::string, std::string>, double> out;
    for (const auto& row : csv_detail::read_table(path, "speaker,listener,seconds"))
        out[{row[0], row[1]}] += csv_detail::to_double(row[2], "talk seconds");
    return out;
}

// --- EIS samples: person,start_frame,end_frame,side,f_angle,f_range,f_speed,f_eis

inline std::string serialize_eis_samples(const std::vector<EisSample>& samples) {
    std::ostringstream out;
    out << "person,start_frame,end_frame,side,f_angle,f_range,f_speed,f_eis\n";
    for (const auto& s : samples)
        out << s.person_id << ',' << s.start_frame << ',' << s.end_frame << ','
            << to_string(s.side) << ',' << format_num(s.meta.f_angle) << ','
            << format_num(s.meta.f_range) << ',' << format_num(s.meta.f_speed) << ','
            << format_num(s.f_eis) << '\n';
    return out.str();
}

inline std::vector<EisSample> parse_eis_samples(const std::filesystem::path& path) {
    std::vector<EisSample> samples;
    for (const auto& row : csv_detail::read_table(
             path, "person,start_frame,end_frame,side,f_angle,f_range,f_speed,f_eis")) {
        EisSample s;
        s.person_id = row[0];
        s.start_frame = csv_detail::to_uint(row[1], "sample start");
        s.end_frame = csv_detail::to_uint(row[2], "sample end");
        s.side = row[3] == "left" ? Side::left : Side::right;
        s.meta.f_angle = csv_detail::to_double(row[4], "f_angle");
        s.meta.f_range = csv_detail::to_double(row[5], "f_range");
        s.meta.f_speed = csv_detail::to_double(row[6], "f_speed");
        s.f_eis = csv_detail::to_double(row[7], "f_eis");
        samples.push_back(std::move(s));
    }
    return samples;
}

// --- trend series: date,value

inline std::string serialize_trend(const TrendSeries& series) {
    std::ostringstream out;
    out << "date,value\n";
    for (const auto& p : series.points) out << p.date << ',' << format_num(p.value) << '\n';
    return out.str();
}

inline TrendSeries parse_trend(const std::filesystem::path& path, const std::string& person_id,
                               TrendMetric metric) {
    TrendSeries series;
    series.person_id = person_id;
    series.metric = metric;
    for (const auto& row : csv_detail::read_table(path, "date,value"))
        series.points.push_back({row[0], csv_detail::to_double(row[1], "trend value")});
    for (std::size_t i = 1; i < series.points.size(); ++i)
        if (series.points[i - 1].date >= series.points[i].date)
            throw MalformedRecord(0, "trend dates not strictly increasing in '" + path.string() + "'");
    return series;
}

// --- correlation matrix with header row/column of activity names

inline std::string serialize_correlation_matrix(const CorrelationMatrix& m) {
    std::ostringstream out;
    for (const auto& a : m.activities) out << ',' << a;
    out << '\n';
    for (std::size_t i = 0; i < m.activities.size(); ++i) {
        out << m.activities[i];
        for (std::size_t j = 0; j < m.activities.size(); ++j) out << ',' << format_num(m.eta[i][j]);
        out << '\n';
    }
    return out.str();
}

inline CorrelationMatrix parse_correlation_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw MalformedRecord(1, "empty matrix file");
    auto header = csv_detail::split_line(line);
    if (header.empty() || !header.front().empty())
        throw MalformedRecord(1, "matrix header must start with an empty cell");
    CorrelationMatrix m;
    m.activities.assign(header.begin() + 1, header.end());
    std::uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto row = csv_detail::split_line(line);
        if (row.size() != m.activities.size() + 1)
            throw MalformedRecord(line_no, "matrix row has wrong width");
        std::vector<double> values;
        for (std::size_t j = 1; j < row.size(); ++j)
            values.push_back(csv_detail::to_double(row[j], "matrix entry"));
        m.eta.push_back(std::move(values));
    }
    if (m.eta.size() != m.activities.size()) throw MalformedRecord(0, "matrix is not square");
    m.zero_variance.assign(m.activities.size(), false);
    return m;
}

// --- window plan as a key = value file

inline std::string serialize_window_plan(const WindowPlan& plan) {
    std::ostringstream out;
    for (const auto& [activity, w] : plan.windows) out << activity << " = " << w << '\n';
    return out.str();
}

inline WindowPlan parse_window_plan(const std::filesystem::path& path) {
    WindowPlan plan;
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open '" + path.string() + "'");
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw MalformedRecord(line_no, "expected activity = window");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto strip = [](std::string& s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
        };
        strip(key);
        strip(value);
        plan.windows[key] = static_cast<int>(csv_detail::to_uint(value, "window length"));
    }
    return plan;
}

} // namespace wellness
