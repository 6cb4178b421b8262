#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <rapidjson/document.h>
#include <rapidjson/stringbuffer.h>
#include <rapidjson/writer.h>

#include "wellness/errors.hpp"
#include "wellness/events.hpp"
#include "wellness/interaction.hpp"
#include "wellness/temporal.hpp"

namespace wellness {

namespace jsonl_detail {

using JsonValue = rapidjson::Value;
using JsonWriter = rapidjson::Writer<rapidjson::StringBuffer>;

struct FieldError {
    std::string reason;
};

inline const JsonValue& need(const JsonValue& obj, const char* name) {
    auto it = obj.FindMember(name);
    if (it == obj.MemberEnd()) throw FieldError{std::string("missing field '") + name + "'"};
    return it->value;
}

inline const JsonValue* find(const JsonValue& obj, const char* name) {
    auto it = obj.FindMember(name);
    return it == obj.MemberEnd() ? nullptr : &it->value;
}

inline double need_number(const JsonValue& v, const char* name) {
    if (!v.IsNumber()) throw FieldError{std::string("field '") + name + "' is not a number"};
    return v.GetDouble();
}

inline std::uint64_t need_uint(const JsonValue& obj, const char* name) {
    const JsonValue& v = need(obj, name);
    if (!v.IsUint64()) throw FieldError{std::string("field '") + name + "' is not a non-negative integer"};
    return v.GetUint64();
}

inline std::string need_string(const JsonValue& obj, const char* name) {
    const JsonValue& v = need(obj, name);
    if (!v.IsString()) throw FieldError{std::string("field '") + name + "' is not a string"};
    return std::string(v.GetString(), v.GetStringLength());
}

inline BBox need_box(const JsonValue& obj, const char* name) {
    const JsonValue& v = need(obj, name);
    if (!v.IsArray() || v.Size() != 4)
        throw FieldError{std::string("field '") + name + "' is not a 4-element box"};
    BBox box{need_number(v[0], name), need_number(v[1], name), need_number(v[2], name),
             need_number(v[3], name)};
    return box;
}

inline void write_box(JsonWriter& w, const BBox& box) {
    w.StartArray();
    w.Double(box.x_min);
    w.Double(box.y_min);
    w.Double(box.x_max);
    w.Double(box.y_max);
    w.EndArray();
}

inline FrameEvent frame_from_json(const JsonValue& doc) {
    if (!doc.IsObject()) throw FieldError{"record is not a JSON object"};
    FrameEvent frame;
    frame.frame_index = need_uint(doc, "frame");
    frame.timestamp_ms = need_uint(doc, "t_ms");
    frame.camera_id = need_string(doc, "camera");

    const JsonValue& persons = need(doc, "persons");
    if (!persons.IsArray()) throw FieldError{"field 'persons' is not an array"};
    frame.persons.reserve(persons.Size());
    for (const auto& pv : persons.GetArray()) {
        if (!pv.IsObject()) throw FieldError{"person entry is not an object"};
        PersonObservation person;
        person.person_id = need_string(pv, "id");
        person.person_box = need_box(pv, "box");
        const std::string role = need_string(pv, "role");
        const auto parsed_role = role_from_string(role);
        if (!parsed_role) throw FieldError{"unknown role '" + role + "'"};
        person.role = *parsed_role;

        if (const JsonValue* fv = find(pv, "face")) {
            if (!fv->IsObject()) throw FieldError{"field 'face' is not an object"};
            FaceObservation face;
            face.face_box = need_box(*fv, "box");
            const JsonValue& lm = need(*fv, "landmarks");
            if (!lm.IsArray() || lm.Size() != kLandmarkCount)
                throw FieldError{"field 'landmarks' must hold exactly " +
                                 std::to_string(kLandmarkCount) + " points"};
            for (rapidjson::SizeType i = 0; i < lm.Size(); ++i) {
                const JsonValue& pt = lm[i];
                if (!pt.IsArray() || pt.Size() != 2)
                    throw FieldError{"landmark " + std::to_string(i) + " is not an [x,y] pair"};
                face.landmarks[i] = {need_number(pt[0], "landmarks"), need_number(pt[1], "landmarks")};
            }
            person.face = std::move(face);
        }
        if (const JsonValue* pp = find(pv, "pose")) {
            if (!pp->IsObject()) throw FieldError{"field 'pose' is not an object"};
            PoseObservation pose;
            const JsonValue& joints = need(*pp, "joints");
            if (!joints.IsObject()) throw FieldError{"field 'joints' is not an object"};
            for (auto it = joints.MemberBegin(); it != joints.MemberEnd(); ++it) {
                const JsonValue& jv = it->value;
                if (!jv.IsArray() || jv.Size() != 3)
                    throw FieldError{"joint entry is not an [x,y,conf] triple"};
                Joint joint;
                joint.p = {need_number(jv[0], "joint"), need_number(jv[1], "joint")};
                joint.confidence = need_number(jv[2], "joint");
                pose.joints.emplace(std::string(it->name.GetString(), it->name.GetStringLength()),
                                    joint);
            }
            person.pose = std::move(pose);
        }
        if (const JsonValue* gv = find(pv, "gaze")) {
            if (!gv->IsArray() || gv->Size() != 2)
                throw FieldError{"field 'gaze' is not a [dx,dy] pair"};
            person.gaze = Point{need_number((*gv)[0], "gaze"), need_number((*gv)[1], "gaze")};
        }
        frame.persons.push_back(std::move(person));
    }

    const JsonValue& objects = need(doc, "objects");
    if (!objects.IsArray()) throw FieldError{"field 'objects' is not an array"};
    frame.objects.reserve(objects.Size());
    for (const auto& ov : objects.GetArray()) {
        if (!ov.IsObject()) throw FieldError{"object entry is not an object"};
        frame.objects.push_back(ObjectDetection::with_category(
            need_string(ov, "id"), need_string(ov, "cat"), need_box(ov, "box"),
            need_number(need(ov, "score"), "score")));
    }
    return frame;
}

} // namespace jsonl_detail

// One FrameEvent as one JSONL line (no trailing newline). Doubles use
// shortest round-trip formatting, so parse(serialize(e)) reproduces e
// bit-exactly.
inline std::string serialize_frame(const FrameEvent& frame) {
    using namespace jsonl_detail;
    rapidjson::StringBuffer buf;
    JsonWriter w(buf);
    w.StartObject();
    w.Key("frame");
    w.Uint64(frame.frame_index);
    w.Key("t_ms");
    w.Uint64(frame.timestamp_ms);
    w.Key("camera");
    w.String(frame.camera_id.c_str(), static_cast<rapidjson::SizeType>(frame.camera_id.size()));
    w.Key("persons");
    w.StartArray();
    for (const auto& person : frame.persons) {
        w.StartObject();
        w.Key("id");
        w.String(person.person_id.c_str(), static_cast<rapidjson::SizeType>(person.person_id.size()));
        w.Key("box");
        write_box(w, person.person_box);
        w.Key("role");
        w.String(to_string(person.role));
        if (person.face) {
            w.Key("face");
            w.StartObject();
            w.Key("box");
            write_box(w, person.face->face_box);
            w.Key("landmarks");
            w.StartArray();
            for (const auto& pt : person.face->landmarks) {
                w.StartArray();
                w.Double(pt.x);
                w.Double(pt.y);
                w.EndArray();
            }
            w.EndArray();
            w.EndObject();
        }
        if (person.pose) {
            w.Key("pose");
            w.StartObject();
            w.Key("joints");
            w.StartObject();
            for (const auto& [name, joint] : person.pose->joints) {
                w.Key(name.c_str(), static_cast<rapidjson::SizeType>(name.size()));
                w.StartArray();
                w.Double(joint.p.x);
                w.Double(joint.p.y);
                w.Double(joint.confidence);
                w.EndArray();
            }
            w.EndObject();
            w.EndObject();
        }
        if (person.gaze) {
            w.Key("gaze");
            w.StartArray();
            w.Double(person.gaze->x);
            w.Double(person.gaze->y);
            w.EndArray();
        }
        w.EndObject();
    }
    w.EndArray();
    w.Key("objects");
    w.StartArray();
    for (const auto& obj : frame.objects) {
        w.StartObject();
        w.Key("id");
        w.String(obj.object_id.c_str(), static_cast<rapidjson::SizeType>(obj.object_id.size()));
        w.Key("cat");
        const std::string cat = obj.category_name();
        w.String(cat.c_str(), static_cast<rapidjson::SizeType>(cat.size()));
        w.Key("box");
        write_box(w, obj.box);
        w.Key("score");
        w.Double(obj.score);
        w.EndObject();
    }
    w.EndArray();
    w.EndObject();
    return std::string(buf.GetString(), buf.GetSize());
}

// Lazily validates and yields FrameEvents from a JSONL stream. Fail-fast on
// malformed records or frame-index regressions; with skip_bad_records the
// offending line is counted and skipped instead.
class FrameStreamParser {
public:
    explicit FrameStreamParser(std::istream& in, bool skip_bad_records = false)
        : in_(in), skip_bad_(skip_bad_records) {}

    std::optional<FrameEvent> next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            try {
                return accept(parse_line(line));
            } catch (const Error&) {
                if (!skip_bad_) throw;
                ++skipped_;
            }
        }
        return std::nullopt;
    }

    std::uint64_t skipped() const { return skipped_; }
    std::uint64_t line_no() const { return line_no_; }

private:
    FrameEvent parse_line(const std::string& line) const {
        rapidjson::Document doc;
        doc.Parse<rapidjson::kParseFullPrecisionFlag>(line.c_str(),
                                                      line.size());
        if (doc.HasParseError()) throw MalformedRecord(line_no_, "invalid JSON");
        try {
            FrameEvent frame = jsonl_detail::frame_from_json(doc);
            if (auto reason = validate_frame(frame)) throw MalformedRecord(line_no_, *reason);
            return frame;
        } catch (const jsonl_detail::FieldError& e) {
            throw MalformedRecord(line_no_, e.reason);
        }
    }

    FrameEvent accept(FrameEvent frame) {
        if (last_frame_ && frame.frame_index <= *last_frame_) throw NonMonotonicFrame(line_no_);
        if (last_t_ms_ && frame.timestamp_ms < *last_t_ms_)
            throw MalformedRecord(line_no_, "timestamp_ms regressed");
        last_frame_ = frame.frame_index;
        last_t_ms_ = frame.timestamp_ms;
        return frame;
    }

    std::istream& in_;
    bool skip_bad_;
    std::uint64_t line_no_ = 0;
    std::uint64_t skipped_ = 0;
    std::optional<std::uint64_t> last_frame_;
    std::optional<std::uint64_t> last_t_ms_;
};

// Eager convenience wrapper.
inline std::vector<FrameEvent> parse_frame_stream(std::istream& in, bool skip_bad_records = false,
                                                  std::uint64_t* skipped_out = nullptr) {
    FrameStreamParser parser(in, skip_bad_records);
    std::vector<FrameEvent> frames;
    while (auto frame = parser.next()) frames.push_back(std::move(*frame));
    if (skipped_out) *skipped_out = parser.skipped();
    return frames;
}

// --- clip score lines: {"person":...,"clip":N,"span":[s,e],"scores":[...]}

inline std::string serialize_clip(const std::string& person_id, const Clip& clip) {
    rapidjson::StringBuffer buf;
    jsonl_detail::JsonWriter w(buf);
    w.StartObject();
    w.Key("person");
    w.String(person_id.c_str(), static_cast<rapidjson::SizeType>(person_id.size()));
    w.Key("clip");
    w.Uint64(clip.clip_index);
    w.Key("span");
    w.StartArray();
    w.Uint64(clip.start_frame);
    w.Uint64(clip.end_frame);
    w.EndArray();
    w.Key("scores");
    w.StartArray();
    for (double s : clip.scores) w.Double(s);
    w.EndArray();
    w.EndObject();
    return std::string(buf.GetString(), buf.GetSize());
}

// Parses a clip-score stream into one validated series per person, sorted by
// person id.
inline std::vector<ClipScoreSeries> parse_clip_scores(std::istream& in) {
    std::map<std::string, ClipScoreSeries> by_person;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        rapidjson::Document doc;
        doc.Parse<rapidjson::kParseFullPrecisionFlag>(line.c_str(), line.size());
        if (doc.HasParseError()) throw MalformedRecord(line_no, "invalid JSON");
        try {
            using namespace jsonl_detail;
            const std::string person = need_string(doc, "person");
            Clip clip;
            clip.clip_index = need_uint(doc, "clip");
            const JsonValue& span = need(doc, "span");
            if (!span.IsArray() || span.Size() != 2)
                throw FieldError{"field 'span' is not a [start,end] pair"};
            if (!span[0].IsUint64() || !span[1].IsUint64())
                throw FieldError{"span bounds must be non-negative integers"};
            clip.start_frame = span[0].GetUint64();
            clip.end_frame = span[1].GetUint64();
            const JsonValue& scores = need(doc, "scores");
            if (!scores.IsArray()) throw FieldError{"field 'scores' is not an array"};
            for (const auto& s : scores.GetArray()) clip.scores.push_back(need_number(s, "scores"));
            auto& series = by_person[person];
            if (series.activities.empty()) {
                series.person_id = person;
                series.activities = temporal_activities();
            }
            series.clips.push_back(std::move(clip));
        } catch (const jsonl_detail::FieldError& e) {
            throw MalformedRecord(line_no, e.reason);
        }
    }
    std::vector<ClipScoreSeries> out;
    out.reserve(by_person.size());
    for (auto& [person, series] : by_person) {
        if (auto reason = series.validate())
            throw MalformedRecord(0, "clip series for '" + person + "': " + *reason);
        out.push_back(std::move(series));
    }
    return out;
}

// --- HOI candidate lines:
//     {"person":...,"object":...,"action":...,"span":[s,e],"s":[s_h,s_o,s_h_a,s_ho_a]}

inline std::string serialize_hoi(const HoiCandidate& c) {
    rapidjson::StringBuffer buf;
    jsonl_detail::JsonWriter w(buf);
    w.StartObject();
    w.Key("person");
    w.String(c.person_id.c_str(), static_cast<rapidjson::SizeType>(c.person_id.size()));
    w.Key("object");
    w.String(c.object_id.c_str(), static_cast<rapidjson::SizeType>(c.object_id.size()));
    w.Key("action");
    w.String(to_string(c.action));
    w.Key("span");
    w.StartArray();
    w.Uint64(c.start_frame);
    w.Uint64(c.end_frame);
    w.EndArray();
    w.Key("s");
    w.StartArray();
    w.Double(c.s_h);
    w.Double(c.s_o);
    w.Double(c.s_h_a);
    w.Double(c.s_ho_a);
    w.EndArray();
    w.EndObject();
    return std::string(buf.GetString(), buf.GetSize());
}

// --- scene graph lines (machine-readable companion to the DOT export)

inline std::string serialize_scene_graph(const SceneGraph& graph) {
    rapidjson::StringBuffer buf;
    jsonl_detail::JsonWriter w(buf);
    auto str = [&](const std::string& s) {
        w.String(s.c_str(), static_cast<rapidjson::SizeType>(s.size()));
    };
    w.StartObject();
    w.Key("window");
    w.StartArray();
    w.Uint64(graph.window_start);
    w.Uint64(graph.window_end);
    w.EndArray();
    w.Key("nodes");
    w.StartArray();
    for (const auto& [id, node] : graph.nodes) {
        w.StartObject();
        w.Key("id");
        str(id);
        w.Key("kind");
        w.String(node.kind == NodeKind::person ? "person" : "object");
        w.Key("cat");
        str(node.category);
        w.Key("attrs");
        w.StartArray();
        for (const auto& a : node.attributes) str(a);
        w.EndArray();
        w.EndObject();
    }
    w.EndArray();
    w.Key("edges");
    w.StartArray();
    for (const auto& e : graph.edges) {
        w.StartObject();
        w.Key("src");
        str(e.src);
        w.Key("dst");
        str(e.dst);
        w.Key("rel");
        str(e.relation);
        w.Key("w");
        w.Double(e.weight);
        w.Key("span");
        w.StartArray();
        w.Uint64(e.start_frame);
        w.Uint64(e.end_frame);
        w.EndArray();
        w.EndObject();
    }
    w.EndArray();
    w.EndObject();
    return std::string(buf.GetString(), buf.GetSize());
}

inline std::vector<SceneGraph> parse_scene_graphs(std::istream& in) {
    std::vector<SceneGraph> out;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        rapidjson::Document doc;
        doc.Parse<rapidjson::kParseFullPrecisionFlag>(line.c_str(), line.size());
        if (doc.HasParseError()) throw MalformedRecord(line_no, "invalid JSON");
        try {
            using namespace jsonl_detail;
            SceneGraph g;
            const JsonValue& win = need(doc, "window");
            if (!win.IsArray() || win.Size() != 2)
                throw FieldError{"field 'window' is not a [start,end] pair"};
            g.window_start = win[0].GetUint64();
            g.window_end = win[1].GetUint64();
            for (const auto& nv : need(doc, "nodes").GetArray()) {
                SceneNode node;
                node.node_id = need_string(nv, "id");
                node.kind = need_string(nv, "kind") == "person" ? NodeKind::person : NodeKind::object;
                node.category = need_string(nv, "cat");
                for (const auto& av : need(nv, "attrs").GetArray())
                    node.attributes.insert(std::string(av.GetString(), av.GetStringLength()));
                g.nodes.emplace(node.node_id, std::move(node));
            }
            for (const auto& ev : need(doc, "edges").GetArray()) {
                SceneEdge e;
                e.src = need_string(ev, "src");
                e.dst = need_string(ev, "dst");
                e.relation = need_string(ev, "rel");
                e.weight = need_number(need(ev, "w"), "w");
                const JsonValue& span = need(ev, "span");
                e.start_frame = span[0].GetUint64();
                e.end_frame = span[1].GetUint64();
                g.edges.push_back(std::move(e));
            }
            out.push_back(std::move(g));
        } catch (const jsonl_detail::FieldError& e) {
            throw MalformedRecord(line_no, e.reason);
        }
    }
    return out;
}

inline std::vector<HoiCandidate> parse_hoi_stream(std::istream& in) {
    std::vector<HoiCandidate> out;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        rapidjson::Document doc;
        doc.Parse<rapidjson::kParseFullPrecisionFlag>(line.c_str(), line.size());
        if (doc.HasParseError()) throw MalformedRecord(line_no, "invalid JSON");
        try {
            using namespace jsonl_detail;
            HoiCandidate c;
            c.person_id = need_string(doc, "person");
            c.object_id = need_string(doc, "object");
            const std::string action = need_string(doc, "action");
            const auto parsed = hoi_action_from_string(action);
            if (!parsed) throw FieldError{"unknown action '" + action + "'"};
            c.action = *parsed;
            const JsonValue& span = need(doc, "span");
            if (!span.IsArray() || span.Size() != 2 || !span[0].IsUint64() || !span[1].IsUint64())
                throw FieldError{"field 'span' is not a [start,end] pair"};
            c.start_frame = span[0].GetUint64();
            c.end_frame = span[1].GetUint64();
            const JsonValue& s = need(doc, "s");
            if (!s.IsArray() || s.Size() != 4) throw FieldError{"field 's' must hold 4 scores"};
            c.s_h = need_number(s[0], "s");
            c.s_o = need_number(s[1], "s");
            c.s_h_a = need_number(s[2], "s");
            c.s_ho_a = need_number(s[3], "s");
            for (double v : {c.s_h, c.s_o, c.s_h_a, c.s_ho_a})
                if (v < 0.0 || v > 1.0) throw FieldError{"branch score outside [0,1]"};
            out.push_back(std::move(c));
        } catch (const jsonl_detail::FieldError& e) {
            throw MalformedRecord(line_no, e.reason);
        }
    }
    return out;
}

} // namespace wellness
