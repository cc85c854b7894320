#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kpsc/model.hpp"

namespace kpsc {

// Nearest integer of value·num/den, ties away from zero.
inline std::int32_t quantize(double value, const QuantScale& scale) {
    if (!scale.num || !scale.den)
        throw std::invalid_argument("quantization scale must be positive");
    const double scaled = value * scale.num / scale.den;
    if (std::isnan(scaled)) throw std::invalid_argument("coordinate is not a number");
    if (std::fabs(scaled) >= 2147483648.0)
        throw std::overflow_error("quantized coordinate exceeds 32-bit range");
    const long long rounded = std::llround(scaled);
    if (rounded > INT32_MAX || rounded < INT32_MIN)
        throw std::overflow_error("quantized coordinate exceeds 32-bit range");
    return static_cast<std::int32_t>(rounded);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::int64_t mot_int(std::string_view field, std::size_t line_no, const char* what) {
    field = trim(field);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError("line " + std::to_string(line_no) + ": malformed " + what);
    return value;
}

inline double mot_real(std::string_view field, std::size_t line_no, const char* what) {
    field = trim(field);
    double value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError("line " + std::to_string(line_no) + ": malformed " + what);
    return value;
}

}  // namespace detail

// Parses multi-object-tracking text: one `frame,id,x,y,w,h,...` box per
// line, extra fields ignored.  Boxes become diagonal corner pairs
// (x, y) and (x+w, y+h) on the bbox2d profile.  Frames are emitted for
// the whole index range, so gaps become empty frames, and reindexed from
// zero.
inline Sequence parse_mot(std::string_view text, const QuantScale& scale = {}) {
    Sequence seq;
    seq.profile = builtin_profile(BuiltinProfile::Bbox2d);

    std::map<std::int64_t, std::map<std::uint32_t, ObjectInstance>> boxes;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        const std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (detail::trim(line).empty()) continue;

        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(
                line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                   : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() < 6)
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected at least 6 comma-separated fields");
        const std::int64_t frame = detail::mot_int(fields[0], line_no, "frame number");
        const std::int64_t id = detail::mot_int(fields[1], line_no, "track id");
        if (frame < 0)
            throw ParseError("line " + std::to_string(line_no) + ": negative frame number");
        if (id < 0 || id > 0xFFFFFFFFll)
            throw ParseError("line " + std::to_string(line_no) + ": track id out of range");
        const double x = detail::mot_real(fields[2], line_no, "box x");
        const double y = detail::mot_real(fields[3], line_no, "box y");
        const double w = detail::mot_real(fields[4], line_no, "box width");
        const double h = detail::mot_real(fields[5], line_no, "box height");
        if (w < 0 || h < 0)
            throw ParseError("line " + std::to_string(line_no) + ": negative box size");

        ObjectInstance obj;
        obj.track_id = static_cast<std::uint32_t>(id);
        obj.visibility = {1, 1};
        obj.points = {{quantize(x, scale), quantize(y, scale)},
                      {quantize(x + w, scale), quantize(y + h, scale)}};
        if (!boxes[frame].emplace(obj.track_id, std::move(obj)).second)
            throw ParseError("line " + std::to_string(line_no) + ": duplicate object " +
                             std::to_string(id) + " in frame " + std::to_string(frame));
    }
    if (boxes.empty()) return seq;

    const std::int64_t first = boxes.begin()->first;
    const std::int64_t last = boxes.rbegin()->first;
    if (last - first >= 1'000'000) throw ParseError("frame index span exceeds 1000000");
    seq.frames.reserve(static_cast<std::size_t>(last - first + 1));
    for (std::int64_t idx = first; idx <= last; ++idx) {
        Frame frame;
        frame.index = static_cast<std::uint32_t>(idx - first);
        if (const auto it = boxes.find(idx); it != boxes.end())
            for (auto& [obj_id, obj] : it->second) frame.objects.push_back(std::move(obj));
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

struct KpjsonDocument {
    Sequence sequence;
    QuantScale scale{};

    bool operator==(const KpjsonDocument&) const = default;
};

namespace detail {

inline const nlohmann::json& json_field(const nlohmann::json& obj, const char* key,
                                        const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path + ": missing field '" + key + "'");
    return *it;
}

inline std::uint64_t json_uint(const nlohmann::json& v, const std::string& path,
                               std::uint64_t max) {
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() > max)
        throw ParseError(path + ": expected integer in [0, " + std::to_string(max) + "]");
    return v.get<std::uint64_t>();
}

inline Coord json_coord(const nlohmann::json& v, const std::string& path) {
    if (v.is_number_unsigned()) {
        const std::uint64_t u = v.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(INT32_MAX))
            throw ParseError(path + ": coordinate out of 32-bit range");
        return static_cast<Coord>(u);
    }
    if (!v.is_number_integer()) throw ParseError(path + ": expected integer coordinate");
    const std::int64_t value = v.get<std::int64_t>();
    if (value < INT32_MIN || value > INT32_MAX)
        throw ParseError(path + ": coordinate out of 32-bit range");
    return static_cast<Coord>(value);
}

inline IncidenceProfile json_profile(const nlohmann::json& v) {
    if (v.is_string()) {
        const std::string name = v.get<std::string>();
        const IncidenceProfile* builtin = find_builtin_profile(name);
        if (!builtin) throw ParseError("profile: unknown profile '" + name + "'");
        return *builtin;
    }
    if (!v.is_object()) throw ParseError("profile: expected name string or profile object");
    IncidenceProfile p;
    const nlohmann::json& name = json_field(v, "name", "profile");
    if (!name.is_string()) throw ParseError("profile.name: expected string");
    p.name = name.get<std::string>();
    p.point_count =
        static_cast<std::uint16_t>(json_uint(json_field(v, "points", "profile"),
                                             "profile.points", 0xFFFF));
    p.dims = static_cast<std::uint8_t>(json_uint(json_field(v, "dims", "profile"),
                                                 "profile.dims", 0xFF));
    const nlohmann::json& edges = json_field(v, "edges", "profile");
    if (!edges.is_array()) throw ParseError("profile.edges: expected array");
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const std::string path = "profile.edges[" + std::to_string(e) + "]";
        const nlohmann::json& pair = edges[e];
        if (!pair.is_array() || pair.size() != 2)
            throw ParseError(path + ": expected [from, to]");
        p.edges.emplace_back(static_cast<std::uint16_t>(json_uint(pair[0], path, 0xFFFF)),
                             static_cast<std::uint16_t>(json_uint(pair[1], path, 0xFFFF)));
    }
    if (auto issues = validate_profile(p); !issues.empty())
        throw ParseError("profile: " + issues.front());
    return p;
}

}  // namespace detail

inline KpjsonDocument parse_kpjson(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("kpjson: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("kpjson: top level must be an object");

    KpjsonDocument out;
    out.sequence.profile = detail::json_profile(detail::json_field(doc, "profile", "kpjson"));
    const std::size_t n = out.sequence.profile.point_count;
    const std::size_t dims = out.sequence.profile.dims;

    if (const auto it = doc.find("scale"); it != doc.end()) {
        if (!it->is_array() || it->size() != 2)
            throw ParseError("scale: expected [numerator, denominator]");
        out.scale.num = static_cast<std::uint32_t>(
            detail::json_uint((*it)[0], "scale[0]", 0xFFFFFFFFull));
        out.scale.den = static_cast<std::uint32_t>(
            detail::json_uint((*it)[1], "scale[1]", 0xFFFFFFFFull));
        if (!out.scale.num || !out.scale.den)
            throw ParseError("scale: numerator and denominator must be positive");
    }

    const nlohmann::json& frames = detail::json_field(doc, "frames", "kpjson");
    if (!frames.is_array()) throw ParseError("frames: expected array");
    for (std::size_t fi = 0; fi < frames.size(); ++fi) {
        const std::string fpath = "frames[" + std::to_string(fi) + "]";
        const nlohmann::json& fv = frames[fi];
        if (!fv.is_object()) throw ParseError(fpath + ": expected object");
        Frame frame;
        frame.index = static_cast<std::uint32_t>(detail::json_uint(
            detail::json_field(fv, "index", fpath), fpath + ".index", 0xFFFFFFFFull));
        const nlohmann::json& objects = detail::json_field(fv, "objects", fpath);
        if (!objects.is_array()) throw ParseError(fpath + ".objects: expected array");
        for (std::size_t oi = 0; oi < objects.size(); ++oi) {
            const std::string opath = fpath + ".objects[" + std::to_string(oi) + "]";
            const nlohmann::json& ov = objects[oi];
            if (!ov.is_object()) throw ParseError(opath + ": expected object");
            ObjectInstance obj;
            obj.track_id = static_cast<std::uint32_t>(detail::json_uint(
                detail::json_field(ov, "track_id", opath), opath + ".track_id", 0xFFFFFFFFull));

            const nlohmann::json& vis = detail::json_field(ov, "visibility", opath);
            if (!vis.is_array() || vis.size() != n)
                throw ParseError(opath + ".visibility: expected array of " + std::to_string(n) +
                                 " flags");
            std::size_t visible = 0;
            for (std::size_t j = 0; j < n; ++j) {
                const std::uint64_t flag =
                    detail::json_uint(vis[j], opath + ".visibility[" + std::to_string(j) + "]", 1);
                obj.visibility.push_back(static_cast<std::uint8_t>(flag));
                visible += flag;
            }

            const nlohmann::json& points = detail::json_field(ov, "points", opath);
            if (!points.is_array() || points.size() != visible)
                throw ParseError(opath + ".points: expected " + std::to_string(visible) +
                                 " rows (one per visible point)");
            for (std::size_t k = 0; k < points.size(); ++k) {
                const std::string ppath = opath + ".points[" + std::to_string(k) + "]";
                const nlohmann::json& row = points[k];
                if (!row.is_array() || row.size() != dims)
                    throw ParseError(ppath + ": expected " + std::to_string(dims) +
                                     " coordinates");
                Point point;
                for (std::size_t d = 0; d < dims; ++d)
                    point.push_back(
                        detail::json_coord(row[d], ppath + "[" + std::to_string(d) + "]"));
                obj.points.push_back(std::move(point));
            }
            frame.objects.push_back(std::move(obj));
        }
        out.sequence.frames.push_back(std::move(frame));
    }

    if (auto issues = validate_sequence(out.sequence); !issues.empty())
        throw ParseError("kpjson: " + issues.front());
    return out;
}

inline std::string write_kpjson(const Sequence& seq, const QuantScale& scale = {}) {
    nlohmann::json doc;
    if (builtin_id_of(seq.profile)) {
        doc["profile"] = seq.profile.name;
    } else {
        nlohmann::json p;
        p["name"] = seq.profile.name;
        p["points"] = seq.profile.point_count;
        p["dims"] = seq.profile.dims;
        nlohmann::json edges = nlohmann::json::array();
        for (const auto& [from, to] : seq.profile.edges)
            edges.push_back(nlohmann::json::array({from, to}));
        p["edges"] = std::move(edges);
        doc["profile"] = std::move(p);
    }
    doc["scale"] = nlohmann::json::array({scale.num, scale.den});

    nlohmann::json frames = nlohmann::json::array();
    for (const Frame& frame : seq.frames) {
        nlohmann::json fv;
        fv["index"] = frame.index;
        nlohmann::json objects = nlohmann::json::array();
        for (const ObjectInstance& obj : frame.objects) {
            nlohmann::json ov;
            ov["track_id"] = obj.track_id;
            ov["visibility"] = obj.visibility;
            nlohmann::json points = nlohmann::json::array();
            for (const Point& point : obj.points) points.push_back(point);
            ov["points"] = std::move(points);
            objects.push_back(std::move(ov));
        }
        fv["objects"] = std::move(objects);
        frames.push_back(std::move(fv));
    }
    doc["frames"] = std::move(frames);
    return doc.dump(2) + "\n";
}

}  // namespace kpsc
