#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kpsc {

using Coord = std::int32_t;

// One key point: D signed coordinates in quantized grid units.
using Point = std::vector<Coord>;

// Malformed textual input (profile files, MOT lines, kpjson documents).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rational grid scale (num/den grid units per input unit) used when
// quantizing real-valued coordinates; informational once data is integer.
struct QuantScale {
    std::uint32_t num = 1;
    std::uint32_t den = 1;

    bool operator==(const QuantScale&) const = default;
};

// Directed reference graph over the N key points of one object category.
// An edge (a, b) marks point a as a permitted prediction reference of b.
struct IncidenceProfile {
    std::string name;
    std::uint16_t point_count = 0;  // N
    std::uint8_t dims = 0;          // D
    std::vector<std::pair<std::uint16_t, std::uint16_t>> edges;

    bool operator==(const IncidenceProfile&) const = default;
};

// One tracked object in one frame.  `points` holds coordinates for visible
// points only, in ascending point-index order, so a coordinate exists
// exactly when its visibility flag is set.
struct ObjectInstance {
    std::uint32_t track_id = 0;
    std::vector<std::uint8_t> visibility;
    std::vector<Point> points;

    const Point* point(std::size_t index) const {
        if (index >= visibility.size() || !visibility[index]) return nullptr;
        std::size_t slot = 0;
        for (std::size_t j = 0; j < index; ++j)
            if (visibility[j]) ++slot;
        return &points[slot];
    }

    std::size_t visible_count() const { return points.size(); }

    bool operator==(const ObjectInstance&) const = default;
};

struct Frame {
    std::uint32_t index = 0;
    std::vector<ObjectInstance> objects;  // ascending track_id

    const ObjectInstance* find(std::uint32_t track_id) const {
        auto it = std::lower_bound(
            objects.begin(), objects.end(), track_id,
            [](const ObjectInstance& o, std::uint32_t id) { return o.track_id < id; });
        return (it != objects.end() && it->track_id == track_id) ? &*it : nullptr;
    }

    bool operator==(const Frame&) const = default;
};

struct Sequence {
    IncidenceProfile profile;
    std::vector<Frame> frames;

    std::uint64_t visible_points() const {
        std::uint64_t n = 0;
        for (const auto& f : frames)
            for (const auto& o : f.objects) n += o.visible_count();
        return n;
    }

    bool operator==(const Sequence&) const = default;
};

inline std::vector<std::uint32_t> out_degrees(const IncidenceProfile& profile) {
    std::vector<std::uint32_t> degree(profile.point_count, 0);
    for (const auto& [from, to] : profile.edges)
        if (from < degree.size()) ++degree[from];
    return degree;
}

// Key point with maximum out-degree; ties go to the lowest index.
inline std::uint16_t central_point(const IncidenceProfile& profile) {
    const auto degree = out_degrees(profile);
    std::uint16_t best = 0;
    for (std::uint16_t i = 1; i < profile.point_count; ++i)
        if (degree[i] > degree[best]) best = i;
    return best;
}

struct TraversalStep {
    std::uint16_t target = 0;
    std::optional<std::uint16_t> reference;

    bool operator==(const TraversalStep&) const = default;
};

// Breadth-first walk of the reference graph starting at the central point.
// Out-neighbours are visited in ascending index order and every vertex
// records the vertex that discovered it.  Vertices the central point cannot
// reach are appended in ascending index order without a reference.
inline std::vector<TraversalStep> traversal_order(const IncidenceProfile& profile) {
    const std::size_t n = profile.point_count;
    std::vector<TraversalStep> order;
    order.reserve(n);
    if (n == 0) return order;

    std::vector<std::vector<std::uint16_t>> adjacency(n);
    for (const auto& [from, to] : profile.edges)
        if (from < n && to < n) adjacency[from].push_back(to);
    for (auto& neighbours : adjacency) std::sort(neighbours.begin(), neighbours.end());

    std::vector<std::uint8_t> seen(n, 0);
    std::queue<std::uint16_t> pending;
    const std::uint16_t start = central_point(profile);
    seen[start] = 1;
    order.push_back({start, std::nullopt});
    pending.push(start);
    while (!pending.empty()) {
        const std::uint16_t v = pending.front();
        pending.pop();
        for (const std::uint16_t next : adjacency[v]) {
            if (seen[next]) continue;
            seen[next] = 1;
            order.push_back({next, v});
            pending.push(next);
        }
    }
    for (std::uint16_t v = 0; v < n; ++v)
        if (!seen[v]) order.push_back({v, std::nullopt});
    return order;
}

// All invariant violations of the profile; empty means valid.
inline std::vector<std::string> validate_profile(const IncidenceProfile& profile) {
    std::vector<std::string> issues;
    if (profile.point_count == 0) issues.push_back("point count must be positive");
    if (profile.dims == 0) issues.push_back("dimension count must be positive");
    auto sorted = profile.edges;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] == sorted[i - 1]) {
            std::ostringstream msg;
            msg << "duplicate edge (" << sorted[i].first << ", " << sorted[i].second << ")";
            issues.push_back(msg.str());
        }
    for (std::size_t i = 0; i < profile.edges.size(); ++i) {
        const auto& [from, to] = profile.edges[i];
        std::ostringstream msg;
        msg << "edge " << i << ": ";
        if (from == to) {
            msg << "self-loop at vertex " << from;
            issues.push_back(msg.str());
        } else if (from >= profile.point_count || to >= profile.point_count) {
            msg << "index out of range";
            issues.push_back(msg.str());
        }
    }
    return issues;
}

// Violations of sequence-level invariants; empty means encodable.
inline std::vector<std::string> validate_sequence(const Sequence& seq) {
    std::vector<std::string> issues;
    for (auto& issue : validate_profile(seq.profile)) issues.push_back("profile: " + issue);
    const std::size_t n = seq.profile.point_count;
    const std::size_t d = seq.profile.dims;
    for (std::size_t f = 0; f < seq.frames.size(); ++f) {
        const Frame& frame = seq.frames[f];
        std::ostringstream where;
        where << "frame " << f;
        if (f > 0 && frame.index <= seq.frames[f - 1].index)
            issues.push_back(where.str() + ": frame indices must be strictly increasing");
        for (std::size_t o = 0; o < frame.objects.size(); ++o) {
            const ObjectInstance& obj = frame.objects[o];
            std::ostringstream loc;
            loc << where.str() << ", object " << obj.track_id << ": ";
            if (o > 0 && obj.track_id <= frame.objects[o - 1].track_id)
                issues.push_back(loc.str() + "track ids must be strictly increasing");
            if (obj.visibility.size() != n) {
                issues.push_back(loc.str() + "visibility length does not match profile");
                continue;
            }
            const std::size_t visible = static_cast<std::size_t>(
                std::count(obj.visibility.begin(), obj.visibility.end(), std::uint8_t{1}));
            if (std::any_of(obj.visibility.begin(), obj.visibility.end(),
                            [](std::uint8_t v) { return v > 1; }))
                issues.push_back(loc.str() + "visibility flags must be 0 or 1");
            if (obj.points.size() != visible)
                issues.push_back(loc.str() + "point count does not match visibility flags");
            for (const Point& p : obj.points)
                if (p.size() != d) {
                    issues.push_back(loc.str() + "point dimension does not match profile");
                    break;
                }
        }
    }
    return issues;
}

// Profile-derived lookups shared by the encoder and decoder.
struct TraversalPlan {
    std::vector<TraversalStep> order;
    std::vector<std::int32_t> parent;  // BFS parent per point, -1 at roots
    std::vector<std::uint32_t> out_degree;
    std::uint16_t central = 0;
};

inline TraversalPlan plan_traversal(const IncidenceProfile& profile) {
    TraversalPlan plan;
    plan.order = traversal_order(profile);
    plan.out_degree = out_degrees(profile);
    plan.central = central_point(profile);
    plan.parent.assign(profile.point_count, -1);
    for (const TraversalStep& step : plan.order)
        if (step.reference) plan.parent[step.target] = *step.reference;
    return plan;
}

// ---- built-in profiles ----

enum class BuiltinProfile : std::uint8_t {
    Bbox2d = 0,
    Box3d = 1,
    Skeleton15 = 2,
    Face68 = 3,
};

inline constexpr std::size_t kBuiltinProfileCount = 4;

namespace detail {

inline IncidenceProfile make_bbox2d() {
    // Two diagonal corners; the first corner anchors the second.
    return {"bbox2d", 2, 2, {{0, 1}}};
}

inline IncidenceProfile make_box3d() {
    // Axis-aligned 3D box as its min/max corners.
    return {"box3d", 2, 3, {{0, 1}}};
}

inline IncidenceProfile make_skeleton15() {
    // 15-joint body: 0 head, 1 neck, 2-4 right arm, 5-7 left arm, 14 chest,
    // 8-10 right leg, 11-13 left leg.  Tree rooted at the neck.
    return {"skeleton15",
            15,
            2,
            {{1, 0},
             {1, 2},
             {1, 5},
             {1, 14},
             {2, 3},
             {3, 4},
             {5, 6},
             {6, 7},
             {14, 8},
             {14, 11},
             {8, 9},
             {9, 10},
             {11, 12},
             {12, 13}}};
}

inline IncidenceProfile make_face68() {
    // 68 landmarks in the common annotation order: jaw 0-16, brows 17-26,
    // nose 27-35, eyes 36-47, outer lip 48-59, inner lip 60-67.  Chains
    // run inside each part; bridge edges fan out from the top of the nose
    // so every landmark is reachable from one root.
    IncidenceProfile p{"face68", 68, 2, {}};
    auto edge = [&p](int a, int b) {
        p.edges.emplace_back(static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(b));
    };
    auto chain = [&edge](int from, int to) {
        const int step = from < to ? 1 : -1;
        for (int v = from; v != to; v += step) edge(v, v + step);
    };
    chain(27, 30);                 // nose bridge
    edge(30, 33);                  // bridge to the nostril row
    chain(33, 31);
    chain(33, 35);
    edge(27, 21);                  // eyebrows, inner ends first
    chain(21, 17);
    edge(27, 22);
    chain(22, 26);
    edge(27, 39);                  // right eye from the inner corner
    chain(39, 36);
    chain(39, 41);
    edge(27, 42);                  // left eye from the inner corner
    chain(42, 45);
    edge(42, 47);
    edge(47, 46);
    edge(33, 51);                  // outer lip from the top middle
    chain(51, 48);
    chain(51, 54);
    edge(48, 59);
    chain(59, 57);
    chain(54, 56);
    edge(48, 60);                  // inner lip from the left corner
    chain(60, 67);
    edge(57, 8);                   // jaw from the chin outwards
    chain(8, 0);
    chain(8, 16);
    return p;
}

}  // namespace detail

inline const IncidenceProfile& builtin_profile(BuiltinProfile id) {
    static const IncidenceProfile profiles[kBuiltinProfileCount] = {
        detail::make_bbox2d(),
        detail::make_box3d(),
        detail::make_skeleton15(),
        detail::make_face68(),
    };
    return profiles[static_cast<std::size_t>(id)];
}

inline const IncidenceProfile* find_builtin_profile(std::string_view name) {
    for (std::size_t i = 0; i < kBuiltinProfileCount; ++i) {
        const IncidenceProfile& p = builtin_profile(static_cast<BuiltinProfile>(i));
        if (p.name == name) return &p;
    }
    return nullptr;
}

inline std::optional<BuiltinProfile> builtin_id_of(const IncidenceProfile& profile) {
    for (std::size_t i = 0; i < kBuiltinProfileCount; ++i)
        if (builtin_profile(static_cast<BuiltinProfile>(i)) == profile)
            return static_cast<BuiltinProfile>(i);
    return std::nullopt;
}

// Parses the textual profile format: first non-comment line `name N D`,
// then one `from to` pair per line.  `#` starts a comment.
inline IncidenceProfile parse_profile_text(std::string_view text) {
    IncidenceProfile profile;
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        std::istringstream fields{std::string(line)};
        const auto trailing_junk = [&fields] {
            std::string rest;
            return static_cast<bool>(fields >> rest);
        };
        if (!have_header) {
            std::string name;
            long n = 0, d = 0;
            if (!(fields >> name)) continue;  // blank line before the header
            if (!(fields >> n >> d) || trailing_junk() || n <= 0 || n > 0xFFFF || d <= 0 ||
                d > 0xFF)
                throw ParseError("profile line " + std::to_string(line_no) +
                                 ": expected `name N D`");
            profile.name = name;
            profile.point_count = static_cast<std::uint16_t>(n);
            profile.dims = static_cast<std::uint8_t>(d);
            have_header = true;
            continue;
        }
        long from = 0, to = 0;
        if (!(fields >> from)) continue;  // blank or comment-only line
        if (!(fields >> to) || trailing_junk() || from < 0 || to < 0 || from > 0xFFFF ||
            to > 0xFFFF)
            throw ParseError("profile line " + std::to_string(line_no) +
                             ": expected `from to` edge pair");
        profile.edges.emplace_back(static_cast<std::uint16_t>(from),
                                   static_cast<std::uint16_t>(to));
    }
    if (!have_header) throw ParseError("profile file has no `name N D` header line");
    if (auto issues = validate_profile(profile); !issues.empty())
        throw ParseError("invalid profile '" + profile.name + "': " + issues.front());
    return profile;
}

}  // namespace kpsc
