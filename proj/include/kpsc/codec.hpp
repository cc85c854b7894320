#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kpsc/bitio.hpp"
#include "kpsc/model.hpp"
#include "kpsc/modesel.hpp"
#include "kpsc/predict.hpp"

namespace kpsc {

// Malformed container structure: bad magic, unknown version, bogus header
// fields.  Payload-level damage surfaces as TruncatedStream/CorruptStream.
struct FormatError : StreamError {
    using StreamError::StreamError;
};

inline constexpr std::array<std::uint8_t, 4> kMagic = {'K', 'P', 'S', 'C'};
inline constexpr std::uint8_t kStreamVersion = 1;

// How coordinate modes are chosen.  Adaptive is the normal codec; the
// forced policies exist for benchmarking single prediction modes and fall
// back to independent coding wherever the forced mode cannot run.  Policy
// is not recorded in the stream, so forced streams must be decoded with
// the same policy they were encoded with.
enum class CodingPolicy : std::uint8_t {
    Adaptive = 0,
    ForceIndependent,
    ForceTemporal,
    ForceSpatialTemporal,
    ForceTrajectory,
};

inline constexpr std::size_t kPolicyCount = 5;

inline std::string_view policy_name(CodingPolicy policy) {
    switch (policy) {
        case CodingPolicy::Adaptive: return "adaptive";
        case CodingPolicy::ForceIndependent: return "independent";
        case CodingPolicy::ForceTemporal: return "temporal";
        case CodingPolicy::ForceSpatialTemporal: return "spatial-temporal";
        case CodingPolicy::ForceTrajectory: return "trajectory";
    }
    return "?";
}

inline std::optional<CodingPolicy> policy_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kPolicyCount; ++i) {
        const auto policy = static_cast<CodingPolicy>(i);
        if (policy_name(policy) == name) return policy;
    }
    return std::nullopt;
}

struct CodecConfig {
    SelectionWeights weights{};
    QuantScale scale{};
    CodingPolicy policy = CodingPolicy::Adaptive;
    bool log_points = false;  // record per-point modes and residuals in stats
};

// One coded point, for diagnostics and property tests.
struct PointLog {
    std::uint32_t frame = 0;
    std::uint32_t track_id = 0;
    std::uint16_t point = 0;
    Mode mode = Mode::Independent;
    WidePoint residual;
};

struct FrameBits {
    std::uint64_t total = 0;
    std::uint64_t aux = 0;  // object count, track ids, visibility
};

// Bookkeeping derived while coding; never consulted by the decoder.
struct CodecStats {
    std::uint64_t payload_bits = 0;  // all frame bits, header and padding excluded
    std::uint64_t aux_bits = 0;
    std::array<std::uint64_t, kModeCount> mode_counts{};
    std::vector<FrameBits> frame_bits;
    std::vector<PointLog> points;  // filled only when log_points is set

    std::uint64_t coded_points() const {
        std::uint64_t n = 0;
        for (const std::uint64_t c : mode_counts) n += c;
        return n;
    }
};

struct StreamHeader {
    IncidenceProfile profile;
    SelectionWeights weights{};
    QuantScale scale{};
    std::uint32_t frame_count = 0;
};

struct EncodedStream {
    StreamHeader header;
    std::vector<std::uint8_t> bytes;  // complete container: header then payload
    std::size_t header_bytes = 0;
    CodecStats stats;
};

struct DecodeResult {
    Sequence sequence;
    StreamHeader header;
    std::size_t header_bytes = 0;
    CodecStats stats;
};

namespace detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

struct ByteCursor {
    std::span<const std::uint8_t> data;
    std::size_t pos = 0;

    std::uint8_t u8(const char* what) {
        if (pos >= data.size())
            throw FormatError(std::string("stream header truncated reading ") + what);
        return data[pos++];
    }
    std::uint16_t u16(const char* what) {
        const std::uint16_t high = u8(what);
        return static_cast<std::uint16_t>(high << 8 | u8(what));
    }
    std::uint32_t u32(const char* what) {
        const std::uint32_t high = u16(what);
        return high << 16 | u16(what);
    }
};

inline std::int32_t checked_se(std::int64_t v) {
    if (v > kSeMax || v < -static_cast<std::int64_t>(kSeMax))
        throw std::overflow_error("coordinate residual exceeds entropy coder range");
    return static_cast<std::int32_t>(v);
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize_header(const StreamHeader& header) {
    if (auto issues = validate_profile(header.profile); !issues.empty())
        throw std::invalid_argument("invalid profile: " + issues.front());
    if (header.profile.name.size() > 255)
        throw std::invalid_argument("profile name longer than 255 bytes");
    if (header.profile.edges.size() > 0xFFFF)
        throw std::invalid_argument("profile has more than 65535 edges");
    if (!header.weights.prev1 || !header.weights.prev2 || !header.weights.parent)
        throw std::invalid_argument("mode selection weights must be positive");
    if (!header.scale.num || !header.scale.den)
        throw std::invalid_argument("quantization scale must be positive");

    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    out.push_back(kStreamVersion);
    if (const auto builtin = builtin_id_of(header.profile)) {
        out.push_back(0);
        out.push_back(static_cast<std::uint8_t>(*builtin));
    } else {
        out.push_back(1);
        out.push_back(static_cast<std::uint8_t>(header.profile.name.size()));
        out.insert(out.end(), header.profile.name.begin(), header.profile.name.end());
        detail::put_u16(out, header.profile.point_count);
        out.push_back(header.profile.dims);
        detail::put_u16(out, static_cast<std::uint16_t>(header.profile.edges.size()));
        for (const auto& [from, to] : header.profile.edges) {
            detail::put_u16(out, from);
            detail::put_u16(out, to);
        }
    }
    out.push_back(header.weights.prev1);
    out.push_back(header.weights.prev2);
    out.push_back(header.weights.parent);
    detail::put_u32(out, header.scale.num);
    detail::put_u32(out, header.scale.den);
    detail::put_u32(out, header.frame_count);
    return out;
}

inline StreamHeader parse_header(std::span<const std::uint8_t> data, std::size_t& offset) {
    detail::ByteCursor in{data, offset};
    for (const std::uint8_t expected : kMagic)
        if (in.u8("magic") != expected)
            throw FormatError("bad magic bytes; not a key-point stream");
    if (const std::uint8_t version = in.u8("version"); version != kStreamVersion)
        throw FormatError("unsupported stream version " + std::to_string(version));

    StreamHeader header;
    const std::uint8_t kind = in.u8("profile kind");
    if (kind == 0) {
        const std::uint8_t id = in.u8("profile id");
        if (id >= kBuiltinProfileCount)
            throw FormatError("unknown built-in profile id " + std::to_string(id));
        header.profile = builtin_profile(static_cast<BuiltinProfile>(id));
    } else if (kind == 1) {
        const std::uint8_t name_len = in.u8("profile name length");
        for (std::uint8_t i = 0; i < name_len; ++i)
            header.profile.name.push_back(static_cast<char>(in.u8("profile name")));
        header.profile.point_count = in.u16("point count");
        header.profile.dims = in.u8("dimension count");
        const std::uint16_t edge_count = in.u16("edge count");
        header.profile.edges.reserve(edge_count);
        for (std::uint16_t e = 0; e < edge_count; ++e) {
            const std::uint16_t from = in.u16("edge");
            const std::uint16_t to = in.u16("edge");
            header.profile.edges.emplace_back(from, to);
        }
        if (auto issues = validate_profile(header.profile); !issues.empty())
            throw FormatError("stream profile invalid: " + issues.front());
    } else {
        throw FormatError("unknown profile kind " + std::to_string(kind));
    }
    header.weights.prev1 = in.u8("weights");
    header.weights.prev2 = in.u8("weights");
    header.weights.parent = in.u8("weights");
    if (!header.weights.prev1 || !header.weights.prev2 || !header.weights.parent)
        throw FormatError("mode selection weights must be positive");
    header.scale.num = in.u32("scale numerator");
    header.scale.den = in.u32("scale denominator");
    if (!header.scale.num || !header.scale.den)
        throw FormatError("quantization scale must be positive");
    header.frame_count = in.u32("frame count");
    offset = in.pos;
    return header;
}

// Track ids of one frame: first id verbatim, then each gap minus one
// (ids are strictly increasing, so gaps are at least 1).
inline void encode_track_ids(const std::vector<std::uint32_t>& ids, BitWriter& writer) {
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (k == 0) {
            ue_encode(writer, ids[0]);
        } else {
            if (ids[k] <= ids[k - 1])
                throw std::invalid_argument("track ids must be strictly increasing");
            ue_encode(writer, ids[k] - ids[k - 1] - 1);
        }
    }
}

inline std::vector<std::uint32_t> decode_track_ids(std::size_t count, BitReader& reader) {
    std::vector<std::uint32_t> ids;
    std::uint64_t prev = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const std::uint64_t delta = ue_decode(reader);
        const std::uint64_t id = (k == 0) ? delta : prev + delta + 1;
        if (id > 0xFFFFFFFFull) throw CorruptStream("track id overflows 32 bits");
        ids.push_back(static_cast<std::uint32_t>(id));
        prev = id;
    }
    return ids;
}

// Visibility flags: raw bits for an object without a previous frame,
// otherwise one change bit and, when set, the XOR mask against the
// previous frame's flags.
inline void encode_visibility(const std::vector<std::uint8_t>& current,
                              const std::vector<std::uint8_t>* previous, BitWriter& writer) {
    if (!previous) {
        for (const std::uint8_t flag : current) writer.write_bit(flag);
        return;
    }
    if (previous->size() != current.size())
        throw std::invalid_argument("visibility length mismatch");
    if (*previous == current) {
        writer.write_bit(0);
        return;
    }
    writer.write_bit(1);
    for (std::size_t j = 0; j < current.size(); ++j)
        writer.write_bit(current[j] ^ (*previous)[j]);
}

inline std::vector<std::uint8_t> decode_visibility(std::size_t count,
                                                   const std::vector<std::uint8_t>* previous,
                                                   BitReader& reader) {
    std::vector<std::uint8_t> flags(count);
    if (!previous) {
        for (std::size_t j = 0; j < count; ++j)
            flags[j] = static_cast<std::uint8_t>(reader.read_bit());
        return flags;
    }
    if (previous->size() != count) throw std::invalid_argument("visibility length mismatch");
    if (reader.read_bit() == 0) return *previous;
    for (std::size_t j = 0; j < count; ++j)
        flags[j] = static_cast<std::uint8_t>((*previous)[j] ^ reader.read_bit());
    return flags;
}

namespace detail {

// Runs the per-frame coding loop.  Encoding and decoding share every
// decision (coding order, motion vectors, mode selection); they differ
// only in whether residuals are derived from known coordinates or read
// from the stream.  That symmetry is what lets mode selection stay
// implicit in the bitstream.
class SequenceCoder {
  public:
    SequenceCoder(const IncidenceProfile& profile, const CodecConfig& config)
        : profile_(profile), plan_(plan_traversal(profile)), config_(config) {}

    void encode(const Sequence& seq, BitWriter& writer, CodecStats& stats) {
        for (std::size_t f = 0; f < seq.frames.size(); ++f) {
            const Frame& frame = seq.frames[f];
            const std::uint64_t frame_start = writer.bit_count();
            if (frame.objects.size() > kUeMax)
                throw std::invalid_argument("too many objects in one frame");
            ue_encode(writer, static_cast<std::uint32_t>(frame.objects.size()));
            std::vector<std::uint32_t> ids;
            ids.reserve(frame.objects.size());
            for (const ObjectInstance& obj : frame.objects) ids.push_back(obj.track_id);
            encode_track_ids(ids, writer);
            std::uint64_t aux = writer.bit_count() - frame_start;

            Frame done;
            done.index = static_cast<std::uint32_t>(f);
            for (const ObjectInstance& obj : frame.objects) {
                const ObjectInstance* prev_obj = object_at(history_size() - 1, obj.track_id);
                const std::uint64_t vis_start = writer.bit_count();
                encode_visibility(obj.visibility, prev_obj ? &prev_obj->visibility : nullptr,
                                  writer);
                aux += writer.bit_count() - vis_start;
                WorkObject work{obj.track_id, obj.visibility,
                                std::vector<std::optional<Point>>(profile_.point_count)};
                code_object<true>(work, &obj, &writer, nullptr, stats);
                done.objects.push_back(assemble(std::move(work)));
            }
            stats.frame_bits.push_back({writer.bit_count() - frame_start, aux});
            stats.aux_bits += aux;
            history_.push_back(std::move(done));
        }
        stats.payload_bits = writer.bit_count();
    }

    std::vector<Frame> decode(BitReader& reader, std::uint32_t frame_count,
                              std::size_t max_frames, CodecStats& stats) {
        const std::size_t limit = std::min<std::size_t>(frame_count, max_frames);
        for (std::size_t f = 0; f < limit; ++f) {
            try {
                decode_frame(f, reader, stats);
            } catch (const TruncatedStream& e) {
                throw TruncatedStream("frame " + std::to_string(f) + ": " + e.what());
            } catch (const CorruptStream& e) {
                throw CorruptStream("frame " + std::to_string(f) + ": " + e.what());
            }
        }
        stats.payload_bits = reader.position();
        return std::move(history_);
    }

  private:
    struct WorkObject {
        std::uint32_t track_id = 0;
        std::vector<std::uint8_t> vis;
        std::vector<std::optional<Point>> pts;  // by point index, set once coded
    };

    std::int64_t history_size() const { return static_cast<std::int64_t>(history_.size()); }

    const ObjectInstance* object_at(std::int64_t frame, std::uint32_t id) const {
        if (frame < 0 || frame >= history_size()) return nullptr;
        return history_[static_cast<std::size_t>(frame)].find(id);
    }

    const Point* point_at(std::int64_t frame, std::uint32_t id, std::uint16_t i) const {
        const ObjectInstance* obj = object_at(frame, id);
        return obj ? obj->point(i) : nullptr;
    }

    // Point with maximum out-degree among those visible in both frames.
    static std::optional<std::uint16_t> central_between(const std::vector<std::uint8_t>& now,
                                                        const std::vector<std::uint8_t>& before,
                                                        const std::vector<std::uint32_t>& degree) {
        std::optional<std::uint16_t> best;
        for (std::uint16_t j = 0; j < now.size(); ++j) {
            if (!now[j] || !before[j]) continue;
            if (!best || degree[j] > degree[*best]) best = j;
        }
        return best;
    }

    // The object's motion vector at a past frame, rebuilt from
    // reconstructed data exactly as it was defined when that frame was
    // coded.  Needed to re-run mode availability at reference points.
    std::optional<WidePoint> motion_at(std::int64_t frame, std::uint32_t id) const {
        if (frame < 1) return std::nullopt;
        const ObjectInstance* cur = object_at(frame, id);
        const ObjectInstance* before = object_at(frame - 1, id);
        if (!cur || !before) return std::nullopt;
        const auto c = central_between(cur->visibility, before->visibility, plan_.out_degree);
        if (!c) return std::nullopt;
        const Point* a = cur->point(*c);
        const Point* b = before->point(*c);
        WidePoint mv(profile_.dims);
        for (std::size_t d = 0; d < mv.size(); ++d)
            mv[d] = static_cast<std::int64_t>((*a)[d]) - (*b)[d];
        return mv;
    }

    PredictionContext target_context(const WorkObject& work, std::uint16_t i,
                                     const std::optional<WidePoint>& mv) const {
        const std::int64_t f = history_size();
        PredictionContext ctx;
        ctx.dims = profile_.dims;
        ctx.prev = point_at(f - 1, work.track_id, i);
        ctx.prev2 = point_at(f - 2, work.track_id, i);
        const std::int32_t p = plan_.parent[i];
        if (p >= 0) {
            if (work.pts[p]) ctx.parent_now = &*work.pts[p];
            ctx.parent_prev = point_at(f - 1, work.track_id, static_cast<std::uint16_t>(p));
        }
        if (mv) ctx.motion = &*mv;
        for (std::int32_t a = p; a >= 0; a = plan_.parent[a])
            if (work.pts[a]) {
                ctx.indep_ref = &*work.pts[a];
                break;
            }
        return ctx;
    }

    // The prediction inputs the co-located point had when frame `frame`
    // was coded; used to re-derive its hypothetical bit costs.
    PredictionContext history_context(std::int64_t frame, std::uint32_t id, std::uint16_t i,
                                      const std::optional<WidePoint>& mv_then) const {
        PredictionContext ctx;
        ctx.dims = profile_.dims;
        ctx.prev = point_at(frame - 1, id, i);
        ctx.prev2 = point_at(frame - 2, id, i);
        const std::int32_t p = plan_.parent[i];
        if (p >= 0) {
            ctx.parent_now = point_at(frame, id, static_cast<std::uint16_t>(p));
            ctx.parent_prev = point_at(frame - 1, id, static_cast<std::uint16_t>(p));
        }
        if (mv_then) ctx.motion = &*mv_then;
        return ctx;
    }

    std::vector<ScoringReference> scoring_references(const WorkObject& work, std::uint16_t i,
                                                     const std::optional<WidePoint>& mv,
                                                     const std::optional<WidePoint>& mv1,
                                                     const std::optional<WidePoint>& mv2) const {
        const std::int64_t f = history_size();
        std::vector<ScoringReference> refs(3);
        refs[0].weight = config_.weights.prev1;
        refs[0].actual = point_at(f - 1, work.track_id, i);
        if (refs[0].actual) refs[0].ctx = history_context(f - 1, work.track_id, i, mv1);
        refs[1].weight = config_.weights.prev2;
        refs[1].actual = point_at(f - 2, work.track_id, i);
        if (refs[1].actual) refs[1].ctx = history_context(f - 2, work.track_id, i, mv2);
        refs[2].weight = config_.weights.parent;
        const std::int32_t p = plan_.parent[i];
        if (p >= 0 && work.pts[p]) {
            refs[2].actual = &*work.pts[p];
            PredictionContext& ctx = refs[2].ctx;
            ctx.dims = profile_.dims;
            ctx.prev = point_at(f - 1, work.track_id, static_cast<std::uint16_t>(p));
            ctx.prev2 = point_at(f - 2, work.track_id, static_cast<std::uint16_t>(p));
            const std::int32_t g = plan_.parent[p];
            if (g >= 0) {
                if (work.pts[g]) ctx.parent_now = &*work.pts[g];
                ctx.parent_prev = point_at(f - 1, work.track_id, static_cast<std::uint16_t>(g));
            }
            if (mv) ctx.motion = &*mv;
        }
        return refs;
    }

    Mode pick_mode(const PredictionContext& ctx, const WorkObject& work, std::uint16_t i,
                   const std::optional<WidePoint>& mv, const std::optional<WidePoint>& mv1,
                   const std::optional<WidePoint>& mv2) const {
        switch (config_.policy) {
            case CodingPolicy::Adaptive:
                if (!ctx.prev) return Mode::Independent;
                return select_mode(ctx, scoring_references(work, i, mv, mv1, mv2));
            case CodingPolicy::ForceIndependent:
                return Mode::Independent;
            case CodingPolicy::ForceTemporal:
                return mode_available(Mode::Temporal, ctx) ? Mode::Temporal : Mode::Independent;
            case CodingPolicy::ForceSpatialTemporal:
                return mode_available(Mode::SpatialTemporal, ctx) ? Mode::SpatialTemporal
                                                                  : Mode::Independent;
            case CodingPolicy::ForceTrajectory:
                return mode_available(Mode::Trajectory, ctx) ? Mode::Trajectory
                                                             : Mode::Independent;
        }
        return Mode::Independent;
    }

    template <bool kEncode>
    void code_object(WorkObject& work, const ObjectInstance* original, BitWriter* writer,
                     BitReader* reader, CodecStats& stats) {
        const std::int64_t f = history_size();
        const std::uint32_t id = work.track_id;
        const ObjectInstance* prev_obj = config_.policy == CodingPolicy::ForceIndependent
                                             ? nullptr
                                             : object_at(f - 1, id);
        std::optional<std::uint16_t> central;
        if (prev_obj) central = central_between(work.vis, prev_obj->visibility, plan_.out_degree);

        std::optional<WidePoint> mv;        // defined once the central is coded
        std::optional<WidePoint> mv1, mv2;  // motion at f−1 / f−2, for scoring
        if (config_.policy == CodingPolicy::Adaptive && central) {
            mv1 = motion_at(f - 1, id);
            mv2 = motion_at(f - 2, id);
        }

        const auto code_point = [&](std::uint16_t i, Mode mode, const WidePoint& prediction) {
            WidePoint res(profile_.dims);
            if constexpr (kEncode) {
                res = residual(*original->point(i), prediction);
                for (const std::int64_t component : res)
                    se_encode(*writer, checked_se(component));
                work.pts[i] = *original->point(i);
            } else {
                for (std::size_t d = 0; d < res.size(); ++d) res[d] = se_decode(*reader);
                work.pts[i] = reconstruct(prediction, res);
            }
            ++stats.mode_counts[static_cast<std::size_t>(mode)];
            if (config_.log_points)
                stats.points.push_back(
                    {static_cast<std::uint32_t>(f), id, i, mode, std::move(res)});
        };

        const auto code_one = [&](std::uint16_t i) {
            if (!work.vis[i]) return;
            if (central && i == *central) {
                // The central goes first and is always predicted from its
                // own previous position, so its residual is the motion
                // vector every other mode of this object builds on.
                const Point* prev_pt = prev_obj->point(i);
                WidePoint prediction(profile_.dims);
                for (std::size_t d = 0; d < prediction.size(); ++d)
                    prediction[d] = (*prev_pt)[d];
                code_point(i, Mode::Temporal, prediction);
                mv.emplace(profile_.dims);
                for (std::size_t d = 0; d < mv->size(); ++d)
                    (*mv)[d] = static_cast<std::int64_t>((*work.pts[i])[d]) - (*prev_pt)[d];
                return;
            }
            const PredictionContext ctx = target_context(work, i, mv);
            const Mode mode = pick_mode(ctx, work, i, mv, mv1, mv2);
            code_point(i, mode, *predict(mode, ctx));
        };

        if (central) code_one(*central);
        for (const TraversalStep& step : plan_.order) {
            if (central && step.target == *central) continue;
            code_one(step.target);
        }
    }

    ObjectInstance assemble(WorkObject&& work) const {
        ObjectInstance obj;
        obj.track_id = work.track_id;
        obj.visibility = std::move(work.vis);
        for (std::uint16_t j = 0; j < profile_.point_count; ++j)
            if (obj.visibility[j]) obj.points.push_back(std::move(*work.pts[j]));
        return obj;
    }

    void decode_frame(std::size_t f, BitReader& reader, CodecStats& stats) {
        const std::uint64_t frame_start = reader.position();
        const std::uint32_t count = ue_decode(reader);
        const std::vector<std::uint32_t> ids = decode_track_ids(count, reader);
        std::uint64_t aux = reader.position() - frame_start;

        Frame frame;
        frame.index = static_cast<std::uint32_t>(f);
        for (const std::uint32_t id : ids) {
            const ObjectInstance* prev_obj = object_at(history_size() - 1, id);
            const std::uint64_t vis_start = reader.position();
            auto vis = decode_visibility(profile_.point_count,
                                         prev_obj ? &prev_obj->visibility : nullptr, reader);
            aux += reader.position() - vis_start;
            WorkObject work{id, std::move(vis),
                            std::vector<std::optional<Point>>(profile_.point_count)};
            code_object<false>(work, nullptr, nullptr, &reader, stats);
            frame.objects.push_back(assemble(std::move(work)));
        }
        stats.frame_bits.push_back({reader.position() - frame_start, aux});
        stats.aux_bits += aux;
        history_.push_back(std::move(frame));
    }

    const IncidenceProfile& profile_;
    TraversalPlan plan_;
    CodecConfig config_;
    std::vector<Frame> history_;  // reconstructed frames, canonical indices
};

}  // namespace detail

// Frame indices are canonicalized: prediction always treats stored frames
// as consecutive, and decoding yields indices 0..frame_count−1.
inline EncodedStream encode_sequence(const Sequence& seq, const CodecConfig& config = {}) {
    if (auto issues = validate_sequence(seq); !issues.empty())
        throw std::invalid_argument("sequence invalid: " + issues.front());
    if (seq.frames.size() > 0xFFFFFFFFull)
        throw std::invalid_argument("sequence has too many frames for the container");

    EncodedStream out;
    out.header = StreamHeader{seq.profile, config.weights, config.scale,
                              static_cast<std::uint32_t>(seq.frames.size())};
    out.bytes = serialize_header(out.header);
    out.header_bytes = out.bytes.size();

    BitWriter writer;
    detail::SequenceCoder coder(seq.profile, config);
    coder.encode(seq, writer, out.stats);
    const std::vector<std::uint8_t> payload = writer.release();
    out.bytes.insert(out.bytes.end(), payload.begin(), payload.end());
    return out;
}

// `config` supplies the coding policy and logging switches; weights and
// scale always come from the stream header.  `max_frames` allows prefix
// decoding (frames are self-delimiting in order).
inline DecodeResult decode_sequence(std::span<const std::uint8_t> bytes,
                                    const CodecConfig& config = {},
                                    std::size_t max_frames =
                                        std::numeric_limits<std::size_t>::max()) {
    std::size_t offset = 0;
    StreamHeader header = parse_header(bytes, offset);
    CodecConfig effective = config;
    effective.weights = header.weights;
    effective.scale = header.scale;

    DecodeResult out;
    out.sequence.profile = header.profile;
    BitReader reader(bytes.subspan(offset));
    detail::SequenceCoder coder(header.profile, effective);
    out.sequence.frames = coder.decode(reader, header.frame_count, max_frames, out.stats);
    out.header = std::move(header);
    out.header_bytes = offset;
    return out;
}

}  // namespace kpsc
