#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kpsc/codec.hpp"
#include "kpsc/model.hpp"

namespace kpsc {

// Bits the auxiliary layer (object counts, track ids, visibility) takes
// for a sequence, computed with the same coders the codec uses.
inline std::uint64_t auxiliary_bits(const Sequence& seq) {
    BitWriter writer;
    for (std::size_t f = 0; f < seq.frames.size(); ++f) {
        const Frame& frame = seq.frames[f];
        ue_encode(writer, static_cast<std::uint32_t>(frame.objects.size()));
        std::vector<std::uint32_t> ids;
        ids.reserve(frame.objects.size());
        for (const ObjectInstance& obj : frame.objects) ids.push_back(obj.track_id);
        encode_track_ids(ids, writer);
        for (const ObjectInstance& obj : frame.objects) {
            const ObjectInstance* prev = f > 0 ? seq.frames[f - 1].find(obj.track_id) : nullptr;
            encode_visibility(obj.visibility, prev ? &prev->visibility : nullptr, writer);
        }
    }
    return writer.bit_count();
}

inline double bits_per_point(const EncodedStream& stream, const Sequence& seq) {
    const std::uint64_t points = seq.visible_points();
    if (points == 0) throw std::invalid_argument("sequence has no visible points");
    return static_cast<double>(stream.stats.payload_bits) / static_cast<double>(points);
}

// Reference size: 16 bits per coordinate plus the same auxiliary bits the
// compressed stream needs.
inline std::uint64_t fixed_baseline_bits(const Sequence& seq) {
    return 16ull * seq.profile.dims * seq.visible_points() + auxiliary_bits(seq);
}

inline double compression_ratio(const EncodedStream& stream, const Sequence& seq) {
    const std::uint64_t baseline = fixed_baseline_bits(seq);
    if (baseline == 0) throw std::invalid_argument("baseline size is zero");
    return 100.0 * static_cast<double>(stream.stats.payload_bits) /
           static_cast<double>(baseline);
}

// Keeps every (skip+1)-th frame and renumbers the survivors from zero.
inline Sequence frame_skip(const Sequence& seq, std::uint32_t skip) {
    Sequence out;
    out.profile = seq.profile;
    for (std::size_t k = 0; k < seq.frames.size(); k += std::size_t{skip} + 1) {
        Frame frame = seq.frames[k];
        frame.index = static_cast<std::uint32_t>(out.frames.size());
        out.frames.push_back(std::move(frame));
    }
    return out;
}

namespace detail {

// Reproducible Gaussian sampling, pinned across platforms: mt19937_64
// driving a non-caching Box-Muller transform,
//   u = (next() >> 11) · 2^-53            (uniform in [0, 1))
//   z = sqrt(−2 · ln(1 − u1)) · cos(2π · u2).
struct GaussianSampler {
    std::mt19937_64 rng;

    explicit GaussianSampler(std::uint64_t seed) : rng(seed) {}

    double uniform() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
};

inline Coord noisy_coord(std::int64_t value) {
    if (value < INT32_MIN || value > INT32_MAX)
        throw std::overflow_error("noisy coordinate exceeds 32-bit range");
    return static_cast<Coord>(value);
}

}  // namespace detail

// Adds rounded zero-mean Gaussian offsets of deviation `sigma` to every
// visible coordinate, in frame → object → point → dimension order.
inline Sequence add_gaussian_noise(const Sequence& seq, double sigma, std::uint64_t seed) {
    if (sigma < 0) throw std::invalid_argument("noise deviation must be non-negative");
    Sequence out = seq;
    if (sigma == 0) return out;
    detail::GaussianSampler g(seed);
    for (Frame& frame : out.frames)
        for (ObjectInstance& obj : frame.objects)
            for (Point& point : obj.points)
                for (Coord& c : point)
                    c = detail::noisy_coord(static_cast<std::int64_t>(c) +
                                            std::llround(g.normal() * sigma));
    return out;
}

enum class SynthKind : std::uint8_t {
    Static = 0,
    ConstantVelocity,
    RandomWalk,
    Articulated,
};

inline std::string_view synth_name(SynthKind kind) {
    switch (kind) {
        case SynthKind::Static: return "static";
        case SynthKind::ConstantVelocity: return "constant_velocity";
        case SynthKind::RandomWalk: return "random_walk";
        case SynthKind::Articulated: return "articulated";
    }
    return "?";
}

inline std::optional<SynthKind> synth_from_name(std::string_view name) {
    for (int i = 0; i < 4; ++i) {
        const auto kind = static_cast<SynthKind>(i);
        if (synth_name(kind) == name) return kind;
    }
    return std::nullopt;
}

struct SynthParams {
    SynthKind kind = SynthKind::RandomWalk;
    IncidenceProfile profile = builtin_profile(BuiltinProfile::Skeleton15);
    std::uint32_t frames = 30;
    std::uint32_t objects = 2;
    double step_std = 2.0;    // per-frame step deviation (walk / articulated anchor)
    double jitter_std = 1.0;  // articulated per-point drift deviation
    double occlusion = 0.0;   // probability a point is unseen in a frame
    double churn = 0.0;       // probability an object sits out a frame
    std::int32_t region = 512;  // anchors start inside [0, region]^D
};

// Deterministic synthetic sequences.  Motion state advances every frame
// whether or not the object/point is emitted, so occlusion and churn
// never disturb the underlying trajectories.  Track ids carry random
// gaps; objects absent for a frame re-enter as fresh appearances.
inline Sequence synth_generate(const SynthParams& params, std::uint64_t seed) {
    if (auto issues = validate_profile(params.profile); !issues.empty())
        throw std::invalid_argument("synth: invalid profile: " + issues.front());
    if (params.frames == 0) throw std::invalid_argument("synth: frame count must be positive");
    if (params.objects == 0) throw std::invalid_argument("synth: object count must be positive");
    if (params.step_std < 0 || params.jitter_std < 0)
        throw std::invalid_argument("synth: step deviation must be non-negative");
    if (params.occlusion < 0 || params.occlusion >= 1 || params.churn < 0 || params.churn >= 1)
        throw std::invalid_argument("synth: probabilities must lie in [0, 1)");
    if (params.region <= 0) throw std::invalid_argument("synth: region must be positive");

    detail::GaussianSampler g(seed);
    const auto draw_int = [&g](std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(g.rng() %
                                              static_cast<std::uint64_t>(hi - lo + 1));
    };

    const std::uint16_t n = params.profile.point_count;
    const std::uint8_t dims = params.profile.dims;

    struct ObjectState {
        std::uint32_t id = 0;
        WidePoint anchor;
        std::vector<WidePoint> offset;  // per point, relative to the anchor
        std::vector<WidePoint> pos;     // absolute latent positions
        std::vector<WidePoint> vel;     // constant per-point velocities
        std::vector<WidePoint> jitter;  // articulated per-point drift
    };

    std::vector<ObjectState> states(params.objects);
    std::uint32_t next_id = 0;
    for (ObjectState& st : states) {
        st.id = next_id + static_cast<std::uint32_t>(draw_int(0, 4));
        next_id = st.id + 1;
        st.anchor.resize(dims);
        for (auto& a : st.anchor) a = draw_int(0, params.region);
        st.offset.assign(n, WidePoint(dims));
        st.pos.assign(n, WidePoint(dims));
        st.jitter.assign(n, WidePoint(dims, 0));
        for (std::uint16_t j = 0; j < n; ++j)
            for (std::uint8_t d = 0; d < dims; ++d) {
                st.offset[j][d] = draw_int(-32, 32);
                st.pos[j][d] = st.anchor[d] + st.offset[j][d];
            }
        if (params.kind == SynthKind::ConstantVelocity) {
            WidePoint base(dims);
            for (auto& v : base) v = draw_int(-4, 4);
            st.vel.assign(n, WidePoint(dims));
            for (std::uint16_t j = 0; j < n; ++j)
                for (std::uint8_t d = 0; d < dims; ++d)
                    st.vel[j][d] = base[d] + draw_int(-2, 2);
        }
    }

    Sequence seq;
    seq.profile = params.profile;
    for (std::uint32_t f = 0; f < params.frames; ++f) {
        Frame frame;
        frame.index = f;
        for (ObjectState& st : states) {
            if (f > 0) {
                switch (params.kind) {
                    case SynthKind::Static:
                        break;
                    case SynthKind::ConstantVelocity:
                        for (std::uint16_t j = 0; j < n; ++j)
                            for (std::uint8_t d = 0; d < dims; ++d)
                                st.pos[j][d] += st.vel[j][d];
                        break;
                    case SynthKind::RandomWalk:
                        for (std::uint16_t j = 0; j < n; ++j)
                            for (std::uint8_t d = 0; d < dims; ++d)
                                st.pos[j][d] += std::llround(g.normal() * params.step_std);
                        break;
                    case SynthKind::Articulated:
                        for (std::uint8_t d = 0; d < dims; ++d)
                            st.anchor[d] += std::llround(g.normal() * params.step_std);
                        for (std::uint16_t j = 0; j < n; ++j)
                            for (std::uint8_t d = 0; d < dims; ++d) {
                                st.jitter[j][d] += std::llround(g.normal() * params.jitter_std);
                                st.pos[j][d] = st.anchor[d] + st.offset[j][d] + st.jitter[j][d];
                            }
                        break;
                }
            }
            const bool present = params.churn == 0 || g.uniform() >= params.churn;
            ObjectInstance obj;
            obj.track_id = st.id;
            obj.visibility.resize(n);
            for (std::uint16_t j = 0; j < n; ++j)
                obj.visibility[j] =
                    params.occlusion == 0 || g.uniform() >= params.occlusion ? 1 : 0;
            if (!present) continue;
            for (std::uint16_t j = 0; j < n; ++j) {
                if (!obj.visibility[j]) continue;
                Point point(dims);
                for (std::uint8_t d = 0; d < dims; ++d)
                    point[d] = detail::noisy_coord(st.pos[j][d]);
                obj.points.push_back(std::move(point));
            }
            frame.objects.push_back(std::move(obj));
        }
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

// One evaluated (sequence, perturbation, coder configuration) cell.
struct MetricRow {
    std::string sequence;
    std::string profile;
    std::uint32_t skip = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    CodingPolicy config = CodingPolicy::Adaptive;
    std::uint64_t total_bits = 0;
    std::uint64_t points = 0;
    double bits_per_point = 0.0;
    std::uint64_t baseline_bits = 0;
    double ratio_percent = 0.0;
    std::array<std::uint64_t, kModeCount> mode_counts{};
};

struct NamedSequence {
    std::string name;
    Sequence seq;
};

// Cross-product evaluation: every input × skip × sigma × configuration,
// rows in that nesting order.  Perturbations apply before encoding, skip
// first and then noise, so losslessness is judged against the perturbed
// sequence.  The same seed feeds each cell's noise, keeping
// configurations comparable on identical data.
inline std::vector<MetricRow> run_matrix(const std::vector<NamedSequence>& inputs,
                                         const std::vector<std::uint32_t>& skips,
                                         const std::vector<double>& sigmas,
                                         const std::vector<CodingPolicy>& configs,
                                         std::uint64_t seed,
                                         const CodecConfig& base = {}) {
    std::vector<MetricRow> rows;
    for (const NamedSequence& input : inputs)
        for (const std::uint32_t skip : skips)
            for (const double sigma : sigmas) {
                const Sequence prepared =
                    add_gaussian_noise(frame_skip(input.seq, skip), sigma, seed);
                for (const CodingPolicy config : configs) {
                    CodecConfig cfg = base;
                    cfg.policy = config;
                    const EncodedStream stream = encode_sequence(prepared, cfg);
                    MetricRow row;
                    row.sequence = input.name;
                    row.profile = input.seq.profile.name;
                    row.skip = skip;
                    row.sigma = sigma;
                    row.seed = seed;
                    row.config = config;
                    row.total_bits = stream.stats.payload_bits;
                    row.points = prepared.visible_points();
                    row.bits_per_point = bits_per_point(stream, prepared);
                    row.baseline_bits = fixed_baseline_bits(prepared);
                    row.ratio_percent = compression_ratio(stream, prepared);
                    row.mode_counts = stream.stats.mode_counts;
                    rows.push_back(std::move(row));
                }
            }
    return rows;
}

namespace detail {

inline std::string real_field(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

}  // namespace detail

inline std::string matrix_csv(const std::vector<MetricRow>& rows) {
    std::ostringstream out;
    out << "sequence,profile,skip,sigma,seed,config,total_bits,points,bits_per_point,"
           "baseline_bits,ratio_percent,mode_independent,mode_temporal,"
           "mode_spatial_temporal,mode_trajectory\n";
    for (const MetricRow& r : rows) {
        out << r.sequence << ',' << r.profile << ',' << r.skip << ','
            << detail::real_field(r.sigma) << ',' << r.seed << ',' << policy_name(r.config)
            << ',' << r.total_bits << ',' << r.points << ','
            << detail::real_field(r.bits_per_point) << ',' << r.baseline_bits << ','
            << detail::real_field(r.ratio_percent);
        for (const std::uint64_t count : r.mode_counts) out << ',' << count;
        out << '\n';
    }
    return out.str();
}

inline std::string matrix_json(const std::vector<MetricRow>& rows) {
    nlohmann::json doc = nlohmann::json::array();
    for (const MetricRow& r : rows) {
        nlohmann::json row;
        row["sequence"] = r.sequence;
        row["profile"] = r.profile;
        row["skip"] = r.skip;
        row["sigma"] = r.sigma;
        row["seed"] = r.seed;
        row["config"] = policy_name(r.config);
        row["total_bits"] = r.total_bits;
        row["points"] = r.points;
        row["bits_per_point"] = r.bits_per_point;
        row["baseline_bits"] = r.baseline_bits;
        row["ratio_percent"] = r.ratio_percent;
        row["mode_independent"] = r.mode_counts[0];
        row["mode_temporal"] = r.mode_counts[1];
        row["mode_spatial_temporal"] = r.mode_counts[2];
        row["mode_trajectory"] = r.mode_counts[3];
        doc.push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

}  // namespace kpsc
