#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "kpsc/bitio.hpp"
#include "kpsc/model.hpp"

namespace kpsc {

// Prediction modes, in on-the-wire tag order.  Residuals are coordinate
// deltas against the mode's prediction; Independent codes the coordinates
// themselves.
enum class Mode : std::uint8_t {
    Independent = 0,
    Temporal = 1,
    SpatialTemporal = 2,
    Trajectory = 3,
};

inline constexpr std::size_t kModeCount = 4;

inline std::string_view mode_name(Mode mode) {
    switch (mode) {
        case Mode::Independent: return "independent";
        case Mode::Temporal: return "temporal";
        case Mode::SpatialTemporal: return "spatial-temporal";
        case Mode::Trajectory: return "trajectory";
    }
    return "?";
}

// Predictions and residuals are computed in 64-bit space so that sums of
// 32-bit coordinates can never overflow; the entropy coder enforces the
// final range.
using WidePoint = std::vector<std::int64_t>;

// Everything a single point's predictors may draw on.  Null members mean
// the quantity does not exist (point newly visible, no reference, ...).
struct PredictionContext {
    std::uint8_t dims = 0;
    const Point* prev = nullptr;         // same point, one frame back
    const Point* prev2 = nullptr;        // same point, two frames back
    const Point* parent_now = nullptr;   // reference point, current frame
    const Point* parent_prev = nullptr;  // reference point, one frame back
    const WidePoint* motion = nullptr;   // object motion vector for this frame
    const Point* indep_ref = nullptr;    // nearest decoded ancestor, current frame
};

inline bool mode_available(Mode mode, const PredictionContext& ctx) {
    switch (mode) {
        case Mode::Independent: return true;
        case Mode::Temporal: return ctx.prev && ctx.motion;
        case Mode::SpatialTemporal:
            return ctx.prev && ctx.motion && ctx.parent_now && ctx.parent_prev;
        case Mode::Trajectory: return ctx.prev && ctx.prev2;
    }
    return false;
}

// Predicted position under `mode`, or nullopt when the mode's inputs are
// missing.  Independent predicts the ancestor reference point when one
// exists and the origin otherwise (absolute coding of start points).
// Spatial-temporal folds the reference point's own temporal correction
// into the prediction; the shared motion term cancels out of the formula
// but the mode still requires it to be defined.
inline std::optional<WidePoint> predict(Mode mode, const PredictionContext& ctx) {
    if (!mode_available(mode, ctx)) return std::nullopt;
    WidePoint out(ctx.dims, 0);
    switch (mode) {
        case Mode::Independent:
            if (ctx.indep_ref)
                for (std::size_t d = 0; d < ctx.dims; ++d)
                    out[d] = (*ctx.indep_ref)[d];
            break;
        case Mode::Temporal:
            for (std::size_t d = 0; d < ctx.dims; ++d)
                out[d] = static_cast<std::int64_t>((*ctx.prev)[d]) + (*ctx.motion)[d];
            break;
        case Mode::SpatialTemporal:
            for (std::size_t d = 0; d < ctx.dims; ++d)
                out[d] = static_cast<std::int64_t>((*ctx.prev)[d]) +
                         static_cast<std::int64_t>((*ctx.parent_now)[d]) -
                         static_cast<std::int64_t>((*ctx.parent_prev)[d]);
            break;
        case Mode::Trajectory:
            for (std::size_t d = 0; d < ctx.dims; ++d)
                out[d] = 2 * static_cast<std::int64_t>((*ctx.prev)[d]) -
                         static_cast<std::int64_t>((*ctx.prev2)[d]);
            break;
    }
    return out;
}

inline WidePoint residual(const Point& actual, const WidePoint& prediction) {
    WidePoint out(prediction.size());
    for (std::size_t d = 0; d < prediction.size(); ++d)
        out[d] = static_cast<std::int64_t>(actual[d]) - prediction[d];
    return out;
}

inline std::optional<WidePoint> residual_for(Mode mode, const PredictionContext& ctx,
                                             const Point& actual) {
    const auto prediction = predict(mode, ctx);
    if (!prediction) return std::nullopt;
    return residual(actual, *prediction);
}

// Cost in bits of entropy-coding each residual component.
inline std::uint64_t residual_bits(const WidePoint& res) {
    std::uint64_t bits = 0;
    for (const std::int64_t component : res) bits += bit_length_se64(component);
    return bits;
}

inline Coord narrow_coord(std::int64_t value) {
    if (value < INT32_MIN || value > INT32_MAX)
        throw CorruptStream("reconstructed coordinate out of range");
    return static_cast<Coord>(value);
}

inline Point reconstruct(const WidePoint& prediction, const WidePoint& res) {
    Point out(prediction.size());
    for (std::size_t d = 0; d < prediction.size(); ++d)
        out[d] = narrow_coord(prediction[d] + res[d]);
    return out;
}

}  // namespace kpsc
