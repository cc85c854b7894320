#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "kpsc/predict.hpp"

namespace kpsc {

// Voting weights for the three reference points consulted when picking a
// prediction mode.  Encoder and decoder must agree on these, so they are
// carried in the stream header.
struct SelectionWeights {
    std::uint8_t prev1 = 2;   // same point, one frame back
    std::uint8_t prev2 = 1;   // same point, two frames back
    std::uint8_t parent = 2;  // reference point, current frame

    bool operator==(const SelectionWeights&) const = default;
};

// One vote source: a point whose position both sides already know, plus
// the prediction inputs that were in scope when that point was coded.
// `actual` is null when the reference does not exist for this target.
struct ScoringReference {
    const Point* actual = nullptr;
    PredictionContext ctx;
    std::uint8_t weight = 0;
};

// Weighted mean bit cost of coding the references under `mode`, as an
// exact fraction (numerator, denominator).  References where the mode
// cannot run contribute nothing; nullopt means no reference could vote.
inline std::optional<std::pair<std::uint64_t, std::uint64_t>> score_mode(
    Mode mode, const std::vector<ScoringReference>& refs) {
    std::uint64_t num = 0;
    std::uint64_t den = 0;
    for (const ScoringReference& ref : refs) {
        if (!ref.actual || ref.weight == 0) continue;
        const auto res = residual_for(mode, ref.ctx, *ref.actual);
        if (!res) continue;
        num += ref.weight * residual_bits(*res);
        den += ref.weight;
    }
    if (den == 0) return std::nullopt;
    return std::make_pair(num, den);
}

// Picks the prediction mode for one point.  Candidates are the predictive
// modes that can run on the target, in fixed priority order; each is scored
// by the weighted mean cost of re-coding the reference points under it.
// Lower score wins, exact ties and unscoreable candidates fall back to
// priority order, and a target with no usable candidate codes independently.
//
// Only already-decoded positions feed the scores, so the decoder repeats
// the selection bit-for-bit without any mode flag in the stream.
inline Mode select_mode(const PredictionContext& target,
                        const std::vector<ScoringReference>& refs) {
    static constexpr std::array<Mode, 3> kCandidates = {
        Mode::Temporal, Mode::SpatialTemporal, Mode::Trajectory};

    Mode best = Mode::Independent;
    bool best_scored = false;
    std::uint64_t best_num = 0;
    std::uint64_t best_den = 1;
    bool have_best = false;

    for (const Mode mode : kCandidates) {
        if (!mode_available(mode, target)) continue;
        const auto score = score_mode(mode, refs);
        if (!have_best) {
            have_best = true;
            best = mode;
            if (score) {
                best_scored = true;
                best_num = score->first;
                best_den = score->second;
            }
            continue;
        }
        if (!score) continue;  // unscored never beats an existing pick
        if (!best_scored ||
            score->first * best_den < best_num * score->second) {
            best = mode;
            best_scored = true;
            best_num = score->first;
            best_den = score->second;
        }
    }
    return best;
}

}  // namespace kpsc
