#include "core/erqa.hpp"

#include "core/error.hpp"
#include "core/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace srm {

namespace {

void require_same_dims(const GradientField& a, const GradientField& b) {
    if (a.width != b.width || a.height != b.height)
        fail(ErrorCode::DimensionMismatch, "gradient fields differ in size");
}

std::size_t count_set(const std::vector<std::uint8_t>& mask) {
    std::size_t n = 0;
    for (std::uint8_t v : mask) n += v != 0;
    return n;
}

// Consumes every still-valid matching pair under `shift`, row-major over
// reference pixels. Returns the number of matches added.
std::size_t consume_matches(GradientField& reference, GradientField& input, Shift shift,
                            double threshold, std::vector<std::uint8_t>& tp) {
    const int w = reference.width, h = reference.height;
    const int y0 = std::max(0, shift.dy), y1 = std::min(h, h + shift.dy);
    const int x0 = std::max(0, shift.dx), x1 = std::min(w, w + shift.dx);
    std::size_t added = 0;
    for (int y = y0; y < y1; ++y) {
        const std::size_t row_r = static_cast<std::size_t>(y) * w;
        // Offset of the partner row minus dx; adding x >= x0 >= dx keeps it in range.
        const std::ptrdiff_t row_i =
            static_cast<std::ptrdiff_t>(y - shift.dy) * w - shift.dx;
        for (int x = x0; x < x1; ++x) {
            const std::size_t ir = row_r + x;
            const std::size_t ii = static_cast<std::size_t>(row_i + x);
            if (!reference.valid[ir] || !input.valid[ii]) continue;
            if (!cosine_match(reference.gx[ir], reference.gy[ir], input.gx[ii], input.gy[ii],
                              threshold))
                continue;
            tp[ir] = 1;
            reference.valid[ir] = 0;
            input.valid[ii] = 0;
            ++added;
        }
    }
    return added;
}

} // namespace

void ErqaConfig::validate() const {
    if (shift_radius < 0) fail(ErrorCode::InvalidArgument, "shift_radius must be >= 0");
    if (refine_iterations < 1) fail(ErrorCode::InvalidArgument, "refine_iterations must be >= 1");
    if (!(beta > 0.0)) fail(ErrorCode::InvalidArgument, "beta must be > 0");
    const std::size_t shifts = enumerate_shifts(shift_radius, shift_set).size();
    if (static_cast<std::size_t>(refine_iterations) > shifts)
        fail(ErrorCode::InvalidArgument,
             "refine_iterations exceeds the number of enumerated shifts (" +
                 std::to_string(shifts) + ")");
    gradient.validate();
    luma.validate();
}

std::vector<Shift> enumerate_shifts(int radius, ShiftSet set) {
    if (radius < 0) fail(ErrorCode::InvalidArgument, "radius must be >= 0");
    std::vector<Shift> shifts;
    const long long r2 = static_cast<long long>(radius) * radius;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
            if (set == ShiftSet::Disk &&
                static_cast<long long>(dx) * dx + static_cast<long long>(dy) * dy > r2)
                continue;
            shifts.push_back({dx, dy});
        }
    std::sort(shifts.begin(), shifts.end(), [](const Shift& a, const Shift& b) {
        const long long ra = static_cast<long long>(a.dx) * a.dx +
                             static_cast<long long>(a.dy) * a.dy;
        const long long rb = static_cast<long long>(b.dx) * b.dx +
                             static_cast<long long>(b.dy) * b.dy;
        if (ra != rb) return ra < rb;
        if (a.dy != b.dy) return a.dy < b.dy;
        return a.dx < b.dx;
    });
    return shifts;
}

std::size_t shift_similarity(const GradientField& reference, const GradientField& input,
                             Shift shift, double cosine_threshold) {
    require_same_dims(reference, input);
    const int w = reference.width, h = reference.height;
    const int y0 = std::max(0, shift.dy), y1 = std::min(h, h + shift.dy);
    const int x0 = std::max(0, shift.dx), x1 = std::min(w, w + shift.dx);
    std::size_t count = 0;
    for (int y = y0; y < y1; ++y) {
        const std::size_t row_r = static_cast<std::size_t>(y) * w;
        const std::ptrdiff_t row_i =
            static_cast<std::ptrdiff_t>(y - shift.dy) * w - shift.dx;
        for (int x = x0; x < x1; ++x) {
            const std::size_t ir = row_r + x;
            const std::size_t ii = static_cast<std::size_t>(row_i + x);
            if (!reference.valid[ir] || !input.valid[ii]) continue;
            if (cosine_match(reference.gx[ir], reference.gy[ir], input.gx[ii], input.gy[ii],
                             cosine_threshold))
                ++count;
        }
    }
    return count;
}

std::vector<ShiftCandidate> rank_shifts(const GradientField& reference,
                                        const GradientField& input, const ErqaConfig& cfg) {
    cfg.validate();
    require_same_dims(reference, input);
    std::vector<ShiftCandidate> candidates;
    for (Shift s : enumerate_shifts(cfg.shift_radius, cfg.shift_set))
        candidates.push_back(
            {s, shift_similarity(reference, input, s, cfg.gradient.cosine_threshold)});
    // Enumeration order is exactly the tie-break order, so a stable sort on
    // similarity alone implements "descending, ties by enumeration".
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const ShiftCandidate& a, const ShiftCandidate& b) {
                         return a.similarity > b.similarity;
                     });
    return candidates;
}

MatchMasks sequential_match(GradientField reference, GradientField input, const ErqaConfig& cfg,
                            std::vector<TraceEntry>* trace) {
    cfg.validate();
    require_same_dims(reference, input);

    MatchMasks masks;
    masks.width = reference.width;
    masks.height = reference.height;
    const std::size_t n = reference.size();
    masks.tp.assign(n, 0);
    masks.fn.assign(n, 0);
    masks.fp.assign(n, 0);
    if (trace) trace->clear();

    const double threshold = cfg.gradient.cosine_threshold;
    const std::size_t iterations = static_cast<std::size_t>(cfg.refine_iterations);

    if (!cfg.rerank_each_iteration) {
        const auto ranked = rank_shifts(reference, input, cfg);
        for (std::size_t k = 0; k < iterations; ++k) {
            const std::size_t added =
                consume_matches(reference, input, ranked[k].shift, threshold, masks.tp);
            if (trace) trace->push_back({ranked[k], added});
        }
    } else {
        // A processed shift can never match again: matching pairs were
        // consumed and validity only shrinks. So each iteration re-ranks the
        // unprocessed shifts on the current fields and takes the best.
        const auto shifts = enumerate_shifts(cfg.shift_radius, cfg.shift_set);
        std::vector<bool> processed(shifts.size(), false);
        for (std::size_t k = 0; k < iterations; ++k) {
            std::size_t best = shifts.size();
            std::size_t best_sim = 0;
            for (std::size_t s = 0; s < shifts.size(); ++s) {
                if (processed[s]) continue;
                const std::size_t sim = shift_similarity(reference, input, shifts[s], threshold);
                if (best == shifts.size() || sim > best_sim) {
                    best = s;
                    best_sim = sim;
                }
            }
            processed[best] = true;
            const std::size_t added =
                consume_matches(reference, input, shifts[best], threshold, masks.tp);
            if (trace) trace->push_back({{shifts[best], best_sim}, added});
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        masks.fn[i] = reference.valid[i];
        masks.fp[i] = input.valid[i];
    }
    masks.tp_count = count_set(masks.tp);
    masks.fn_count = count_set(masks.fn);
    masks.fp_count = count_set(masks.fp);
    return masks;
}

double f_beta(long long tp, long long fp, long long fn, double beta) {
    if (tp < 0 || fp < 0 || fn < 0) fail(ErrorCode::InvalidArgument, "counts must be >= 0");
    if (!(beta > 0.0)) fail(ErrorCode::InvalidArgument, "beta must be > 0");
    if (tp == 0) return fp == 0 && fn == 0 ? 1.0 : 0.0;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double b2 = beta * beta;
    return (1.0 + b2) * precision * recall / (b2 * precision + recall);
}

ErqaScore erqa_score(const Frame& reference, const Frame& distorted, const ErqaConfig& cfg) {
    cfg.validate();
    if (reference.width != distorted.width || reference.height != distorted.height)
        fail(ErrorCode::DimensionMismatch, "frames differ in size");

    const GradientField ref_field =
        percentile_filter(compute_gradients(to_luma(reference, cfg.luma)), cfg.gradient);
    const GradientField dist_field =
        percentile_filter(compute_gradients(to_luma(distorted, cfg.luma)), cfg.gradient);

    ErqaScore score;
    score.masks = sequential_match(ref_field, dist_field, cfg, &score.trace);
    score.value = f_beta(static_cast<long long>(score.masks.tp_count),
                         static_cast<long long>(score.masks.fp_count),
                         static_cast<long long>(score.masks.fn_count), cfg.beta);
    return score;
}

SequenceScore erqa_sequence(const FrameSequence& reference, const FrameSequence& distorted,
                            const ErqaConfig& cfg, unsigned jobs) {
    cfg.validate();
    if (reference.frames.size() != distorted.frames.size())
        fail(ErrorCode::DimensionMismatch, "sequences differ in length");
    if (reference.frames.empty())
        fail(ErrorCode::InvalidArgument, "sequences are empty");

    SequenceScore result;
    result.per_frame.resize(reference.frames.size());
    parallel_for(reference.frames.size(), jobs, [&](std::size_t i) {
        result.per_frame[i] = erqa_score(reference.frames[i], distorted.frames[i], cfg).value;
    });
    result.mean = std::accumulate(result.per_frame.begin(), result.per_frame.end(), 0.0) /
                  static_cast<double>(result.per_frame.size());
    return result;
}

Frame render_heatmap(const MatchMasks& masks, const Frame& background, HeatmapOverlay overlay) {
    if (masks.width != background.width || masks.height != background.height)
        fail(ErrorCode::DimensionMismatch, "mask and background differ in size");

    const Frame luma = to_luma(background);
    Frame out = Frame::filled(masks.width, masks.height, 3);
    const std::size_t n = luma.data.size();
    for (std::size_t i = 0; i < n; ++i) {
        const float dimmed = 0.4f * luma.data[i];
        float r = dimmed, g = dimmed, b = dimmed;
        if (overlay == HeatmapOverlay::Reference) {
            if (masks.fn[i]) { r = 1.0f; g = 0.0f; b = 0.0f; }
            if (masks.tp[i]) { r = 0.0f; g = 1.0f; b = 0.0f; }
        } else {
            if (masks.fp[i]) { r = 0.0f; g = 0.0f; b = 1.0f; }
        }
        out.data[i * 3 + 0] = r;
        out.data[i * 3 + 1] = g;
        out.data[i * 3 + 2] = b;
    }
    return out;
}

} // namespace srm
