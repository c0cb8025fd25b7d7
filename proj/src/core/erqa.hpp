#pragma once

#include "core/frame.hpp"
#include "core/gradients.hpp"

#include <cstdint>
#include <vector>

namespace srm {

// Shape of the shift search set: Euclidean disk (default) or Chebyshev square.
enum class ShiftSet { Disk, Square };

struct ErqaConfig {
    int shift_radius = 5;
    // Number of top-ranked shifts consumed by sequential matching.
    int refine_iterations = 35;
    double beta = 0.5;
    ShiftSet shift_set = ShiftSet::Disk;
    // Ablation switch: recompute shift similarities on the consumed fields
    // before each iteration instead of ranking once up front.
    bool rerank_each_iteration = false;
    GradientConfig gradient;
    LumaWeights luma;

    void validate() const;
};

struct Shift {
    int dx = 0;
    int dy = 0;
    friend bool operator==(const Shift&, const Shift&) = default;
};

struct ShiftCandidate {
    Shift shift;
    std::size_t similarity = 0;
};

// tp/fn live in reference coordinates, fp in input coordinates.
struct MatchMasks {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> tp;
    std::vector<std::uint8_t> fn;
    std::vector<std::uint8_t> fp;
    std::size_t tp_count = 0;
    std::size_t fp_count = 0;
    std::size_t fn_count = 0;
};

struct TraceEntry {
    ShiftCandidate candidate;
    std::size_t matches_added = 0;
};

struct ErqaScore {
    double value = 0.0;
    MatchMasks masks;
    std::vector<TraceEntry> trace;
};

struct SequenceScore {
    std::vector<double> per_frame;
    double mean = 0.0;
};

enum class HeatmapOverlay { Reference, Distorted };

// All integer shifts inside the radius, ordered by dx*dx+dy*dy ascending,
// then dy, then dx. This order doubles as the similarity tie-break.
std::vector<Shift> enumerate_shifts(int radius, ShiftSet set = ShiftSet::Disk);

// Number of reference pixels p whose partner p - shift is in bounds, with
// both pixels valid and their gradients cosine-matching.
std::size_t shift_similarity(const GradientField& reference, const GradientField& input,
                             Shift shift, double cosine_threshold);

// Every enumerated shift with its similarity, sorted descending. Similarities
// are computed once on the untouched fields; ties keep enumeration order.
std::vector<ShiftCandidate> rank_shifts(const GradientField& reference,
                                        const GradientField& input, const ErqaConfig& cfg);

// Greedy matching over the top-ranked shifts. For each shift, reference
// pixels are scanned row-major; a match marks tp at the reference pixel and
// consumes both pixels. Leftover reference pixels become fn, leftover input
// pixels fp. Fields are taken by value because matching consumes them.
MatchMasks sequential_match(GradientField reference, GradientField input,
                            const ErqaConfig& cfg, std::vector<TraceEntry>* trace = nullptr);

// Weighted harmonic mean of precision and recall. Conventions: all three
// counts zero scores 1.0 (nothing to restore, nothing invented); tp = 0 with
// any fp or fn scores 0.0.
double f_beta(long long tp, long long fp, long long fn, double beta);

ErqaScore erqa_score(const Frame& reference, const Frame& distorted, const ErqaConfig& cfg = {});

// Per-frame scores and their arithmetic mean. jobs > 1 evaluates frames on a
// worker pool; results are ordered by frame index regardless.
SequenceScore erqa_sequence(const FrameSequence& reference, const FrameSequence& distorted,
                            const ErqaConfig& cfg = {}, unsigned jobs = 1);

// Dimmed grayscale background with mask pixels painted on top. The Reference
// overlay shows tp (green) and fn (red) in reference coordinates; the
// Distorted overlay shows fp (blue) in input coordinates.
Frame render_heatmap(const MatchMasks& masks, const Frame& background, HeatmapOverlay overlay);

} // namespace srm
