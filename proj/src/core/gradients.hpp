#pragma once

#include "core/frame.hpp"

#include <cstdint>
#include <vector>

namespace srm {

enum class FilterDirection {
    DropAbove, // invalidate magnitudes strictly above the percentile
    DropBelow, // invalidate magnitudes strictly below the percentile
};

struct GradientConfig {
    double percentile_q = 0.85;
    FilterDirection filter_direction = FilterDirection::DropAbove;
    bool drop_zero_magnitude = true;
    double cosine_threshold = 0.85;

    void validate() const;
};

// Per-pixel central-difference gradients plus a validity mask. Invalid
// pixels never participate in percentile statistics or matching.
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<float> gx;
    std::vector<float> gy;
    std::vector<std::uint8_t> valid;

    std::size_t size() const { return static_cast<std::size_t>(width) * height; }
    std::size_t valid_count() const;

    double magnitude_sq(std::size_t i) const {
        const double x = gx[i], y = gy[i];
        return x * x + y * y;
    }
    double magnitude(std::size_t i) const;
};

// gx = 0.5*(I(x+1,y) - I(x-1,y)), gy = 0.5*(I(x,y+1) - I(x,y-1)), with
// replicate padding at the borders. Requires a single-channel frame of at
// least 3x3; every pixel starts valid.
GradientField compute_gradients(const Frame& luma);

// Nearest-rank index (1-based) of the q-th percentile in a sorted list of n
// values: the smallest rank r with r >= q*n. A one-part-in-1e12 guard keeps
// exact multiples (e.g. q=0.85, n=100) from spilling to the next rank.
std::size_t nearest_rank(double q, std::size_t n);

// Drops zero-magnitude pixels (when configured), then invalidates pixels on
// the configured side of the nearest-rank percentile of the remaining valid
// magnitudes. Gradient values are untouched; only the mask changes.
GradientField percentile_filter(const GradientField& field, const GradientConfig& cfg);

// True iff both vectors have positive magnitude and the cosine of the angle
// between them strictly exceeds the threshold.
bool cosine_match(double ax, double ay, double bx, double by, double threshold);

} // namespace srm
