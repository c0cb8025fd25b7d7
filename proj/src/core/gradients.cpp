#include "core/gradients.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>

namespace srm {

void GradientConfig::validate() const {
    if (!(percentile_q > 0.0 && percentile_q <= 1.0))
        fail(ErrorCode::InvalidArgument, "percentile_q must be in (0,1]");
    if (!(cosine_threshold > -1.0 && cosine_threshold <= 1.0))
        fail(ErrorCode::InvalidArgument, "cosine_threshold must be in (-1,1]");
}

std::size_t GradientField::valid_count() const {
    std::size_t n = 0;
    for (std::uint8_t v : valid) n += v != 0;
    return n;
}

double GradientField::magnitude(std::size_t i) const { return std::sqrt(magnitude_sq(i)); }

GradientField compute_gradients(const Frame& luma) {
    if (luma.channels != 1)
        fail(ErrorCode::InvalidArgument, "gradients require a single-channel frame");
    if (luma.width < 3 || luma.height < 3)
        fail(ErrorCode::InvalidArgument, "frame too small for gradients (minimum 3x3)");

    const int w = luma.width, h = luma.height;
    GradientField field;
    field.width = w;
    field.height = h;
    field.gx.resize(field.size());
    field.gy.resize(field.size());
    field.valid.assign(field.size(), 1);

    const float* src = luma.data.data();
    for (int y = 0; y < h; ++y) {
        const int ym = y > 0 ? y - 1 : 0;
        const int yp = y < h - 1 ? y + 1 : h - 1;
        const float* row = src + static_cast<std::size_t>(y) * w;
        const float* row_m = src + static_cast<std::size_t>(ym) * w;
        const float* row_p = src + static_cast<std::size_t>(yp) * w;
        float* gx = field.gx.data() + static_cast<std::size_t>(y) * w;
        float* gy = field.gy.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            const int xm = x > 0 ? x - 1 : 0;
            const int xp = x < w - 1 ? x + 1 : w - 1;
            gx[x] = 0.5f * (row[xp] - row[xm]);
            gy[x] = 0.5f * (row_p[x] - row_m[x]);
        }
    }
    return field;
}

std::size_t nearest_rank(double q, std::size_t n) {
    const double t = q * static_cast<double>(n);
    const double guard = std::max(1e-9, t * 1e-12);
    auto rank = static_cast<std::size_t>(std::ceil(t - guard));
    return std::clamp<std::size_t>(rank, 1, n);
}

GradientField percentile_filter(const GradientField& field, const GradientConfig& cfg) {
    cfg.validate();

    GradientField out = field;
    if (field.valid_count() == 0)
        fail(ErrorCode::DegenerateInput, "percentile_filter: no valid pixels");

    if (cfg.drop_zero_magnitude) {
        for (std::size_t i = 0; i < out.size(); ++i)
            if (out.valid[i] && out.magnitude_sq(i) == 0.0) out.valid[i] = 0;
    }

    // Ordering by squared magnitude is equivalent to ordering by magnitude
    // and avoids the sqrt.
    std::vector<double> mags;
    mags.reserve(out.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out.valid[i]) mags.push_back(out.magnitude_sq(i));
    if (mags.empty()) return out; // everything was zero; downstream handles the empty field

    const std::size_t rank = nearest_rank(cfg.percentile_q, mags.size());
    std::nth_element(mags.begin(), mags.begin() + (rank - 1), mags.end());
    const double threshold_sq = mags[rank - 1];

    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!out.valid[i]) continue;
        const double m = out.magnitude_sq(i);
        const bool drop = cfg.filter_direction == FilterDirection::DropAbove
                              ? m > threshold_sq
                              : m < threshold_sq;
        if (drop) out.valid[i] = 0;
    }
    return out;
}

bool cosine_match(double ax, double ay, double bx, double by, double threshold) {
    const double msq_a = ax * ax + ay * ay;
    const double msq_b = bx * bx + by * by;
    if (msq_a == 0.0 || msq_b == 0.0) return false;
    const double dot = ax * bx + ay * by;
    // cosine > t without the sqrt: compare squares on the side where the
    // inequality direction survives squaring.
    if (threshold >= 0.0)
        return dot > 0.0 && dot * dot > threshold * threshold * msq_a * msq_b;
    if (dot >= 0.0) return true;
    return dot * dot < threshold * threshold * msq_a * msq_b;
}

} // namespace srm
