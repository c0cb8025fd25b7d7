#pragma once

#include "core/frame.hpp"

#include <cstdint>

namespace srm {

// Signal-dependent Gaussian sensor noise: variance sigma_s * L + sigma_c^2
// at clean intensity L, applied in the normalized [0,1] domain.
struct NoiseParams {
    double sigma_s = 0.001;
    double sigma_c = 0.035;
    std::uint64_t seed = 0;

    void validate() const;
};

struct DegradeConfig {
    int scale = 4;
    double bd_sigma = 1.6;
    int bd_offset = 0;

    void validate() const;
};

// Separable bicubic resampling, kernel parameter a = -0.5, pixel-center
// alignment (source coordinate (i + 0.5) * in/out - 0.5), replicate
// boundary, double intermediates, output clamped to [0,1]. Resizing to the
// input dimensions reproduces the input exactly.
Frame bicubic_resize(const Frame& frame, int out_w, int out_h);

// Separable Gaussian blur truncated at radius ceil(4*sigma), kernel
// renormalized, replicate boundary. sigma = 0 degenerates to the identity.
Frame gaussian_blur(const Frame& frame, double sigma);

// Gaussian blur with bd_sigma, then keep pixels at bd_offset + k*scale on
// both axes. Output dimension = ceil((dim - bd_offset) / scale), the count
// of in-range sample positions.
Frame bd_downsample(const Frame& frame, const DegradeConfig& cfg);

// Per-sample n ~ Normal(0, sigma_s * L + sigma_c^2), output clamp(L + n, 0, 1).
// The stream is a pure function of (seed, sample index): identical seeds give
// bit-identical frames on any platform.
Frame add_noise(const Frame& frame, const NoiseParams& params);

struct FramePair {
    Frame hr;
    Frame lr;
};

// hr = source resized to 1920x1080, lr = hr further resized to 480x270.
FramePair prepare_pair(const Frame& source);

} // namespace srm
