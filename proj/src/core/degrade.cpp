#include "core/degrade.hpp"

#include "core/error.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace srm {

namespace {

double cubic_weight(double t) {
    constexpr double a = -0.5;
    const double x = std::abs(t);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
    return 0.0;
}

struct TapSet {
    std::vector<std::array<int, 4>> idx;
    std::vector<std::array<double, 4>> weight;
};

TapSet cubic_taps(int in_size, int out_size) {
    TapSet taps;
    taps.idx.resize(out_size);
    taps.weight.resize(out_size);
    const double ratio = static_cast<double>(in_size) / out_size;
    for (int i = 0; i < out_size; ++i) {
        const double src = (i + 0.5) * ratio - 0.5;
        const double base = std::floor(src);
        const double frac = src - base;
        const int b = static_cast<int>(base);
        for (int k = 0; k < 4; ++k) {
            taps.idx[i][k] = std::clamp(b - 1 + k, 0, in_size - 1);
            taps.weight[i][k] = cubic_weight(frac + 1.0 - k);
        }
    }
    return taps;
}

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = sigma > 0.0 ? static_cast<int>(std::ceil(4.0 * sigma)) : 0;
    std::vector<double> kernel(2 * radius + 1, 1.0);
    if (radius > 0) {
        double sum = 0.0;
        for (int k = -radius; k <= radius; ++k) {
            kernel[k + radius] = std::exp(-(static_cast<double>(k) * k) / (2.0 * sigma * sigma));
            sum += kernel[k + radius];
        }
        for (double& w : kernel) w /= sum;
    }
    return kernel;
}

} // namespace

void NoiseParams::validate() const {
    if (sigma_s < 0.0) fail(ErrorCode::InvalidArgument, "sigma_s must be >= 0");
    if (sigma_c < 0.0) fail(ErrorCode::InvalidArgument, "sigma_c must be >= 0");
}

void DegradeConfig::validate() const {
    if (scale < 2) fail(ErrorCode::InvalidArgument, "scale must be >= 2");
    if (!(bd_sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "bd_sigma must be >= 0");
    if (bd_offset < 0 || bd_offset >= scale)
        fail(ErrorCode::InvalidArgument, "bd_offset must be in [0, scale)");
}

Frame bicubic_resize(const Frame& frame, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) fail(ErrorCode::InvalidArgument, "output dimensions must be >= 1");
    const int in_w = frame.width, in_h = frame.height, ch = frame.channels;
    const TapSet tx = cubic_taps(in_w, out_w);
    const TapSet ty = cubic_taps(in_h, out_h);

    // Horizontal pass into a double buffer, then vertical.
    std::vector<double> mid(static_cast<std::size_t>(out_w) * in_h * ch);
    for (int y = 0; y < in_h; ++y) {
        const float* row = frame.data.data() + static_cast<std::size_t>(y) * in_w * ch;
        double* out_row = mid.data() + static_cast<std::size_t>(y) * out_w * ch;
        for (int x = 0; x < out_w; ++x) {
            const auto& idx = tx.idx[x];
            const auto& w = tx.weight[x];
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k)
                    acc += w[k] * row[static_cast<std::size_t>(idx[k]) * ch + c];
                out_row[static_cast<std::size_t>(x) * ch + c] = acc;
            }
        }
    }

    Frame out = Frame::filled(out_w, out_h, ch);
    for (int y = 0; y < out_h; ++y) {
        const auto& idx = ty.idx[y];
        const auto& w = ty.weight[y];
        float* out_row = out.data.data() + static_cast<std::size_t>(y) * out_w * ch;
        for (int x = 0; x < out_w; ++x) {
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k)
                    acc += w[k] * mid[(static_cast<std::size_t>(idx[k]) * out_w + x) * ch + c];
                out_row[static_cast<std::size_t>(x) * ch + c] =
                    static_cast<float>(std::clamp(acc, 0.0, 1.0));
            }
        }
    }
    return out;
}

Frame gaussian_blur(const Frame& frame, double sigma) {
    if (!(sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "sigma must be >= 0");
    const std::vector<double> kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);
    if (radius == 0) return frame;

    const int w = frame.width, h = frame.height, ch = frame.channels;
    std::vector<double> mid(frame.data.size());
    for (int y = 0; y < h; ++y) {
        const float* row = frame.data.data() + static_cast<std::size_t>(y) * w * ch;
        double* out_row = mid.data() + static_cast<std::size_t>(y) * w * ch;
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    const int xi = std::clamp(x + k, 0, w - 1);
                    acc += kernel[k + radius] * row[static_cast<std::size_t>(xi) * ch + c];
                }
                out_row[static_cast<std::size_t>(x) * ch + c] = acc;
            }
    }

    Frame out = Frame::filled(w, h, ch);
    for (int y = 0; y < h; ++y) {
        float* out_row = out.data.data() + static_cast<std::size_t>(y) * w * ch;
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    const int yi = std::clamp(y + k, 0, h - 1);
                    acc += kernel[k + radius] *
                           mid[(static_cast<std::size_t>(yi) * w + x) * ch + c];
                }
                out_row[static_cast<std::size_t>(x) * ch + c] =
                    static_cast<float>(std::clamp(acc, 0.0, 1.0));
            }
    }
    return out;
}

Frame bd_downsample(const Frame& frame, const DegradeConfig& cfg) {
    cfg.validate();
    if (frame.width < cfg.scale || frame.height < cfg.scale)
        fail(ErrorCode::InvalidArgument, "frame smaller than the downsampling scale");

    const Frame blurred = gaussian_blur(frame, cfg.bd_sigma);
    const int out_w = (frame.width - cfg.bd_offset + cfg.scale - 1) / cfg.scale;
    const int out_h = (frame.height - cfg.bd_offset + cfg.scale - 1) / cfg.scale;

    Frame out = Frame::filled(out_w, out_h, frame.channels);
    for (int y = 0; y < out_h; ++y) {
        const int sy = cfg.bd_offset + y * cfg.scale;
        for (int x = 0; x < out_w; ++x) {
            const int sx = cfg.bd_offset + x * cfg.scale;
            for (int c = 0; c < frame.channels; ++c)
                out.at(x, y, c) = blurred.at(sx, sy, c);
        }
    }
    return out;
}

Frame add_noise(const Frame& frame, const NoiseParams& params) {
    params.validate();
    Frame out = frame;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const double level = out.data[i];
        const double variance = params.sigma_s * level + params.sigma_c * params.sigma_c;
        if (variance <= 0.0) continue;
        const double noise = std::sqrt(variance) * gaussian_sample(params.seed, i);
        out.data[i] = static_cast<float>(std::clamp(level + noise, 0.0, 1.0));
    }
    return out;
}

FramePair prepare_pair(const Frame& source) {
    if (source.width < 1920 || source.height < 1080)
        fail(ErrorCode::InvalidArgument, "source must be at least 1920x1080");
    FramePair pair;
    pair.hr = bicubic_resize(source, 1920, 1080);
    pair.lr = bicubic_resize(pair.hr, 480, 270);
    return pair;
}

} // namespace srm
