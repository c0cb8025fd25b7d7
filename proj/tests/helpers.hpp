#pragma once

#include "core/frame.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace testutil {

namespace fs = std::filesystem;

// Scratch directory removed on destruction. Each instance gets a unique path
// so tests can run concurrently.
class TempDir {
  public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        path_ = fs::temp_directory_path() /
                ("srm_test_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

  private:
    fs::path path_;
};

inline float clamp01(double v) {
    return static_cast<float>(std::clamp(v, 0.0, 1.0));
}

inline srm::Frame constant(int w, int h, int ch, float value) {
    return srm::Frame::filled(w, h, ch, value);
}

inline srm::Frame checkerboard(int w, int h, int cell, float lo = 0.1f, float hi = 0.9f) {
    srm::Frame f = srm::Frame::filled(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            f.at(x, y) = ((x / cell + y / cell) % 2 == 0) ? lo : hi;
    return f;
}

inline srm::Frame ramp(int w, int h, double step_x, double step_y) {
    srm::Frame f = srm::Frame::filled(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            f.at(x, y) = clamp01(step_x * x + step_y * y);
    return f;
}

inline srm::Frame stripes(int w, int h, double fx, double fy) {
    srm::Frame f = srm::Frame::filled(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            f.at(x, y) = clamp01(0.5 + 0.5 * std::sin(2.0 * M_PI * (fx * x + fy * y)));
    return f;
}

inline srm::Frame rings(int w, int h, double freq) {
    srm::Frame f = srm::Frame::filled(w, h, 1);
    const double cx = 0.5 * (w - 1), cy = 0.5 * (h - 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double r = std::hypot(x - cx, y - cy);
            f.at(x, y) = clamp01(0.5 + 0.5 * std::cos(2.0 * M_PI * freq * r));
        }
    return f;
}

inline srm::Frame disk(int w, int h, double cx, double cy, double radius,
                       float inside = 0.9f, float outside = 0.1f) {
    srm::Frame f = srm::Frame::filled(w, h, 1, outside);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (std::hypot(x - cx, y - cy) <= radius) f.at(x, y) = inside;
    return f;
}

inline srm::Frame random_noise(int w, int h, int ch, std::uint64_t seed) {
    srm::Frame f = srm::Frame::filled(w, h, ch);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (auto& v : f.data) v = static_cast<float>(dist(rng));
    return f;
}

inline srm::Frame random_dots(int w, int h, int count, std::uint64_t seed) {
    srm::Frame f = srm::Frame::filled(w, h, 1, 0.05f);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dx(0, w - 1), dy(0, h - 1);
    for (int i = 0; i < count; ++i) f.at(dx(rng), dy(rng)) = 0.95f;
    return f;
}

// Multi-octave smoothed lattice noise; its spectrum falls off with frequency
// the way photographic content does, so it stands in for natural frames.
inline srm::Frame value_noise(int w, int h, std::uint64_t seed, int octaves = 4) {
    srm::Frame f = srm::Frame::filled(w, h, 1);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    double amplitude = 1.0, total = 0.0;
    int cell = std::max(8, std::min(w, h) / 4);
    std::vector<double> accum(f.pixel_count(), 0.0);
    for (int oct = 0; oct < octaves; ++oct) {
        const int gw = w / cell + 2, gh = h / cell + 2;
        std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
        for (auto& v : lattice) v = dist(rng);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double u = static_cast<double>(x) / cell;
                const double v = static_cast<double>(y) / cell;
                const int x0 = static_cast<int>(u), y0 = static_cast<int>(v);
                double tx = u - x0, ty = v - y0;
                tx = tx * tx * (3 - 2 * tx); // smoothstep
                ty = ty * ty * (3 - 2 * ty);
                const auto l = [&](int gx, int gy) {
                    return lattice[static_cast<std::size_t>(gy) * gw + gx];
                };
                const double top = l(x0, y0) * (1 - tx) + l(x0 + 1, y0) * tx;
                const double bot = l(x0, y0 + 1) * (1 - tx) + l(x0 + 1, y0 + 1) * tx;
                accum[static_cast<std::size_t>(y) * w + x] += amplitude * (top * (1 - ty) + bot * ty);
            }
        total += amplitude;
        amplitude *= 0.5;
        cell = std::max(2, cell / 2);
    }
    for (std::size_t i = 0; i < accum.size(); ++i)
        f.data[i] = clamp01(accum[i] / total);
    return f;
}

inline srm::Frame rgb_noise(int w, int h, std::uint64_t seed) {
    return random_noise(w, h, 3, seed);
}

// Embeds the frame in a constant border so translated copies stay exact
// inside the sampled area.
inline srm::Frame pad_border(const srm::Frame& inner, int margin, float value) {
    srm::Frame f =
        srm::Frame::filled(inner.width + 2 * margin, inner.height + 2 * margin,
                           inner.channels, value);
    for (int y = 0; y < inner.height; ++y)
        for (int x = 0; x < inner.width; ++x)
            for (int c = 0; c < inner.channels; ++c)
                f.at(x + margin, y + margin, c) = inner.at(x, y, c);
    return f;
}

// Quantizes every sample onto the 8-bit grid, matching a PNG round trip.
inline srm::Frame quantized(srm::Frame f) {
    for (auto& v : f.data)
        v = static_cast<float>(std::lround(v * 255.0f) / 255.0);
    return f;
}

} // namespace testutil
