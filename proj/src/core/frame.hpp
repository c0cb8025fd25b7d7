#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace srm {

// Row-major raster of normalized intensities in [0, 1]. Samples are
// interleaved; channels is 1 (grayscale) or 3 (RGB).
struct Frame {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> data;

    static Frame filled(int width, int height, int channels, float value = 0.0f);

    float& at(int x, int y, int c = 0) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    float at(int x, int y, int c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    std::size_t sample_count() const { return pixel_count() * channels; }

    bool same_shape(const Frame& other) const {
        return width == other.width && height == other.height && channels == other.channels;
    }

    // Throws Error(InvalidArgument) when a structural invariant is violated.
    void validate() const;
};

struct FrameSequence {
    std::string name;
    std::vector<Frame> frames;
};

// Rec.601 triple by default; callers may substitute any non-negative
// weights summing to 1.
struct LumaWeights {
    double red = 0.299;
    double green = 0.587;
    double blue = 0.114;

    void validate() const;
};

// Reads an 8- or 16-bit PNG. Intensities are scaled by the format's maximum
// code value (255 or 65535); palette images are expanded to RGB and alpha
// channels are dropped.
Frame load_frame(const std::filesystem::path& path);

// Writes an 8-bit PNG, quantizing each intensity as round(i * 255).
void save_frame(const Frame& frame, const std::filesystem::path& path);

Frame to_luma(const Frame& frame, const LumaWeights& weights = {});

// PNG files in a directory, sorted by filename. Throws when none exist.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

// Loads every PNG in the directory in lexicographic filename order and
// enforces identical dimensions across frames.
FrameSequence load_sequence(const std::filesystem::path& dir);

// Samples the frame at (x + dx, y + dy) with replicate clamping, so content
// translated by d is recovered by shift search at exactly d.
Frame translate_frame(const Frame& frame, int dx, int dy);

} // namespace srm
