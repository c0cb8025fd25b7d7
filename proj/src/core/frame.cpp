#include "core/frame.hpp"

#include "core/error.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace srm {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_handler(png_structp png, png_const_charp msg) {
    (void)png;
    throw Error(ErrorCode::Io, std::string("libpng: ") + msg);
}

void png_warning_handler(png_structp, png_const_charp) {}

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;

    PngReader() {
        png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                     png_warning_handler);
        if (!png) fail(ErrorCode::Internal, "png_create_read_struct failed");
        info = png_create_info_struct(png);
        if (!info) {
            png_destroy_read_struct(&png, nullptr, nullptr);
            fail(ErrorCode::Internal, "png_create_info_struct failed");
        }
    }
    ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;

    PngWriter() {
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                      png_warning_handler);
        if (!png) fail(ErrorCode::Internal, "png_create_write_struct failed");
        info = png_create_info_struct(png);
        if (!info) {
            png_destroy_write_struct(&png, nullptr);
            fail(ErrorCode::Internal, "png_create_info_struct failed");
        }
    }
    ~PngWriter() { png_destroy_write_struct(&png, &info); }
};

} // namespace

Frame Frame::filled(int width, int height, int channels, float value) {
    Frame f;
    f.width = width;
    f.height = height;
    f.channels = channels;
    f.data.assign(static_cast<std::size_t>(width) * height * channels, value);
    f.validate();
    return f;
}

void Frame::validate() const {
    if (width <= 0 || height <= 0)
        fail(ErrorCode::InvalidArgument, "frame dimensions must be positive");
    if (channels != 1 && channels != 3)
        fail(ErrorCode::InvalidArgument, "frame must have 1 or 3 channels");
    if (data.size() != sample_count())
        fail(ErrorCode::InvalidArgument, "frame data length does not match width*height*channels");
    for (float v : data) {
        if (!(v >= 0.0f && v <= 1.0f))
            fail(ErrorCode::InvalidArgument, "frame intensity outside [0,1]");
    }
}

void LumaWeights::validate() const {
    if (!(red >= 0.0 && green >= 0.0 && blue >= 0.0))
        fail(ErrorCode::InvalidArgument, "luma weights must be non-negative");
    if (std::abs(red + green + blue - 1.0) > 1e-6)
        fail(ErrorCode::InvalidArgument, "luma weights must sum to 1");
}

Frame load_frame(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) fail(ErrorCode::Io, "cannot open file: " + path.string());

    PngReader r;
    png_init_io(r.png, fp.get());
    png_read_info(r.png, r.info);

    png_uint_32 w = 0, h = 0;
    int bit_depth = 0, color_type = 0;
    png_get_IHDR(r.png, r.info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);
    if (w == 0 || h == 0) fail(ErrorCode::Io, "zero-sized image: " + path.string());

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(r.png);
    if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
    png_set_strip_alpha(r.png);

    png_read_update_info(r.png, r.info);
    png_get_IHDR(r.png, r.info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);

    if (bit_depth != 8 && bit_depth != 16)
        fail(ErrorCode::Unsupported,
             "unsupported bit depth " + std::to_string(bit_depth) + ": " + path.string());

    int channels = 0;
    switch (color_type) {
        case PNG_COLOR_TYPE_GRAY: channels = 1; break;
        case PNG_COLOR_TYPE_RGB: channels = 3; break;
        default:
            fail(ErrorCode::Unsupported, "unsupported PNG color type: " + path.string());
    }

    const std::size_t row_bytes = png_get_rowbytes(r.png, r.info);
    std::vector<std::uint8_t> raw(row_bytes * h);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = raw.data() + y * row_bytes;
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);

    Frame frame;
    frame.width = static_cast<int>(w);
    frame.height = static_cast<int>(h);
    frame.channels = channels;
    frame.data.resize(frame.sample_count());

    const std::size_t n = frame.sample_count();
    if (bit_depth == 8) {
        for (std::size_t i = 0; i < n; ++i)
            frame.data[i] = static_cast<float>(raw[i] / 255.0);
    } else {
        // PNG stores 16-bit samples big-endian.
        for (std::size_t i = 0; i < n; ++i) {
            const unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
            frame.data[i] = static_cast<float>(v / 65535.0);
        }
    }
    return frame;
}

void save_frame(const Frame& frame, const std::filesystem::path& path) {
    frame.validate();

    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) fail(ErrorCode::Io, "cannot open file for writing: " + path.string());

    PngWriter w;
    png_init_io(w.png, fp.get());
    const int color_type = frame.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(frame.width),
                 static_cast<png_uint_32>(frame.height), 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);

    const std::size_t row_samples = static_cast<std::size_t>(frame.width) * frame.channels;
    std::vector<std::uint8_t> row(row_samples);
    for (int y = 0; y < frame.height; ++y) {
        const float* src = frame.data.data() + static_cast<std::size_t>(y) * row_samples;
        for (std::size_t i = 0; i < row_samples; ++i)
            row[i] = static_cast<std::uint8_t>(std::lround(static_cast<double>(src[i]) * 255.0));
        png_write_row(w.png, row.data());
    }
    png_write_end(w.png, nullptr);
    if (std::fflush(fp.get()) != 0)
        fail(ErrorCode::Io, "write failed: " + path.string());
}

Frame to_luma(const Frame& frame, const LumaWeights& weights) {
    weights.validate();
    if (frame.channels == 1) return frame;
    if (frame.channels != 3)
        fail(ErrorCode::Unsupported, "to_luma expects 1 or 3 channels");

    Frame out;
    out.width = frame.width;
    out.height = frame.height;
    out.channels = 1;
    out.data.resize(frame.pixel_count());
    const std::size_t n = frame.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const double y = weights.red * frame.data[3 * i] + weights.green * frame.data[3 * i + 1] +
                         weights.blue * frame.data[3 * i + 2];
        out.data[i] = static_cast<float>(std::clamp(y, 0.0, 1.0));
    }
    return out;
}

std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
        fail(ErrorCode::Io, "not a directory: " + dir.string());

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext == ".png") files.push_back(entry.path());
    }
    if (files.empty())
        fail(ErrorCode::InvalidArgument, "no frames found in directory: " + dir.string());
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
    return files;
}

FrameSequence load_sequence(const std::filesystem::path& dir) {
    FrameSequence seq;
    seq.name = dir.filename().string();
    for (const auto& file : list_frame_files(dir)) {
        Frame frame = load_frame(file);
        if (!seq.frames.empty() && !frame.same_shape(seq.frames.front()))
            fail(ErrorCode::DimensionMismatch,
                 "frame dimensions differ within sequence: " + file.string());
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

Frame translate_frame(const Frame& frame, int dx, int dy) {
    Frame out;
    out.width = frame.width;
    out.height = frame.height;
    out.channels = frame.channels;
    out.data.resize(frame.sample_count());
    for (int y = 0; y < frame.height; ++y) {
        const int sy = std::clamp(y + dy, 0, frame.height - 1);
        for (int x = 0; x < frame.width; ++x) {
            const int sx = std::clamp(x + dx, 0, frame.width - 1);
            for (int c = 0; c < frame.channels; ++c) out.at(x, y, c) = frame.at(sx, sy, c);
        }
    }
    return out;
}

} // namespace srm
