#include "srmetrics/srmetrics.h"

#include "core/degrade.hpp"
#include "core/erqa.hpp"
#include "core/error.hpp"
#include "core/frame.hpp"
#include "core/gradients.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"

#include <charconv>
#include <cstring>
#include <limits>
#include <memory>
#include <string>
#include <system_error>
#include <vector>

struct srm_frame {
    srm::Frame frame;
};

struct srm_config {
    srm::ErqaConfig erqa;
    srm::DegradeConfig degrade;
    srm::NoiseParams noise;
};

struct srm_erqa_result {
    srm::ErqaScore score;
};

struct srm_bt_result {
    srm::BtResult result;
};

struct srm_kmedoids_result {
    srm::KMedoidsResult result;
};

namespace {

thread_local std::string g_last_error;

srm_status map_code(srm::ErrorCode code) {
    switch (code) {
        case srm::ErrorCode::InvalidArgument: return SRM_ERR_INVALID_ARGUMENT;
        case srm::ErrorCode::Io: return SRM_ERR_IO;
        case srm::ErrorCode::DimensionMismatch: return SRM_ERR_DIMENSION_MISMATCH;
        case srm::ErrorCode::Unsupported: return SRM_ERR_UNSUPPORTED;
        case srm::ErrorCode::DegenerateInput: return SRM_ERR_DEGENERATE_INPUT;
        case srm::ErrorCode::Internal: return SRM_ERR_INTERNAL;
    }
    return SRM_ERR_INTERNAL;
}

template <typename Fn>
srm_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        g_last_error.clear();
        return SRM_OK;
    } catch (const srm::Error& e) {
        g_last_error = e.what();
        return map_code(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return SRM_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SRM_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return SRM_ERR_INTERNAL;
    }
}

void require(bool ok, const char* message) {
    if (!ok) srm::fail(srm::ErrorCode::InvalidArgument, message);
}

/* ---- config key table -------------------------------------------------- */

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    double v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        srm::fail(srm::ErrorCode::InvalidArgument, "not a number: '" + text + "'");
    return v;
}

long long parse_int(const std::string& text) {
    long long v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        srm::fail(srm::ErrorCode::InvalidArgument, "not an integer: '" + text + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& text) {
    std::uint64_t v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        srm::fail(srm::ErrorCode::InvalidArgument, "not an unsigned integer: '" + text + "'");
    return v;
}

bool parse_bool(const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    srm::fail(srm::ErrorCode::InvalidArgument, "not a boolean: '" + text + "'");
}

struct ConfigKey {
    const char* name;
    void (*set)(srm_config&, const std::string&);
    std::string (*get)(const srm_config&);
};

const ConfigKey kConfigKeys[] = {
    {"erqa.shift_radius",
     [](srm_config& c, const std::string& v) { c.erqa.shift_radius = static_cast<int>(parse_int(v)); },
     [](const srm_config& c) { return std::to_string(c.erqa.shift_radius); }},
    {"erqa.refine_iterations",
     [](srm_config& c, const std::string& v) { c.erqa.refine_iterations = static_cast<int>(parse_int(v)); },
     [](const srm_config& c) { return std::to_string(c.erqa.refine_iterations); }},
    {"erqa.beta",
     [](srm_config& c, const std::string& v) { c.erqa.beta = parse_double(v); },
     [](const srm_config& c) { return format_double(c.erqa.beta); }},
    {"erqa.shift_set",
     [](srm_config& c, const std::string& v) {
         if (v == "disk") c.erqa.shift_set = srm::ShiftSet::Disk;
         else if (v == "square") c.erqa.shift_set = srm::ShiftSet::Square;
         else srm::fail(srm::ErrorCode::InvalidArgument, "shift_set must be disk or square");
     },
     [](const srm_config& c) {
         return std::string(c.erqa.shift_set == srm::ShiftSet::Disk ? "disk" : "square");
     }},
    {"erqa.rerank_each_iteration",
     [](srm_config& c, const std::string& v) { c.erqa.rerank_each_iteration = parse_bool(v); },
     [](const srm_config& c) { return std::string(c.erqa.rerank_each_iteration ? "true" : "false"); }},
    {"gradient.percentile_q",
     [](srm_config& c, const std::string& v) { c.erqa.gradient.percentile_q = parse_double(v); },
     [](const srm_config& c) { return format_double(c.erqa.gradient.percentile_q); }},
    {"gradient.filter_direction",
     [](srm_config& c, const std::string& v) {
         if (v == "drop-above") c.erqa.gradient.filter_direction = srm::FilterDirection::DropAbove;
         else if (v == "drop-below") c.erqa.gradient.filter_direction = srm::FilterDirection::DropBelow;
         else srm::fail(srm::ErrorCode::InvalidArgument,
                        "filter_direction must be drop-above or drop-below");
     },
     [](const srm_config& c) {
         return std::string(c.erqa.gradient.filter_direction == srm::FilterDirection::DropAbove
                                ? "drop-above"
                                : "drop-below");
     }},
    {"gradient.drop_zero_magnitude",
     [](srm_config& c, const std::string& v) { c.erqa.gradient.drop_zero_magnitude = parse_bool(v); },
     [](const srm_config& c) {
         return std::string(c.erqa.gradient.drop_zero_magnitude ? "true" : "false");
     }},
    {"gradient.cosine_threshold",
     [](srm_config& c, const std::string& v) { c.erqa.gradient.cosine_threshold = parse_double(v); },
     [](const srm_config& c) { return format_double(c.erqa.gradient.cosine_threshold); }},
    {"luma.red",
     [](srm_config& c, const std::string& v) { c.erqa.luma.red = parse_double(v); },
     [](const srm_config& c) { return format_double(c.erqa.luma.red); }},
    {"luma.green",
     [](srm_config& c, const std::string& v) { c.erqa.luma.green = parse_double(v); },
     [](const srm_config& c) { return format_double(c.erqa.luma.green); }},
    {"luma.blue",
     [](srm_config& c, const std::string& v) { c.erqa.luma.blue = parse_double(v); },
     [](const srm_config& c) { return format_double(c.erqa.luma.blue); }},
    {"degrade.scale",
     [](srm_config& c, const std::string& v) { c.degrade.scale = static_cast<int>(parse_int(v)); },
     [](const srm_config& c) { return std::to_string(c.degrade.scale); }},
    {"degrade.bd_sigma",
     [](srm_config& c, const std::string& v) { c.degrade.bd_sigma = parse_double(v); },
     [](const srm_config& c) { return format_double(c.degrade.bd_sigma); }},
    {"degrade.bd_offset",
     [](srm_config& c, const std::string& v) { c.degrade.bd_offset = static_cast<int>(parse_int(v)); },
     [](const srm_config& c) { return std::to_string(c.degrade.bd_offset); }},
    {"noise.sigma_s",
     [](srm_config& c, const std::string& v) { c.noise.sigma_s = parse_double(v); },
     [](const srm_config& c) { return format_double(c.noise.sigma_s); }},
    {"noise.sigma_c",
     [](srm_config& c, const std::string& v) { c.noise.sigma_c = parse_double(v); },
     [](const srm_config& c) { return format_double(c.noise.sigma_c); }},
    {"noise.seed",
     [](srm_config& c, const std::string& v) { c.noise.seed = parse_u64(v); },
     [](const srm_config& c) { return std::to_string(c.noise.seed); }},
};

constexpr size_t kConfigKeyCount = sizeof(kConfigKeys) / sizeof(kConfigKeys[0]);

const ConfigKey* find_key(const char* name) {
    for (const auto& key : kConfigKeys)
        if (std::strcmp(key.name, name) == 0) return &key;
    return nullptr;
}

} // namespace

/* ---- version / errors --------------------------------------------------- */

const char* srm_version(void) {
#ifdef SRM_VERSION_STRING
    return SRM_VERSION_STRING;
#else
    return "0.0.0";
#endif
}

const char* srm_status_name(srm_status status) {
    switch (status) {
        case SRM_OK: return "ok";
        case SRM_ERR_INVALID_ARGUMENT: return "invalid argument";
        case SRM_ERR_IO: return "io error";
        case SRM_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
        case SRM_ERR_UNSUPPORTED: return "unsupported";
        case SRM_ERR_DEGENERATE_INPUT: return "degenerate input";
        case SRM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* srm_last_error(void) { return g_last_error.c_str(); }

/* ---- frames -------------------------------------------------------------- */

srm_status srm_frame_create(int width, int height, int channels, const float* data,
                            srm_frame** out) {
    return guarded([&] {
        require(out != nullptr, "out is null");
        auto frame = std::make_unique<srm_frame>();
        frame->frame = srm::Frame::filled(width, height, channels);
        if (data)
            std::copy(data, data + frame->frame.data.size(), frame->frame.data.begin());
        frame->frame.validate();
        *out = frame.release();
    });
}

srm_status srm_frame_load(const char* path, srm_frame** out) {
    return guarded([&] {
        require(path != nullptr, "path is null");
        require(out != nullptr, "out is null");
        auto frame = std::make_unique<srm_frame>();
        frame->frame = srm::load_frame(path);
        *out = frame.release();
    });
}

srm_status srm_frame_save(const srm_frame* frame, const char* path) {
    return guarded([&] {
        require(frame != nullptr, "frame is null");
        require(path != nullptr, "path is null");
        srm::save_frame(frame->frame, path);
    });
}

void srm_frame_destroy(srm_frame* frame) { delete frame; }

int srm_frame_width(const srm_frame* frame) { return frame ? frame->frame.width : 0; }
int srm_frame_height(const srm_frame* frame) { return frame ? frame->frame.height : 0; }
int srm_frame_channels(const srm_frame* frame) { return frame ? frame->frame.channels : 0; }
const float* srm_frame_data(const srm_frame* frame) {
    return frame ? frame->frame.data.data() : nullptr;
}

srm_status srm_frame_translate(const srm_frame* frame, int dx, int dy, srm_frame** out) {
    return guarded([&] {
        require(frame != nullptr, "frame is null");
        require(out != nullptr, "out is null");
        auto result = std::make_unique<srm_frame>();
        result->frame = srm::translate_frame(frame->frame, dx, dy);
        *out = result.release();
    });
}

/* ---- configuration -------------------------------------------------------- */

srm_status srm_config_create(srm_config** out) {
    return guarded([&] {
        require(out != nullptr, "out is null");
        *out = new srm_config();
    });
}

void srm_config_destroy(srm_config* config) { delete config; }

srm_status srm_config_set(srm_config* config, const char* key, const char* value) {
    return guarded([&] {
        require(config != nullptr, "config is null");
        require(key != nullptr, "key is null");
        require(value != nullptr, "value is null");
        const ConfigKey* entry = find_key(key);
        if (!entry)
            srm::fail(srm::ErrorCode::InvalidArgument,
                      std::string("unknown config key '") + key + "'");
        entry->set(*config, value);
    });
}

srm_status srm_config_get(const srm_config* config, const char* key, char* buffer,
                          size_t buffer_size) {
    return guarded([&] {
        require(config != nullptr, "config is null");
        require(key != nullptr, "key is null");
        require(buffer != nullptr, "buffer is null");
        const ConfigKey* entry = find_key(key);
        if (!entry)
            srm::fail(srm::ErrorCode::InvalidArgument,
                      std::string("unknown config key '") + key + "'");
        const std::string value = entry->get(*config);
        if (value.size() + 1 > buffer_size)
            srm::fail(srm::ErrorCode::InvalidArgument, "buffer too small");
        std::memcpy(buffer, value.c_str(), value.size() + 1);
    });
}

size_t srm_config_count(const srm_config* config) {
    (void)config;
    return kConfigKeyCount;
}

const char* srm_config_key(const srm_config* config, size_t index) {
    (void)config;
    return index < kConfigKeyCount ? kConfigKeys[index].name : nullptr;
}

/* ---- detail-restoration score ---------------------------------------------- */

srm_status srm_erqa_compare(const srm_frame* reference, const srm_frame* distorted,
                            const srm_config* config, srm_erqa_result** out) {
    return guarded([&] {
        require(reference != nullptr, "reference is null");
        require(distorted != nullptr, "distorted is null");
        require(out != nullptr, "out is null");
        const srm::ErqaConfig cfg = config ? config->erqa : srm::ErqaConfig{};
        auto result = std::make_unique<srm_erqa_result>();
        result->score = srm::erqa_score(reference->frame, distorted->frame, cfg);
        *out = result.release();
    });
}

void srm_erqa_result_destroy(srm_erqa_result* result) { delete result; }

double srm_erqa_value(const srm_erqa_result* result) { return result ? result->score.value : 0.0; }

void srm_erqa_counts(const srm_erqa_result* result, uint64_t* tp, uint64_t* fp, uint64_t* fn) {
    if (!result) return;
    if (tp) *tp = result->score.masks.tp_count;
    if (fp) *fp = result->score.masks.fp_count;
    if (fn) *fn = result->score.masks.fn_count;
}

size_t srm_erqa_trace_length(const srm_erqa_result* result) {
    return result ? result->score.trace.size() : 0;
}

srm_status srm_erqa_trace_entry(const srm_erqa_result* result, size_t index, int* dx, int* dy,
                                uint64_t* similarity, uint64_t* matches_added) {
    return guarded([&] {
        require(result != nullptr, "result is null");
        if (index >= result->score.trace.size())
            srm::fail(srm::ErrorCode::InvalidArgument, "trace index out of range");
        const srm::TraceEntry& entry = result->score.trace[index];
        if (dx) *dx = entry.candidate.shift.dx;
        if (dy) *dy = entry.candidate.shift.dy;
        if (similarity) *similarity = entry.candidate.similarity;
        if (matches_added) *matches_added = entry.matches_added;
    });
}

srm_status srm_erqa_heatmap(const srm_erqa_result* result, const srm_frame* background,
                            srm_overlay overlay, srm_frame** out) {
    return guarded([&] {
        require(result != nullptr, "result is null");
        require(background != nullptr, "background is null");
        require(out != nullptr, "out is null");
        require(overlay == SRM_OVERLAY_REFERENCE || overlay == SRM_OVERLAY_DISTORTED,
                "unknown overlay");
        auto frame = std::make_unique<srm_frame>();
        frame->frame = srm::render_heatmap(result->score.masks, background->frame,
                                           overlay == SRM_OVERLAY_REFERENCE
                                               ? srm::HeatmapOverlay::Reference
                                               : srm::HeatmapOverlay::Distorted);
        *out = frame.release();
    });
}

/* ---- baseline metrics and shift diagnostics --------------------------------- */

srm_status srm_psnr(const srm_frame* gt, const srm_frame* dist, double* out) {
    return guarded([&] {
        require(gt != nullptr, "gt is null");
        require(dist != nullptr, "dist is null");
        require(out != nullptr, "out is null");
        *out = srm::psnr(gt->frame, dist->frame);
    });
}

srm_status srm_ssim(const srm_frame* gt, const srm_frame* dist, double* out) {
    return guarded([&] {
        require(gt != nullptr, "gt is null");
        require(dist != nullptr, "dist is null");
        require(out != nullptr, "out is null");
        *out = srm::ssim(gt->frame, dist->frame);
    });
}

srm_status srm_global_shift(const srm_frame* gt, const srm_frame* dist, int radius, int* dx,
                            int* dy, double* psnr_db) {
    return guarded([&] {
        require(gt != nullptr, "gt is null");
        require(dist != nullptr, "dist is null");
        const srm::GlobalShift best = srm::global_shift_psnr(gt->frame, dist->frame, radius);
        if (dx) *dx = best.shift.dx;
        if (dy) *dy = best.shift.dy;
        if (psnr_db) *psnr_db = best.psnr_db;
    });
}

/* ---- degradation -------------------------------------------------------------- */

srm_status srm_bicubic_resize(const srm_frame* frame, int out_width, int out_height,
                              srm_frame** out) {
    return guarded([&] {
        require(frame != nullptr, "frame is null");
        require(out != nullptr, "out is null");
        auto result = std::make_unique<srm_frame>();
        result->frame = srm::bicubic_resize(frame->frame, out_width, out_height);
        *out = result.release();
    });
}

srm_status srm_bd_downsample(const srm_frame* frame, int scale, double sigma, int offset,
                             srm_frame** out) {
    return guarded([&] {
        require(frame != nullptr, "frame is null");
        require(out != nullptr, "out is null");
        srm::DegradeConfig cfg;
        cfg.scale = scale;
        cfg.bd_sigma = sigma;
        cfg.bd_offset = offset;
        auto result = std::make_unique<srm_frame>();
        result->frame = srm::bd_downsample(frame->frame, cfg);
        *out = result.release();
    });
}

srm_status srm_add_noise(const srm_frame* frame, double sigma_s, double sigma_c, uint64_t seed,
                         srm_frame** out) {
    return guarded([&] {
        require(frame != nullptr, "frame is null");
        require(out != nullptr, "out is null");
        srm::NoiseParams params;
        params.sigma_s = sigma_s;
        params.sigma_c = sigma_c;
        params.seed = seed;
        auto result = std::make_unique<srm_frame>();
        result->frame = srm::add_noise(frame->frame, params);
        *out = result.release();
    });
}

srm_status srm_prepare_pair(const srm_frame* source, srm_frame** hr, srm_frame** lr) {
    return guarded([&] {
        require(source != nullptr, "source is null");
        require(hr != nullptr, "hr is null");
        require(lr != nullptr, "lr is null");
        srm::FramePair pair = srm::prepare_pair(source->frame);
        auto hr_frame = std::make_unique<srm_frame>();
        auto lr_frame = std::make_unique<srm_frame>();
        hr_frame->frame = std::move(pair.hr);
        lr_frame->frame = std::move(pair.lr);
        *hr = hr_frame.release();
        *lr = lr_frame.release();
    });
}

uint64_t srm_derive_seed(uint64_t seed, uint64_t index) { return srm::derive_seed(seed, index); }

/* ---- pairwise-comparison fitting ------------------------------------------------ */

srm_status srm_bt_fit(const srm_bt_record* records, size_t record_count, double smoothing,
                      srm_bt_result** out) {
    return guarded([&] {
        require(out != nullptr, "out is null");
        require(records != nullptr || record_count == 0, "records is null");
        std::vector<srm::ComparisonRecord> converted;
        converted.reserve(record_count);
        for (size_t i = 0; i < record_count; ++i) {
            require(records[i].item_a != nullptr && records[i].item_b != nullptr,
                    "record item is null");
            converted.push_back({records[i].item_a, records[i].item_b, records[i].wins_a,
                                 records[i].wins_b});
        }
        srm::BtOptions opts;
        opts.smoothing = smoothing;
        auto result = std::make_unique<srm_bt_result>();
        result->result = srm::bt_fit(converted, opts);
        *out = result.release();
    });
}

void srm_bt_result_destroy(srm_bt_result* result) { delete result; }

size_t srm_bt_item_count(const srm_bt_result* result) {
    return result ? result->result.items.size() : 0;
}

const char* srm_bt_item(const srm_bt_result* result, size_t index) {
    if (!result || index >= result->result.items.size()) return nullptr;
    return result->result.items[index].c_str();
}

double srm_bt_ability(const srm_bt_result* result, size_t index) {
    if (!result || index >= result->result.abilities.size()) return 0.0;
    return result->result.abilities[index];
}

double srm_bt_display_score(const srm_bt_result* result, size_t index) {
    if (!result || index >= result->result.display_scores.size()) return 0.0;
    return result->result.display_scores[index];
}

int srm_bt_converged(const srm_bt_result* result) {
    return result && result->result.converged ? 1 : 0;
}

int srm_bt_iterations(const srm_bt_result* result) {
    return result ? result->result.iterations_used : 0;
}

/* ---- correlation and clustering --------------------------------------------------- */

srm_status srm_plcc(const double* x, const double* y, size_t count, double* out) {
    return guarded([&] {
        require(x != nullptr && y != nullptr, "input vector is null");
        require(out != nullptr, "out is null");
        *out = srm::plcc(std::vector<double>(x, x + count), std::vector<double>(y, y + count));
    });
}

srm_status srm_srcc(const double* x, const double* y, size_t count, double* out) {
    return guarded([&] {
        require(x != nullptr && y != nullptr, "input vector is null");
        require(out != nullptr, "out is null");
        *out = srm::srcc(std::vector<double>(x, x + count), std::vector<double>(y, y + count));
    });
}

srm_status srm_kmedoids(const double* values, size_t rows, size_t cols, size_t k, uint64_t seed,
                        srm_kmedoids_result** out) {
    return guarded([&] {
        require(values != nullptr, "values is null");
        require(out != nullptr, "out is null");
        srm::FeatureMatrix matrix;
        matrix.row_ids.resize(rows);
        matrix.col_ids.resize(cols);
        for (size_t r = 0; r < rows; ++r) matrix.row_ids[r] = std::to_string(r);
        for (size_t c = 0; c < cols; ++c) matrix.col_ids[c] = std::to_string(c);
        matrix.values.assign(values, values + rows * cols);
        auto result = std::make_unique<srm_kmedoids_result>();
        result->result = srm::kmedoids(matrix, k, seed);
        *out = result.release();
    });
}

void srm_kmedoids_result_destroy(srm_kmedoids_result* result) { delete result; }

size_t srm_kmedoids_medoid(const srm_kmedoids_result* result, size_t index) {
    if (!result || index >= result->result.medoids.size()) return SIZE_MAX;
    return result->result.medoids[index];
}

size_t srm_kmedoids_assignment(const srm_kmedoids_result* result, size_t row) {
    if (!result || row >= result->result.assignment.size()) return SIZE_MAX;
    return result->result.assignment[row];
}

double srm_kmedoids_cost(const srm_kmedoids_result* result) {
    return result ? result->result.cost : 0.0;
}

double srm_kmedoids_build_cost(const srm_kmedoids_result* result) {
    return result ? result->result.build_cost : 0.0;
}

size_t srm_kmedoids_dropped_count(const srm_kmedoids_result* result) {
    return result ? result->result.dropped_columns.size() : 0;
}

size_t srm_kmedoids_dropped_column(const srm_kmedoids_result* result, size_t index) {
    if (!result || index >= result->result.dropped_columns.size()) return SIZE_MAX;
    return result->result.dropped_columns[index];
}
