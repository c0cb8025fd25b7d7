/* srmetrics: full-reference detail-restoration quality metrics.
 *
 * Every fallible entry point returns srm_status and writes its result
 * through out-parameters. On failure the out-parameters are untouched and
 * srm_last_error() holds a message for the calling thread. Objects returned
 * through srm_*_create/compare/fit are owned by the caller and released with
 * the matching *_destroy; destroy functions accept NULL.
 *
 * Frames are float32 in [0,1], row-major, interleaved channels (1 = gray,
 * 3 = RGB). All functions are thread-safe on distinct objects; treat any
 * one object as single-owner.
 */
#ifndef SRMETRICS_H
#define SRMETRICS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SRM_BUILD_SHARED)
#    define SRM_API __declspec(dllexport)
#  else
#    define SRM_API __declspec(dllimport)
#  endif
#else
#  if defined(SRM_BUILD_SHARED)
#    define SRM_API __attribute__((visibility("default")))
#  else
#    define SRM_API
#  endif
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum srm_status {
    SRM_OK = 0,
    SRM_ERR_INVALID_ARGUMENT = 1,
    SRM_ERR_IO = 2,
    SRM_ERR_DIMENSION_MISMATCH = 3,
    SRM_ERR_UNSUPPORTED = 4,
    SRM_ERR_DEGENERATE_INPUT = 5,
    SRM_ERR_INTERNAL = 6
} srm_status;

SRM_API const char* srm_version(void);
SRM_API const char* srm_status_name(srm_status status);
/* Message of the last failing call on this thread; empty after success. */
SRM_API const char* srm_last_error(void);

/* ---- frames ---------------------------------------------------------- */

typedef struct srm_frame srm_frame;

/* data may be NULL for a zero frame; otherwise width*height*channels floats. */
SRM_API srm_status srm_frame_create(int width, int height, int channels,
                                    const float* data, srm_frame** out);
SRM_API srm_status srm_frame_load(const char* path, srm_frame** out);
SRM_API srm_status srm_frame_save(const srm_frame* frame, const char* path);
SRM_API void srm_frame_destroy(srm_frame* frame);

SRM_API int srm_frame_width(const srm_frame* frame);
SRM_API int srm_frame_height(const srm_frame* frame);
SRM_API int srm_frame_channels(const srm_frame* frame);
SRM_API const float* srm_frame_data(const srm_frame* frame);

/* Content translated by (dx, dy) with replicate borders: the output at
 * (x, y) samples the input at (x + dx, y + dy) clamped into the frame. */
SRM_API srm_status srm_frame_translate(const srm_frame* frame, int dx, int dy,
                                       srm_frame** out);

/* ---- configuration --------------------------------------------------- */

/* Flat string key/value view over every tunable. Keys:
 *   erqa.shift_radius          int >= 0          (default 5)
 *   erqa.refine_iterations     int >= 1          (default 35)
 *   erqa.beta                  double > 0        (default 0.5)
 *   erqa.shift_set             disk | square     (default disk)
 *   erqa.rerank_each_iteration true | false      (default false)
 *   gradient.percentile_q      double in (0,1]   (default 0.85)
 *   gradient.filter_direction  drop-above | drop-below (default drop-above)
 *   gradient.drop_zero_magnitude true | false    (default true)
 *   gradient.cosine_threshold  double in (-1,1]  (default 0.85)
 *   luma.red / luma.green / luma.blue            (defaults 0.299/0.587/0.114)
 *   degrade.scale              int >= 2          (default 4)
 *   degrade.bd_sigma           double >= 0       (default 1.6)
 *   degrade.bd_offset          int in [0,scale)  (default 0)
 *   noise.sigma_s              double >= 0       (default 0.001)
 *   noise.sigma_c              double >= 0       (default 0.035)
 *   noise.seed                 uint64            (default 0)
 * Set parses strictly and rejects unknown keys; cross-field ranges are
 * enforced when the config is used. */
typedef struct srm_config srm_config;

SRM_API srm_status srm_config_create(srm_config** out);
SRM_API void srm_config_destroy(srm_config* config);
SRM_API srm_status srm_config_set(srm_config* config, const char* key, const char* value);
SRM_API srm_status srm_config_get(const srm_config* config, const char* key,
                                  char* buffer, size_t buffer_size);
SRM_API size_t srm_config_count(const srm_config* config);
/* Key at index in stable order; NULL when out of range. */
SRM_API const char* srm_config_key(const srm_config* config, size_t index);

/* ---- detail-restoration score ---------------------------------------- */

typedef struct srm_erqa_result srm_erqa_result;

typedef enum srm_overlay {
    SRM_OVERLAY_REFERENCE = 0, /* matched (green) + missing (red), reference coords */
    SRM_OVERLAY_DISTORTED = 1  /* hallucinated (blue), input coords */
} srm_overlay;

/* config may be NULL for defaults. */
SRM_API srm_status srm_erqa_compare(const srm_frame* reference, const srm_frame* distorted,
                                    const srm_config* config, srm_erqa_result** out);
SRM_API void srm_erqa_result_destroy(srm_erqa_result* result);

SRM_API double srm_erqa_value(const srm_erqa_result* result);
SRM_API void srm_erqa_counts(const srm_erqa_result* result, uint64_t* tp, uint64_t* fp,
                             uint64_t* fn);
SRM_API size_t srm_erqa_trace_length(const srm_erqa_result* result);
SRM_API srm_status srm_erqa_trace_entry(const srm_erqa_result* result, size_t index, int* dx,
                                        int* dy, uint64_t* similarity, uint64_t* matches_added);
SRM_API srm_status srm_erqa_heatmap(const srm_erqa_result* result, const srm_frame* background,
                                    srm_overlay overlay, srm_frame** out);

/* ---- baseline metrics and shift diagnostics -------------------------- */

/* Identical frames yield +infinity. */
SRM_API srm_status srm_psnr(const srm_frame* gt, const srm_frame* dist, double* out);
SRM_API srm_status srm_ssim(const srm_frame* gt, const srm_frame* dist, double* out);
SRM_API srm_status srm_global_shift(const srm_frame* gt, const srm_frame* dist, int radius,
                                    int* dx, int* dy, double* psnr_db);

/* ---- degradation ------------------------------------------------------ */

SRM_API srm_status srm_bicubic_resize(const srm_frame* frame, int out_width, int out_height,
                                      srm_frame** out);
SRM_API srm_status srm_bd_downsample(const srm_frame* frame, int scale, double sigma,
                                     int offset, srm_frame** out);
SRM_API srm_status srm_add_noise(const srm_frame* frame, double sigma_s, double sigma_c,
                                 uint64_t seed, srm_frame** out);
SRM_API srm_status srm_prepare_pair(const srm_frame* source, srm_frame** hr, srm_frame** lr);
/* Stable per-item sub-seed derivation for batch runs. */
SRM_API uint64_t srm_derive_seed(uint64_t seed, uint64_t index);

/* ---- pairwise-comparison fitting -------------------------------------- */

typedef struct srm_bt_record {
    const char* item_a;
    const char* item_b;
    long long wins_a;
    long long wins_b;
} srm_bt_record;

typedef struct srm_bt_result srm_bt_result;

/* smoothing adds alpha to both win counts of every compared pair; 0 = off. */
SRM_API srm_status srm_bt_fit(const srm_bt_record* records, size_t record_count,
                              double smoothing, srm_bt_result** out);
SRM_API void srm_bt_result_destroy(srm_bt_result* result);

SRM_API size_t srm_bt_item_count(const srm_bt_result* result);
/* Items in first-appearance order; NULL when out of range. */
SRM_API const char* srm_bt_item(const srm_bt_result* result, size_t index);
SRM_API double srm_bt_ability(const srm_bt_result* result, size_t index);
SRM_API double srm_bt_display_score(const srm_bt_result* result, size_t index);
SRM_API int srm_bt_converged(const srm_bt_result* result);
SRM_API int srm_bt_iterations(const srm_bt_result* result);

/* ---- correlation and clustering --------------------------------------- */

SRM_API srm_status srm_plcc(const double* x, const double* y, size_t count, double* out);
SRM_API srm_status srm_srcc(const double* x, const double* y, size_t count, double* out);

typedef struct srm_kmedoids_result srm_kmedoids_result;

/* values: row-major rows x cols feature matrix. */
SRM_API srm_status srm_kmedoids(const double* values, size_t rows, size_t cols, size_t k,
                                uint64_t seed, srm_kmedoids_result** out);
SRM_API void srm_kmedoids_result_destroy(srm_kmedoids_result* result);

SRM_API size_t srm_kmedoids_medoid(const srm_kmedoids_result* result, size_t index);
/* Row index of the medoid assigned to `row`. */
SRM_API size_t srm_kmedoids_assignment(const srm_kmedoids_result* result, size_t row);
SRM_API double srm_kmedoids_cost(const srm_kmedoids_result* result);
SRM_API double srm_kmedoids_build_cost(const srm_kmedoids_result* result);
SRM_API size_t srm_kmedoids_dropped_count(const srm_kmedoids_result* result);
/* Index of the i-th dropped (constant) feature column. */
SRM_API size_t srm_kmedoids_dropped_column(const srm_kmedoids_result* result, size_t index);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SRMETRICS_H */
