/* vcnn - volumetric CNN engine for CT nodule screening.
 *
 * C API of the shared library. All functions return a vcnn_status; on any
 * failure vcnn_last_error() carries a human-readable message for the calling
 * thread. Objects are opaque handles released with their _free function.
 * The library is thread-safe for distinct handles; a single handle must not
 * be mutated concurrently.
 */
#ifndef VCNN_H
#define VCNN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define VCNN_API __declspec(dllexport)
#else
#define VCNN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vcnn_status {
    VCNN_OK = 0,
    VCNN_ERR_INVALID_ARGUMENT = 1,
    VCNN_ERR_IO = 2,
    VCNN_ERR_MALFORMED_HEADER = 3,
    VCNN_ERR_UNSUPPORTED_FIELD = 4,
    VCNN_ERR_SIZE_MISMATCH = 5,
    VCNN_ERR_DECODE = 6,
    VCNN_ERR_MALFORMED_ROW = 7,
    VCNN_ERR_NO_VALID_PLACEMENT = 8,
    VCNN_ERR_MALFORMED_NPY = 9,
    VCNN_ERR_SHAPE_MISMATCH = 10,
    VCNN_ERR_SHAPE_INCOMPATIBLE = 11,
    VCNN_ERR_BAD_MAGIC = 12,
    VCNN_ERR_VERSION_MISMATCH = 13,
    VCNN_ERR_CRC_MISMATCH = 14,
    VCNN_ERR_VOLUME_TOO_SMALL = 15,
    VCNN_ERR_EMPTY_DATASET = 16,
    VCNN_ERR_DEGENERATE_BATCH = 17,
    VCNN_ERR_CONFIG = 18,
    VCNN_ERR_INTERNAL = 19
} vcnn_status;

VCNN_API const char* vcnn_status_name(vcnn_status status);

/* Message for the most recent failure on the calling thread; valid until the
 * next failing call on the same thread. */
VCNN_API const char* vcnn_last_error(void);

/* Worker cap for internal parallelism. Results are bit-identical for every
 * thread count; 1 is the reference single-threaded mode. */
VCNN_API void vcnn_set_threads(int n);
VCNN_API int vcnn_threads(void);

/* ------------------------------------------------------------------ */
/* volumes                                                            */
/* ------------------------------------------------------------------ */

typedef struct vcnn_volume vcnn_volume;

/* Reads a MetaImage header + raw payload pair. */
VCNN_API vcnn_status vcnn_volume_read_mhd(const char* mhd_path, vcnn_volume** out);
/* Writes `<stem>.mhd` and `<stem>.raw`, re-encoding to the source element
 * type. Loading a written pair and writing it again is byte-identical. */
VCNN_API vcnn_status vcnn_volume_write_mhd(const vcnn_volume* v, const char* mhd_path);
VCNN_API void vcnn_volume_free(vcnn_volume* v);

VCNN_API void vcnn_volume_dims(const vcnn_volume* v, int64_t out[3]);
VCNN_API void vcnn_volume_spacing(const vcnn_volume* v, double out[3]);
VCNN_API void vcnn_volume_origin(const vcnn_volume* v, double out[3]);
/* Voxels as 32-bit floats, x-fastest; the pointer lives with the handle. */
VCNN_API const float* vcnn_volume_data(const vcnn_volume* v, int64_t* count);

VCNN_API vcnn_status vcnn_volume_resample(const vcnn_volume* v, const double target_spacing[3],
                                          vcnn_volume** out);
VCNN_API vcnn_status vcnn_volume_normalize(const vcnn_volume* v, double hu_low, double hu_high,
                                           vcnn_volume** out);

VCNN_API void vcnn_world_to_voxel(const vcnn_volume* v, const double world[3], double voxel[3]);
VCNN_API void vcnn_voxel_to_world(const vcnn_volume* v, const double voxel[3], double world[3]);

/* ------------------------------------------------------------------ */
/* models                                                             */
/* ------------------------------------------------------------------ */

typedef struct vcnn_model vcnn_model;

typedef struct vcnn_layer_info {
    char name[32];
    char type[16];
    int64_t out_shape[4]; /* batch axis excluded; trailing dims 0 */
    int32_t out_rank;
    int64_t param_count;
} vcnn_layer_info;

/* Builds the screening network, Glorot-initialized from `seed`.
 * small != 0 selects the width-1/4 variant; batchnorm != 0 inserts batchnorm
 * after each convolution. */
VCNN_API vcnn_status vcnn_model_create(uint64_t seed, int small, int batchnorm, vcnn_model** out);
VCNN_API vcnn_status vcnn_model_load(const char* path, vcnn_model** out);
VCNN_API vcnn_status vcnn_model_save(const vcnn_model* model, const char* path);
VCNN_API void vcnn_model_free(vcnn_model* model);

VCNN_API int64_t vcnn_model_param_count(const vcnn_model* model);
VCNN_API int64_t vcnn_model_input_edge(const vcnn_model* model);
VCNN_API int32_t vcnn_model_layer_count(const vcnn_model* model);
VCNN_API vcnn_status vcnn_model_layer_info(const vcnn_model* model, int32_t index,
                                           vcnn_layer_info* out);

/* Malignancy probability of one normalized cube (edge^3 floats, x-fastest).
 * edge must match the model input. */
VCNN_API vcnn_status vcnn_model_predict_cube(const vcnn_model* model, const float* cube, int64_t edge,
                                             float* probability);

/* ------------------------------------------------------------------ */
/* probability maps                                                   */
/* ------------------------------------------------------------------ */

typedef struct vcnn_prob_map vcnn_prob_map;

/* Sliding-window inference over a resampled + normalized volume. */
VCNN_API vcnn_status vcnn_model_predict_map(const vcnn_model* model, const vcnn_volume* v,
                                            int64_t stride, vcnn_prob_map** out);
VCNN_API void vcnn_map_free(vcnn_prob_map* map);
VCNN_API void vcnn_map_grid(const vcnn_prob_map* map, int64_t out[3]);
VCNN_API float vcnn_map_value(const vcnn_prob_map* map, int64_t ix, int64_t iy, int64_t iz);

/* ------------------------------------------------------------------ */
/* pipeline commands (the CLI surface)                                */
/* ------------------------------------------------------------------ */

typedef struct vcnn_preprocess_report {
    int32_t scans_total;
    int32_t scans_ok;
    int32_t scans_failed;
    int64_t positive_cubes;
    int64_t negative_cubes;
} vcnn_preprocess_report;

/* Extracts labeled cubes from every scan in scans_dir into out_dir
 * (NPY files + manifest.csv). config_path may be NULL for defaults; a
 * non-negative seed overrides the config seed. Per-scan progress and errors
 * go to stdout. Returns VCNN_OK only when every scan succeeded. */
VCNN_API vcnn_status vcnn_preprocess_run(const char* scans_dir, const char* annotations_csv,
                                         const char* out_dir, const char* config_path, int64_t seed,
                                         vcnn_preprocess_report* report);

typedef struct vcnn_train_options {
    const char* config_path; /* NULL: defaults */
    int32_t epochs;          /* < 0: value from config */
    int64_t seed;            /* < 0: value from config */
    int32_t small;           /* width-1/4 variant */
    int32_t no_timing;       /* write 0 in the wall_seconds column */
} vcnn_train_options;

typedef struct vcnn_train_report {
    int32_t epochs_run;
    double final_val_loss;
    double final_val_acc;
    double best_val_loss;
    char checkpoint_path[1024];
    char metrics_path[1024];
} vcnn_train_report;

VCNN_API vcnn_status vcnn_train_run(const char* data_dir, const char* out_dir,
                                    const vcnn_train_options* options, vcnn_train_report* report);

/* split: "train", "val" or "test". The scan-level split is reproduced from
 * the config counts and seed (seed >= 0 overrides the config value), so they
 * must match the training run. */
VCNN_API vcnn_status vcnn_evaluate_run(const char* data_dir, const char* checkpoint_path,
                                       const char* split, const char* config_path, int64_t seed,
                                       double* loss, double* accuracy);

typedef struct vcnn_predict_report {
    int64_t grid[3];
    int64_t windows;
    int64_t detections;
    char detections_path[1024];
} vcnn_predict_report;

/* Preprocesses one scan, runs the sliding window, thresholds + denoises, and
 * writes map CSV/raw, detections CSV and a PGM projection into out_dir. */
VCNN_API vcnn_status vcnn_predict_run(const char* scan_path, const char* checkpoint_path,
                                      int64_t stride, double threshold, const char* out_dir,
                                      const char* config_path, vcnn_predict_report* report);

/* Finite-difference verification of every layer kind (64-bit, eps 1e-3).
 * Prints one line per layer. corrupt_conv is the negative-control hook.
 * Returns VCNN_OK iff all layers pass their thresholds. */
VCNN_API vcnn_status vcnn_gradcheck_run(uint64_t seed, int corrupt_conv);

/* Prints the layer table of a checkpoint (CSV with csv != 0). */
VCNN_API vcnn_status vcnn_inspect_run(const char* checkpoint_path, int csv);

/* ------------------------------------------------------------------ */
/* synthetic data                                                     */
/* ------------------------------------------------------------------ */

/* Labeled sphere/no-sphere cubes + manifest for desk-scale training. */
VCNN_API vcnn_status vcnn_synth_dataset(const char* out_dir, int32_t n_train, int32_t n_val,
                                        int64_t edge, uint64_t seed);

/* One HU-encoded scan with an embedded sphere; writes `<stem>.mhd`,
 * `<stem>.raw` and `<stem>_truth.csv`. Outputs may be NULL. */
VCNN_API vcnn_status vcnn_synth_volume(const char* mhd_path, int64_t dim, uint64_t seed,
                                       double sphere_center_world[3], double* sphere_diameter_mm);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* VCNN_H */
