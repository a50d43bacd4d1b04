/*
 * leafscope — leaf segmentation, hand-crafted feature extraction and
 * one-vs-rest linear SVM classification behind a plain C ABI.
 *
 * All functions that can fail return an ls_status; LS_OK is 0. On failure
 * ls_last_error() returns a thread-local description of the most recent
 * error. Objects are created through ls_*_new/load factories and released
 * with the matching ls_*_free; handles are opaque.
 */
#ifndef LEAFSCOPE_H
#define LEAFSCOPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LS_API __declspec(dllexport)
#else
#define LS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ls_status {
    LS_OK = 0,
    LS_ERR_IO = 1,
    LS_ERR_FORMAT = 2,
    LS_ERR_INVALID_ARGUMENT = 3,
    LS_ERR_DEGENERATE = 4,
    LS_ERR_DIMENSION = 5,
    LS_ERR_NOT_FOUND = 6,
    LS_ERR_INTERNAL = 7
} ls_status;

LS_API const char* ls_version(void);
LS_API const char* ls_last_error(void);

/* ------------------------------------------------------------------ */
/* configuration                                                       */

typedef struct ls_config ls_config;

LS_API ls_config* ls_config_new(void);
LS_API void ls_config_free(ls_config* cfg);
/* Flat `key = value` file; unknown keys are rejected. */
LS_API ls_status ls_config_load(ls_config* cfg, const char* path);
LS_API ls_status ls_config_set(ls_config* cfg, const char* key, const char* value);

/* Learning-rate schedule under this config (step decay). */
LS_API double ls_lr_at(uint64_t iteration, const ls_config* cfg);

/* ------------------------------------------------------------------ */
/* images and masks                                                    */

typedef struct ls_image ls_image;
typedef struct ls_mask ls_mask;

LS_API ls_status ls_image_load(const char* path, ls_image** out); /* PNG or JPEG */
LS_API ls_status ls_image_save_png(const ls_image* img, const char* path);
LS_API void ls_image_free(ls_image* img);
LS_API int ls_image_width(const ls_image* img);
LS_API int ls_image_height(const ls_image* img);
/* turns in {1,2,3}; lossless 90-degree steps */
LS_API ls_status ls_image_rotate_quarter(const ls_image* img, int turns, ls_image** out);

LS_API ls_status ls_mask_load_png(const char* path, ls_mask** out);
LS_API ls_status ls_mask_save_png(const ls_mask* mask, const char* path); /* 1-bit gray */
LS_API void ls_mask_free(ls_mask* mask);
LS_API int ls_mask_width(const ls_mask* mask);
LS_API int ls_mask_height(const ls_mask* mask);
/* Morphological opening with the configured elliptical kernel (stem removal). */
LS_API ls_status ls_mask_open(const ls_mask* mask, const ls_config* cfg, ls_mask** out);
LS_API ls_status ls_mask_iou(const ls_mask* a, const ls_mask* b, double* out);
LS_API ls_status ls_mask_count(const ls_mask* mask, size_t* out);

/* ------------------------------------------------------------------ */
/* segmentation                                                        */

enum {
    LS_SEG_OK = 0,
    LS_SEG_WIPED_OUT = 1,
    LS_SEG_BACKGROUND_RESIDUE = 2
};

typedef struct ls_seg_report {
    double leaf_area_fraction;
    double border_leaf_fraction;
    int verdict;
} ls_seg_report;

/*
 * Background elimination. Any of mask_out / masked_out / report may be
 * NULL. The mask and the masked image are at the resized working scale
 * (longest edge = resize_target).
 */
LS_API ls_status ls_segment(const ls_image* img, const ls_config* cfg, ls_mask** mask_out,
                            ls_image** masked_out, ls_seg_report* report);
LS_API ls_status ls_mask_judge(const ls_mask* mask, const ls_config* cfg, ls_seg_report* report);
LS_API const char* ls_verdict_name(int verdict);

/* ------------------------------------------------------------------ */
/* hand-crafted features                                               */

#define LS_HCF_DIM 56

/* Full per-image pipeline: segment, remove the stem, extract the 56
 * hand-crafted dimensions. */
LS_API ls_status ls_extract_hcf(const ls_image* img, const ls_config* cfg,
                                double out[LS_HCF_DIM]);

/* Plain concatenation [deep ++ hcf] into out (deep_dim + hcf_dim values). */
LS_API ls_status ls_fuse(const double* deep, size_t deep_dim, const double* hcf, size_t hcf_dim,
                         double* out);

/* Feature groups A (36 contour radii), B (8: convexity+Hu), C (6 shape
 * scalars), D (6 texture/intensity scalars); `groups` is a subset of
 * "ABCD". Selection keeps the canonical 56-dim order. */
LS_API int ls_group_dimension(const char* groups); /* -1 on bad group set */
LS_API ls_status ls_group_select(const double* hcf, const char* groups, double* out,
                                 size_t* out_dim);

/* ------------------------------------------------------------------ */
/* feature tables (deep-feature sidecars and extracted features)       */

typedef struct ls_features ls_features;

LS_API ls_status ls_features_create(size_t dim, ls_features** out);
LS_API ls_status ls_features_load(const char* path, ls_features** out);
LS_API ls_status ls_features_save(const ls_features* t, const char* path);
LS_API void ls_features_free(ls_features* t);
LS_API size_t ls_features_dim(const ls_features* t);
LS_API size_t ls_features_count(const ls_features* t);
LS_API const char* ls_features_id(const ls_features* t, size_t index);
LS_API ls_status ls_features_get(const ls_features* t, const char* id, double* out);
LS_API ls_status ls_features_add(ls_features* t, const char* id, const double* values);
/* Group subsetting across a whole 56-dim table. */
LS_API ls_status ls_features_select_groups(const ls_features* t, const char* groups,
                                           ls_features** out);

/* ------------------------------------------------------------------ */
/* dataset manifests                                                   */

typedef struct ls_manifest ls_manifest;

typedef struct ls_record_view {
    const char* image_path;
    const char* label;
    const char* split;           /* "train" | "test" | "unassigned" */
    int rotation;                /* 0 | 90 | 180 | 270 */
    const char* deep_feature_id; /* "" if none */
} ls_record_view;

LS_API ls_status ls_manifest_new(ls_manifest** out);
LS_API ls_status ls_manifest_load(const char* path, ls_manifest** out);
LS_API ls_status ls_manifest_save(const ls_manifest* m, const char* path);
LS_API void ls_manifest_free(ls_manifest* m);
LS_API ls_status ls_manifest_add(ls_manifest* m, const char* image_path, const char* label,
                                 const char* split, int rotation, const char* deep_feature_id);
LS_API size_t ls_manifest_count(const ls_manifest* m);
/* View pointers stay valid until the manifest is modified or freed. */
LS_API ls_status ls_manifest_record(const ls_manifest* m, size_t index, ls_record_view* out);
LS_API size_t ls_manifest_species_count(const ls_manifest* m);
LS_API const char* ls_manifest_species(const ls_manifest* m, size_t index);

/* Expands every unrotated record into the four quarter-turn rotations. */
LS_API ls_status ls_manifest_augment(const ls_manifest* m, ls_manifest** out);
/* Seeded per-species test draw; tier file maps species to low|medium|high
 * (5/10/15 test images). */
LS_API ls_status ls_manifest_assign_split(const ls_manifest* m, const char* tiers_path,
                                          uint64_t seed, ls_manifest** out);
/* Id under which a record's extracted features are stored: path#r<rot>. */
LS_API ls_status ls_manifest_row_id(const ls_manifest* m, size_t index, char* buf, size_t bufsize);
/* Deep-store key: the explicit deep_feature_id when set, else the row id. */
LS_API ls_status ls_manifest_deep_key(const ls_manifest* m, size_t index, char* buf,
                                      size_t bufsize);

/* ------------------------------------------------------------------ */
/* one-vs-rest linear SVM                                              */

typedef struct ls_model ls_model;

typedef void (*ls_train_log_fn)(const char* class_label, uint64_t epoch, double avg_loss,
                                double lr, void* user);

/* samples is n rows of dim doubles, row-major; labels[i] names the class
 * of row i. The trainer standardizes features, then runs hinge-loss SGD
 * with momentum, weight decay and the step learning-rate schedule from the
 * config, one binary problem per class. Deterministic for a fixed seed. */
LS_API ls_status ls_train(const double* samples, size_t n, size_t dim,
                          const char* const* labels, const ls_config* cfg, ls_train_log_fn log,
                          void* user, ls_model** out);
LS_API ls_status ls_model_save(const ls_model* model, const char* path);
LS_API ls_status ls_model_load(const char* path, ls_model** out);
LS_API void ls_model_free(ls_model* model);
LS_API size_t ls_model_feature_dim(const ls_model* model);
LS_API size_t ls_model_class_count(const ls_model* model);
LS_API const char* ls_model_class_name(const ls_model* model, size_t index);

/* Top-k decision scores, descending; ties broken by class name. Fills at
 * most k entries and reports the count written. */
LS_API ls_status ls_model_predict(const ls_model* model, const double* x, size_t dim, size_t k,
                                  size_t* out_indices, double* out_scores, size_t* out_count);

typedef struct ls_metrics {
    double top1;
    double top5;
    size_t total;
    size_t unseen; /* test labels the model does not know; counted as errors */
} ls_metrics;

/* confusion (optional) is class_count^2 int64 cells, [true][predicted]. */
LS_API ls_status ls_model_evaluate(const ls_model* model, const double* samples, size_t n,
                                   size_t dim, const char* const* labels, ls_metrics* out,
                                   int64_t* confusion);

/* ------------------------------------------------------------------ */
/* synthetic corpus                                                    */

typedef struct ls_leaf_spec {
    double ellipse_ratio;       /* [1, 6] */
    int lobe_count;             /* [0, 12] */
    double lobe_depth;          /* [0, 0.4] */
    double serration_amplitude; /* pixels, [0, 4] */
    double stem_length;         /* pixels, [0, 60] */
    double stem_width;          /* pixels, [0, 8] */
} ls_leaf_spec;

/* Renders a parametric leaf and its exact ground-truth blade mask (the stem
 * is not part of the mask). Deterministic per (spec, size, seed). */
LS_API ls_status ls_synth_leaf(const ls_leaf_spec* spec, int size, uint64_t seed,
                               ls_image** image_out, ls_mask** mask_out);

#ifdef __cplusplus
}
#endif

#endif /* LEAFSCOPE_H */
