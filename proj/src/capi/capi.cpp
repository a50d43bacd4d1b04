#include "leafscope/leafscope.h"

#include <algorithm>
#include <cstring>
#include <string>

#include "../core/corpus.hpp"
#include "../core/error.hpp"
#include "../core/features.hpp"
#include "../core/image_io.hpp"
#include "../core/learn.hpp"
#include "../core/raster.hpp"
#include "../core/run_config.hpp"
#include "../core/segmentation.hpp"
#include "../core/synth.hpp"

using leafscope::Error;
using leafscope::ErrorCode;

struct ls_config {
    leafscope::config::RunConfig cfg;
};
struct ls_image {
    leafscope::RasterImage img;
};
struct ls_mask {
    leafscope::BinaryMask mask;
};
struct ls_features {
    leafscope::corpus::FeatureTable table;
};
struct ls_manifest {
    leafscope::corpus::Manifest m;
};
struct ls_model {
    leafscope::learn::LinearModel model;
};

namespace {

thread_local std::string g_last_error;

ls_status status_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::Io: return LS_ERR_IO;
        case ErrorCode::Format: return LS_ERR_FORMAT;
        case ErrorCode::InvalidArgument: return LS_ERR_INVALID_ARGUMENT;
        case ErrorCode::Degenerate: return LS_ERR_DEGENERATE;
        case ErrorCode::Dimension: return LS_ERR_DIMENSION;
        case ErrorCode::NotFound: return LS_ERR_NOT_FOUND;
        case ErrorCode::Internal: return LS_ERR_INTERNAL;
    }
    return LS_ERR_INTERNAL;
}

ls_status fail(ls_status status, const char* message) {
    g_last_error = message;
    return status;
}

template <typename Fn>
ls_status guarded(Fn&& fn) {
    try {
        fn();
        return LS_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return LS_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return LS_ERR_INTERNAL;
    }
}

ls_status copy_to_buf(const std::string& s, char* buf, size_t bufsize) {
    if (!buf || bufsize == 0) return fail(LS_ERR_INVALID_ARGUMENT, "null output buffer");
    if (s.size() + 1 > bufsize) return fail(LS_ERR_INVALID_ARGUMENT, "output buffer too small");
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return LS_OK;
}

const char* kNullArg = "null argument";

}  // namespace

extern "C" {

const char* ls_version(void) { return "leafscope 1.0.0"; }

const char* ls_last_error(void) { return g_last_error.c_str(); }

/* ---------------- config ---------------- */

ls_config* ls_config_new(void) { return new ls_config(); }

void ls_config_free(ls_config* cfg) { delete cfg; }

ls_status ls_config_load(ls_config* cfg, const char* path) {
    if (!cfg || !path) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] { cfg->cfg.load_file(path); });
}

ls_status ls_config_set(ls_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] {
        cfg->cfg.set(key, value);
        cfg->cfg.validate();
    });
}

double ls_lr_at(uint64_t iteration, const ls_config* cfg) {
    return cfg ? leafscope::learn::lr_at(iteration, cfg->cfg.train) : 0.0;
}

/* ---------------- images ---------------- */

ls_status ls_image_load(const char* path, ls_image** out) {
    if (!path || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] { *out = new ls_image{leafscope::load_image(path)}; });
}

ls_status ls_image_save_png(const ls_image* img, const char* path) {
    if (!img || !path) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] { leafscope::save_png(img->img, path); });
}

void ls_image_free(ls_image* img) { delete img; }

int ls_image_width(const ls_image* img) { return img ? img->img.width : 0; }

int ls_image_height(const ls_image* img) { return img ? img->img.height : 0; }

ls_status ls_image_rotate_quarter(const ls_image* img, int turns, ls_image** out) {
    if (!img || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] { *out = new ls_image{leafscope::rotate_quarter(img->img, turns)}; });
}

/* ---------------- masks ---------------- */

ls_status ls_mask_load_png(const char* path, ls_mask** out) {
    if (!path || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] { *out = new ls_mask{leafscope::load_mask_png(path)}; });
}

ls_status ls_mask_save_png(const ls_mask* mask, const char* path) {
    if (!mask || !path) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] { leafscope::save_mask_png(mask->mask, path); });
}

void ls_mask_free(ls_mask* mask) { delete mask; }

int ls_mask_width(const ls_mask* mask) { return mask ? mask->mask.width : 0; }

int ls_mask_height(const ls_mask* mask) { return mask ? mask->mask.height : 0; }

ls_status ls_mask_open(const ls_mask* mask, const ls_config* cfg, ls_mask** out) {
    if (!mask || !cfg || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] {
        *out = new ls_mask{
            leafscope::seg::morphological_open(mask->mask, cfg->cfg.segmentation.opening_kernel)};
    });
}

ls_status ls_mask_iou(const ls_mask* a, const ls_mask* b, double* out) {
    if (!a || !b || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    if (a->mask.width != b->mask.width || a->mask.height != b->mask.height)
        return fail(LS_ERR_DIMENSION, "mask dimensions differ");
    size_t inter = 0, uni = 0;
    for (size_t i = 0; i < a->mask.bits.size(); ++i) {
        bool av = a->mask.bits[i], bv = b->mask.bits[i];
        inter += av && bv;
        uni += av || bv;
    }
    *out = uni ? static_cast<double>(inter) / uni : 1.0;
    return LS_OK;
}

ls_status ls_mask_count(const ls_mask* mask, size_t* out) {
    if (!mask || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    *out = mask->mask.count_true();
    return LS_OK;
}

/* ---------------- segmentation ---------------- */

namespace {

void fill_report(const leafscope::seg::SegmentationReport& r, ls_seg_report* out) {
    if (!out) return;
    out->leaf_area_fraction = r.leaf_area_fraction;
    out->border_leaf_fraction = r.border_leaf_fraction;
    switch (r.verdict) {
        case leafscope::seg::Verdict::Ok: out->verdict = LS_SEG_OK; break;
        case leafscope::seg::Verdict::WipedOut: out->verdict = LS_SEG_WIPED_OUT; break;
        case leafscope::seg::Verdict::BackgroundResidue:
            out->verdict = LS_SEG_BACKGROUND_RESIDUE;
            break;
    }
}

}  // namespace

ls_status ls_segment(const ls_image* img, const ls_config* cfg, ls_mask** mask_out,
                     ls_image** masked_out, ls_seg_report* report) {
    if (!img || !cfg) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] {
        auto result = leafscope::seg::segment_leaf(img->img, cfg->cfg.segmentation);
        if (mask_out) *mask_out = new ls_mask{std::move(result.mask)};
        if (masked_out) *masked_out = new ls_image{std::move(result.masked)};
        fill_report(result.report, report);
    });
}

ls_status ls_mask_judge(const ls_mask* mask, const ls_config* cfg, ls_seg_report* report) {
    if (!mask || !cfg || !report) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] {
        fill_report(leafscope::seg::judge_segmentation(mask->mask, cfg->cfg.segmentation), report);
    });
}

const char* ls_verdict_name(int verdict) {
    switch (verdict) {
        case LS_SEG_OK: return "ok";
        case LS_SEG_WIPED_OUT: return "wiped_out";
        case LS_SEG_BACKGROUND_RESIDUE: return "background_residue";
    }
    return "?";
}

/* ---------------- features ---------------- */

ls_status ls_extract_hcf(const ls_image* img, const ls_config* cfg, double out[LS_HCF_DIM]) {
    if (!img || !cfg || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] {
        const auto& c = cfg->cfg;
        leafscope::RasterImage resized =
            leafscope::resize_longest_edge(img->img, c.segmentation.resize_target);
        auto seg = leafscope::seg::segment_leaf(img->img, c.segmentation);
        leafscope::BinaryMask blade =
            leafscope::seg::morphological_open(seg.mask, c.segmentation.opening_kernel);
        leafscope::RasterImage masked = leafscope::seg::apply_mask(resized, blade);
        leafscope::GrayImage gray = leafscope::to_grayscale(masked);
        auto hcf = leafscope::feat::extract_hcf(blade, gray, c.features);
        std::memcpy(out, hcf.data(), sizeof(double) * LS_HCF_DIM);
    });
}

ls_status ls_fuse(const double* deep, size_t deep_dim, const double* hcf, size_t hcf_dim,
                  double* out) {
    if ((deep_dim && !deep) || !hcf || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    if (deep_dim) std::memcpy(out, deep, sizeof(double) * deep_dim);
    std::memcpy(out + deep_dim, hcf, sizeof(double) * hcf_dim);
    return LS_OK;
}

int ls_group_dimension(const char* groups) {
    if (!groups) return -1;
    try {
        return leafscope::feat::group_dimension(groups);
    } catch (const Error& e) {
        g_last_error = e.what();
        return -1;
    }
}

ls_status ls_group_select(const double* hcf, const char* groups, double* out, size_t* out_dim) {
    if (!hcf || !groups || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] {
        auto idx = leafscope::feat::group_indices(groups);
        for (size_t i = 0; i < idx.size(); ++i) out[i] = hcf[idx[i]];
        if (out_dim) *out_dim = idx.size();
    });
}

/* ---------------- feature tables ---------------- */

ls_status ls_features_create(size_t dim, ls_features** out) {
    if (!out || dim == 0) return fail(LS_ERR_INVALID_ARGUMENT, "dimension must be >= 1");
    auto* t = new ls_features();
    t->table.dim = dim;
    *out = t;
    return LS_OK;
}

ls_status ls_features_load(const char* path, ls_features** out) {
    if (!path || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] { *out = new ls_features{leafscope::corpus::load_feature_table(path)}; });
}

ls_status ls_features_save(const ls_features* t, const char* path) {
    if (!t || !path) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] { leafscope::corpus::save_feature_table(t->table, path); });
}

void ls_features_free(ls_features* t) { delete t; }

size_t ls_features_dim(const ls_features* t) { return t ? t->table.dim : 0; }

size_t ls_features_count(const ls_features* t) { return t ? t->table.size() : 0; }

const char* ls_features_id(const ls_features* t, size_t index) {
    if (!t || index >= t->table.ids.size()) return nullptr;
    return t->table.ids[index].c_str();
}

ls_status ls_features_get(const ls_features* t, const char* id, double* out) {
    if (!t || !id || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    const auto* row = t->table.find(id);
    if (!row) return fail(LS_ERR_NOT_FOUND, ("feature id not found: " + std::string(id)).c_str());
    std::memcpy(out, row->data(), sizeof(double) * row->size());
    return LS_OK;
}

ls_status ls_features_add(ls_features* t, const char* id, const double* values) {
    if (!t || !id || !values) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] { t->table.add(id, std::vector<double>(values, values + t->table.dim)); });
}

ls_status ls_features_select_groups(const ls_features* t, const char* groups, ls_features** out) {
    if (!t || !groups || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    if (t->table.dim != LS_HCF_DIM)
        return fail(LS_ERR_DIMENSION, "group selection needs a 56-dim feature table");
    return guarded([&] {
        auto idx = leafscope::feat::group_indices(groups);
        auto* sel = new ls_features();
        sel->table.dim = idx.size();
        for (size_t i = 0; i < t->table.size(); ++i) {
            std::vector<double> row;
            row.reserve(idx.size());
            for (int d : idx) row.push_back(t->table.rows[i][d]);
            sel->table.add(t->table.ids[i], std::move(row));
        }
        *out = sel;
    });
}

/* ---------------- manifests ---------------- */

ls_status ls_manifest_new(ls_manifest** out) {
    if (!out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    *out = new ls_manifest();
    return LS_OK;
}

ls_status ls_manifest_load(const char* path, ls_manifest** out) {
    if (!path || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] { *out = new ls_manifest{leafscope::corpus::load_manifest(path)}; });
}

ls_status ls_manifest_save(const ls_manifest* m, const char* path) {
    if (!m || !path) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] { leafscope::corpus::save_manifest(m->m, path); });
}

void ls_manifest_free(ls_manifest* m) { delete m; }

ls_status ls_manifest_add(ls_manifest* m, const char* image_path, const char* label,
                          const char* split, int rotation, const char* deep_feature_id) {
    if (!m || !image_path || !label || !split) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] {
        if (rotation != 0 && rotation != 90 && rotation != 180 && rotation != 270)
            leafscope::raise(ErrorCode::InvalidArgument, "rotation must be 0/90/180/270");
        leafscope::corpus::SampleRecord r;
        r.image_path = image_path;
        r.label = label;
        r.split = leafscope::corpus::parse_split(split);
        r.rotation = rotation;
        if (deep_feature_id) r.deep_feature_id = deep_feature_id;
        for (const auto& existing : m->m.records)
            if (existing.image_path == r.image_path && existing.rotation == r.rotation)
                leafscope::raise(ErrorCode::InvalidArgument,
                                 "duplicate record " + r.image_path);
        m->m.records.push_back(std::move(r));
        m->m.rebuild_species();
    });
}

size_t ls_manifest_count(const ls_manifest* m) { return m ? m->m.records.size() : 0; }

ls_status ls_manifest_record(const ls_manifest* m, size_t index, ls_record_view* out) {
    if (!m || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    if (index >= m->m.records.size()) return fail(LS_ERR_INVALID_ARGUMENT, "record index out of range");
    const auto& r = m->m.records[index];
    out->image_path = r.image_path.c_str();
    out->label = r.label.c_str();
    out->split = leafscope::corpus::split_token(r.split);
    out->rotation = r.rotation;
    out->deep_feature_id = r.deep_feature_id.c_str();
    return LS_OK;
}

size_t ls_manifest_species_count(const ls_manifest* m) { return m ? m->m.species.size() : 0; }

const char* ls_manifest_species(const ls_manifest* m, size_t index) {
    if (!m || index >= m->m.species.size()) return nullptr;
    return m->m.species[index].c_str();
}

ls_status ls_manifest_augment(const ls_manifest* m, ls_manifest** out) {
    if (!m || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] { *out = new ls_manifest{leafscope::corpus::augment_rotations(m->m)}; });
}

ls_status ls_manifest_assign_split(const ls_manifest* m, const char* tiers_path, uint64_t seed,
                                   ls_manifest** out) {
    if (!m || !tiers_path || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] {
        auto tiers = leafscope::corpus::load_tiers(tiers_path);
        *out = new ls_manifest{leafscope::corpus::assign_split(m->m, tiers, seed)};
    });
}

ls_status ls_manifest_row_id(const ls_manifest* m, size_t index, char* buf, size_t bufsize) {
    if (!m) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    if (index >= m->m.records.size()) return fail(LS_ERR_INVALID_ARGUMENT, "record index out of range");
    return copy_to_buf(leafscope::corpus::record_row_id(m->m.records[index]), buf, bufsize);
}

ls_status ls_manifest_deep_key(const ls_manifest* m, size_t index, char* buf, size_t bufsize) {
    if (!m) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    if (index >= m->m.records.size()) return fail(LS_ERR_INVALID_ARGUMENT, "record index out of range");
    return copy_to_buf(leafscope::corpus::deep_feature_key(m->m.records[index]), buf, bufsize);
}

/* ---------------- model ---------------- */

ls_status ls_train(const double* samples, size_t n, size_t dim, const char* const* labels,
                   const ls_config* cfg, ls_train_log_fn log, void* user, ls_model** out) {
    if (!samples || !labels || !cfg || !out || n == 0 || dim == 0)
        return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] {
        std::vector<leafscope::learn::Sample> set(n);
        for (size_t i = 0; i < n; ++i) {
            set[i].features.assign(samples + i * dim, samples + (i + 1) * dim);
            set[i].label = labels[i];
        }
        leafscope::learn::TrainLogFn log_fn;
        if (log) {
            log_fn = [log, user](const std::string& cls, uint64_t epoch, double loss, double lr) {
                log(cls.c_str(), epoch, loss, lr, user);
            };
        }
        *out = new ls_model{leafscope::learn::train_ovr_svm(set, cfg->cfg.train, log_fn)};
    });
}

ls_status ls_model_save(const ls_model* model, const char* path) {
    if (!model || !path) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] { leafscope::learn::save_model(model->model, path); });
}

ls_status ls_model_load(const char* path, ls_model** out) {
    if (!path || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] { *out = new ls_model{leafscope::learn::load_model(path)}; });
}

void ls_model_free(ls_model* model) { delete model; }

size_t ls_model_feature_dim(const ls_model* model) { return model ? model->model.feature_dim : 0; }

size_t ls_model_class_count(const ls_model* model) {
    return model ? model->model.class_labels.size() : 0;
}

const char* ls_model_class_name(const ls_model* model, size_t index) {
    if (!model || index >= model->model.class_labels.size()) return nullptr;
    return model->model.class_labels[index].c_str();
}

ls_status ls_model_predict(const ls_model* model, const double* x, size_t dim, size_t k,
                           size_t* out_indices, double* out_scores, size_t* out_count) {
    if (!model || !x) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] {
        auto pred = leafscope::learn::predict_topk(model->model,
                                                   std::vector<double>(x, x + dim), k);
        for (size_t i = 0; i < pred.ranked.size(); ++i) {
            if (out_indices) {
                auto it = std::lower_bound(model->model.class_labels.begin(),
                                           model->model.class_labels.end(), pred.ranked[i].first);
                out_indices[i] =
                    static_cast<size_t>(it - model->model.class_labels.begin());
            }
            if (out_scores) out_scores[i] = pred.ranked[i].second;
        }
        if (out_count) *out_count = pred.ranked.size();
    });
}

ls_status ls_model_evaluate(const ls_model* model, const double* samples, size_t n, size_t dim,
                            const char* const* labels, ls_metrics* out, int64_t* confusion) {
    if (!model || !samples || !labels || !out) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] {
        std::vector<leafscope::learn::Sample> set(n);
        for (size_t i = 0; i < n; ++i) {
            set[i].features.assign(samples + i * dim, samples + (i + 1) * dim);
            set[i].label = labels[i];
        }
        auto metrics = leafscope::learn::evaluate(model->model, set);
        out->top1 = metrics.top1;
        out->top5 = metrics.top5;
        out->total = metrics.total;
        out->unseen = metrics.unseen_labels.size();
        if (confusion)
            std::memcpy(confusion, metrics.confusion.data(),
                        sizeof(int64_t) * metrics.confusion.size());
    });
}

/* ---------------- synthetic corpus ---------------- */

ls_status ls_synth_leaf(const ls_leaf_spec* spec, int size, uint64_t seed, ls_image** image_out,
                        ls_mask** mask_out) {
    if (!spec) return fail(LS_ERR_INVALID_ARGUMENT, kNullArg);
    return guarded([&] {
        leafscope::corpus::LeafSpec s;
        s.ellipse_ratio = spec->ellipse_ratio;
        s.lobe_count = spec->lobe_count;
        s.lobe_depth = spec->lobe_depth;
        s.serration_amplitude = spec->serration_amplitude;
        s.stem_length = spec->stem_length;
        s.stem_width = spec->stem_width;
        auto leaf = leafscope::corpus::synth_leaf(s, size, seed);
        if (image_out) *image_out = new ls_image{std::move(leaf.image)};
        if (mask_out) *mask_out = new ls_mask{std::move(leaf.ground_truth)};
    });
}

}  // extern "C"
