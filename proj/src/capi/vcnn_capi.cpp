#include "vcnn/vcnn.h"

#include <cstring>
#include <iostream>
#include <string>

#include "core/checkpoint.hpp"
#include "core/inference.hpp"
#include "core/mhd.hpp"
#include "core/parallel.hpp"
#include "core/pipeline.hpp"
#include "core/resample.hpp"
#include "core/synthetic.hpp"

using namespace vcnn;

struct vcnn_volume {
    Volume impl;
};

struct vcnn_model {
    nn::Network<float> net;
    nn::OptimizerState<float> opt;
};

struct vcnn_prob_map {
    ProbabilityMap impl;
};

namespace {

thread_local std::string t_last_error;

vcnn_status set_error(ErrorCode code, const std::string& message) {
    t_last_error = message;
    return static_cast<vcnn_status>(static_cast<int>(code));
}

// Runs fn, translating the C++ error taxonomy onto status codes.
template <typename Fn>
vcnn_status guarded(Fn&& fn) {
    try {
        fn();
        return VCNN_OK;
    } catch (const Error& e) {
        return set_error(e.code(), e.what());
    } catch (const std::exception& e) {
        return set_error(ErrorCode::Internal, e.what());
    } catch (...) {
        return set_error(ErrorCode::Internal, "unknown error");
    }
}

void copy_path(char* dst, size_t cap, const std::filesystem::path& path) {
    std::string s = path.string();
    std::snprintf(dst, cap, "%s", s.c_str());
}

EngineConfig load_config_or_default(const char* config_path) {
    if (config_path == nullptr || *config_path == '\0') return EngineConfig{};
    return read_config(config_path);
}

}  // namespace

extern "C" {

const char* vcnn_status_name(vcnn_status status) {
    return error_code_name(static_cast<ErrorCode>(static_cast<int>(status)));
}

const char* vcnn_last_error(void) { return t_last_error.c_str(); }

void vcnn_set_threads(int n) { set_threads(n); }
int vcnn_threads(void) { return threads(); }

/* ------------------------------ volumes ------------------------------ */

vcnn_status vcnn_volume_read_mhd(const char* mhd_path, vcnn_volume** out) {
    if (!mhd_path || !out) return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] { *out = new vcnn_volume{read_volume(mhd_path)}; });
}

vcnn_status vcnn_volume_write_mhd(const vcnn_volume* v, const char* mhd_path) {
    if (!v || !mhd_path) return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] { write_volume(v->impl, mhd_path); });
}

void vcnn_volume_free(vcnn_volume* v) { delete v; }

void vcnn_volume_dims(const vcnn_volume* v, int64_t out[3]) {
    for (int i = 0; i < 3; ++i) out[i] = v->impl.meta.dims[i];
}

void vcnn_volume_spacing(const vcnn_volume* v, double out[3]) {
    for (int i = 0; i < 3; ++i) out[i] = v->impl.meta.spacing[i];
}

void vcnn_volume_origin(const vcnn_volume* v, double out[3]) {
    for (int i = 0; i < 3; ++i) out[i] = v->impl.meta.origin[i];
}

const float* vcnn_volume_data(const vcnn_volume* v, int64_t* count) {
    if (count) *count = static_cast<int64_t>(v->impl.voxels.size());
    return v->impl.voxels.data();
}

vcnn_status vcnn_volume_resample(const vcnn_volume* v, const double target_spacing[3],
                                 vcnn_volume** out) {
    if (!v || !target_spacing || !out) return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] {
        *out = new vcnn_volume{
            resample(v->impl, {target_spacing[0], target_spacing[1], target_spacing[2]})};
    });
}

vcnn_status vcnn_volume_normalize(const vcnn_volume* v, double hu_low, double hu_high,
                                  vcnn_volume** out) {
    if (!v || !out) return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] { *out = new vcnn_volume{normalize(v->impl, hu_low, hu_high)}; });
}

void vcnn_world_to_voxel(const vcnn_volume* v, const double world[3], double voxel[3]) {
    auto r = world_to_voxel(v->impl.meta, {world[0], world[1], world[2]});
    for (int i = 0; i < 3; ++i) voxel[i] = r[i];
}

void vcnn_voxel_to_world(const vcnn_volume* v, const double voxel[3], double world[3]) {
    auto r = voxel_to_world(v->impl.meta, {voxel[0], voxel[1], voxel[2]});
    for (int i = 0; i < 3; ++i) world[i] = r[i];
}

/* ------------------------------ models ------------------------------ */

vcnn_status vcnn_model_create(uint64_t seed, int small, int batchnorm, vcnn_model** out) {
    if (!out) return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] {
        auto spec = nn::NetworkSpec::canonical(small ? 4 : 1, batchnorm != 0);
        auto* m = new vcnn_model{nn::Network<float>(spec, seed), {}};
        m->opt = nn::OptimizerState<float>::for_params(m->net.parameter_tensors());
        *out = m;
    });
}

vcnn_status vcnn_model_load(const char* path, vcnn_model** out) {
    if (!path || !out) return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] {
        Checkpoint ckpt = load_checkpoint(path);
        *out = new vcnn_model{std::move(ckpt.net), std::move(ckpt.opt)};
    });
}

vcnn_status vcnn_model_save(const vcnn_model* model, const char* path) {
    if (!model || !path) return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] { save_checkpoint(model->net, model->opt, path); });
}

void vcnn_model_free(vcnn_model* model) { delete model; }

int64_t vcnn_model_param_count(const vcnn_model* model) { return model->net.param_count(); }

int64_t vcnn_model_input_edge(const vcnn_model* model) { return model->net.spec().input_edge; }

int32_t vcnn_model_layer_count(const vcnn_model* model) {
    return static_cast<int32_t>(model->net.layer_table().size());
}

vcnn_status vcnn_model_layer_info(const vcnn_model* model, int32_t index, vcnn_layer_info* out) {
    if (!model || !out) return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] {
        auto table = model->net.layer_table();
        if (index < 0 || index >= static_cast<int32_t>(table.size()))
            raise(ErrorCode::InvalidArgument, "layer index out of range");
        const auto& row = table[static_cast<size_t>(index)];
        std::snprintf(out->name, sizeof(out->name), "%s", row.name.c_str());
        std::snprintf(out->type, sizeof(out->type), "%s", row.type.c_str());
        out->out_rank = static_cast<int32_t>(row.out_shape.size());
        for (int i = 0; i < 4; ++i)
            out->out_shape[i] = i < out->out_rank ? row.out_shape[static_cast<size_t>(i)] : 0;
        out->param_count = row.param_count;
    });
}

vcnn_status vcnn_model_predict_cube(const vcnn_model* model, const float* cube, int64_t edge,
                                    float* probability) {
    if (!model || !cube || !probability) return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] {
        if (edge != model->net.spec().input_edge)
            raise(ErrorCode::ShapeMismatch, "cube edge does not match the model input");
        Tensor x({1, edge, edge, edge, 1});
        std::memcpy(x.data(), cube, static_cast<size_t>(x.size()) * sizeof(float));
        Tensor p = model->net.predict(x);
        *probability = p[0];
    });
}

/* --------------------------- probability maps --------------------------- */

vcnn_status vcnn_model_predict_map(const vcnn_model* model, const vcnn_volume* v, int64_t stride,
                                   vcnn_prob_map** out) {
    if (!model || !v || !out) return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] {
        *out = new vcnn_prob_map{sliding_window_predict(v->impl, model->net, stride)};
    });
}

void vcnn_map_free(vcnn_prob_map* map) { delete map; }

void vcnn_map_grid(const vcnn_prob_map* map, int64_t out[3]) {
    for (int i = 0; i < 3; ++i) out[i] = map->impl.grid[i];
}

float vcnn_map_value(const vcnn_prob_map* map, int64_t ix, int64_t iy, int64_t iz) {
    return map->impl.at(ix, iy, iz);
}

/* --------------------------- pipeline commands --------------------------- */

vcnn_status vcnn_preprocess_run(const char* scans_dir, const char* annotations_csv,
                                const char* out_dir, const char* config_path, int64_t seed,
                                vcnn_preprocess_report* report) {
    if (!scans_dir || !annotations_csv || !out_dir)
        return set_error(ErrorCode::InvalidArgument, "null argument");
    vcnn_status status = guarded([&] {
        EngineConfig cfg = load_config_or_default(config_path);
        if (seed >= 0) cfg.sampler.seed = static_cast<uint64_t>(seed);
        PreprocessReport r = run_preprocess(scans_dir, annotations_csv, out_dir, cfg, std::cout);
        if (report) {
            report->scans_total = r.scans_total;
            report->scans_ok = r.scans_ok;
            report->scans_failed = r.scans_failed;
            report->positive_cubes = r.positives;
            report->negative_cubes = r.negatives;
        }
        if (r.scans_failed > 0)
            raise(ErrorCode::Io, std::to_string(r.scans_failed) + " scan(s) failed preprocessing");
    });
    return status;
}

vcnn_status vcnn_train_run(const char* data_dir, const char* out_dir,
                           const vcnn_train_options* options, vcnn_train_report* report) {
    if (!data_dir || !out_dir) return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] {
        TrainOptions opts;
        if (options) {
            opts.config = load_config_or_default(options->config_path);
            if (options->epochs >= 0) opts.config.train.epochs = options->epochs;
            if (options->seed >= 0) {
                opts.config.train.seed = static_cast<uint64_t>(options->seed);
                opts.config.sampler.seed = opts.config.train.seed;
            }
            opts.small = options->small != 0;
            if (options->no_timing) opts.config.train.log_wall_time = false;
        }
        TrainReport r = run_train(data_dir, out_dir, opts, std::cout);
        if (report) {
            report->epochs_run = r.epochs_run;
            report->final_val_loss = r.final_val_loss;
            report->final_val_acc = r.final_val_acc;
            report->best_val_loss = r.best_val_loss;
            copy_path(report->checkpoint_path, sizeof(report->checkpoint_path), r.checkpoint_path);
            copy_path(report->metrics_path, sizeof(report->metrics_path), r.metrics_path);
        }
    });
}

vcnn_status vcnn_evaluate_run(const char* data_dir, const char* checkpoint_path, const char* split,
                              const char* config_path, int64_t seed, double* loss, double* accuracy) {
    if (!data_dir || !checkpoint_path || !split)
        return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] {
        EngineConfig cfg = load_config_or_default(config_path);
        if (seed >= 0) {
            cfg.train.seed = static_cast<uint64_t>(seed);
            cfg.sampler.seed = cfg.train.seed;
        }
        EvaluateReport r = run_evaluate(data_dir, checkpoint_path, split, cfg, std::cout);
        if (loss) *loss = r.loss;
        if (accuracy) *accuracy = r.accuracy;
    });
}

vcnn_status vcnn_predict_run(const char* scan_path, const char* checkpoint_path, int64_t stride,
                             double threshold, const char* out_dir, const char* config_path,
                             vcnn_predict_report* report) {
    if (!scan_path || !checkpoint_path || !out_dir)
        return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] {
        EngineConfig cfg = load_config_or_default(config_path);
        PredictReport r = run_predict(scan_path, checkpoint_path, stride, threshold, out_dir, cfg,
                                      std::cout);
        if (report) {
            for (int i = 0; i < 3; ++i) report->grid[i] = r.grid[i];
            report->windows = r.windows;
            report->detections = r.detections;
            copy_path(report->detections_path, sizeof(report->detections_path), r.detections_path);
        }
    });
}

vcnn_status vcnn_gradcheck_run(uint64_t seed, int corrupt_conv) {
    return guarded([&] {
        auto entries = run_gradcheck_cmd(seed, corrupt_conv != 0, std::cout);
        if (!gradcheck_passed(entries))
            raise(ErrorCode::Internal, "gradient verification failed");
    });
}

vcnn_status vcnn_inspect_run(const char* checkpoint_path, int csv) {
    if (!checkpoint_path) return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] { run_inspect(checkpoint_path, csv != 0, std::cout); });
}

/* ------------------------------ synthetic ------------------------------ */

vcnn_status vcnn_synth_dataset(const char* out_dir, int32_t n_train, int32_t n_val, int64_t edge,
                               uint64_t seed) {
    if (!out_dir) return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] { synth_dataset(out_dir, n_train, n_val, edge, seed); });
}

vcnn_status vcnn_synth_volume(const char* mhd_path, int64_t dim, uint64_t seed,
                              double sphere_center_world[3], double* sphere_diameter_mm) {
    if (!mhd_path) return set_error(ErrorCode::InvalidArgument, "null argument");
    return guarded([&] {
        SynthVolumeReport r = synth_volume(mhd_path, dim, seed);
        if (sphere_center_world)
            for (int i = 0; i < 3; ++i) sphere_center_world[i] = r.sphere_center_world[i];
        if (sphere_diameter_mm) *sphere_diameter_mm = r.sphere_diameter_mm;
    });
}

} /* extern "C" */
