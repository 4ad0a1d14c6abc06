#include "core/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>

#include "core/annotations.hpp"
#include "core/checkpoint.hpp"
#include "core/inference.hpp"
#include "core/mhd.hpp"
#include "core/resample.hpp"
#include "core/trainer.hpp"

namespace vcnn {

namespace {

std::string shape_string(const std::vector<int64_t>& shape) {
    std::string s = "(None";
    for (int64_t d : shape) s += ", " + std::to_string(d);
    s += ")";
    return s;
}

std::string shape_compact(const std::vector<int64_t>& shape) {
    std::string s;
    for (size_t i = 0; i < shape.size(); ++i) {
        s += std::to_string(shape[i]);
        if (i + 1 < shape.size()) s += "x";
    }
    return s;
}

}  // namespace

std::string format_thousands(int64_t value) {
    std::string digits = std::to_string(value);
    std::string out;
    int count = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (count && count % 3 == 0) out += ',';
        out += *it;
        ++count;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

PreprocessReport run_preprocess(const std::filesystem::path& scans_dir,
                                const std::filesystem::path& annotations_path,
                                const std::filesystem::path& out_dir, const EngineConfig& config,
                                std::ostream& log) {
    config.sampler.validate();

    std::vector<std::filesystem::path> scan_paths;
    if (std::filesystem::is_directory(scans_dir))
        for (const auto& entry : std::filesystem::directory_iterator(scans_dir))
            if (entry.path().extension() == ".mhd") scan_paths.push_back(entry.path());
    std::sort(scan_paths.begin(), scan_paths.end());
    if (scan_paths.empty()) raise(ErrorCode::Io, "no scans found in " + scans_dir.string());

    auto annotations = read_annotations(annotations_path);
    std::map<std::string, std::vector<Annotation>> by_series;
    for (const auto& a : annotations) by_series[a.series_id].push_back(a);

    std::filesystem::create_directories(out_dir);

    PreprocessReport report;
    report.scans_total = static_cast<int>(scan_paths.size());
    std::vector<ManifestEntry> manifest;

    const int64_t edge = config.sampler.cube_edge;
    for (const auto& path : scan_paths) {
        const std::string series = path.stem().string();
        try {
            Volume raw = read_volume(path);
            Volume vol = normalize(resample(raw, config.sampler.target_spacing), config.sampler.hu_low,
                                   config.sampler.hu_high);

            // Per-series stream: reruns and scan-set changes stay reproducible.
            Rng rng = substream(config.sampler.seed, "sampler", fnv1a(series));

            const auto& series_annotations = by_series[series];
            std::vector<Annotation> malignant;
            for (const auto& a : series_annotations)
                if (a.category == NoduleCategory::LargeNodule) malignant.push_back(a);

            std::vector<CubeSample> cubes;
            for (const auto& a : malignant)
                for (int i = 0; i < config.sampler.positives_per_nodule; ++i)
                    cubes.push_back(extract_positive_cube(vol, a, edge, rng));
            for (int i = 0; i < config.sampler.negatives_per_scan; ++i)
                cubes.push_back(extract_negative_cube(vol, malignant, edge, rng));

            int64_t pos = 0, neg = 0;
            for (size_t i = 0; i < cubes.size(); ++i) {
                char name[256];
                std::snprintf(name, sizeof(name), "%s_%04zu.npy", series.c_str(), i);
                save_cube(cubes[i], out_dir / name);
                ManifestEntry e;
                e.path = name;
                e.label = cubes[i].label;
                e.series = series;
                e.corner = cubes[i].corner_voxel;
                manifest.push_back(std::move(e));
                (cubes[i].label ? pos : neg) += 1;
            }
            report.positives += pos;
            report.negatives += neg;
            ++report.scans_ok;
            log << series << ": " << pos << " positive, " << neg << " negative cubes\n";
        } catch (const Error& e) {
            ++report.scans_failed;
            report.errors.emplace_back(path.filename().string(),
                                       std::string(error_code_name(e.code())) + ": " + e.what());
        }
    }

    write_manifest(out_dir / "manifest.csv", manifest);
    log << "cache: " << manifest.size() << " cubes from " << report.scans_ok << "/"
        << report.scans_total << " scans\n";
    for (const auto& [file, message] : report.errors)
        log << "ERROR " << file << ": " << message << "\n";
    return report;
}

TrainReport run_train(const std::filesystem::path& data_dir, const std::filesystem::path& out_dir,
                      const TrainOptions& options, std::ostream& log) {
    const auto& cfg = options.config;
    cfg.train.validate();

    CubeSet set = load_cube_set(data_dir, cfg.sampler.cube_edge);
    SplitIndices split = split_by_series(set, cfg.train.splits, cfg.train.seed);
    log << "dataset: " << set.samples.size() << " cubes (train " << split.train.size() << ", val "
        << split.val.size() << ", test " << split.test.size() << ")\n";

    auto spec = nn::NetworkSpec::canonical(options.small ? 4 : 1, cfg.train.batchnorm);
    if (spec.input_edge != cfg.sampler.cube_edge)
        raise(ErrorCode::ShapeIncompatible, "network expects " + std::to_string(spec.input_edge) +
                                                "-voxel cubes, cache has " +
                                                std::to_string(cfg.sampler.cube_edge));
    nn::Network<float> net(spec, cfg.train.seed);
    log << "network: " << format_thousands(net.param_count()) << " trainable parameters"
        << (options.small ? " (small variant)" : "") << "\n";

    FitResult fit_result = fit(net, set, split, cfg.train, out_dir);

    TrainReport report;
    report.epochs_run = static_cast<int>(fit_result.history.size());
    report.checkpoint_path = fit_result.checkpoint_path;
    report.metrics_path = out_dir / cfg.train.metrics_path;
    report.best_val_loss = fit_result.best_val_loss;
    for (const auto& m : fit_result.history) {
        log << "epoch " << m.epoch << ": train_loss " << m.train_loss << " train_acc " << m.train_acc
            << " val_loss " << m.val_loss << " val_acc " << m.val_acc << "\n";
        report.final_val_loss = m.val_loss;
        report.final_val_acc = m.val_acc;
        if (m.val_loss == fit_result.best_val_loss) report.best_val_acc = m.val_acc;
    }
    log << "final: val_loss " << report.final_val_loss << " val_acc " << report.final_val_acc << "\n";
    log << "checkpoint: " << report.checkpoint_path.string() << "\n";
    return report;
}

EvaluateReport run_evaluate(const std::filesystem::path& data_dir,
                            const std::filesystem::path& checkpoint_path, const std::string& split,
                            const EngineConfig& config, std::ostream& log) {
    CubeSet set = load_cube_set(data_dir, config.sampler.cube_edge);
    SplitIndices indices = split_by_series(set, config.train.splits, config.train.seed);

    const std::vector<int64_t>* chosen = nullptr;
    if (split == "train") chosen = &indices.train;
    else if (split == "val") chosen = &indices.val;
    else if (split == "test") chosen = &indices.test;
    else raise(ErrorCode::InvalidArgument, "split must be train, val or test");

    Checkpoint ckpt = load_checkpoint(checkpoint_path);
    EvalResult result = evaluate(ckpt.net, set, *chosen, config.train.batch_size);

    EvaluateReport report{result.loss, result.accuracy, static_cast<int64_t>(chosen->size())};
    log << split << ": loss " << report.loss << " accuracy " << report.accuracy << " (" << report.samples
        << " cubes)\n";
    return report;
}

PredictReport run_predict(const std::filesystem::path& scan_path,
                          const std::filesystem::path& checkpoint_path, int64_t stride,
                          double threshold, const std::filesystem::path& out_dir,
                          const EngineConfig& config, std::ostream& log) {
    Checkpoint ckpt = load_checkpoint(checkpoint_path);

    Volume raw = read_volume(scan_path);
    Volume vol = normalize(resample(raw, config.sampler.target_spacing), config.sampler.hu_low,
                           config.sampler.hu_high);

    ProbabilityMap map = sliding_window_predict(vol, ckpt.net, stride);
    DetectionMask mask = denoise(threshold_map(map, threshold));
    auto detections = mask_to_world(mask, map);

    std::filesystem::create_directories(out_dir);
    const std::string stem = scan_path.stem().string();
    write_map_csv(map, out_dir / (stem + "_map.csv"));
    write_map_raw(map, out_dir / (stem + "_map.raw"), out_dir / (stem + "_map.txt"));
    write_detections_csv(detections, out_dir / (stem + "_detections.csv"));
    Projection proj = project_2d(map, 2);
    write_projection_pgm(proj, out_dir / (stem + "_projection.pgm"));
    write_projection_csv(proj, out_dir / (stem + "_projection.csv"));

    PredictReport report;
    report.grid = map.grid;
    report.windows = static_cast<int64_t>(map.probs.size());
    report.detections = static_cast<int64_t>(detections.size());
    report.detections_path = out_dir / (stem + "_detections.csv");
    log << "grid " << map.grid[0] << "x" << map.grid[1] << "x" << map.grid[2] << " (" << report.windows
        << " windows), " << report.detections << " detections at threshold " << threshold << "\n";
    return report;
}

std::vector<GradCheckEntry> run_gradcheck_cmd(uint64_t seed, bool corrupt_conv, std::ostream& log) {
    auto entries = run_gradcheck(seed, corrupt_conv);
    char buf[160];
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof(buf), "%-12s max_rel_err %.3e  (threshold %.0e)  %s\n",
                      e.layer.c_str(), e.max_rel_error, e.threshold, e.passed ? "ok" : "FAIL");
        log << buf;
    }
    log << (gradcheck_passed(entries) ? "gradcheck passed\n" : "gradcheck FAILED\n");
    return entries;
}

void run_inspect(const std::filesystem::path& checkpoint_path, bool csv, std::ostream& log) {
    Checkpoint ckpt = load_checkpoint(checkpoint_path);
    auto table = ckpt.net.layer_table();
    int64_t total = ckpt.net.param_count();

    if (csv) {
        log << "name,type,out_shape,params\n";
        for (const auto& row : table)
            log << row.name << "," << row.type << "," << shape_compact(row.out_shape) << ","
                << row.param_count << "\n";
        log << "total,,," << total << "\n";
        return;
    }

    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-28s %-26s %s\n", "Layer (type)", "Output Shape", "Param #");
    log << buf;
    log << std::string(62, '=') << "\n";
    for (const auto& row : table) {
        std::string name = row.name + " (" + row.type + ")";
        std::snprintf(buf, sizeof(buf), "%-28s %-26s %lld\n", name.c_str(),
                      shape_string(row.out_shape).c_str(), static_cast<long long>(row.param_count));
        log << buf;
    }
    log << std::string(62, '=') << "\n";
    log << "Total trainable parameters: " << format_thousands(total) << "\n";
}

}  // namespace vcnn
