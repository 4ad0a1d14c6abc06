// Command-line front end; all work happens behind the C API of libvcnn.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "vcnn/vcnn.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitVerification = 3;

int report_failure(vcnn_status status) {
    std::fprintf(stderr, "error: %s: %s\n", vcnn_status_name(status), vcnn_last_error());
    return status == VCNN_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vcnn - volumetric CNN engine for CT nodule screening"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads,
                   "worker cap (0 = all cores); results are identical for every value");

    // preprocess
    auto* preprocess = app.add_subcommand("preprocess", "extract labeled cubes from CT scans");
    std::string scans_dir, annotations, out_dir, config_path;
    long long seed = -1;
    preprocess->add_option("--scans", scans_dir, "directory of .mhd/.raw scans")->required();
    preprocess->add_option("--annotations", annotations, "annotation CSV")->required();
    preprocess->add_option("--out", out_dir, "cube cache directory")->required();
    preprocess->add_option("--config", config_path, "config file");
    preprocess->add_option("--seed", seed, "override the config seed");

    // train
    auto* train = app.add_subcommand("train", "train the screening network on a cube cache");
    std::string train_data, train_out, train_config;
    long long train_seed = -1;
    int epochs = -1;
    bool small = false, no_timing = false;
    train->add_option("--data", train_data, "cube cache directory")->required();
    train->add_option("--out", train_out, "output directory")->required();
    train->add_option("--config", train_config, "config file");
    train->add_option("--epochs", epochs, "override the config epoch count");
    train->add_option("--seed", train_seed, "override the config seed");
    train->add_flag("--small", small, "width-1/4 network variant");
    train->add_flag("--no-timing", no_timing, "write 0 in the wall_seconds metrics column");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on a dataset split");
    std::string eval_data, eval_ckpt, eval_split = "test", eval_config;
    long long eval_seed = -1;
    evaluate->add_option("--data", eval_data, "cube cache directory")->required();
    evaluate->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
    evaluate->add_option("--split", eval_split, "train / val / test");
    evaluate->add_option("--config", eval_config, "config file");
    evaluate->add_option("--seed", eval_seed, "override the config seed");

    // predict
    auto* predict = app.add_subcommand("predict", "sliding-window inference over one scan");
    std::string scan_path, pred_ckpt, pred_out, pred_config;
    long long stride = 24;
    double threshold = 0.9;
    predict->add_option("--scan", scan_path, "input .mhd scan")->required();
    predict->add_option("--checkpoint", pred_ckpt, "checkpoint file")->required();
    predict->add_option("--out", pred_out, "output directory")->required();
    predict->add_option("--stride", stride, "window stride in voxels");
    predict->add_option("--threshold", threshold, "detection threshold in (0,1)");
    predict->add_option("--config", pred_config, "config file");

    // gradcheck
    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient verification");
    long long gc_seed = 2025;
    bool corrupt = false;
    gradcheck->add_option("--seed", gc_seed, "verification seed");
    gradcheck->add_flag("--corrupt", corrupt, "negative control: corrupt the conv gradient");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "print the layer table of a checkpoint");
    std::string inspect_ckpt;
    bool csv = false;
    inspect->add_option("--checkpoint", inspect_ckpt, "checkpoint file")->required();
    inspect->add_flag("--csv", csv, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    if (threads > 0) vcnn_set_threads(threads);

    if (preprocess->parsed()) {
        vcnn_preprocess_report report;
        vcnn_status status =
            vcnn_preprocess_run(scans_dir.c_str(), annotations.c_str(), out_dir.c_str(),
                                config_path.empty() ? nullptr : config_path.c_str(), seed, &report);
        if (status != VCNN_OK) return report_failure(status);
        return kExitOk;
    }

    if (train->parsed()) {
        vcnn_train_options options{};
        options.config_path = train_config.empty() ? nullptr : train_config.c_str();
        options.epochs = epochs;
        options.seed = train_seed;
        options.small = small ? 1 : 0;
        options.no_timing = no_timing ? 1 : 0;
        vcnn_train_report report;
        vcnn_status status = vcnn_train_run(train_data.c_str(), train_out.c_str(), &options, &report);
        if (status != VCNN_OK) return report_failure(status);
        return kExitOk;
    }

    if (evaluate->parsed()) {
        double loss = 0, accuracy = 0;
        vcnn_status status = vcnn_evaluate_run(eval_data.c_str(), eval_ckpt.c_str(),
                                               eval_split.c_str(),
                                               eval_config.empty() ? nullptr : eval_config.c_str(),
                                               eval_seed, &loss, &accuracy);
        if (status != VCNN_OK) return report_failure(status);
        return kExitOk;
    }

    if (predict->parsed()) {
        vcnn_predict_report report;
        vcnn_status status = vcnn_predict_run(scan_path.c_str(), pred_ckpt.c_str(), stride, threshold,
                                              pred_out.c_str(),
                                              pred_config.empty() ? nullptr : pred_config.c_str(),
                                              &report);
        if (status != VCNN_OK) return report_failure(status);
        return kExitOk;
    }

    if (gradcheck->parsed()) {
        vcnn_status status = vcnn_gradcheck_run(static_cast<uint64_t>(gc_seed), corrupt ? 1 : 0);
        if (status == VCNN_OK) return kExitOk;
        if (status == VCNN_ERR_INTERNAL) {
            std::fprintf(stderr, "error: %s\n", vcnn_last_error());
            return kExitVerification;
        }
        return report_failure(status);
    }

    if (inspect->parsed()) {
        vcnn_status status = vcnn_inspect_run(inspect_ckpt.c_str(), csv ? 1 : 0);
        if (status != VCNN_OK) return report_failure(status);
        return kExitOk;
    }

    return kExitUsage;
}
