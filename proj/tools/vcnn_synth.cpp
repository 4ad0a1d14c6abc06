// Synthetic data generator: labeled sphere/no-sphere cubes for training, or a
// full HU-encoded scan with one embedded sphere for end-to-end inference runs.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "vcnn/vcnn.h"

int main(int argc, char** argv) {
    CLI::App app{"vcnn-synth - synthetic CT data generator"};
    app.require_subcommand(1);

    auto* dataset = app.add_subcommand("dataset", "labeled training cubes + manifest");
    std::string out_dir;
    int n_train = 200, n_val = 50;
    long long edge = 48, seed = 2025;
    dataset->add_option("--out", out_dir, "output directory")->required();
    dataset->add_option("--train", n_train, "training cube count");
    dataset->add_option("--val", n_val, "validation cube count");
    dataset->add_option("--edge", edge, "cube edge in voxels");
    dataset->add_option("--seed", seed, "generator seed");

    auto* volume = app.add_subcommand("volume", "one full scan with an embedded sphere");
    std::string mhd_path;
    long long dim = 96, vseed = 2025;
    volume->add_option("--out", mhd_path, "output .mhd path")->required();
    volume->add_option("--dim", dim, "volume edge in voxels");
    volume->add_option("--seed", vseed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 1;
    }

    if (dataset->parsed()) {
        vcnn_status status = vcnn_synth_dataset(out_dir.c_str(), n_train, n_val, edge,
                                                static_cast<uint64_t>(seed));
        if (status != VCNN_OK) {
            std::fprintf(stderr, "error: %s: %s\n", vcnn_status_name(status), vcnn_last_error());
            return 2;
        }
        std::printf("wrote %d cubes to %s\n", n_train + n_val, out_dir.c_str());
        return 0;
    }

    double center[3] = {0, 0, 0};
    double diameter = 0;
    vcnn_status status =
        vcnn_synth_volume(mhd_path.c_str(), dim, static_cast<uint64_t>(vseed), center, &diameter);
    if (status != VCNN_OK) {
        std::fprintf(stderr, "error: %s: %s\n", vcnn_status_name(status), vcnn_last_error());
        return 2;
    }
    std::printf("wrote %s (sphere at %.3f %.3f %.3f mm, diameter %.3f mm)\n", mhd_path.c_str(),
                center[0], center[1], center[2], diameter);
    return 0;
}
