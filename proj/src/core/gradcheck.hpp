#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vcnn {

struct GradCheckEntry {
    std::string layer;
    double max_rel_error = 0.0;
    double threshold = 1e-5;
    bool passed = false;
};

// 64-bit central-difference verification (eps = 1e-3) of every layer kind's
// analytic gradients on small random instances. `corrupt_conv` is a test hook
// that perturbs the conv weight gradient so the negative control fails.
std::vector<GradCheckEntry> run_gradcheck(uint64_t seed, bool corrupt_conv = false);

bool gradcheck_passed(const std::vector<GradCheckEntry>& entries);

}  // namespace vcnn
