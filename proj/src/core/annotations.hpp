#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core/volume.hpp"

namespace vcnn {

// Category is a total function of diameter: -1 sentinel marks non-nodules
// (stored diameter 0), < 6 mm small, >= 6 mm large.
NoduleCategory categorize_diameter(double diameter_mm);

// CSV with header `seriesuid,coordX,coordY,coordZ,diameter_mm`.
std::vector<Annotation> parse_annotations(const std::string& csv_text);

std::vector<Annotation> read_annotations(const std::filesystem::path& path);

}  // namespace vcnn
