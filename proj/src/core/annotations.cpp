#include "core/annotations.hpp"

#include <sstream>

#include "core/mhd.hpp"

namespace vcnn {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& tok, int line_no) {
    size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        raise(ErrorCode::MalformedRow, "non-numeric field '" + tok + "' on line " + std::to_string(line_no));
    }
    if (pos != tok.size())
        raise(ErrorCode::MalformedRow, "non-numeric field '" + tok + "' on line " + std::to_string(line_no));
    return v;
}

}  // namespace

NoduleCategory categorize_diameter(double diameter_mm) {
    if (diameter_mm < 6.0) return NoduleCategory::SmallNodule;
    return NoduleCategory::LargeNodule;
}

std::vector<Annotation> parse_annotations(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    std::vector<Annotation> out;
    int line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = line;
        if (!stripped.empty() && stripped.back() == '\r') stripped.pop_back();
        if (stripped.empty()) continue;
        if (!saw_header) {
            if (stripped != "seriesuid,coordX,coordY,coordZ,diameter_mm")
                raise(ErrorCode::MalformedRow, "unexpected header row: " + stripped);
            saw_header = true;
            continue;
        }
        auto cols = split_csv(stripped);
        if (cols.size() != 5)
            raise(ErrorCode::MalformedRow,
                  "expected 5 columns, got " + std::to_string(cols.size()) + " on line " +
                      std::to_string(line_no));
        Annotation a;
        a.series_id = cols[0];
        for (int i = 0; i < 3; ++i) a.center_world[i] = parse_number(cols[1 + i], line_no);
        double d = parse_number(cols[4], line_no);
        if (d == -1.0) {
            a.category = NoduleCategory::NonNodule;
            a.diameter_mm = 0.0;
        } else if (d < 0.0) {
            raise(ErrorCode::MalformedRow, "negative diameter on line " + std::to_string(line_no));
        } else {
            a.diameter_mm = d;
            a.category = categorize_diameter(d);
        }
        out.push_back(std::move(a));
    }
    if (!saw_header) raise(ErrorCode::MalformedRow, "annotation file has no header row");
    return out;
}

std::vector<Annotation> read_annotations(const std::filesystem::path& path) {
    auto bytes = read_file_bytes(path);
    return parse_annotations(std::string(bytes.begin(), bytes.end()));
}

}  // namespace vcnn
