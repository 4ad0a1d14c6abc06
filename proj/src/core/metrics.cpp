#include "core/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/mhd.hpp"

namespace vcnn {

namespace {
constexpr const char* kHeader = "epoch,train_loss,train_acc,val_loss,val_acc,wall_seconds";
}

void log_metrics(const EpochMetrics& m, const std::filesystem::path& path) {
    bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) raise(ErrorCode::Io, "cannot open metrics file " + path.string());
    if (fresh) out << kHeader << "\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g,%.12g\n", m.epoch, m.train_loss,
                  m.train_acc, m.val_loss, m.val_acc, m.wall_seconds);
    out << buf;
    if (!out) raise(ErrorCode::Io, "write failed for metrics file " + path.string());
}

std::vector<EpochMetrics> read_metrics(const std::filesystem::path& path) {
    auto bytes = read_file_bytes(path);
    std::istringstream in(std::string(bytes.begin(), bytes.end()));
    std::string line;
    std::vector<EpochMetrics> out;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != kHeader) raise(ErrorCode::MalformedRow, "unexpected metrics header: " + line);
            saw_header = true;
            continue;
        }
        EpochMetrics m;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%lf", &m.epoch, &m.train_loss, &m.train_acc,
                        &m.val_loss, &m.val_acc, &m.wall_seconds) != 6)
            raise(ErrorCode::MalformedRow, "bad metrics row: " + line);
        out.push_back(m);
    }
    if (!saw_header) raise(ErrorCode::MalformedRow, "metrics file has no header");
    return out;
}

}  // namespace vcnn
