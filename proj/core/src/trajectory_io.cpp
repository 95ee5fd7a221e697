#include "lugre/trajectory_io.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lugre {

namespace {

std::array<std::vector<double> Trajectory::*, 18> columns() {
    return {&Trajectory::t,     &Trajectory::theta,        &Trajectory::w,
            &Trajectory::z,     &Trajectory::z_hat,        &Trajectory::w_hat,
            &Trajectory::F,     &Trajectory::F_hat,        &Trajectory::u,
            &Trajectory::v,     &Trajectory::e_z,          &Trajectory::e_w,
            &Trajectory::e_f,   &Trajectory::ref_raw,      &Trajectory::ref_filtered,
            &Trajectory::track_err, &Trajectory::V,        &Trajectory::V_dot};
}

void append_number(std::string& out, double v) {
    if (std::isnan(v)) return;  // empty cell
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << kTrajectoryCsvHeader << '\n';
    const auto cols = columns();
    std::string line;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        line.clear();
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) line += ',';
            append_number(line, (traj.*cols[c])[i]);
        }
        line += '\n';
        os << line;
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty trajectory file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrajectoryCsvHeader)
        throw std::runtime_error("unexpected trajectory CSV header: " + line);

    Trajectory traj;
    const auto cols = columns();
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t start = 0;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const std::size_t comma = c + 1 < cols.size() ? line.find(',', start) : line.size();
            if (comma == std::string::npos)
                throw std::runtime_error("short CSV row: " + line);
            const std::string cell = line.substr(start, comma - start);
            double v = std::numeric_limits<double>::quiet_NaN();
            if (!cell.empty()) v = std::stod(cell);
            (traj.*cols[c]).push_back(v);
            start = comma + 1;
        }
    }
    return traj;
}

}  // namespace lugre
