#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "deconvar/ar_process.hpp"
#include "deconvar/errors.hpp"

namespace deconvar {

/// Trajectory CSV layout: header "index,x,z", one row per observation,
/// doubles at full precision so files round-trip exactly.
inline void write_trajectory_csv(std::ostream& out, const TrajectoryPair& traj) {
    out << "index,x,z\n";
    char buf[80];
    for (std::size_t i = 0; i < traj.z.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i, traj.x[i], traj.z[i]);
        out << buf;
    }
}

struct TrajectoryData {
    std::vector<double> x;
    std::vector<double> z;
    bool has_x = false;
};

/// Reads a headered CSV with at least a z column; x is optional.
inline TrajectoryData read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("data file is empty");

    auto split = [](const std::string& s) {
        std::vector<std::string> fields;
        std::stringstream ss(s);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!s.empty() && s.back() == ',') fields.push_back("");
        return fields;
    };

    const auto header = split(line);
    long x_col = -1;
    long z_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "x") x_col = static_cast<long>(i);
        if (header[i] == "z") z_col = static_cast<long>(i);
    }
    if (z_col < 0) throw ConfigError("data file has no 'z' column");

    TrajectoryData data;
    data.has_x = x_col >= 0;
    long row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split(line);
        if (static_cast<long>(fields.size()) <= z_col ||
            (data.has_x && static_cast<long>(fields.size()) <= x_col))
            throw ConfigError("short row at line " + std::to_string(row));
        auto parse = [&](const std::string& s) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s, &used);
            } catch (const std::exception&) {
                throw ConfigError("bad number '" + s + "' at line " + std::to_string(row));
            }
            if (used != s.size())
                throw ConfigError("bad number '" + s + "' at line " + std::to_string(row));
            return v;
        };
        data.z.push_back(parse(fields[static_cast<std::size_t>(z_col)]));
        if (data.has_x) data.x.push_back(parse(fields[static_cast<std::size_t>(x_col)]));
    }
    if (data.z.empty()) throw ConfigError("data file has no rows");
    return data;
}

} // namespace deconvar
