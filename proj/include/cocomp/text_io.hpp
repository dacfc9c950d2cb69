#pragma once

// Line-oriented dumps: one record per line, comma separated, '#' starts a comment.
//   profile   duration,state        (state 1 = idle, 0 = busy)
//   arrivals  time,bits
//   tunnel    time,floor,ceiling
//   schedule  time,cumulative,rate  (rate of the segment starting at time; 0 on the last line)

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cocomp/cpu_profile.hpp"
#include "cocomp/error.hpp"
#include "cocomp/string_pull.hpp"
#include "cocomp/tunnel.hpp"

namespace cocomp::io {

inline std::string num(double v, int digits = 17) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

namespace detail {

inline std::vector<std::vector<double>> read_records(std::istream& in, std::size_t width) {
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ConfigError("line " + std::to_string(lineno) + ": not a number: '" + cell + "'");
            }
        }
        if (row.size() != width)
            throw ConfigError("line " + std::to_string(lineno) + ": expected " + std::to_string(width) + " fields");
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace detail

inline std::vector<Epoch> read_epochs(std::istream& in) {
    std::vector<Epoch> out;
    for (const auto& r : detail::read_records(in, 2)) {
        if (r[1] != 0.0 && r[1] != 1.0) throw ConfigError("epoch state must be 0 (busy) or 1 (idle)");
        out.push_back({r[0], r[1] == 1.0 ? CpuState::Idle : CpuState::Busy});
    }
    return out;
}

inline void write_epochs(std::ostream& out, const CpuIdlingProfile& p) {
    out << "# duration,state\n";
    for (const Epoch& e : p.epochs()) out << num(e.duration) << ',' << (e.state == CpuState::Idle ? 1 : 0) << '\n';
}

inline std::vector<Arrival> read_arrivals(std::istream& in) {
    std::vector<Arrival> out;
    for (const auto& r : detail::read_records(in, 2)) out.push_back({r[0], r[1]});
    return out;
}

inline void write_arrivals(std::ostream& out, const ArrivalProcess& a) {
    out << "# time,bits\n";
    for (const Arrival& e : a.events()) out << num(e.time) << ',' << num(e.bits) << '\n';
}

inline void write_tunnel(std::ostream& out, const FeasibilityTunnel& t) {
    out << "# time,floor,ceiling\n";
    for (std::size_t k = 0; k < t.times.size(); ++k)
        out << num(t.times[k]) << ',' << num(t.floor[k]) << ',' << num(t.ceiling[k]) << '\n';
}

inline void write_schedule(std::ostream& out, const OffloadSchedule& s) {
    out << "# time,cumulative,rate\n";
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        const double r = k < s.segment_count() ? s.rate(k) : 0.0;
        out << num(s.times[k]) << ',' << num(s.cumulative[k]) << ',' << num(r) << '\n';
    }
}

}  // namespace cocomp::io
