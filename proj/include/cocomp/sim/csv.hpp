#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "cocomp/sim/experiments.hpp"

namespace cocomp::sim {

/// Fixed 12-significant-digit formatting; NaN is written as an empty field.
inline std::string csv_number(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write_csv(std::ostream& out, const SweepResult& r) {
    if (r.rows.empty()) return;
    for (const auto& [name, value] : r.rows.front().grid) out << name << ',';
    out << "policy,trials,feasible,probability,probability_lo,probability_hi,"
           "energy_mean,energy_se,local_energy_mean,transmit_energy_mean,offload_bits_mean,replay_failures\n";
    for (const ResultRow& row : r.rows) {
        for (const auto& kv : row.grid) out << csv_number(kv.second) << ',';
        out << to_string(row.policy) << ',' << row.trials << ',' << row.feasible << ','
            << csv_number(row.probability()) << ',' << csv_number(row.probability_ci.lower) << ','
            << csv_number(row.probability_ci.upper) << ',' << csv_number(row.energy.mean) << ','
            << csv_number(row.energy.std_error) << ',' << csv_number(row.local_energy.mean) << ','
            << csv_number(row.transmit_energy.mean) << ',' << csv_number(row.offload_bits.mean) << ','
            << row.replay_failures << '\n';
    }
}

}  // namespace cocomp::sim
