#pragma once

// Transmission and local-computing energy models. Linear SI units only.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>

#include "cocomp/error.hpp"

namespace cocomp {

struct ChannelParams {
    double h_sq = 0.0;       // channel power gain
    double bandwidth = 0.0;  // Hz
    double noise = 0.0;      // W

    void validate() const {
        if (!(h_sq > 0.0) || !(bandwidth > 0.0) || !(noise > 0.0))
            throw ConfigError("channel gain, bandwidth and noise power must be positive");
    }
};

struct LocalComputeParams {
    double frequency = 0.0;       // cycles/s
    double cycles_per_bit = 0.0;
    double capacitance = 0.0;     // switched-capacitance constant gamma

    double energy_per_cycle() const { return capacitance * frequency * frequency; }
    double energy_per_bit() const { return cycles_per_bit * energy_per_cycle(); }
    double bit_rate() const { return frequency / cycles_per_bit; }

    void validate() const {
        if (!(frequency > 0.0) || !(cycles_per_bit > 0.0) || !(capacitance > 0.0))
            throw ConfigError("local CPU frequency, cycles per bit and capacitance must be positive");
    }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Power needed to sustain `rate` bits/s before the channel gain: N0 (2^{x/W} - 1).
inline double rate_to_power(double rate, const ChannelParams& ch) {
    if (rate < 0.0) throw ConfigError("transmission rate must be non-negative");
    return ch.noise * std::expm1(rate / ch.bandwidth * std::numbers::ln2);
}

/// Inverse of rate_to_power: W log2(1 + y / N0).
inline double power_to_rate(double power, const ChannelParams& ch) {
    return ch.bandwidth * std::log1p(power / ch.noise) / std::numbers::ln2;
}

/// Energy for sending `bits` at constant rate over `duration` seconds.
inline double epoch_energy(double bits, double duration, const ChannelParams& ch) {
    if (!(duration > 0.0)) throw ConfigError("epoch duration must be positive");
    if (bits < 0.0) throw ConfigError("offloaded bits must be non-negative");
    return duration / ch.h_sq * rate_to_power(bits / duration, ch);
}

inline double schedule_energy(std::span<const double> bits, std::span<const double> durations,
                              const ChannelParams& ch) {
    if (bits.size() != durations.size())
        throw ConfigError("schedule length does not match epoch count");
    double e = 0.0;
    for (std::size_t k = 0; k < bits.size(); ++k) e += epoch_energy(bits[k], durations[k], ch);
    return e;
}

inline double local_energy(double bits, const LocalComputeParams& lc) {
    return bits * lc.energy_per_bit();
}

/// Minimum offload l_min^+ = max(L - f T / C, 0) that lets local computing finish by T.
inline double min_offload(double load_bits, double deadline, const LocalComputeParams& lc) {
    return std::max(load_bits - lc.bit_rate() * std::max(deadline, 0.0), 0.0);
}

}  // namespace cocomp
