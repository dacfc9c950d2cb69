#pragma once

// Helper-CPU state process, CPU-idling profile and bursty data arrivals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cocomp/error.hpp"
#include "cocomp/tolerance.hpp"

namespace cocomp {

enum class CpuState : std::uint8_t { Busy = 0, Idle = 1 };

inline const char* to_string(CpuState s) { return s == CpuState::Idle ? "idle" : "busy"; }

struct Epoch {
    double duration = 0.0;  // seconds
    CpuState state = CpuState::Busy;

    bool operator==(const Epoch&) const = default;
};

/// Helper CPU-idling profile over [0, T].
///
/// Epochs are maximal constant-state intervals: adjacent epochs with the
/// same state are merged on construction. Cumulative computable bits are
/// kept at every epoch boundary; between boundaries the curve rises with
/// slope f_h / C inside idle epochs and stays flat inside busy ones.
class CpuIdlingProfile {
public:
    const std::vector<Epoch>& epochs() const { return epochs_; }
    std::size_t epoch_count() const { return epochs_.size(); }

    double horizon() const { return boundaries_.back(); }
    double helper_frequency() const { return helper_frequency_; }
    double cycles_per_bit() const { return cycles_per_bit_; }
    /// Bits per second the helper computes while idle.
    double idle_rate() const { return helper_frequency_ / cycles_per_bit_; }

    /// Boundary instants s_0 = 0 < s_1 < ... < s_K~ = T.
    const std::vector<double>& boundaries() const { return boundaries_; }
    /// Cumulative computable bits at each boundary; index 0 is the origin.
    const std::vector<double>& cumulative_bits() const { return cumulative_; }

    bool has_capacity() const { return last_idle_.has_value(); }

    /// One-based index K of the last idle epoch, if any.
    std::optional<std::size_t> last_idle_epoch() const {
        if (!last_idle_) return std::nullopt;
        return *last_idle_ + 1;
    }

    /// End of the last idle epoch (T_end); empty for an all-busy profile.
    std::optional<double> t_end() const {
        if (!last_idle_) return std::nullopt;
        return boundaries_[*last_idle_ + 1];
    }

    /// Total computable bits.
    double capacity() const { return cumulative_.back(); }

    double u_bit_at(double t) const {
        if (t < -tol::kTime || t > horizon() + tol::kTime)
            throw ConfigError("u_bit_at: time " + std::to_string(t) + " outside [0, T]");
        t = std::clamp(t, 0.0, horizon());
        // Last boundary not after t.
        auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), t);
        std::size_t k = static_cast<std::size_t>(it - boundaries_.begin()) - 1;
        if (k >= epochs_.size()) return cumulative_.back();
        double base = cumulative_[k];
        if (epochs_[k].state == CpuState::Idle) base += (t - boundaries_[k]) * idle_rate();
        return base;
    }

    CpuState state_at(double t) const {
        auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), t);
        std::size_t k = static_cast<std::size_t>(it - boundaries_.begin());
        k = std::clamp<std::size_t>(k, 1, epochs_.size()) - 1;
        return epochs_[k].state;
    }

    friend CpuIdlingProfile build_profile(std::span<const Epoch>, double, double, double);

private:
    std::vector<Epoch> epochs_;
    std::vector<double> boundaries_;
    std::vector<double> cumulative_;
    std::optional<std::size_t> last_idle_;  // zero-based
    double helper_frequency_ = 0.0;
    double cycles_per_bit_ = 0.0;
};

/// Normalizes the epoch list and precomputes cumulative computable bits at every boundary.
///
/// Durations must sum to `horizon` within 1e-12 s; the final boundary is
/// pinned to `horizon` exactly.
inline CpuIdlingProfile build_profile(std::span<const Epoch> epochs, double helper_frequency,
                                      double cycles_per_bit, double horizon) {
    if (!(helper_frequency > 0.0)) throw ConfigError("helper CPU frequency must be positive");
    if (!(cycles_per_bit > 0.0)) throw ConfigError("cycles per bit must be positive");
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    if (epochs.empty()) throw ConfigError("profile needs at least one epoch");

    CpuIdlingProfile p;
    double sum = 0.0;
    for (const Epoch& e : epochs) {
        if (!(e.duration > 0.0) || !std::isfinite(e.duration))
            throw ConfigError("epoch durations must be positive and finite");
        sum += e.duration;
        if (!p.epochs_.empty() && p.epochs_.back().state == e.state)
            p.epochs_.back().duration += e.duration;
        else
            p.epochs_.push_back(e);
    }
    if (std::abs(sum - horizon) > tol::kTime)
        throw ConfigError("epoch durations sum to " + std::to_string(sum) +
                          " s, expected " + std::to_string(horizon) + " s");
    for (const Epoch& e : p.epochs_)
        if (e.duration < tol::kTime) throw ConfigError("degenerate epoch shorter than 1e-12 s");

    p.helper_frequency_ = helper_frequency;
    p.cycles_per_bit_ = cycles_per_bit;
    const double rate = helper_frequency / cycles_per_bit;

    p.boundaries_.assign(1, 0.0);
    p.cumulative_.assign(1, 0.0);
    double t = 0.0;
    double u = 0.0;
    for (std::size_t k = 0; k < p.epochs_.size(); ++k) {
        t += p.epochs_[k].duration;
        if (p.epochs_[k].state == CpuState::Idle) {
            u += p.epochs_[k].duration * rate;
            p.last_idle_ = k;
        }
        p.boundaries_.push_back(t);
        p.cumulative_.push_back(u);
    }
    p.boundaries_.back() = horizon;
    // Keep durations consistent with the pinned final boundary.
    p.epochs_.back().duration = horizon - p.boundaries_[p.boundaries_.size() - 2];
    if (p.epochs_.back().state == CpuState::Idle)
        p.cumulative_.back() = p.cumulative_[p.cumulative_.size() - 2] + p.epochs_.back().duration * rate;
    return p;
}

inline double u_bit_at(const CpuIdlingProfile& profile, double t) { return profile.u_bit_at(t); }

enum class InitialState { Random, Idle, Busy };

/// Alternating busy/idle process with exponential sojourn times, truncated at T.
///
/// Idle and busy durations come from separate unit-exponential streams scaled
/// by their means, so for a fixed seed stretching `mean_idle` only stretches
/// the idle sojourns of the same sample path.
inline std::vector<Epoch> sample_cpu_process(std::uint64_t seed, double horizon, double mean_idle,
                                             double mean_busy,
                                             InitialState initial = InitialState::Random) {
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    if (!(mean_idle > 0.0) || !(mean_busy > 0.0))
        throw ConfigError("mean idle and busy intervals must be positive");

    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 master(seq);
    std::mt19937_64 idle_rng(master());
    std::mt19937_64 busy_rng(master());
    std::exponential_distribution<double> unit_exp(1.0);

    CpuState state = initial == InitialState::Idle   ? CpuState::Idle
                     : initial == InitialState::Busy ? CpuState::Busy
                     : (master() & 1U)              ? CpuState::Idle
                                                    : CpuState::Busy;

    std::vector<Epoch> out;
    double t = 0.0;
    while (t < horizon) {
        double len = state == CpuState::Idle ? mean_idle * unit_exp(idle_rng)
                                             : mean_busy * unit_exp(busy_rng);
        bool last = t + len >= horizon - 2 * tol::kTime;
        if (last) len = horizon - t;
        if (len >= 2 * tol::kTime) {
            if (!out.empty() && out.back().state == state)
                out.back().duration += len;
            else
                out.push_back({len, state});
        } else if (last && !out.empty()) {
            out.back().duration += len;
        }
        t += len;
        if (last) break;
        state = state == CpuState::Idle ? CpuState::Busy : CpuState::Idle;
    }
    return out;
}

struct Arrival {
    double time = 0.0;  // seconds
    double bits = 0.0;

    bool operator==(const Arrival&) const = default;
};

/// Data arrival instants on [0, T] ending with a zero-size event at T.
class ArrivalProcess {
public:
    const std::vector<Arrival>& events() const { return events_; }
    double horizon() const { return events_.back().time; }
    double total() const { return total_; }

    friend ArrivalProcess make_arrivals(std::vector<Arrival>, double);

private:
    std::vector<Arrival> events_;
    double total_ = 0.0;
};

/// Validates arrivals and appends the terminal (T, 0) event when missing.
inline ArrivalProcess make_arrivals(std::vector<Arrival> events, double horizon) {
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    ArrivalProcess a;
    double prev = -1.0;
    for (const Arrival& e : events) {
        if (e.time < -tol::kTime || e.time > horizon + tol::kTime)
            throw ConfigError("arrival time outside [0, T]");
        if (!(e.bits >= 0.0) || !std::isfinite(e.bits)) throw ConfigError("arrival size must be non-negative");
        if (e.time <= prev + tol::kTime) throw ConfigError("arrival times must be strictly increasing");
        prev = e.time;
    }
    if (!events.empty() && tol::time_eq(events.back().time, horizon)) {
        if (events.back().bits != 0.0) throw ConfigError("data arriving at the deadline cannot be computed");
        events.back().time = horizon;
    } else {
        events.push_back({horizon, 0.0});
    }
    if (!events.empty() && std::abs(events.front().time) <= tol::kTime) events.front().time = 0.0;
    for (const Arrival& e : events) a.total_ += e.bits;
    a.events_ = std::move(events);
    return a;
}

/// Poisson arrivals on (0, T) with sizes uniform on [size_low, size_high].
inline ArrivalProcess sample_arrivals(std::uint64_t seed, double horizon, double mean_interarrival,
                                      double size_low, double size_high) {
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    if (!(mean_interarrival > 0.0)) throw ConfigError("mean inter-arrival time must be positive");
    if (!(size_low >= 0.0) || !(size_high >= size_low))
        throw ConfigError("arrival size range must satisfy 0 <= low <= high");

    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0xa77u};
    std::mt19937_64 time_rng(seq);
    std::mt19937_64 size_rng(time_rng());
    std::exponential_distribution<double> unit_exp(1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Arrival> events;
    double t = mean_interarrival * unit_exp(time_rng);
    while (t < horizon - 2 * tol::kTime) {
        double u = unit(size_rng);
        events.push_back({t, size_low + u * (size_high - size_low)});
        t += mean_interarrival * unit_exp(time_rng);
    }
    return make_arrivals(std::move(events), horizon);
}

/// CPU and arrival events merged onto one boundary sequence.
struct Timeline {
    std::vector<double> times;        // 0 = t_0 < ... < t_N = T
    std::vector<CpuState> states;     // per interval (size N)
    std::vector<double> arrivals;     // bits arriving at each boundary (size N + 1)
    std::vector<double> u_bits;       // cumulative computable bits at each boundary (size N + 1)
    std::vector<bool> cpu_change;     // boundary is a CPU state transition

    std::size_t segment_count() const { return states.size(); }
};

inline Timeline merge_events(const CpuIdlingProfile& profile, const ArrivalProcess& arrivals) {
    if (std::abs(profile.horizon() - arrivals.horizon()) > tol::kTime)
        throw ConfigError("profile and arrivals must share the same horizon");

    std::vector<std::pair<double, double>> points;  // (time, bits)
    for (double s : profile.boundaries()) points.emplace_back(s, 0.0);
    for (const Arrival& e : arrivals.events()) points.emplace_back(e.time, e.bits);
    std::stable_sort(points.begin(), points.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    Timeline tl;
    for (const auto& [t, bits] : points) {
        if (!tl.times.empty() && t - tl.times.back() <= tol::kTime) {
            tl.arrivals.back() += bits;
            continue;
        }
        tl.times.push_back(t);
        tl.arrivals.push_back(bits);
    }
    tl.times.front() = 0.0;
    tl.times.back() = profile.horizon();

    const auto& cpu = profile.boundaries();
    std::size_t cpu_idx = 0;
    for (std::size_t i = 0; i < tl.times.size(); ++i) {
        tl.u_bits.push_back(profile.u_bit_at(tl.times[i]));
        while (cpu_idx < cpu.size() && cpu[cpu_idx] < tl.times[i] - tol::kTime) ++cpu_idx;
        bool on_cpu = cpu_idx < cpu.size() && std::abs(cpu[cpu_idx] - tl.times[i]) <= tol::kTime;
        tl.cpu_change.push_back(on_cpu && i > 0 && i + 1 < tl.times.size());
        if (i + 1 < tl.times.size())
            tl.states.push_back(profile.state_at(0.5 * (tl.times[i] + tl.times[i + 1])));
    }
    return tl;
}

}  // namespace cocomp
