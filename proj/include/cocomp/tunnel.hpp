#pragma once

// Offloading and local-computing feasibility tunnels.
//
// A tunnel bounds the cumulative offloaded bits at a sequence of boundary
// instants. Any schedule that is constant-rate between boundaries and whose
// cumulative curve stays between floor and ceiling at every boundary meets the
// deadline, buffer and data-causality constraints.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cocomp/cpu_profile.hpp"
#include "cocomp/energy.hpp"
#include "cocomp/error.hpp"
#include "cocomp/tolerance.hpp"

namespace cocomp {

struct FeasibilityTunnel {
    std::vector<double> times;    // t_0 = 0 < ... < t_N = end time
    std::vector<double> floor;    // minimum cumulative bits at each boundary
    std::vector<double> ceiling;  // maximum cumulative bits at each boundary
    std::vector<CpuState> states; // per segment
    // Boundary kinds used by the optimality check.
    std::vector<bool> cpu_change;
    std::vector<bool> arrival;
    double total = 0.0;
    bool feasible = false;

    std::size_t segment_count() const { return times.empty() ? 0 : times.size() - 1; }
    double end_time() const { return times.back(); }
    double duration(std::size_t seg) const { return times[seg + 1] - times[seg]; }
    std::vector<double> durations() const {
        std::vector<double> d;
        for (std::size_t k = 0; k + 1 < times.size(); ++k) d.push_back(duration(k));
        return d;
    }
};

/// True iff ceiling >= floor at every boundary (1e-9 relative slack).
inline bool is_feasible(const FeasibilityTunnel& t) {
    for (std::size_t k = 0; k < t.times.size(); ++k)
        if (!tol::bits_le(t.floor[k], t.ceiling[k])) return false;
    return true;
}

namespace detail {

// Pins the endpoint and evaluates the feasibility flag.
inline void finalize(FeasibilityTunnel& t) {
    t.feasible = is_feasible(t);
    if (t.feasible) {
        t.floor.front() = 0.0;
        t.floor.back() = t.total;
        t.ceiling.back() = t.total;
        for (std::size_t k = 0; k < t.times.size(); ++k) t.ceiling[k] = std::max(t.ceiling[k], t.floor[k]);
    }
}

// Tunnel for a helper with no idle time; feasible only when nothing is offloaded.
inline FeasibilityTunnel empty_tunnel(double total) {
    FeasibilityTunnel t;
    t.times = {0.0};
    t.floor = {total};
    t.ceiling = {0.0};
    t.cpu_change = {false};
    t.arrival = {false};
    t.total = total;
    t.feasible = tol::bits_le(total, 0.0);
    if (t.feasible) t.floor = {0.0};
    return t;
}

// CPU epoch boundaries s_0 .. s_K of a profile, with segment annotations.
inline FeasibilityTunnel cpu_skeleton(const CpuIdlingProfile& profile) {
    FeasibilityTunnel t;
    const std::size_t K = *profile.last_idle_epoch();
    const auto& s = profile.boundaries();
    t.times.assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(K) + 1);
    for (std::size_t k = 0; k < K; ++k) t.states.push_back(profile.epochs()[k].state);
    t.cpu_change.assign(K + 1, true);
    t.cpu_change.front() = false;
    t.cpu_change.back() = false;
    t.arrival.assign(K + 1, false);
    return t;
}

inline void check_capacity(const CpuIdlingProfile& profile, double bits) {
    if (bits < 0.0) throw ConfigError("offloaded bits must be non-negative");
    if (!tol::bits_le(bits, profile.capacity()))
        throw InfeasibleError("offloading " + std::to_string(bits) + " bits exceeds helper capacity " +
                              std::to_string(profile.capacity()) + " bits");
}

}  // namespace detail

/// Tunnel for offloading exactly the helper capacity with a Q-bit buffer.
///
/// Floor is the idling profile; ceiling is min(profile + Q, l).
inline FeasibilityTunnel full_utilization_tunnel(const CpuIdlingProfile& profile, double bits,
                                                 double buffer) {
    if (buffer < 0.0) throw ConfigError("buffer size must be non-negative");
    if (!tol::bits_eq(bits, profile.capacity()))
        throw ConfigError("full-utilization tunnel requires offloading exactly the helper capacity " +
                          std::to_string(profile.capacity()) + " bits");
    if (!profile.has_capacity()) return detail::empty_tunnel(0.0);

    FeasibilityTunnel t = detail::cpu_skeleton(profile);
    const double total = profile.capacity();
    const auto& u = profile.cumulative_bits();
    for (std::size_t k = 0; k < t.times.size(); ++k) {
        t.floor.push_back(u[k]);
        t.ceiling.push_back(std::min(u[k] + buffer, total));
    }
    t.total = total;
    detail::finalize(t);
    return t;
}

/// Large-buffer tunnel for offloading l <= capacity bits.
///
/// The floor is the idling profile lowered by the unused capacity
/// capacity - l and clipped at zero; the ceiling is l.
inline FeasibilityTunnel effective_tunnel(const CpuIdlingProfile& profile, double bits) {
    detail::check_capacity(profile, bits);
    if (!profile.has_capacity()) return detail::empty_tunnel(0.0);

    FeasibilityTunnel t = detail::cpu_skeleton(profile);
    const double total = std::min(bits, profile.capacity());
    const double unused = profile.capacity() - total;
    const auto& u = profile.cumulative_bits();
    for (std::size_t k = 0; k < t.times.size(); ++k) {
        t.floor.push_back(std::max(u[k] - unused, 0.0));
        t.ceiling.push_back(total);
    }
    t.total = total;
    detail::finalize(t);
    return t;
}

/// Profile seen by the user when the helper grants a fixed share l / capacity of
/// its cycles in every idle epoch.
inline CpuIdlingProfile proportional_profile(const CpuIdlingProfile& profile, double bits) {
    if (!(bits > 0.0)) throw ConfigError("proportional allocation needs a positive offload");
    detail::check_capacity(profile, bits);
    const double share = std::min(bits / profile.capacity(), 1.0);
    return build_profile(profile.epochs(), profile.helper_frequency() * share,
                         profile.cycles_per_bit(), profile.horizon());
}

/// Lazy-first allocation: the helper stays unused until the remaining idle
/// capacity equals l, then computes at full speed. Cumulative computed bits
/// follow max(profile(t) - (capacity - l), 0).
inline FeasibilityTunnel lazy_first_tunnel(const CpuIdlingProfile& profile, double bits, double buffer) {
    if (buffer < 0.0) throw ConfigError("buffer size must be non-negative");
    FeasibilityTunnel t = effective_tunnel(profile, bits);
    if (t.times.size() < 2) return t;
    for (std::size_t k = 0; k < t.times.size(); ++k) t.ceiling[k] = std::min(t.floor[k] + buffer, t.total);
    detail::finalize(t);
    return t;
}

namespace detail {

// Merged CPU/arrival boundaries up to T_end with causal ceilings theta * sum_{j<k} L_j.
inline FeasibilityTunnel bursty_skeleton(const CpuIdlingProfile& profile, const ArrivalProcess& arrivals,
                                         double theta, std::vector<double>& u_at) {
    const Timeline tl = merge_events(profile, arrivals);
    const double t_end = *profile.t_end();
    FeasibilityTunnel t;
    double arrived = 0.0;
    for (std::size_t i = 0; i < tl.times.size(); ++i) {
        if (tl.times[i] > t_end + tol::kTime) break;
        t.times.push_back(tl.times[i]);
        t.ceiling.push_back(theta * arrived);
        t.cpu_change.push_back(tl.cpu_change[i]);
        t.arrival.push_back(tl.arrivals[i] > 0.0);
        u_at.push_back(tl.u_bits[i]);
        if (i + 1 < tl.times.size() && tl.times[i] < t_end - tol::kTime) t.states.push_back(tl.states[i]);
        arrived += tl.arrivals[i];
    }
    t.times.back() = t_end;
    t.cpu_change.back() = false;
    t.total = theta * arrivals.total();
    return t;
}

inline void check_theta(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("partitioning ratio must lie in [0, 1]");
}

}  // namespace detail

/// Bursty-arrival tunnel for full helper utilization (theta * L equal to the helper capacity).
///
/// Floor is the idling profile on the merged timeline; the ceiling only
/// admits data that arrived strictly before each boundary. theta = 0 gives
/// the zero tunnel.
inline FeasibilityTunnel bursty_tunnel(const CpuIdlingProfile& profile, const ArrivalProcess& arrivals,
                                       double theta) {
    detail::check_theta(theta);
    const double total = theta * arrivals.total();
    const bool zero = tol::bits_le(total, 0.0);
    if (!zero && !tol::bits_eq(total, profile.capacity()))
        throw ConfigError("full-utilization bursty tunnel requires theta * L to equal the helper capacity");
    if (!profile.has_capacity()) return detail::empty_tunnel(total);

    std::vector<double> u;
    FeasibilityTunnel t = detail::bursty_skeleton(profile, arrivals, theta, u);
    for (std::size_t k = 0; k < t.times.size(); ++k) t.floor.push_back(zero ? 0.0 : u[k]);
    t.floor.back() = t.total;
    detail::finalize(t);
    return t;
}

/// Bursty-arrival tunnel for any 0 <= theta <= 1; floor lowered by
/// capacity - theta * L and clipped at zero. Infeasibility is flagged.
inline FeasibilityTunnel bursty_effective_tunnel(const CpuIdlingProfile& profile,
                                                 const ArrivalProcess& arrivals, double theta) {
    detail::check_theta(theta);
    if (!profile.has_capacity()) return detail::empty_tunnel(theta * arrivals.total());

    std::vector<double> u;
    FeasibilityTunnel t = detail::bursty_skeleton(profile, arrivals, theta, u);
    const double unused = profile.capacity() - t.total;
    for (std::size_t k = 0; k < t.times.size(); ++k) t.floor.push_back(std::max(u[k] - unused, 0.0));
    t.floor.back() = t.total;
    detail::finalize(t);
    return t;
}

/// Local-computing tunnel at the user for the (1 - theta) share of every arrival.
inline FeasibilityTunnel local_compute_tunnel(const ArrivalProcess& arrivals, double theta,
                                              const LocalComputeParams& lc, double deadline) {
    detail::check_theta(theta);
    if (std::abs(arrivals.horizon() - deadline) > tol::kTime)
        throw ConfigError("arrival process horizon must equal the deadline");

    FeasibilityTunnel t;
    const double share = 1.0 - theta;
    const double total = share * arrivals.total();
    const double unused = deadline * lc.bit_rate() - total;
    const auto& ev = arrivals.events();
    if (ev.front().time > 0.0) {
        t.times.push_back(0.0);
        t.arrival.push_back(false);
    }
    for (const Arrival& a : ev) {
        t.times.push_back(a.time);
        t.arrival.push_back(a.bits > 0.0);
    }
    double arrived = 0.0;
    std::size_t ei = 0;
    for (std::size_t k = 0; k < t.times.size(); ++k) {
        t.floor.push_back(std::max(t.times[k] * lc.bit_rate() - unused, 0.0));
        t.ceiling.push_back(share * arrived);
        if (ei < ev.size() && ev[ei].time == t.times[k]) arrived += ev[ei++].bits;
    }
    t.states.assign(t.times.size() - 1, CpuState::Idle);
    t.cpu_change.assign(t.times.size(), false);
    t.total = total;
    t.floor.back() = std::max(t.floor.back(), total);
    detail::finalize(t);
    return t;
}

/// Largest theta for which the bursty effective tunnel is feasible:
/// min{1, min_k (capacity - profile(t_k)) / (bits arriving at or after t_k)} on the merged timeline.
inline double theta_max(const CpuIdlingProfile& profile, const ArrivalProcess& arrivals) {
    const Timeline tl = merge_events(profile, arrivals);
    const double cap = profile.capacity();
    // suffix sums from the back so the tail is exactly zero, not a subtraction residue
    std::vector<double> remaining(tl.times.size() + 1, 0.0);
    for (std::size_t i = tl.times.size(); i-- > 0;) remaining[i] = remaining[i + 1] + tl.arrivals[i];
    double best = 1.0;
    for (std::size_t i = 0; i + 1 < tl.times.size(); ++i)
        if (remaining[i] > 0.0) best = std::min(best, std::max(cap - tl.u_bits[i], 0.0) / remaining[i]);
    return std::max(best, 0.0);
}

/// Smallest theta for which local computing of the (1 - theta) share finishes by T:
/// [1 - min_k (f (T - t_k) / C) / sum_{j>=k} L_j]^+.
inline double theta_min(const ArrivalProcess& arrivals, const LocalComputeParams& lc, double deadline) {
    const auto& ev = arrivals.events();
    std::vector<double> remaining(ev.size() + 1, 0.0);
    for (std::size_t i = ev.size(); i-- > 0;) remaining[i] = remaining[i + 1] + ev[i].bits;
    double worst = std::numeric_limits<double>::infinity();
    if (ev.front().time > 0.0 && remaining[0] > 0.0) worst = deadline * lc.bit_rate() / remaining[0];
    for (std::size_t i = 0; i < ev.size(); ++i)
        if (remaining[i] > 0.0) worst = std::min(worst, (deadline - ev[i].time) * lc.bit_rate() / remaining[i]);
    if (!std::isfinite(worst)) return 0.0;
    return std::clamp(1.0 - worst, 0.0, 1.0);
}

}  // namespace cocomp
