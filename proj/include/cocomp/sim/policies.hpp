#pragma once

// Baseline offloading policies used for comparison in the experiments.

#include <algorithm>
#include <limits>

#include "cocomp/energy.hpp"
#include "cocomp/error.hpp"
#include "cocomp/golden_section.hpp"
#include "cocomp/partition.hpp"
#include "cocomp/string_pull.hpp"
#include "cocomp/tunnel.hpp"

namespace cocomp::sim {

enum class Policy { Optimal, Benchmark, Proportional, LazyFirst };

inline const char* to_string(Policy p) {
    switch (p) {
        case Policy::Optimal: return "optimal";
        case Policy::Benchmark: return "benchmark";
        case Policy::Proportional: return "proportional";
        case Policy::LazyFirst: return "lazy-first";
    }
    return "?";
}

inline Policy parse_policy(const std::string& s) {
    if (s == "optimal") return Policy::Optimal;
    if (s == "benchmark") return Policy::Benchmark;
    if (s == "proportional") return Policy::Proportional;
    if (s == "lazy-first") return Policy::LazyFirst;
    throw ConfigError("unknown policy '" + s + "'");
}

/// One-shot benchmark: the transmission rate tracks the helper's computing
/// rate, i.e. the cumulative curve is the floor of the tunnel solve_p1 uses.
inline OffloadSchedule benchmark_schedule(const CpuIdlingProfile& profile, double bits, double buffer) {
    cocomp::detail::check_capacity(profile, bits);
    if (profile.has_capacity() && bits > 0.0 && tol::bits_eq(bits, profile.capacity()))
        return follow_floor(full_utilization_tunnel(profile, profile.capacity(), buffer));
    if (buffer >= bits) return follow_floor(effective_tunnel(profile, bits));
    const CpuIdlingProfile scaled = proportional_profile(profile, bits);
    return follow_floor(full_utilization_tunnel(scaled, scaled.capacity(), buffer));
}

/// Bursty benchmark: cumulative curve follows the bursty effective tunnel floor.
inline OffloadSchedule bursty_benchmark_schedule(const CpuIdlingProfile& profile, const ArrivalProcess& arrivals,
                                                 double theta) {
    const FeasibilityTunnel t = bursty_effective_tunnel(profile, arrivals, theta);
    if (!t.feasible) throw InfeasibleError("bursty benchmark needs a feasible tunnel");
    return follow_floor(t);
}

inline double lazy_first_energy(const CpuIdlingProfile& profile, double bits, double buffer,
                                const ChannelParams& ch) {
    if (bits < 0.0 || !tol::bits_le(bits, profile.capacity())) return std::numeric_limits<double>::infinity();
    const FeasibilityTunnel t = lazy_first_tunnel(profile, std::min(bits, profile.capacity()), buffer);
    return schedule_energy(pull_string(t), ch);
}

inline double benchmark_energy(const CpuIdlingProfile& profile, double bits, double buffer,
                               const ChannelParams& ch) {
    if (bits < 0.0 || !tol::bits_le(bits, profile.capacity())) return std::numeric_limits<double>::infinity();
    return schedule_energy(benchmark_schedule(profile, std::min(bits, profile.capacity()), buffer), ch);
}

inline double bursty_benchmark_energy(const CpuIdlingProfile& profile, const ArrivalProcess& arrivals,
                                      double theta, const ChannelParams& ch) {
    const FeasibilityTunnel t = bursty_effective_tunnel(profile, arrivals, std::clamp(theta, 0.0, 1.0));
    if (!t.feasible) return std::numeric_limits<double>::infinity();
    return schedule_energy(follow_floor(t), ch);
}

/// Partitions L bits for a baseline transmit-energy curve. Baseline curves
/// need not be convex, so the search scans before refining.
template <class Eoff>
PartitionResult partition_with(Eoff&& e_off, double load_bits, const CpuIdlingProfile& profile,
                               const LocalComputeParams& lc, double deadline) {
    const double lmin = min_offload(load_bits, deadline, lc);
    const double cap = profile.capacity();
    if (!tol::bits_le(lmin, cap)) throw InfeasibleError("infeasible: minimum offload exceeds helper capacity");
    PartitionResult r;
    r.upper = std::min(cap, load_bits);
    r.lower = std::min(lmin, r.upper);
    auto objective = [&](double l) { return local_energy(load_bits - l, lc) + e_off(l); };
    const Minimum m = scan_then_golden(objective, r.lower, r.upper, 1.0);
    r.offload_bits = m.x;
    r.theta = load_bits > 0.0 ? m.x / load_bits : 0.0;
    r.local_energy = local_energy(load_bits - m.x, lc);
    r.transmit_energy = e_off(m.x);
    return r;
}

/// Same for a bursty baseline over theta.
template <class Eoff>
PartitionResult partition_theta_with(Eoff&& e_off, const ArrivalProcess& arrivals, const CpuIdlingProfile& profile,
                                     const LocalComputeParams& lc, double deadline) {
    const double load = arrivals.total();
    PartitionResult r;
    r.lower = theta_min(arrivals, lc, deadline);
    r.upper = theta_max(profile, arrivals);
    if (r.lower > r.upper + 1e-12) throw InfeasibleError("infeasible: theta_min exceeds theta_max");
    r.upper = std::max(r.upper, r.lower);
    auto objective = [&](double th) { return local_energy((1.0 - th) * load, lc) + e_off(th); };
    const Minimum m = scan_then_golden(objective, r.lower, r.upper, 1e-6);
    r.theta = m.x;
    r.offload_bits = m.x * load;
    r.local_energy = local_energy((1.0 - m.x) * load, lc);
    r.transmit_energy = e_off(m.x);
    return r;
}

}  // namespace cocomp::sim
