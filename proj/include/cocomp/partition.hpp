#pragma once

// Data partitioning between local computing and offloading.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cocomp/cpu_profile.hpp"
#include "cocomp/energy.hpp"
#include "cocomp/error.hpp"
#include "cocomp/golden_section.hpp"
#include "cocomp/string_pull.hpp"
#include "cocomp/tolerance.hpp"
#include "cocomp/tunnel.hpp"

namespace cocomp {

struct PartitionResult {
    double offload_bits = 0.0;  // l* (one-shot) or theta* L (bursty)
    double theta = 0.0;         // theta* (bursty) or l* / L (one-shot)
    double lower = 0.0;         // feasible interval for the decision variable
    double upper = 0.0;
    double local_energy = 0.0;
    double transmit_energy = 0.0;
    bool shortcut = false;      // minimum-offload shortcut applied

    double total_energy() const { return local_energy + transmit_energy; }
};

/// Minimum transmit energy as a function of the offloaded bits, +inf outside [0, capacity].
inline double offload_energy(const CpuIdlingProfile& profile, double bits, double buffer,
                             const ChannelParams& ch) {
    if (bits < 0.0 || !tol::bits_le(bits, profile.capacity())) return std::numeric_limits<double>::infinity();
    return solve_p1(profile, std::min(bits, profile.capacity()), buffer, ch).energy;
}

/// Rate x at which the average energy per bit f(x) / x reaches `per_bit_power`
/// (W per bit/s); zero when even vanishing rates cost more.
inline double average_cost_rate(double per_bit_power, const ChannelParams& ch) {
    auto avg = [&](double x) { return rate_to_power(x, ch) / x; };
    if (per_bit_power <= ch.noise * std::numbers::ln2 / ch.bandwidth) return 0.0;
    double lo = 0.0;
    double hi = ch.bandwidth;
    while (avg(hi) < per_bit_power) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (avg(mid) < per_bit_power ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Returns l_min^+ when offloading more than the minimum provably cannot pay off.
///
/// Any schedule finishing by T_end costs at least T_end / h^2 f(l / T_end), and
/// a convex E_off with E_off(0) = 0 has E_off'(l) >= E_off(l) / l. Offloading
/// only l_min^+ is therefore optimal once T_end * x_c <= l_min^+, where x_c is
/// the rate whose average cost f(x) / x equals C P_cyc h^2.
inline std::optional<double> min_offload_shortcut(double load_bits, double t_end, const ChannelParams& ch,
                                                  const LocalComputeParams& lc, double deadline) {
    if (!(t_end > 0.0)) return std::nullopt;
    const double lmin = min_offload(load_bits, deadline, lc);
    const double threshold = t_end * average_cost_rate(lc.energy_per_bit() * ch.h_sq, ch);
    if (threshold <= lmin) return lmin;
    return std::nullopt;
}

/// Central-difference derivative of E_off with step max(1e-6 l, 1 bit).
inline double subgradient_e_off(double bits, const CpuIdlingProfile& profile, double buffer,
                                const ChannelParams& ch) {
    const double cap = profile.capacity();
    if (!(bits > 0.0) || !(bits < cap))
        throw InfeasibleError("offload energy derivative needs 0 < l < capacity");
    const double h = std::min({std::max(1e-6 * bits, 1.0), bits, cap - bits});
    return (offload_energy(profile, bits + h, buffer, ch) - offload_energy(profile, bits - h, buffer, ch)) /
           (2.0 * h);
}

struct PartitionOptions {
    bool use_shortcut = true;
    double bits_tolerance = 1.0;
    double theta_tolerance = 1e-6;
};

/// Optimal one-shot split of L bits between local computing and offloading.
///
/// The objective local_energy(L - l) + offload_energy(l) is convex on [min offload, min(capacity, L)].
/// With a buffer smaller than the interval, E_off switches from the effective
/// tunnel to proportional allocation at l = Q; each side is searched separately.
inline PartitionResult optimize_partition(double load_bits, const CpuIdlingProfile& profile, double buffer,
                                          const ChannelParams& ch, const LocalComputeParams& lc,
                                          double deadline, const PartitionOptions& opt = {}) {
    if (!(load_bits >= 0.0)) throw ConfigError("computation load must be non-negative");
    const double lmin = min_offload(load_bits, deadline, lc);
    const double cap = profile.capacity();
    if (!tol::bits_le(lmin, cap))
        throw InfeasibleError("infeasible: local computing leaves " + std::to_string(lmin) +
                              " bits but the helper can compute only " + std::to_string(cap) +
                              " bits (gap " + std::to_string(lmin - cap) + ")");

    PartitionResult r;
    r.upper = std::min(cap, load_bits);
    r.lower = std::min(lmin, r.upper);

    auto objective = [&](double l) {
        return local_energy(load_bits - l, lc) + offload_energy(profile, l, buffer, ch);
    };

    std::optional<double> quick;
    if (opt.use_shortcut && profile.has_capacity())
        quick = min_offload_shortcut(load_bits, *profile.t_end(), ch, lc, deadline);

    double best;
    if (quick) {
        best = r.lower;
        r.shortcut = true;
    } else if (buffer > r.lower && buffer < r.upper) {
        Minimum left = golden_section(objective, r.lower, buffer, opt.bits_tolerance);
        Minimum right = golden_section(objective, buffer, r.upper, opt.bits_tolerance);
        best = left.value <= right.value ? left.x : right.x;
    } else {
        best = golden_section(objective, r.lower, r.upper, opt.bits_tolerance).x;
    }

    r.offload_bits = best;
    r.theta = load_bits > 0.0 ? best / load_bits : 0.0;
    r.local_energy = local_energy(load_bits - best, lc);
    r.transmit_energy = offload_energy(profile, best, buffer, ch);
    return r;
}

/// Minimum transmit energy for offloading the theta share of every arrival.
inline double bursty_offload_energy(const CpuIdlingProfile& profile, const ArrivalProcess& arrivals,
                                    double theta, const ChannelParams& ch) {
    const FeasibilityTunnel t = bursty_effective_tunnel(profile, arrivals, std::clamp(theta, 0.0, 1.0));
    if (!t.feasible) return std::numeric_limits<double>::infinity();
    return schedule_energy(pull_string(t), ch);
}

/// Optimal uniform partitioning ratio for bursty arrivals (large buffer).
///
/// Golden-section search on [theta_min, theta_max]. A 17-point scan guards the
/// convexity assumption: if any sample beats the golden-section result, the
/// search is redone around that sample.
inline PartitionResult optimize_theta(const ArrivalProcess& arrivals, const CpuIdlingProfile& profile,
                                      double buffer, const ChannelParams& ch, const LocalComputeParams& lc,
                                      double deadline, const PartitionOptions& opt = {}) {
    const double load = arrivals.total();
    if (buffer < load) throw ConfigError("bursty partitioning assumes a buffer of at least L bits");
    PartitionResult r;
    r.lower = theta_min(arrivals, lc, deadline);
    r.upper = theta_max(profile, arrivals);
    if (r.lower > r.upper + 1e-12)
        throw InfeasibleError("infeasible: theta_min " + std::to_string(r.lower) + " exceeds theta_max " +
                              std::to_string(r.upper));
    r.upper = std::max(r.upper, r.lower);

    auto objective = [&](double theta) {
        return local_energy((1.0 - theta) * load, lc) + bursty_offload_energy(profile, arrivals, theta, ch);
    };
    Minimum best = golden_section(objective, r.lower, r.upper, opt.theta_tolerance);
    constexpr int kProbe = 17;
    for (int i = 0; i <= kProbe - 1; ++i) {
        const double th = r.lower + (r.upper - r.lower) * i / (kProbe - 1);
        if (objective(th) < best.value - 1e-9 * std::abs(best.value)) {
            best = scan_then_golden(objective, r.lower, r.upper, opt.theta_tolerance, 257);
            break;
        }
    }

    r.theta = best.x;
    r.offload_bits = best.x * load;
    r.local_energy = local_energy((1.0 - best.x) * load, lc);
    r.transmit_energy = bursty_offload_energy(profile, arrivals, best.x, ch);
    return r;
}

struct LocalTrace {
    std::vector<double> computed;  // bits computed locally per segment
    std::vector<double> backlog;   // bits waiting at each boundary
    double completion_time = 0.0;  // instant the last local bit finishes
    bool complete = false;
};

/// Earliest-possible local computing of the (1 - theta) share: each arrival is
/// handed to the local CPU on arrival and processed at f / C bits per second.
inline LocalTrace verify_local_schedule(const ArrivalProcess& arrivals, double theta,
                                        const LocalComputeParams& lc, double deadline) {
    const FeasibilityTunnel t = local_compute_tunnel(arrivals, theta, lc, deadline);
    const auto& ev = arrivals.events();
    const double share = 1.0 - theta;
    const double rate = lc.bit_rate();

    LocalTrace tr;
    tr.backlog.push_back(0.0);
    double b = 0.0;
    std::size_t ei = 0;
    for (std::size_t k = 0; k + 1 < t.times.size(); ++k) {
        double incoming = 0.0;
        if (ei < ev.size() && ev[ei].time == t.times[k]) incoming = share * ev[ei++].bits;
        const double work = b + incoming;
        const double tau = t.times[k + 1] - t.times[k];
        const double d = std::min(work, tau * rate);
        if (work > 0.0) tr.completion_time = t.times[k] + std::min(tau, work / rate);
        b = work - d;
        tr.computed.push_back(d);
        tr.backlog.push_back(b);
    }
    tr.complete = tol::bits_le(b, 0.0);
    return tr;
}

}  // namespace cocomp
