#pragma once

// Minimum-energy offloading inside a feasibility tunnel.
//
// Transmit energy is convex and increasing in rate, so the optimal
// cumulative-bits curve is the shortest path ("pulled string") from (0, 0)
// to (t_end, total) that stays inside the tunnel. The path is computed with
// the taut-string sweep: grow a segment from the current anchor while the
// cone of admissible slopes is non-empty; when a boundary falls outside the
// cone, bend at the vertex that defined the violated side of the cone.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cocomp/cpu_profile.hpp"
#include "cocomp/energy.hpp"
#include "cocomp/error.hpp"
#include "cocomp/tolerance.hpp"
#include "cocomp/tunnel.hpp"

namespace cocomp {

/// Bits offloaded per segment, aligned with the boundaries of the tunnel it
/// was computed for.
struct OffloadSchedule {
    std::vector<double> times;       // boundaries, size N + 1
    std::vector<double> bits;        // per segment, size N
    std::vector<double> cumulative;  // at boundaries, size N + 1

    std::size_t segment_count() const { return bits.size(); }
    double duration(std::size_t k) const { return times[k + 1] - times[k]; }
    double rate(std::size_t k) const { return bits[k] / duration(k); }
    double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }

    std::vector<double> durations() const {
        std::vector<double> d;
        for (std::size_t k = 0; k < bits.size(); ++k) d.push_back(duration(k));
        return d;
    }
    std::vector<double> rates() const {
        std::vector<double> r;
        for (std::size_t k = 0; k < bits.size(); ++k) r.push_back(rate(k));
        return r;
    }
};

/// Builds a schedule from cumulative values at the tunnel boundaries.
inline OffloadSchedule schedule_from_cumulative(std::vector<double> times, std::vector<double> cumulative) {
    OffloadSchedule s;
    s.times = std::move(times);
    s.cumulative = std::move(cumulative);
    for (std::size_t k = 0; k + 1 < s.cumulative.size(); ++k)
        s.bits.push_back(std::max(s.cumulative[k + 1] - s.cumulative[k], 0.0));
    return s;
}

inline double schedule_energy(const OffloadSchedule& s, const ChannelParams& ch) {
    return schedule_energy(s.bits, s.durations(), ch);
}

/// Shortest path through a feasible tunnel.
///
/// Among vertices binding the same side of the slope cone the earliest wins;
/// the floor side is tested first.
inline OffloadSchedule pull_string(const FeasibilityTunnel& tunnel) {
    if (!tunnel.feasible) throw InfeasibleError("cannot pull a string through an infeasible tunnel");
    const std::size_t n = tunnel.segment_count();
    std::vector<double> x(n + 1, 0.0);
    if (n == 0) return schedule_from_cumulative(tunnel.times, x);

    const auto& t = tunnel.times;
    auto lower = [&](std::size_t j) { return j == n ? tunnel.total : tunnel.floor[j]; };
    auto upper = [&](std::size_t j) { return j == n ? tunnel.total : tunnel.ceiling[j]; };

    std::size_t anchor = 0;
    double xa = 0.0;
    while (anchor < n) {
        double smin = -std::numeric_limits<double>::infinity();
        double smax = std::numeric_limits<double>::infinity();
        std::size_t jmin = anchor;
        std::size_t jmax = anchor;
        std::size_t bend = n;
        double slope = 0.0;
        for (std::size_t j = anchor + 1; j <= n; ++j) {
            const double dt = t[j] - t[anchor];
            const double lo = lower(j) - xa;
            const double hi = upper(j) - xa;
            if (hi < smin * dt - tol::bits(upper(j))) {
                bend = jmin;
                slope = smin;
                break;
            }
            if (lo > smax * dt + tol::bits(lower(j))) {
                bend = jmax;
                slope = smax;
                break;
            }
            if (lo / dt > smin) {
                smin = lo / dt;
                jmin = j;
            }
            if (hi / dt < smax) {
                smax = hi / dt;
                jmax = j;
            }
            if (j == n) slope = (tunnel.total - xa) / dt;
        }
        for (std::size_t j = anchor + 1; j <= bend; ++j) x[j] = xa + slope * (t[j] - t[anchor]);
        if (bend < n) x[bend] = bend == jmin && slope == smin ? lower(bend) : upper(bend);
        anchor = bend;
        xa = x[bend];
    }
    x[n] = tunnel.total;
    return schedule_from_cumulative(tunnel.times, std::move(x));
}

struct OptimalityReport {
    bool feasible = true;
    bool optimal = true;
    std::vector<std::string> violations;
};

/// Checks the shortest-path structure of a schedule against its tunnel.
///
/// Rates are constant between boundaries by construction. A rate may rise only
/// where the path touches the ceiling (buffer full) at a busy-to-idle switch
/// or a data arrival, and fall only where it touches the floor (buffer empty)
/// at an idle-to-busy switch.
inline OptimalityReport verify_optimality(const OffloadSchedule& s, const FeasibilityTunnel& tunnel,
                                          double rate_tol_bits = 1e-6) {
    OptimalityReport rep;
    auto fail = [&](bool feasibility, std::string msg) {
        if (feasibility) rep.feasible = false;
        rep.optimal = false;
        rep.violations.push_back(std::move(msg));
    };
    const std::size_t n = tunnel.segment_count();
    if (s.segment_count() != n || s.times.size() != tunnel.times.size()) {
        fail(true, "schedule is not aligned with the tunnel boundaries");
        return rep;
    }
    for (std::size_t k = 0; k < n; ++k)
        if (s.bits[k] < -tol::kBitsAbs) fail(true, "negative offload in segment " + std::to_string(k));
    for (std::size_t k = 1; k < n; ++k) {
        if (!tol::bits_le(tunnel.floor[k], s.cumulative[k]))
            fail(true, "below floor at boundary " + std::to_string(k));
        if (!tol::bits_le(s.cumulative[k], tunnel.ceiling[k]))
            fail(true, "above ceiling at boundary " + std::to_string(k));
    }
    if (n > 0 && !tol::bits_eq(s.cumulative[n], tunnel.total)) fail(true, "endpoint total not reached");
    if (!rep.feasible) return rep;

    for (std::size_t k = 1; k < n; ++k) {
        const double before = s.rate(k - 1);
        const double after = s.rate(k);
        const double change = (after - before) * std::min(s.duration(k - 1), s.duration(k));
        if (std::abs(change) <= std::max(rate_tol_bits, tol::bits(s.cumulative[k]))) continue;
        const bool at_floor = s.cumulative[k] <= tunnel.floor[k] + tol::bits(tunnel.floor[k]) + rate_tol_bits;
        const bool at_ceiling =
            s.cumulative[k] >= tunnel.ceiling[k] - tol::bits(tunnel.ceiling[k]) - rate_tol_bits;
        const bool to_idle = tunnel.cpu_change[k] && tunnel.states[k - 1] == CpuState::Busy &&
                             tunnel.states[k] == CpuState::Idle;
        const bool to_busy = tunnel.cpu_change[k] && tunnel.states[k - 1] == CpuState::Idle &&
                             tunnel.states[k] == CpuState::Busy;
        if (change > 0.0) {
            if (!at_ceiling) fail(false, "rate rises at boundary " + std::to_string(k) + " with buffer not full");
            else if (!to_idle && !tunnel.arrival[k])
                fail(false, "rate rises at boundary " + std::to_string(k) + " without a busy-to-idle switch");
        } else {
            if (!at_floor) fail(false, "rate falls at boundary " + std::to_string(k) + " with buffer not empty");
            else if (!to_busy)
                fail(false, "rate falls at boundary " + std::to_string(k) + " without an idle-to-busy switch");
        }
    }
    return rep;
}

struct BufferTrace {
    std::vector<double> computed;  // d_k per segment
    std::vector<double> backlog;   // B_k at each boundary, B_0 = 0
    bool overflow = false;
    bool deadline_met = false;
    double max_backlog = 0.0;
};

/// Replays the helper buffer: d_k = min(B_{k-1} + l_k, idle bits in segment k),
/// B_k = B_{k-1} + l_k - d_k. Segment capacities come from the profile.
inline BufferTrace simulate_buffer(const OffloadSchedule& s, const CpuIdlingProfile& profile, double buffer) {
    BufferTrace tr;
    tr.backlog.push_back(0.0);
    double b = 0.0;
    double sent = 0.0;
    double done = 0.0;
    for (std::size_t k = 0; k < s.segment_count(); ++k) {
        const double cap = profile.u_bit_at(s.times[k + 1]) - profile.u_bit_at(s.times[k]);
        const double d = std::min(b + s.bits[k], cap);
        b = b + s.bits[k] - d;
        if (b < 0.0) b = 0.0;
        sent += s.bits[k];
        done += d;
        tr.computed.push_back(d);
        tr.backlog.push_back(b);
        tr.max_backlog = std::max(tr.max_backlog, b);
        if (!tol::bits_le(b, buffer)) tr.overflow = true;
    }
    tr.deadline_met = tol::bits_le(b, 0.0) && tol::bits_eq(done, sent);
    return tr;
}

enum class OffloadRegime { FullUtilization, EffectiveTunnel, Proportional };

inline const char* to_string(OffloadRegime r) {
    switch (r) {
        case OffloadRegime::FullUtilization: return "full-utilization";
        case OffloadRegime::EffectiveTunnel: return "effective-tunnel";
        case OffloadRegime::Proportional: return "proportional";
    }
    return "?";
}

struct OffloadSolution {
    OffloadRegime regime = OffloadRegime::EffectiveTunnel;
    CpuIdlingProfile compute_profile;  // profile the helper CPU follows for this user
    FeasibilityTunnel tunnel;
    OffloadSchedule schedule;
    double energy = 0.0;
};

/// Minimum transmit energy for offloading `bits` to a helper with a `buffer`-bit buffer.
///
/// Full utilization uses the buffer-capped tunnel; under-utilization with a
/// large buffer uses the effective tunnel; with a small buffer the helper
/// grants a proportional share of its cycles and the full-utilization tunnel
/// of the scaled profile is used.
inline OffloadSolution solve_p1(const CpuIdlingProfile& profile, double bits, double buffer,
                                const ChannelParams& ch) {
    if (buffer < 0.0) throw ConfigError("buffer size must be non-negative");
    detail::check_capacity(profile, bits);
    OffloadSolution sol{OffloadRegime::EffectiveTunnel, profile, {}, {}, 0.0};
    if (profile.has_capacity() && bits > 0.0 && tol::bits_eq(bits, profile.capacity())) {
        sol.regime = OffloadRegime::FullUtilization;
        sol.tunnel = full_utilization_tunnel(profile, profile.capacity(), buffer);
    } else if (buffer >= bits) {
        sol.tunnel = effective_tunnel(profile, bits);
    } else {
        sol.regime = OffloadRegime::Proportional;
        sol.compute_profile = proportional_profile(profile, bits);
        sol.tunnel = full_utilization_tunnel(sol.compute_profile, sol.compute_profile.capacity(), buffer);
    }
    sol.schedule = pull_string(sol.tunnel);
    sol.energy = schedule_energy(sol.schedule, ch);
    return sol;
}

/// Schedule whose cumulative curve is the tunnel floor (just-in-time offloading).
inline OffloadSchedule follow_floor(const FeasibilityTunnel& tunnel) {
    if (!tunnel.feasible) throw InfeasibleError("cannot follow the floor of an infeasible tunnel");
    std::vector<double> x = tunnel.floor;
    if (!x.empty()) {
        x.front() = 0.0;
        x.back() = tunnel.total;
    }
    for (std::size_t k = 1; k < x.size(); ++k) x[k] = std::max(x[k], x[k - 1]);
    return schedule_from_cumulative(tunnel.times, std::move(x));
}

}  // namespace cocomp
