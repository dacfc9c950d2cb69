#pragma once

// Monte Carlo sweeps. Every trial draws its randomness from seeds derived
// from (master seed, stream, trial index) only, so all grid points share the
// same underlying sample paths and results do not depend on thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "cocomp/cpu_profile.hpp"
#include "cocomp/energy.hpp"
#include "cocomp/error.hpp"
#include "cocomp/partition.hpp"
#include "cocomp/sim/config.hpp"
#include "cocomp/sim/policies.hpp"
#include "cocomp/sim/stats.hpp"
#include "cocomp/string_pull.hpp"

namespace cocomp::sim {

inline constexpr std::uint64_t kCpuStream = 1;
inline constexpr std::uint64_t kFadingStream = 2;
inline constexpr std::uint64_t kArrivalStream = 3;

struct TrialOutcome {
    bool feasible = false;
    double energy = 0.0;
    double local_energy = 0.0;
    double transmit_energy = 0.0;
    double offload_bits = 0.0;
    bool replay_ok = true;  // chosen schedule replays without overflow and meets the deadline
    Policy policy = Policy::Optimal;
};

struct ResultRow {
    std::vector<std::pair<std::string, double>> grid;
    Policy policy = Policy::Optimal;
    std::size_t trials = 0;
    std::size_t feasible = 0;
    Interval probability_ci;
    Summary energy;  // over feasible trials
    Summary local_energy;
    Summary transmit_energy;
    Summary offload_bits;
    std::size_t replay_failures = 0;

    double probability() const { return trials ? static_cast<double>(feasible) / static_cast<double>(trials) : 0.0; }
};

struct SweepResult {
    std::string experiment;
    std::vector<ResultRow> rows;
    std::optional<double> crossover_buffer;  // buffer sweep only
};

/// Channel power gain for a trial: mean gain times a unit exponential under Rayleigh fading.
inline double sample_gain(const SimConfig& c, std::uint64_t seed) {
    if (c.h_sq) return *c.h_sq;
    if (c.fading == Fading::None) return c.mean_channel_gain();
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> unit_exp(1.0);
    double g = unit_exp(rng);
    while (!(g > 0.0)) g = unit_exp(rng);
    return c.mean_channel_gain() * g;
}

inline CpuIdlingProfile sample_profile(const SimConfig& c, std::uint64_t seed, double mean_idle) {
    const auto epochs = sample_cpu_process(seed, c.deadline, mean_idle, c.mean_busy, c.initial_state);
    return build_profile(epochs, c.helper_frequency, c.user.cycles_per_bit, c.deadline);
}

namespace detail {

/// Runs body(i) for i in [0, n) on `threads` workers; the first exception is rethrown.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) body(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline ResultRow aggregate(std::vector<std::pair<std::string, double>> grid, Policy policy,
                           const std::vector<TrialOutcome>& outcomes) {
    ResultRow row;
    row.grid = std::move(grid);
    row.policy = policy;
    row.trials = outcomes.size();
    std::vector<double> e, loc, tx, bits;
    for (const TrialOutcome& o : outcomes) {
        if (!o.feasible) continue;
        ++row.feasible;
        e.push_back(o.energy);
        loc.push_back(o.local_energy);
        tx.push_back(o.transmit_energy);
        bits.push_back(o.offload_bits);
        if (!o.replay_ok) ++row.replay_failures;
    }
    row.probability_ci = wilson(row.feasible, row.trials);
    row.energy = summarize(e);
    row.local_energy = summarize(loc);
    row.transmit_energy = summarize(tx);
    row.offload_bits = summarize(bits);
    return row;
}

inline TrialOutcome from_partition(const PartitionResult& r, Policy p) {
    TrialOutcome o;
    o.feasible = true;
    o.policy = p;
    o.local_energy = r.local_energy;
    o.transmit_energy = r.transmit_energy;
    o.energy = r.total_energy();
    o.offload_bits = r.offload_bits;
    if (!std::isfinite(o.energy)) throw NumericError("non-finite energy for a feasible trial");
    return o;
}

inline bool replay_one_shot(const OffloadSchedule& s, const CpuIdlingProfile& compute_profile, double buffer) {
    const BufferTrace tr = simulate_buffer(s, compute_profile, buffer);
    return !tr.overflow && tr.deadline_met;
}

}  // namespace detail

/// One trial of the one-shot experiment for the given policy.
inline TrialOutcome one_shot_trial(const CpuIdlingProfile& profile, double load, double buffer,
                                   const ChannelParams& ch, const SimConfig& c, Policy policy) {
    TrialOutcome o;
    o.policy = policy;
    try {
        if (policy == Policy::Optimal || policy == Policy::Proportional) {
            const PartitionResult r = optimize_partition(load, profile, buffer, ch, c.user, c.deadline);
            o = detail::from_partition(r, policy);
            const OffloadSolution sol = solve_p1(profile, r.offload_bits, buffer, ch);
            o.replay_ok = detail::replay_one_shot(sol.schedule, sol.compute_profile, buffer);
        } else if (policy == Policy::Benchmark) {
            auto e = [&](double l) { return benchmark_energy(profile, l, buffer, ch); };
            const PartitionResult r = partition_with(e, load, profile, c.user, c.deadline);
            o = detail::from_partition(r, policy);
            const OffloadSchedule s = benchmark_schedule(profile, r.offload_bits, buffer);
            const CpuIdlingProfile cp = buffer >= r.offload_bits || tol::bits_eq(r.offload_bits, profile.capacity())
                                            ? profile
                                            : proportional_profile(profile, r.offload_bits);
            o.replay_ok = detail::replay_one_shot(s, cp, buffer);
        } else {
            auto e = [&](double l) { return lazy_first_energy(profile, l, buffer, ch); };
            const PartitionResult r = partition_with(e, load, profile, c.user, c.deadline);
            o = detail::from_partition(r, policy);
            const OffloadSchedule s = pull_string(lazy_first_tunnel(profile, r.offload_bits, buffer));
            // the helper computes along the tunnel floor, so replay its offset profile
            const BufferTrace tr = simulate_buffer(s, profile, std::numeric_limits<double>::infinity());
            o.replay_ok = tr.deadline_met;
            for (std::size_t k = 0; k < s.times.size() && o.replay_ok; ++k) {
                const double backlog = s.cumulative[k] - std::max(profile.u_bit_at(s.times[k]) -
                                                                      (profile.capacity() - r.offload_bits), 0.0);
                if (!tol::bits_le(backlog, buffer) || !tol::bits_le(0.0, backlog + tol::bits(s.cumulative[k])))
                    o.replay_ok = false;
            }
        }
    } catch (const InfeasibleError&) {
        o = TrialOutcome{};
        o.policy = policy;
    }
    return o;
}

/// Computing probability and energy versus the mean idle interval, for each load.
inline SweepResult run_oneshot_sweep(const SimConfig& c, const std::vector<Policy>& policies) {
    c.validate();
    SweepResult out{"oneshot", {}, std::nullopt};
    const std::size_t n = static_cast<std::size_t>(c.trials);
    for (double mean_idle : c.idle_means) {
        // outcomes[load][policy][trial]
        std::vector<std::vector<std::vector<TrialOutcome>>> res(
            c.loads.size(), std::vector<std::vector<TrialOutcome>>(policies.size(), std::vector<TrialOutcome>(n)));
        detail::parallel_for(n, c.threads, [&](std::size_t i) {
            const CpuIdlingProfile profile = sample_profile(c, trial_seed(c.seed, kCpuStream, i), mean_idle);
            const ChannelParams ch = c.channel(sample_gain(c, trial_seed(c.seed, kFadingStream, i)));
            for (std::size_t li = 0; li < c.loads.size(); ++li)
                for (std::size_t pi = 0; pi < policies.size(); ++pi)
                    res[li][pi][i] = one_shot_trial(profile, c.loads[li], c.buffer_bits, ch, c, policies[pi]);
        });
        for (std::size_t li = 0; li < c.loads.size(); ++li)
            for (std::size_t pi = 0; pi < policies.size(); ++pi)
                out.rows.push_back(detail::aggregate({{"mean_idle", mean_idle}, {"load_bits", c.loads[li]}},
                                                     policies[pi], res[li][pi]));
    }
    return out;
}

/// Smallest grid buffer from which `challenger` beats `incumbent` on mean
/// energy, provided the incumbent wins somewhere below it.
inline std::optional<double> find_crossover(const std::vector<ResultRow>& rows, Policy incumbent, Policy challenger) {
    std::vector<std::pair<double, double>> inc, cha;
    for (const ResultRow& r : rows) {
        if (r.policy == incumbent) inc.emplace_back(r.grid.front().second, r.energy.mean);
        if (r.policy == challenger) cha.emplace_back(r.grid.front().second, r.energy.mean);
    }
    bool incumbent_won = false;
    for (std::size_t i = 0; i < inc.size() && i < cha.size(); ++i) {
        const double a = inc[i].second, b = cha[i].second;
        if (std::isnan(a) || std::isnan(b)) continue;
        const double slack = 1e-9 * std::max(std::abs(a), std::abs(b));
        if (a < b - slack) incumbent_won = true;
        else if (incumbent_won && b < a - slack) return inc[i].first;
    }
    return std::nullopt;
}

/// Mean energy versus helper buffer size at a fixed load.
inline SweepResult run_buffer_sweep(const SimConfig& c, const std::vector<Policy>& policies) {
    c.validate();
    SweepResult out{"buffer", {}, std::nullopt};
    const std::size_t n = static_cast<std::size_t>(c.trials);
    std::vector<double> buffers = c.buffers;
    std::sort(buffers.begin(), buffers.end());
    std::vector<std::vector<std::vector<TrialOutcome>>> res(
        buffers.size(), std::vector<std::vector<TrialOutcome>>(policies.size(), std::vector<TrialOutcome>(n)));
    detail::parallel_for(n, c.threads, [&](std::size_t i) {
        const CpuIdlingProfile profile = sample_profile(c, trial_seed(c.seed, kCpuStream, i), c.mean_idle);
        const ChannelParams ch = c.channel(sample_gain(c, trial_seed(c.seed, kFadingStream, i)));
        for (std::size_t qi = 0; qi < buffers.size(); ++qi)
            for (std::size_t pi = 0; pi < policies.size(); ++pi)
                res[qi][pi][i] = one_shot_trial(profile, c.load_bits, buffers[qi], ch, c, policies[pi]);
    });
    for (std::size_t qi = 0; qi < buffers.size(); ++qi)
        for (std::size_t pi = 0; pi < policies.size(); ++pi)
            out.rows.push_back(detail::aggregate({{"buffer_bits", buffers[qi]}, {"load_bits", c.load_bits}},
                                                 policies[pi], res[qi][pi]));
    out.crossover_buffer = find_crossover(out.rows, Policy::Proportional, Policy::LazyFirst);
    return out;
}

/// One trial of the bursty experiment. The helper buffer is assumed to hold all offloaded data.
inline TrialOutcome bursty_trial(const CpuIdlingProfile& profile, const ArrivalProcess& arrivals,
                                 const ChannelParams& ch, const SimConfig& c, Policy policy) {
    TrialOutcome o;
    o.policy = policy;
    try {
        PartitionResult r;
        OffloadSchedule s;
        if (policy == Policy::Benchmark) {
            auto e = [&](double th) { return bursty_benchmark_energy(profile, arrivals, th, ch); };
            r = partition_theta_with(e, arrivals, profile, c.user, c.deadline);
            s = bursty_benchmark_schedule(profile, arrivals, r.theta);
        } else {
            r = optimize_theta(arrivals, profile, std::numeric_limits<double>::infinity(), ch, c.user, c.deadline);
            s = pull_string(bursty_effective_tunnel(profile, arrivals, r.theta));
        }
        o = detail::from_partition(r, policy);
        const BufferTrace tr = simulate_buffer(s, profile, std::numeric_limits<double>::infinity());
        const LocalTrace lt = verify_local_schedule(arrivals, r.theta, c.user, c.deadline);
        o.replay_ok = tr.deadline_met && lt.complete;
    } catch (const InfeasibleError&) {
        o = TrialOutcome{};
        o.policy = policy;
    }
    return o;
}

/// Computing probability and energy versus expected arrival size, for each inter-arrival mean.
inline SweepResult run_bursty_sweep(const SimConfig& c, const std::vector<Policy>& policies) {
    c.validate();
    SweepResult out{"bursty", {}, std::nullopt};
    const std::size_t n = static_cast<std::size_t>(c.trials);
    for (double mean_ia : c.interarrival_means) {
        std::vector<std::vector<std::vector<TrialOutcome>>> res(
            c.arrival_sizes.size(),
            std::vector<std::vector<TrialOutcome>>(policies.size(), std::vector<TrialOutcome>(n)));
        detail::parallel_for(n, c.threads, [&](std::size_t i) {
            const CpuIdlingProfile profile = sample_profile(c, trial_seed(c.seed, kCpuStream, i), c.mean_idle);
            const ChannelParams ch = c.channel(sample_gain(c, trial_seed(c.seed, kFadingStream, i)));
            // unit-size draw, rescaled per grid point so sizes grow linearly with the mean
            const ArrivalProcess unit = sample_arrivals(trial_seed(c.seed, kArrivalStream, i), c.deadline, mean_ia,
                                                        1.0 - c.size_spread, 1.0 + c.size_spread);
            for (std::size_t si = 0; si < c.arrival_sizes.size(); ++si) {
                std::vector<Arrival> ev;
                for (const Arrival& a : unit.events())
                    if (a.bits > 0.0) ev.push_back({a.time, a.bits * c.arrival_sizes[si]});
                const ArrivalProcess arrivals = make_arrivals(std::move(ev), c.deadline);
                for (std::size_t pi = 0; pi < policies.size(); ++pi)
                    res[si][pi][i] = bursty_trial(profile, arrivals, ch, c, policies[pi]);
            }
        });
        for (std::size_t si = 0; si < c.arrival_sizes.size(); ++si)
            for (std::size_t pi = 0; pi < policies.size(); ++pi)
                out.rows.push_back(detail::aggregate(
                    {{"arrival_size", c.arrival_sizes[si]}, {"mean_interarrival", mean_ia}}, policies[pi],
                    res[si][pi]));
    }
    return out;
}

}  // namespace cocomp::sim
