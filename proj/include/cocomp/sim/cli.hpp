#pragma once

// Command-line front end. Exit codes: 0 ok, 1 configuration error,
// 2 infeasible instance, 3 numeric failure.

#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cocomp/error.hpp"
#include "cocomp/partition.hpp"
#include "cocomp/sim/config.hpp"
#include "cocomp/sim/csv.hpp"
#include "cocomp/sim/experiments.hpp"
#include "cocomp/sim/policies.hpp"
#include "cocomp/string_pull.hpp"
#include "cocomp/text_io.hpp"
#include "cocomp/tunnel.hpp"

namespace cocomp::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kInfeasible = 2, kNumericFailure = 3 };

struct Options {
    std::string command;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> threads;
    std::string out;
    std::optional<std::string> policy;
    std::optional<double> theta;
};

namespace detail {

inline ChannelParams instance_channel(const sim::SimConfig& c) {
    return c.channel(c.h_sq.value_or(c.mean_channel_gain()));
}

inline CpuIdlingProfile instance_profile(const sim::SimConfig& c) {
    if (c.epochs.empty()) throw ConfigError("missing field: instance.epochs");
    return build_profile(c.epochs, c.helper_frequency, c.user.cycles_per_bit, c.deadline);
}

inline void run_solve(const sim::SimConfig& c, sim::Policy policy, std::ostream& out) {
    const CpuIdlingProfile profile = instance_profile(c);
    const ChannelParams ch = instance_channel(c);
    double bits;
    std::optional<PartitionResult> part;
    if (c.offload_bits) {
        bits = *c.offload_bits;
    } else {
        part = optimize_partition(c.load_bits, profile, c.buffer_bits, ch, c.user, c.deadline);
        bits = part->offload_bits;
    }
    OffloadSchedule s;
    switch (policy) {
        case sim::Policy::Optimal: s = solve_p1(profile, bits, c.buffer_bits, ch).schedule; break;
        case sim::Policy::Benchmark: s = sim::benchmark_schedule(profile, bits, c.buffer_bits); break;
        case sim::Policy::Proportional: {
            cocomp::detail::check_capacity(profile, bits);
            const CpuIdlingProfile scaled = proportional_profile(profile, bits);
            s = pull_string(full_utilization_tunnel(scaled, scaled.capacity(), c.buffer_bits));
            break;
        }
        case sim::Policy::LazyFirst:
            cocomp::detail::check_capacity(profile, bits);
            s = pull_string(lazy_first_tunnel(profile, bits, c.buffer_bits));
            break;
    }
    out << "# policy=" << sim::to_string(policy) << " offload_bits=" << io::num(bits)
        << " transmit_energy_j=" << io::num(schedule_energy(s, ch));
    if (part) out << " local_energy_j=" << io::num(part->local_energy);
    out << '\n';
    io::write_schedule(out, s);
}

inline void run_tunnel(const sim::SimConfig& c, sim::Policy policy, std::optional<double> theta, std::ostream& out) {
    const CpuIdlingProfile profile = instance_profile(c);
    FeasibilityTunnel t;
    if (!c.arrivals.empty()) {
        if (!theta) throw ConfigError("missing field: instance.theta (or --theta) for a bursty tunnel");
        t = bursty_effective_tunnel(profile, make_arrivals(c.arrivals, c.deadline), *theta);
    } else {
        if (!c.offload_bits) throw ConfigError("missing field: instance.offload_bits");
        const double bits = *c.offload_bits;
        if (policy == sim::Policy::LazyFirst) {
            cocomp::detail::check_capacity(profile, bits);
            t = lazy_first_tunnel(profile, bits, c.buffer_bits);
        } else {
            t = solve_p1(profile, bits, c.buffer_bits, instance_channel(c)).tunnel;
        }
    }
    out << "# feasible=" << (t.feasible ? 1 : 0) << " total_bits=" << io::num(t.total) << '\n';
    io::write_tunnel(out, t);
    if (!t.feasible) throw InfeasibleError("tunnel ceiling drops below its floor");
}

inline std::vector<sim::Policy> policies_for(const std::string& cmd, const std::optional<std::string>& chosen) {
    if (chosen) return {sim::parse_policy(*chosen)};
    if (cmd == "buffer") return {sim::Policy::Proportional, sim::Policy::LazyFirst};
    return {sim::Policy::Optimal, sim::Policy::Benchmark};
}

inline int dispatch(const Options& o, std::ostream& stdout_stream) {
    sim::SimConfig c = sim::load_config(o.config_path);
    if (o.seed) c.seed = *o.seed;
    if (o.trials) c.trials = *o.trials;
    if (o.threads) c.threads = *o.threads;
    c.validate();

    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out, std::ios::binary);
        if (!file) throw ConfigError("cannot open output file " + o.out);
    }
    std::ostream& out = o.out.empty() ? stdout_stream : file;

    if (o.command == "solve") {
        run_solve(c, o.policy ? sim::parse_policy(*o.policy) : sim::Policy::Optimal, out);
        return kOk;
    }
    if (o.command == "tunnel") {
        run_tunnel(c, o.policy ? sim::parse_policy(*o.policy) : sim::Policy::Optimal, o.theta ? o.theta : c.theta, out);
        return kOk;
    }
    const auto policies = policies_for(o.command, o.policy);
    sim::SweepResult r;
    if (o.command == "oneshot") r = sim::run_oneshot_sweep(c, policies);
    else if (o.command == "buffer") r = sim::run_buffer_sweep(c, policies);
    else r = sim::run_bursty_sweep(c, policies);
    sim::write_csv(out, r);
    if (o.command == "buffer") {
        std::cerr << "crossover_buffer_bits=";
        if (r.crossover_buffer) std::cerr << io::num(*r.crossover_buffer, 12);
        else std::cerr << "none";
        std::cerr << '\n';
    }
    return kOk;
}

}  // namespace detail

/// Parses arguments and runs one subcommand; never throws.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Energy-efficient peer-to-peer offloading: solver and Monte Carlo experiments"};
    app.require_subcommand(1);
    Options o;
    const char* names[][2] = {{"oneshot", "computing probability and energy vs idle interval"},
                              {"buffer", "energy vs helper buffer size"},
                              {"bursty", "computing probability and energy vs arrival size"},
                              {"solve", "dump the schedule for the configured instance"},
                              {"tunnel", "dump the feasibility tunnel for the configured instance"}};
    std::string policy, seed_text;
    int trials = 0, threads = 0;
    double theta = 0.0;
    for (auto& [name, help] : names) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config_path, "JSON configuration file")->required();
        sub->add_option("--seed", seed_text, "master seed (unsigned 64-bit)");
        sub->add_option("--trials", trials, "trials per grid point")->check(CLI::PositiveNumber);
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", o.out, "output CSV path (default: stdout)");
        sub->add_option("--policy", policy, "policy")
            ->check(CLI::IsMember({"optimal", "benchmark", "proportional", "lazy-first"}));
        if (std::string(name) == "tunnel") sub->add_option("--theta", theta, "partitioning ratio for bursty tunnels");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
    for (CLI::App* sub : app.get_subcommands()) {
        o.command = sub->get_name();
        if (sub->count("--seed")) {
            try {
                std::size_t used = 0;
                if (seed_text.empty() || seed_text[0] == '-') throw std::invalid_argument(seed_text);
                o.seed = std::stoull(seed_text, &used, 0);
                if (used != seed_text.size()) throw std::invalid_argument(seed_text);
            } catch (const std::exception&) {
                err << "error: --seed must be an unsigned 64-bit integer\n";
                return kConfigError;
            }
        }
        if (sub->count("--trials")) o.trials = trials;
        if (sub->count("--threads")) o.threads = threads;
        if (sub->count("--policy")) o.policy = policy;
        if (o.command == "tunnel" && sub->count("--theta")) o.theta = theta;
    }
    try {
        return detail::dispatch(o, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    }
}

}  // namespace cocomp::cli
