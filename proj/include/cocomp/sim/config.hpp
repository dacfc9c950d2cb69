#pragma once

// JSON experiment configuration. Decibel quantities are converted to linear
// units here and nowhere else.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cocomp/cpu_profile.hpp"
#include "cocomp/energy.hpp"
#include "cocomp/error.hpp"

namespace cocomp::sim {

enum class Fading { None, Rayleigh };

struct SimConfig {
    double deadline = 0.0;
    LocalComputeParams user;
    double helper_frequency = 0.0;
    double buffer_bits = std::numeric_limits<double>::infinity();

    double bandwidth = 0.0;
    double noise_watts = 0.0;
    double path_loss_db = 0.0;
    Fading fading = Fading::Rayleigh;

    double mean_idle = 0.02;
    double mean_busy = 0.02;
    InitialState initial_state = InitialState::Random;

    double mean_interarrival = 0.02;

    double load_bits = 0.7e6;
    int trials = 2000;
    std::uint64_t seed = 1;
    int threads = 1;

    // sweep grids
    std::vector<double> idle_means{0.005, 0.01, 0.02, 0.04, 0.08, 0.16};
    std::vector<double> loads{0.5e6, 0.7e6, 0.9e6};
    std::vector<double> buffers{0.0, 0.05e6, 0.1e6, 0.2e6, 0.3e6, 0.4e6, 0.5e6, 0.6e6, 0.7e6, 0.8e6, 1.0e6};
    std::vector<double> arrival_sizes{1e4, 2e4, 3e4, 4e4, 5e4, 6e4};
    std::vector<double> interarrival_means{0.01, 0.02, 0.04};
    double size_spread = 0.5;  // sizes uniform on [(1 - w) m, (1 + w) m]

    // single instance for `solve` / `tunnel`
    std::vector<Epoch> epochs;
    std::vector<Arrival> arrivals;
    std::optional<double> offload_bits;
    std::optional<double> theta;
    std::optional<double> h_sq;  // fixed channel gain overriding path loss

    double mean_channel_gain() const { return 1.0 / db_to_linear(path_loss_db); }

    ChannelParams channel(double gain) const { return {gain, bandwidth, noise_watts}; }

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
        };
        positive(deadline, "deadline");
        user.validate();
        positive(helper_frequency, "helper.frequency");
        if (!(buffer_bits >= 0.0)) throw ConfigError("helper.buffer_bits must be non-negative");
        positive(bandwidth, "channel.bandwidth");
        positive(noise_watts, "channel.noise_dbm");
        positive(mean_idle, "cpu.mean_idle");
        positive(mean_busy, "cpu.mean_busy");
        positive(mean_interarrival, "arrivals.mean_interarrival");
        if (!(load_bits >= 0.0)) throw ConfigError("load_bits must be non-negative");
        if (trials < 1) throw ConfigError("trials must be at least 1");
        if (threads < 1) throw ConfigError("threads must be at least 1");
        if (!(size_spread >= 0.0 && size_spread <= 1.0)) throw ConfigError("sweeps.size_spread must lie in [0, 1]");
        if (h_sq) positive(*h_sq, "channel.h_sq");
        auto grid = [&](const std::vector<double>& g, const char* name, bool allow_zero) {
            if (g.empty()) throw ConfigError(std::string(name) + " must not be empty");
            for (double v : g)
                if (!std::isfinite(v) || v < 0.0 || (!allow_zero && v == 0.0))
                    throw ConfigError(std::string(name) + " has an invalid entry");
        };
        grid(idle_means, "sweeps.idle_means", false);
        grid(loads, "sweeps.loads", true);
        grid(buffers, "sweeps.buffers", true);
        grid(arrival_sizes, "sweeps.arrival_sizes", true);
        grid(interarrival_means, "sweeps.interarrival_means", false);
    }
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError("missing field: " + path + key);
    return j.at(key);
}

inline double number(const json& j, const char* key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_number()) throw ConfigError("field " + path + key + " must be a number");
    return v.get<double>();
}

template <class T>
void optional_field(const json& j, const char* key, const std::string& path, T& out) {
    if (!j.is_object() || !j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("field " + path + key + " has the wrong type");
    }
}

inline const json& section(const json& j, const char* key) {
    static const json empty = json::object();
    if (!j.contains(key)) return empty;
    if (!j.at(key).is_object()) throw ConfigError("field " + std::string(key) + " must be an object");
    return j.at(key);
}

}  // namespace detail

/// Parses a configuration document. Physical constants of the user, helper
/// and channel are required; everything else has a default.
inline SimConfig parse_config(const nlohmann::json& j) {
    using detail::number;
    using detail::optional_field;
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    SimConfig c;
    c.deadline = number(j, "deadline", "");

    const auto& user = detail::require(j, "user", "");
    c.user.frequency = number(user, "frequency", "user.");
    c.user.cycles_per_bit = number(user, "cycles_per_bit", "user.");
    c.user.capacitance = number(user, "capacitance", "user.");

    const auto& helper = detail::require(j, "helper", "");
    c.helper_frequency = number(helper, "frequency", "helper.");
    if (helper.contains("buffer_bits") && !helper.at("buffer_bits").is_null())
        c.buffer_bits = number(helper, "buffer_bits", "helper.");

    const auto& ch = detail::require(j, "channel", "");
    c.bandwidth = number(ch, "bandwidth", "channel.");
    c.noise_watts = dbm_to_watts(number(ch, "noise_dbm", "channel."));
    c.path_loss_db = number(ch, "path_loss_db", "channel.");
    std::string fading = "rayleigh";
    optional_field(ch, "fading", "channel.", fading);
    if (fading == "rayleigh") c.fading = Fading::Rayleigh;
    else if (fading == "none") c.fading = Fading::None;
    else throw ConfigError("channel.fading must be \"rayleigh\" or \"none\"");
    if (ch.contains("h_sq")) c.h_sq = number(ch, "h_sq", "channel.");

    const auto& cpu = detail::section(j, "cpu");
    optional_field(cpu, "mean_idle", "cpu.", c.mean_idle);
    optional_field(cpu, "mean_busy", "cpu.", c.mean_busy);
    std::string initial = "random";
    optional_field(cpu, "initial_state", "cpu.", initial);
    if (initial == "random") c.initial_state = InitialState::Random;
    else if (initial == "idle") c.initial_state = InitialState::Idle;
    else if (initial == "busy") c.initial_state = InitialState::Busy;
    else throw ConfigError("cpu.initial_state must be random, idle or busy");

    const auto& arr = detail::section(j, "arrivals");
    optional_field(arr, "mean_interarrival", "arrivals.", c.mean_interarrival);

    optional_field(j, "load_bits", "", c.load_bits);
    optional_field(j, "trials", "", c.trials);
    optional_field(j, "seed", "", c.seed);
    optional_field(j, "threads", "", c.threads);

    const auto& sw = detail::section(j, "sweeps");
    optional_field(sw, "idle_means", "sweeps.", c.idle_means);
    optional_field(sw, "loads", "sweeps.", c.loads);
    optional_field(sw, "buffers", "sweeps.", c.buffers);
    optional_field(sw, "arrival_sizes", "sweeps.", c.arrival_sizes);
    optional_field(sw, "interarrival_means", "sweeps.", c.interarrival_means);
    optional_field(sw, "size_spread", "sweeps.", c.size_spread);

    const auto& inst = detail::section(j, "instance");
    if (inst.contains("epochs")) {
        for (const auto& e : inst.at("epochs")) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw ConfigError("instance.epochs entries must be [duration, state]");
            const double s = e[1].get<double>();
            if (s != 0.0 && s != 1.0) throw ConfigError("instance.epochs state must be 0 (busy) or 1 (idle)");
            c.epochs.push_back({e[0].get<double>(), s == 1.0 ? CpuState::Idle : CpuState::Busy});
        }
    }
    if (inst.contains("arrivals")) {
        for (const auto& e : inst.at("arrivals")) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw ConfigError("instance.arrivals entries must be [time, bits]");
            c.arrivals.push_back({e[0].get<double>(), e[1].get<double>()});
        }
    }
    if (inst.contains("offload_bits")) c.offload_bits = number(inst, "offload_bits", "instance.");
    if (inst.contains("theta")) c.theta = number(inst, "theta", "instance.");

    c.validate();
    return c;
}

inline SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON in ") + path + ": " + e.what());
    }
    return parse_config(j);
}

}  // namespace cocomp::sim
