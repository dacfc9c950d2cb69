#include <gtest/gtest.h>

#include <sstream>

#include "cocomp/sim/csv.hpp"
#include "cocomp/sim/experiments.hpp"
#include "cocomp/sim/policies.hpp"
#include "support/random_instances.hpp"

using namespace cocomp;
using namespace cocomp::sim;

namespace {

SimConfig small_config() {
    nlohmann::json j = {
        {"deadline", 0.1},
        {"user", {{"frequency", 1e9}, {"cycles_per_bit", 500}, {"capacitance", 1e-28}}},
        {"helper", {{"frequency", 5e9}}},
        {"channel", {{"bandwidth", 1e6}, {"noise_dbm", -70}, {"path_loss_db", 60}}},
        {"trials", 40},
        {"seed", 7},
        {"sweeps",
         {{"idle_means", {0.01, 0.04}},
          {"loads", {0.5e6, 0.7e6}},
          {"buffers", {0.0, 0.2e6, 0.7e6, 1e6}},
          {"arrival_sizes", {2e4, 4e4}},
          {"interarrival_means", {0.02}}}}};
    return parse_config(j);
}

std::string csv_of(const SweepResult& r) {
    std::ostringstream os;
    write_csv(os, r);
    return os.str();
}

}  // namespace

TEST(Config, DecibelConversionAtBoundary) {
    const SimConfig c = small_config();
    EXPECT_NEAR(c.noise_watts, 1e-10, 1e-22);
    EXPECT_NEAR(c.mean_channel_gain(), 1e-6, 1e-18);
    EXPECT_EQ(c.buffer_bits, std::numeric_limits<double>::infinity());
}

TEST(Config, MissingFieldIsNamed) {
    nlohmann::json j = {{"deadline", 0.1},
                        {"user", {{"frequency", 1e9}, {"capacitance", 1e-28}}},
                        {"helper", {{"frequency", 5e9}}},
                        {"channel", {{"bandwidth", 1e6}, {"noise_dbm", -70}, {"path_loss_db", 60}}}};
    try {
        parse_config(j);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("user.cycles_per_bit"), std::string::npos);
    }
}

TEST(Config, RejectsNonPositiveQuantities) {
    SimConfig c = small_config();
    c.trials = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_config();
    c.idle_means = {};
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_config();
    c.deadline = -1;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Stats, WilsonAndPairwise) {
    const Interval ci = wilson(50, 100);
    EXPECT_LT(ci.lower, 0.5);
    EXPECT_GT(ci.upper, 0.5);
    EXPECT_NEAR(ci.lower, 0.4038, 1e-3);
    const Interval none = wilson(0, 20);
    EXPECT_EQ(none.lower, 0.0);
    EXPECT_GT(none.upper, 0.0);
    std::vector<double> v(1000, 0.1);
    EXPECT_NEAR(pairwise_sum(v), 100.0, 1e-12);
    const Summary s = summarize(v);
    EXPECT_NEAR(s.mean, 0.1, 1e-15);
    EXPECT_NEAR(s.std_error, 0.0, 1e-15);
}

TEST(Seeds, CounterBasedSplitIsStable) {
    EXPECT_EQ(trial_seed(1, 2, 3), trial_seed(1, 2, 3));
    EXPECT_NE(trial_seed(1, 2, 3), trial_seed(1, 2, 4));
    EXPECT_NE(trial_seed(1, 1, 3), trial_seed(1, 2, 3));
}

TEST(BenchmarkPolicy, FollowsFloorWithEmptyBuffer) {
    const CpuIdlingProfile p = testing_support::three_epoch_profile();
    const OffloadSchedule s = benchmark_schedule(p, 6e5, std::numeric_limits<double>::infinity());
    const BufferTrace tr = simulate_buffer(s, p, 0.0);
    for (double b : tr.backlog) EXPECT_NEAR(b, 0.0, 1e-6);
    EXPECT_TRUE(tr.deadline_met);
}

TEST(BenchmarkPolicy, EqualsOptimalOnDegenerateTunnel) {
    const std::vector<Epoch> e{{0.1, CpuState::Idle}};
    const CpuIdlingProfile p = build_profile(e, 5e9, 500, 0.1);
    const ChannelParams ch = testing_support::mean_channel();
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_NEAR(benchmark_energy(p, 1e6, inf, ch), solve_p1(p, 1e6, inf, ch).energy, 1e-15);
}

TEST(BenchmarkPolicy, StrictlyWorseWhenChordFits) {
    const std::vector<Epoch> e{{0.04, CpuState::Idle}, {0.02, CpuState::Busy}, {0.04, CpuState::Idle}};
    const CpuIdlingProfile p = build_profile(e, 5e9, 500, 0.1);
    const ChannelParams ch = testing_support::mean_channel();
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_GT(benchmark_energy(p, 4e5, inf, ch), solve_p1(p, 4e5, inf, ch).energy * (1 + 1e-6));
}

TEST(OneshotSweep, DeterministicAcrossThreads) {
    SimConfig c = small_config();
    const std::string a = csv_of(run_oneshot_sweep(c, {Policy::Optimal, Policy::Benchmark}));
    c.threads = 3;
    const std::string b = csv_of(run_oneshot_sweep(c, {Policy::Optimal, Policy::Benchmark}));
    EXPECT_EQ(a, b);
    c.seed = 8;
    EXPECT_NE(a, csv_of(run_oneshot_sweep(c, {Policy::Optimal, Policy::Benchmark})));
}

TEST(OneshotSweep, TrendsAndReplays) {
    const SweepResult r = run_oneshot_sweep(small_config(), {Policy::Optimal, Policy::Benchmark});
    ASSERT_EQ(r.rows.size(), 8u);
    for (std::size_t i = 0; i < r.rows.size(); i += 2) {
        const ResultRow& opt = r.rows[i];
        const ResultRow& ben = r.rows[i + 1];
        EXPECT_EQ(opt.feasible, ben.feasible);
        EXPECT_EQ(opt.replay_failures, 0u);
        EXPECT_EQ(ben.replay_failures, 0u);
        EXPECT_GE(opt.probability(), opt.probability_ci.lower);
        EXPECT_LE(opt.probability(), opt.probability_ci.upper);
        if (opt.feasible) { EXPECT_LE(opt.energy.mean, ben.energy.mean * (1 + 1e-9)); }
    }
    // rows are (idle mean, load) major: load 0.5e6 at the two idle means
    EXPECT_LE(r.rows[0].probability(), r.rows[4].probability());
    EXPECT_GE(r.rows[0].probability(), r.rows[2].probability());
}

TEST(BufferSweep, SaturatesAtLargeBuffer) {
    const SweepResult r = run_buffer_sweep(small_config(), {Policy::Proportional, Policy::LazyFirst});
    ASSERT_EQ(r.rows.size(), 8u);
    // Q = 0.7e6 and 1e6 are both >= L: each policy is flat there and the two coincide
    EXPECT_DOUBLE_EQ(r.rows[4].energy.mean, r.rows[6].energy.mean);
    EXPECT_DOUBLE_EQ(r.rows[5].energy.mean, r.rows[7].energy.mean);
    EXPECT_NEAR(r.rows[4].energy.mean, r.rows[5].energy.mean, 1e-9 * r.rows[4].energy.mean);
    for (const ResultRow& row : r.rows) EXPECT_EQ(row.replay_failures, 0u);
    EXPECT_LE(r.rows[2].energy.mean, r.rows[0].energy.mean);
}

TEST(BurstySweep, ProbabilityFallsWithSize) {
    const SweepResult r = run_bursty_sweep(small_config(), {Policy::Optimal, Policy::Benchmark});
    ASSERT_EQ(r.rows.size(), 4u);
    EXPECT_GE(r.rows[0].probability(), r.rows[2].probability());
    for (const ResultRow& row : r.rows) EXPECT_EQ(row.replay_failures, 0u);
    if (r.rows[0].feasible) { EXPECT_LE(r.rows[0].energy.mean, r.rows[1].energy.mean * (1 + 1e-9)); }
}

TEST(Crossover, DetectsSignChange) {
    std::vector<ResultRow> rows;
    auto add = [&](double q, Policy p, double e) {
        ResultRow r;
        r.grid = {{"buffer_bits", q}};
        r.policy = p;
        r.energy.mean = e;
        rows.push_back(r);
    };
    add(0, Policy::Proportional, 1.0);
    add(0, Policy::LazyFirst, 2.0);
    add(1, Policy::Proportional, 1.0);
    add(1, Policy::LazyFirst, 0.5);
    const auto q = find_crossover(rows, Policy::Proportional, Policy::LazyFirst);
    ASSERT_TRUE(q.has_value());
    EXPECT_EQ(*q, 1.0);
}
