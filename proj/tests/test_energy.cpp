#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cocomp/energy.hpp"

using namespace cocomp;

namespace {
const ChannelParams kCh{1e-6, 1e6, 1e-10};
const LocalComputeParams kUser{1e9, 500, 1e-28};
}  // namespace

TEST(RateToPower, KnownPoints) {
    EXPECT_EQ(rate_to_power(0.0, kCh), 0.0);
    EXPECT_NEAR(rate_to_power(1e6, kCh), 1e-10, 1e-22);
    EXPECT_NEAR(rate_to_power(2e6, kCh), 3e-10, 1e-22);
    EXPECT_THROW(rate_to_power(-1.0, kCh), ConfigError);
}

TEST(RateToPower, InverseRoundTrip) {
    for (double x : {1.0, 1e3, 1e5, 3.3e6, 2e7}) EXPECT_NEAR(power_to_rate(rate_to_power(x, kCh), kCh), x, 1e-9 * x);
}

TEST(EpochEnergy, KnownPoints) {
    EXPECT_EQ(epoch_energy(0.0, 0.01, kCh), 0.0);
    EXPECT_NEAR(epoch_energy(1e4, 0.01, kCh), 1e-6, 1e-18);
    EXPECT_NEAR(epoch_energy(2e4, 0.01, kCh), 3e-6, 1e-18);
    EXPECT_GT(epoch_energy(2e4, 0.01, kCh), 2 * epoch_energy(1e4, 0.01, kCh));
    EXPECT_THROW(epoch_energy(1.0, 0.0, kCh), ConfigError);
}

TEST(ScheduleEnergy, SumAndReductions) {
    const std::vector<double> zero{0.0, 0.0}, tau{0.01, 0.02};
    EXPECT_EQ(schedule_energy(zero, tau, kCh), 0.0);
    const std::vector<double> one{1e4}, t1{0.01};
    EXPECT_DOUBLE_EQ(schedule_energy(one, t1, kCh), epoch_energy(1e4, 0.01, kCh));
}

TEST(ScheduleEnergy, EqualSplitMinimizesTwoEqualEpochs) {
    // brute-force scan over the split of 2e4 bits between two 10 ms epochs
    const std::vector<double> tau{0.01, 0.01};
    double best = 1e300, best_a = -1;
    for (int i = 0; i <= 2000; ++i) {
        const double a = 2e4 * i / 2000.0;
        const std::vector<double> bits{a, 2e4 - a};
        if (double e = schedule_energy(bits, tau, kCh); e < best) {
            best = e;
            best_a = a;
        }
    }
    EXPECT_NEAR(best_a, 1e4, 1e-9);
    const std::vector<double> equal{1e4, 1e4}, skew{1.5e4, 0.5e4};
    EXPECT_LT(schedule_energy(equal, tau, kCh), schedule_energy(skew, tau, kCh));
}

TEST(LocalEnergy, ArithmeticAndLinearity) {
    EXPECT_EQ(local_energy(0.0, kUser), 0.0);
    EXPECT_NEAR(local_energy(1e6, kUser), 0.05, 1e-15);
    EXPECT_NEAR(local_energy(3e5, kUser) + local_energy(4e5, kUser), local_energy(7e5, kUser), 1e-15);
    EXPECT_NEAR(kUser.energy_per_cycle(), 1e-10, 1e-24);
}

TEST(MinOffload, Arithmetic) {
    EXPECT_NEAR(min_offload(0.7e6, 0.1, kUser), 5e5, 1e-6);
    EXPECT_EQ(min_offload(1e5, 0.1, kUser), 0.0);
    EXPECT_EQ(min_offload(1e5, 0.0, kUser), 1e5);
}

TEST(Units, DecibelConversions) {
    EXPECT_NEAR(dbm_to_watts(-70.0), 1e-10, 1e-22);
    EXPECT_NEAR(1.0 / db_to_linear(60.0), 1e-6, 1e-18);
}
