#include <gtest/gtest.h>

#include <cmath>

#include "eveopt/error.hpp"
#include "eveopt/rng.hpp"
#include "eveopt/schedules.hpp"

using namespace eveopt;
using namespace eveopt::schedules;

namespace {
constexpr DecayKind kAllKinds[] = {DecayKind::constant, DecayKind::exponential, DecayKind::inv_t,
                                   DecayKind::inv_sqrt_t};
}

TEST(ScheduleAlpha, StartsAtAlpha1) {
  for (auto kind : kAllKinds) EXPECT_EQ(schedule_alpha({kind, 0.37, 2e-3}, 0), 2e-3);
}

TEST(ScheduleAlpha, ZeroStrengthIsConstant) {
  for (auto kind : kAllKinds) {
    for (std::uint64_t t : {0, 1, 10, 100000}) EXPECT_EQ(schedule_alpha({kind, 0.0, 5e-4}, t), 5e-4);
  }
}

TEST(ScheduleAlpha, ExponentialReachesTenthAfterHundredSteps) {
  EXPECT_NEAR(schedule_alpha({DecayKind::exponential, std::log(10.0) / 100.0, 1.0}, 100), 0.1, 1e-15);
}

TEST(ScheduleAlpha, Formulas) {
  EXPECT_EQ(schedule_alpha({DecayKind::inv_t, 0.5, 1.0}, 4), 1.0 / 3.0);
  EXPECT_EQ(schedule_alpha({DecayKind::inv_sqrt_t, 0.75, 2.0}, 4), 1.0);
}

TEST(GammaForFinalRatio, Examples) {
  for (auto kind : kAllKinds) EXPECT_EQ(gamma_for_final_ratio(kind, 1.0, 37), 0.0);
  EXPECT_NEAR(gamma_for_final_ratio(DecayKind::inv_t, 10.0, 100), 0.09, 1e-17);
  EXPECT_EQ(gamma_for_final_ratio(DecayKind::inv_sqrt_t, 10.0, 99), 1.0);
  EXPECT_EQ(gamma_for_final_ratio(DecayKind::constant, 50.0, 10), 0.0);
}

TEST(GammaForFinalRatio, RejectsBadInputs) {
  EXPECT_THROW(gamma_for_final_ratio(DecayKind::exponential, 0.5, 10), ContractError);
  EXPECT_THROW(gamma_for_final_ratio(DecayKind::exponential, 10.0, 0), ContractError);
}

TEST(GammaForFinalRatio, RoundTripOverTheRatioGrid) {
  for (auto kind : kDecayingKinds) {
    for (double k : kFinalRatioGrid) {
      for (std::uint64_t T : {1, 7, 100, 800, 12345, 39100}) {
        const DecayPolicy policy{kind, gamma_for_final_ratio(kind, k, T), 3e-3};
        const double got = schedule_alpha(policy, T);
        const double want = 3e-3 / k;
        ASSERT_LT(std::abs(got - want) / want, 1e-12) << to_string(kind) << " k=" << k << " T=" << T;
      }
    }
  }
}

TEST(ScheduleAlpha, NonIncreasing) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    for (auto kind : kAllKinds) {
      const DecayPolicy policy{kind, std::pow(10.0, rng.uniform(-6.0, 1.0)), rng.uniform(1e-6, 1.0)};
      double prev = schedule_alpha(policy, 0);
      for (std::uint64_t t = 1; t < 500; ++t) {
        const double a = schedule_alpha(policy, t);
        ASSERT_LE(a, prev);
        prev = a;
      }
    }
  }
}

TEST(ScheduleAlpha, ExponentialBelowInverseTime) {
  Rng rng(10);
  for (int i = 0; i < 10000; ++i) {
    const double x = std::pow(10.0, rng.uniform(-4.0, 3.0));
    ASSERT_LE(std::exp(-x), 1.0 / (1.0 + x));
  }
}

TEST(DecayNames, RoundTrip) {
  for (auto kind : kAllKinds) EXPECT_EQ(parse_decay(to_string(kind)), kind);
  EXPECT_EQ(to_string(DecayKind::exponential), "exp");
  EXPECT_EQ(to_string(DecayKind::inv_sqrt_t), "inv-sqrt-t");
  EXPECT_FALSE(parse_decay("cosine").has_value());
}
