#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "eveopt/rng.hpp"

using eveopt::Rng;

TEST(Rng, EngineMatchesStandardSequence) {
  Rng rng(5489);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next();
  EXPECT_EQ(x, 9981545732273789042ull);
}

TEST(Rng, UniformInUnitInterval) {
  Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, BelowCoversRangeWithoutBias) {
  Rng rng(4);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
  EXPECT_EQ(rng.below(1), 0u);
}

TEST(Rng, NormalMoments) {
  Rng rng(5);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(DeriveSeed, DistinctStreams) {
  using namespace eveopt;
  std::set<std::uint64_t> seen;
  for (std::uint64_t master : {0, 1, 2}) {
    for (std::uint64_t stream = 1; stream <= 4; ++stream) {
      for (std::uint64_t index = 0; index < 100; ++index) seen.insert(derive_seed(master, stream, index));
    }
  }
  EXPECT_EQ(seen.size(), 3u * 4u * 100u);
  EXPECT_EQ(derive_seed(7, streams::init), derive_seed(7, streams::init));
}
