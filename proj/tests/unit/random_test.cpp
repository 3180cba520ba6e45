#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bnn/random.hpp"

namespace bnn {
namespace {

TEST(Rng, ReproducibleStreams) {
  Rng a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  const auto x = a.next_u64();
  EXPECT_EQ(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
  EXPECT_NE(x, d.next_u64());
}

TEST(Rng, SubstreamsDiffer) {
  auto a = Rng::substream(7, 0, 0);
  auto b = Rng::substream(7, 0, 1);
  auto c = Rng::substream(7, 1, 0);
  auto plain = Rng(7, 0);
  const auto va = a.next_u64();
  EXPECT_NE(va, b.next_u64());
  EXPECT_NE(va, c.next_u64());
  EXPECT_NE(va, plain.next_u64());
}

TEST(Rng, KnownFirstDraw) {
  // Pins the documented seeding rule so outputs stay stable across builds.
  std::seed_seq seq{42u, 0u, 0u, 0u, 0u, 0u, 0x626e6eu};
  std::mt19937_64 ref(seq);
  Rng rng(42);
  EXPECT_EQ(rng.next_u64(), ref());
}

TEST(Rng, UniformAndNormalMoments) {
  Rng rng(1);
  const int n = 200000;
  double su = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.02);
}

TEST(Rng, UniformIndexCoversRange) {
  Rng rng(2);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_index(7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

}  // namespace
}  // namespace bnn
