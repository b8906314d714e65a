#include <gtest/gtest.h>

#include <cmath>

#include "sdpcd/errors.hpp"
#include "sdpcd/spin_config.hpp"

using namespace sdpcd;

TEST(SpinConfig, InitialSpinsAreUnitVectors) {
  for (std::size_t m : {1u, 2u, 5u, 16u}) {
    const SpinConfig c = init_config(500, m, 11);
    EXPECT_EQ(c.num_spins(), 500u);
    EXPECT_EQ(c.rank(), m);
    EXPECT_LT(c.max_norm_error(), 1e-12);
  }
}

TEST(SpinConfig, InitialMagnetizationIsTheColumnSum) {
  const SpinConfig c = init_config(300, 4, 2);
  for (std::size_t k = 0; k < 4; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < 300; ++i) s += c.spin(i)[k];
    EXPECT_NEAR(c.magnetization()[k], s, 1e-10);
  }
}

TEST(SpinConfig, InitIsDeterministicPerSeed) {
  EXPECT_EQ(init_config(100, 3, 5), init_config(100, 3, 5));
  EXPECT_FALSE(init_config(100, 3, 5) == init_config(100, 3, 6));
}

TEST(SpinConfig, RankOneDrawsAreRandomSigns) {
  const SpinConfig c = init_config(4000, 1, 9);
  double sum = 0.0;
  for (std::size_t i = 0; i < c.num_spins(); ++i) {
    EXPECT_DOUBLE_EQ(std::abs(c.spin(i)[0]), 1.0);
    sum += c.spin(i)[0];
  }
  EXPECT_LT(std::abs(sum), 4.0 * std::sqrt(4000.0));
}

TEST(SpinConfig, ComponentsAreCenteredAndIsotropic) {
  // For a uniform point on S^{m-1}, E[x_k] = 0 and E[x_k^2] = 1/m.
  const std::size_t n = 20000, m = 5;
  const SpinConfig c = init_config(n, m, 4);
  for (std::size_t k = 0; k < m; ++k) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += c.spin(i)[k];
      s2 += c.spin(i)[k] * c.spin(i)[k];
    }
    EXPECT_NEAR(s / n, 0.0, 4.0 / std::sqrt(m * double(n)));
    EXPECT_NEAR(s2 / n, 1.0 / m, 0.01);
  }
}

TEST(SpinConfig, MagnetizationNormIsScaledByN) {
  const SpinConfig c(2, 2, {1.0, 0.0, 1.0, 0.0});
  EXPECT_DOUBLE_EQ(c.magnetization_norm(), 1.0);
  const SpinConfig d(2, 2, {1.0, 0.0, -1.0, 0.0});
  EXPECT_DOUBLE_EQ(d.magnetization_norm(), 0.0);
}

TEST(SpinConfig, RefreshAfterDirectWrites) {
  SpinConfig c(2, 2, {1.0, 0.0, 0.0, 1.0});
  c.spin(0)[0] = -1.0;
  c.refresh_magnetization();
  EXPECT_DOUBLE_EQ(c.magnetization()[0], -1.0);
  EXPECT_DOUBLE_EQ(c.magnetization()[1], 1.0);
}

TEST(SpinConfig, RejectsBadShapes) {
  EXPECT_THROW(SpinConfig(2, 0, {}), InvalidParameter);
  EXPECT_THROW(SpinConfig(2, 2, {1.0, 0.0, 1.0}), InvalidParameter);
  EXPECT_THROW(init_config(0, 3, 1), InvalidParameter);
  EXPECT_THROW(init_config(3, 0, 1), InvalidParameter);
}
