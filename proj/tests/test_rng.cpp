#include "bibc/rng.hpp"

#include <gtest/gtest.h>

TEST(Rng, SameSeedAndStreamReproduce) {
  bibc::Rng a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) {
    bibc::cplx za = a.cnormal(), zb = b.cnormal();
    EXPECT_EQ(za.real(), zb.real());
    EXPECT_EQ(za.imag(), zb.imag());
  }
}

TEST(Rng, StreamsDiffer) {
  bibc::Rng a(42, 0), b(42, 1);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.uniform() == b.uniform()) ++same;
  EXPECT_LT(same, 2);
}

TEST(Rng, SeedsDiffer) {
  bibc::Rng a(1, 0), b(2, 0);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.uniform() == b.uniform()) ++same;
  EXPECT_LT(same, 2);
}

TEST(Rng, UniformRange) {
  bibc::Rng rng(3, 0);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, ComplexNormalMoments) {
  bibc::Rng rng(2024, 0);
  const int n = 200000;
  bibc::cplx mean = 0.0;
  double power = 0.0, re_var = 0.0, im_var = 0.0;
  for (int i = 0; i < n; ++i) {
    bibc::cplx z = rng.cnormal();
    mean += z;
    power += std::norm(z);
    re_var += z.real() * z.real();
    im_var += z.imag() * z.imag();
  }
  mean /= static_cast<double>(n);
  power /= n;
  re_var /= n;
  im_var /= n;
  // standard errors: |mean| ~ 1/sqrt(n) ~ 0.0022, power ~ sqrt(2/n) wide margin
  EXPECT_LT(std::abs(mean), 0.01);
  EXPECT_NEAR(power, 1.0, 0.01);
  EXPECT_NEAR(re_var, 0.5, 0.01);
  EXPECT_NEAR(im_var, 0.5, 0.01);
}

TEST(Rng, MatrixFillIsDeterministic) {
  bibc::CMat w1 = bibc::Rng(9, 3).cnormal_matrix(4, 5);
  bibc::CMat w2 = bibc::Rng(9, 3).cnormal_matrix(4, 5);
  ASSERT_EQ(w1.rows(), 4);
  ASSERT_EQ(w1.cols(), 5);
  EXPECT_TRUE((w1.array() == w2.array()).all());
}

TEST(Rng, DeriveSeedSpreads) {
  std::uint64_t s1 = bibc::derive_seed(7, 0, 0);
  std::uint64_t s2 = bibc::derive_seed(7, 1, 0);
  std::uint64_t s3 = bibc::derive_seed(7, 0, 1);
  std::uint64_t s4 = bibc::derive_seed(8, 0, 0);
  EXPECT_NE(s1, s2);
  EXPECT_NE(s1, s3);
  EXPECT_NE(s2, s3);
  EXPECT_NE(s1, s4);
  EXPECT_EQ(s1, bibc::derive_seed(7, 0, 0));
}
