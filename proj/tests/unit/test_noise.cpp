#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "kslab/noise.hpp"

using kslab::NoisePurpose;
using kslab::NoiseStream;
using kslab::Philox4x32;

TEST(Philox, KnownAnswerVectors) {
  // Published Philox4x32-10 test vectors.
  struct Case {
    Philox4x32::Counter ctr;
    Philox4x32::Key key;
    Philox4x32::Counter expect;
  };
  const Case cases[] = {
      {{0, 0, 0, 0}, {0, 0}, {0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}},
      {{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
       {0xffffffff, 0xffffffff},
       {0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}},
      {{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
       {0xa4093822, 0x299f31d0},
       {0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}},
  };
  for (const auto& c : cases) EXPECT_EQ(Philox4x32::generate(c.ctr, c.key), c.expect);
}

TEST(NoiseStream, PureFunctionOfKey) {
  const NoiseStream a(42), b(42);
  std::vector<double> x(3), y(3), z(3);
  a.increment(1, 7, 9, 0.01, x);
  // Interleave other draws; the keyed value must not move.
  b.increment(0, 0, 0, 0.01, z);
  b.increment(1, 7, 9, 0.01, y);
  EXPECT_EQ(x, y);
  a.increment(1, 7, 10, 0.01, z);
  EXPECT_NE(x, z);
}

TEST(NoiseStream, IncrementScalesBySqrtDt) {
  const NoiseStream s(3);
  std::vector<double> xi(2), inc(2);
  s.normals(NoisePurpose::kIncrement, 0, 5, 2, xi);
  s.increment(0, 5, 2, 0.25, inc);
  EXPECT_EQ(inc[0], xi[0] * 0.5);
  EXPECT_EQ(inc[1], xi[1] * 0.5);
}

TEST(NoiseStream, PurposesDoNotCollide) {
  const NoiseStream s(11);
  std::vector<double> a(2), b(2);
  s.normals(NoisePurpose::kIncrement, 0, 0, 0, a);
  s.normals(NoisePurpose::kInitialSample, 0, 0, 0, b);
  EXPECT_NE(a, b);
}

TEST(NoiseStream, MomentsAndIndependenceSmoke) {
  const NoiseStream s(2024);
  const int n = 20000;
  double sum = 0, sum2 = 0, cross = 0, lag = 0;
  double prev = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> v(2);
    s.normals(NoisePurpose::kIncrement, 0, static_cast<std::uint64_t>(i), 0, v);
    sum += v[0];
    sum2 += v[0] * v[0];
    cross += v[0] * v[1];
    if (i > 0) lag += v[0] * prev;
    prev = v[0];
  }
  const double bound = 4.0 / std::sqrt(n);
  EXPECT_LT(std::abs(sum / n), bound);
  EXPECT_LT(std::abs(sum2 / n - 1.0), 4.0 * std::sqrt(2.0 / n));
  EXPECT_LT(std::abs(cross / n), bound);
  EXPECT_LT(std::abs(lag / n), bound);
}

TEST(NoiseStream, UniformsInOpenInterval) {
  const NoiseStream s(0);
  std::vector<double> u(7);
  for (std::uint64_t k = 0; k < 1000; ++k) {
    s.uniforms(NoisePurpose::kResample, 0, k, 0, u);
    for (double v : u) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  }
}
