#include "revmask/fft.hpp"

#include <thread>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "revmask/error.hpp"

namespace revmask {
namespace {

using testing::naive_dft;
using testing::random_vector;

std::vector<cplx> random_signal(std::size_t n, std::uint64_t seed) {
  const auto re = random_vector(n, seed), im = random_vector(n, seed + 7);
  std::vector<cplx> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = {re[i], im[i]};
  return x;
}

TEST(Fft, MatchesDirectDft) {
  for (std::size_t n : {1u, 2u, 4u, 8u, 64u, 128u, 512u}) {
    const auto x = random_signal(n, n);
    auto y = x;
    FftPlan(n).forward(y);
    const auto expected = naive_dft(x);
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_NEAR(y[k].real(), expected[k].real(), 1e-10 * n) << "n=" << n << " k=" << k;
      EXPECT_NEAR(y[k].imag(), expected[k].imag(), 1e-10 * n) << "n=" << n << " k=" << k;
    }
  }
}

TEST(Fft, InverseRecoversInput) {
  const std::size_t n = 1 << 14;
  const auto x = random_signal(n, 99);
  auto y = x;
  const FftPlan plan(n);
  plan.forward(y);
  plan.inverse(y);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(std::abs(y[i] - x[i]), 0.0, 1e-13);
}

TEST(Fft, RejectsNonPowerOfTwo) {
  EXPECT_THROW(FftPlan(12), Error);
  EXPECT_THROW(FftPlan(0), Error);
  std::vector<cplx> wrong(8);
  EXPECT_THROW(FftPlan(16).forward(wrong), Error);
}

TEST(Fft, SharedPlansAreReusedAcrossThreads) {
  std::vector<std::shared_ptr<const FftPlan>> plans(4);
  std::vector<std::jthread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&plans, t] { plans[t] = FftPlan::shared(2048); });
  }
  threads.clear();
  for (const auto& p : plans) EXPECT_EQ(p.get(), plans[0].get());
}

TEST(Fft, PowerOfTwoHelpers) {
  EXPECT_EQ(next_power_of_two(0), 1u);
  EXPECT_EQ(next_power_of_two(1), 1u);
  EXPECT_EQ(next_power_of_two(5), 8u);
  EXPECT_EQ(next_power_of_two(4096), 4096u);
  EXPECT_TRUE(is_power_of_two(1024));
  EXPECT_FALSE(is_power_of_two(1000));
}

}  // namespace
}  // namespace revmask
