#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "snn/rng.hpp"

namespace snn {
namespace {

TEST(CounterRng, SameKeySameStream) {
    CounterRng a(1, StreamTag::kSynapses, 5), b(1, StreamTag::kSynapses, 5);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(CounterRng, KeysSeparateStreams) {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t seed : {1, 2})
        for (auto tag : {StreamTag::kSynapses, StreamTag::kExternal, StreamTag::kInitial})
            for (std::uint64_t a : {0, 1, 2}) firsts.insert(CounterRng(seed, tag, a)());
    EXPECT_EQ(firsts.size(), 18u);
}

TEST(CounterRng, UniformInUnitInterval) {
    CounterRng r(9, StreamTag::kInitial, 0);
    double sum = 0.0;
    constexpr int kN = 100000;
    for (int i = 0; i < kN; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / kN, 0.5, 0.005);
}

TEST(CounterRng, BelowStaysInRangeAndCoversIt) {
    CounterRng r(3, StreamTag::kSynapses, 1);
    std::vector<int> hist(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto x = r.below(7);
        ASSERT_LT(x, 7u);
        ++hist[x];
    }
    for (int h : hist) EXPECT_NEAR(h, 10000, 500);
    EXPECT_EQ(r.below(1), 0u);
}

class PoissonMean : public ::testing::TestWithParam<double> {};

TEST_P(PoissonMean, SampleMeanAndVariance) {
    const double mean = GetParam();
    CounterRng r(5, StreamTag::kExternal, static_cast<std::uint64_t>(mean * 100));
    constexpr int kN = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < kN; ++i) {
        const double x = static_cast<double>(r.poisson(mean));
        s += x;
        s2 += x * x;
    }
    const double m = s / kN;
    const double var = s2 / kN - m * m;
    EXPECT_NEAR(m, mean, 5.0 * std::sqrt(mean / kN));
    EXPECT_NEAR(var / mean, 1.0, 0.03);
}

INSTANTIATE_TEST_SUITE_P(KnuthAndRejection, PoissonMean, ::testing::Values(0.3, 1.2, 9.5, 12.0, 80.0));

TEST(CounterRng, PoissonOfZeroMeanIsZero) {
    CounterRng r(1, StreamTag::kExternal, 0);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(r.poisson(0.0), 0u);
}

TEST(CounterRng, PoissonWithCachedLimitMatches) {
    CounterRng a(1, StreamTag::kExternal, 0), b(1, StreamTag::kExternal, 0);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.poisson(1.2), b.poisson(1.2, std::exp(-1.2)));
}

}  // namespace
}  // namespace snn
