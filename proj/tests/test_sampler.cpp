#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "quantcert/sampler.hpp"

namespace quantcert {
namespace {

double ks_uniform_statistic(std::vector<double> u) {
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        d = std::max(d, std::max((i + 1) / n - u[i], u[i] - i / n));
    }
    return d;
}

TEST(LinfSampler, CenteredBallContainmentAndMoments) {
    const std::vector<double> x0(5, 0.5);
    LinfSampler s(x0, 0.1);
    constexpr int n = 100000;
    std::vector<double> sum(5, 0.0);
    std::vector<double> x(5);
    for (int i = 0; i < n; ++i) {
        s.sample(0, i, SeedSpec{1}, x);
        ASSERT_TRUE(s.contains(x));
        for (int k = 0; k < 5; ++k) {
            ASSERT_GE(x[k], 0.4);
            ASSERT_LE(x[k], 0.6);
            sum[k] += x[k];
        }
    }
    // Uniform on width 0.2: sd = 0.2 / sqrt(12).
    const double sigma = 0.2 / std::sqrt(12.0) / std::sqrt(static_cast<double>(n));
    for (double v : sum) EXPECT_NEAR(v / n, 0.5, 3.0 * sigma);
}

TEST(LinfSampler, LargeRadiusCoversUnitBox) {
    LinfSampler s({0.3, 0.9}, 1.5);
    EXPECT_EQ(s.lower(), (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(s.upper(), (std::vector<double>{1.0, 1.0}));
}

TEST(LinfSampler, CornerIsClipped) {
    LinfSampler s({0.0, 0.0, 0.0}, 0.1);
    for (int i = 0; i < 10000; ++i) {
        for (double v : s.sample(1, i, SeedSpec{2})) {
            ASSERT_GE(v, 0.0);
            ASSERT_LE(v, 0.1);
        }
    }
}

TEST(LinfSampler, RejectsInvalidBall) {
    EXPECT_THROW(LinfSampler({0.5}, 0.0), Error);
    EXPECT_THROW(LinfSampler({1.5}, 0.1), Error);
    EXPECT_THROW(LinfSampler({}, 0.1), Error);
}

TEST(L2Sampler, RadiusPowerIsUniform) {
    constexpr int d = 8;
    constexpr int n = 100000;
    constexpr double eps = 0.4;
    L2Sampler s(std::vector<double>(d, 0.5), eps);
    ASSERT_FALSE(s.clamps());
    std::vector<double> u;
    u.reserve(n);
    std::vector<double> off(d);
    std::vector<double> x(d);
    for (int i = 0; i < n; ++i) {
        s.offset(0, i, SeedSpec{8}, off);
        double r2 = 0.0;
        for (double v : off) r2 += v * v;
        const double r = std::sqrt(r2);
        ASSERT_LE(r, eps * (1 + 1e-12));
        u.push_back(std::pow(r / eps, d));
        s.sample(0, i, SeedSpec{8}, x);
        ASSERT_TRUE(s.contains(x));
    }
    EXPECT_LT(ks_uniform_statistic(u), 1.6276 / std::sqrt(static_cast<double>(n)));
}

TEST(L2Sampler, ClampedSamplesStayInSupport) {
    L2Sampler s({0.0, 1.0, 0.5, 0.05}, 0.3);
    EXPECT_TRUE(s.clamps());
    for (int i = 0; i < 100000; ++i) ASSERT_TRUE(s.contains(s.sample(0, i, SeedSpec{3})));
}

TEST(L2Sampler, TinyRadiusReturnsCenter) {
    const std::vector<double> x0{0.25, 0.75};
    L2Sampler s(x0, 1e-300);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(s.sample(0, i, SeedSpec{4}), x0);
}

TEST(L2Sampler, OneDimensionIsUniformOnInterval) {
    L2Sampler s({0.5}, 0.3);
    std::vector<double> u;
    for (int i = 0; i < 50000; ++i) {
        const double v = s.sample(0, i, SeedSpec{5})[0];
        ASSERT_GE(v, 0.2);
        ASSERT_LE(v, 0.8);
        u.push_back((v - 0.2) / 0.6);
    }
    EXPECT_LT(ks_uniform_statistic(u), 1.6276 / std::sqrt(50000.0));
}

TEST(Samplers, ContainmentOverConfigurations) {
    for (Norm norm : {Norm::linf, Norm::l2}) {
        for (double eps : {0.01, 0.1, 0.5, 2.0}) {
            for (const std::vector<double>& x0 : {std::vector<double>{0.5, 0.5}, std::vector<double>{0.0, 1.0, 0.3},
                                                  std::vector<double>(10, 0.95)}) {
                auto s = ball_sampler(norm, x0, eps);
                for (int i = 0; i < 100000 / 8; ++i) ASSERT_TRUE(s->contains(s->sample(2, i, SeedSpec{6})));
            }
        }
    }
}

TEST(Samplers, PureFunctionOfIndexAndSeed) {
    auto s = l2_sampler({0.4, 0.6, 0.5}, 0.2);
    EXPECT_EQ(s->sample(3, 17, SeedSpec{1}), s->sample(3, 17, SeedSpec{1}));
    EXPECT_NE(s->sample(3, 17, SeedSpec{1}), s->sample(3, 18, SeedSpec{1}));
    EXPECT_NE(s->sample(3, 17, SeedSpec{1}), s->sample(4, 17, SeedSpec{1}));
}

TEST(Norm, ParseAndPrint) {
    EXPECT_EQ(parse_norm("linf"), Norm::linf);
    EXPECT_EQ(parse_norm("l2"), Norm::l2);
    EXPECT_EQ(to_string(Norm::l2), "l2");
    EXPECT_THROW(parse_norm("l1"), Error);
}

}  // namespace
}  // namespace quantcert
