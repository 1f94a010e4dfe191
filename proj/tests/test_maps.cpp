#include <gtest/gtest.h>

#include <boost/multiprecision/float128.hpp>
#include <cmath>

#include "circleconj/maps.hpp"

using namespace circleconj;

namespace {
const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
}

TEST(Families, RigidAndSine) {
    auto r = Map::rigid(golden);
    EXPECT_NEAR(iterate(r, 0.25, 1), 0.8680339887498949, 1e-15);
    auto s0 = Map::sine(0.5, 0.0);
    for (double x : {0.0, 0.1, 0.7}) EXPECT_DOUBLE_EQ(s0.lift(x), Map::rigid(0.5).lift(x));
    EXPECT_THROW(Map::sine(0.5, 1.05), NotADiffeo);
    EXPECT_EQ(Map::sine(0.3, 0.5).smoothness(), "lipschitz");
}

TEST(Families, DerivativesMatchFiniteDifferences) {
    auto m = Map::sine(0.37, 0.8);
    const double h = 1e-4;
    for (int i = 0; i < 100; ++i) {
        const double x = i / 100.0 + 0.003;
        const double fd1 = (m.lift(x + h) - m.lift(x - h)) / (2 * h);
        const double fd2 = (m.d1(x + h) - m.d1(x - h)) / (2 * h);
        EXPECT_NEAR(fd1, m.d1(x), 1e-6 * std::abs(m.d1(x)) + 1e-9);
        if (std::abs(m.d2(x)) > 1e-3) {
            EXPECT_NEAR(fd2 / m.d2(x), 1.0, 1e-6);
        }
        EXPECT_NEAR(m.lift(x + 1) - m.lift(x), 1.0, 1e-12);
    }
}

TEST(Families, CustomMap) {
    auto m = Map::custom([](double x) { return x + 0.2 + 0.05 * std::sin(2 * M_PI * x) / (2 * M_PI); },
                         [](double x) { return 1 + 0.05 * std::cos(2 * M_PI * x); },
                         [](double x) { return -0.1 * M_PI * std::sin(2 * M_PI * x); });
    EXPECT_EQ(m.family(), MapFamily::custom);
    EXPECT_THROW(Map::custom([](double x) { return x - 0.9 * std::sin(2 * M_PI * x); },
                             [](double x) { return 1 - 1.8 * M_PI * std::cos(2 * M_PI * x); },
                             [](double x) { return x * 0; }),
                 NotADiffeo);
}

TEST(Iterate, Basics) {
    auto r = Map::rigid(golden);
    EXPECT_NEAR(iterate(r, 0.0, 3), 3 * golden - 1.0, 1e-15);
    auto s = Map::sine(0.3, 0.7);
    EXPECT_EQ(iterate(s, 0.123, 0), 0.123);
    EXPECT_EQ(lift_iterate(s, 2.5, 0), 2.5);
    for (int n : {1, 7, 100}) EXPECT_NEAR(frac(lift_iterate(s, 0.4, n)), iterate(s, 0.4, n), 1e-12);
}

TEST(Iterate, CompositionLaw) {
    auto s = Map::sine(0.618, 0.5);
    const double a = lift_iterate(s, 0.2, 10000);
    const double b = lift_iterate(s, lift_iterate(s, 0.2, 4000), 6000);
    EXPECT_NEAR(a, b, 1e-9);
}

TEST(RotationNumber, RigidGolden) {
    auto r = rotation_number(Map::rigid(golden), 0.0, 8);
    EXPECT_EQ(r.ks, std::vector<std::int64_t>(8, 1));
    std::vector<std::int64_t> fib{1, 1, 2, 3, 5, 8, 13, 21, 34};
    EXPECT_EQ(r.q_returns, fib);
    EXPECT_NEAR(r.rho_est, golden, 1.0 / (34.0 * 34.0));
}

TEST(RotationNumber, RigidSqrtTwo) {
    auto r = rotation_number(Map::rigid(std::sqrt(2.0) - 1.0), 0.3, 5);
    EXPECT_EQ(r.ks, std::vector<std::int64_t>(5, 2));
}

TEST(RotationNumber, Rational) {
    try {
        rotation_number(Map::rigid(1.0 / 3.0), 0.0, 5);
        FAIL();
    } catch (const PeriodicOrbitDetected& e) {
        EXPECT_EQ(e.period(), 3);
        EXPECT_EQ(e.winding(), 1);
    }
}

TEST(RotationNumber, RandomRigidWithinBound) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        const double rho = 0.05 + 0.9 * uniform01(rng);
        auto cf = cf_expand_trusted(rho, 12);
        std::size_t N = 1;
        while (N < cf.depth() && cf.q(static_cast<int>(N) + 1) < 200000) ++N;
        auto r = rotation_number(Map::rigid(rho), 0.1, N);
        for (std::size_t i = 0; i < N; ++i) EXPECT_EQ(r.ks[i], cf.ks[i]) << rho;
        const double qN = static_cast<double>(r.q_returns.back());
        EXPECT_LT(std::abs(r.rho_est - rho), 1.0 / (qN * qN));
    }
}

TEST(RotationNumber, DepthExhausted) {
    RotationOptions opt;
    opt.budget = 10;
    EXPECT_THROW(rotation_number(Map::rigid(golden), 0.0, 20, opt), DepthExhausted);
}

TEST(RotationNumber, BirkhoffCrossCheck) {
    RotationOptions opt;
    opt.birkhoff_check = true;
    auto r = rotation_number(Map::sine(0.6, 0.5), 0.0, 10, opt);
    ASSERT_TRUE(r.birkhoff);
    EXPECT_NEAR(*r.birkhoff, r.rho_est, 3.0 / static_cast<double>(r.q_returns.back()));
}

TEST(RotationNumber, MonotoneInOmega) {
    double prev = -1.0;
    RotationOptions opt;
    opt.budget = 100000;
    for (int i = 0; i <= 60; ++i) {
        const double omega = 0.3 + 0.4 * i / 60.0;
        double rho;
        try {
            rho = rotation_number(Map::sine(omega, 0.8), 0.0, 6, opt).rho_est;
        } catch (const PeriodicOrbitDetected& e) {
            rho = static_cast<double>(e.winding()) / e.period();
        } catch (const DepthExhausted&) {
            rho = birkhoff_rotation(Map::sine(omega, 0.8), 0.0, 200000);
        }
        EXPECT_GE(rho, prev - 1e-4) << omega;
        prev = rho;
    }
}

TEST(Tune, RigidIsExact) {
    auto cf = cf_expand(golden, 10);
    EXPECT_EQ(tune_parameter(0.0, cf, 1e-10).omega, golden);
}

TEST(Tune, GoldenAtHalf) {
    auto cf = cf_expand(golden, 10);
    auto t = tune_parameter(0.5, cf, 1e-10);
    auto r = rotation_number(Map::sine(t.omega, 0.5), 0.0, t.depth);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(r.ks[i], 1);
    EXPECT_LT(std::abs(r.rho_est - golden), 1e-10);
    EXPECT_NEAR(std::abs(iterate(Map::sine(t.omega, 0.5), 0.0, 89)), 0.0, 2.0 * cf.delta(9));
}

TEST(Tune, SilverAtPointNine) {
    auto cf = cf_expand(std::sqrt(2.0) - 1.0, 8);
    auto t = tune_parameter(0.9, cf, 1e-8, 8);
    auto r = rotation_number(Map::sine(t.omega, 0.9), 0.0, 8);
    EXPECT_EQ(r.ks, std::vector<std::int64_t>(8, 2));
}

TEST(Lambda, RigidAndSine) {
    auto d0 = denjoy_lambda(Map::rigid(0.3));
    EXPECT_EQ(d0.C, 0.0);
    EXPECT_NEAR(d0.lambda, 1.0 / std::sqrt(2.0), 1e-15);
    auto d = denjoy_lambda(Map::sine(0.3, 0.5));
    // closed form 2 log((1+K)/(1-K)); brute-force midpoint oracle as well
    EXPECT_NEAR(d.C, 2.0 * std::log(3.0), 1e-8);
    auto m = Map::sine(0.3, 0.5);
    double riemann = 0.0;
    const int N = 1000000;
    for (int i = 0; i < N; ++i) {
        const double x = (i + 0.5) / N;
        riemann += std::abs(m.d2(x) / m.d1(x)) / N;
    }
    EXPECT_NEAR(d.C, riemann, 1e-6);
    for (double k : {0.1, 0.5, 0.9, 0.99}) {
        auto dk = denjoy_lambda(Map::sine(0.2, k));
        EXPECT_GT(dk.lambda, 0.5);
        EXPECT_LT(dk.lambda, 1.0);
    }
}

TEST(Extended, QuadPrecisionClosestReturns) {
    using boost::multiprecision::float128;
    const float128 g = (boost::multiprecision::sqrt(float128(5)) - 1) / 2;
    auto m = CircleMap<float128>::rigid(g);
    auto r = rotation_number(m, float128(0), 30);
    EXPECT_EQ(r.ks, std::vector<std::int64_t>(30, 1));
}
