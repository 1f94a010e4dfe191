#include <gtest/gtest.h>

#include <boost/multiprecision/float128.hpp>
#include <cmath>
#include <map>
#include <random>

#include "circleconj/numberth.hpp"

using namespace circleconj;

namespace {
const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
}

TEST(ContinuedFraction, GoldenMeanIsAllOnes) {
    auto cf = cf_expand(golden, 30);
    for (auto k : cf.ks) EXPECT_EQ(k, 1);
    EXPECT_EQ(cf.q(10), 89);
}

TEST(ContinuedFraction, SqrtTwoMinusOneIsAllTwos) {
    auto cf = cf_expand(std::sqrt(2.0) - 1.0, 16);
    for (auto k : cf.ks) EXPECT_EQ(k, 2);
}

TEST(ContinuedFraction, TanhOneHasOddQuotients) {
    auto cf = cf_expand(std::tanh(1.0), 7);
    for (std::size_t i = 0; i < cf.ks.size(); ++i) EXPECT_EQ(cf.ks[i], static_cast<std::int64_t>(2 * i + 1));
}

TEST(ContinuedFraction, TanhOneQuadPrecisionGoesDeeper) {
    using boost::multiprecision::float128;
    float128 x = boost::multiprecision::tanh(float128(1));
    auto cf = cf_expand<float128>(x, 11);
    for (std::size_t i = 0; i < cf.ks.size(); ++i) EXPECT_EQ(cf.ks[i], static_cast<std::int64_t>(2 * i + 1));
}

TEST(ContinuedFraction, PrecisionExhaustedReportsPrefix) {
    try {
        cf_expand(std::tanh(1.0), 40);
        FAIL() << "expected PrecisionExhausted";
    } catch (const PrecisionExhausted& e) {
        EXPECT_GE(e.valid(), 7u);
        EXPECT_LT(e.valid(), 40u);
    }
}

TEST(ContinuedFraction, RejectsOutOfRange) {
    EXPECT_THROW(cf_expand(0.0, 3), InvalidParams);
    EXPECT_THROW(cf_expand(1.0, 3), InvalidParams);
    EXPECT_THROW(cf_expand(0.5, 0), InvalidParams);
}

TEST(Convergents, FibonacciDenominators) {
    std::vector<std::int64_t> ks(5, 1);
    auto c = convergents(ks);
    std::vector<std::int64_t> expect{0, 1, 1, 2, 3, 5, 8};
    EXPECT_EQ(c.qs, expect);
    EXPECT_EQ(c.ps[0], 1);
    EXPECT_EQ(c.ps[1], 0);
}

TEST(Convergents, SmallFractions) {
    std::vector<std::int64_t> twos{2, 2, 2};
    auto c = convergents(twos);
    EXPECT_EQ(c.ps.back(), 5);
    EXPECT_EQ(c.qs.back(), 12);
    std::vector<std::int64_t> odd{1, 3, 5};
    c = convergents(odd);
    EXPECT_EQ(c.ps.back(), 16);
    EXPECT_EQ(c.qs.back(), 21);
}

TEST(Convergents, DeterminantIdentity) {
    std::vector<std::int64_t> ks{3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5};
    auto c = convergents(ks);
    for (std::size_t i = 1; i < c.ps.size(); ++i) {
        const int n = static_cast<int>(i) - 1;
        EXPECT_EQ(c.ps[i] * c.qs[i - 1] - c.ps[i - 1] * c.qs[i], n % 2 == 0 ? -1 : 1) << "n=" << n;
    }
}

TEST(Convergents, OverflowReportsPrefix) {
    std::vector<std::int64_t> ks(200, 1000);
    try {
        convergents(ks);
        FAIL();
    } catch (const IntegerOverflow& e) {
        EXPECT_EQ(e.valid(), 6u);  // 1000^6 fits, 1000^7 does not
    }
}

TEST(ContinuedFraction, RandomRhoApproximationBound) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        double rho = uniform01(rng);
        if (rho == 0.0) continue;
        auto cf = cf_expand_trusted(rho, 60);
        for (int n = 0; n + 1 <= static_cast<int>(cf.depth()); ++n) {
            if (cf.q(n + 1) >= 1000000) break;
            const long double err = std::abs(static_cast<long double>(rho) -
                                             static_cast<long double>(cf.p(n)) / cf.q(n));
            EXPECT_LT(err, 1.0L / (static_cast<long double>(cf.q(n)) * cf.q(n + 1)));
        }
    }
}

TEST(Deltas, GoldenValues) {
    auto cf = cf_expand(golden, 20);
    EXPECT_DOUBLE_EQ(cf.delta(-1), 1.0);
    EXPECT_NEAR(cf.delta(0), golden, 1e-15);
    EXPECT_NEAR(cf.delta(1), golden * golden, 1e-15);
    EXPECT_NEAR(cf.delta(2), golden * golden * golden, 1e-15);
}

TEST(Deltas, SqrtTwo) {
    auto cf = cf_expand(std::sqrt(2.0) - 1.0, 10);
    EXPECT_NEAR(cf.delta(1), 0.1715728752538099, 1e-14);
}

TEST(Deltas, StrictlyDecreasingWithRecurrence) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        auto cf = cf_expand_trusted(uniform01(rng) * 0.98 + 0.01, 40);
        int keep = -1;
        while (keep + 1 <= static_cast<int>(cf.depth()) && cf.q(keep + 1) < 1000000) ++keep;
        auto d = delta_seq(cf);
        for (int n = 0; n <= std::min(keep, cf.max_delta_index()); ++n) EXPECT_LT(cf.delta(n), cf.delta(n - 1));
        for (int n = -1; n + 2 <= std::min({keep, cf.max_delta_index(), static_cast<int>(cf.depth())}); ++n) {
            const double r = cf.delta(n) - static_cast<double>(cf.k(n + 2)) * cf.delta(n + 1) - cf.delta(n + 2);
            EXPECT_LT(std::abs(r) / cf.delta(n), 1e-12);
        }
    }
}

TEST(Deltas, FromQuotientsMatchesExpansion) {
    std::vector<std::int64_t> ones(60, 1);
    auto a = from_quotients(ones);
    auto b = cf_expand(golden, 30);
    for (int n = -1; n <= 10; ++n) {
        EXPECT_NEAR(a.delta(n), std::pow(golden, n + 1), 1e-15);
        EXPECT_NEAR(a.delta(n), b.delta(n), 1e-14);
    }
}

TEST(DeltaInverse, GridPointsAndInterpolation) {
    auto cf = cf_expand(golden, 20);
    EXPECT_DOUBLE_EQ(delta_inverse(cf, cf.delta(3)), 3.0);
    EXPECT_DOUBLE_EQ(delta_inverse(cf, cf.delta(0)), 0.0);
    EXPECT_NEAR(delta_inverse(cf, std::sqrt(cf.delta(2) * cf.delta(3))), 2.5, 1e-12);
    for (int n = -1; n <= cf.max_delta_index(); ++n) EXPECT_NEAR(delta_inverse(cf, cf.delta(n)), n, 1e-12);
    EXPECT_THROW(delta_inverse(cf, cf.deltas.back() * 0.5), OutOfRange);
}

TEST(DeltaTilde, LowerBoundsDelta) {
    auto cf = cf_expand(std::tanh(1.0), 7);
    for (int n = -1; n + 3 <= static_cast<int>(cf.depth()); ++n)
        EXPECT_LE(delta_tilde(cf.ks, n), cf.delta(n));
    std::vector<std::int64_t> ones(10, 1);
    EXPECT_DOUBLE_EQ(delta_tilde(ones, 0), 0.125);
    EXPECT_NEAR(delta_tilde_inverse(ones, 0.125), 0.0, 1e-12);
}

TEST(Generators, DistributionFrequency) {
    QuotientDistribution d{{1, 2}, {0.5, 0.5}};
    auto ks = gen_partial_quotients(d, 10000, 42);
    std::map<std::int64_t, int> count;
    for (auto k : ks) ++count[k];
    EXPECT_NEAR(count[1] / 10000.0, 0.5, 0.02);
    EXPECT_EQ(count[1] + count[2], 10000);
}

TEST(Generators, BadDistributions) {
    EXPECT_THROW(gen_partial_quotients(QuotientDistribution{{1, 2}, {0.5, 0.6}}, 5, 1), BadDistribution);
    EXPECT_THROW(gen_partial_quotients(QuotientDistribution{{0, 2}, {0.5, 0.5}}, 5, 1), BadDistribution);
    EXPECT_THROW(gen_partial_quotients(QuotientDistribution{{1, 1}, {0.5, 0.5}}, 5, 1), BadDistribution);
    EXPECT_THROW(gen_partial_quotients(QuotientDistribution{{1}, {-0.5}}, 5, 1), BadDistribution);
}

TEST(Generators, PhiTypeBounds) {
    auto ones = gen_partial_quotients(PhiType::constant(1.0), 50, 3);
    for (auto k : ones) EXPECT_EQ(k, 1);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto ks = gen_partial_quotients(PhiType::power(1.0), 5, seed);
        for (std::size_t m = 0; m < ks.size(); ++m)
            EXPECT_LE(ks[m], std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(static_cast<double>(m)))));
    }
    auto ext = gen_partial_quotients(PhiType::exponential(2.0), 6, 0, PhiSampling::extremal);
    EXPECT_EQ(ext, (std::vector<std::int64_t>{1, 2, 4, 8, 16, 32}));
}

TEST(Generators, Reproducible) {
    EXPECT_EQ(gen_partial_quotients(PhiType::power(1.5), 100, 9), gen_partial_quotients(PhiType::power(1.5), 100, 9));
    EXPECT_EQ(gauss_kuzmin_sample(100, 5), gauss_kuzmin_sample(100, 5));
    EXPECT_NE(gauss_kuzmin_sample(100, 5), gauss_kuzmin_sample(100, 6));
}

TEST(GaussKuzmin, MassFunction) {
    EXPECT_NEAR(gauss_kuzmin_pmf(1), 0.41503749927884, 1e-12);
    EXPECT_NEAR(gauss_kuzmin_pmf(2), 0.16992500144231, 1e-12);
    double s = 0.0;
    for (std::int64_t k = 1; k <= 100000; ++k) s += gauss_kuzmin_pmf(k);
    EXPECT_NEAR(s, gauss_kuzmin_cdf(100000), 1e-12);
    EXPECT_NEAR(1.0 - s, std::log2(100002.0 / 100001.0), 1e-9);
}

TEST(GaussKuzmin, EmpiricalFrequencies) {
    auto ks = gauss_kuzmin_sample(200000, 1);
    std::map<std::int64_t, int> count;
    for (auto k : ks) ++count[k];
    for (std::int64_t k = 1; k <= 5; ++k) EXPECT_NEAR(count[k] / 200000.0, gauss_kuzmin_pmf(k), 4e-3) << k;
}

TEST(KnSeries, BaselCase) {
    const std::size_t N = 4096;
    std::vector<std::int64_t> ks(N, 1);
    std::vector<double> Ks(N);
    for (std::size_t n = 0; n < N; ++n) Ks[n] = 1.0 / double((n + 1) * (n + 1));
    auto r = check_kn_series(ks, Ks);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.partial_sums.back(), std::numbers::pi * std::numbers::pi / 6.0, 1e-3);
}

TEST(KnSeries, ZeroCase) {
    std::vector<std::int64_t> ks(100, 7);
    std::vector<double> Ks(100, 0.0);
    auto r = check_kn_series(ks, Ks);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.partial_sums.back(), 0.0);
}

TEST(KnSeries, MonteCarloSummableAndDivergentWeights) {
    const std::size_t N = 512;
    std::vector<double> sq(N), slow(N);
    for (std::size_t n = 1; n <= N; ++n) {
        sq[n - 1] = 1.0 / double(n * n);
        slow[n - 1] = 1.0 / ((n + 2.0) * std::log(n + 2.0));
    }
    const auto a = kn_monte_carlo(sq, 500, 3);
    EXPECT_GT(a.converged_fraction, 0.95);
    EXPECT_EQ(a.checkpoints.back(), N);
    const auto b = kn_monte_carlo(slow, 500, 3);
    EXPECT_EQ(b.converged, 0u);
    EXPECT_TRUE(b.medians_increase);
    const auto c = kn_monte_carlo(slow, 500, 3);
    EXPECT_EQ(b.median_partial, c.median_partial);
}
