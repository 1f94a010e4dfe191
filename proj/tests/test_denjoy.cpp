#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "circleconj/denjoy.hpp"

using namespace circleconj;

namespace {

const double kGolden = 0.5 * (std::sqrt(5.0) - 1.0);

const Map& tuned_sine() {
    static const Map m = [] {
        const auto tr = tune_parameter(0.5, cf_expand(kGolden, 14), 1e-10);
        return Map::sine(tr.omega, 0.5);
    }();
    return m;
}

const DenjoyReport& tuned_report() {
    static const DenjoyReport r =
        denjoy_inequality_report(tuned_sine(), moc::lipschitz(), 14, 1024, cf_expand(kGolden, 20));
    return r;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) { return num::fit_line(xs, ys).slope; }

} // namespace

TEST(Partition, RigidSegmentsHaveLengthDelta) {
    const auto P = build_partition(Map::rigid(kGolden), 0.0, 2);
    const auto cf = cf_expand(kGolden, 10);
    EXPECT_TRUE(P.disjoint);
    EXPECT_EQ(P.segments.size(), static_cast<std::size_t>(P.q_n + P.q_next));
    for (const auto& s : P.segments) EXPECT_NEAR(s.length, cf.delta(s.level), 1e-12);
}

TEST(Partition, TunedSineDisjointAgainstOverlapOracle) {
    const auto P = build_partition(tuned_sine(), 0.0, 6);
    EXPECT_TRUE(P.disjoint);
    EXPECT_NEAR(P.total_length, 1.0, 1e-9);
    // brute force: no two segments share interior points on the circle
    const auto& S = P.segments;
    auto inside = [](double x, const Segment& s) {
        double t = x - s.start;
        t -= std::floor(t);
        return t > 1e-13 && t < s.length - 1e-13;
    };
    for (std::size_t i = 0; i < S.size(); ++i)
        for (std::size_t j = 0; j < S.size(); ++j) {
            if (i == j) continue;
            EXPECT_FALSE(inside(S[j].start, S[i]));
            EXPECT_FALSE(inside(S[j].start + 0.5 * S[j].length, S[i]));
        }
}

TEST(Partition, ConvergentsAlternateSides) {
    const auto P = build_partition(tuned_sine(), 0.0, 2);
    ASSERT_EQ(P.offsets.size(), 5u);  // m = -1..3
    EXPECT_TRUE(P.ordering);
    const double d1 = P.offsets[2], d2 = P.offsets[3], d3 = P.offsets[4], d0 = P.offsets[1];
    EXPECT_LT(-1.0, d1);
    EXPECT_LT(d1, d3);
    EXPECT_LT(d3, 0.0);
    EXPECT_LT(0.0, d2);
    EXPECT_LT(d2, d0);
}

TEST(Partition, RationalRotationHasNoDeepLevels) {
    EXPECT_THROW(build_partition(Map::rigid(0.5), 0.0, 4), DepthUnavailable);
}

TEST(Levels, RigidLnEqualsDelta) {
    const auto cf = cf_expand(kGolden, 20);
    for (int n : {1, 4, 8}) EXPECT_NEAR(l_n(Map::rigid(kGolden), n), cf.delta(n), 1e-12);
}

TEST(Levels, LnDominatesDelta) {
    const auto& r = tuned_report();
    for (std::size_t i = 0; i < r.n.size(); ++i) EXPECT_GE(r.l[i], r.delta[i]) << "n = " << r.n[i];
    const auto silver = cf_expand(std::sqrt(2.0) - 1.0, 12);
    const auto m = Map::sine(tune_parameter(0.9, silver, 1e-8).omega, 0.9);
    for (int n : {2, 5, 8}) EXPECT_GE(l_n(m, n), silver.delta(n));
}

TEST(Levels, ContractionBelowExplicitLambda) {
    const auto& r = tuned_report();
    for (std::size_t i = 2; i + 1 < r.l.size(); ++i) EXPECT_LT(r.l[i + 1], r.l[i]);
    EXPECT_GT(r.lambda, 0.5);
    EXPECT_LT(r.lambda, 1.0);
    EXPECT_LE(r.lambda_emp, r.lambda + 0.02);
}

TEST(Tau, HandComputedSum) {
    const auto tau = tau_sequence({0.5, 0.25}, moc::lipschitz());
    EXPECT_DOUBLE_EQ(tau[0], 1.0);               // varpi(l_{-1})
    EXPECT_DOUBLE_EQ(tau[1], 0.5 + 0.5 * 1.0);  // varpi(l_0) + (l_1/l_0) varpi(l_{-1})
}

TEST(Tau, BoundMatchesClosedForms) {
    const double lam = 0.8;
    for (int n : {1, 5, 20, 60}) {
        const double ln = std::pow(lam, n);
        EXPECT_NEAR(tau_bound(moc::lipschitz(), lam, n), ln * n * std::log(1.0 / lam), 1e-12);
        const double a = 0.4;
        EXPECT_NEAR(tau_bound(moc::holder(a), lam, n), (std::pow(lam, a * n) - ln) / (1.0 - a), 1e-12);
    }
}

TEST(Tau, LipschitzDecaysLikeNLambdaN) {
    const auto& r = tuned_report();
    std::vector<double> xs, ys;
    for (int n = 6; n <= 14; ++n) {
        xs.push_back(n);
        ys.push_back(std::log(r.tau[static_cast<std::size_t>(n)] / n));
    }
    const double s = fit_slope(xs, ys), target = std::log(r.lambda_emp);
    EXPECT_NEAR(s / target, 1.0, 0.15);
}

TEST(Tau, HolderDecaysLikeLambdaAlphaN) {
    const double alpha = 0.5;
    const auto l = tuned_report().l;
    const auto tau = tau_sequence(l, moc::holder(alpha));
    std::vector<double> xs, ys;
    for (int n = 6; n <= 14; ++n) {
        xs.push_back(n);
        ys.push_back(std::log(tau[static_cast<std::size_t>(n)]));
    }
    EXPECT_NEAR(fit_slope(xs, ys) / (alpha * std::log(tuned_report().lambda_emp)), 1.0, 0.15);
}

TEST(Tau, LogHolderDecaysLikePower) {
    // l_n = g^{n+1} over many levels; varpi = (log 1/x)^{-1.5}
    std::vector<double> log_l;
    for (int n = 0; n <= 4000; ++n) log_l.push_back((n + 1) * std::log(kGolden));
    const auto tau = tau_sequence_log(log_l, moc::log_holder(1.5));
    std::vector<double> xs, ys;
    for (int n = 1000; n <= 4000; n += 100) {
        xs.push_back(std::log(double(n)));
        ys.push_back(std::log(tau[static_cast<std::size_t>(n)]));
    }
    EXPECT_NEAR(fit_slope(xs, ys), -1.5, 0.05);
}

TEST(Inequality, RigidBaseline) {
    const auto r = denjoy_inequality_report(Map::rigid(kGolden), moc::lipschitz(), 10);
    for (std::size_t i = 0; i < r.n.size(); ++i) {
        EXPECT_EQ(r.sup_dev[i], 0.0);
        EXPECT_EQ(r.ratio[i], 0.0);
        EXPECT_NEAR(r.l[i], r.delta[i], 1e-12);
    }
    EXPECT_LT(r.max_identity_residual, 1e-12);
}

TEST(Inequality, TunedSineDerivativesSettle) {
    const auto& r = tuned_report();
    EXPECT_TRUE(std::isfinite(r.max_sup_log_dev));
    EXPECT_LE(r.log_dev_tail_slope, 0.0);
    EXPECT_LE(r.sup_dev.back() * 10.0, r.sup_dev[2]);
    EXPECT_GT(r.ratio_constant, 0.0);
    for (double v : r.ratio) EXPECT_LE(v, r.ratio_constant);
    EXPECT_LE(r.ratio_trend, 1.5);
}

TEST(Identities, RigidIsAffine) {
    const auto c = mk_identity_check(Map::rigid(kGolden), 0.1, 4, moc::lipschitz());
    for (double v : {c.M0, c.Mq, c.K0, c.Kq}) EXPECT_NEAR(v, 1.0, 1e-12);
    EXPECT_LT(c.max_residual(), 1e-12);
}

TEST(Identities, TunedSineResidualsAtRoundoff) {
    const auto c = mk_identity_check(tuned_sine(), 0.0, 5, moc::lipschitz());
    EXPECT_LT(c.max_residual(), 1e-8);
    EXPECT_LT(tuned_report().max_identity_residual, 1e-8);
    // m_n^2 is the common value of both products
    EXPECT_NEAR(c.m_n * c.m_n, c.K0 * c.Kq, 1e-12);
}

TEST(Identities, CrossDistortionWithinModulusBound) {
    const auto& r = tuned_report();
    double early = 0.0, late = 0.0;
    for (const auto& c : r.identities) {
        EXPECT_TRUE(std::isfinite(c.dist_constant));
        (c.n <= 7 ? early : late) = std::max(c.n <= 7 ? early : late, c.dist_constant);
    }
    // the fitted constant does not grow with n
    EXPECT_GT(early, 0.0);
    EXPECT_LE(late, early);
}

TEST(Identities, PowerFunctionDerivatives) {
    const auto f = power_function(tuned_sine(), 13, 8);
    for (double x : {0.05, 0.4, 0.77}) {
        const double h = 1e-6;
        EXPECT_NEAR(f.d1(x), (f(x + h) - f(x - h)) / (2 * h), 1e-7);
        EXPECT_NEAR(f.d2(x), (f.d1(x + h) - f.d1(x - h)) / (2 * h), 1e-5 * std::max(1.0, std::abs(f.d2(x))));
    }
}
