#pragma once

// The integrability condition linking the gauge phi of the partial quotients
// to the modulus of T'', its series form, the closed-form case reductions and
// the higher-regularity functional R(n).
//
// Everything is evaluated on the logarithmic scale x = lambda^s, y = lambda^t.
// With L = log(1/lambda) and
//   F(t) = L int_0^inf phi(t + r) e^{-L r} dr,   so that   int_0^{lambda^t} phi(log_lambda x) dx = lambda^t F(t),
//   G(t) = lambda^t int_{lambda^t}^1 varpi(y) / y^2 dy = L int_0^t e^{-L(t - r)} varpi(lambda^r) dr,
// the main integral is L int_0^inf F(t) varpi(lambda^t) dt and
// R(n) = L int_n^inf F(t) varpi(lambda^t) dt + F(n) G(n).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <type_traits>
#include <variant>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "circleconj/error.hpp"
#include "circleconj/mocs.hpp"
#include "circleconj/numberth.hpp"
#include "circleconj/numerics.hpp"

namespace circleconj {

/// Finite or divergent value of an integral over (0, 1].
struct IntegralValue {
    Verdict verdict = Verdict::inconclusive;
    double value = std::numeric_limits<double>::infinity();  ///< finite verdicts only
    double head = 0.0;   ///< part over the range where varpi is constant
    num::TailSum tail;
};

namespace detail {

inline double log_L(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidParams("lambda must lie in (0, 1)");
    return -std::log(lambda);
}

/// log F(t); +inf when the inner integral diverges.
class PhiKernel {
public:
    PhiKernel(const PhiType& phi, double L) : phi_(phi), L_(L) {}

    double log_F(double t) const {
        return std::visit(
            [&](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, PhiType::Constant>) {
                    return std::log(f.c);
                } else if constexpr (std::is_same_v<T, PhiType::Exponential>) {
                    const double la = std::log(f.a);
                    if (la >= L_) return std::numeric_limits<double>::infinity();
                    return std::log(L_ / (L_ - la)) + t * la;
                } else if constexpr (std::is_same_v<T, PhiType::Power>) {
                    return log_F_power(f.nu, t);
                } else {
                    return std::log(numeric_F(t));
                }
            },
            phi_.form);
    }

    double F(double t) const { return std::exp(log_F(t)); }

private:
    // F = L^{-nu} e^x Gamma(nu + 1, x) with x = L t
    double log_F_power(double nu, double t) const {
        const double x = L_ * t;
        if (x < 500.0)
            return -nu * std::log(L_) + x + std::log(boost::math::tgamma(nu + 1.0, x));
        // e^x Gamma(a, x) = x^{a-1} (1 + (a-1)/x + (a-1)(a-2)/x^2 + ...)
        double term = 1.0, sum = 1.0;
        for (int j = 1; j < 60; ++j) {
            term *= (nu + 1.0 - j) / x;
            sum += term;
            if (std::abs(term) < 1e-17 * sum) break;
        }
        return -nu * std::log(L_) + nu * std::log(x) + std::log(sum);
    }

    double numeric_F(double t) const {
        const double R = 60.0 / L_;
        return L_ * num::integrate([&](double r) { return phi_(t + r) * std::exp(-L_ * r); }, 0.0, R, 64);
    }

    PhiType phi_;
    double L_;
};

/// int_a^b h(t) dt split at the kink of varpi at t_delta.
template <class H>
double integrate_split(H&& h, double a, double b, double t_delta, int panels) {
    if (b <= a) return 0.0;
    auto seg = [&](double lo, double hi) {
        const int p = std::max(1, static_cast<int>(std::ceil(hi - lo)) * panels);
        return num::integrate(h, lo, hi, p);
    };
    if (t_delta > a && t_delta < b) return seg(a, t_delta) + seg(t_delta, b);
    return seg(a, b);
}

/// int_{t0}^inf of exp(log_g(t)), with the constant stretch of varpi integrated
/// directly and the rest by the level policy.
template <class LogG>
IntegralValue integrate_log_scale(LogG&& log_g, double t0, double t_delta, const num::LevelPolicy& policy) {
    IntegralValue r;
    auto g = [&](double t) { return std::exp(log_g(t)); };
    const double start = std::max(t0, t_delta);
    if (t_delta > t0) r.head = integrate_split(g, t0, t_delta, t_delta, 8 * policy.panels);
    if (!std::isfinite(r.head)) {
        r.verdict = Verdict::divergent;
        return r;
    }
    r.tail = num::integrate_to_infinity(g, start, policy);
    r.verdict = r.tail.verdict;
    if (r.verdict == Verdict::finite) r.value = r.head + r.tail.value;
    return r;
}

} // namespace detail

/// int_0^1 (int_0^y phi(log_lambda x) dx) varpi(y) / y^2 dy.
inline IntegralValue main_integral(const PhiType& phi, const ModulusOfContinuity& moc, double lambda,
                                   const num::LevelPolicy& policy = {}) {
    const double L = detail::log_L(lambda);
    const detail::PhiKernel K(phi, L);
    const double t_delta = -std::log(moc.delta()) / L;
    return detail::integrate_log_scale(
        [&](double t) { return std::log(L) + K.log_F(t) + moc.log_at_log(L * t); }, 0.0, t_delta, policy);
}

/// G(n) = lambda^n int_{lambda^n}^1 varpi(y)/y^2 dy for n = 0..N-1, by
/// G(n+1) = lambda G(n) + L int_n^{n+1} e^{-L(n+1-t)} varpi(lambda^t) dt.
inline std::vector<double> g_sequence(const ModulusOfContinuity& moc, double lambda, std::size_t N, int panels = 1) {
    const double L = detail::log_L(lambda);
    const double t_delta = -std::log(moc.delta()) / L;
    std::vector<double> G;
    G.reserve(N);
    double g = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        G.push_back(g);
        const double hi = static_cast<double>(n + 1);
        const double inc = detail::integrate_split(
            [&](double t) { return L * std::exp(-L * (hi - t) + moc.log_at_log(L * t)); }, hi - 1.0, hi, t_delta,
            panels);
        g = lambda * g + inc;
    }
    return G;
}

struct SeriesCriterion {
    std::vector<std::int64_t> ks;  ///< k_1 .. k_N
    std::vector<double> terms;     ///< k_{n+1} lambda^n int_{lambda^n}^1 varpi / y^2
    std::vector<double> partial;
    Verdict verdict = Verdict::inconclusive;
    double mean_ratio = 0.0;
    double decay_exponent = 0.0;
    double block_ratio = 0.0;
};

/// Partial sums of sum_n k_{n+1} lambda^n int_{lambda^n}^1 varpi(y)/y^2 dy with a
/// trend verdict.
inline SeriesCriterion series_criterion(std::span<const std::int64_t> ks, const ModulusOfContinuity& moc,
                                        double lambda, int panels = 1) {
    SeriesCriterion r;
    r.ks.assign(ks.begin(), ks.end());
    const auto G = g_sequence(moc, lambda, ks.size(), panels);
    double s = 0.0;
    for (std::size_t n = 0; n < ks.size(); ++n) {
        r.terms.push_back(static_cast<double>(ks[n]) * G[n]);
        s += r.terms.back();
        r.partial.push_back(s);
    }
    const auto t = num::classify_series_blocks(r.terms);
    r.verdict = t.trend.verdict;
    r.mean_ratio = t.trend.mean_ratio;
    r.decay_exponent = t.trend.decay_exponent;
    r.block_ratio = t.block_ratio;
    return r;
}

/// Same with k_{n+1} = max(1, ceil(phi(n))), the largest quotients a phi-type
/// number may carry. N is cut where the quotients would leave the int64 range.
inline SeriesCriterion series_criterion(const PhiType& phi, const ModulusOfContinuity& moc, double lambda,
                                        std::size_t N, int panels = 1) {
    std::size_t n = 0;
    while (n < N && std::ceil(phi(static_cast<double>(n))) < 0x1.0p61) ++n;
    const auto ks = gen_partial_quotients(phi, n, 0, PhiSampling::extremal);
    return series_criterion(std::span<const std::int64_t>(ks), moc, lambda, panels);
}

enum class CaseTag { C1, C2, C3, custom };

inline std::string to_string(CaseTag c) {
    switch (c) {
    case CaseTag::C1: return "C1";
    case CaseTag::C2: return "C2";
    case CaseTag::C3: return "C3";
    case CaseTag::custom: return "custom";
    }
    return "?";
}

/// Reduced integrals, in u = log(1/y):
/// C1 int varpi(y)/y dy, C2 int (-log y)^nu varpi(y)/y dy, C3 int varpi(y)/y^{1+b} dy.
inline IntegralValue reduced_integral(CaseTag c, const ModulusOfContinuity& moc, double param = 0.0,
                                      const num::LevelPolicy& policy = {}) {
    const double u_delta = -std::log(moc.delta());
    switch (c) {
    case CaseTag::C1:
        return detail::integrate_log_scale([&](double u) { return moc.log_at_log(u); }, 0.0, u_delta, policy);
    case CaseTag::C2:
        if (!(param > 0.0)) throw InvalidParams("C2 needs nu > 0");
        return detail::integrate_log_scale(
            [&](double u) { return param * std::log(u) + moc.log_at_log(u); }, 0.0, u_delta, policy);
    case CaseTag::C3:
        if (!(param > 0.0)) throw InvalidParams("C3 needs b > 0");
        return detail::integrate_log_scale([&](double u) { return param * u + moc.log_at_log(u); }, 0.0, u_delta,
                                           policy);
    case CaseTag::custom: break;
    }
    throw InvalidParams("custom gauges have no reduced integral");
}

/// Case of a gauge: constant -> C1, n^nu -> C2 (param nu), a^n -> C3 (param
/// b = log a / log(1/lambda)); tables are custom.
inline std::pair<CaseTag, double> classify_gauge(const PhiType& phi, double lambda) {
    const double L = detail::log_L(lambda);
    return std::visit(
        [&](const auto& f) -> std::pair<CaseTag, double> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, PhiType::Constant>) return {CaseTag::C1, 0.0};
            else if constexpr (std::is_same_v<T, PhiType::Power>) return {CaseTag::C2, f.nu};
            else if constexpr (std::is_same_v<T, PhiType::Exponential>) {
                if (f.a == 1.0) return {CaseTag::C1, 0.0};
                return {CaseTag::C3, std::log(f.a) / L};
            } else return {CaseTag::custom, 0.0};
        },
        phi.form);
}

/// The gauge whose main integral the case reduces: C1 phi = 1, C2 phi = n^nu,
/// C3 phi = lambda^{-b n}.
inline PhiType gauge_of_case(CaseTag c, double param, double lambda) {
    switch (c) {
    case CaseTag::C1: return PhiType::constant(1.0);
    case CaseTag::C2: return PhiType::power(param);
    case CaseTag::C3: return PhiType::exponential(std::pow(lambda, -param));
    case CaseTag::custom: break;
    }
    throw InvalidParams("custom case has no gauge");
}

struct CaseReduction {
    CaseTag tag = CaseTag::custom;
    double param = 0.0;
    IntegralValue reduced;
    IntegralValue main;
    bool agree = false;
};

inline CaseReduction case_reduction(CaseTag c, const ModulusOfContinuity& moc, double param, double lambda,
                                    const num::LevelPolicy& policy = {}) {
    CaseReduction r;
    r.tag = c;
    r.param = param;
    r.reduced = reduced_integral(c, moc, param, policy);
    r.main = main_integral(gauge_of_case(c, param, lambda), moc, lambda, policy);
    r.agree = r.reduced.verdict == r.main.verdict;
    return r;
}

struct HigherRegularityOptions {
    bool use_delta_tilde = false;  ///< invert Delta~(n) = prod (k+1)^{-1} instead of Delta_n
    int samples = 64;              ///< geometric x-grid for varpi~
    int fit_from = 10;             ///< first n of the R(n) decay fits
    num::LevelPolicy policy{};
};

struct HigherRegularity {
    std::vector<double> R;          ///< R(0) .. R(n_max)
    double main_value = 0.0;        ///< R(0) equals the main integral
    bool nonincreasing = true;
    double vanishing_ratio = 0.0;   ///< R(n_max) / R(0)
    double exp_rate = 0.0;          ///< slope of log R(n) against n
    double power_rate = 0.0;        ///< slope of log R(n) against log n
    std::vector<double> x, varpi_tilde;  ///< varpi~ = R o Delta^{-1}
    bool is_modulus = true;
    double theta = 0.0;             ///< geometric decay of the Delta used
    double holder_fit = 0.0;        ///< slope of log varpi~ against log x
    double log_holder_fit = 0.0;    ///< slope of log varpi~ against log log(1/x)
    std::optional<double> beta;     ///< min(1, alpha log lambda / log theta), Holder or Lipschitz input
    std::optional<double> sigma;    ///< exponent of varpi~ ~ (log 1/x)^{-sigma}, log-Holder(1 + sigma) input
};

/// R(s) at real s by log-linear interpolation of the integer table.
inline double interpolate_R(std::span<const double> R, double s) {
    if (s <= 0.0) return R.front();
    const double last = static_cast<double>(R.size() - 1);
    if (s >= last) return R.back();
    const auto i = static_cast<std::size_t>(s);
    const double w = s - static_cast<double>(i);
    return std::exp((1.0 - w) * std::log(R[i]) + w * std::log(R[i + 1]));
}

/// R(n) for n = 0..n_max and varpi~ = R o Delta^{-1} sampled over the gaps
/// available in cf. Throws SeriesDiverges when the main integral is not finite
/// and NotAModulus when varpi~ fails to increase on the grid.
inline HigherRegularity higher_regularity(const PhiType& phi, const ModulusOfContinuity& moc, double lambda,
                                          const ContinuedFraction& cf, int n_max,
                                          const HigherRegularityOptions& opt = {}) {
    if (n_max < 2) throw InvalidParams("higher_regularity needs n_max >= 2");
    const auto I = main_integral(phi, moc, lambda, opt.policy);
    if (I.verdict != Verdict::finite)
        throw SeriesDiverges("main integral is " + std::string(to_string(I.verdict)) + "; R is undefined");
    const double L = detail::log_L(lambda);
    const detail::PhiKernel K(phi, L);
    const double t_delta = -std::log(moc.delta()) / L;
    auto log_g = [&](double t) { return std::log(L) + K.log_F(t) + moc.log_at_log(L * t); };
    const auto G = g_sequence(moc, lambda, static_cast<std::size_t>(n_max) + 1, opt.policy.panels);

    HigherRegularity h;
    h.main_value = I.value;
    for (int n = 0; n <= n_max; ++n) {
        const auto tail = detail::integrate_log_scale(log_g, n, t_delta, opt.policy);
        if (tail.verdict != Verdict::finite) throw NoConvergence("R(" + std::to_string(n) + ") tail is not finite");
        const double corner = G[static_cast<std::size_t>(n)] > 0.0
                                  ? std::exp(K.log_F(n) + std::log(G[static_cast<std::size_t>(n)]))
                                  : 0.0;
        h.R.push_back(tail.value + corner);
    }
    for (std::size_t i = 1; i < h.R.size(); ++i)
        if (h.R[i] > h.R[i - 1]) h.nonincreasing = false;
    h.vanishing_ratio = h.R.back() / h.R.front();

    std::vector<double> ns, lns, lR;
    for (int n = std::max(1, opt.fit_from); n <= n_max; ++n) {
        ns.push_back(n);
        lns.push_back(std::log(double(n)));
        lR.push_back(std::log(h.R[static_cast<std::size_t>(n)]));
    }
    h.exp_rate = num::fit_line(ns, lR).slope;
    h.power_rate = num::fit_line(lns, lR).slope;

    // the Delta table and its inverse
    std::vector<double> deltas;
    const std::span<const std::int64_t> ks(cf.ks);
    if (opt.use_delta_tilde) {
        for (int n = -1; n + 3 <= static_cast<int>(ks.size()) && n <= n_max; ++n) deltas.push_back(delta_tilde(ks, n));
    } else {
        for (int n = -1; n + 1 < static_cast<int>(cf.deltas.size()) && n <= n_max; ++n) deltas.push_back(cf.delta(n));
    }
    if (deltas.size() < 4) throw InsufficientRange("too few gaps to sample varpi~");
    {
        std::vector<double> idx, ld;
        for (std::size_t i = 1; i < deltas.size(); ++i) {
            idx.push_back(static_cast<double>(i) - 1.0);
            ld.push_back(std::log(deltas[i]));
        }
        h.theta = std::exp(num::fit_line(idx, ld).slope);
    }
    // x from the deepest gap up to Delta_0
    const double x_lo = deltas.back(), x_hi = deltas[1];
    std::vector<double> lx, lv, llx;
    for (int i = 0; i < opt.samples; ++i) {
        const double x = x_lo * std::pow(x_hi / x_lo, static_cast<double>(i) / (opt.samples - 1));
        const double s = opt.use_delta_tilde ? delta_tilde_inverse(ks, x) : delta_inverse(cf, x);
        const double v = interpolate_R(h.R, s);
        h.x.push_back(x);
        h.varpi_tilde.push_back(v);
        lx.push_back(std::log(x));
        lv.push_back(std::log(v));
        llx.push_back(std::log(-std::log(x)));
    }
    for (std::size_t i = 1; i < h.varpi_tilde.size(); ++i)
        if (!(h.varpi_tilde[i] > h.varpi_tilde[i - 1])) h.is_modulus = false;
    h.holder_fit = num::fit_line(lx, lv).slope;
    h.log_holder_fit = num::fit_line(llx, lv).slope;

    if (moc.kind() == MocKind::lipschitz || moc.kind() == MocKind::holder) {
        const double alpha = moc.kind() == MocKind::lipschitz ? 1.0 : moc.params()[0];
        h.beta = std::min(1.0, alpha * std::log(lambda) / std::log(h.theta));
    } else if (moc.kind() == MocKind::log_holder && moc.params()[0] > 1.0) {
        h.sigma = moc.params()[0] - 1.0;
    }
    if (!h.is_modulus) throw NotAModulus("R o Delta^{-1} is not increasing on the sampled grid");
    return h;
}

/// Everything the condition yields for one (phi, varpi, lambda).
struct IntegrabilityReport {
    IntegralValue main;
    SeriesCriterion series;
    CaseTag tag = CaseTag::custom;
    double case_param = 0.0;
    std::optional<IntegralValue> reduced;
    std::optional<HigherRegularity> higher;
    bool verdicts_agree = false;
};

/// When ks is nonempty the series uses it; otherwise k_{n+1} = ceil(phi(n)).
/// R(n) and varpi~ are added when the main integral is finite and cf is given.
inline IntegrabilityReport integrability_report(const PhiType& phi, const ModulusOfContinuity& moc, double lambda,
                                                std::span<const std::int64_t> ks = {}, std::size_t series_terms = 4096,
                                                const std::optional<ContinuedFraction>& cf = std::nullopt,
                                                int n_max = 60, const HigherRegularityOptions& opt = {}) {
    IntegrabilityReport r;
    r.main = main_integral(phi, moc, lambda, opt.policy);
    r.series = ks.empty() ? series_criterion(phi, moc, lambda, series_terms, opt.policy.panels)
                          : series_criterion(ks, moc, lambda, opt.policy.panels);
    std::tie(r.tag, r.case_param) = classify_gauge(phi, lambda);
    if (r.tag != CaseTag::custom) r.reduced = reduced_integral(r.tag, moc, r.case_param, opt.policy);
    r.verdicts_agree = r.series.verdict == r.main.verdict && (!r.reduced || r.reduced->verdict == r.main.verdict);
    if (cf && r.main.verdict == Verdict::finite) r.higher = higher_regularity(phi, moc, lambda, *cf, n_max, opt);
    return r;
}

/// Pairs whose verdict is known in closed form, one or more per case.
struct ReferenceCase {
    std::string name;
    PhiType phi;
    ModulusOfContinuity moc;
    double lambda;
    Verdict expected;
};

inline std::vector<ReferenceCase> reference_cases() {
    const auto F = Verdict::finite, D = Verdict::divergent;
    return {
        {"C1 holder(0.5)", PhiType::constant(1), moc::holder(0.5), 0.8, F},
        {"C1 lipschitz", PhiType::constant(1), moc::lipschitz(), 0.8, F},
        {"C1 log_holder(0.5)", PhiType::constant(1), moc::log_holder(0.5), 0.8, D},
        {"C1 log_holder(1)", PhiType::constant(1), moc::log_holder(1.0), 0.8, D},
        {"C1 log_holder(1.5)", PhiType::constant(1), moc::log_holder(1.5), 0.8, F},
        {"C1 iterated_log(2,1)", PhiType::constant(1), moc::iterated_log(2, 1.0), 0.8, F},
        {"C2 n log_holder(1.5)", PhiType::power(1), moc::log_holder(1.5), 0.8, D},
        {"C2 n log_holder(2.5)", PhiType::power(1), moc::log_holder(2.5), 0.8, F},
        {"C2 n^2 log_holder(2.5)", PhiType::power(2), moc::log_holder(2.5), 0.8, D},
        {"C2 n^2 log_holder(3.5)", PhiType::power(2), moc::log_holder(3.5), 0.8, F},
        {"C2 n^0.5 log_holder(1)", PhiType::power(0.5), moc::log_holder(1.0), 0.8, D},
        {"C2 n^0.5 log_holder(2)", PhiType::power(0.5), moc::log_holder(2.0), 0.8, F},
        {"C2 n holder(0.3)", PhiType::power(1), moc::holder(0.3), 0.8, F},
        {"C3 1.2^n holder(0.5)", PhiType::exponential(1.2), moc::holder(0.5), 0.6, F},
        {"C3 1.5^n holder(0.5)", PhiType::exponential(1.5), moc::holder(0.5), 0.6, D},
        {"C3 1.5^n lipschitz", PhiType::exponential(1.5), moc::lipschitz(), 0.6, F},
        {"C3 1.7^n lipschitz", PhiType::exponential(1.7), moc::lipschitz(), 0.6, D},
        {"C3 2^n lipschitz", PhiType::exponential(2.0), moc::lipschitz(), 0.6, D},
        {"C3 1.2^n log_holder(3)", PhiType::exponential(1.2), moc::log_holder(3.0), 0.6, D},
        {"C3 1.1^n holder(0.3)", PhiType::exponential(1.1), moc::holder(0.3), 0.6, F},
    };
}

} // namespace circleconj
