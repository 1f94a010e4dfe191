#pragma once

// Moduli of continuity: builders, the Dini test, geometric sums, comparison and fitting.

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "circleconj/error.hpp"
#include "circleconj/numerics.hpp"

namespace circleconj {

enum class MocKind { lipschitz, holder, log_holder, iterated_log, power_series, empirical, geometric_sum, custom };

inline std::string to_string(MocKind k) {
    switch (k) {
    case MocKind::lipschitz: return "lipschitz";
    case MocKind::holder: return "holder";
    case MocKind::log_holder: return "log_holder";
    case MocKind::iterated_log: return "iterated_log";
    case MocKind::power_series: return "power_series";
    case MocKind::empirical: return "empirical";
    case MocKind::geometric_sum: return "geometric_sum";
    case MocKind::custom: return "custom";
    }
    return "?";
}

/// A modulus of continuity on (0, delta], extended by the constant value
/// varpi(delta) to the right of delta. Evaluation is available both directly and in
/// the logarithmic coordinate u = log(1/x), which keeps deep evaluations
/// (x far below the double range) finite.
class ModulusOfContinuity {
public:
    using XFn = std::function<double(double)>;

    ModulusOfContinuity(MocKind kind, std::vector<double> params, double delta, XFn eval_x, XFn log_at_log)
        : kind_(kind), params_(std::move(params)), delta_(delta), eval_x_(std::move(eval_x)),
          log_at_log_(std::move(log_at_log)) {}

    double operator()(double x) const { return eval(x); }

    double eval(double x) const {
        if (!(x > 0.0)) return 0.0;
        if (x >= delta_) return eval_x_(delta_);
        return eval_x_(x);
    }

    /// varpi(exp(-u)).
    double at_log(double u) const { return std::exp(log_at_log(u)); }

    /// log varpi(exp(-u)).
    double log_at_log(double u) const {
        const double u_delta = -std::log(delta_);
        return log_at_log_(std::max(u, u_delta));
    }

    /// zeta(x) = x / varpi(x).
    double zeta(double x) const { return x / eval(x); }

    MocKind kind() const { return kind_; }
    std::string name() const { return to_string(kind_); }
    const std::vector<double>& params() const { return params_; }
    double delta() const { return delta_; }

    /// Whether zeta is promised to be increasing on (0, delta].
    bool promises_monotone_zeta() const {
        return kind_ == MocKind::lipschitz || kind_ == MocKind::holder || kind_ == MocKind::log_holder ||
               kind_ == MocKind::iterated_log;
    }

private:
    MocKind kind_;
    std::vector<double> params_;
    double delta_;
    XFn eval_x_;
    XFn log_at_log_;
};

struct ModulusCheck {
    bool increasing = true;
    bool vanishes_at_zero = true;
    bool subadditive = true;
    bool zeta_monotone = true;
    bool ok() const { return increasing && vanishes_at_zero && subadditive && zeta_monotone; }
};

/// Grid checks of the modulus axioms on (0, delta]: strict increase on a
/// geometric grid of `grid` points spanning 30 decades, decay to 0, sampled
/// subadditivity and (where promised) monotonicity of zeta.
inline ModulusCheck check_modulus(const ModulusOfContinuity& m, int grid = 1000, std::uint64_t seed = 1) {
    ModulusCheck c;
    const double u0 = -std::log(m.delta());
    const double span = 30.0 * std::log(10.0);
    double prev_log = std::numeric_limits<double>::infinity();
    double prev_log_zeta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        const double u = u0 + span * i / (grid - 1);
        const double lv = m.log_at_log(u);
        if (!(lv < prev_log) && i > 0) c.increasing = false;
        const double lz = -u - lv;  // log zeta at x = exp(-u)
        if (m.promises_monotone_zeta() && i > 0 && lz > prev_log_zeta + 1e-12 * std::abs(lz))
            c.zeta_monotone = false;
        prev_log = lv;
        prev_log_zeta = lz;
    }
    // decay toward 0: compare x = e^{-u0-70} with x = e^{-u0-700}, still inside double range
    const double far = m.log_at_log(u0 + 700.0), mid = m.log_at_log(u0 + 70.0);
    if (!((far < mid || std::isinf(far)) && far < m.log_at_log(u0) - 1.0)) c.vanishes_at_zero = false;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 500; ++i) {
        const double x = m.delta() * std::exp(-span * (static_cast<double>(rng() >> 11) * 0x1.0p-53));
        const double y = m.delta() * std::exp(-span * (static_cast<double>(rng() >> 11) * 0x1.0p-53));
        if (m.eval(x + y) > (m.eval(x) + m.eval(y)) * (1.0 + 1e-12)) c.subadditive = false;
    }
    return c;
}

namespace detail {
inline double ensure_modulus(const ModulusOfContinuity& m) {
    const auto c = check_modulus(m);
    if (!c.ok())
        throw InvalidParams(m.name() + " fails the modulus grid checks (increasing=" + std::to_string(c.increasing) +
                            ", vanishing=" + std::to_string(c.vanishes_at_zero) +
                            ", subadditive=" + std::to_string(c.subadditive) +
                            ", zeta=" + std::to_string(c.zeta_monotone) + ")");
    return 0.0;
}

/// Smallest u >= u_min past which d/du log varpi(e^{-u}) > -1, so that
/// zeta(x) = x/varpi(x) is increasing on (0, e^{-u}].
template <class G>
double zeta_threshold(G&& g, double u_min) {
    auto slope = [&](double u) {
        const double h = 1e-5 * std::max(1.0, u);
        return (g(u + h) - g(u - h)) / (2.0 * h);
    };
    if (slope(u_min) > -1.0 + 1e-9) return u_min;
    double lo = u_min, hi = u_min + 1.0;
    while (slope(hi) <= -1.0 + 1e-9) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) > -1.0 + 1e-9 ? hi : lo) = mid;
    }
    return hi;
}

inline double logsumexp(std::span<const double> xs) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : xs) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - mx);
    return mx + std::log(s);
}

inline ModulusOfContinuity power_sum(std::vector<double> as, std::vector<double> gs, double x_star,
                                     std::vector<double> params) {
    params.push_back(static_cast<double>(as.size()));
    auto eval_x = [as, gs](double x) {
        double s = 0.0;
        for (std::size_t j = 0; j < as.size(); ++j) s += as[j] * std::pow(x, gs[j]);
        return s;
    };
    auto g = [as, gs](double u) {
        std::vector<double> logs(as.size());
        for (std::size_t j = 0; j < as.size(); ++j) logs[j] = std::log(as[j]) - gs[j] * u;
        return logsumexp(logs);
    };
    return {MocKind::power_series, std::move(params), x_star, eval_x, g};
}
} // namespace detail

namespace moc {

/// varpi(x) = x.
inline ModulusOfContinuity lipschitz() {
    return {MocKind::lipschitz, {}, 1.0, [](double x) { return x; }, [](double u) { return -u; }};
}

/// varpi(x) = x^alpha, 0 < alpha < 1.
inline ModulusOfContinuity holder(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParams("holder needs 0 < alpha < 1");
    return {MocKind::holder, {alpha}, 1.0, [alpha](double x) { return std::pow(x, alpha); },
            [alpha](double u) { return -alpha * u; }};
}

/// varpi(x) = (log 1/x)^{-alpha}, alpha > 0, on (0, e^{-max(1, alpha)}].
inline ModulusOfContinuity log_holder(double alpha) {
    if (!(alpha > 0.0)) throw InvalidParams("log_holder needs alpha > 0");
    const double delta = std::exp(-std::max(1.0, alpha));
    return {MocKind::log_holder, {alpha}, delta, [alpha](double x) { return std::pow(-std::log(x), -alpha); },
            [alpha](double u) { return -alpha * std::log(u); }};
}

/// varpi(x) = 1 / (L_1 L_2 ... L_{l-1} L_l^{1+sigma}) with L_1 = log(1/x), L_{j+1} = log L_j.
inline ModulusOfContinuity iterated_log(int ell, double sigma) {
    if (ell < 1) throw InvalidParams("iterated_log needs l >= 1");
    if (!(sigma > 0.0)) throw InvalidParams("iterated_log needs sigma > 0");
    auto g = [ell, sigma](double u) {
        double L = u, acc = 0.0;
        for (int j = 1; j <= ell; ++j) {
            const double lg = std::log(L);
            acc -= (j == ell ? 1.0 + sigma : 1.0) * lg;
            L = lg;
        }
        return acc;
    };
    // L_l >= 1 requires u >= exp^{(l-1)}(1)
    double u_min = 1.0;
    for (int j = 1; j < ell; ++j) u_min = std::exp(u_min);
    const double u_delta = detail::zeta_threshold(g, u_min);
    return {MocKind::iterated_log, {static_cast<double>(ell), sigma}, std::exp(-u_delta),
            [g](double x) { return std::exp(g(-std::log(x))); }, g};
}

/// varpi(x) = sum_j a_j x^{gamma_j} on (0, x_star]. The coefficient generators
/// are called for j = 1, 2, ...; the two summability conditions at x_star and
/// tau are tested before the series is truncated for evaluation.
inline ModulusOfContinuity power_series(const std::function<double(int)>& a, const std::function<double(int)>& gamma,
                                        double x_star, double tau) {
    if (!(x_star > 0.0 && tau > 0.0 && tau < x_star)) throw InvalidParams("power_series needs 0 < tau < x_star");
    auto term_at = [&](double n, double x) {
        const int j = static_cast<int>(n);
        return a(j) * std::pow(x, gamma(j));
    };
    num::LevelPolicy pol;
    const auto s1 = num::sum_to_infinity([&](double n) { return term_at(n, x_star); }, 1.0, pol);
    const auto s2 = num::sum_to_infinity(
        [&](double n) { return term_at(n, tau) / gamma(static_cast<int>(n)); }, 1.0, pol);
    if (s1.verdict != Verdict::finite) throw SeriesDiverges("sum a_j x_*^gamma_j is " + std::string(to_string(s1.verdict)));
    if (s2.verdict != Verdict::finite)
        throw SeriesDiverges("sum a_j tau^gamma_j / gamma_j is " + std::string(to_string(s2.verdict)));
    std::vector<double> as, gs;
    double partial = 0.0;
    for (int j = 1; j <= 100000; ++j) {
        const double aj = a(j), gj = gamma(j);
        if (!(aj > 0.0 && gj > 0.0)) throw InvalidParams("power_series coefficients must be positive");
        const double t = aj * std::pow(x_star, gj);
        as.push_back(aj);
        gs.push_back(gj);
        partial += t;
        if (j >= 8 && t < 1e-18 * partial) break;
    }
    return detail::power_sum(std::move(as), std::move(gs), x_star, {x_star, tau});
}

/// Finite power sum sum_j a_j x^{gamma_j} on (0, x_star].
inline ModulusOfContinuity power_series(std::vector<double> a, std::vector<double> gamma, double x_star = 1.0) {
    if (a.empty() || a.size() != gamma.size()) throw InvalidParams("power_series needs equally long nonempty a, gamma");
    for (std::size_t j = 0; j < a.size(); ++j)
        if (!(a[j] > 0.0 && gamma[j] > 0.0)) throw InvalidParams("power_series coefficients must be positive");
    return detail::power_sum(std::move(a), std::move(gamma), x_star, {x_star});
}

/// Table modulus: piecewise linear through (h_i, omega_i), linear to 0 below the
/// first node and constant beyond the last.
inline ModulusOfContinuity empirical(std::vector<double> h, std::vector<double> omega) {
    if (h.size() < 2 || h.size() != omega.size()) throw InvalidParams("empirical modulus needs >= 2 nodes");
    for (std::size_t i = 1; i < h.size(); ++i)
        if (!(h[i] > h[i - 1])) throw InvalidParams("empirical nodes must be increasing");
    auto f = [h, omega](double x) {
        if (x <= h.front()) return omega.front() * x / h.front();
        if (x >= h.back()) return omega.back();
        const auto it = std::upper_bound(h.begin(), h.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - h.begin());
        const double w = (x - h[i - 1]) / (h[i] - h[i - 1]);
        return (1 - w) * omega[i - 1] + w * omega[i];
    };
    const double delta = h.back();
    return {MocKind::empirical, {}, delta, f, [f](double u) { return std::log(f(std::exp(-u))); }};
}

/// Arbitrary modulus from a function on (0, delta]; `log_at_log` may be omitted.
inline ModulusOfContinuity custom(std::function<double(double)> f, double delta,
                                  std::function<double(double)> log_at_log = {}) {
    if (!(delta > 0.0)) throw InvalidParams("custom modulus needs delta > 0");
    if (!log_at_log) log_at_log = [f](double u) { return std::log(f(std::exp(-u))); };
    ModulusOfContinuity m(MocKind::custom, {}, delta, std::move(f), std::move(log_at_log));
    detail::ensure_modulus(m);
    return m;
}

} // namespace moc

/// Builder by name, used by configuration files:
/// lipschitz | holder(alpha) | log_holder(alpha) | iterated_log(l, sigma) |
/// power_series(a_1..a_k, gamma_1..gamma_k) with 2k params | example_power_series.
inline ModulusOfContinuity make_moc(const std::string& kind, const std::vector<double>& params = {}) {
    auto need = [&](std::size_t n) {
        if (params.size() != n)
            throw InvalidParams(kind + " expects " + std::to_string(n) + " parameters, got " +
                                std::to_string(params.size()));
    };
    if (kind == "lipschitz") {
        need(0);
        return moc::lipschitz();
    }
    if (kind == "holder") {
        need(1);
        return params[0] == 1.0 ? moc::lipschitz() : moc::holder(params[0]);
    }
    if (kind == "log_holder") {
        need(1);
        return moc::log_holder(params[0]);
    }
    if (kind == "iterated_log") {
        need(2);
        if (params[0] != std::floor(params[0])) throw InvalidParams("iterated_log depth must be an integer");
        return moc::iterated_log(static_cast<int>(params[0]), params[1]);
    }
    if (kind == "power_series") {
        if (params.empty() || params.size() % 2 != 0) throw InvalidParams("power_series expects 2k parameters");
        const std::size_t k = params.size() / 2;
        return moc::power_series(std::vector<double>(params.begin(), params.begin() + k),
                                 std::vector<double>(params.begin() + k, params.end()));
    }
    if (kind == "example_power_series") {
        need(0);
        return moc::power_series([](int j) { return std::ldexp(1.0, -j); }, [](int j) { return 1.0 / j; }, 1.0, 0.5);
    }
    throw InvalidParams("unknown modulus kind '" + kind + "'");
}

struct DiniResult {
    num::TailSum integral;  ///< int_0^delta varpi(x)/x dx
    num::TailSum series;    ///< sum_{n>=1} varpi(theta^n delta)
    Verdict verdict = Verdict::inconclusive;  ///< common verdict, inconclusive on disagreement
    bool agree = false;
};

/// Dini test. The integral is taken in u = log(1/x), where it becomes
/// int_{log(1/delta)}^inf varpi(e^{-u}) du.
inline DiniResult dini_check(const ModulusOfContinuity& m, double theta, const num::LevelPolicy& policy = {}) {
    if (!(theta > 0.0 && theta < 1.0)) throw InvalidParams("dini_check needs theta in (0,1)");
    const double u0 = -std::log(m.delta());
    const double step = -std::log(theta);
    DiniResult r;
    r.integral = num::integrate_to_infinity([&](double u) { return m.at_log(u); }, u0, policy);
    r.series = num::sum_to_infinity([&](double n) { return m.at_log(u0 + n * step); }, 1.0, policy);
    r.agree = r.integral.verdict == r.series.verdict;
    r.verdict = r.agree ? r.integral.verdict : Verdict::inconclusive;
    return r;
}

/// varpi~(x) = sum_{n>=1} varpi(theta^n x). Throws DiniViolated unless the Dini
/// test is finite.
inline ModulusOfContinuity geometric_sum_moc(const ModulusOfContinuity& m, double theta) {
    const auto d = dini_check(m, theta);
    if (d.verdict != Verdict::finite) throw DiniViolated(m.name() + " is " + std::string(to_string(d.verdict)) + " under the Dini test");
    auto base = std::make_shared<ModulusOfContinuity>(m);
    const double step = -std::log(theta);
    auto g = [base, step](double u) {
        const auto s = num::sum_to_infinity([&](double n) { return base->at_log(u + n * step); }, 1.0);
        return std::log(s.value);
    };
    auto f = [g](double x) { return std::exp(g(-std::log(x))); };
    std::vector<double> params = m.params();
    params.push_back(theta);
    return {MocKind::geometric_sum, std::move(params), m.delta(), f, g};
}

enum class Ordering { weaker, strictly_weaker, not_weaker, inconclusive };

inline std::string to_string(Ordering o) {
    switch (o) {
    case Ordering::weaker: return "weaker";
    case Ordering::strictly_weaker: return "strictly_weaker";
    case Ordering::not_weaker: return "not_weaker";
    case Ordering::inconclusive: return "inconclusive";
    }
    return "?";
}

struct OrderingReport {
    Ordering verdict = Ordering::inconclusive;
    std::vector<double> u;          ///< grid in log(1/x)
    std::vector<double> log_ratio;  ///< log(varpi_2 / varpi_1)
};

/// Is m1 weaker than m2, i.e. varpi_2 = O(varpi_1) as x -> 0+? The log-ratio
/// log(varpi_2/varpi_1) is tracked on a geometric grid in u = log(1/x) from the
/// common domain out to u ~ 10^6 (well beyond 12 decades of x). A trend of
/// more than `trend_tol` over the second half of the grid decides the verdict.
inline OrderingReport weaker_than(const ModulusOfContinuity& m1, const ModulusOfContinuity& m2,
                                  double trend_tol = 0.05, int grid = 200) {
    OrderingReport rep;
    const double ua = std::max(-std::log(m1.delta()), -std::log(m2.delta())) + 1.0;
    double ub = std::max(ua + 12.0 * std::log(10.0), ua * 1e6);
    if (m1.kind() == MocKind::empirical || m2.kind() == MocKind::empirical) {
        // tables carry no information past their first node
        ub = ua + 12.0 * std::log(10.0);
    }
    for (int i = 0; i < grid; ++i) {
        const double u = ua * std::pow(ub / ua, static_cast<double>(i) / (grid - 1));
        rep.u.push_back(u);
        rep.log_ratio.push_back(m2.log_at_log(u) - m1.log_at_log(u));
    }
    const std::size_t mid = rep.log_ratio.size() / 2;
    const auto tail = std::span<const double>(rep.log_ratio).subspan(mid);
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    const double change = tail.back() - tail.front();
    bool nonincreasing = true, nondecreasing = true;
    for (std::size_t i = 1; i < tail.size(); ++i) {
        const double d = tail[i] - tail[i - 1];
        const double slack = 1e-12 * std::max(1.0, std::abs(tail[i]));
        if (d > slack) nonincreasing = false;
        if (d < -slack) nondecreasing = false;
    }
    if (*hi - *lo <= trend_tol)
        rep.verdict = Ordering::weaker;
    else if (nonincreasing && change < -trend_tol)
        rep.verdict = Ordering::strictly_weaker;
    else if (nondecreasing && change > trend_tol)
        rep.verdict = Ordering::not_weaker;
    return rep;
}

struct EmpiricalFit {
    std::vector<double> h, omega;  ///< table of the sliding-window modulus
    bool degenerate = false;       ///< omega vanishes identically
    std::string fitted_class;      ///< "holder", "log_holder" or "degenerate"
    double exponent = 0.0;         ///< log-log slope over the fit window
    double log_index = 0.0;        ///< slope of log omega against -log log(1/h)
    double fit_lo = 0.0, fit_hi = 0.0;
    std::shared_ptr<ModulusOfContinuity> modulus;  ///< table modulus (null when degenerate)
};

struct EmpiricalOptions {
    int levels = 48;           ///< h values on a geometric grid
    double period = 0.0;       ///< > 0 for samples of a periodic function
    double fit_lo = 0.0;       ///< 0: largest gap between consecutive abscissae
    double fit_hi = 0.0;       ///< 0: span / 8
    double log_holder_switch = 0.05;
};

/// omega(h) = max{|f(x) - f(y)| : |x - y| <= h} from samples by a sliding
/// window, then a log-log least-squares fit of omega against h.
inline EmpiricalFit empirical_moc(std::vector<std::pair<double, double>> samples, const EmpiricalOptions& opt = {}) {
    if (samples.size() < 64) throw InsufficientRange("need at least 64 samples, got " + std::to_string(samples.size()));
    std::sort(samples.begin(), samples.end());
    std::vector<double> xs, fs;
    for (const auto& [x, f] : samples) {
        if (!xs.empty() && x == xs.back()) continue;
        xs.push_back(x);
        fs.push_back(f);
    }
    const std::size_t n = xs.size();
    double min_gap = std::numeric_limits<double>::infinity(), max_gap = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        min_gap = std::min(min_gap, xs[i] - xs[i - 1]);
        max_gap = std::max(max_gap, xs[i] - xs[i - 1]);
    }
    const double span = opt.period > 0.0 ? opt.period : xs.back() - xs.front();
    if (opt.period > 0.0) max_gap = std::max(max_gap, xs.front() + opt.period - xs.back());
    if (!(span / min_gap >= 1e3))
        throw InsufficientRange("pair separations span " + std::to_string(std::log10(span / min_gap)) + " decades");
    if (opt.period > 0.0) {
        // one extra period of samples lets windows wrap around
        for (std::size_t i = 0; i < n; ++i) {
            xs.push_back(xs[i] + opt.period);
            fs.push_back(fs[i]);
        }
    }
    EmpiricalFit fit;
    const double h_lo = min_gap, h_hi = opt.period > 0.0 ? 0.5 * span : span;
    for (int lev = 0; lev < opt.levels; ++lev) {
        const double h = h_lo * std::pow(h_hi / h_lo, static_cast<double>(lev) / (opt.levels - 1));
        // sliding window max - min over [x_i, x_i + h]
        std::deque<std::size_t> qmax, qmin;
        double best = 0.0;
        std::size_t right = 0;
        const std::size_t limit = xs.size();
        for (std::size_t left = 0; left < n; ++left) {
            while (right < limit && xs[right] - xs[left] <= h * (1.0 + 1e-12)) {
                while (!qmax.empty() && fs[qmax.back()] <= fs[right]) qmax.pop_back();
                qmax.push_back(right);
                while (!qmin.empty() && fs[qmin.back()] >= fs[right]) qmin.pop_back();
                qmin.push_back(right);
                ++right;
            }
            while (qmax.front() < left) qmax.pop_front();
            while (qmin.front() < left) qmin.pop_front();
            best = std::max(best, fs[qmax.front()] - fs[qmin.front()]);
        }
        fit.h.push_back(h);
        fit.omega.push_back(best);
    }
    const double top = *std::max_element(fit.omega.begin(), fit.omega.end());
    double scale = 0.0;
    for (double f : fs) scale = std::max(scale, std::abs(f));
    if (top <= 1e-13 * std::max(1.0, scale)) {
        fit.degenerate = true;
        fit.fitted_class = "degenerate";
        return fit;
    }
    fit.fit_lo = opt.fit_lo > 0.0 ? opt.fit_lo : max_gap;
    fit.fit_hi = opt.fit_hi > 0.0 ? opt.fit_hi : span / 8.0;
    std::vector<double> lh, lw, llh;
    for (std::size_t i = 0; i < fit.h.size(); ++i) {
        if (fit.h[i] < fit.fit_lo * (1 - 1e-12) || fit.h[i] > fit.fit_hi * (1 + 1e-12) || fit.omega[i] <= 0.0) continue;
        lh.push_back(std::log(fit.h[i]));
        lw.push_back(std::log(fit.omega[i]));
        llh.push_back(-std::log(-std::log(fit.h[i] / (span * std::exp(1.0)))));
    }
    if (lh.size() < 3) throw InsufficientRange("fewer than three table points inside the fit window");
    fit.exponent = num::fit_line(lh, lw).slope;
    fit.fitted_class = "holder";
    if (fit.exponent < opt.log_holder_switch) {
        fit.log_index = num::fit_line(llh, lw).slope;
        fit.fitted_class = "log_holder";
    }
    // Table modulus with strictly increasing nodes.
    std::vector<double> th, tw;
    for (std::size_t i = 0; i < fit.h.size(); ++i) {
        if (fit.omega[i] <= 0.0) continue;
        if (!tw.empty() && fit.omega[i] <= tw.back()) continue;
        th.push_back(fit.h[i]);
        tw.push_back(fit.omega[i]);
    }
    if (th.size() >= 2) fit.modulus = std::make_shared<ModulusOfContinuity>(moc::empirical(th, tw));
    return fit;
}

} // namespace circleconj
