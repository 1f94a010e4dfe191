#pragma once

// Continued fractions, the gap sequence |q_n rho - p_n| and partial-quotient generators.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "circleconj/error.hpp"

namespace circleconj {

/// Continued fraction rho = [k_1, k_2, ...] with convergents p_n/q_n and gaps
/// Delta_n = |q_n rho - p_n|. Index n of ps/qs/deltas is stored at position n + 1,
/// so position 0 holds the seed p_{-1} = 1, q_{-1} = 0, Delta_{-1} = 1.
struct ContinuedFraction {
    double rho = 0.0;
    std::vector<std::int64_t> ks;  ///< ks[0] = k_1
    std::vector<std::int64_t> ps;  ///< p_{-1} .. p_N
    std::vector<std::int64_t> qs;  ///< q_{-1} .. q_N
    std::vector<double> deltas;    ///< Delta_{-1} .. Delta_m, m <= N

    std::size_t depth() const { return ks.size(); }
    std::int64_t k(int n) const { return ks.at(static_cast<std::size_t>(n - 1)); }
    std::int64_t p(int n) const { return ps.at(static_cast<std::size_t>(n + 1)); }
    std::int64_t q(int n) const { return qs.at(static_cast<std::size_t>(n + 1)); }
    double delta(int n) const { return deltas.at(static_cast<std::size_t>(n + 1)); }
    /// Largest n with Delta_n available.
    int max_delta_index() const { return static_cast<int>(deltas.size()) - 2; }
};

struct Convergents {
    std::vector<std::int64_t> ps;  ///< p_{-1} .. p_N
    std::vector<std::int64_t> qs;  ///< q_{-1} .. q_N
};

namespace detail {
inline bool step_convergent(std::int64_t k, std::int64_t a_n, std::int64_t a_prev, std::int64_t& out) {
    std::int64_t prod = 0;
    if (__builtin_mul_overflow(k, a_n, &prod)) return false;
    return !__builtin_add_overflow(prod, a_prev, &out);
}
} // namespace detail

/// p_{n+1} = k_{n+1} p_n + p_{n-1}, q_{n+1} = k_{n+1} q_n + q_{n-1}.
/// Throws IntegerOverflow carrying the number of quotients that fit in int64.
inline Convergents convergents(std::span<const std::int64_t> ks) {
    Convergents c;
    c.ps = {1, 0};
    c.qs = {0, 1};
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < 1) throw InvalidParams("partial quotients must be >= 1");
        std::int64_t p = 0, q = 0;
        const std::size_t n = c.ps.size() - 1;
        if (!detail::step_convergent(ks[i], c.ps[n], c.ps[n - 1], p) ||
            !detail::step_convergent(ks[i], c.qs[n], c.qs[n - 1], q))
            throw IntegerOverflow(i);
        c.ps.push_back(p);
        c.qs.push_back(q);
    }
    return c;
}

/// Signed residual q x - p evaluated without cancellation loss in the product.
template <class Real>
Real signed_gap(std::int64_t q, std::int64_t p, Real x) {
    if constexpr (std::is_same_v<Real, double>)
        return std::fma(static_cast<double>(q), x, -static_cast<double>(p));
    else
        return Real(q) * x - Real(p);
}

/// Expansion of x in (0,1) by the gap recurrence Delta_{n-1} = k_{n+1} Delta_n + Delta_{n+1}.
/// Emits at most n_terms quotients and stops early once Delta_n falls below
/// 1e3 * eps * q_n, where further quotients are rounding noise.
template <class Real = double>
ContinuedFraction cf_expand_trusted(Real x, std::size_t n_terms) {
    if (!(x > Real(0) && x < Real(1))) throw InvalidParams("cf_expand needs x in (0,1)");
    if (n_terms < 1) throw InvalidParams("cf_expand needs n_terms >= 1");
    const Real eps = std::numeric_limits<Real>::epsilon();
    ContinuedFraction cf;
    cf.rho = static_cast<double>(x);
    cf.ps = {1, 0};
    cf.qs = {0, 1};
    std::vector<Real> gaps{Real(-1), x};  // signed q_n x - p_n, sign (-1)^n
    while (cf.ks.size() < n_terms) {
        const std::size_t n = cf.ps.size() - 1;  // position of index n (current last)
        const Real gap_n = gaps[n], gap_prev = gaps[n - 1];
        const Real abs_n = gap_n < Real(0) ? -gap_n : gap_n;
        const Real abs_prev = gap_prev < Real(0) ? -gap_prev : gap_prev;
        if (abs_n <= Real(1000) * eps * Real(cf.qs[n])) break;
        using std::floor;
        Real ratio = floor(abs_prev / abs_n);
        if (!(ratio >= Real(1)) || ratio > Real(std::numeric_limits<std::int64_t>::max() / 4)) break;
        auto k = static_cast<std::int64_t>(ratio);
        std::int64_t p = 0, q = 0;
        Real gap_next{};
        bool ok = false;
        for (int attempt = 0; attempt < 4 && k >= 1; ++attempt) {
            if (!detail::step_convergent(k, cf.ps[n], cf.ps[n - 1], p) ||
                !detail::step_convergent(k, cf.qs[n], cf.qs[n - 1], q))
                break;
            gap_next = signed_gap<Real>(q, p, x);
            const bool sign_ok = (gap_next == Real(0)) || ((gap_next < Real(0)) != (gap_n < Real(0)));
            const Real abs_next = gap_next < Real(0) ? -gap_next : gap_next;
            if (!sign_ok) {
                --k;  // overshoot: the residual changed side
                continue;
            }
            if (abs_next >= abs_n) {
                ++k;
                continue;
            }
            ok = true;
            break;
        }
        if (!ok) break;
        cf.ks.push_back(k);
        cf.ps.push_back(p);
        cf.qs.push_back(q);
        gaps.push_back(gap_next);
        if (gap_next == Real(0)) break;
    }
    cf.deltas.reserve(gaps.size());
    for (const Real& g : gaps) cf.deltas.push_back(static_cast<double>(g < Real(0) ? -g : g));
    if (!cf.deltas.empty() && cf.deltas.back() == 0.0) cf.deltas.pop_back();
    return cf;
}

/// Like cf_expand_trusted but throws PrecisionExhausted when fewer than n_terms
/// quotients are trustworthy.
template <class Real = double>
ContinuedFraction cf_expand(Real x, std::size_t n_terms) {
    auto cf = cf_expand_trusted<Real>(x, n_terms);
    if (cf.ks.size() < n_terms) throw PrecisionExhausted(cf.ks.size());
    return cf;
}

/// The rational [k_1, ..., k_N]; gaps Delta_{-1}..Delta_{N-1} use the exact tails
/// Delta_n = 1 / (q_{n+1} + q_n [0; k_{n+2}, ..., k_N]).
inline ContinuedFraction from_quotients(std::span<const std::int64_t> ks) {
    if (ks.empty()) throw InvalidParams("from_quotients needs at least one quotient");
    ContinuedFraction cf;
    auto c = convergents(ks);
    cf.ks.assign(ks.begin(), ks.end());
    cf.ps = std::move(c.ps);
    cf.qs = std::move(c.qs);
    const std::size_t N = ks.size();
    // tails[i] = [0; k_i, ..., k_N] for i = 1..N+1 (tails[N+1] = 0)
    std::vector<long double> tails(N + 2, 0.0L);
    for (std::size_t i = N; i >= 1; --i) tails[i] = 1.0L / (static_cast<long double>(ks[i - 1]) + tails[i + 1]);
    cf.rho = static_cast<double>(tails[1]);
    cf.deltas.push_back(1.0);
    for (std::size_t n = 0; n + 1 < N; ++n) {
        // Delta_n with n = 0..N-2 uses q_{n+1}, q_n, tail_{n+2}
        const long double qn1 = static_cast<long double>(cf.qs[n + 2]);
        const long double qn = static_cast<long double>(cf.qs[n + 1]);
        cf.deltas.push_back(static_cast<double>(1.0L / (qn1 + qn * tails[n + 2])));
    }
    return cf;
}

/// Delta_{-1} .. Delta_m of an expansion.
inline std::vector<double> delta_seq(const ContinuedFraction& cf) { return cf.deltas; }

/// Largest relative residual of Delta_n = k_{n+2} Delta_{n+1} + Delta_{n+2}.
inline double delta_recurrence_residual(const ContinuedFraction& cf) {
    double worst = 0.0;
    for (int n = -1; n + 2 <= cf.max_delta_index() && n + 2 <= static_cast<int>(cf.depth()); ++n) {
        const double lhs = cf.delta(n);
        const double rhs = static_cast<double>(cf.k(n + 2)) * cf.delta(n + 1) + cf.delta(n + 2);
        worst = std::max(worst, std::abs(lhs - rhs) / lhs);
    }
    return worst;
}

namespace detail {
inline double log_linear_inverse(std::span<const double> values, int first_index, double x) {
    if (values.size() < 2) throw OutOfRange("inverse needs at least two grid values");
    if (!(x <= values.front() && x >= values.back()))
        throw OutOfRange("x outside [" + std::to_string(values.back()) + ", " +
                         std::to_string(values.front()) + "]");
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (x == values[i]) return first_index + static_cast<double>(i);
        if (x > values[i + 1]) {
            const double la = std::log(values[i]), lb = std::log(values[i + 1]);
            return first_index + static_cast<double>(i) + (la - std::log(x)) / (la - lb);
        }
    }
    return first_index + static_cast<double>(values.size() - 1);
}
} // namespace detail

/// Continuous inverse of n -> Delta_n, log-linear between grid points.
/// Throws OutOfRange for x below the deepest available gap.
inline double delta_inverse(const ContinuedFraction& cf, double x) {
    return detail::log_linear_inverse(cf.deltas, -1, x);
}

/// Delta~(n) = prod_{j=-1}^{n+1} (k_{j+2} + 1)^{-1}, a lower bound for Delta_n.
inline double delta_tilde(std::span<const std::int64_t> ks, int n) {
    if (n < -1) throw OutOfRange("delta_tilde index must be >= -1");
    const std::size_t need = static_cast<std::size_t>(n + 3);
    if (ks.size() < need) throw OutOfRange("delta_tilde(" + std::to_string(n) + ") needs " +
                                           std::to_string(need) + " quotients");
    double log_prod = 0.0;
    for (std::size_t i = 0; i < need; ++i) log_prod -= std::log1p(static_cast<double>(ks[i]));
    return std::exp(log_prod);
}

/// Log-linear inverse of Delta~ over the indices -1 .. ks.size() - 3.
inline double delta_tilde_inverse(std::span<const std::int64_t> ks, double x) {
    std::vector<double> grid;
    for (int n = -1; n + 3 <= static_cast<int>(ks.size()); ++n) grid.push_back(delta_tilde(ks, n));
    return detail::log_linear_inverse(grid, -1, x);
}

/// Gauge phi for phi-type irrationals, k_{n+1} = O(phi(n)).
struct PhiType {
    struct Constant { double c = 1.0; };
    struct Power { double nu = 1.0; };          ///< phi(n) = n^nu
    struct Exponential { double a = 2.0; };     ///< phi(n) = a^n
    struct Table { std::vector<double> values; };  ///< phi(n) = values[n], linear in between

    std::variant<Constant, Power, Exponential, Table> form = Constant{};

    static PhiType constant(double c) {
        if (!(c > 0)) throw InvalidParams("constant phi must be positive");
        return {Constant{c}};
    }
    static PhiType power(double nu) {
        if (!(nu > 0)) throw InvalidParams("power phi needs nu > 0");
        return {Power{nu}};
    }
    static PhiType exponential(double a) {
        if (!(a >= 1)) throw InvalidParams("exponential phi needs a >= 1");
        return {Exponential{a}};
    }
    static PhiType table(std::vector<double> values) {
        if (values.empty()) throw InvalidParams("phi table is empty");
        for (std::size_t i = 1; i < values.size(); ++i)
            if (values[i] < values[i - 1]) throw InvalidParams("phi table must be nondecreasing");
        return {Table{std::move(values)}};
    }

    double operator()(double n) const {
        return std::visit(
            [n](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Constant>) return f.c;
                else if constexpr (std::is_same_v<T, Power>) return n <= 0 ? 0.0 : std::pow(n, f.nu);
                else if constexpr (std::is_same_v<T, Exponential>) return std::pow(f.a, n);
                else {
                    if (n <= 0) return f.values.front();
                    const double last = static_cast<double>(f.values.size() - 1);
                    if (n >= last) return f.values.back();
                    const auto i = static_cast<std::size_t>(n);
                    const double w = n - static_cast<double>(i);
                    return (1 - w) * f.values[i] + w * f.values[i + 1];
                }
            },
            form);
    }

    std::string name() const {
        return std::visit(
            [](const auto& f) -> std::string {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Constant>) return "constant";
                else if constexpr (std::is_same_v<T, Power>) return "power";
                else if constexpr (std::is_same_v<T, Exponential>) return "exponential";
                else return "table";
            },
            form);
    }
};

/// Finite distribution of partial quotients: value values[j] with probability probs[j].
struct QuotientDistribution {
    std::vector<std::int64_t> values;
    std::vector<double> probs;
};

inline void validate(const QuotientDistribution& d) {
    if (d.values.empty() || d.values.size() != d.probs.size())
        throw BadDistribution("values and probabilities must be nonempty and equally long");
    double total = 0.0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        if (d.values[i] < 1) throw BadDistribution("partial quotients must be >= 1");
        if (!(d.probs[i] >= 0.0 && d.probs[i] <= 1.0)) throw BadDistribution("probability outside [0,1]");
        for (std::size_t j = 0; j < i; ++j)
            if (d.values[j] == d.values[i]) throw BadDistribution("duplicate quotient value");
        total += d.probs[i];
    }
    if (std::abs(total - 1.0) > 1e-9) throw BadDistribution("probabilities sum to " + std::to_string(total));
}

/// Uniform double in [0,1) built from the top 53 bits, identical on every platform.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

enum class PhiSampling {
    extremal,  ///< k_{n+1} = max(1, ceil(phi(n)))
    uniform,   ///< k_{n+1} uniform on {1, ..., max(1, ceil(phi(n)))}
};

/// k_1..k_count for a phi-type gauge; k_{n+1} never exceeds max(1, ceil(phi(n))).
inline std::vector<std::int64_t> gen_partial_quotients(const PhiType& phi, std::size_t count,
                                                       std::uint64_t seed,
                                                       PhiSampling mode = PhiSampling::uniform) {
    std::mt19937_64 rng(seed);
    std::vector<std::int64_t> ks;
    ks.reserve(count);
    constexpr double cap = 0x1.0p62;
    for (std::size_t n = 0; n < count; ++n) {
        double bound = std::ceil(phi(static_cast<double>(n)));
        if (!(bound >= 1.0)) bound = 1.0;
        if (bound > cap) throw InvalidParams("phi(n) exceeds the int64 quotient range at n = " + std::to_string(n));
        const auto top = static_cast<std::int64_t>(bound);
        if (mode == PhiSampling::extremal || top == 1) {
            ks.push_back(top);
        } else {
            auto k = 1 + static_cast<std::int64_t>(uniform01(rng) * static_cast<double>(top));
            ks.push_back(std::min(k, top));
        }
    }
    return ks;
}

/// count i.i.d. draws from a finite quotient distribution (inverse transform).
inline std::vector<std::int64_t> gen_partial_quotients(const QuotientDistribution& dist, std::size_t count,
                                                       std::uint64_t seed) {
    validate(dist);
    std::vector<double> cdf(dist.probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = (acc += dist.probs[i]);
    std::mt19937_64 rng(seed);
    std::vector<std::int64_t> ks;
    ks.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        const double u = uniform01(rng) * acc;
        std::size_t j = 0;
        while (j + 1 < cdf.size() && u >= cdf[j]) ++j;
        ks.push_back(dist.values[j]);
    }
    return ks;
}

/// Gauss-Kuzmin mass P(k) = log2(1 + 1/(k(k+2))).
inline double gauss_kuzmin_pmf(std::int64_t k) {
    if (k < 1) return 0.0;
    const double kd = static_cast<double>(k);
    return std::log1p(1.0 / (kd * (kd + 2.0))) / std::numbers::ln2;
}

/// P(K <= k) = 1 - log2((k+2)/(k+1)).
inline double gauss_kuzmin_cdf(std::int64_t k) {
    if (k < 1) return 0.0;
    return 1.0 - std::log1p(1.0 / (static_cast<double>(k) + 1.0)) / std::numbers::ln2;
}

/// i.i.d. Gauss-Kuzmin draws by inverse transform sampling.
inline std::vector<std::int64_t> gauss_kuzmin_sample(std::size_t count, std::uint64_t seed) {
    if (count < 1) throw InvalidParams("gauss_kuzmin_sample needs n >= 1");
    std::mt19937_64 rng(seed);
    std::vector<std::int64_t> ks;
    ks.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double u = uniform01(rng);
        // smallest k with cdf(k) > u: (k+2)/(k+1) < 2^(1-u)
        const double s = std::expm1((1.0 - u) * std::numbers::ln2);
        double kf = std::ceil(1.0 / s - 2.0);
        if (!(kf >= 1.0)) kf = 1.0;
        if (kf > 0x1.0p60) kf = 0x1.0p60;
        auto k = static_cast<std::int64_t>(kf);
        while (k > 1 && gauss_kuzmin_cdf(k - 1) > u) --k;
        while (gauss_kuzmin_cdf(k) <= u && k < (std::int64_t{1} << 60)) ++k;
        ks.push_back(k);
    }
    return ks;
}

struct KnSeriesResult {
    std::vector<double> partial_sums;  ///< S_1 .. S_N of sum k_n K_n
    bool converged = false;
    double tail_estimate = 0.0;        ///< contribution of the last quarter of terms
};

/// Partial sums of sum_n k_n K_n. Converged when the last quarter of terms
/// contributes at most tail_tol.
inline KnSeriesResult check_kn_series(std::span<const std::int64_t> ks, std::span<const double> Ks,
                                      double tail_tol = 0.05) {
    const std::size_t n = std::min(ks.size(), Ks.size());
    KnSeriesResult r;
    r.partial_sums.reserve(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (Ks[i] < 0.0) throw InvalidParams("K_n must be nonnegative");
        s += static_cast<double>(ks[i]) * Ks[i];
        r.partial_sums.push_back(s);
    }
    if (n == 0) {
        r.converged = true;
        return r;
    }
    const std::size_t start = n - n / 4;
    const double before = start == 0 ? 0.0 : r.partial_sums[start - 1];
    r.tail_estimate = r.partial_sums.back() - before;
    r.converged = r.tail_estimate <= tail_tol;
    return r;
}

struct KnMonteCarlo {
    std::size_t sequences = 0, length = 0;
    std::size_t converged = 0;
    double converged_fraction = 0.0;
    std::vector<std::size_t> checkpoints;  ///< dyadic n = 2^j <= length, then length
    std::vector<double> median_partial;    ///< median of S_n over the sequences at each checkpoint
    bool medians_increase = false;         ///< strictly, over the last three checkpoints
};

/// Draws `sequences` Gauss-Kuzmin quotient sequences of `length` terms, sequence i
/// from seed + i, and runs check_kn_series on each against K_1..K_length.
inline KnMonteCarlo kn_monte_carlo(std::span<const double> Ks, std::size_t sequences, std::uint64_t seed,
                                   double tail_tol = 0.05) {
    if (Ks.empty() || sequences == 0) throw InvalidParams("kn_monte_carlo needs terms and sequences");
    KnMonteCarlo r;
    r.sequences = sequences;
    r.length = Ks.size();
    for (std::size_t c = 1; c < r.length; c *= 2) r.checkpoints.push_back(c);
    r.checkpoints.push_back(r.length);
    std::vector<std::vector<double>> at(r.checkpoints.size());
    for (std::size_t i = 0; i < sequences; ++i) {
        const auto ks = gauss_kuzmin_sample(r.length, seed + i);
        const auto res = check_kn_series(ks, Ks, tail_tol);
        if (res.converged) ++r.converged;
        for (std::size_t c = 0; c < r.checkpoints.size(); ++c) at[c].push_back(res.partial_sums[r.checkpoints[c] - 1]);
    }
    r.converged_fraction = static_cast<double>(r.converged) / static_cast<double>(sequences);
    for (auto& v : at) {
        auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
        std::nth_element(v.begin(), mid, v.end());
        double med = *mid;
        if (v.size() % 2 == 0) med = 0.5 * (med + *std::max_element(v.begin(), mid));
        r.median_partial.push_back(med);
    }
    const std::size_t m = r.median_partial.size();
    r.medians_increase = m >= 3 && r.median_partial[m - 3] < r.median_partial[m - 2] &&
                         r.median_partial[m - 2] < r.median_partial[m - 1];
    return r;
}

} // namespace circleconj
