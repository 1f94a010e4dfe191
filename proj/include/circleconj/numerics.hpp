#pragma once

// Quadrature, tail summation and small fitting helpers shared by the modules.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "circleconj/error.hpp"

namespace circleconj {

enum class Verdict { finite, divergent, inconclusive };

inline constexpr std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::finite: return "finite";
    case Verdict::divergent: return "divergent";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

namespace num {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussRule make_gauss_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

inline const GaussRule& gauss16() {
    static const GaussRule rule = make_gauss_rule(16);
    return rule;
}

/// Composite 16-point Gauss-Legendre on [a, b] with `panels` equal panels.
template <class F>
double integrate(F&& f, double a, double b, int panels = 1) {
    const auto& rule = gauss16();
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        double s = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            s += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
        total += 0.5 * h * s;
    }
    return total;
}

namespace detail {
template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth, bool& ok) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    if (depth <= 0) {
        ok = false;
        return left + right + diff / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, ok) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, ok);
}
} // namespace detail

/// Adaptive Simpson quadrature. Throws QuadratureFailure if the recursion
/// budget is spent before every panel meets its share of `tol`.
template <class F>
double adaptive_simpson(F f, double a, double b, double tol, int max_depth = 40,
                        int initial_panels = 16) {
    bool ok = true;
    double total = 0.0;
    const double h = (b - a) / initial_panels;
    for (int p = 0; p < initial_panels; ++p) {
        const double lo = a + p * h, hi = lo + h, m = 0.5 * (lo + hi);
        const double flo = f(lo), fm = f(m), fhi = f(hi);
        const double whole = h / 6.0 * (flo + 4.0 * fm + fhi);
        total += detail::simpson_step(f, lo, hi, flo, fm, fhi, whole, tol / initial_panels,
                                      max_depth, ok);
    }
    if (!ok) throw QuadratureFailure("adaptive Simpson did not reach the requested tolerance");
    return total;
}

/// Result of summing a nonnegative series of level contributions.
struct TailSum {
    Verdict verdict = Verdict::inconclusive;
    double value = 0.0;   ///< partial + tail estimate (finite verdicts only)
    double partial = 0.0;
    double tail = std::numeric_limits<double>::infinity();
    int levels = 0;
};

/// Stopping policy for level sums. Divergence: partial exceeds `blowup` times the
/// first level, or levels fail to decay for `stall_levels` consecutive levels.
struct LevelPolicy {
    double growth = 1.25;      ///< geometric ratio between consecutive level endpoints
    int panels = 1;            ///< Gauss panels per level (quadrature density)
    int max_levels = 3000;
    double rel_tol = 1e-12;
    double blowup = 1e6;
    int stall_levels = 200;
    double accept_tail = 0.05; ///< relative tail accepted as finite at budget end
};

/// Feeds level contributions T_1, T_2, ... and classifies the series they form.
/// Tail estimates use both a geometric model (ratio of the last two levels)
/// and a power model in the level index; the larger one is kept.
class LevelAccumulator {
public:
    explicit LevelAccumulator(LevelPolicy policy = {}) : policy_(policy) {}

    /// Returns true once a verdict is reached.
    bool push(double term) {
        if (done_) return true;
        ++count_;
        if (!std::isfinite(term)) return finish(Verdict::divergent);
        terms_.push_back(term);
        partial_ += term;
        if (first_ == 0.0 && term > 0.0) first_ = term;
        if (first_ > 0.0 && partial_ > policy_.blowup * first_) return finish(Verdict::divergent);
        if (terms_.size() >= 2) {
            const double prev = terms_[terms_.size() - 2];
            if (term > 0.0 && term >= prev * (1.0 - 1e-12))
                ++stall_;
            else
                stall_ = 0;
            if (stall_ >= policy_.stall_levels) return finish(Verdict::divergent);
        }
        if (term == 0.0) {
            if (++zeros_ >= 4) {
                tail_ = 0.0;
                return finish(Verdict::finite);
            }
        } else {
            zeros_ = 0;
        }
        tail_ = estimate_tail();
        if (terms_.size() >= 8 && tail_ <= policy_.rel_tol * partial_ + 1e-300)
            return finish(Verdict::finite);
        return false;
    }

    /// Call when the level budget is exhausted without a verdict.
    void close() {
        if (done_) return;
        if (partial_ == 0.0) {
            tail_ = 0.0;
            finish(Verdict::finite);
        } else if (std::isfinite(tail_) && tail_ <= policy_.accept_tail * partial_) {
            finish(Verdict::finite);
        } else {
            finish(Verdict::inconclusive);
        }
    }

    bool done() const { return done_; }

    TailSum result() const {
        TailSum r;
        r.verdict = verdict_;
        r.partial = partial_;
        r.tail = tail_;
        r.levels = count_;
        r.value = verdict_ == Verdict::finite ? partial_ + tail_
                                              : std::numeric_limits<double>::infinity();
        return r;
    }

private:
    double estimate_tail() const {
        const std::size_t n = terms_.size();
        if (n < 8) return std::numeric_limits<double>::infinity();
        const double t = terms_[n - 1], t1 = terms_[n - 2];
        if (t == 0.0) return 0.0;
        double geo = std::numeric_limits<double>::infinity();
        if (t1 > 0.0 && t < t1) {
            const double r = t / t1;
            geo = t * r / (1.0 - r);
        }
        double pw = std::numeric_limits<double>::infinity();
        const std::size_t m = std::min<std::size_t>(8, n - 1);
        const double tm = terms_[n - 1 - m];
        if (tm > 0.0 && t < tm) {
            const double j = static_cast<double>(n), jm = static_cast<double>(n - m);
            const double p = -std::log(t / tm) / std::log(j / jm);
            if (p > 1.0) pw = t * j / (p - 1.0);
        }
        return std::max(geo, pw);
    }

    bool finish(Verdict v) {
        done_ = true;
        verdict_ = v;
        return true;
    }

    LevelPolicy policy_;
    std::vector<double> terms_;
    double partial_ = 0.0;
    double first_ = 0.0;
    double tail_ = std::numeric_limits<double>::infinity();
    int stall_ = 0;
    int zeros_ = 0;
    int count_ = 0;
    bool done_ = false;
    Verdict verdict_ = Verdict::inconclusive;
};

/// Integral of a nonnegative g over [u0, inf). The first level is [u0, u0 + 1];
/// later levels grow geometrically, so power-law integrands give geometric level sums.
template <class G>
TailSum integrate_to_infinity(G&& g, double u0, const LevelPolicy& policy = {}) {
    LevelAccumulator acc(policy);
    double lo = u0, hi = u0 + 1.0;
    for (int level = 0; level < policy.max_levels; ++level) {
        if (acc.push(integrate(g, lo, hi, policy.panels))) return acc.result();
        lo = hi;
        hi = std::max(lo + 1.0, lo * policy.growth);
        if (hi > 1e300) break;
    }
    acc.close();
    return acc.result();
}

/// Sum of a nonnegative term(n) for integer n >= n0. Terms are grouped in
/// geometrically growing blocks; blocks longer than 4096 terms are summed by
/// the midpoint-rule identity sum_{n=a}^{b-1} f(n) ~ int_{a-1/2}^{b-1/2} f.
template <class F>
TailSum sum_to_infinity(F&& term, double n0, const LevelPolicy& policy = {}) {
    LevelAccumulator acc(policy);
    double a = n0;
    double b = n0 + 8.0;
    for (int level = 0; level < policy.max_levels; ++level) {
        const double len = b - a;
        double s = 0.0;
        if (len <= 4096.0) {
            for (double n = a; n < b; n += 1.0) s += term(n);
        } else {
            s = integrate(term, a - 0.5, b - 0.5, 4 * policy.panels);
        }
        if (acc.push(s)) return acc.result();
        a = b;
        b = std::floor(std::max(a + 1.0, a * policy.growth));
        if (b > 1e300) break;
    }
    acc.close();
    return acc.result();
}

/// Least-squares line y = slope * x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = std::min(xs.size(), ys.size());
    LineFit fit;
    if (n < 2) return fit;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    fit.slope = sxx > 0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = (sxx > 0 && syy > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

/// Classification of a finite prefix of a nonnegative series by the trend of
/// its terms over the last quarter: geometric ratio first, then the log-log
/// decay exponent p (finite when p > 1.1, divergent when p < 0.95).
struct SeriesTrend {
    Verdict verdict = Verdict::inconclusive;
    double partial = 0.0;
    double mean_ratio = 0.0;  ///< geometric mean of t_{n+1}/t_n over the window
    double decay_exponent = 0.0;
};

inline SeriesTrend classify_series(std::span<const double> terms) {
    SeriesTrend out;
    for (double t : terms) {
        if (!std::isfinite(t)) {
            out.verdict = Verdict::divergent;
            out.partial = std::numeric_limits<double>::infinity();
            return out;
        }
        out.partial += t;
    }
    const std::size_t n = terms.size();
    if (std::all_of(terms.begin(), terms.end(), [](double t) { return t == 0.0; })) {
        out.verdict = Verdict::finite;
        return out;
    }
    if (n < 8) return out;
    const std::size_t start = n - std::max<std::size_t>(n / 4, 4);
    // Trailing zeros after positive terms: the series has terminated.
    if (terms[n - 1] == 0.0) {
        out.verdict = Verdict::finite;
        return out;
    }
    double log_ratio = 0.0;
    int cnt = 0;
    std::vector<double> lx, ly;
    for (std::size_t i = start; i < n; ++i) {
        if (terms[i] <= 0.0) continue;
        lx.push_back(std::log(static_cast<double>(i + 1)));
        ly.push_back(std::log(terms[i]));
        if (i > start && terms[i - 1] > 0.0) {
            log_ratio += std::log(terms[i] / terms[i - 1]);
            ++cnt;
        }
    }
    if (cnt == 0) return out;
    out.mean_ratio = std::exp(log_ratio / cnt);
    out.decay_exponent = -fit_line(lx, ly).slope;
    if (out.mean_ratio < 0.98)
        out.verdict = Verdict::finite;
    else if (out.mean_ratio > 1.0 + 1e-9)
        out.verdict = Verdict::divergent;
    else if (out.decay_exponent > 1.1)
        out.verdict = Verdict::finite;
    else if (out.decay_exponent < 0.95)
        out.verdict = Verdict::divergent;
    return out;
}

/// classify_series with a tiebreak for boundary trends: when neither the term
/// ratio nor the decay exponent decides, the ratio of the last two dyadic block
/// sums does (about 1 for harmonic-like terms, divergent; <= 0.9, finite).
struct BlockTrend {
    SeriesTrend trend;
    double block_ratio = 0.0;
};

inline BlockTrend classify_series_blocks(std::span<const double> terms) {
    BlockTrend r;
    r.trend = classify_series(terms);
    const std::size_t n = terms.size();
    std::vector<double> blocks;
    for (std::size_t lo = 1; 2 * lo <= n; lo *= 2) {
        double b = 0.0;
        for (std::size_t i = lo; i < 2 * lo; ++i) b += terms[i - 1];
        blocks.push_back(b);
    }
    if (blocks.size() >= 2 && blocks[blocks.size() - 2] > 0.0) r.block_ratio = blocks.back() / blocks[blocks.size() - 2];
    if (r.trend.verdict == Verdict::inconclusive && blocks.size() >= 5) {
        if (r.block_ratio >= 0.97)
            r.trend.verdict = Verdict::divergent;
        else if (r.block_ratio <= 0.9)
            r.trend.verdict = Verdict::finite;
    }
    return r;
}

} // namespace num
} // namespace circleconj
