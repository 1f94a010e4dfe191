#pragma once

// Degree-one circle maps, orbits, rotation numbers by closest returns, parameter tuning.

#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "circleconj/error.hpp"
#include "circleconj/numberth.hpp"
#include "circleconj/numerics.hpp"

namespace circleconj {

enum class MapFamily { rigid, sine, custom };

inline std::string to_string(MapFamily f) {
    switch (f) {
    case MapFamily::rigid: return "rigid";
    case MapFamily::sine: return "sine";
    case MapFamily::custom: return "custom";
    }
    return "?";
}

/// A point of the lifted orbit kept as integer winding plus fractional part,
/// so the fractional part never loses digits to a growing integer part.
template <class Real>
struct Lifted {
    std::int64_t winding = 0;
    Real frac{};
    Real value() const { return Real(winding) + frac; }
};

/// Lift L of an orientation-preserving circle diffeomorphism with L(x+1) = L(x)+1.
template <class Real = double>
class CircleMap {
public:
    using Fn = std::function<Real(Real)>;

    /// Rotation x -> x + rho.
    static CircleMap rigid(Real rho) {
        CircleMap m(MapFamily::rigid, {static_cast<double>(rho)});
        m.omega_ = rho;
        m.check();
        return m;
    }

    /// x -> x + Omega - K/(2 pi) sin(2 pi x), a diffeomorphism for 0 <= K < 1.
    static CircleMap sine(Real omega, Real k) {
        if (!(k >= Real(0))) throw InvalidParams("sine family needs K >= 0");
        CircleMap m(MapFamily::sine, {static_cast<double>(omega), static_cast<double>(k)});
        m.omega_ = omega;
        m.k_ = k;
        m.check();
        return m;
    }

    static CircleMap custom(Fn lift, Fn d1, Fn d2, std::string smoothness = "lipschitz") {
        CircleMap m(MapFamily::custom, {});
        m.lift_ = std::move(lift);
        m.d1_ = std::move(d1);
        m.d2_ = std::move(d2);
        m.smoothness_ = std::move(smoothness);
        m.check();
        return m;
    }

    Real lift(Real x) const {
        using std::sin;
        switch (family_) {
        case MapFamily::rigid: return x + omega_;
        case MapFamily::sine: return x + omega_ - k_ / two_pi() * sin(two_pi() * x);
        default: return lift_(x);
        }
    }

    Real d1(Real x) const {
        using std::cos;
        switch (family_) {
        case MapFamily::rigid: return Real(1);
        case MapFamily::sine: return Real(1) - k_ * cos(two_pi() * x);
        default: return d1_(x);
        }
    }

    Real d2(Real x) const {
        using std::sin;
        switch (family_) {
        case MapFamily::rigid: return Real(0);
        case MapFamily::sine: return two_pi() * k_ * sin(two_pi() * x);
        default: return d2_(x);
        }
    }

    /// One step on the winding-separated representation.
    Lifted<Real> step(const Lifted<Real>& p) const {
        using std::floor;
        const Real z = lift(p.frac);
        const Real w = floor(z);
        return {p.winding + static_cast<std::int64_t>(w), z - w};
    }

    MapFamily family() const { return family_; }
    const std::vector<double>& params() const { return params_; }
    /// Modulus class of T'' (the sine family is analytic, so T'' is Lipschitz).
    const std::string& smoothness() const { return smoothness_; }

    static Real two_pi() { return boost::math::constants::two_pi<Real>(); }

private:
    CircleMap(MapFamily f, std::vector<double> params) : family_(f), params_(std::move(params)) {}

    void check() const {
        const int grid = 4096;
        for (int i = 0; i < grid; ++i) {
            const Real x = Real(i) / Real(grid);
            const Real d = d1(x);
            if (!(d > Real(0))) throw NotADiffeo("T'(" + std::to_string(static_cast<double>(x)) + ") = " +
                                                 std::to_string(static_cast<double>(d)));
            const Real jump = lift(x + Real(1)) - lift(x) - Real(1);
            if (std::abs(static_cast<double>(jump)) > 1e-12) throw InvalidParams("lift is not degree one");
        }
    }

    MapFamily family_;
    std::vector<double> params_;
    Real omega_{};
    Real k_{};
    Fn lift_, d1_, d2_;
    std::string smoothness_ = "lipschitz";
};

using Map = CircleMap<double>;

/// Fractional part in [0, 1).
template <class Real>
Real frac(Real x) {
    using std::floor;
    Real f = x - floor(x);
    if (f >= Real(1)) f -= Real(1);
    return f;
}

template <class Real>
Lifted<Real> lifted_orbit_point(const CircleMap<Real>& map, Real x, std::int64_t n) {
    if (n < 0) throw InvalidParams("iteration count must be >= 0");
    using std::floor;
    const Real w0 = floor(x);
    Lifted<Real> p{static_cast<std::int64_t>(w0), x - w0};
    for (std::int64_t i = 0; i < n; ++i) p = map.step(p);
    return p;
}

/// L^n(x).
template <class Real>
Real lift_iterate(const CircleMap<Real>& map, Real x, std::int64_t n) {
    return lifted_orbit_point(map, x, n).value();
}

/// T^n(x) in [0, 1).
template <class Real>
Real iterate(const CircleMap<Real>& map, Real x, std::int64_t n) {
    return lifted_orbit_point(map, x, n).frac;
}

/// Orbit xi_i = T^i(xi_0), i = 0..M-1, with its circular order.
template <class Real = double>
struct OrbitData {
    Real x0{};
    std::vector<Real> points;                  ///< fractional parts
    std::vector<std::int64_t> windings;        ///< integer parts of L^i(x0)
    std::vector<std::size_t> order;            ///< indices sorted by position on [0,1)
};

template <class Real>
OrbitData<Real> make_orbit(const CircleMap<Real>& map, Real x0, std::size_t count) {
    OrbitData<Real> o;
    o.x0 = frac(x0);
    Lifted<Real> p{0, o.x0};
    o.points.reserve(count);
    o.windings.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        o.points.push_back(p.frac);
        o.windings.push_back(p.winding);
        p = map.step(p);
    }
    o.order.resize(count);
    std::iota(o.order.begin(), o.order.end(), std::size_t{0});
    std::sort(o.order.begin(), o.order.end(), [&](std::size_t a, std::size_t b) { return o.points[a] < o.points[b]; });
    return o;
}

/// Closest-return combinatorics of an orbit.
struct ClosestReturns {
    enum class Status { ok, periodic, exhausted, inconsistent };
    Status status = Status::ok;
    std::vector<std::int64_t> ks;       ///< k_1..k_d recovered
    std::vector<std::int64_t> qs;       ///< q_{-1}..q_d
    std::vector<std::int64_t> ps;       ///< p_{-1}..p_d (windings at the return times)
    std::vector<double> gaps;           ///< |signed distance| at q_0..q_d
    std::int64_t period = 0;            ///< for periodic orbits
    std::int64_t winding = 0;
    std::int64_t iterations = 0;
};

/// Dynamical convergents of x0. With e(i, p) = L^i(x0) - x0 - p, the sign of
/// e(q, p) equals the sign of q rho - p for every starting point, so the
/// quotients follow from signs alone: k_{n+1} is the number of steps j for
/// which x_{q_{n-1} + j q_n} stays on the side of x_{q_{n-1}}. Stops after
/// `depth` quotients or `budget` iterations, without throwing.
template <class Real>
ClosestReturns closest_returns(const CircleMap<Real>& map, Real x0, std::size_t depth, std::int64_t budget,
                               double exact_tol = -1.0) {
    using std::abs;
    using std::floor;
    if (exact_tol < 0.0) exact_tol = 4096.0 * static_cast<double>(std::numeric_limits<Real>::epsilon());
    ClosestReturns r;
    const Real base = frac(x0);
    auto offset = [&](const Lifted<Real>& pt, std::int64_t p) { return Real(pt.winding - p) + (pt.frac - base); };

    // level -1: x0 itself with p_{-1} = 1; level 0: one step with p_0 = floor(L(x0) - x0)
    Lifted<Real> prev{0, base};
    Lifted<Real> cur = map.step(prev);
    r.iterations = 1;
    const Real d0 = Real(cur.winding) + (cur.frac - base);
    std::int64_t p_prev = 1, q_prev = 0;
    std::int64_t p_cur = static_cast<std::int64_t>(floor(d0)), q_cur = 1;
    r.qs = {q_prev, q_cur};
    r.ps = {p_prev, p_cur};
    Real e_cur = offset(cur, p_cur);
    r.gaps.push_back(static_cast<double>(abs(e_cur)));
    if (static_cast<double>(abs(e_cur)) <= exact_tol) {
        r.status = ClosestReturns::Status::periodic;
        r.period = 1;
        r.winding = p_cur;
        return r;
    }
    bool prev_negative = true;  // e(0, 1) = -1
    while (r.ks.size() < depth) {
        // march x_{q_{n-1}} forward by q_n steps at a time
        Lifted<Real> pt = prev, last = prev;
        std::int64_t j = 0;
        for (;;) {
            if (q_prev + (j + 1) * q_cur > budget) {
                r.status = ClosestReturns::Status::exhausted;
                return r;
            }
            last = pt;
            for (std::int64_t s = 0; s < q_cur; ++s) pt = map.step(pt);
            ++j;
            const std::int64_t i = q_prev + j * q_cur, p = p_prev + j * p_cur;
            r.iterations = std::max(r.iterations, i);
            const Real e = offset(pt, p);
            if (static_cast<double>(abs(e)) <= exact_tol) {
                r.status = ClosestReturns::Status::periodic;
                r.ks.push_back(j);
                r.period = i;
                r.winding = p;
                return r;
            }
            if ((e < Real(0)) != prev_negative) break;
        }
        const std::int64_t k = j - 1;
        if (k < 1) {
            r.status = ClosestReturns::Status::inconsistent;
            return r;
        }
        const std::int64_t q_next = q_prev + k * q_cur, p_next = p_prev + k * p_cur;
        r.ks.push_back(k);
        r.qs.push_back(q_next);
        r.ps.push_back(p_next);
        r.gaps.push_back(static_cast<double>(abs(offset(last, p_next))));
        prev = cur;
        cur = last;
        q_prev = q_cur;
        p_prev = p_cur;
        q_cur = q_next;
        p_cur = p_next;
        prev_negative = !prev_negative;
    }
    return r;
}

struct RotationResult {
    double rho_est = 0.0;
    std::vector<std::int64_t> ks;
    std::vector<std::int64_t> q_returns;  ///< q_0..q_N
    std::vector<std::int64_t> p_returns;  ///< p_0..p_N
    std::optional<double> birkhoff;        ///< set when the cross-check is requested
};

struct RotationOptions {
    std::int64_t budget = 50'000'000;
    bool birkhoff_check = false;
};

/// Birkhoff estimate (L^n(x0) - x0)/n.
template <class Real>
double birkhoff_rotation(const CircleMap<Real>& map, Real x0, std::int64_t n) {
    using std::floor;
    const auto p = lifted_orbit_point(map, x0, n);
    const Real start = x0 - floor(x0);
    return static_cast<double>((Real(p.winding - static_cast<std::int64_t>(floor(x0))) + (p.frac - start)) / Real(n));
}

/// Rotation number to `depth` partial quotients by closest returns.
template <class Real>
RotationResult rotation_number(const CircleMap<Real>& map, Real x0, std::size_t depth, const RotationOptions& opt = {}) {
    if (depth < 1) throw InvalidParams("rotation_number needs depth >= 1");
    const auto cr = closest_returns(map, x0, depth, opt.budget);
    if (cr.status == ClosestReturns::Status::periodic) throw PeriodicOrbitDetected(cr.period, cr.winding);
    if (cr.status != ClosestReturns::Status::ok)
        throw DepthExhausted("found " + std::to_string(cr.ks.size()) + " of " + std::to_string(depth) +
                             " quotients after " + std::to_string(cr.iterations) + " iterations" +
                             (cr.status == ClosestReturns::Status::inconsistent ? " (return pattern not rotation-like)" : ""));
    RotationResult r;
    r.ks = cr.ks;
    r.q_returns.assign(cr.qs.begin() + 1, cr.qs.end());
    r.p_returns.assign(cr.ps.begin() + 1, cr.ps.end());
    const auto c = convergents(r.ks);
    r.rho_est = static_cast<double>(c.ps.back()) / static_cast<double>(c.qs.back());
    if (opt.birkhoff_check) r.birkhoff = birkhoff_rotation(map, x0, std::max<std::int64_t>(r.q_returns.back(), 1000));
    return r;
}

namespace detail {
/// Sign of value(a) - value(b) for continued fractions given by quotient
/// prefixes; a sequence that stops early (terminated) counts as k = infinity at
/// the next index. Returns 0 when both agree through `depth` quotients.
inline int compare_cf(const std::vector<std::int64_t>& a, bool a_terminated, const std::vector<std::int64_t>& b,
                      std::size_t depth) {
    for (std::size_t i = 0; i < depth; ++i) {
        const bool a_inf = i >= a.size();
        if (a_inf && !a_terminated) return 0;  // no information
        const bool b_inf = i >= b.size();
        if (a_inf && b_inf) return 0;
        if (!a_inf && !b_inf && a[i] == b[i]) continue;
        // larger quotient at 1-based odd index -> smaller value
        const bool a_larger = a_inf || (!b_inf && a[i] > b[i]);
        const bool odd = (i % 2) == 0;
        return (a_larger == odd) ? -1 : 1;
    }
    return 0;
}
} // namespace detail

struct TuneResult {
    double omega = 0.0;
    std::size_t depth = 0;         ///< quotients matched
    int bisection_steps = 0;
    double rho_est = 0.0;
};

/// Omega for sine(Omega, K) whose rotation number shares the first D quotients
/// of the target, with D the smallest depth >= n_required (default 1) such that
/// 1/(q_D q_{D+1}) < tol. Bisects on [rho* - K, rho* + K] using the
/// continued-fraction order, which is immune to mode-locking plateaus.
inline TuneResult tune_parameter(double k, const ContinuedFraction& target, double tol, std::size_t n_required = 0,
                                 int max_steps = 200) {
    if (!(k >= 0.0 && k < 1.0)) throw InvalidParams("tune_parameter needs 0 <= K < 1");
    if (target.depth() < n_required) throw InvalidParams("target has fewer quotients than required");
    if (n_required == 0) n_required = 1;
    TuneResult res;
    if (k == 0.0) {
        res.omega = target.rho;
        res.depth = n_required;
        res.rho_est = target.rho;
        return res;
    }
    // extend the target until the cylinder is narrower than tol
    ContinuedFraction cf = target;
    std::size_t D = n_required;
    auto width_ok = [&](std::size_t d) {
        return d + 1 <= cf.depth() &&
               1.0 / (static_cast<double>(cf.q(static_cast<int>(d))) * static_cast<double>(cf.q(static_cast<int>(d) + 1))) < tol;
    };
    while (D + 1 < cf.depth() && !width_ok(D)) ++D;
    if (!width_ok(D)) {
        cf = cf_expand_trusted(target.rho, 90);
        for (std::size_t i = 0; i < std::min(cf.depth(), target.depth()); ++i)
            if (cf.ks[i] != target.ks[i]) throw InvalidParams("target quotients disagree with its rho");
        while (D < cf.depth() && !width_ok(D)) ++D;
        if (!width_ok(D)) throw NoConvergence("tol below what the target expansion resolves");
    }
    const std::vector<std::int64_t> want(cf.ks.begin(), cf.ks.begin() + static_cast<std::ptrdiff_t>(D));
    const std::int64_t budget = 4 * cf.q(static_cast<int>(D) + 1) + 64;
    double lo = target.rho - k, hi = target.rho + k;
    for (int step = 0; step < max_steps; ++step) {
        const double mid = 0.5 * (lo + hi);
        res.bisection_steps = step + 1;
        const auto map = Map::sine(mid, k);
        const auto cr = closest_returns(map, 0.0, D, budget);
        int cmp;
        if (cr.status == ClosestReturns::Status::ok) {
            cmp = detail::compare_cf(cr.ks, false, want, D);
            if (cmp == 0) {
                res.omega = mid;
                res.depth = D;
                const auto c = convergents(cr.ks);
                res.rho_est = static_cast<double>(c.ps.back()) / static_cast<double>(c.qs.back());
                return res;
            }
        } else {
            cmp = detail::compare_cf(cr.ks, true, want, D);
            if (cmp == 0) cmp = 1;  // cannot happen for a strict prefix; keep the bracket moving
        }
        (cmp < 0 ? lo : hi) = mid;
        if (hi - lo < 4.0 * std::numeric_limits<double>::epsilon()) break;
    }
    throw NoConvergence("bisection budget spent without matching " + std::to_string(D) + " quotients");
}

struct DenjoyConstant {
    double C = 0.0;       ///< int_0^1 |T''/T'|
    double lambda = 0.0;  ///< 1 / sqrt(1 + e^{-C})
};

/// Explicit contraction constant from the total variation of log T'.
template <class Real>
DenjoyConstant denjoy_lambda(const CircleMap<Real>& map, double tol = 1e-10) {
    DenjoyConstant d;
    d.C = num::adaptive_simpson(
        [&](double x) {
            return std::abs(static_cast<double>(map.d2(Real(x)) / map.d1(Real(x))));
        },
        0.0, 1.0, tol);
    d.lambda = 1.0 / std::sqrt(1.0 + std::exp(-d.C));
    return d;
}

} // namespace circleconj
