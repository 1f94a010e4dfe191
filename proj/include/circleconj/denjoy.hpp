#pragma once

// Dynamical partitions, the sizes l_n, the sequence tau_n and the checks that
// accompany the Denjoy-type inequality (T^{q_n})' = 1 + O(tau_n).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "circleconj/crossratio.hpp"
#include "circleconj/error.hpp"
#include "circleconj/maps.hpp"
#include "circleconj/mocs.hpp"
#include "circleconj/numberth.hpp"
#include "circleconj/numerics.hpp"

namespace circleconj {

/// Convergent data of a map's rotation number, q_{-1}.. and p_{-1}.. as in
/// ContinuedFraction (index n at position n + 1).
struct Combinatorics {
    std::vector<std::int64_t> ks;
    std::vector<std::int64_t> ps, qs;

    std::int64_t p(int n) const { return ps.at(static_cast<std::size_t>(n + 1)); }
    std::int64_t q(int n) const { return qs.at(static_cast<std::size_t>(n + 1)); }
    int depth() const { return static_cast<int>(ks.size()); }
};

/// Quotients k_1..k_depth read off the orbit of x0; DepthUnavailable when the
/// orbit does not resolve that many.
inline Combinatorics map_combinatorics(const Map& map, double x0, int depth) {
    Combinatorics c;
    try {
        RotationOptions opt;
        c.ks = rotation_number(map, x0, static_cast<std::size_t>(std::max(depth, 1)), opt).ks;
    } catch (const PeriodicOrbitDetected& e) {
        throw DepthUnavailable(std::string("periodic orbit: ") + e.what());
    } catch (const DepthExhausted& e) {
        throw DepthUnavailable(e.what());
    }
    const auto cv = convergents(c.ks);
    c.ps = cv.ps;
    c.qs = cv.qs;
    return c;
}

/// Rotation number as a continued fraction accurate well past level N: the
/// rigid parameter, else the orbit's first N + 10 quotients (or as many as
/// resolve).
inline ContinuedFraction reference_rotation(const Map& map, int N) {
    if (map.family() == MapFamily::rigid) return cf_expand_trusted(map.params()[0], N + 8);
    Combinatorics deep;
    try {
        deep = map_combinatorics(map, 0.0, N + 10);
    } catch (const DepthUnavailable&) {
        deep = map_combinatorics(map, 0.0, N + 2);
    }
    return from_quotients(deep.ks);
}

struct Segment {
    int level = 0;
    std::int64_t index = 0;  ///< i in Delta_i
    std::int64_t left = 0;   ///< orbit index of the left endpoint
    std::int64_t right = 0;
    double start = 0.0;      ///< left endpoint in [0, 1)
    double length = 0.0;
};

struct DynamicalPartition {
    int n = 0;
    double x0 = 0.0;
    std::int64_t q_n = 0, q_next = 0, p_n = 0, p_next = 0;
    std::vector<Segment> segments;        ///< level n (i < q_{n+1}) then level n+1 (i < q_n)
    std::vector<double> offsets;          ///< xi_{q_m} - p_m - xi_0 for m = -1..n+1
    bool disjoint = false;                ///< exact tiling by adjacent orbit points
    bool ordering = false;                ///< convergents alternate and approach xi_0
    double total_length = 0.0;
};

namespace detail {

/// Signed lifted distance L^j(x0) - p - L^i(x0) from winding-separated points.
inline double lifted_gap(const OrbitData<double>& o, std::int64_t i, std::int64_t j, std::int64_t p) {
    const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(j);
    return static_cast<double>(o.windings[b] - o.windings[a] - p) + (o.points[b] - o.points[a]);
}

} // namespace detail

/// Two-level partition {Delta_i^(n)}_{i<q_{n+1}} u {Delta_i^(n+1)}_{i<q_n} of
/// the circle by the first q_n + q_{n+1} orbit points.
inline DynamicalPartition build_partition(const Map& map, double x0, int n) {
    if (n < 0) throw InvalidParams("partition level must be >= 0");
    const auto c = map_combinatorics(map, x0, n + 1);
    DynamicalPartition P;
    P.n = n;
    P.x0 = frac(x0);
    P.q_n = c.q(n);
    P.q_next = c.q(n + 1);
    P.p_n = c.p(n);
    P.p_next = c.p(n + 1);
    const std::int64_t M = P.q_n + P.q_next;
    const auto o = make_orbit(map, P.x0, static_cast<std::size_t>(M));

    auto add = [&](int level, std::int64_t count, std::int64_t q, std::int64_t p) {
        for (std::int64_t i = 0; i < count; ++i) {
            Segment s;
            s.level = level;
            s.index = i;
            const double d = detail::lifted_gap(o, i, i + q, p);
            const bool even = level % 2 == 0;
            s.left = even ? i : i + q;
            s.right = even ? i + q : i;
            s.start = o.points[static_cast<std::size_t>(s.left)];
            s.length = std::abs(d);
            P.total_length += s.length;
            P.segments.push_back(s);
        }
    };
    add(n, P.q_next, P.q_n, P.p_n);
    add(n + 1, P.q_n, P.q_next, P.p_next);

    // each segment must join two circularly adjacent orbit points
    std::vector<std::int64_t> succ(static_cast<std::size_t>(M), -1);
    for (std::size_t r = 0; r < o.order.size(); ++r)
        succ[o.order[r]] = static_cast<std::int64_t>(o.order[(r + 1) % o.order.size()]);
    std::vector<char> used(static_cast<std::size_t>(M), 0);
    P.disjoint = static_cast<std::int64_t>(P.segments.size()) == M;
    for (const auto& s : P.segments) {
        auto& u = used[static_cast<std::size_t>(s.left)];
        if (u || succ[static_cast<std::size_t>(s.left)] != s.right) P.disjoint = false;
        u = 1;
        double gap = o.points[static_cast<std::size_t>(s.right)] - s.start;
        if (gap < 0.0) gap += 1.0;
        if (M > 1 && std::abs(gap - s.length) > 1e-9) P.disjoint = false;
    }

    // xi_{q_{-1}} < xi_{q_1} < xi_{q_3} < ... < xi_0 < ... < xi_{q_2} < xi_{q_0}
    P.offsets.push_back(-1.0);
    P.ordering = true;
    for (int m = 0; m <= n + 1; ++m) {
        const double d = lift_iterate(map, P.x0, c.q(m)) - static_cast<double>(c.p(m)) - P.x0;
        if (!(m % 2 == 0 ? d > 0.0 : d < 0.0)) P.ordering = false;
        // same-side predecessor is m - 2 (m = 1 compares with xi_{q_{-1}})
        if (m >= 1 && !(std::abs(d) < std::abs(P.offsets[static_cast<std::size_t>(m - 1)]))) P.ordering = false;
        P.offsets.push_back(d);
    }
    return P;
}

namespace detail {

struct LevelValues {
    double disp = 0.0;    ///< L^q(x) - x - p
    double logder = 0.0;  ///< log (T^q)'(x)
};

inline LevelValues level_values(const Map& map, double x, std::int64_t q, std::int64_t p) {
    Lifted<double> pt{0, frac(x)};
    const double start = pt.frac;
    double lsum = 0.0;
    for (std::int64_t i = 0; i < q; ++i) {
        lsum += std::log(map.d1(pt.frac));
        pt = map.step(pt);
    }
    if (!std::isfinite(lsum))
        throw DerivativeUnderflow("log (T^" + std::to_string(q) + ")' is not finite at x = " + std::to_string(x));
    return {static_cast<double>(pt.winding - p) + (pt.frac - start), lsum};
}

/// Golden-section search for the maximum of a unimodal g on [a, b].
template <class G>
std::pair<double, double> golden_max(const G& g, double a, double b, int iters = 48) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a), d = a + r * (b - a);
    double gc = g(c), gd = g(d);
    for (int i = 0; i < iters; ++i) {
        if (gc > gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    return gc > gd ? std::pair{c, gc} : std::pair{d, gd};
}

} // namespace detail

/// sup over the circle of |T^q - id - p|, of log (T^q)' and of -log (T^q)'.
struct LevelProfile {
    double l = 0.0;
    double log_max = 0.0;  ///< max log (T^{q_n})'
    double log_min = 0.0;  ///< min log (T^{q_n})'
    int grid = 0;

    double sup_log_dev() const { return std::max(std::abs(log_max), std::abs(log_min)); }
    double sup_dev() const { return std::max(std::abs(std::expm1(log_max)), std::abs(std::expm1(log_min))); }
};

/// Grid of `grid` points, then golden-section refinement around the best grid
/// maxima of each objective.
inline LevelProfile level_profile(const Map& map, std::int64_t q, std::int64_t p, int grid) {
    LevelProfile out;
    out.grid = grid;
    std::vector<detail::LevelValues> v(static_cast<std::size_t>(grid));
    for (int j = 0; j < grid; ++j) v[static_cast<std::size_t>(j)] = detail::level_values(map, double(j) / grid, q, p);
    const double h = 1.0 / grid;

    auto refine = [&](auto objective) {
        std::vector<std::pair<double, int>> peaks;
        for (int j = 0; j < grid; ++j) {
            const double y = objective(v[static_cast<std::size_t>(j)]);
            const double yl = objective(v[static_cast<std::size_t>((j + grid - 1) % grid)]);
            const double yr = objective(v[static_cast<std::size_t>((j + 1) % grid)]);
            if (y >= yl && y >= yr) peaks.emplace_back(y, j);
        }
        std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        double best = peaks.empty() ? objective(v[0]) : peaks.front().first;
        for (std::size_t k = 0; k < std::min<std::size_t>(peaks.size(), 4); ++k) {
            const double xc = peaks[k].second * h;
            const auto r = detail::golden_max(
                [&](double x) { return objective(detail::level_values(map, x, q, p)); }, xc - h, xc + h);
            best = std::max(best, r.second);
        }
        return best;
    };
    out.l = refine([](const detail::LevelValues& a) { return std::abs(a.disp); });
    out.log_max = refine([](const detail::LevelValues& a) { return a.logder; });
    out.log_min = -refine([](const detail::LevelValues& a) { return -a.logder; });
    return out;
}

/// l_n = ||T^{q_n} - id||_{C^0} on max(grid_size, 8 q_{n+1}) points plus refinement.
inline double l_n(const Map& map, int n, int grid_size = 1024) {
    const auto c = map_combinatorics(map, 0.0, n + 1);
    const auto g = static_cast<int>(std::max<std::int64_t>(grid_size, 8 * c.q(n + 1)));
    return level_profile(map, c.q(n), c.p(n), g).l;
}

/// tau_n = sum_{k=0}^n (l_n / l_{n-k}) varpi(l_{n-k-1}) for n = 0..N, from
/// log l_0..log l_N (l_{-1} = 1), so very deep levels stay finite.
inline std::vector<double> tau_sequence_log(const std::vector<double>& log_l, const ModulusOfContinuity& moc) {
    std::vector<double> tau(log_l.size(), 0.0);
    auto L = [&](int m) { return m < 0 ? 0.0 : log_l[static_cast<std::size_t>(m)]; };
    for (int n = 0; n < static_cast<int>(log_l.size()); ++n) {
        double s = 0.0;
        for (int k = 0; k <= n; ++k) s += std::exp(L(n) - L(n - k) + moc.log_at_log(-L(n - k - 1)));
        tau[static_cast<std::size_t>(n)] = s;
    }
    return tau;
}

inline std::vector<double> tau_sequence(const std::vector<double>& l, const ModulusOfContinuity& moc) {
    std::vector<double> log_l(l.size());
    std::transform(l.begin(), l.end(), log_l.begin(), [](double v) { return std::log(v); });
    return tau_sequence_log(log_l, moc);
}

/// lambda^n int_{lambda^n}^1 y^{-2} varpi(y) dy, integrated as
/// int_0^U e^{u - U} varpi(e^{-u}) du with U = n log(1/lambda).
inline double tau_bound(const ModulusOfContinuity& moc, double lambda, double n) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidParams("tau_bound needs 0 < lambda < 1");
    const double U = -n * std::log(lambda);
    if (U <= 0.0) return 0.0;
    const int panels = std::max(4, static_cast<int>(std::ceil(4.0 * U)));
    return num::integrate([&](double u) { return std::exp(u - U + moc.log_at_log(u)); }, 0.0, U, panels);
}

inline double tau_n(const Map& map, const ModulusOfContinuity& moc, int n, int grid_size = 1024) {
    const auto c = map_combinatorics(map, 0.0, n + 1);
    std::vector<double> l;
    for (int m = 0; m <= n; ++m) {
        const auto g = static_cast<int>(std::max<std::int64_t>(grid_size, 8 * c.q(m + 1)));
        l.push_back(level_profile(map, c.q(m), c.p(m), g).l);
    }
    return tau_sequence(l, moc).back();
}

/// T^q - p as a smooth function of the lifted variable.
inline SmoothFunction power_function(const Map& map, std::int64_t q, std::int64_t p) {
    struct State {
        double v, d, dd;
    };
    auto run = [map, q, p](double x) {
        const double w = std::floor(x);
        Lifted<double> pt{static_cast<std::int64_t>(w), x - w};
        double lsum = 0.0, dd = 0.0;
        for (std::int64_t i = 0; i < q; ++i) {
            const double t1 = map.d1(pt.frac), t2 = map.d2(pt.frac);
            const double d = std::exp(lsum);
            dd = t2 * d * d + t1 * dd;
            lsum += std::log(t1);
            pt = map.step(pt);
        }
        return State{static_cast<double>(pt.winding - p) + pt.frac, std::exp(lsum), dd};
    };
    return {[run](double x) { return run(x).v; }, [run](double x) { return run(x).d; },
            [run](double x) { return run(x).dd; }};
}

struct IdentityCheck {
    int n = 0;
    double M0 = 0.0, Mq = 0.0;  ///< M_n(xi_0), M_n(xi_{q_{n-1}})
    double K0 = 0.0, Kq = 0.0;  ///< K_n(xi_0), K_n(xi_{q_n})
    double m_n = 0.0;           ///< sqrt(M0 Mq)
    double r_product = 0.0;     ///< |M_n(xi_0) M_n(xi_{q_{n-1}}) - K_n(xi_0) K_n(xi_{q_n})|
    double r_shift = 0.0;       ///< K_{n+1}(xi_{q_{n-1}}) - 1 against the rescaled M_n(xi_{q_{n+1}}) - 1
    double r_derivative = 0.0;  ///< (T^{q_n})'(xi_0) / M_n(xi_0) - 1 against its K_n counterpart
    double dist_log_max = 0.0;  ///< max |log Dist(xi_0, xi, xi_{q_{n-1}}, eta; T^{q_n})|
    double dist_constant = 0.0; ///< dist_log_max / varpi(l_{n-1})
    double max_residual() const { return std::max({r_product, r_shift, r_derivative}); }
};

/// M_n / K_n identities at level n >= 1, plus sampled cross-ratio distortions
/// on Delta_0^(n-1). `l_prev` is l_{n-1} (for the distortion constant).
inline IdentityCheck mk_identity_check(const Map& map, double x0, int n, const ModulusOfContinuity& moc,
                                       std::optional<double> l_prev = std::nullopt) {
    if (n < 1) throw InvalidParams("identity check needs n >= 1");
    const auto c = map_combinatorics(map, x0, n + 1);
    const auto f = power_function(map, c.q(n), c.p(n));          // T^{q_n}
    const auto g = power_function(map, c.q(n - 1), c.p(n - 1));  // T^{q_{n-1}}
    const double a = x0;
    const double b = g(a);                                       // xi_{q_{n-1}}
    const double cq = f(a);                                      // xi_{q_n}
    const double e = power_function(map, c.q(n + 1), c.p(n + 1))(a);  // xi_{q_{n+1}}

    auto M = [&](double xi) { return distortion(a, xi, b, f); };
    auto K = [&](double xi) { return distortion(a, xi, cq, g); };
    IdentityCheck r;
    r.n = n;
    r.M0 = M(a);
    r.Mq = M(b);
    r.K0 = K(a);
    r.Kq = K(cq);
    r.m_n = std::sqrt(r.M0 * r.Mq);
    r.r_product = std::abs(r.M0 * r.Mq - r.K0 * r.Kq);
    const double K_next = distortion(a, b, e, f);  // K_{n+1}(xi_{q_{n-1}}) uses T^{q_n} and xi_{q_{n+1}}
    r.r_shift = std::abs((K_next - 1.0) - std::abs(e - a) / std::abs(b - a) * (M(e) - 1.0));
    r.r_derivative = std::abs((f.d1(a) / r.M0 - 1.0) - std::abs(cq - a) / std::abs(b - a) * (1.0 - g.d1(a) / r.K0));

    static const std::array<double, 6> ts{0.07, 0.21, 0.38, 0.55, 0.72, 0.91};
    for (double s : ts)
        for (double t : ts) {
            if (s == t) continue;
            const double xi = a + s * (b - a), eta = a + t * (b - a);
            r.dist_log_max = std::max(r.dist_log_max, std::abs(std::log(cross_distortion(a, xi, b, eta, f))));
        }
    const double lp = l_prev ? *l_prev : std::abs(b - a);
    const double w = moc(lp);
    r.dist_constant = w > 0.0 ? r.dist_log_max / w : 0.0;
    return r;
}

struct DenjoyReport {
    std::string moc_name;
    std::vector<int> n;
    std::vector<std::int64_t> q;
    std::vector<double> delta, l, tau, tau_bound, sup_dev, sup_log_dev, ratio;
    std::vector<IdentityCheck> identities;  ///< n = 1..N
    double C = 0.0, lambda = 0.0;           ///< explicit Denjoy constant
    double lambda_emp = 0.0;                ///< exp(slope) of log l_n over n in [3, N]
    double max_sup_log_dev = 0.0;
    double log_dev_tail_slope = 0.0;        ///< slope of log sup_log_dev over the last 6 levels
    double ratio_constant = 0.0;            ///< max sup_dev / tau_n
    double ratio_trend = 0.0;               ///< ratio at N over ratio at the first level n >= 2
    double max_identity_residual = 0.0;
};

/// Levels n = 0..N. `rho` supplies Delta_n; by default it is the rigid
/// parameter or the deepest convergent the orbit resolves.
inline DenjoyReport denjoy_inequality_report(const Map& map, const ModulusOfContinuity& moc, int N,
                                             int grid_size = 1024,
                                             std::optional<ContinuedFraction> rho = std::nullopt) {
    if (N < 1) throw InvalidParams("denjoy report needs N >= 1");
    const auto c = map_combinatorics(map, 0.0, N + 1);
    const ContinuedFraction cf = rho ? *rho : reference_rotation(map, N);
    for (int m = 0; m <= N + 1 && m < static_cast<int>(cf.depth()); ++m)
        if (cf.q(m) != c.q(m)) throw InvalidParams("rho does not match the map's combinatorics at level " + std::to_string(m));
    if (cf.max_delta_index() < N) throw DepthUnavailable("Delta_n unavailable up to n = " + std::to_string(N));

    DenjoyReport rep;
    rep.moc_name = moc.name();
    const auto dl = denjoy_lambda(map);
    rep.C = dl.C;
    rep.lambda = dl.lambda;
    for (int m = 0; m <= N; ++m) {
        const auto g = static_cast<int>(std::max<std::int64_t>(grid_size, 8 * c.q(m + 1)));
        const auto prof = level_profile(map, c.q(m), c.p(m), g);
        rep.n.push_back(m);
        rep.q.push_back(c.q(m));
        rep.delta.push_back(cf.delta(m));
        rep.l.push_back(prof.l);
        rep.sup_dev.push_back(prof.sup_dev());
        rep.sup_log_dev.push_back(prof.sup_log_dev());
        rep.tau_bound.push_back(tau_bound(moc, rep.lambda, m));
    }
    rep.tau = tau_sequence(rep.l, moc);
    for (int m = 0; m <= N; ++m) {
        const auto i = static_cast<std::size_t>(m);
        rep.ratio.push_back(rep.tau[i] > 0.0 ? rep.sup_dev[i] / rep.tau[i] : 0.0);
        rep.ratio_constant = std::max(rep.ratio_constant, rep.ratio.back());
        rep.max_sup_log_dev = std::max(rep.max_sup_log_dev, rep.sup_log_dev[i]);
    }

    std::vector<double> xs, ys;
    for (int m = std::min(3, N - 1); m <= N; ++m) {
        xs.push_back(m);
        ys.push_back(std::log(rep.l[static_cast<std::size_t>(m)]));
    }
    rep.lambda_emp = std::exp(num::fit_line(xs, ys).slope);

    xs.clear();
    ys.clear();
    for (int m = std::max(0, N - 5); m <= N; ++m) {
        const double v = rep.sup_log_dev[static_cast<std::size_t>(m)];
        if (v <= 0.0) continue;
        xs.push_back(m);
        ys.push_back(std::log(v));
    }
    rep.log_dev_tail_slope = xs.size() >= 2 ? num::fit_line(xs, ys).slope : 0.0;

    const auto first = static_cast<std::size_t>(std::min(2, N));
    rep.ratio_trend = rep.ratio[first] > 0.0 ? rep.ratio.back() / rep.ratio[first] : 0.0;

    for (int m = 1; m <= N; ++m) {
        rep.identities.push_back(mk_identity_check(map, 0.0, m, moc, rep.l[static_cast<std::size_t>(m - 1)]));
        rep.max_identity_residual = std::max(rep.max_identity_residual, rep.identities.back().max_residual());
    }
    return rep;
}

} // namespace circleconj
