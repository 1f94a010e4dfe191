#pragma once

// The conjugacy phi = int h built from the orbit: gamma on the orbit, the
// invariant density h = e^gamma / int e^gamma, and phi with its inverse.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "circleconj/denjoy.hpp"
#include "circleconj/error.hpp"
#include "circleconj/maps.hpp"
#include "circleconj/mocs.hpp"
#include "circleconj/numberth.hpp"
#include "circleconj/numerics.hpp"

namespace circleconj {

struct GammaOrbit {
    OrbitData<double> orbit;
    std::vector<double> gamma;       ///< gamma(xi_i), i = 0..M-1
    double recursion_residual = 0.0; ///< max |gamma_{i+1} - gamma_i + log T'(xi_i)|
    double range = 0.0;              ///< max gamma - min gamma
    double max_abs = 0.0;
};

/// gamma(xi_0) = 0, gamma(xi_{i+1}) = gamma(xi_i) - log T'(xi_i).
inline GammaOrbit build_gamma(const Map& map, double x0, std::int64_t M) {
    if (M < 2) throw InvalidParams("build_gamma needs M >= 2");
    GammaOrbit g;
    g.orbit = make_orbit(map, x0, static_cast<std::size_t>(M));
    g.gamma.resize(static_cast<std::size_t>(M));
    g.gamma[0] = 0.0;
    std::vector<double> logd(static_cast<std::size_t>(M));
    for (std::size_t i = 0; i < logd.size(); ++i) {
        const double d = map.d1(g.orbit.points[i]);
        if (!(d > 0.0)) throw NonPositiveDerivative("T'(" + std::to_string(g.orbit.points[i]) + ") = " + std::to_string(d));
        logd[i] = std::log(d);
    }
    for (std::size_t i = 0; i + 1 < logd.size(); ++i) g.gamma[i + 1] = g.gamma[i] - logd[i];
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < g.gamma.size(); ++i) {
        if (i + 1 < g.gamma.size())
            g.recursion_residual = std::max(g.recursion_residual, std::abs(g.gamma[i + 1] - g.gamma[i] + logd[i]));
        lo = std::min(lo, g.gamma[i]);
        hi = std::max(hi, g.gamma[i]);
    }
    g.range = hi - lo;
    g.max_abs = std::max(-lo, hi);
    return g;
}

/// Piecewise-linear gamma on the sorted orbit, exponentiated and normalized by
/// the trapezoid rule. Positions are s = frac(x - xi_0), with the node s = 1
/// closing the circle.
struct Density {
    double x0 = 0.0;
    std::vector<double> s;      ///< sorted nodes, s[0] = 0, s.back() = 1
    std::vector<double> gamma;  ///< gamma at the nodes
    std::vector<double> h;      ///< normalized density at the nodes
    double Z = 0.0;             ///< trapezoid integral of e^gamma
    double integral = 0.0;      ///< trapezoid integral of h
    double min_h = 0.0;

    std::size_t cell(double sv) const {
        auto it = std::upper_bound(s.begin(), s.end(), sv);
        std::size_t i = static_cast<std::size_t>(it - s.begin());
        return std::min(i == 0 ? 0 : i - 1, s.size() - 2);
    }

    double position(double x) const { return frac(x - x0); }

    double gamma_at(double x) const {
        const double sv = position(x);
        const std::size_t i = cell(sv);
        const double t = (sv - s[i]) / (s[i + 1] - s[i]);
        return gamma[i] + t * (gamma[i + 1] - gamma[i]);
    }

    double operator()(double x) const { return std::exp(gamma_at(x)) / Z; }
};

inline Density build_density(const GammaOrbit& g) {
    Density d;
    const auto& o = g.orbit;
    d.x0 = o.x0;
    const std::size_t M = o.points.size();
    std::vector<std::pair<double, double>> nodes;
    nodes.reserve(M + 1);
    for (std::size_t i = 0; i < M; ++i) nodes.emplace_back(frac(o.points[i] - o.x0), g.gamma[i]);
    std::sort(nodes.begin(), nodes.end());
    for (const auto& [sv, gv] : nodes) {
        if (!d.s.empty() && sv <= d.s.back()) continue;  // coincident points (periodic orbits)
        d.s.push_back(sv);
        d.gamma.push_back(gv);
    }
    d.s.push_back(1.0);
    d.gamma.push_back(g.gamma[0]);
    double Z = 0.0;
    for (std::size_t i = 0; i + 1 < d.s.size(); ++i)
        Z += 0.5 * (d.s[i + 1] - d.s[i]) * (std::exp(d.gamma[i]) + std::exp(d.gamma[i + 1]));
    d.Z = Z;
    d.h.resize(d.s.size());
    for (std::size_t i = 0; i < d.s.size(); ++i) d.h[i] = std::exp(d.gamma[i]) / Z;
    for (std::size_t i = 0; i + 1 < d.s.size(); ++i) d.integral += 0.5 * (d.s[i + 1] - d.s[i]) * (d.h[i] + d.h[i + 1]);
    d.min_h = *std::min_element(d.h.begin(), d.h.end());
    return d;
}

/// phi(x) = int_{xi_0}^x h as a degree-one lift, trapezoid on each cell
/// (partial cells use the trapezoid with the interpolated endpoint value).
struct Conjugation {
    Density density;
    std::vector<double> cum;  ///< phi at the nodes, cum[0] = 0, cum.back() = 1

    double within(std::size_t i, double sv) const {
        const double hx = std::exp(density.gamma[i] + (sv - density.s[i]) / (density.s[i + 1] - density.s[i]) *
                                                          (density.gamma[i + 1] - density.gamma[i])) /
                          density.Z;
        return cum[i] + 0.5 * (sv - density.s[i]) * (density.h[i] + hx) / density.integral;
    }

    double operator()(double x) const {
        const double u = x - density.x0;
        const double w = std::floor(u);
        double sv = u - w;
        if (sv >= 1.0) sv = 0.0;
        return w + within(density.cell(sv), sv);
    }

    /// phi^{-1} by bisection on the monotone cell formula.
    double inverse(double y) const {
        const double w = std::floor(y);
        const double v = y - w;
        auto it = std::upper_bound(cum.begin(), cum.end(), v);
        std::size_t i = static_cast<std::size_t>(it - cum.begin());
        i = std::min(i == 0 ? 0 : i - 1, cum.size() - 2);
        double a = density.s[i], b = density.s[i + 1];
        for (int k = 0; k < 64 && b - a > 0.0; ++k) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            (within(i, m) < v ? a : b) = m;
        }
        return density.x0 + w + 0.5 * (a + b);
    }

    /// Smallest difference quotient over the nodes.
    double min_slope() const {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < cum.size(); ++i)
            m = std::min(m, (cum[i + 1] - cum[i]) / (density.s[i + 1] - density.s[i]));
        return m;
    }
};

inline Conjugation build_phi(const Density& d) {
    Conjugation c;
    c.density = d;
    c.cum.resize(d.s.size());
    c.cum[0] = 0.0;
    for (std::size_t i = 0; i + 1 < d.s.size(); ++i)
        c.cum[i + 1] = c.cum[i] + 0.5 * (d.s[i + 1] - d.s[i]) * (d.h[i] + d.h[i + 1]) / d.integral;
    c.cum.back() = 1.0;
    return c;
}

struct RegularityPrediction {
    enum class Case { holder_c4, log_holder_c5 };
    Case kind = Case::holder_c4;
    double alpha = 1.0;   ///< Hoelder exponent of T'' (C4)
    double lambda = 0.0;  ///< contraction constant
    double theta = 0.0;   ///< prod K_j^{-p_j} (C4)
    double sigma = 0.0;   ///< log-Hoelder index minus one (C5)
};

/// theta = prod K_j^{-p_j} for quotients K_j drawn with frequencies p_j.
inline double vartheta(const std::vector<double>& K, const std::vector<double>& p) {
    if (K.size() != p.size() || K.empty()) throw InvalidParams("vartheta needs matching K and p");
    double l = 0.0;
    for (std::size_t j = 0; j < K.size(); ++j) l -= p[j] * std::log(K[j]);
    return std::exp(l);
}

/// beta = min{1, alpha log lambda / log theta}.
inline double predicted_beta(double alpha, double lambda, double theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw InvalidParams("theta must lie in (0, 1)");
    return std::min(1.0, alpha * std::log(lambda) / std::log(theta));
}

struct RegularityEstimate {
    EmpiricalFit fit;
    std::optional<double> predicted;  ///< beta (C4) or sigma (C5)
    double fitted = 0.0;              ///< exponent (C4) or log index (C5)
    bool consistent = true;           ///< fitted >= predicted - 0.1
};

inline RegularityEstimate estimate_regularity(const Density& d, std::optional<RegularityPrediction> pred = std::nullopt) {
    std::vector<std::pair<double, double>> samples;
    for (std::size_t i = 0; i + 1 < d.s.size(); ++i) samples.emplace_back(d.s[i], d.h[i]);
    EmpiricalOptions opt;
    opt.period = 1.0;
    RegularityEstimate r;
    r.fit = empirical_moc(std::move(samples), opt);
    r.fitted = r.fit.exponent;
    if (pred) {
        if (pred->kind == RegularityPrediction::Case::holder_c4) {
            r.predicted = predicted_beta(pred->alpha, pred->lambda, pred->theta);
        } else {
            r.predicted = pred->sigma;
            r.fitted = r.fit.log_index;
        }
        if (!r.fit.degenerate) r.consistent = r.fitted >= *r.predicted - 0.1;
    }
    return r;
}

struct ConjugacyOptions {
    int probes = 1000;
    std::optional<ContinuedFraction> rho;  ///< reference rotation number
};

struct ConjugacyProfile {
    int N = 0;
    std::int64_t M = 0;  ///< q_N
    double rho = 0.0;
    GammaOrbit gamma;
    Conjugation phi;
    double residual_homological = 0.0;  ///< sup |h(Tx) T'(x) - h(x)| off the orbit
    double residual_conjugation = 0.0;  ///< sup |frac(phi(Tx) - phi(x)) - rho|
    double discrepancy = 0.0;           ///< KS distance of {phi(xi_i)} to {i rho}
    double max_shift = 0.0;             ///< max |phi(xi_i) - i rho| on the circle

    const Density& density() const { return phi.density; }
};

namespace detail {

inline double circle_dist(double a) {
    a -= std::round(a);
    return std::abs(a);
}

/// sup_x |F_a(x) - F_b(x)| for two equally sized point sets on [0, 1).
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double n = static_cast<double>(a.size()), m = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / n - j / m));
    }
    return d;
}

} // namespace detail

/// Full pipeline on the first q_N orbit points of x0.
inline ConjugacyProfile conjugate(const Map& map, double x0, int N, const ConjugacyOptions& opt = {}) {
    if (N < 1) throw InvalidParams("conjugate needs N >= 1");
    const auto c = map_combinatorics(map, x0, N);
    ConjugacyProfile P;
    P.N = N;
    P.M = c.q(N);
    if (P.M < 2) throw InvalidParams("q_N too small for a profile");
    P.rho = opt.rho ? opt.rho->rho : reference_rotation(map, N).rho;
    P.gamma = build_gamma(map, x0, P.M);
    P.phi = build_phi(build_density(P.gamma));
    const auto& h = P.phi.density;

    for (int j = 0; j < opt.probes; ++j) {
        const double x = frac(h.x0 + (j + 0.5) / opt.probes);
        const double tx = map.lift(x);
        P.residual_homological = std::max(P.residual_homological, std::abs(h(tx) * map.d1(x) - h(x)));
        P.residual_conjugation = std::max(P.residual_conjugation, detail::circle_dist(P.phi(tx) - P.phi(x) - P.rho));
    }

    std::vector<double> img, rot;
    const auto& o = P.gamma.orbit;
    for (std::size_t i = 0; i < o.points.size(); ++i) {
        const double y = frac(P.phi(o.points[i]));
        const double r = frac(static_cast<double>(i) * P.rho);
        img.push_back(y);
        rot.push_back(r);
        P.max_shift = std::max(P.max_shift, detail::circle_dist(y - r));
    }
    P.discrepancy = detail::ks_distance(std::move(img), std::move(rot));
    return P;
}

struct C1Criterion {
    std::vector<double> terms;    ///< k_{n+1} tau_n
    std::vector<double> partial;
    Verdict verdict = Verdict::inconclusive;
    double mean_ratio = 0.0;
    double decay_exponent = 0.0;
    double block_ratio = 0.0;     ///< ratio of the last two dyadic block sums
};

/// Verdict on sum k_{n+1} tau_n from the trend of its terms.
inline C1Criterion c1_criterion(std::span<const std::int64_t> ks, std::span<const double> tau) {
    C1Criterion r;
    const std::size_t n = std::min(ks.size(), tau.size());
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r.terms.push_back(static_cast<double>(ks[i]) * tau[i]);
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

/// tau_n from the map's own l_n, n = 0..N-1, against k_1..k_N. A rigid map has
/// T'' = 0, so its modulus is zero and every tau_n vanishes.
inline C1Criterion c1_criterion(const Map& map, const ModulusOfContinuity& moc, int N, int grid_size = 1024) {
    const auto c = map_combinatorics(map, 0.0, N + 1);
    std::vector<double> tau(static_cast<std::size_t>(N), 0.0);
    if (map.family() != MapFamily::rigid) {
        std::vector<double> l;
        for (int m = 0; m < N; ++m) {
            const auto g = static_cast<int>(std::max<std::int64_t>(grid_size, 8 * c.q(m + 1)));
            l.push_back(level_profile(map, c.q(m), c.p(m), g).l);
        }
        tau = tau_sequence(l, moc);
    }
    return c1_criterion(std::span<const std::int64_t>(c.ks.data(), static_cast<std::size_t>(N)), tau);
}

} // namespace circleconj
