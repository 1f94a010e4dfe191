#pragma once

// Ratios, cross-ratios and their distortions under increasing maps.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "circleconj/error.hpp"
#include "circleconj/maps.hpp"
#include "circleconj/mocs.hpp"
#include "circleconj/numerics.hpp"

namespace circleconj {

/// A C^2 function of one variable given with its first two derivatives.
struct SmoothFunction {
    std::function<double(double)> f, d1, d2;

    double operator()(double x) const { return f(x); }
};

inline SmoothFunction smooth(const Map& m) {
    return {[m](double x) { return m.lift(x); }, [m](double x) { return m.d1(x); },
            [m](double x) { return m.d2(x); }};
}

inline SmoothFunction affine(double a, double b) {
    return {[a, b](double x) { return a * x + b; }, [a](double) { return a; }, [](double) { return 0.0; }};
}

/// (f o g)
inline SmoothFunction compose(const SmoothFunction& f, const SmoothFunction& g) {
    return {[f, g](double x) { return f.f(g.f(x)); },
            [f, g](double x) { return f.d1(g.f(x)) * g.d1(x); },
            [f, g](double x) {
                const double gp = g.d1(x);
                return f.d2(g.f(x)) * gp * gp + f.d1(g.f(x)) * g.d2(x);
            }};
}

/// R(x1, x2, x3) = (x1 - x2) / (x2 - x3).
inline double ratio(double x1, double x2, double x3) {
    if (x2 == x3) throw DegenerateConfiguration("ratio needs x2 != x3");
    return (x1 - x2) / (x2 - x3);
}

/// Cr(x1, x2, x3, x4) = (x1 - x2)(x3 - x4) / ((x2 - x3)(x4 - x1)).
inline double cross_ratio(double x1, double x2, double x3, double x4) {
    if (x2 == x3 || x4 == x1) throw DegenerateConfiguration("cross_ratio needs x2 != x3 and x4 != x1");
    return (x1 - x2) * (x3 - x4) / ((x2 - x3) * (x4 - x1));
}

/// (f(a) - f(b)) / (a - b), with f'(a) when a == b.
template <class F>
double divided_difference(const F& f, double a, double b) {
    const double v = a == b ? f.d1(a) : (f.f(a) - f.f(b)) / (a - b);
    if (!(v > 0.0)) throw NonMonotone("divided difference " + std::to_string(v) + " on [" + std::to_string(std::min(a, b)) +
                                      ", " + std::to_string(std::max(a, b)) + "]");
    return v;
}

/// D(x1, x2, x3; f) = R(f x1, f x2, f x3) / R(x1, x2, x3).
template <class F>
double distortion(double x1, double x2, double x3, const F& f) {
    return divided_difference(f, x1, x2) / divided_difference(f, x2, x3);
}

/// Dist(x1, x2, x3, x4; f) = Cr(f x_i) / Cr(x_i).
template <class F>
double cross_distortion(double x1, double x2, double x3, double x4, const F& f) {
    return divided_difference(f, x1, x2) * divided_difference(f, x3, x4) /
           (divided_difference(f, x2, x3) * divided_difference(f, x4, x1));
}

/// Dist as the quotient D(x1, x2, x3; f) / D(x1, x4, x3; f).
template <class F>
double cross_distortion_via_d(double x1, double x2, double x3, double x4, const F& f) {
    return distortion(x1, x2, x3, f) / distortion(x1, x4, x3, f);
}

struct ScanRow {
    double span = 0.0;
    int configuration = 0;  ///< 1: x2 between x1 and x3; 2: x1 between; 3: x3 between
    double r = 0.0;          ///< residual with x* at the hull midpoint
    double r_worst = 0.0;    ///< largest residual over an 11-point grid of x*
    double varpi = 0.0;
};

struct ScanReport {
    std::vector<ScanRow> rows;
    std::vector<double> spans;
    std::vector<double> r;  ///< max over configurations, per span
    double slope = 0.0;     ///< log r against log varpi(span)
    std::array<double, 3> slope_by_configuration{};
    double constant = 0.0;  ///< max r / varpi over the scan
};

namespace detail {

/// Point positions in [0, 1] for the three orderings of (x1, x2, x3):
/// the two outer points sit at the hull ends, the middle one at t.
inline std::array<double, 3> triple_positions(int configuration, double t, bool flip) {
    std::array<double, 3> p{};
    switch (configuration) {
    case 1: p = {0.0, t, 1.0}; break;
    case 2: p = {t, 0.0, 1.0}; break;
    default: p = {0.0, 1.0, t}; break;
    }
    if (flip)
        for (auto& v : p) v = 1.0 - v;
    return p;
}

inline const std::array<double, 5>& interior_fractions() {
    static const std::array<double, 5> ts{0.13, 0.31, 0.5, 0.69, 0.87};
    return ts;
}

inline void finish_report(ScanReport& rep, const ModulusOfContinuity& moc) {
    std::vector<double> lx, ly;
    std::array<std::vector<double>, 3> cx, cy;
    for (std::size_t i = 0; i < rep.spans.size(); ++i) {
        if (rep.r[i] <= 0.0) continue;
        lx.push_back(std::log(moc(rep.spans[i])));
        ly.push_back(std::log(rep.r[i]));
        rep.constant = std::max(rep.constant, rep.r[i] / moc(rep.spans[i]));
    }
    for (const auto& row : rep.rows) {
        if (row.r <= 0.0) continue;
        cx[row.configuration - 1].push_back(std::log(row.varpi));
        cy[row.configuration - 1].push_back(std::log(row.r));
    }
    if (lx.size() >= 2) rep.slope = num::fit_line(lx, ly).slope;
    for (int c = 0; c < 3; ++c)
        if (cx[c].size() >= 2) rep.slope_by_configuration[c] = num::fit_line(cx[c], cy[c]).slope;
}

} // namespace detail

/// Residual of D against its first-order model:
/// r = max |D - 1 - (x1 - x3) f''(x*) / (2 f'(x*))| / |x1 - x3| over sampled
/// triples of hull [center - span/2, center + span/2].
inline ScanReport residual_scan_D(const SmoothFunction& f, double center, const std::vector<double>& spans,
                                  const ModulusOfContinuity& moc) {
    ScanReport rep;
    for (double span : spans) {
        const double lo = center - 0.5 * span;
        double r_span = 0.0;
        for (int c = 1; c <= 3; ++c) {
            ScanRow row;
            row.span = span;
            row.configuration = c;
            row.varpi = moc(span);
            for (double t : detail::interior_fractions())
                for (bool flip : {false, true}) {
                    const auto p = detail::triple_positions(c, t, flip);
                    const double x1 = lo + span * p[0], x2 = lo + span * p[1], x3 = lo + span * p[2];
                    const double D = distortion(x1, x2, x3, f);
                    const double w = std::abs(x1 - x3);
                    auto resid = [&](double xs) {
                        return std::abs(D - 1.0 - (x1 - x3) * f.d2(xs) / (2.0 * f.d1(xs))) / w;
                    };
                    row.r = std::max(row.r, resid(center));
                    for (int k = 0; k <= 10; ++k) row.r_worst = std::max(row.r_worst, resid(lo + span * k / 10.0));
                }
            r_span = std::max(r_span, row.r);
            rep.rows.push_back(row);
        }
        rep.spans.push_back(span);
        rep.r.push_back(r_span);
    }
    detail::finish_report(rep, moc);
    return rep;
}

/// Residual r = max |Dist - 1| / |x1 - x3| over sampled quadruples; the
/// configuration refers to the order of (x1, x2, x3), with x4 at interior
/// fractions distinct from the other three points.
inline ScanReport residual_scan_Dist(const SmoothFunction& f, double center, const std::vector<double>& spans,
                                     const ModulusOfContinuity& moc) {
    ScanReport rep;
    for (double span : spans) {
        const double lo = center - 0.5 * span;
        double r_span = 0.0;
        for (int c = 1; c <= 3; ++c) {
            ScanRow row;
            row.span = span;
            row.configuration = c;
            row.varpi = moc(span);
            for (double t : detail::interior_fractions())
                for (double t4 : {0.23, 0.61, 0.79})
                    for (bool flip : {false, true}) {
                        const auto p = detail::triple_positions(c, t, flip);
                        const double q4 = flip ? 1.0 - t4 : t4;
                        if (q4 == p[0] || q4 == p[1] || q4 == p[2]) continue;
                        const double x1 = lo + span * p[0], x2 = lo + span * p[1], x3 = lo + span * p[2];
                        const double x4 = lo + span * q4;
                        const double dist = cross_distortion(x1, x2, x3, x4, f);
                        const double v = std::abs(dist - 1.0) / std::abs(x1 - x3);
                        row.r = std::max(row.r, v);
                        row.r_worst = row.r;
                    }
            r_span = std::max(r_span, row.r);
            rep.rows.push_back(row);
        }
        rep.spans.push_back(span);
        rep.r.push_back(r_span);
    }
    detail::finish_report(rep, moc);
    return rep;
}

/// Geometric spans from hi down to lo, `per_decade` per factor of ten.
inline std::vector<double> geometric_spans(double hi, double lo, int per_decade = 4) {
    std::vector<double> s;
    const int n = static_cast<int>(std::round(std::log10(hi / lo) * per_decade));
    for (int i = 0; i <= n; ++i) s.push_back(hi * std::pow(lo / hi, static_cast<double>(i) / n));
    return s;
}

} // namespace circleconj
