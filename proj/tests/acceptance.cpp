// End-to-end acceptance checks, one PASS/FAIL line per criterion.
// Exit status is 0 unless --strict is given and some criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/float128.hpp>

#include "circleconj/circleconj.hpp"
#include "circleconj/io.hpp"

using namespace circleconj;

namespace {

const double kGolden = 0.5 * (std::sqrt(5.0) - 1.0);

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
};

std::string fmt(const char* f, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

const Map& tuned_sine() {
    static const Map m = [] {
        const auto tr = tune_parameter(0.5, cf_expand(kGolden, 14), 1e-10);
        return Map::sine(tr.omega, 0.5);
    }();
    return m;
}

ConjugacyProfile tuned_profile(int N) {
    ConjugacyOptions opt;
    opt.rho = cf_expand(kGolden, 30);
    return conjugate(tuned_sine(), 0.0, N, opt);
}

std::vector<double> appendix_weights(std::size_t len, bool summable) {
    std::vector<double> w(len);
    for (std::size_t n = 1; n <= len; ++n)
        w[n - 1] = summable ? 1.0 / (double(n) * double(n)) : 1.0 / ((n + 2.0) * std::log(n + 2.0));
    return w;
}

// 1. continued fractions
void continued_fractions(Outcome& o) {
    bool det = true;
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::int64_t> K(1, 50);
    for (int t = 0; t < 1000; ++t) {
        std::vector<std::int64_t> ks(8);
        for (auto& k : ks) k = K(rng);
        const auto c = convergents(ks);
        for (std::size_t i = 1; i < c.ps.size(); ++i) {
            const int n = static_cast<int>(i) - 1;
            det = det && c.ps[i] * c.qs[i - 1] - c.ps[i - 1] * c.qs[i] == (n % 2 == 0 ? -1 : 1);
        }
    }
    o.require(det, "determinant identity exact on 1000 random prefixes");

    bool bound = true;
    int checked = 0;
    for (int t = 0; t < 1000; ++t) {
        const double rho = uniform01(rng);
        if (rho == 0.0) continue;
        const auto cf = cf_expand_trusted(rho, 60);
        for (int n = 0; n + 1 < static_cast<int>(cf.depth()) && cf.q(n + 1) < 1000000; ++n) {
            const long double err = std::abs(static_cast<long double>(rho) - static_cast<long double>(cf.p(n)) / cf.q(n));
            bound = bound && err < 1.0L / (static_cast<long double>(cf.q(n)) * cf.q(n + 1));
            ++checked;
        }
    }
    o.require(bound, "|rho - p_n/q_n| < 1/(q_n q_{n+1}) at " + std::to_string(checked) + " levels of 1000 random rho");

    const auto g = cf_expand(kGolden, 30);
    const auto s = cf_expand(std::sqrt(2.0) - 1.0, 16);
    using boost::multiprecision::float128;
    const auto th = cf_expand<float128>(boost::multiprecision::tanh(float128(1)), 11);
    bool named = std::all_of(g.ks.begin(), g.ks.end(), [](auto k) { return k == 1; }) &&
                 std::all_of(s.ks.begin(), s.ks.end(), [](auto k) { return k == 2; });
    for (std::size_t i = 0; i < th.ks.size(); ++i) named = named && th.ks[i] == static_cast<std::int64_t>(2 * i + 1);
    o.require(named, "golden = [1,1,...], sqrt2-1 = [2,2,...], tanh 1 = [1,3,5,...]");
}

// 2. cross-ratio distortion
void cross_ratios(Outcome& o) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double w31 = 0, wD = 0, wX = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto f = smooth(Map::sine(U(rng), 0.95 * U(rng)));
        const auto g = smooth(Map::sine(U(rng), 0.95 * U(rng)));
        const auto fg = compose(f, g);
        const double x1 = U(rng), x2 = U(rng), x3 = U(rng), x4 = U(rng);
        w31 = std::max(w31, rel(cross_distortion(x1, x2, x3, x4, f), cross_distortion_via_d(x1, x2, x3, x4, f)));
        wD = std::max(wD, rel(distortion(x1, x2, x3, fg), distortion(x1, x2, x3, g) * distortion(g(x1), g(x2), g(x3), f)));
        wX = std::max(wX, rel(cross_distortion(x1, x2, x3, x4, fg),
                              cross_distortion(x1, x2, x3, x4, g) * cross_distortion(g(x1), g(x2), g(x3), g(x4), f)));
    }
    o.require(w31 < 1e-12, "Dist through D agrees: worst " + fmt("%.3g", w31));
    o.require(wD < 1e-12, "D composition law: worst " + fmt("%.3g", wD));
    o.require(wX < 1e-12, "Dist composition law: worst " + fmt("%.3g", wX));

    const auto a = affine(0.75, 0.125);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        std::array<double, 4> x;
        for (auto& v : x) v = std::ldexp(static_cast<double>(rng() % 4096), -12);
        if (x[0] == x[1] || x[1] == x[2] || x[2] == x[3] || x[3] == x[0]) continue;
        worst = std::max(worst, std::abs(cross_distortion(x[0], x[1], x[2], x[3], a) - 1.0));
    }
    o.require(worst <= 2 * std::numeric_limits<double>::epsilon(), "affine Dist = 1 within 2 ulps");

    const auto f = smooth(tuned_sine());
    const auto spans = geometric_spans(1e-1, 1e-4);
    const double sd = residual_scan_D(f, 0.2, spans, moc::lipschitz()).slope;
    const double sx = residual_scan_Dist(f, 0.2, spans, moc::lipschitz()).slope;
    o.require(sd >= 0.9 && sd <= 1.1, "D residual slope " + fmt("%.4f", sd));
    o.require(sx >= 0.9 && sx <= 1.1, "Dist residual slope " + fmt("%.4f", sx));
}

// 3. Denjoy-type estimates
void denjoy(Outcome& o) {
    const auto& m = tuned_sine();
    bool disjoint = true;
    for (int n = 1; n <= 12; ++n) disjoint = disjoint && build_partition(m, 0.0, n).disjoint;
    o.require(disjoint, "dynamical partitions disjoint at levels 1..12");
    const auto r = denjoy_inequality_report(m, moc::lipschitz(), 14, 1024, cf_expand(kGolden, 20));
    bool dom = true;
    for (std::size_t i = 0; i < r.l.size(); ++i) dom = dom && r.l[i] >= r.delta[i];
    o.require(dom, "l_n >= Delta_n at all " + std::to_string(r.l.size()) + " levels");
    o.require(r.lambda_emp <= r.lambda + 0.02,
              "lambda_emp " + fmt("%.4f", r.lambda_emp) + " <= lambda " + fmt("%.4f", r.lambda) + " + 0.02");
    o.require(std::isfinite(r.max_sup_log_dev) && r.log_dev_tail_slope <= 0.0,
              "sup|log (T^q_n)'| max " + fmt("%.4f", r.max_sup_log_dev) + ", last-6 slope " +
                  fmt("%.4f", r.log_dev_tail_slope));
    o.require(r.ratio_trend <= 1.5, "sup|(T^q_n)'-1|/tau_n trend " + fmt("%.4f", r.ratio_trend) + " <= 1.5");
    o.require(r.max_identity_residual < 1e-8, "identity residuals " + fmt("%.3g", r.max_identity_residual));
}

// 4. conjugacy
void conjugacy(Outcome& o) {
    const auto a = tuned_profile(14), b = tuned_profile(16);
    o.require(b.M == 1597, "orbit length " + std::to_string(b.M));
    o.require(b.residual_homological < 1e-3, "homological residual " + fmt("%.3g", b.residual_homological));
    o.require(b.residual_conjugation < 1e-3, "conjugation residual " + fmt("%.3g", b.residual_conjugation));
    const double sh = a.residual_homological / b.residual_homological;
    const double sc = a.residual_conjugation / b.residual_conjugation;
    o.require(sh >= 1.5 && sh <= 3.0, "homological shrink q_14 -> q_16 " + fmt("%.3f", sh) + " in [1.5, 3]");
    o.require(sc >= 1.5 && sc <= 3.0, "conjugation shrink q_14 -> q_16 " + fmt("%.3f", sc) + " in [1.5, 3]");
    const auto rigid = conjugate(Map::rigid(kGolden), 0.0, 16);
    double dev = 0.0;
    for (double v : rigid.density().h) dev = std::max(dev, std::abs(v - 1.0));
    o.require(dev < 1e-12, "rigid baseline h = 1 within " + fmt("%.3g", dev));
}

// 5. integrability condition
void integrability(Outcome& o) {
    const auto cases = reference_cases();
    std::size_t agree = 0;
    double drift = 0.0;
    num::LevelPolicy fine;
    fine.panels = 2;
    for (const auto& c : cases) {
        const auto r = integrability_report(c.phi, c.moc, c.lambda);
        agree += r.verdicts_agree && r.main.verdict == c.expected;
        const auto f = main_integral(c.phi, c.moc, c.lambda, fine);
        if (f.verdict != r.main.verdict) drift = std::numeric_limits<double>::infinity();
        else if (f.verdict == Verdict::finite) drift = std::max(drift, rel(f.value, r.main.value));
    }
    o.require(agree == cases.size(), "verdicts agree on " + std::to_string(agree) + " of " + std::to_string(cases.size()));
    o.require(drift < 1e-4, "grid doubling changes finite values by " + fmt("%.3g", drift));
    const double v = main_integral(PhiType::constant(1), moc::holder(0.5), 0.8).value;
    o.require(std::abs(v - 2.0) < 1e-4, "C1 holder(0.5) = " + fmt("%.10f", v));
}

// 6. higher regularity
void higher(Outcome& o) {
    const auto cf = from_quotients(std::vector<std::int64_t>(70, 1));
    const double lam = 0.75;
    for (double alpha : {0.3, 0.5, 0.8}) {
        const auto h = higher_regularity(PhiType::constant(1), moc::holder(alpha), lam, cf, 60);
        const double q = h.exp_rate / (alpha * std::log(lam));
        o.require(std::abs(q - 1.0) <= 0.1, "holder(" + fmt("%.1f", alpha) + ") R decay / alpha log lambda = " + fmt("%.4f", q));
    }
    const double sigma = 0.5;
    const auto h = higher_regularity(PhiType::constant(1), moc::log_holder(1 + sigma), lam, cf, 60);
    double lo = 1e300, hi = 0.0;
    for (int n = 10; n <= 60; ++n) {
        const double v = h.R[static_cast<std::size_t>(n)] * std::pow(n, sigma);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    o.require(hi / lo < 2.0, "log_holder(1.5): R(n) n^0.5 in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "]");
    const auto fit = estimate_regularity(tuned_profile(20).density()).fit;
    o.require(!fit.degenerate && fit.exponent >= 0.9, "Holder exponent of h " + fmt("%.4f", fit.exponent) + " >= 0.9");
}

// 7. Gauss-Kuzmin Monte Carlo
void appendix(Outcome& o) {
    const std::size_t len = 2048, seqs = 10000;
    const auto A = kn_monte_carlo(appendix_weights(len, true), seqs, 1);
    const auto B = kn_monte_carlo(appendix_weights(len, false), seqs, 1);
    o.require(A.converged_fraction >= 0.99, "K_n = n^-2 converged " + fmt("%.2f", 100 * A.converged_fraction) + "%");
    const auto& m = B.median_partial;
    o.require(B.medians_increase, "slow weights medians " + fmt("%.4f", m[m.size() - 3]) + " < " +
                                      fmt("%.4f", m[m.size() - 2]) + " < " + fmt("%.4f", m.back()));
}

// 8. reproducibility: every table rebuilt from scratch is byte-identical
void reproducibility(Outcome& o) {
    std::vector<std::pair<std::string, std::function<std::string()>>> tables = {
        {"cf", [] { return io::cf_table(cf_expand(std::sqrt(2.0) - 1.0, 16)).csv(); }},
        {"scan", [] { return io::scan_table(residual_scan_Dist(smooth(tuned_sine()), 0.2, geometric_spans(1e-1, 1e-4), moc::lipschitz())).csv(); }},
        {"denjoy", [] { return io::denjoy_table(denjoy_inequality_report(tuned_sine(), moc::lipschitz(), 12)).csv(); }},
        {"density", [] { return io::density_table(tuned_profile(14)).csv(); }},
        {"series", [] { return io::series_table(series_criterion(PhiType::power(1), moc::log_holder(2.5), 0.8, 512)).csv(); }},
        {"appendix", [] {
             const auto m = kn_monte_carlo(appendix_weights(256, false), 200, 9);
             io::Table t{{"checkpoint", "median"}, {}};
             for (std::size_t i = 0; i < m.checkpoints.size(); ++i) t.add(m.checkpoints[i], m.median_partial[i]);
             return t.csv();
         }},
        {"generator", [] {
             io::Table t{{"k"}, {}};
             for (auto k : gen_partial_quotients(QuotientDistribution{{1, 2, 3}, {0.5, 0.3, 0.2}}, 200, 42)) t.add(k);
             return t.csv();
         }},
    };
    for (const auto& [name, make] : tables) o.require(make() == make(), name + " table identical on re-run");
}

} // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
    const bool verbose = argc > 1 && std::strcmp(argv[argc - 1], "-v") == 0;
    struct Criterion {
        const char* name;
        double budget_s;
        void (*run)(Outcome&);
    };
    const Criterion all[] = {
        {"continued fractions", 5, continued_fractions},
        {"cross-ratio distortion", 30, cross_ratios},
        {"Denjoy-type estimates", 120, denjoy},
        {"conjugacy", 60, conjugacy},
        {"integrability condition", 30, integrability},
        {"higher regularity", 120, higher},
        {"Gauss-Kuzmin appendix", 60, appendix},
        {"reproducibility", 120, reproducibility},
    };
    int failed = 0, i = 0;
    for (const auto& c : all) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("threw ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(secs < c.budget_s, "runtime " + fmt("%.2f", secs) + " s < " + fmt("%.0f", c.budget_s) + " s");
        std::printf("%s %d %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", ++i, c.name, secs);
        for (const auto& n : o.notes)
            if (verbose || n.rfind("FAIL", 0) == 0) std::printf("       %s\n", n.c_str());
        failed += !o.pass;
    }
    std::printf("%d of %d criteria passed\n", i - failed, i);
    return strict && failed ? 1 : 0;
}
