#pragma once

// CSV tables and JSON records for the library's reports. Numbers are printed
// with 17 significant digits so that identical runs give identical files.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "circleconj/conjugacy.hpp"
#include "circleconj/crossratio.hpp"
#include "circleconj/denjoy.hpp"
#include "circleconj/integrability.hpp"
#include "circleconj/numberth.hpp"

namespace circleconj::io {

using json = nlohmann::json;

inline std::string cell(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
inline std::string cell(std::int64_t v) { return std::to_string(v); }
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(std::size_t v) { return std::to_string(v); }
inline std::string cell(bool v) { return v ? "1" : "0"; }
inline std::string cell(const std::string& s) { return s; }
inline std::string cell(const char* s) { return s; }

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    template <class... T>
    void add(const T&... v) {
        rows.push_back({cell(v)...});
    }

    std::string csv() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) out += ',';
                out += r[i];
            }
            out += '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
        return out;
    }
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidParams("cannot write " + path.string());
    f << text;
}

inline void write_csv(const std::filesystem::path& path, const Table& t) { write_text(path, t.csv()); }

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// JSON has no infinities; they become null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// continued fractions

inline Table cf_table(const ContinuedFraction& cf) {
    Table t{{"n", "k_n", "p_n", "q_n", "delta_n"}, {}};
    for (int n = -1; n < static_cast<int>(cf.depth()); ++n) {
        const std::string k = n >= 1 ? cell(cf.k(n)) : "";
        const std::string d = n <= cf.max_delta_index() ? cell(cf.delta(n)) : "";
        t.add(n, k, cf.p(n), cf.q(n), d);
    }
    return t;
}

inline json to_json(const ContinuedFraction& cf) {
    json j;
    j["rho"] = cf.rho;
    j["ks"] = cf.ks;
    j["ps"] = cf.ps;
    j["qs"] = cf.qs;
    j["deltas"] = cf.deltas;
    return j;
}

// cross-ratio scans

inline Table scan_table(const ScanReport& r) {
    Table t{{"span", "configuration", "r", "r_worst", "varpi"}, {}};
    for (const auto& row : r.rows) t.add(row.span, row.configuration, row.r, row.r_worst, row.varpi);
    return t;
}

inline json to_json(const ScanReport& r) {
    return {{"slope", r.slope},
            {"slope_by_configuration", r.slope_by_configuration},
            {"constant", r.constant},
            {"spans", r.spans},
            {"r", r.r}};
}

// Denjoy report

inline Table denjoy_table(const DenjoyReport& r) {
    Table t{{"n", "q_n", "delta_n", "l_n", "tau_n", "tau_bound", "sup_dev", "sup_log_dev", "ratio"}, {}};
    for (std::size_t i = 0; i < r.n.size(); ++i)
        t.add(r.n[i], r.q[i], r.delta[i], r.l[i], r.tau[i], r.tau_bound[i], r.sup_dev[i], r.sup_log_dev[i],
              r.ratio[i]);
    return t;
}

inline Table identity_table(const DenjoyReport& r) {
    Table t{{"n", "M0", "Mq", "K0", "Kq", "m_n", "r_product", "r_shift", "r_derivative", "dist_log_max",
             "dist_constant"},
            {}};
    for (const auto& c : r.identities)
        t.add(c.n, c.M0, c.Mq, c.K0, c.Kq, c.m_n, c.r_product, c.r_shift, c.r_derivative, c.dist_log_max,
              c.dist_constant);
    return t;
}

inline json to_json(const DenjoyReport& r) {
    return {{"modulus", r.moc_name},
            {"C", r.C},
            {"lambda", r.lambda},
            {"lambda_emp", r.lambda_emp},
            {"max_sup_log_dev", r.max_sup_log_dev},
            {"log_dev_tail_slope", r.log_dev_tail_slope},
            {"ratio_constant", r.ratio_constant},
            {"ratio_trend", r.ratio_trend},
            {"max_identity_residual", r.max_identity_residual},
            {"levels", r.n.size()}};
}

// conjugacy

inline Table density_table(const ConjugacyProfile& p) {
    const auto& d = p.density();
    Table t{{"i", "s", "gamma", "h"}, {}};
    for (std::size_t i = 0; i < d.s.size(); ++i) t.add(i, d.s[i], d.gamma[i], d.h[i]);
    return t;
}

inline json to_json(const ConjugacyProfile& p) {
    return {{"N", p.N},
            {"M", p.M},
            {"rho", p.rho},
            {"residual_homological", p.residual_homological},
            {"residual_conjugation", p.residual_conjugation},
            {"discrepancy", p.discrepancy},
            {"max_shift", p.max_shift},
            {"gamma_max_abs", p.gamma.max_abs},
            {"gamma_recursion_residual", p.gamma.recursion_residual},
            {"h_min", p.density().min_h}};
}

// integrability

inline json to_json(const IntegralValue& v) {
    return {{"verdict", std::string(to_string(v.verdict))},
            {"value", number(v.value)},
            {"levels", v.tail.levels},
            {"partial", number(v.tail.partial)},
            {"tail", number(v.tail.tail)}};
}

inline Table series_table(const SeriesCriterion& s) {
    Table t{{"n", "k_n_plus_1", "term", "partial"}, {}};
    for (std::size_t i = 0; i < s.terms.size(); ++i) t.add(i, s.ks[i], s.terms[i], s.partial[i]);
    return t;
}

inline Table r_table(const HigherRegularity& h) {
    Table t{{"n", "R"}, {}};
    for (std::size_t i = 0; i < h.R.size(); ++i) t.add(i, h.R[i]);
    return t;
}

inline Table varpi_tilde_table(const HigherRegularity& h) {
    Table t{{"x", "varpi_tilde"}, {}};
    for (std::size_t i = 0; i < h.x.size(); ++i) t.add(h.x[i], h.varpi_tilde[i]);
    return t;
}

inline json to_json(const IntegrabilityReport& r) {
    json j;
    j["main"] = to_json(r.main);
    j["series"] = {{"verdict", std::string(to_string(r.series.verdict))},
                   {"terms", r.series.terms.size()},
                   {"partial", r.series.partial.empty() ? json(nullptr) : number(r.series.partial.back())},
                   {"mean_ratio", r.series.mean_ratio},
                   {"decay_exponent", r.series.decay_exponent},
                   {"block_ratio", r.series.block_ratio}};
    j["case"] = to_string(r.tag);
    j["case_param"] = r.case_param;
    if (r.reduced) j["reduced"] = to_json(*r.reduced);
    j["verdicts_agree"] = r.verdicts_agree;
    if (r.higher) {
        const auto& h = *r.higher;
        j["higher"] = {{"nonincreasing", h.nonincreasing},
                       {"vanishing_ratio", h.vanishing_ratio},
                       {"exp_rate", h.exp_rate},
                       {"power_rate", h.power_rate},
                       {"theta", h.theta},
                       {"holder_fit", h.holder_fit},
                       {"log_holder_fit", h.log_holder_fit},
                       {"is_modulus", h.is_modulus},
                       {"beta", h.beta ? json(*h.beta) : json(nullptr)},
                       {"sigma", h.sigma ? json(*h.sigma) : json(nullptr)}};
    }
    return j;
}

inline Table matrix_table(std::span<const ReferenceCase> cases, std::span<const IntegrabilityReport> reps) {
    Table t{{"case", "lambda", "expected", "main", "series", "reduced", "value"}, {}};
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& r = reps[i];
        t.add(cases[i].name, cases[i].lambda, std::string(to_string(cases[i].expected)),
              std::string(to_string(r.main.verdict)), std::string(to_string(r.series.verdict)),
              r.reduced ? std::string(to_string(r.reduced->verdict)) : std::string(), r.main.value);
    }
    return t;
}

// appendix Monte Carlo

inline json to_json(const KnMonteCarlo& m) {
    return {{"sequences", m.sequences},
            {"length", m.length},
            {"converged", m.converged},
            {"converged_fraction", m.converged_fraction},
            {"checkpoints", m.checkpoints},
            {"median_partial", m.median_partial},
            {"medians_increase", m.medians_increase}};
}

} // namespace circleconj::io
