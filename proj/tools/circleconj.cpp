// circleconj: runs the library's experiments from a JSON config and writes
// CSV tables, a JSON record and a one-page summary into the output directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/multiprecision/float128.hpp>

#include "circleconj/circleconj.hpp"
#include "circleconj/io.hpp"

namespace fs = std::filesystem;
using namespace circleconj;
using io::json;
using boost::multiprecision::float128;

namespace {

struct Run {
    json cfg;
    fs::path out;
    std::uint64_t seed = 1;
    bool extended = false;
    std::vector<std::string> lines;  // summary body
    json record;
    bool all_pass = true;

    void check(const std::string& what, bool ok, const std::string& detail) {
        lines.push_back(std::string(ok ? "PASS  " : "FAIL  ") + what + "  (" + detail + ")");
        all_pass = all_pass && ok;
    }
    void note(const std::string& s) { lines.push_back("      " + s); }
    void csv(const std::string& name, const io::Table& t) { io::write_csv(out / name, t); }
};

std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

json section(const json& cfg, const char* key) { return cfg.contains(key) ? cfg[key] : json::object(); }

// rotation targets: {"named": "golden"|"silver"|"tanh1"} | {"quotients": [...]} | {"value": x}

// Stops early once q_n passes 1e17, beyond which double rho carries no information.
std::vector<std::int64_t> named_quotients(const std::string& name, std::size_t n) {
    std::vector<std::int64_t> ks;
    double q0 = 0.0, q1 = 1.0;
    for (std::size_t i = 0; i < n && q1 < 1e17; ++i) {
        if (name == "golden") ks.push_back(1);
        else if (name == "silver") ks.push_back(2);
        else if (name == "tanh1") ks.push_back(static_cast<std::int64_t>(2 * i + 1));
        else throw InvalidParams("unknown named rotation '" + name + "' (golden, silver, tanh1)");
        const double q2 = static_cast<double>(ks.back()) * q1 + q0;
        q0 = q1;
        q1 = q2;
    }
    return ks;
}

ContinuedFraction target_cf(const json& rot, std::size_t depth) {
    if (rot.contains("quotients")) {
        const auto ks = rot["quotients"].get<std::vector<std::int64_t>>();
        return from_quotients(std::vector<std::int64_t>(ks.begin(), ks.begin() + std::min(depth, ks.size())));
    }
    if (rot.contains("value")) return cf_expand(rot["value"].get<double>(), depth);
    return from_quotients(named_quotients(rot.value("named", std::string("golden")), depth));
}

double target_value(const json& rot) {
    if (rot.contains("value")) return rot["value"].get<double>();
    const auto cf = target_cf(rot, rot.contains("quotients") ? rot["quotients"].size() : 40);
    const auto c = convergents(cf.ks);
    return static_cast<double>(c.ps.back()) / static_cast<double>(c.qs.back());
}

struct BuiltMap {
    Map map = Map::rigid(0.5);
    std::optional<ContinuedFraction> target;
    json info;
};

/// "map": {"family": "rigid"|"sine", "K": 0.5, "omega": ..., "tune_quotients": 14, "tune_tol": 1e-10}
/// With no omega the sine map is tuned to the configured rotation.
BuiltMap build_map(const json& cfg) {
    const json m = section(cfg, "map"), rot = section(cfg, "rotation");
    const std::string family = m.value("family", std::string("sine"));
    BuiltMap b;
    b.info["family"] = family;
    if (family == "rigid") {
        const double rho = target_value(rot);
        b.map = Map::rigid(rho);
        b.info["rho"] = rho;
        if (!rot.contains("value")) b.target = target_cf(rot, m.value("target_quotients", std::size_t{30}));
        return b;
    }
    if (family != "sine") throw InvalidParams("map family must be rigid or sine");
    const double K = m.value("K", 0.5);
    if (m.contains("omega")) {
        b.map = Map::sine(m["omega"].get<double>(), K);
        b.info["omega"] = m["omega"];
    } else {
        const auto tq = m.value("tune_quotients", std::size_t{14});
        const auto target = target_cf(rot, 64);
        const auto tr = tune_parameter(K, target, m.value("tune_tol", 1e-10), std::min(tq, target.depth()));
        b.map = Map::sine(tr.omega, K);
        b.target = target;
        b.info["omega"] = tr.omega;
        b.info["tuned_depth"] = tr.depth;
        b.info["bisection_steps"] = tr.bisection_steps;
    }
    b.info["K"] = K;
    return b;
}

ModulusOfContinuity build_moc(const json& cfg) {
    const json m = section(cfg, "modulus");
    return make_moc(m.value("kind", std::string("lipschitz")), m.value("params", std::vector<double>{}));
}

/// "phi": {"kind": "constant"|"power"|"exponential"|"table", "param": x, "values": [...]}
PhiType build_phi(const json& p) {
    const std::string kind = p.value("kind", std::string("constant"));
    if (kind == "constant") return PhiType::constant(p.value("param", 1.0));
    if (kind == "power") return PhiType::power(p.value("param", 1.0));
    if (kind == "exponential") return PhiType::exponential(p.value("param", 2.0));
    if (kind == "table") return PhiType::table(p.at("values").get<std::vector<double>>());
    throw InvalidParams("unknown phi kind '" + kind + "'");
}

// subcommands

void run_cf(Run& r) {
    const json rot = section(r.cfg, "rotation");
    const auto depth = r.cfg.value("depth", std::size_t{20});
    ContinuedFraction cf;
    if (rot.contains("value") && r.extended) {
        cf = cf_expand<float128>(float128(rot["value"].get<double>()), depth);
    } else {
        cf = target_cf(rot, depth);
    }
    r.csv("cf.csv", io::cf_table(cf));
    r.record = io::to_json(cf);
    bool det = true, bound = true;
    for (int n = 0; n < static_cast<int>(cf.depth()); ++n) {
        const auto d = static_cast<__int128>(cf.p(n)) * cf.q(n - 1) - static_cast<__int128>(cf.p(n - 1)) * cf.q(n);
        if (d != ((n % 2 == 0) ? -1 : 1)) det = false;
        if (n + 1 < static_cast<int>(cf.depth()) && n <= cf.max_delta_index()) {
            const double qn = static_cast<double>(cf.q(n)), qn1 = static_cast<double>(cf.q(n + 1));
            if (!(cf.delta(n) / qn < 1.0 / (qn * qn1))) bound = false;
        }
    }
    r.check("determinant identity", det, "p_n q_{n-1} - p_{n-1} q_n = (-1)^{n+1} at every level");
    r.check("approximation bound", bound, "|rho - p_n/q_n| < 1/(q_n q_{n+1})");
    r.note("quotients: " + std::to_string(cf.depth()) + ", q_N = " + std::to_string(cf.qs.back()));
}

void run_rotnum(Run& r) {
    const auto depth = r.cfg.value("depth", std::size_t{20});
    const auto b = build_map(r.cfg);
    RotationOptions opt;
    opt.birkhoff_check = true;
    opt.budget = r.cfg.value("budget", opt.budget);
    RotationResult res;
    if (r.extended) {
        const auto& p = b.map.params();
        const auto m128 = b.map.family() == MapFamily::rigid ? CircleMap<float128>::rigid(float128(p[0]))
                                                             : CircleMap<float128>::sine(float128(p[0]), float128(p[1]));
        res = rotation_number(m128, float128(0), depth, opt);
    } else {
        res = rotation_number(b.map, 0.0, depth, opt);
    }
    io::Table t{{"n", "k_n", "q_n", "p_n"}, {}};
    for (std::size_t i = 0; i < res.q_returns.size(); ++i)
        t.add(i, i >= 1 && i <= res.ks.size() ? io::cell(res.ks[i - 1]) : std::string(), res.q_returns[i],
              res.p_returns[i]);
    r.csv("returns.csv", t);
    r.record = {{"map", b.info}, {"rho", res.rho_est}, {"ks", res.ks}, {"q_returns", res.q_returns},
                {"birkhoff", res.birkhoff ? json(*res.birkhoff) : json(nullptr)}};
    const double gap = res.birkhoff ? std::abs(*res.birkhoff - res.rho_est) : 0.0;
    r.check("closest-return estimate agrees with the Birkhoff average", gap < 1e-4, "difference " + fmt(gap));
    if (b.target) {
        std::size_t match = 0;
        while (match < res.ks.size() && match < b.target->depth() && res.ks[match] == b.target->ks[match]) ++match;
        r.note("quotients matching the target: " + std::to_string(match));
    }
}

void run_crossratio(Run& r) {
    const json s = section(r.cfg, "scan");
    const auto b = build_map(r.cfg);
    const auto spans = geometric_spans(s.value("hi", 1e-1), s.value("lo", 1e-4), s.value("per_decade", 4));
    const double center = s.value("center", 0.2);
    const auto moc = build_moc(r.cfg);
    const auto f = smooth(b.map);
    const auto d = residual_scan_D(f, center, spans, moc);
    const auto x = residual_scan_Dist(f, center, spans, moc);
    r.csv("scan_D.csv", io::scan_table(d));
    r.csv("scan_Dist.csv", io::scan_table(x));
    r.record = {{"map", b.info}, {"D", io::to_json(d)}, {"Dist", io::to_json(x)}};
    r.check("D residual slope in [0.9, 1.1]", d.slope >= 0.9 && d.slope <= 1.1, "slope " + fmt(d.slope));
    r.check("Dist residual slope in [0.9, 1.1]", x.slope >= 0.9 && x.slope <= 1.1, "slope " + fmt(x.slope));
}

void run_denjoy(Run& r) {
    const auto N = r.cfg.value("depth", 14);
    const auto b = build_map(r.cfg);
    const auto moc = build_moc(r.cfg);
    std::optional<ContinuedFraction> rho;
    if (b.target && b.map.family() != MapFamily::rigid)
        rho = target_cf(section(r.cfg, "rotation"), static_cast<std::size_t>(N) + 6);
    const auto rep = denjoy_inequality_report(b.map, moc, N, r.cfg.value("grid", 1024), rho);
    r.csv("denjoy.csv", io::denjoy_table(rep));
    r.csv("identities.csv", io::identity_table(rep));
    r.record = io::to_json(rep);
    r.record["map"] = b.info;
    bool dominates = true;
    for (std::size_t i = 0; i < rep.l.size(); ++i) dominates = dominates && rep.l[i] >= rep.delta[i] * (1 - 1e-9);
    r.check("l_n >= Delta_n", dominates, std::to_string(rep.l.size()) + " levels");
    r.check("lambda_emp <= lambda + 0.02", rep.lambda_emp <= rep.lambda + 0.02,
            fmt(rep.lambda_emp) + " vs " + fmt(rep.lambda));
    r.check("sup|log (T^q_n)'| bounded, no growth over the last 6 levels",
            std::isfinite(rep.max_sup_log_dev) && rep.log_dev_tail_slope <= 0.0,
            "max " + fmt(rep.max_sup_log_dev) + ", tail slope " + fmt(rep.log_dev_tail_slope));
    r.check("sup|(T^q_n)' - 1| / tau_n trend <= 1.5", rep.ratio_trend <= 1.5, "trend " + fmt(rep.ratio_trend));
    r.check("identity residuals < 1e-8", rep.max_identity_residual < 1e-8, fmt(rep.max_identity_residual));
}

void run_conjugate(Run& r) {
    const auto N = r.cfg.value("depth", 16);
    const auto b = build_map(r.cfg);
    ConjugacyOptions opt;
    if (b.target && b.map.family() != MapFamily::rigid)
        opt.rho = target_cf(section(r.cfg, "rotation"), static_cast<std::size_t>(N) + 10);
    opt.probes = r.cfg.value("probes", opt.probes);
    const auto p = conjugate(b.map, 0.0, N, opt);
    r.csv("density.csv", io::density_table(p));
    r.record = io::to_json(p);
    r.record["map"] = b.info;
    r.check("homological residual < 1e-3", p.residual_homological < 1e-3, fmt(p.residual_homological));
    r.check("conjugation residual < 1e-3", p.residual_conjugation < 1e-3, fmt(p.residual_conjugation));
    r.note("orbit length q_N = " + std::to_string(p.M) + ", discrepancy " + fmt(p.discrepancy));
}

void run_integrability(Run& r) {
    const auto phi = build_phi(section(r.cfg, "phi"));
    const auto moc = build_moc(r.cfg);
    const double lambda = r.cfg.value("lambda", 0.8);
    num::LevelPolicy pol;
    pol.panels = r.cfg.value("panels", 1);
    HigherRegularityOptions opt;
    opt.policy = pol;
    opt.use_delta_tilde = r.cfg.value("delta_tilde", false);
    std::vector<std::int64_t> ks;
    if (r.cfg.contains("ks")) ks = r.cfg["ks"].get<std::vector<std::int64_t>>();
    const auto n_max = r.cfg.value("n_max", 60);
    const auto cf = target_cf(section(r.cfg, "rotation"), static_cast<std::size_t>(n_max) + 4);
    const auto rep =
        integrability_report(phi, moc, lambda, ks, r.cfg.value("series_terms", std::size_t{4096}), cf, n_max, opt);
    r.csv("series.csv", io::series_table(rep.series));
    if (rep.higher) {
        r.csv("R.csv", io::r_table(*rep.higher));
        r.csv("varpi_tilde.csv", io::varpi_tilde_table(*rep.higher));
    }
    r.record = io::to_json(rep);
    r.record["phi"] = phi.name();
    r.record["modulus"] = moc.name();
    r.record["lambda"] = lambda;
    r.note("main integral: " + std::string(to_string(rep.main.verdict)) +
           (rep.main.verdict == Verdict::finite ? " = " + fmt(rep.main.value, 10) : ""));
    r.note("series: " + std::string(to_string(rep.series.verdict)) + ", case " + to_string(rep.tag));
    r.check("main, series and case verdicts agree", rep.verdicts_agree,
            rep.reduced ? "reduced " + std::string(to_string(rep.reduced->verdict)) : "no reduction");
    if (r.cfg.value("matrix", false)) {
        const auto cases = reference_cases();
        std::vector<IntegrabilityReport> reps;
        std::size_t right = 0;
        for (const auto& c : cases) {
            reps.push_back(integrability_report(c.phi, c.moc, c.lambda, {}, 4096, std::nullopt, 0, opt));
            right += reps.back().verdicts_agree && reps.back().main.verdict == c.expected;
        }
        r.csv("matrix.csv", io::matrix_table(cases, reps));
        r.check("reference matrix verdicts", right == cases.size(),
                std::to_string(right) + " of " + std::to_string(cases.size()));
    }
    if (rep.higher) {
        r.check("R(n) nonincreasing", rep.higher->nonincreasing, "R(n_max)/R(0) = " + fmt(rep.higher->vanishing_ratio));
        if (rep.higher->beta) r.note("predicted Holder exponent of the conjugacy derivative: " + fmt(*rep.higher->beta));
    }
}

void run_appendix(Run& r) {
    const json a = section(r.cfg, "appendix");
    const auto seqs = a.value("sequences", std::size_t{10000});
    const auto len = a.value("length", std::size_t{2048});
    std::vector<double> sq(len), slow(len);
    for (std::size_t n = 1; n <= len; ++n) {
        sq[n - 1] = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
        slow[n - 1] = 1.0 / ((n + 2.0) * std::log(n + 2.0));
    }
    const double tol = a.value("tail_tol", 0.05);
    const auto A = kn_monte_carlo(sq, seqs, r.seed, tol);
    const auto B = kn_monte_carlo(slow, seqs, r.seed, tol);
    io::Table t{{"checkpoint", "median_summable", "median_divergent"}, {}};
    for (std::size_t i = 0; i < A.checkpoints.size(); ++i) t.add(A.checkpoints[i], A.median_partial[i], B.median_partial[i]);
    r.csv("appendix.csv", t);
    r.record = {{"summable", io::to_json(A)}, {"divergent", io::to_json(B)}};
    r.check("K_n = n^-2: >= 99% converged", A.converged_fraction >= 0.99, fmt(100 * A.converged_fraction) + "%");
    r.check("K_n = 1/((n+2) log(n+2)): medians increase over the last three checkpoints", B.medians_increase,
            fmt(B.median_partial[B.median_partial.size() - 3]) + " < " +
                fmt(B.median_partial[B.median_partial.size() - 2]) + " < " + fmt(B.median_partial.back()));
}

std::string error_kind(const std::exception& e) {
    const std::string what = e.what();
    const auto colon = what.find(':');
    return dynamic_cast<const Error*>(&e) && colon != std::string::npos ? what.substr(0, colon) : "Exception";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"circleconj: continued fractions, circle maps, Denjoy estimates, conjugacy and integrability"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, out_dir = "out", precision = "standard";
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "random seed (overrides the config)");
    app.add_option("--precision", precision, "standard | extended")->check(CLI::IsMember({"standard", "extended"}));

    const std::map<std::string, std::pair<std::string, std::function<void(Run&)>>> commands = {
        {"cf", {"continued fraction expansion and convergents", run_cf}},
        {"rotnum", {"rotation number by closest returns", run_rotnum}},
        {"crossratio", {"distortion residual scans", run_crossratio}},
        {"denjoy", {"Denjoy-type inequality report", run_denjoy}},
        {"conjugate", {"invariant density and conjugacy", run_conjugate}},
        {"integrability", {"integrability condition, series and R(n)", run_integrability}},
        {"appendix", {"Gauss-Kuzmin Monte Carlo for sum k_n K_n", run_appendix}},
    };
    for (const auto& [name, c] : commands) app.add_subcommand(name, c.first);
    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    Run r;
    r.out = out_dir;
    std::error_code ec;
    fs::create_directories(r.out, ec);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw InvalidParams("cannot read config " + config_path);
            r.cfg = json::parse(f);
        } else {
            r.cfg = json::object();
        }
        if (seed) r.cfg["seed"] = *seed;
        if (precision != "standard" || !r.cfg.contains("precision")) r.cfg["precision"] = precision;
        r.seed = r.cfg.value("seed", std::uint64_t{1});
        r.extended = r.cfg["precision"] == "extended";
        commands.at(sub).second(r);
    } catch (const std::exception& e) {
        json err = {{"subcommand", sub}, {"error", error_kind(e)}, {"message", e.what()}};
        io::write_json(r.out / "error.json", err);
        std::cerr << sub << ": " << e.what() << "\n";
        return 2;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.record["subcommand"] = sub;
    r.record["config"] = r.cfg;
    io::write_json(r.out / (sub + ".json"), r.record);

    std::ostringstream s;
    s << "circleconj " << sub << "\n";
    s << "precision " << r.cfg["precision"].get<std::string>() << ", seed " << r.seed << "\n\n";
    for (const auto& l : r.lines) s << l << "\n";
    s << "\n" << (r.all_pass ? "all checks passed" : "some checks failed") << " in " << fmt(secs, 3) << " s\n";
    io::write_text(r.out / "summary.txt", s.str());
    std::cout << s.str();
    return 0;
}
