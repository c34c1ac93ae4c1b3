#include "nld/runner.hpp"

#include "nld/counterexamples.hpp"
#include "nld/dirichlet.hpp"
#include "nld/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

using nlohmann::json;

namespace nld {

namespace {

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
            throw std::invalid_argument(where + ": unknown key '" + it.key() + "'");
}

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw std::invalid_argument(where + ": missing key '" + std::string(key) + "'");
    return j.at(key);
}

Point to_point(const json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.empty() || int(v.size()) > kMaxDim) throw std::invalid_argument("point: bad dimension");
    return Point::from(v);
}

json point_json(const Point& p) {
    json a = json::array();
    for (int i = 0; i < p.dim; ++i) a.push_back(p[i]);
    return a;
}

std::string csv_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

McConfig mc_from(const json& cfg, const Overrides& ov) {
    McConfig mc = cfg.contains("mc") ? mc_config_from_json(cfg.at("mc")) : McConfig{};
    if (ov.seed) mc.seed = *ov.seed;
    if (ov.threads) mc.threads = *ov.threads;
    return mc;
}

Artifacts run_solve(const json& cfg, const Overrides& ov) {
    only_keys(cfg, {"subcommand", "model", "domain", "f", "g", "points", "mc"}, "solve");
    const LevyModel model = model_from_json(need(cfg, "model", "solve"));
    const Domain dom = cfg.contains("domain") ? domain_from_json(cfg.at("domain")) : Domain::unit_ball(model.dim());
    const FieldFunction f = make_field(cfg.value("f", json(0.0)), model.dim());
    const FieldFunction g = make_field(cfg.value("g", json(0.0)), model.dim());
    const McConfig mc = mc_from(cfg, ov);
    std::vector<Point> pts;
    for (const auto& p : need(cfg, "points", "solve")) pts.push_back(to_point(p));
    if (pts.empty()) throw std::invalid_argument("solve: 'points' is empty");

    Artifacts a;
    json results = json::array();
    std::ostringstream csv;
    for (int i = 0; i < model.dim(); ++i) csv << "x" << i << ",";
    csv << "value,std_error,n_samples\n";
    for (const Point& x : pts) {
        if (x.dim != model.dim()) throw std::invalid_argument("solve: point dimension differs from the model");
        const McEstimate e = solve_dirichlet(model, dom, f, g, x, mc);
        json r = e;
        r["x"] = point_json(x);
        results.push_back(r);
        for (int i = 0; i < x.dim; ++i) csv << csv_number(x[i]) << ",";
        csv << csv_number(e.value) << "," << csv_number(e.std_error) << "," << e.n_samples << "\n";
    }
    a.report = {{"model", model}, {"domain", dom}, {"f", f.name}, {"g", g.name}, {"mc", mc}, {"results", results}};
    a.csv = csv.str();
    return a;
}

Artifacts run_kernel(const json& cfg, const Overrides&) {
    only_keys(cfg, {"subcommand", "model", "r", "force_numeric", "growth_check"}, "kernel");
    const LevyModel model = model_from_json(need(cfg, "model", "kernel"));
    ProfileOptions po;
    po.force_numeric = cfg.value("force_numeric", false);
    const KernelProfile p = potential_profile(model, po);
    std::vector<double> rs = cfg.contains("r") ? cfg.at("r").get<std::vector<double>>()
                                               : std::vector<double>{0.05, 0.1, 0.25, 0.5, 1.0, 2.0};
    for (double r : rs)
        if (!(r > 0.0)) throw std::invalid_argument("kernel: radii must be positive");

    Artifacts a;
    std::ostringstream csv;
    csv << "r,G,dG,d2G,S\n";
    json rows = json::array();
    for (double r : rs) {
        const double v[4] = {p.g(r), p.g1(r), p.g2(r), p.S(r)};
        rows.push_back({{"r", r}, {"G", v[0]}, {"dG", v[1]}, {"d2G", v[2]}, {"S", v[3]}});
        csv << csv_number(r);
        for (double x : v) csv << "," << csv_number(x);
        csv << "\n";
    }
    a.report = {{"model", model},
                {"kernel_case", to_string(p.kernel_case)},
                {"compensation_point", point_json(p.x0)},
                {"closed_form", p.closed_form},
                {"gradient_branch", to_string(p.branch)},
                {"gradient_integral", p.gradient_integral},
                {"gradient_verdict", quad::to_string(p.gradient_verdict)},
                {"label", p.label},
                {"values", rows}};
    if (cfg.value("growth_check", false)) {
        std::vector<double> grid;
        for (double r = 0.9 * std::min(1.0, p.r0); r > 1e-3; r *= 0.7) grid.push_back(r);
        const auto g = verify_growth_G(p, grid);
        a.report["growth"] = {{"passes", g.passes}, {"kappa", g.kappa}, {"diagnosis", g.diagnosis}};
    }
    a.csv = csv.str();
    return a;
}

std::string dini_csv(const DiniReport& d) {
    std::ostringstream csv;
    csv << "t,integrand\n";
    for (std::size_t i = 0; i < d.t.size(); ++i) csv << csv_number(d.t[i]) << "," << csv_number(d.integrand[i]) << "\n";
    return csv.str();
}

Artifacts run_dini(const json& cfg, const Overrides&) {
    only_keys(cfg, {"subcommand", "model", "weight", "modulus", "field", "domain", "upper"}, "dini-check");
    const double upper = cfg.value("upper", 0.5);
    Artifacts a;
    if (cfg.contains("field")) {
        if (cfg.contains("modulus") || cfg.contains("weight"))
            throw std::invalid_argument("dini-check: 'field' excludes 'modulus' and 'weight'");
        const LevyModel model = model_from_json(need(cfg, "model", "dini-check"));
        const Domain dom = cfg.contains("domain") ? domain_from_json(cfg.at("domain")) : Domain::unit_ball(model.dim());
        const FieldFunction f = make_field(cfg.at("field"), model.dim());
        const RegularityReport rep = classify_regularity(model, potential_profile(model), f, dom);
        a.report = {{"model", model}, {"domain", dom}, {"field", f.name}, {"regularity", rep}};
        a.csv = dini_csv(rep.dini);
        return a;
    }
    const ModulusSpec omega = modulus_from_json(need(cfg, "modulus", "dini-check"));
    if (cfg.contains("model") == cfg.contains("weight"))
        throw std::invalid_argument("dini-check: give exactly one of 'model' and 'weight'");
    std::function<double(double)> s_eff;
    DiniBranch branch = DiniBranch::FieldModulus;
    json head;
    if (cfg.contains("model")) {
        const LevyModel model = model_from_json(cfg.at("model"));
        const KernelProfile p = potential_profile(model);
        s_eff = effective_weight(p);
        branch = select_branch(p);
        head["model"] = model;
    } else {
        const json& w = cfg.at("weight");
        only_keys(w, {"power", "scale"}, "dini-check.weight");
        const double c = need(w, "power", "dini-check.weight").get<double>();
        const double k = w.value("scale", 1.0);
        if (!(k > 0.0)) throw std::invalid_argument("dini-check.weight: scale must be positive");
        s_eff = [c, k](double t) { return k * std::pow(t, c); };
        head["weight"] = w;
    }
    DiniReport rep = dini_integral(s_eff, omega, upper);
    rep.branch = branch;
    head["modulus"] = omega;
    head["dini"] = rep;
    a.report = head;
    a.csv = dini_csv(rep);
    return a;
}

Artifacts run_counterexample(const json& cfg, const Overrides&) {
    only_keys(cfg, {"subcommand", "alpha", "dim", "beta", "corrected", "h"}, "counterexample");
    const double alpha = need(cfg, "alpha", "counterexample").get<double>();
    const int dim = need(cfg, "dim", "counterexample").get<int>();
    const bool corrected = cfg.value("corrected", false);
    const double beta = cfg.value("beta", corrected ? 2.0 : 0.5);
    const auto hs = cfg.contains("h") ? cfg.at("h").get<std::vector<double>>() : default_h_sequence();
    ProbeCurve curve = counterexample_curve(alpha, dim, corrected, beta, hs);
    const ProbeReport rep = divergence_fit(curve);
    Artifacts a;
    a.report = {{"alpha", alpha}, {"dim", dim}, {"corrected", corrected}, {"beta", beta}, {"curve", curve}, {"fit", rep}};
    std::ostringstream csv;
    csv << "h,D\n";
    for (std::size_t i = 0; i < curve.h.size(); ++i) csv << csv_number(curve.h[i]) << "," << csv_number(curve.value[i]) << "\n";
    a.csv = csv.str();
    return a;
}

Artifacts run_exit_sim(const json& cfg, const Overrides& ov) {
    only_keys(cfg, {"subcommand", "alpha", "dim", "radius", "x", "n_samples", "seed", "method"}, "exit-sim");
    const double alpha = need(cfg, "alpha", "exit-sim").get<double>();
    const int dim = need(cfg, "dim", "exit-sim").get<int>();
    const double r = cfg.value("radius", 1.0);
    const Point x = cfg.contains("x") ? to_point(cfg.at("x")) : Point(dim);
    const long n = cfg.value("n_samples", 10000L);
    const std::uint64_t seed = ov.seed ? *ov.seed : cfg.value("seed", std::uint64_t{1});
    const std::string method = cfg.value("method", std::string("rejection"));
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("exit-sim: alpha must lie in (0, 2)");
    if (dim < 1 || dim > kMaxDim || x.dim != dim) throw std::invalid_argument("exit-sim: bad dimension");
    if (!(r > 0.0) || !(norm(x) < r)) throw std::invalid_argument("exit-sim: need |x| < radius");
    if (n < 2) throw std::invalid_argument("exit-sim: n_samples must be >= 2");
    if (method != "rejection" && method != "wos") throw std::invalid_argument("exit-sim: method must be 'rejection' or 'wos'");

    std::vector<Point> z(static_cast<std::size_t>(n));
    run_walks(n, seed, ov.threads.value_or(1), [&](long i, Stream& rng) {
        z[std::size_t(i)] = method == "wos" ? sample_exit_ball_wos(alpha, dim, r, x, rng) : sample_exit_ball(alpha, dim, r, x, rng);
        return 0.0;
    });
    std::vector<double> radii(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) radii[i] = norm(z[i]);
    std::vector<double> sorted = radii;
    std::sort(sorted.begin(), sorted.end());

    Artifacts a;
    a.report = {{"alpha", alpha}, {"dim", dim}, {"radius", r}, {"x", point_json(x)}, {"n_samples", n}, {"seed", seed},
                {"method", method}, {"acceptance_rate", exit_acceptance_rate(alpha, dim, r, x)},
                {"median_radius", sorted[sorted.size() / 2]}};
    if (norm(x) == 0.0 || dim <= 2) {
        const auto cdf = exit_radius_cdf(alpha, dim, r, norm(x), sorted);
        const auto ks = ks_test_sorted(cdf);
        a.report["ks"] = {{"statistic", ks.statistic}, {"p_value", ks.p_value}};
    }
    std::ostringstream csv;
    for (int i = 0; i < dim; ++i) csv << "z" << i << ",";
    csv << "radius\n";
    for (std::size_t k = 0; k < z.size(); ++k) {
        for (int i = 0; i < dim; ++i) csv << csv_number(z[k][i]) << ",";
        csv << csv_number(radii[k]) << "\n";
    }
    a.csv = csv.str();
    return a;
}

}  // namespace

std::vector<std::string> subcommands() { return {"solve", "kernel", "dini-check", "counterexample", "exit-sim"}; }

Artifacts run(const std::string& sub, const json& cfg, const Overrides& ov) {
    if (!cfg.is_object()) throw std::invalid_argument("config: expected a JSON object");
    if (cfg.contains("subcommand") && cfg.at("subcommand") != sub)
        throw std::invalid_argument("config: subcommand mismatch");
    if (ov.threads && *ov.threads < 1) throw std::invalid_argument("threads must be >= 1");
    try {
        Artifacts a;
        if (sub == "solve") a = run_solve(cfg, ov);
        else if (sub == "kernel") a = run_kernel(cfg, ov);
        else if (sub == "dini-check") a = run_dini(cfg, ov);
        else if (sub == "counterexample") a = run_counterexample(cfg, ov);
        else if (sub == "exit-sim") a = run_exit_sim(cfg, ov);
        else throw std::invalid_argument("unknown subcommand '" + sub + "'");
        json echo = cfg;
        if (ov.seed) echo["seed_override"] = *ov.seed;
        a.report["subcommand"] = sub;
        a.report["config"] = echo;
        return a;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

}  // namespace nld
