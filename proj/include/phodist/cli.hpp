#pragma once
// Command-line front end. Every subcommand writes key-sorted JSON (or CSV
// where tabular), with doubles cut to 12 significant digits.
// Exit codes: 0 ok, 2 invalid input, 3 budget exceeded, 4 golden mismatch.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "closed_form.hpp"
#include "distill.hpp"
#include "haar.hpp"
#include "loss.hpp"
#include "orbits.hpp"
#include "patterns.hpp"
#include "unitary.hpp"

namespace phodist::cli {

using json = nlohmann::json;

enum ExitCode { kOk = 0, kInvalid = 2, kBudget = 3, kMismatch = 4 };

struct RunConfig {
    std::string subcommand;
    std::string spec;
    std::string model = "obb";
    std::optional<double> eps;
    double lambda = 0;
    std::uint64_t seed = 0;
    std::vector<double> fractions{0.05, 0.1, 0.3, 1.0};
    bool symmetry = true;
    int threads = 1;
    std::string out;
    std::string format = "json";
    bool long_suite = false;
    std::optional<int> max_n;
    std::string golden;
    std::vector<std::string> candidates;
    int n = 0;
    std::optional<int> k;
    bool diff_ztl = false;
    bool exact = false;
    bool by_weight = false;
};

inline double round12(double x) {
    if (!std::isfinite(x)) return x;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

inline json num(double x) { return round12(x); }

inline json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

inline int desk_limit(const RunConfig& c) {
    if (c.max_n) return *c.max_n;
    return c.long_suite ? 12 : 8;
}

inline RateOptions rate_options(const RunConfig& c) {
    RateOptions o;
    o.use_symmetry = c.symmetry;
    o.threads = c.threads;
    o.max_n = desk_limit(c);
    return o;
}

inline json poly_json(const RatePolynomial& p) {
    json j;
    j["n"] = p.n;
    j["spec"] = p.spec.to_string();
    j["model"] = p.model.to_string();
    j["h_k"] = nums(p.h_k);
    j["ebar_k"] = nums(p.ebar_k);
    if (!p.c_k.empty()) j["c_k"] = nums(p.c_k);
    return j;
}

// Published coefficient file: {"entries": [{"spec", "model", "h_k", "ebar_k", ...}]}
inline json load_golden(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("golden: cannot open " + path);
    return json::parse(in);
}

inline std::optional<RatePolynomial> golden_polynomial(const json& golden, const UnitarySpec& spec, const ErrorModel& model) {
    for (const auto& e : golden.at("entries")) {
        if (e.at("spec").get<std::string>() == spec.to_string() && e.at("model").get<std::string>() == model.to_string()) {
            RatePolynomial p;
            p.n = e.at("n").get<int>();
            p.spec = spec;
            p.model = model;
            p.h_k = e.at("h_k").get<std::vector<double>>();
            p.ebar_k = e.at("ebar_k").get<std::vector<double>>();
            return p;
        }
    }
    return std::nullopt;
}

// Simulated polynomial, or the published one when n is beyond the desk limit and a golden file is given.
inline RatePolynomial polynomial_for(const RunConfig& c, const UnitarySpec& spec, const ErrorModel& model,
                                     const json* golden, std::string* source) {
    validate_protocol(spec);
    if (golden && spec.size() > desk_limit(c)) {
        if (auto p = golden_polynomial(*golden, spec, model)) {
            if (source) *source = "golden";
            return *p;
        }
    }
    if (source) *source = "simulated";
    RateEngine eng(build(spec));
    return rate_polynomials(eng, model, rate_options(c));
}

// "fourier:3-16" expands to fourier:3 ... fourier:16
inline std::vector<std::string> expand_candidates(const std::vector<std::string>& in) {
    std::vector<std::string> out;
    for (const auto& s : in) {
        auto colon = s.find(':');
        auto dash = s.find('-', colon == std::string::npos ? 0 : colon);
        if (colon != std::string::npos && dash != std::string::npos && s.find(',') == std::string::npos) {
            int a = std::stoi(s.substr(colon + 1, dash - colon - 1)), b = std::stoi(s.substr(dash + 1));
            for (int v = a; v <= b; ++v) out.push_back(s.substr(0, colon + 1) + std::to_string(v));
        } else {
            out.push_back(s);
        }
    }
    return out;
}

struct Output {
    json doc;
    std::string text;  // preformatted body (CSV or JSON lines) when non-empty
};

inline Output cmd_rates(const RunConfig& c) {
    auto spec = parse_spec(c.spec);
    auto p = polynomial_for(c, spec, parse_model(c.model), nullptr, nullptr);
    Output o{poly_json(p), {}};
    if (c.format == "csv") {
        std::ostringstream os;
        os.precision(12);
        os << "k,h_k,ebar_k\n";
        for (int k = 0; k <= p.n; ++k) os << k << ',' << p.h_k[k] << ',' << p.ebar_k[k] << '\n';
        o.text = os.str();
    }
    return o;
}

inline Output cmd_threshold(const RunConfig& c) {
    auto spec = parse_spec(c.spec);
    auto model = parse_model(c.model);
    json golden;
    bool have_golden = !c.golden.empty();
    if (have_golden) golden = load_golden(c.golden);
    std::string source;
    auto p = polynomial_for(c, spec, model, have_golden ? &golden : nullptr, &source);
    json j;
    j["spec"] = spec.to_string();
    j["model"] = model.to_string();
    j["n"] = p.n;
    j["source"] = source;
    try {
        j["threshold"] = num(distillation_threshold(p));
    } catch (const NoThreshold&) {
        j["threshold"] = nullptr;
    }
    j["one_over_n"] = num(1.0 / p.n);
    return {j, {}};
}

inline Output cmd_optimal_n(const RunConfig& c) {
    if (!c.eps) throw std::invalid_argument("optimal-n: --eps is required");
    auto model = parse_model(c.model);
    json golden;
    bool have_golden = !c.golden.empty();
    if (have_golden) golden = load_golden(c.golden);
    std::vector<RatePolynomial> polys;
    json rows = json::array();
    for (const auto& s : expand_candidates(c.candidates)) {
        std::string source;
        polys.push_back(polynomial_for(c, parse_spec(s), model, have_golden ? &golden : nullptr, &source));
        json r;
        r["spec"] = polys.back().spec.to_string();
        r["error"] = num(eval_error(polys.back(), *c.eps));
        r["heralding"] = num(eval_heralding(polys.back(), *c.eps));
        r["source"] = source;
        rows.push_back(r);
    }
    if (polys.empty()) throw std::invalid_argument("optimal-n: --candidates is empty");
    std::size_t best = optimal_n(*c.eps, polys);
    json j;
    j["eps"] = num(*c.eps);
    j["model"] = model.to_string();
    j["candidates"] = rows;
    j["optimal"] = polys[best].spec.to_string();
    return {j, {}};
}

inline Output cmd_patterns(const RunConfig& c) {
    auto spec = parse_spec(c.spec);
    validate_protocol(spec);
    if (spec.size() > desk_limit(c)) throw BudgetExceeded("patterns: n exceeds the desk limit");
    std::ostringstream os;
    json j;
    j["spec"] = spec.to_string();
    if (c.diff_ztl) {
        if (spec.kind != SpecKind::Fourier) throw std::invalid_argument("patterns: --diff-ztl needs a fourier spec");
        auto rep = verify_prime_power_law(spec.size());
        json ex = json::array();
        for (const auto& s : rep.exceptions) {
            json line;
            line["pattern"] = s;
            line["prob"] = 0.0;
            os << line.dump() << '\n';
            ex.push_back(s);
        }
        j["exceptions"] = ex;
        j["total_ztl_s0_1"] = rep.total_ztl_s0_1;
        j["ideal"] = rep.ideal;
    } else {
        auto set = enumerate_ideal_patterns(build(spec));
        json members = json::array();
        for (const auto& [s, a] : set.members) {
            json line;
            line["pattern"] = s;
            line["amp_re"] = num(a.real());
            line["amp_im"] = num(a.imag());
            line["prob"] = num(std::norm(a));
            os << line.dump() << '\n';
            members.push_back(line);
        }
        j["patterns"] = members;
    }
    return {j, os.str()};
}

inline Output cmd_herald0(const RunConfig& c) {
    if (c.n < 3) throw std::invalid_argument("herald0: --n must be >= 3");
    auto cf = ideal_heralding_closed_form(c.n);
    json j;
    j["n"] = c.n;
    j["h0"] = num(cf.value);
    j["h0_minus_quarter"] = num(cf.minus_quarter);
    j["asymptote_1_over_16n"] = num(1.0 / (16.0 * c.n));
    if (c.exact) {
        auto q = cf.exact();
        j["exact"] = q.get_str();
    }
    return {j, {}};
}

inline Output cmd_loss(const RunConfig& c) {
    auto spec = parse_spec(c.spec);
    validate_protocol(spec);
    auto model = parse_model(c.model);
    const double eps = c.eps.value_or(0.0);
    LossParams lp{c.lambda};
    json j;
    j["spec"] = spec.to_string();
    j["model"] = model.to_string();
    j["eps"] = num(eps);
    j["lambda"] = num(c.lambda);
    j["Lambda"] = num(lp.Lambda(spec.size()));
    j["Lambda_assumption"] = spec.kind == SpecKind::Hadamard ? "beamsplitter depth log2(n)"
                                                               : "log2(n) depth assumed for simplicity";
    if (spec.size() > desk_limit(c)) {
        if (eps != 0) throw BudgetExceeded("loss: n beyond the desk limit is only supported at eps = 0");
        auto est = lossy_resource_estimate_ideal(spec.size(), lp);
        j["source"] = "closed_form";
        j["heralding"] = num(1.0 / est.expected_runs);
        j["expected_runs"] = num(est.expected_runs);
        j["expected_photons"] = num(est.expected_photons);
        return {j, {}};
    }
    RateEngine eng(build(spec));
    auto p = loss_polynomial(eng, model, rate_options(c));
    j["source"] = "simulated";
    j["c_n"] = num(c_n(p, eps));
    j["heralding"] = num(lossy_heralding(p, eps, lp));
    j["heralding_bound"] = num(lossy_heralding_bound(p, eps, lp));
    j["fidelity"] = num(output_fidelity(p, eps, lp));
    auto est = lossy_resource_estimate(p, eps, lp);
    j["expected_runs"] = num(est.expected_runs);
    j["expected_photons"] = num(est.expected_photons);
    return {j, {}};
}

inline Output cmd_haar(const RunConfig& c) {
    auto rep = top_k_distillation(c.n, c.seed, c.fractions, c.by_weight ? FractionBasis::Weight : FractionBasis::Count);
    json j;
    j["n"] = rep.n;
    j["seed"] = rep.seed;
    j["h0_analytic"] = num(rep.h0_analytic);
    j["h0_empirical"] = num(rep.h0_empirical);
    j["p_ideal"] = num(rep.p_ideal);
    j["p_err"] = num(rep.p_err);
    j["p_star_estimate"] = num(rep.p_star);
    j["p_max_observed"] = num(rep.p_max);
    json curve = json::array();
    std::ostringstream os;
    os.precision(12);
    os << "fraction,selected,heralding,error_ratio,analytic_heralding\n";
    for (const auto& pt : rep.top_k_curve) {
        json r;
        r["fraction"] = num(pt.fraction);
        r["selected"] = pt.selected;
        r["weight_fraction"] = num(pt.weight_fraction);
        r["heralding"] = num(pt.heralding);
        r["error_ratio"] = num(pt.error_ratio);
        r["analytic_heralding"] = num(pt.analytic_heralding);
        curve.push_back(r);
        os << pt.fraction << ',' << pt.selected << ',' << pt.heralding << ',' << pt.error_ratio << ','
           << pt.analytic_heralding << '\n';
    }
    j["top_k_curve"] = curve;
    j["fraction_basis"] = c.by_weight ? "weight" : "count";
    if (c.n <= 7) {
        auto pt = porter_thomas_check(c.n, c.seed);
        json q;
        q["statistic"] = num(pt.statistic);
        q["dof"] = pt.dof;
        q["p_value"] = num(pt.p_value);
        q["mean_times_d"] = num(pt.mean_times_d);
        q["fraction_above_mean"] = num(pt.fraction_above_mean);
        j["porter_thomas"] = q;
    }
    return {j, c.format == "csv" ? os.str() : std::string{}};
}

inline Output cmd_orbits(const RunConfig& c) {
    auto spec = parse_spec(c.spec);
    const int n = spec.size();
    json j;
    j["spec"] = spec.to_string();
    j["classes_total"] = c.symmetry ? count_orbit_classes(spec) : (std::size_t(1) << n);
    json per_k = json::array();
    for (int k = 0; k <= n; ++k) {
        if (c.k && *c.k != k) continue;
        auto orbs = error_orbits(spec, k, c.symmetry);
        json r;
        r["k"] = k;
        r["classes"] = orbs.size();
        if (c.k) {
            json reps = json::array();
            for (const auto& o : orbs) reps.push_back({{"positions", o.error_positions}, {"multiplicity", o.multiplicity}});
            r["representatives"] = reps;
        }
        per_k.push_back(r);
    }
    j["per_k"] = per_k;
    return {j, {}};
}

struct VerifyResult {
    json doc;
    bool all_pass = true;
};

inline VerifyResult verify_golden(const RunConfig& c, std::ostream& log) {
    if (c.golden.empty()) throw std::invalid_argument("verify: --golden is required");
    json golden = load_golden(c.golden);
    const double tol = golden.value("tolerance", 5e-6);
    const int limit = desk_limit(c);
    VerifyResult vr;
    json rows = json::array();
    std::string cached_spec;
    std::optional<RateEngine> eng;
    for (const auto& e : golden.at("entries")) {
        const int n = e.at("n").get<int>();
        if (n > limit) continue;
        auto spec = parse_spec(e.at("spec").get<std::string>());
        auto model = parse_model(e.at("model").get<std::string>());
        if (spec.to_string() != cached_spec) {
            eng.emplace(build(spec));
            cached_spec = spec.to_string();
        }
        RateOptions opt = rate_options(c);
        auto p = rate_polynomials(*eng, model, opt);
        auto h = e.at("h_k").get<std::vector<double>>();
        auto b = e.at("ebar_k").get<std::vector<double>>();
        double dev = 0;
        if (h.size() != p.h_k.size() || b.size() != p.ebar_k.size()) dev = 1;
        else
            for (std::size_t k = 0; k < h.size(); ++k) dev = std::max({dev, std::abs(h[k] - p.h_k[k]), std::abs(b[k] - p.ebar_k[k])});
        bool pass = dev <= tol;
        vr.all_pass = vr.all_pass && pass;
        log << (pass ? "match    " : "MISMATCH ") << spec.to_string() << ' ' << model.to_string() << " max_abs_dev=" << dev << '\n';
        rows.push_back({{"spec", spec.to_string()}, {"model", model.to_string()}, {"max_abs_dev", num(dev)}, {"pass", pass}});
    }
    vr.doc["entries"] = rows;
    vr.doc["tolerance"] = tol;
    vr.doc["max_n"] = limit;
    vr.doc["all_pass"] = vr.all_pass;
    return vr;
}

inline Output cmd_conjectures(const RunConfig& c) {
    auto spec = parse_spec(c.spec);
    auto model = parse_model(c.model);
    auto p = polynomial_for(c, spec, model, nullptr, nullptr);
    auto rep = conjecture_probe(p);
    json items = json::array();
    for (const auto& it : rep.items)
        items.push_back({{"name", it.name}, {"holds", it.holds}, {"worst_margin", num(it.worst_margin)}, {"detail", it.detail}});
    auto mono = ideal_heralding_monotone(5, std::max(6, 2 * p.n));
    items.push_back({{"name", mono.name}, {"holds", mono.holds}, {"worst_margin", num(mono.worst_margin)}, {"detail", mono.detail}});
    json j;
    j["spec"] = spec.to_string();
    j["model"] = model.to_string();
    j["probes"] = items;
    j["prime_power_spec"] = spec.kind == SpecKind::Hadamard || (spec.kind == SpecKind::Fourier && is_prime_power(spec.size()));
    return {j, {}};
}

inline void emit(const RunConfig& c, const Output& o, std::ostream& out) {
    std::string body = o.text.empty() ? o.doc.dump(2) + "\n" : o.text;
    if (c.out.empty()) {
        out << body;
    } else {
        std::ofstream f(c.out);
        if (!f) throw std::invalid_argument("cannot write " + c.out);
        f << body;
    }
}

inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    try {
        if (c.format != "json" && c.format != "csv") throw std::invalid_argument("--format must be json or csv");
        if (c.format == "csv" && c.subcommand != "rates" && c.subcommand != "haar")
            throw std::invalid_argument("--format csv is available for rates and haar only");
        if (c.threads < 1) throw std::invalid_argument("--threads must be >= 1");
        const std::string& s = c.subcommand;
        if (s == "verify") {
            auto vr = verify_golden(c, err);
            emit(c, {vr.doc, {}}, out);
            return vr.all_pass ? kOk : kMismatch;
        }
        Output o;
        if (s == "rates") o = cmd_rates(c);
        else if (s == "threshold") o = cmd_threshold(c);
        else if (s == "optimal-n") o = cmd_optimal_n(c);
        else if (s == "patterns") o = cmd_patterns(c);
        else if (s == "herald0") o = cmd_herald0(c);
        else if (s == "loss") o = cmd_loss(c);
        else if (s == "haar") o = cmd_haar(c);
        else if (s == "orbits") o = cmd_orbits(c);
        else if (s == "conjectures") o = cmd_conjectures(c);
        else throw std::invalid_argument("unknown subcommand '" + s + "'");
        emit(c, o, out);
        return kOk;
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << '\n';
        return kBudget;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalid;
    }
}

// Parses argv into a RunConfig; returns an exit code when parsing ends the run.
inline std::optional<int> parse(int argc, const char* const* argv, RunConfig& c, std::ostream& out, std::ostream& err) {
    CLI::App app{"n-photon distillation protocol simulator"};
    app.require_subcommand(1);
    std::string symmetry = "on";
    auto common = [&](CLI::App* sub) {
        sub->add_option("--threads", c.threads, "worker threads (default: hardware parallelism)")
            ->default_val(std::max(1u, std::thread::hardware_concurrency()));
        sub->add_option("--out", c.out, "output file (default: stdout)");
        sub->add_option("--format", c.format, "json or csv")->default_val("json");
        sub->add_flag("--long", c.long_suite, "unlock n > 8");
        sub->add_option("--max-n", c.max_n, "desk-limit override");
        sub->add_option("--symmetry", symmetry, "orbit reduction on|off")->default_val("on");
    };
    auto with_spec = [&](CLI::App* sub, bool required) {
        auto* o = sub->add_option("--spec", c.spec, "fourier:N | hadamard:R | ftuple:N1,N2,... | haar:N:seed=S | custom:FILE");
        if (required) o->required();
    };
    auto with_model = [&](CLI::App* sub) { sub->add_option("--model", c.model, "obb | sbb | urs:R")->default_val("obb"); };

    auto* rates = app.add_subcommand("rates", "rate polynomial coefficients");
    with_spec(rates, true), with_model(rates), common(rates);
    auto* thr = app.add_subcommand("threshold", "distillation threshold");
    with_spec(thr, true), with_model(thr), common(thr);
    thr->add_option("--golden", c.golden, "published coefficients for n beyond the desk limit");
    auto* opt = app.add_subcommand("optimal-n", "protocol size with the lowest output error");
    with_model(opt), common(opt);
    opt->add_option("--eps", c.eps, "input error rate")->required();
    opt->add_option("--candidates", c.candidates, "specs, e.g. fourier:3-16")->required();
    opt->add_option("--golden", c.golden, "published coefficients for n beyond the desk limit");
    auto* pat = app.add_subcommand("patterns", "ideal patterns as JSON lines");
    with_spec(pat, true), common(pat);
    pat->add_flag("--diff-ztl", c.diff_ztl, "list patterns allowed by the ZTL but suppressed");
    auto* h0 = app.add_subcommand("herald0", "exact ideal heralding rate");
    h0->add_option("--n", c.n, "photon number")->required();
    h0->add_flag("--exact", c.exact, "print the exact rational");
    common(h0);
    auto* loss = app.add_subcommand("loss", "loss-corrected heralding and fidelity");
    with_spec(loss, true), with_model(loss), common(loss);
    loss->add_option("--eps", c.eps, "input error rate")->default_val(0.0);
    loss->add_option("--lambda", c.lambda, "loss per beamsplitter")->default_val(0.0);
    auto* haar = app.add_subcommand("haar", "Haar-random baseline");
    haar->add_option("--n", c.n, "modes")->required();
    haar->add_option("--seed", c.seed, "RNG seed")->default_val(0);
    haar->add_option("--fractions", c.fractions, "post-selected fractions")->delimiter(',');
    haar->add_flag("--by-weight", c.by_weight, "fractions count probability mass instead of patterns");
    common(haar);
    auto* orb = app.add_subcommand("orbits", "error-configuration orbit counts");
    with_spec(orb, true), common(orb);
    orb->add_option("--k", c.k, "restrict to k errors and list representatives");
    auto* ver = app.add_subcommand("verify", "compare against published coefficients");
    ver->add_option("--golden", c.golden, "coefficient file")->required();
    common(ver);
    auto* conj = app.add_subcommand("conjectures", "numeric conjecture probes");
    with_spec(conj, true), with_model(conj), common(conj);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(kInvalid);
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    if (symmetry != "on" && symmetry != "off") {
        err << "error: --symmetry must be on or off\n";
        return kInvalid;
    }
    c.symmetry = symmetry == "on";
    return std::nullopt;
}

inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    RunConfig c;
    if (auto code = parse(argc, argv, c, out, err)) return *code;
    return run(c, out, err);
}

}  // namespace phodist::cli
