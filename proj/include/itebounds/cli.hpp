#pragma once

// Command-line front end. run_cli is the whole program: tools/main.cpp only
// forwards argv, so every path is exercisable in-process by the tests.
// Exit codes: 0 success, 1 domain/input error, 2 usage error.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "itebounds/binary.hpp"
#include "itebounds/core.hpp"
#include "itebounds/frechet_pmf.hpp"
#include "itebounds/interval.hpp"
#include "itebounds/io.hpp"
#include "itebounds/makarov.hpp"
#include "itebounds/oracle.hpp"
#include "itebounds/trial.hpp"

namespace iteb {

namespace detail {

inline json bound_pair_json(const BoundPair& b, bool with_certificates) {
    json j{{"lower", b.lower}, {"upper", b.upper}};
    if (with_certificates) {
        if (b.lower_certificate) j["lower_coupling"] = coupling_to_json(*b.lower_certificate);
        if (b.upper_certificate) j["upper_coupling"] = coupling_to_json(*b.upper_certificate);
    }
    return j;
}

inline json wald_json(const WaldCI& ci) {
    return json{{"estimate", ci.estimate}, {"lower", ci.lower}, {"upper", ci.upper}};
}

inline json report_json(const AteIteReport& r) {
    json sets = json::array();
    for (BinarySet s : r.ite_sets) sets.push_back(set_tag(s));
    return json{{"p0", r.marginals.p0.value()},
                {"p1", r.marginals.p1.value()},
                {"ate", wald_json(r.ate)},
                {"ite_sets", std::move(sets)},
                {"neyman_rejected", r.neyman_rejected},
                {"fisher_consistent", r.fisher_consistent},
                {"paradox", r.paradox}};
}

// Event forms: "{d}" = ITE equals d, "[a,b]" = ITE in the closed interval,
// bare number = equality.
struct ParsedEvent {
    bool is_interval = false;
    double a = 0.0;
    double b = 0.0;
};

inline ParsedEvent parse_event(std::string text) {
    auto strip = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
        return s;
    };
    text = strip(text);
    ParsedEvent ev;
    try {
        if (!text.empty() && text.front() == '{' && text.back() == '}') {
            ev.a = ev.b = std::stod(strip(text.substr(1, text.size() - 2)));
            return ev;
        }
        if (!text.empty() && text.front() == '[' && text.back() == ']') {
            std::string inner = text.substr(1, text.size() - 2);
            auto comma = inner.find(',');
            if (comma == std::string::npos) {
                throw std::invalid_argument("interval needs two endpoints");
            }
            ev.is_interval = true;
            ev.a = std::stod(strip(inner.substr(0, comma)));
            ev.b = std::stod(strip(inner.substr(comma + 1)));
            if (ev.a > ev.b) throw std::invalid_argument("interval endpoints reversed");
            return ev;
        }
        ev.a = ev.b = std::stod(text);
        return ev;
    } catch (const std::invalid_argument&) {
        throw std::runtime_error("cannot parse event \"" + text +
                                 "\": want {d}, [a,b], or a number");
    }
}

inline void emit(const std::string& text, const std::string& out_path,
                 std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(out_path);
    if (!file) throw std::runtime_error("cannot write " + out_path);
    file << text;
}

inline void emit_json(const json& j, const std::string& out_path, std::ostream& out) {
    emit(j.dump(2) + "\n", out_path, out);
}

}  // namespace detail

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    if (const char* env = std::getenv("ITE_BOUNDS_TOLERANCE")) {
        char* end = nullptr;
        double tol = std::strtod(env, &end);
        if (end == env || !(tol > 0.0) || tol > 1e-3) {
            err << "ITE_BOUNDS_TOLERANCE must be a number in (0, 1e-3]\n";
            return 2;
        }
        tolerance() = tol;
    }

    CLI::App app{"Partial-identification bounds for individual treatment effects"};
    app.require_subcommand(1);
    app.fallthrough();  // lets --out appear after the subcommand name
    std::string out_path;
    app.add_option("--out", out_path, "Write the primary output to FILE instead of stdout");

    // classify
    auto* classify = app.add_subcommand("classify", "Best prediction set for binary outcomes");
    double cl_p0 = -1.0, cl_p1 = -1.0, cl_alpha = 0.05;
    std::string cl_json;
    classify->add_option("--p0", cl_p0, "P(Y=1) in the control arm");
    classify->add_option("--p1", cl_p1, "P(Y=1) in the treated arm");
    classify->add_option("--alpha", cl_alpha, "Miscoverage level")->capture_default_str();
    classify->add_option("--json", cl_json, "JSON file with {\"p0\":..,\"p1\":..} instead of flags");

    // pmf-bounds
    auto* pmfb = app.add_subcommand("pmf-bounds", "Sharp bounds on P(Y1 - Y0 = delta)");
    std::string pb_f1, pb_f0;
    double pb_delta = 0.0;
    pmfb->add_option("--pmf1", pb_f1, "Treated-arm pmf (.json or .csv)")->required();
    pmfb->add_option("--pmf0", pb_f0, "Control-arm pmf (.json or .csv)")->required();
    pmfb->add_option("--delta", pb_delta, "Effect value")->required();

    // cdf-bounds
    auto* cdfb = app.add_subcommand("cdf-bounds", "Sharp bounds on P(Y1 - Y0 <= delta)");
    std::string cb_f1, cb_f0;
    double cb_delta = 0.0;
    bool cb_curve = false;
    std::vector<double> cb_grid;
    cdfb->add_option("--f1", cb_f1, "Treated-arm pmf (.json or .csv)")->required();
    cdfb->add_option("--f0", cb_f0, "Control-arm pmf (.json or .csv)")->required();
    auto* cb_delta_opt = cdfb->add_option("--delta", cb_delta, "Single delta");
    cdfb->add_flag("--curve", cb_curve, "Full curve over the delta support");
    cdfb->add_option("--grid", cb_grid, "Explicit delta grid for --curve");

    // interval
    auto* itv = app.add_subcommand("interval", "Minimal valid prediction interval");
    std::string iv_f1, iv_f0, iv_mode = "sharp";
    double iv_alpha = 0.05, iv_tails = 0.5;
    itv->add_option("--pmf1", iv_f1, "Treated-arm pmf")->required();
    itv->add_option("--pmf0", iv_f0, "Control-arm pmf")->required();
    itv->add_option("--alpha", iv_alpha, "Miscoverage level")->capture_default_str();
    itv->add_option("--mode", iv_mode, "sharp | conservative | quantile")
        ->check(CLI::IsMember({"sharp", "conservative", "quantile"}))
        ->capture_default_str();
    itv->add_option("--tails", iv_tails,
                    "Lower-tail share of each arm's budget (quantile mode)")
        ->capture_default_str();

    // oracle
    auto* orc = app.add_subcommand("oracle", "Extremize P(event) over all couplings");
    std::string or_f1, or_f0, or_event, or_dir = "min";
    orc->add_option("--pmf1", or_f1, "Treated-arm pmf")->required();
    orc->add_option("--pmf0", or_f0, "Control-arm pmf")->required();
    orc->add_option("--event", or_event, "Event on the effect: {d}, [a,b], or a number")
        ->required();
    orc->add_option("--direction", or_dir, "min | max")
        ->check(CLI::IsMember({"min", "max"}))
        ->capture_default_str();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a two-arm trial from a scenario");
    std::string sm_scenario;
    double sm_alpha = 0.05;
    std::uint64_t sm_seed = 0;
    bool sm_seed_set = false;
    sim->add_option("--scenario", sm_scenario, "Scenario JSON file")->required();
    sim->add_option("--alpha", sm_alpha, "Miscoverage level")->capture_default_str();
    sim->add_option("--seed", sm_seed, "Override the scenario seed")
        ->each([&](const std::string&) { sm_seed_set = true; });

    // region-map
    auto* reg = app.add_subcommand("region-map", "Classification map over (p0, p1)");
    double rg_alpha = 0.05;
    std::size_t rg_res = 199;
    std::string rg_mode = "best", rg_svg, rg_render;
    reg->add_option("--alpha", rg_alpha, "Miscoverage level")->capture_default_str();
    reg->add_option("--resolution", rg_res, "Grid resolution (>= 10)")->capture_default_str();
    reg->add_option("--mode", rg_mode, "shortest | best | necessary:<set>")
        ->capture_default_str();
    reg->add_option("--svg", rg_svg, "Also render an SVG to FILE");
    reg->add_option("--render", rg_render, "Skip computation: render SVG from this CSV");

    // stratify
    auto* str = app.add_subcommand("stratify", "Per-stratum reports from aggregate CSV");
    std::string st_data;
    double st_alpha = 0.05;
    str->add_option("--data", st_data, "CSV with columns x1,x2,arm,n,y1")->required();
    str->add_option("--alpha", st_alpha, "Miscoverage level")->capture_default_str();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (classify->parsed()) {
            if (!cl_json.empty()) {
                std::ifstream in(cl_json);
                if (!in) throw std::runtime_error("cannot open " + cl_json);
                json j;
                try {
                    in >> j;
                } catch (const json::exception& e) {
                    throw std::runtime_error(cl_json + ": " + e.what());
                }
                cl_p0 = detail::number_field(j, "p0");
                cl_p1 = detail::number_field(j, "p1");
            } else if (cl_p0 < 0.0 || cl_p1 < 0.0) {
                err << "classify needs --p0 and --p1 (or --json)\n";
                return 2;
            }
            BinaryMarginals m{Probability(cl_p0), Probability(cl_p1)};
            Alpha alpha(cl_alpha);
            json coverage;
            for (BinarySet s : kAllBinarySets) {
                coverage[set_tag(s)] = worst_case_coverage(m, s);
            }
            json best = json::array(), valid = json::array();
            for (BinarySet s : classify_best(m, alpha)) best.push_back(set_tag(s));
            for (BinarySet s : valid_sets(m, alpha)) valid.push_back(set_tag(s));
            detail::emit_json(json{{"p0", cl_p0},
                                   {"p1", cl_p1},
                                   {"alpha", cl_alpha},
                                   {"best", std::move(best)},
                                   {"valid", std::move(valid)},
                                   {"worst_case_coverage", std::move(coverage)}},
                              out_path, out);
            return 0;
        }

        if (pmfb->parsed()) {
            DiscretePMF pmf1 = load_pmf(pb_f1), pmf0 = load_pmf(pb_f0);
            BoundPair b = ite_pmf_bounds(pmf1, pmf0, pb_delta);
            json j = detail::bound_pair_json(b, true);
            j["delta"] = pb_delta;
            detail::emit_json(j, out_path, out);
            return 0;
        }

        if (cdfb->parsed()) {
            DiscretePMF pmf1 = load_pmf(cb_f1), pmf0 = load_pmf(cb_f0);
            StepCDF f1 = pmf1.to_cdf(), f0 = pmf0.to_cdf();
            if (cb_curve == (cb_delta_opt->count() > 0)) {
                err << "cdf-bounds needs exactly one of --delta and --curve\n";
                return 2;
            }
            if (cb_curve) {
                CdfBoundCurve curve = makarov_curve(f1, f0, cb_grid);
                detail::emit_json(json{{"delta", curve.delta_grid},
                                       {"lower", curve.lower},
                                       {"upper", curve.upper}},
                                  out_path, out);
            } else {
                detail::emit_json(json{{"delta", cb_delta},
                                       {"lower", makarov_lower(f1, f0, cb_delta)},
                                       {"upper", makarov_upper(f1, f0, cb_delta)}},
                                  out_path, out);
            }
            return 0;
        }

        if (itv->parsed()) {
            DiscretePMF pmf1 = load_pmf(iv_f1), pmf0 = load_pmf(iv_f0);
            Alpha alpha(iv_alpha);
            if (iv_mode == "quantile") {
                RealInterval r =
                    conservative_interval(pmf1.to_cdf(), pmf0.to_cdf(), alpha, iv_tails);
                detail::emit_json(json{{"interval", {r.lo, r.hi}}, {"mode", iv_mode}},
                                  out_path, out);
                return 0;
            }
            CoverageMode mode = iv_mode == "sharp" ? CoverageMode::Sharp
                                                   : CoverageMode::Conservative;
            IntervalResult res = minimal_valid_interval(pmf1, pmf0, alpha, mode);
            json co = json::array();
            for (const RealInterval& r : res.co_optimal) co.push_back({r.lo, r.hi});
            detail::emit_json(
                json{{"interval", {res.interval.lo, res.interval.hi}},
                     {"worst_case_coverage", res.worst_case_coverage},
                     {"co_optimal", std::move(co)},
                     {"must_include", {res.must_include.first, res.must_include.second}},
                     {"mode", iv_mode}},
                out_path, out);
            return 0;
        }

        if (orc->parsed()) {
            DiscretePMF pmf1 = load_pmf(or_f1), pmf0 = load_pmf(or_f0);
            detail::ParsedEvent ev = detail::parse_event(or_event);
            BoundPair b = ev.is_interval
                              ? worst_case_interval_probability(pmf1, pmf0, ev.a, ev.b)
                              : worst_case_delta_probability(pmf1, pmf0, ev.a);
            const bool minimize = or_dir == "min";
            json j{{"event", or_event},
                   {"direction", or_dir},
                   {"value", minimize ? b.lower : b.upper}};
            const auto& cert = minimize ? b.lower_certificate : b.upper_certificate;
            if (cert) j["coupling"] = coupling_to_json(*cert);
            detail::emit_json(j, out_path, out);
            return 0;
        }

        if (sim->parsed()) {
            TypeScenario sc = load_scenario(sm_scenario);
            if (sm_seed_set) sc.seed = sm_seed;
            TrialResult trial = simulate_trial(sc);
            AteIteReport report = ate_ite_report(trial, Alpha(sm_alpha));
            json j = detail::report_json(report);
            j["seed"] = sc.seed;
            j["arms"] = json{{"treated", {{"n", trial.treated.n},
                                          {"successes", trial.treated.successes}}},
                             {"control", {{"n", trial.control.n},
                                          {"successes", trial.control.successes}}}};
            j["realized_types"] = json{{"nr", trial.realized.nr},
                                       {"he", trial.realized.he},
                                       {"hu", trial.realized.hu},
                                       {"ar", trial.realized.ar}};
            detail::emit_json(j, out_path, out);
            return 0;
        }

        if (reg->parsed()) {
            if (!rg_render.empty()) {
                std::ifstream in(rg_render);
                if (!in) throw std::runtime_error("cannot open " + rg_render);
                RegionMap map = region_map_from_csv(in);
                std::ostringstream svg;
                region_map_to_svg(map, svg);
                detail::emit(svg.str(), rg_svg.empty() ? out_path : rg_svg, out);
                return 0;
            }
            RegionMap map;
            {
                RegionMode mode;
                std::string target;
                if (rg_mode == "shortest") {
                    mode = RegionMode::Shortest;
                } else if (rg_mode == "best") {
                    mode = RegionMode::Best;
                } else if (rg_mode.rfind("necessary:", 0) == 0) {
                    mode = RegionMode::Necessary;
                    target = rg_mode.substr(10);
                } else {
                    err << "region-map mode must be shortest, best, or necessary:<set>\n";
                    return 2;
                }
                map = compute_region_map(Alpha(rg_alpha), rg_res, mode, target);
            }
            std::ostringstream csv;
            region_map_to_csv(map, csv);
            detail::emit(csv.str(), out_path, out);
            if (!rg_svg.empty()) {
                std::ofstream svg(rg_svg);
                if (!svg) throw std::runtime_error("cannot write " + rg_svg);
                region_map_to_svg(map, svg);
            }
            return 0;
        }

        if (str->parsed()) {
            StratifiedTrial trial = load_stratified(st_data);
            Alpha alpha(st_alpha);
            StratifiedReport report = stratified_report(trial, alpha);
            json by_x1, by_cell = json::array();
            for (const auto& [x1, r] : report.by_x1) {
                by_x1[std::to_string(x1)] = detail::report_json(r);
            }
            for (const auto& [key, r] : report.by_cell) {
                json cell = detail::report_json(r);
                cell["x1"] = key.x1;
                cell["x2"] = key.x2;
                by_cell.push_back(std::move(cell));
            }
            MixtureCheck mix = total_probability_check(trial, 1);
            detail::emit_json(
                json{{"pooled", detail::report_json(report.pooled)},
                     {"by_x1", std::move(by_x1)},
                     {"by_cell", std::move(by_cell)},
                     {"total_probability",
                      {{"pooled_lower", mix.pooled_lower},
                       {"pooled_upper", mix.pooled_upper},
                       {"mixture_lower", mix.mixture_lower},
                       {"mixture_upper", mix.mixture_upper},
                       {"residual", mix.residual}}}},
                out_path, out);
            return 0;
        }

        err << "no subcommand selected\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace iteb
