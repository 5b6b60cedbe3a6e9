#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "itebounds/cli.hpp"
#include "itebounds/io.hpp"

using namespace iteb;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "itebounds_io_tests";
    std::filesystem::create_directories(dir);
    std::filesystem::path path = dir / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    CliRun r;
    r.code = run_cli(std::move(args), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

}  // namespace

TEST_CASE("pmf JSON round trip preserves support and probabilities") {
    DiscretePMF pmf({-1.0, 0.0, 2.5}, {0.2, 0.3, 0.5});
    DiscretePMF back = pmf_from_json(pmf_to_json(pmf));
    CHECK(back.support() == pmf.support());
    CHECK(back.probs() == pmf.probs());
}

TEST_CASE("pmf JSON errors name the offending field") {
    CHECK_THROWS_WITH(pmf_from_json(json::parse(R"({"probs": [1.0]})")),
                      Catch::Matchers::ContainsSubstring(".support"));
    CHECK_THROWS_WITH(
        pmf_from_json(json::parse(R"({"support": [0, 1], "probs": [0.5, "x"]})")),
        Catch::Matchers::ContainsSubstring(".probs[1]"));
    CHECK_THROWS_WITH(
        pmf_from_json(json::parse(R"({"support": "no", "probs": [1.0]})")),
        Catch::Matchers::ContainsSubstring(".support"));
}

TEST_CASE("pmf CSV parses a headed value,prob table") {
    std::istringstream in("value,prob\n0,0.25\n1,0.75\n");
    DiscretePMF pmf = pmf_from_csv(in);
    CHECK(pmf.support() == std::vector<double>{0.0, 1.0});
    CHECK(pmf.prob_at(1.0) == Catch::Approx(0.75));
}

TEST_CASE("pmf CSV rejects a wrong header and malformed rows") {
    std::istringstream bad_header("x,p\n0,1\n");
    CHECK_THROWS_WITH(pmf_from_csv(bad_header),
                      Catch::Matchers::ContainsSubstring("value,prob"));
    std::istringstream bad_row("value,prob\n0,0.5,9\n");
    CHECK_THROWS_WITH(pmf_from_csv(bad_row),
                      Catch::Matchers::ContainsSubstring("row 2"));
    std::istringstream not_number("value,prob\n0,half\n");
    CHECK_THROWS_WITH(pmf_from_csv(not_number),
                      Catch::Matchers::ContainsSubstring("not a number"));
}

TEST_CASE("load_pmf dispatches on extension and reports unreadable paths") {
    std::string jpath = write_temp(
        "pmf.json", R"({"support": [0, 1], "probs": [0.4, 0.6]})");
    std::string cpath = write_temp("pmf.csv", "value,prob\n0,0.4\n1,0.6\n");
    CHECK(load_pmf(jpath).prob_at(1.0) == Catch::Approx(0.6));
    CHECK(load_pmf(cpath).prob_at(1.0) == Catch::Approx(0.6));
    CHECK_THROWS_WITH(load_pmf("/nonexistent/p.json"),
                      Catch::Matchers::ContainsSubstring("cannot open"));
    std::string tpath = write_temp("pmf.txt", "whatever");
    CHECK_THROWS_WITH(load_pmf(tpath),
                      Catch::Matchers::ContainsSubstring("unsupported extension"));
    std::string broken = write_temp("broken.json", "{not json");
    CHECK_THROWS_AS(load_pmf(broken), std::runtime_error);
}

TEST_CASE("coupling serialization carries both supports and the full matrix") {
    DiscretePMF pmf1({0.0, 1.0}, {0.5, 0.5});
    DiscretePMF pmf0({0.0, 1.0}, {0.5, 0.5});
    Coupling c = build_upper_coupling(pmf1, pmf0, 0.0);
    json j = coupling_to_json(c);
    CHECK(j.at("y1_support").size() == 2);
    CHECK(j.at("y0_support").size() == 2);
    CHECK(j.at("mass").size() == 2);
    double total = 0.0;
    for (const auto& row : j.at("mass")) {
        for (const auto& cell : row) total += cell.get<double>();
    }
    CHECK(total == Catch::Approx(1.0));
}

TEST_CASE("scenario JSON parses and validates") {
    json j = json::parse(
        R"({"nr": 0.96, "he": 0.03, "hu": 0.01, "ar": 0.0,
            "n": 50000, "assign_prob": 0.5, "seed": 1})");
    TypeScenario sc = scenario_from_json(j);
    CHECK(sc.n == 50000);
    CHECK(sc.seed == 1);

    json missing = j;
    missing.erase("hu");
    CHECK_THROWS_WITH(scenario_from_json(missing),
                      Catch::Matchers::ContainsSubstring(".hu"));

    json frac_n = j;
    frac_n["n"] = 10.5;
    CHECK_THROWS_WITH(scenario_from_json(frac_n),
                      Catch::Matchers::ContainsSubstring(".n"));

    json bad_sum = j;
    bad_sum["nr"] = 0.5;
    CHECK_THROWS_AS(scenario_from_json(bad_sum), std::domain_error);
}

TEST_CASE("stratified CSV loads the bundled fixture") {
    StratifiedTrial trial = load_stratified(std::string(ITEB_DATA_DIR) +
                                            "/stratified_trial.csv");
    REQUIRE(trial.cells.size() == 4);
    const TrialResult& cell = trial.cells.at({1, 0});
    CHECK(cell.treated.n == 3000);
    CHECK(cell.treated.successes == 3000);
    CHECK(cell.control.successes == 0);
}

TEST_CASE("stratified CSV aggregates repeated rows for the same stratum arm") {
    std::istringstream in("x1,x2,arm,n,y1\n0,0,1,100,40\n0,0,1,50,10\n0,0,0,100,20\n");
    StratifiedTrial trial = stratified_from_csv(in);
    const TrialResult& cell = trial.cells.at({0, 0});
    CHECK(cell.treated.n == 150);
    CHECK(cell.treated.successes == 50);
}

TEST_CASE("stratified CSV rejects malformed input") {
    std::istringstream bad_header("a,b,c,d,e\n");
    CHECK_THROWS_WITH(stratified_from_csv(bad_header),
                      Catch::Matchers::ContainsSubstring("x1,x2,arm,n,y1"));
    std::istringstream bad_arm("x1,x2,arm,n,y1\n0,0,2,10,5\n");
    CHECK_THROWS_WITH(stratified_from_csv(bad_arm),
                      Catch::Matchers::ContainsSubstring("arm must be 0 or 1"));
    std::istringstream bad_y1("x1,x2,arm,n,y1\n0,0,1,10,11\n");
    CHECK_THROWS_WITH(stratified_from_csv(bad_y1),
                      Catch::Matchers::ContainsSubstring("0 <= y1 <= n"));
    std::istringstream not_int("x1,x2,arm,n,y1\n0,0,1,ten,5\n");
    CHECK_THROWS_WITH(stratified_from_csv(not_int),
                      Catch::Matchers::ContainsSubstring("not an integer"));
}

TEST_CASE("region map CSV round trip renders a byte-identical SVG") {
    RegionMap map = compute_region_map(Alpha(0.1), 12, RegionMode::Best);
    std::ostringstream csv;
    region_map_to_csv(map, csv);

    std::istringstream back(csv.str());
    RegionMap reread = region_map_from_csv(back);
    CHECK(reread.grid_resolution == 12);
    CHECK(reread.cells == map.cells);

    std::ostringstream svg_direct, svg_reread;
    region_map_to_svg(map, svg_direct);
    region_map_to_svg(reread, svg_reread);
    CHECK(svg_direct.str() == svg_reread.str());
    CHECK(svg_direct.str().find("<svg") == 0);
}

TEST_CASE("region map modes and validation") {
    CHECK_THROWS_AS(compute_region_map(Alpha(0.1), 5, RegionMode::Best),
                    std::domain_error);
    CHECK_THROWS_AS(
        compute_region_map(Alpha(0.1), 12, RegionMode::Necessary, "{2}"),
        std::domain_error);
    // necessary-region cells carry either the target tag or nothing
    RegionMap nec = compute_region_map(Alpha(0.1), 12, RegionMode::Necessary, "{0}");
    for (const std::string& tag : nec.cells) {
        CHECK((tag.empty() || tag == "{0}"));
    }
    // the necessary region contains every cell where {0} is the unique best
    RegionMap best = compute_region_map(Alpha(0.1), 12, RegionMode::Best);
    for (std::size_t k = 0; k < best.cells.size(); ++k) {
        if (best.cells[k] == "{0}") CHECK(nec.cells[k] == "{0}");
    }
}

TEST_CASE("region map CSV ingestion rejects non-grids and bad headers") {
    std::istringstream bad_header("a,b,c\n");
    CHECK_THROWS_WITH(region_map_from_csv(bad_header),
                      Catch::Matchers::ContainsSubstring("p0,p1,tags"));
    std::ostringstream partial;
    partial << "p0,p1,tags\n";
    for (int k = 0; k < 7; ++k) partial << "0.05,0.05,\"{0}\"\n";
    std::istringstream in(partial.str());
    CHECK_THROWS_WITH(region_map_from_csv(in),
                      Catch::Matchers::ContainsSubstring("not a grid"));
    std::istringstream unquoted("p0,p1,tags\n0.5,0.5,{0}\n");
    CHECK_THROWS_WITH(region_map_from_csv(unquoted),
                      Catch::Matchers::ContainsSubstring("quoted"));
}

TEST_CASE("cli: classify succeeds with flags and emits the best set") {
    CliRun r = cli({"classify", "--p0", "0.0104", "--p1", "0.0303", "--alpha", "0.05"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    REQUIRE(j.at("best").size() == 1);
    CHECK(j.at("best")[0] == "{0}");
    CHECK(j.at("worst_case_coverage").contains("[-1,1]"));
}

TEST_CASE("cli: classify reads marginals from a JSON file") {
    std::string path = write_temp("marginals.json", R"({"p0": 0.0104, "p1": 0.0303})");
    CliRun r = cli({"classify", "--json", path});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("best")[0] == "{0}");
}

TEST_CASE("cli: exit code 1 for domain errors, 2 for usage errors") {
    CHECK(cli({"classify", "--p0", "1.2", "--p1", "0.5"}).code == 1);
    CHECK(cli({"classify", "--p1", "0.5"}).code == 2);
    CHECK(cli({"nosuchcmd"}).code == 2);
    CHECK(cli({}).code == 2);
}

TEST_CASE("cli: cdf-bounds requires exactly one of --delta and --curve") {
    std::string pmf = write_temp("u.csv", "value,prob\n0,0.5\n1,0.5\n");
    CHECK(cli({"cdf-bounds", "--f1", pmf, "--f0", pmf}).code == 2);
    CHECK(cli({"cdf-bounds", "--f1", pmf, "--f0", pmf, "--delta", "0", "--curve"})
              .code == 2);
    CliRun single = cli({"cdf-bounds", "--f1", pmf, "--f0", pmf, "--delta", "0"});
    REQUIRE(single.code == 0);
    json j = json::parse(single.out);
    CHECK(j.at("lower").get<double>() == Catch::Approx(0.5));
    CHECK(j.at("upper").get<double>() == Catch::Approx(1.0));
    CliRun curve = cli({"cdf-bounds", "--f1", pmf, "--f0", pmf, "--curve"});
    REQUIRE(curve.code == 0);
    CHECK(json::parse(curve.out).at("delta").size() == 3);
}

TEST_CASE("cli: pmf-bounds emits bounds with certificates") {
    std::string pmf = write_temp("u3.csv",
                                 "value,prob\n0,0.333333\n1,0.333333\n2,0.333334\n");
    CliRun r = cli({"pmf-bounds", "--pmf1", pmf, "--pmf0", pmf, "--delta", "0"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("lower").get<double>() == Catch::Approx(0.0).margin(1e-9));
    CHECK(j.at("upper").get<double>() == Catch::Approx(1.0).margin(1e-5));
    CHECK(j.contains("lower_coupling"));
    CHECK(j.contains("upper_coupling"));
}

TEST_CASE("cli: oracle parses event syntax and rejects garbage") {
    std::string pmf = write_temp("u2.csv", "value,prob\n0,0.5\n1,0.5\n");
    CliRun eq = cli({"oracle", "--pmf1", pmf, "--pmf0", pmf, "--event", "{0}",
                     "--direction", "max"});
    REQUIRE(eq.code == 0);
    CHECK(json::parse(eq.out).at("value").get<double>() == Catch::Approx(1.0));
    CliRun iv = cli({"oracle", "--pmf1", pmf, "--pmf0", pmf, "--event", "[-1,1]",
                     "--direction", "min"});
    REQUIRE(iv.code == 0);
    CHECK(json::parse(iv.out).at("value").get<double>() == Catch::Approx(1.0));
    CliRun bad = cli({"oracle", "--pmf1", pmf, "--pmf0", pmf, "--event", "(0;1)"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("cannot parse event") != std::string::npos);
    CHECK(cli({"oracle", "--pmf1", pmf, "--pmf0", pmf, "--event", "{0}",
               "--direction", "sideways"})
              .code == 2);
}

TEST_CASE("cli: interval subcommand covers all three modes") {
    std::string pmf = write_temp("u3b.csv",
                                 "value,prob\n0,0.333333\n1,0.333333\n2,0.333334\n");
    CliRun sharp = cli({"interval", "--pmf1", pmf, "--pmf0", pmf, "--alpha", "0.4",
                        "--mode", "sharp"});
    REQUIRE(sharp.code == 0);
    json js = json::parse(sharp.out);
    CHECK(js.at("interval").size() == 2);
    CHECK(js.at("worst_case_coverage").get<double>() >= 0.6 - 1e-9);
    CliRun cons = cli({"interval", "--pmf1", pmf, "--pmf0", pmf, "--alpha", "0.4",
                       "--mode", "conservative"});
    REQUIRE(cons.code == 0);
    CliRun quant = cli({"interval", "--pmf1", pmf, "--pmf0", pmf, "--alpha", "0.4",
                        "--mode", "quantile"});
    REQUIRE(quant.code == 0);
    CHECK(json::parse(quant.out).at("interval").size() == 2);
    CHECK(cli({"interval", "--pmf1", pmf, "--pmf0", pmf, "--mode", "bogus"}).code == 2);
}

TEST_CASE("cli: simulate honors a seed override and reproduces the contrast") {
    std::string scenario = write_temp(
        "scenario.json",
        R"({"nr": 0.96, "he": 0.03, "hu": 0.01, "ar": 0.0,
            "n": 50000, "assign_prob": 0.5, "seed": 99})");
    CliRun r = cli({"simulate", "--scenario", scenario, "--seed", "1"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("seed") == 1);
    CHECK(j.at("paradox").get<bool>());
    CliRun same = cli({"simulate", "--scenario", scenario, "--seed", "1"});
    CHECK(same.out == r.out);
}

TEST_CASE("cli: stratify reports pooled, x1, and cell classifications") {
    CliRun r = cli({"stratify", "--data",
                    std::string(ITEB_DATA_DIR) + "/stratified_trial.csv",
                    "--alpha", "0.1"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("pooled").at("ite_sets")[0] == "[-1,1]");
    CHECK(j.at("by_x1").at("1").at("ite_sets")[0] == "{1}");
    CHECK(j.at("total_probability").at("residual").get<double>() <= 1e-9);
}

TEST_CASE("cli: region-map CSV to --render SVG round trip matches direct output") {
    std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "itebounds_io_tests";
    std::filesystem::create_directories(dir);
    std::string csv_path = (dir / "map.csv").string();
    std::string svg_path = (dir / "map.svg").string();
    CliRun make = cli({"region-map", "--alpha", "0.1", "--resolution", "12",
                       "--out", csv_path, "--svg", svg_path});
    REQUIRE(make.code == 0);
    CliRun render = cli({"region-map", "--render", csv_path});
    REQUIRE(render.code == 0);
    std::ifstream svg_in(svg_path);
    std::stringstream direct;
    direct << svg_in.rdbuf();
    CHECK(render.out == direct.str());
    CHECK(cli({"region-map", "--mode", "spiral"}).code == 2);
    CHECK(cli({"region-map", "--resolution", "4"}).code == 1);
}

TEST_CASE("cli: --out redirects the primary output to a file") {
    std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "itebounds_io_tests";
    std::filesystem::create_directories(dir);
    std::string path = (dir / "classify.json").string();
    CliRun r = cli({"classify", "--p0", "0.0104", "--p1", "0.0303", "--out", path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    json j;
    in >> j;
    CHECK(j.at("best")[0] == "{0}");
}

TEST_CASE("cli: tolerance environment variable is validated and applied") {
    const double saved = tolerance();
    setenv("ITE_BOUNDS_TOLERANCE", "not-a-number", 1);
    CHECK(cli({"classify", "--p0", "0.5", "--p1", "0.5"}).code == 2);
    setenv("ITE_BOUNDS_TOLERANCE", "0.5", 1);
    CHECK(cli({"classify", "--p0", "0.5", "--p1", "0.5"}).code == 2);
    setenv("ITE_BOUNDS_TOLERANCE", "1e-6", 1);
    CHECK(cli({"classify", "--p0", "0.5", "--p1", "0.5"}).code == 0);
    CHECK(tolerance() == 1e-6);
    unsetenv("ITE_BOUNDS_TOLERANCE");
    tolerance() = saved;
    CHECK(cli({"classify", "--p0", "0.5", "--p1", "0.5"}).code == 0);
    CHECK(tolerance() == saved);
}

TEST_CASE("cli: --help exits 0") {
    CHECK(cli({"--help"}).code == 0);
    CliRun r = cli({"classify", "--help"});
    CHECK(r.code == 0);
}
