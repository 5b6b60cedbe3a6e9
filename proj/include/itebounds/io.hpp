#pragma once

// File ingestion (pmf JSON/CSV, scenario JSON, stratified-trial CSV), JSON
// serialization of results, and the (p0, p1) region map with CSV and SVG
// emitters.

#include <fstream>
#include <nlohmann/json.hpp>

#include "itebounds/binary.hpp"
#include "itebounds/core.hpp"
#include "itebounds/trial.hpp"

namespace iteb {

using json = nlohmann::json;

namespace detail {

inline std::vector<double> number_array(const json& j, const std::string& path) {
    if (!j.is_array()) {
        throw std::runtime_error("expected a number array at " + path);
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number()) {
            throw std::runtime_error("expected a number at " + path + "[" +
                                     std::to_string(k) + "]");
        }
        out.push_back(j[k].get<double>());
    }
    return out;
}

inline double number_field(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw std::runtime_error("expected a number at ." + key);
    }
    return j.at(key).get<double>();
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace detail

inline DiscretePMF pmf_from_json(const json& j) {
    if (!j.is_object() || !j.contains("support") || !j.contains("probs")) {
        throw std::runtime_error("pmf JSON needs .support and .probs");
    }
    return DiscretePMF(detail::number_array(j.at("support"), ".support"),
                       detail::number_array(j.at("probs"), ".probs"));
}

inline json pmf_to_json(const DiscretePMF& pmf) {
    return json{{"support", pmf.support()}, {"probs", pmf.probs()}};
}

inline json coupling_to_json(const Coupling& c) {
    json rows = json::array();
    for (std::size_t i = 0; i < c.row_support().size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < c.col_support().size(); ++j) {
            row.push_back(c.at(i, j));
        }
        rows.push_back(std::move(row));
    }
    return json{{"y1_support", c.row_support()},
                {"y0_support", c.col_support()},
                {"mass", std::move(rows)}};
}

// CSV with a required `value,prob` header.
inline DiscretePMF pmf_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || detail::split(line, ',') !=
                                       std::vector<std::string>{"value", "prob"}) {
        throw std::runtime_error("pmf CSV must start with header value,prob");
    }
    std::vector<double> support, probs;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        auto fields = detail::split(line, ',');
        if (fields.size() != 2) {
            throw std::runtime_error("pmf CSV row " + std::to_string(row) +
                                     ": expected 2 fields");
        }
        try {
            support.push_back(std::stod(fields[0]));
            probs.push_back(std::stod(fields[1]));
        } catch (const std::exception&) {
            throw std::runtime_error("pmf CSV row " + std::to_string(row) +
                                     ": not a number");
        }
    }
    return DiscretePMF(std::move(support), std::move(probs));
}

// Dispatches on extension: .json or .csv.
inline DiscretePMF load_pmf(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw std::runtime_error(path + ": " + e.what());
        }
        return pmf_from_json(j);
    }
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
        return pmf_from_csv(in);
    }
    throw std::runtime_error(path + ": unsupported extension (want .json or .csv)");
}

inline TypeScenario scenario_from_json(const json& j) {
    TypeScenario sc;
    sc.nr = detail::number_field(j, "nr");
    sc.he = detail::number_field(j, "he");
    sc.hu = detail::number_field(j, "hu");
    sc.ar = detail::number_field(j, "ar");
    double n = detail::number_field(j, "n");
    if (n < 1 || n != std::floor(n)) {
        throw std::runtime_error("expected a positive integer at .n");
    }
    sc.n = static_cast<std::size_t>(n);
    sc.assign_prob = detail::number_field(j, "assign_prob");
    double seed = detail::number_field(j, "seed");
    if (seed < 0 || seed != std::floor(seed)) {
        throw std::runtime_error("expected a nonnegative integer at .seed");
    }
    sc.seed = static_cast<std::uint64_t>(seed);
    sc.validate();
    return sc;
}

inline TypeScenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return scenario_from_json(j);
}

// CSV columns x1,x2,arm,n,y1: one aggregate row per (stratum, arm).
inline StratifiedTrial stratified_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) ||
        detail::split(line, ',') !=
            std::vector<std::string>{"x1", "x2", "arm", "n", "y1"}) {
        throw std::runtime_error("stratified CSV must start with header x1,x2,arm,n,y1");
    }
    StratifiedTrial trial;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        auto fields = detail::split(line, ',');
        if (fields.size() != 5) {
            throw std::runtime_error("stratified CSV row " + std::to_string(row) +
                                     ": expected 5 fields");
        }
        long values[5];
        for (int k = 0; k < 5; ++k) {
            try {
                values[k] = std::stol(fields[k]);
            } catch (const std::exception&) {
                throw std::runtime_error("stratified CSV row " + std::to_string(row) +
                                         ": not an integer");
            }
        }
        if (values[2] != 0 && values[2] != 1) {
            throw std::runtime_error("stratified CSV row " + std::to_string(row) +
                                     ": arm must be 0 or 1");
        }
        if (values[3] < 0 || values[4] < 0 || values[4] > values[3]) {
            throw std::runtime_error("stratified CSV row " + std::to_string(row) +
                                     ": need 0 <= y1 <= n");
        }
        StratumKey key{static_cast<int>(values[0]), static_cast<int>(values[1])};
        ArmCounts& arm = values[2] == 1 ? trial.cells[key].treated
                                        : trial.cells[key].control;
        arm.n += static_cast<std::size_t>(values[3]);
        arm.successes += static_cast<std::size_t>(values[4]);
    }
    return trial;
}

inline StratifiedTrial load_stratified(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return stratified_from_csv(in);
}

// ---------------------------------------------------------------------------
// Region map over (p0, p1) in (0,1)^2 at cell centers (i + 0.5) / resolution.

enum class RegionMode { Shortest, Best, Necessary };

struct RegionMap {
    std::size_t grid_resolution = 0;
    double alpha = 0.0;
    RegionMode mode = RegionMode::Best;
    std::string necessary_set;               // set tag when mode == Necessary
    std::vector<std::string> cells;          // row-major by (i: p0, j: p1), tags joined by '|'
};

namespace detail {

inline std::string join_tags(const std::vector<BinarySet>& sets) {
    std::string out;
    for (BinarySet s : sets) {
        if (!out.empty()) out += '|';
        out += set_tag(s);
    }
    return out;
}

// Valid minimal-length sets without the coverage tie-break.
inline std::vector<BinarySet> shortest_sets(const BinaryMarginals& m, Alpha alpha) {
    std::vector<BinarySet> valid = valid_sets(m, alpha);
    int min_len = 2;
    for (BinarySet s : valid) min_len = std::min(min_len, set_length(s));
    std::vector<BinarySet> out;
    for (BinarySet s : valid) {
        if (set_length(s) == min_len) out.push_back(s);
    }
    return out;
}

inline std::optional<BinarySet> set_from_tag(const std::string& tag) {
    for (BinarySet s : kAllBinarySets) {
        if (tag == set_tag(s)) return s;
    }
    return std::nullopt;
}

}  // namespace detail

inline RegionMap compute_region_map(Alpha alpha, std::size_t resolution,
                                    RegionMode mode,
                                    const std::string& necessary_set = "") {
    if (resolution < 10) {
        throw std::domain_error("region map: resolution must be at least 10");
    }
    std::optional<BinarySet> target;
    if (mode == RegionMode::Necessary) {
        target = detail::set_from_tag(necessary_set);
        if (!target) {
            throw std::domain_error("region map: unknown set tag " + necessary_set);
        }
    }
    RegionMap map;
    map.grid_resolution = resolution;
    map.alpha = alpha.value();
    map.mode = mode;
    map.necessary_set = target ? set_tag(*target) : "";
    map.cells.resize(resolution * resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
        const double p0 = (i + 0.5) / resolution;
        for (std::size_t j = 0; j < resolution; ++j) {
            const double p1 = (j + 0.5) / resolution;
            BinaryMarginals m{Probability(p0), Probability(p1)};
            std::string& tag = map.cells[i * resolution + j];
            switch (mode) {
                case RegionMode::Shortest:
                    tag = detail::join_tags(detail::shortest_sets(m, alpha));
                    break;
                case RegionMode::Best:
                    tag = detail::join_tags(classify_best(m, alpha));
                    break;
                case RegionMode::Necessary:
                    tag = necessary_condition_valid_best(*target, m, alpha)
                              ? set_tag(*target)
                              : "";
                    break;
            }
        }
    }
    return map;
}

inline void region_map_to_csv(const RegionMap& map, std::ostream& out) {
    char buf[64];
    out << "p0,p1,tags\n";
    const std::size_t r = map.grid_resolution;
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            std::snprintf(buf, sizeof(buf), "%.10g,%.10g,", (i + 0.5) / r,
                          (j + 0.5) / r);
            out << buf << '"' << map.cells[i * r + j] << "\"\n";
        }
    }
}

// Re-ingests the CSV written by region_map_to_csv (tags are double-quoted
// because interval tags contain commas).
inline RegionMap region_map_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "p0,p1,tags") {
        throw std::runtime_error("region CSV must start with header p0,p1,tags");
    }
    std::vector<std::string> tags;
    std::size_t row = 1;
    double first_p0 = -1.0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        auto quote = line.find('"');
        if (quote == std::string::npos || line.back() != '"') {
            throw std::runtime_error("region CSV row " + std::to_string(row) +
                                     ": tags must be quoted");
        }
        if (first_p0 < 0.0) {
            first_p0 = std::stod(detail::split(line.substr(0, quote), ',')[0]);
        }
        tags.push_back(line.substr(quote + 1, line.size() - quote - 2));
    }
    const std::size_t r = static_cast<std::size_t>(std::llround(std::sqrt(
        static_cast<double>(tags.size()))));
    if (r * r != tags.size() || r < 10) {
        throw std::runtime_error("region CSV: cell count is not a grid");
    }
    RegionMap map;
    map.grid_resolution = r;
    map.alpha = 0.0;  // not recorded in the CSV; irrelevant for re-rendering
    map.cells = std::move(tags);
    if (std::abs(first_p0 - 0.5 / r) > kValueMatchTol) {
        throw std::runtime_error("region CSV: grid points are not cell centers");
    }
    return map;
}

namespace detail {

// Fixed palette keyed by tag; unknown tags fall back to black so they are
// visible rather than silently blended.
inline const char* region_color(const std::string& tag) {
    if (tag == "{-1}") return "#e41a1c";
    if (tag == "{0}") return "#4daf4a";
    if (tag == "{1}") return "#377eb8";
    if (tag == "[0,1]") return "#80b1d3";
    if (tag == "[-1,0]") return "#fb8072";
    if (tag == "[-1,1]") return "#d9d9d9";
    if (tag == "[0,1]|[-1,0]") return "#bebada";
    if (tag.empty()) return "#ffffff";
    return "#000000";
}

}  // namespace detail

// Flat colored-rect grid (SVG 1.1), p0 on the x axis, p1 upward, plus a
// legend in a fixed order.
inline void region_map_to_svg(const RegionMap& map, std::ostream& out) {
    const std::size_t r = map.grid_resolution;
    const int cell = 4;
    const int side = static_cast<int>(r) * cell;
    const int legend_w = 140;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
        << side + legend_w << "\" height=\"" << side << "\">\n";
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            const char* color = detail::region_color(map.cells[i * r + j]);
            out << "<rect x=\"" << i * cell << "\" y=\"" << (r - 1 - j) * cell
                << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
                << color << "\"/>\n";
        }
    }
    static const char* kLegendTags[] = {"{-1}",   "{0}",    "{1}",          "[0,1]",
                                        "[-1,0]", "[-1,1]", "[0,1]|[-1,0]", ""};
    int y = 10;
    for (const char* tag : kLegendTags) {
        out << "<rect x=\"" << side + 10 << "\" y=\"" << y
            << "\" width=\"12\" height=\"12\" fill=\"" << detail::region_color(tag)
            << "\" stroke=\"#000000\"/>\n";
        out << "<text x=\"" << side + 28 << "\" y=\"" << y + 10
            << "\" font-size=\"12\" font-family=\"monospace\">"
            << (std::string(tag).empty() ? "(none)" : tag) << "</text>\n";
        y += 18;
    }
    out << "</svg>\n";
}

}  // namespace iteb
