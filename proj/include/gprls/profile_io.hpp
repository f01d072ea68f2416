#pragma once

// Profile file format (JSON):
// {
//   "mu": 1.0,
//   "eps_substrate": 9.0,
//   "layers": [
//     {"thickness_m": 20.0, "eps_top": 4.0, "eps_slope_per_m": 0.01,
//      "sigma_top_S_per_m": 1e-8, "sigma_slope_per_m": 0.0},
//     ...
//   ]
// }
// Depths are derived by cumulative thickness from z = 0.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gprls/errors.hpp"
#include "gprls/medium.hpp"

namespace gprls {

namespace detail {

inline std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline nlohmann::json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw format_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw format_error(path + ": invalid JSON at " +
                           line_column(text, e.byte > 0 ? e.byte - 1 : 0) + ": " +
                           e.what());
    }
}

} // namespace detail

inline MediumProfile load_profile(const std::string& path) {
    const nlohmann::json j = detail::parse_json_file(path);
    try {
        std::vector<LayerSpec> specs;
        for (const auto& lj : j.at("layers")) {
            LayerSpec s;
            s.thickness_m = lj.at("thickness_m").get<double>();
            s.eps_top = lj.at("eps_top").get<double>();
            s.eps_slope_per_m = lj.value("eps_slope_per_m", 0.0);
            s.sigma_top_S_per_m = lj.value("sigma_top_S_per_m", 0.0);
            s.sigma_slope_per_m = lj.value("sigma_slope_per_m", 0.0);
            specs.push_back(s);
        }
        return make_profile(j.at("mu").get<double>(),
                            j.at("eps_substrate").get<double>(), specs);
    } catch (const nlohmann::json::exception& e) {
        throw format_error(path + ": " + e.what());
    }
}

inline void save_profile(const MediumProfile& p, const std::string& path) {
    nlohmann::json j;
    j["mu"] = p.mu;
    j["eps_substrate"] = p.eps_substrate;
    j["layers"] = nlohmann::json::array();
    for (const auto& lay : p.layers) {
        j["layers"].push_back({{"thickness_m", lay.thickness()},
                               {"eps_top", lay.eps_top},
                               {"eps_slope_per_m", lay.eps_slope},
                               {"sigma_top_S_per_m", lay.sigma_top},
                               {"sigma_slope_per_m", lay.sigma_slope}});
    }
    std::ofstream out(path);
    if (!out)
        throw format_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

} // namespace gprls
