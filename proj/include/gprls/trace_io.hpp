#pragma once

// Trace interchange: CSV with header "t,E,E_z" (seconds, V/m, V/m^2) plus a
// JSON sidecar carrying dt, t0, depth_m and the pulse description. Values are
// written with 17 significant digits, so a read-back reproduces the doubles
// exactly even though the text is platform independent.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gprls/errors.hpp"
#include "gprls/forward.hpp"
#include "gprls/profile_io.hpp"
#include "gprls/trace.hpp"

namespace gprls {

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline std::string sidecar_path(const std::string& csv_path) {
    const auto dot = csv_path.rfind('.');
    const std::string stem =
        dot == std::string::npos ? csv_path : csv_path.substr(0, dot);
    return stem + ".json";
}

inline void save_trace(const TimeTrace& tr, const SourcePulse& pulse,
                       const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out)
        throw format_error("cannot write " + csv_path);
    out << "t,E,E_z\n";
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const double t = tr.t0 + static_cast<double>(i) * tr.dt;
        out << detail::fmt17(t) << ',' << detail::fmt17(tr.E[i]) << ','
            << detail::fmt17(tr.E_z[i]) << '\n';
    }

    nlohmann::json meta;
    meta["dt"] = tr.dt;
    meta["t0"] = tr.t0;
    meta["depth_m"] = tr.depth;
    meta["samples"] = tr.size();
    meta["pulse"] = {{"kind", "ricker"},
                     {"central_frequency_hz", pulse.central_frequency},
                     {"delay_s", pulse.delay},
                     {"z0_m", pulse.z0},
                     {"support_s", pulse.T}};
    std::ofstream mout(sidecar_path(csv_path));
    if (!mout)
        throw format_error("cannot write " + sidecar_path(csv_path));
    mout << meta.dump(2) << "\n";
}

struct LoadedTrace {
    TimeTrace trace;
    SourcePulse pulse;
};

inline LoadedTrace load_trace(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in)
        throw format_error("cannot open " + csv_path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,E,E_z", 0) != 0)
        throw format_error(csv_path + ": expected header 't,E,E_z'");

    LoadedTrace lt;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        double t, e, ez;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &e, &ez) != 3)
            throw format_error(csv_path + ": malformed row at line " +
                               std::to_string(lineno));
        lt.trace.E.push_back(e);
        lt.trace.E_z.push_back(ez);
    }
    if (lt.trace.E.empty())
        throw format_error(csv_path + ": no samples");

    const nlohmann::json meta = detail::parse_json_file(sidecar_path(csv_path));
    try {
        lt.trace.dt = meta.at("dt").get<double>();
        lt.trace.t0 = meta.at("t0").get<double>();
        lt.trace.depth = meta.value("depth_m", 0.0);
        const auto& pj = meta.at("pulse");
        lt.pulse.central_frequency = pj.at("central_frequency_hz").get<double>();
        lt.pulse.delay = pj.at("delay_s").get<double>();
        lt.pulse.z0 = pj.at("z0_m").get<double>();
        lt.pulse.T = pj.value("support_s", 2.0 * lt.pulse.delay);
    } catch (const nlohmann::json::exception& e) {
        throw format_error(sidecar_path(csv_path) + ": " + e.what());
    }
    return lt;
}

} // namespace gprls
