#pragma once

// Serialization of reconstruction and bound-check reports.
// Reconstruction JSON: array of
//   {layer, eps_hat, sigma_hat_S_per_m, speed_m_per_s, thickness_m,
//    omega1_rad_s, omega2_rad_s, kappa_bound, flags[]}
// (thickness_m / kappa_bound are null when not defined). The staircase CSV
// has columns z_m,eps_hat,sigma_hat with two rows per layer, ready for
// plotting against the true profile.

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "gprls/inversion.hpp"
#include "gprls/trace_io.hpp"
#include "gprls/verify.hpp"

namespace gprls {

inline nlohmann::json report_to_json(const ReconstructionReport& rep) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t j = 0; j < rep.estimates.size(); ++j) {
        const LayerEstimate& e = rep.estimates[j];
        nlohmann::json item;
        item["layer"] = j + 1;
        item["top_depth_m"] = rep.top_depths[j];
        item["eps_hat"] = e.eps_hat;
        item["sigma_hat_S_per_m"] = e.sigma_hat;
        item["speed_m_per_s"] = e.speed_hat;
        item["thickness_m"] = e.thickness_hat;  // NaN -> null
        item["omega1_rad_s"] = e.omega_used.omega1;
        item["omega2_rad_s"] = e.omega_used.omega2;
        item["kappa_bound"] = e.kappa_bound_used;  // NaN -> null
        item["terminal"] = e.terminal;
        item["flags"] = e.flags;
        arr.push_back(item);
    }
    return arr;
}

inline void save_report(const ReconstructionReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw format_error("cannot write " + path);
    out << report_to_json(rep).dump(2) << "\n";
}

// Staircase suitable for overlay plots: each layer contributes its top and
// bottom depth with the recovered constants. A terminal layer extends one
// wavelength-scale tail so it shows up.
inline void save_staircase_csv(const ReconstructionReport& rep,
                               const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw format_error("cannot write " + path);
    out << "z_m,eps_hat,sigma_hat\n";
    for (std::size_t j = 0; j < rep.estimates.size(); ++j) {
        const LayerEstimate& e = rep.estimates[j];
        const double top = rep.top_depths[j];
        const double bottom =
            e.terminal || std::isnan(e.thickness_hat)
                ? top + (e.speed_hat > 0.0
                             ? e.speed_hat / (e.omega_used.omega1 / (2.0 * pi))
                             : 1.0)
                : top + e.thickness_hat;
        out << detail::fmt17(top) << ',' << detail::fmt17(e.eps_hat) << ','
            << detail::fmt17(e.sigma_hat) << '\n';
        out << detail::fmt17(bottom) << ',' << detail::fmt17(e.eps_hat) << ','
            << detail::fmt17(e.sigma_hat) << '\n';
    }
}

inline nlohmann::json bound_report_to_json(const BoundCheckReport& rep) {
    nlohmann::json j;
    j["applicable"] = rep.applicable;
    j["condition_a_holds"] = rep.conditions.condition_a_holds;
    j["condition_b_holds"] = rep.conditions.condition_b_holds;
    j["condition_a_C"] = rep.conditions.C;
    j["delta"] = rep.conditions.delta;
    j["kappa_bound"] = rep.conditions.kappa_bound;
    j["lemma31_min_margin"] = rep.lemma31_min_margin;
    j["lemma2_arg_ok"] = rep.lemma2_arg_ok;
    j["all_passed"] = rep.all_passed;
    j["per_layer"] = nlohmann::json::array();
    for (std::size_t i = 0; i < rep.per_layer.size(); ++i) {
        const LayerBound& lb = rep.per_layer[i];
        const LayerConditionB& cb = rep.conditions.per_layer[i];
        j["per_layer"].push_back({{"layer", i + 1},
                                  {"lambda", cb.lambda},
                                  {"C_decay", cb.C_decay},
                                  {"delta_contribution", cb.delta_contribution},
                                  {"condition_b_satisfied", cb.satisfied},
                                  {"w_top_abs", lb.w_top_abs},
                                  {"beta", lb.w_max},
                                  {"beta_limit", lb.beta_limit},
                                  {"w_bottom_abs", lb.w_bottom_abs},
                                  {"kappa_actual", lb.kappa_actual},
                                  {"kappa_bound", lb.kappa_bound},
                                  {"passed", lb.passed}});
    }
    return j;
}

inline void save_bound_report(const BoundCheckReport& rep,
                              const std::string& json_path,
                              const std::string& csv_path) {
    std::ofstream out(json_path);
    if (!out)
        throw format_error("cannot write " + json_path);
    out << bound_report_to_json(rep).dump(2) << "\n";

    std::ofstream csv(csv_path);
    if (!csv)
        throw format_error("cannot write " + csv_path);
    csv << "layer,lambda,C_decay,delta_contribution,w_top_abs,beta,"
           "kappa_actual,kappa_bound,passed\n";
    for (std::size_t i = 0; i < rep.per_layer.size(); ++i) {
        const LayerBound& lb = rep.per_layer[i];
        const LayerConditionB& cb = rep.conditions.per_layer[i];
        csv << (i + 1) << ',' << detail::fmt17(cb.lambda) << ','
            << detail::fmt17(cb.C_decay) << ','
            << detail::fmt17(cb.delta_contribution) << ','
            << detail::fmt17(lb.w_top_abs) << ',' << detail::fmt17(lb.w_max)
            << ',' << detail::fmt17(lb.kappa_actual) << ','
            << detail::fmt17(lb.kappa_bound) << ','
            << (lb.passed ? "true" : "false") << '\n';
    }
}

} // namespace gprls
