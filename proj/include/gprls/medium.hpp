#pragma once

// Layered-medium model: piecewise-linear permittivity/conductivity profiles
// on semi-closed depth intervals [z_{j-1}, z_j), a homogeneous lossless
// half-space below, and the admissibility conditions (A and B) that control
// the accuracy of impedance-based layer identification at complex frequency.
//
// Conventions:
//   * depth z increases downward, surface at z = 0, substrate at z >= L;
//   * profiles are right-continuous at interfaces (a sample at z_j belongs
//     to layer j+1);
//   * the probing frequency is omega = omega1 + i*omega2 with omega1 > 0,
//     omega2 <= 0 (lower half-plane, where the field is analytic in omega).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "gprls/constants.hpp"
#include "gprls/errors.hpp"

namespace gprls {

struct ComplexFrequency {
    double omega1 = 0.0;  // rad/s, real part, > 0
    double omega2 = 0.0;  // rad/s, imaginary part, <= 0

    cplx value() const { return {omega1, omega2}; }
    double abs2() const { return omega1 * omega1 + omega2 * omega2; }
    bool valid() const { return omega1 > 0.0 && omega2 <= 0.0; }
};

struct Layer {
    double z_top = 0.0;       // m
    double z_bottom = 0.0;    // m, > z_top
    double eps_top = 1.0;     // relative permittivity at z_top
    double eps_slope = 0.0;   // 1/m
    double sigma_top = 0.0;   // S/m
    double sigma_slope = 0.0; // S/(m*m)

    double thickness() const { return z_bottom - z_top; }
    double eps_at(double z) const { return eps_top + eps_slope * (z - z_top); }
    double sigma_at(double z) const { return sigma_top + sigma_slope * (z - z_top); }
    // Closure values: one-sided limits z -> z_bottom - 0 of this layer's law.
    double eps_bottom() const { return eps_at(z_bottom); }
    double sigma_bottom() const { return sigma_at(z_bottom); }
};

struct MediumProfile {
    double mu = 1.0;             // relative permeability, constant with depth
    std::vector<Layer> layers;   // contiguous, layers[0].z_top == 0
    double eps_substrate = 1.0;  // relative permittivity for z >= L, sigma = 0 there
    double L = 0.0;              // total depth, == layers.back().z_bottom

    std::size_t layer_count() const { return layers.size(); }
};

struct LayerSpec {
    double thickness_m = 0.0;
    double eps_top = 1.0;
    double eps_slope_per_m = 0.0;
    double sigma_top_S_per_m = 0.0;
    double sigma_slope_per_m = 0.0;
};

// Builds a contiguous profile from per-layer thicknesses, validating the
// physical bounds (eps >= 1, sigma >= 0 across each layer).
inline MediumProfile make_profile(double mu, double eps_substrate,
                                  const std::vector<LayerSpec>& specs) {
    if (!(mu > 0.0))
        throw domain_error("make_profile: mu must be positive");
    if (!(eps_substrate >= 1.0))
        throw domain_error("make_profile: substrate permittivity must be >= 1");
    MediumProfile p;
    p.mu = mu;
    p.eps_substrate = eps_substrate;
    double z = 0.0;
    for (const auto& s : specs) {
        if (!(s.thickness_m > 0.0))
            throw domain_error("make_profile: layer thickness must be positive");
        Layer lay;
        lay.z_top = z;
        lay.z_bottom = z + s.thickness_m;
        lay.eps_top = s.eps_top;
        lay.eps_slope = s.eps_slope_per_m;
        lay.sigma_top = s.sigma_top_S_per_m;
        lay.sigma_slope = s.sigma_slope_per_m;
        if (lay.eps_top < 1.0 || lay.eps_bottom() < 1.0)
            throw domain_error("make_profile: eps(z) < 1 inside a layer");
        if (lay.sigma_top < 0.0 || lay.sigma_bottom() < 0.0)
            throw domain_error("make_profile: sigma(z) < 0 inside a layer");
        p.layers.push_back(lay);
        z = lay.z_bottom;
    }
    p.L = z;
    return p;
}

struct ProfileSample {
    double eps = 1.0;
    double sigma = 0.0;
    std::size_t layer_index = 0;  // == layers.size() for the substrate
};

// Pointwise evaluation honoring the semi-closed interval convention:
// z in [z_{j-1}, z_j) belongs to layer j; z >= L belongs to the substrate.
inline ProfileSample sample_profile(const MediumProfile& p, double z) {
    if (z < 0.0)
        throw domain_error("sample_profile: z above the surface");
    if (z >= p.L)
        return {p.eps_substrate, 0.0, p.layers.size()};
    auto it = std::upper_bound(p.layers.begin(), p.layers.end(), z,
                               [](double zz, const Layer& l) { return zz < l.z_bottom; });
    const Layer& lay = *it;
    return {lay.eps_at(z), lay.sigma_at(z),
            static_cast<std::size_t>(it - p.layers.begin())};
}

// k_z^2 = mu*eps*omega^2/c^2 - i*mu0*mu*sigma*omega  (k_x = 0).
inline cplx wavenumber_squared(double eps, double sigma, double mu,
                               ComplexFrequency omega) {
    const cplx w = omega.value();
    return mu * eps * w * w / (phys.c * phys.c) - iu * phys.mu0 * mu * sigma * w;
}

// The branch k = -sqrt(k^2): the negative root when k^2 is real positive,
// otherwise the root with positive imaginary part.
inline cplx branch_root(cplx k_squared) {
    if (k_squared == cplx{0.0, 0.0})
        throw domain_error("branch_root: zero wavenumber");
    cplx r = std::sqrt(k_squared);  // principal: Re >= 0
    if (r.imag() > 0.0)
        return r;
    if (r.imag() < 0.0)
        return -r;
    return -r;  // real k^2 > 0: pick the negative real root
}

// phi(C) = sqrt(2 + C^2) - C, evaluated without cancellation for large C.
inline double phi(double C) {
    return 2.0 / (std::sqrt(2.0 + C * C) + C);
}

// c0 = tan(3*pi/8) + sec(3*pi/8) = 1 + sqrt(2) + sqrt(4 + 2*sqrt(2)).
inline double c0_constant() {
    return 1.0 + std::sqrt(2.0) + std::sqrt(4.0 + 2.0 * std::sqrt(2.0));
}

// Relative-error bound 2*delta/(1 - delta) for the impedance-to-wavenumber
// identification at a layer top.
inline double kappa_bound(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw precondition_error("kappa_bound: delta must lie in (0, 1)");
    return 2.0 * delta / (1.0 - delta);
}

struct ConditionAResult {
    bool holds = false;
    double C = 0.0;                    // constant actually used/derived
    double worst_ratio = 0.0;          // max of sigma/eps over depth
    double worst_z = 0.0;              // where the max is attained
    double ratio_bound = 0.0;          // 2*C*omega1/(mu0*c^2)
    double ratio_margin = 0.0;         // ratio_bound - worst_ratio
    bool ratio_ok = false;
    double omega2_low = 0.0;           // -(1 + phi(C))*omega1
    double omega2_high = 0.0;          // (1 - sqrt(2))*omega1
    bool omega2_ok = false;
};

// Condition A: sigma/eps <= 2*C*omega1/(mu0*c^2) on [0, L] and
// -(1+phi(C))*omega1 <= omega2 <= (1-sqrt(2))*omega1.
// When C is not supplied, the smallest C satisfying the ratio inequality is
// derived first (the constant is existential) and the frequency window is
// tested with that C.
inline ConditionAResult check_condition_a(const MediumProfile& p,
                                          ComplexFrequency omega,
                                          std::optional<double> C = std::nullopt,
                                          int grid_per_layer = 10000) {
    if (!omega.valid())
        throw precondition_error("check_condition_a: invalid complex frequency");
    ConditionAResult r;
    r.worst_ratio = 0.0;
    r.worst_z = 0.0;
    for (const auto& lay : p.layers) {
        for (int i = 0; i <= grid_per_layer; ++i) {
            const double z = lay.z_top + lay.thickness() * i / grid_per_layer;
            const double ratio = lay.sigma_at(z) / lay.eps_at(z);
            if (ratio > r.worst_ratio) {
                r.worst_ratio = ratio;
                r.worst_z = z;
            }
        }
    }
    // substrate (z = L) has sigma = 0, never the maximum

    const double scale = 2.0 * omega.omega1 / (phys.mu0 * phys.c * phys.c);
    if (C) {
        if (!(*C > 0.0))
            throw precondition_error("check_condition_a: C must be positive");
        r.C = *C;
    } else {
        r.C = r.worst_ratio / scale;  // minimal admissible constant
    }
    r.ratio_bound = r.C * scale;
    r.ratio_margin = r.ratio_bound - r.worst_ratio;
    r.ratio_ok = r.worst_ratio <= r.ratio_bound * (1.0 + 1e-15) + 1e-300;

    r.omega2_low = -(1.0 + phi(r.C)) * omega.omega1;
    r.omega2_high = (1.0 - std::sqrt(2.0)) * omega.omega1;
    r.omega2_ok = omega.omega2 >= r.omega2_low && omega.omega2 <= r.omega2_high;

    r.holds = r.ratio_ok && r.omega2_ok;
    return r;
}

struct LayerConditionB {
    double lambda = 0.0;              // minimal admissible smoothness rate, 1/m
    double C_decay = 0.0;             // maximal admissible decay constant, 1/m
    double delta_contribution = 0.0;  // exp(-C*dz) + (l/C)*(1 + l/C), needs <= delta^2
    bool satisfied = false;
};

struct ConditionReport {
    bool condition_a_holds = false;
    double C = 0.0;  // Condition A constant (auto-derived)
    std::vector<LayerConditionB> per_layer;
    double delta = 0.0;
    double kappa_bound = 0.0;          // 2*delta/(1 - delta)
    bool condition_b_holds = false;

    bool applicable() const { return condition_a_holds && condition_b_holds; }
};

// Condition B, constructed per layer on a dense grid:
//   lambda_j = smallest rate satisfying both logarithmic-derivative bounds,
//   C_j     = min_z 4/c * sqrt(mu*eps_j(z)*omega1*|omega2|/(sqrt(2)+1)) - c0*lambda_j,
//   test      exp(-C_j*(z_j - z_{j-1})) + (lambda_j/C_j)*(1 + lambda_j/C_j) <= delta^2.
// The sigma bound is vacuous when sigma is identically zero on the layer; a
// layer where sigma vanishes somewhere while sigma' != 0 is unsatisfiable.
inline ConditionReport check_condition_b(const MediumProfile& p,
                                         ComplexFrequency omega, double delta,
                                         int grid_per_layer = 10000) {
    if (!(delta > 0.0 && delta <= std::sqrt(2.0) - 1.0))
        throw precondition_error("check_condition_b: delta must lie in (0, sqrt(2)-1]");
    if (!omega.valid())
        throw precondition_error("check_condition_b: invalid complex frequency");

    ConditionReport rep;
    rep.delta = delta;
    rep.kappa_bound = kappa_bound(delta);

    const ConditionAResult a = check_condition_a(p, omega);
    rep.condition_a_holds = a.holds;
    rep.C = a.C;

    const double inf = std::numeric_limits<double>::infinity();
    const double c0 = c0_constant();
    const double w1 = omega.omega1;
    const double aw2 = -omega.omega2;  // |omega2|
    const double wabs2 = omega.abs2();
    const double wabs = std::sqrt(wabs2);

    rep.condition_b_holds = true;
    for (const auto& lay : p.layers) {
        LayerConditionB lb;

        double lambda = 0.0;
        if (lay.eps_slope != 0.0) {
            if (aw2 == 0.0) {
                lambda = inf;  // bound requires omega2 < 0 when eps varies
            } else {
                double worst = 0.0;
                for (int i = 0; i <= grid_per_layer; ++i) {
                    const double z = lay.z_top + lay.thickness() * i / grid_per_layer;
                    worst = std::max(worst, std::abs(lay.eps_slope) / lay.eps_at(z));
                }
                lambda = std::max(lambda, worst * wabs2 / (4.0 * w1 * aw2));
            }
        }
        const bool sigma_zero = lay.sigma_top == 0.0 && lay.sigma_slope == 0.0;
        if (!sigma_zero && lay.sigma_slope != 0.0) {
            const double sig_min =
                std::min(lay.sigma_top, lay.sigma_bottom());
            if (sig_min <= 0.0) {
                lambda = inf;  // sigma vanishes with nonzero slope
            } else {
                double worst = 0.0;
                for (int i = 0; i <= grid_per_layer; ++i) {
                    const double z = lay.z_top + lay.thickness() * i / grid_per_layer;
                    worst = std::max(worst, std::abs(lay.sigma_slope) / lay.sigma_at(z));
                }
                lambda = std::max(lambda, worst * wabs / (2.0 * w1));
            }
        }
        lb.lambda = lambda;

        double lhs_min = inf;
        for (int i = 0; i <= grid_per_layer; ++i) {
            const double z = lay.z_top + lay.thickness() * i / grid_per_layer;
            const double lhs = 4.0 / phys.c *
                std::sqrt(p.mu * lay.eps_at(z) * w1 * aw2 / (std::sqrt(2.0) + 1.0));
            lhs_min = std::min(lhs_min, lhs);
        }
        lb.C_decay = std::isinf(lambda) ? -inf : lhs_min - c0 * lambda;

        if (lb.C_decay > 0.0 && std::isfinite(lambda)) {
            const double ratio = lb.lambda / lb.C_decay;
            lb.delta_contribution =
                std::exp(-lb.C_decay * lay.thickness()) + ratio * (1.0 + ratio);
            lb.satisfied = lb.delta_contribution <= delta * delta;
        } else {
            lb.delta_contribution = inf;
            lb.satisfied = false;
        }
        rep.condition_b_holds = rep.condition_b_holds && lb.satisfied;
        rep.per_layer.push_back(lb);
    }
    return rep;
}

} // namespace gprls
