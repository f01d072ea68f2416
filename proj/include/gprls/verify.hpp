#pragma once

// Numerical witnesses for the accuracy theory: sweeps the impedance q through
// a profile at complex frequency, forms the per-layer reflection-like
// variable w = (u - 1)/(u + 1) with u = -i q / k_layer, and checks the
// bound chain
//   |w_j(z_{j-1})| <= delta,
//   max_{I_j} |w_j| <= 1 + lambda_j/C_j,
//   |w_j(z_j - 0)|  <= 1,
//   |kappa_j| = |2 w / (1 + w)| <= 2*delta/(1 - delta)
// together with the impedance sign (Im q <= 0) and the wavenumber argument
// windows. w == 0 is a purely outgoing wave; |w| measures how much up-going
// reflection contaminates the layer-top impedance.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "gprls/constants.hpp"
#include "gprls/errors.hpp"
#include "gprls/forward.hpp"
#include "gprls/medium.hpp"

namespace gprls {

struct QSweepResult {
    std::vector<double> z;                // cell boundaries, 0 .. L
    std::vector<cplx> q;                  // impedance at each boundary
    std::vector<std::size_t> cell_layer;  // owning layer of cell i (between z[i], z[i+1])
};

inline QSweepResult sweep_q(const MediumProfile& p, ComplexFrequency omega,
                            int nz_per_layer = 2048) {
    const SlabGrid g = build_slab_grid(p, omega, nz_per_layer);
    return {g.z, riccati_sweep(g), g.cell_layer};
}

struct LayerW {
    std::vector<double> z;  // grid points in [z_top, z_bottom], both ends included
    std::vector<cplx> u;    // -i q / k_j, layer-local wavenumber
    std::vector<cplx> w;    // (u - 1)/(u + 1)
};

// Per-layer w along the sweep grid. The bottom endpoint uses the layer's own
// linear law (the one-sided limit z -> z_j - 0); q itself is continuous
// across interfaces, only k switches.
inline std::vector<LayerW> compute_w(const QSweepResult& sweep,
                                     const MediumProfile& p,
                                     ComplexFrequency omega) {
    std::vector<LayerW> out(p.layers.size());
    for (std::size_t b = 0; b < sweep.z.size(); ++b) {
        // boundary b borders cells b-1 (above) and b (below)
        for (int side = 0; side < 2; ++side) {
            std::size_t cell;
            if (side == 0) {
                if (b == 0)
                    continue;
                cell = b - 1;  // treat the boundary as this layer's bottom
            } else {
                if (b == sweep.cell_layer.size())
                    continue;
                cell = b;  // treat it as this layer's top
            }
            const std::size_t j = sweep.cell_layer[cell];
            LayerW& lw = out[j];
            // interior boundary: both sides are the same layer, enter once
            if (side == 1 && b > 0 && sweep.cell_layer[b - 1] == j)
                continue;
            const Layer& lay = p.layers[j];
            const double z = sweep.z[b];
            const cplx k = branch_root(
                wavenumber_squared(lay.eps_at(z), lay.sigma_at(z), p.mu, omega));
            const cplx u = -iu * sweep.q[b] / k;
            const cplx den = u + 1.0;
            if (den == cplx{0.0, 0.0})
                throw numeric_error("compute_w: pole (u = -1) at z = " +
                                    std::to_string(z));
            lw.z.push_back(z);
            lw.u.push_back(u);
            lw.w.push_back((u - 1.0) / den);
        }
    }
    return out;
}

struct LayerBound {
    cplx w_at_top{};
    double w_top_abs = 0.0;
    double w_max = 0.0;          // beta_j over [z_{j-1}, z_j)
    double beta_limit = 0.0;     // 1 + lambda_j/C_j
    bool beta_ok = false;
    double w_bottom_abs = 0.0;   // one-sided limit at the layer bottom
    bool interface_ok = false;   // w_bottom_abs <= 1
    double kappa_actual = 0.0;
    double kappa_bound = 0.0;
    bool passed = false;         // w_top_abs <= delta and kappa within bound
};

struct BoundCheckReport {
    bool applicable = false;  // Conditions A and B hold
    ConditionReport conditions;
    std::vector<LayerBound> per_layer;
    double lemma31_min_margin = 0.0;  // min over the grid of -Im q
    bool lemma2_arg_ok = false;
    bool all_passed = false;
};

// Wavenumber argument windows and the Im k floor implied by Condition A.
inline bool check_lemma2(double eps, double sigma, double mu,
                         ComplexFrequency omega, double /*C*/) {
    const cplx ksq = wavenumber_squared(eps, sigma, mu, omega);
    const cplx k = branch_root(ksq);
    const double slack = 1e-12;
    const double a2 = std::arg(ksq);
    if (a2 < -3.0 * pi / 4.0 - slack || a2 > -pi / 4.0 + slack)
        return false;
    const double a1 = std::arg(k);
    if (a1 < 5.0 * pi / 8.0 - slack || a1 > 7.0 * pi / 8.0 + slack)
        return false;
    const double num = -2.0 * mu * eps * omega.omega1 * omega.omega2 /
                           (phys.c * phys.c) +
                       mu * phys.mu0 * sigma * omega.omega1;
    const double im_floor = std::sqrt(num / (2.0 * (std::sqrt(2.0) + 1.0)));
    return k.imag() >= im_floor * (1.0 - 1e-12);
}

inline BoundCheckReport check_theorem1(const MediumProfile& p,
                                       ComplexFrequency omega, double delta,
                                       int nz_per_layer = 2048) {
    BoundCheckReport rep;
    rep.conditions = check_condition_b(p, omega, delta);
    rep.applicable = rep.conditions.applicable();

    const QSweepResult sweep = sweep_q(p, omega, nz_per_layer);
    const std::vector<LayerW> w = compute_w(sweep, p, omega);

    rep.lemma31_min_margin = std::numeric_limits<double>::infinity();
    for (const cplx& q : sweep.q)
        rep.lemma31_min_margin = std::min(rep.lemma31_min_margin, -q.imag());

    rep.lemma2_arg_ok = true;
    for (std::size_t c = 0; c < sweep.cell_layer.size(); ++c) {
        const double zmid = 0.5 * (sweep.z[c] + sweep.z[c + 1]);
        const ProfileSample s = sample_profile(p, std::min(zmid, p.L));
        rep.lemma2_arg_ok =
            rep.lemma2_arg_ok && check_lemma2(s.eps, s.sigma, p.mu, omega,
                                              rep.conditions.C);
    }

    const double kb = kappa_bound(delta);
    rep.all_passed = true;
    for (std::size_t j = 0; j < p.layers.size(); ++j) {
        LayerBound lb;
        lb.w_at_top = w[j].w.front();
        lb.w_top_abs = std::abs(lb.w_at_top);
        lb.w_bottom_abs = std::abs(w[j].w.back());
        lb.interface_ok = lb.w_bottom_abs <= 1.0 + 1e-9;
        lb.w_max = 0.0;
        for (std::size_t i = 0; i + 1 < w[j].w.size(); ++i)  // [top, bottom)
            lb.w_max = std::max(lb.w_max, std::abs(w[j].w[i]));
        const LayerConditionB& cb = rep.conditions.per_layer[j];
        lb.beta_limit = cb.C_decay > 0.0
                            ? 1.0 + cb.lambda / cb.C_decay
                            : std::numeric_limits<double>::infinity();
        lb.beta_ok = lb.w_max <= lb.beta_limit + 1e-9;
        lb.kappa_actual = std::abs(2.0 * lb.w_at_top / (1.0 + lb.w_at_top));
        lb.kappa_bound = kb;
        lb.passed = lb.w_top_abs <= delta + 1e-12 && lb.kappa_actual <= kb + 1e-12;
        rep.all_passed =
            rep.all_passed && lb.passed && lb.beta_ok && lb.interface_ok;
        rep.per_layer.push_back(lb);
    }
    return rep;
}

} // namespace gprls
