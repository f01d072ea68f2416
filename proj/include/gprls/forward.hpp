#pragma once

// Direct solver for the 1-D frequency-domain problem
//
//   E'' + k^2(z) E = 0  on  (0, L),
//   E'(0) + i k0 E(0) = h(omega) exp(-i k0 z0),   k0 = -omega/c,
//   E'(L) - i k_sub E(L) = 0,
//
// at real or complex omega, plus synthesis of time-domain surface records.
//
// The solver never integrates the second-order equation directly: at complex
// omega the wavenumber has a large positive imaginary part and any shooting
// scheme blows up like exp(|Im k| L). Instead the impedance q = E'/E is swept
// backward from the radiation value q(L) = i*k_sub through constant-k
// sub-cells (midpoint-sampled coefficients, exact Moebius propagation per
// cell), which contracts toward the outgoing fixed point q = i k. The field
// itself is then rebuilt from the surface down by accumulating log E, so
// strongly decayed fields underflow gracefully instead of poisoning the sweep.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "gprls/constants.hpp"
#include "gprls/errors.hpp"
#include "gprls/medium.hpp"
#include "gprls/parallel.hpp"
#include "gprls/spectral.hpp"
#include "gprls/trace.hpp"

namespace gprls {

enum class PulseKind { ricker };

struct SourcePulse {
    PulseKind kind = PulseKind::ricker;
    double central_frequency = 2.0e8;  // Hz
    double delay = 1.5e-8;             // s, > 0 so the record starts at ~zero
    double z0 = -1.0;                  // m, source height above the surface (< 0)
    double T = 3.0e-8;                 // s, nominal support [0, T]
};

inline SourcePulse make_ricker(double fc, double z0, double delay = 0.0) {
    if (!(fc > 0.0))
        throw precondition_error("make_ricker: central frequency must be positive");
    if (!(z0 < 0.0))
        throw precondition_error("make_ricker: source must sit above the surface");
    SourcePulse p;
    p.central_frequency = fc;
    p.delay = delay > 0.0 ? delay : 3.0 / fc;
    p.z0 = z0;
    p.T = 2.0 * p.delay;
    return p;
}

// Standard zero-mean Ricker wavelet, unit peak at t = delay.
inline double ricker(double t, const SourcePulse& pulse) {
    const double tau = t - pulse.delay;
    const double fc = pulse.central_frequency;
    const double a = pi * pi * fc * fc * tau * tau;
    return (1.0 - 2.0 * a) * std::exp(-a);
}

// Closed-form transform of the Ricker wavelet, kernel exp(-i*omega*t) with
// 1/sqrt(2*pi) normalization; entire in omega, valid at complex frequency.
inline cplx ricker_spectrum(const SourcePulse& pulse, cplx omega) {
    const double fc = pulse.central_frequency;
    const double b = pi * pi * fc * fc;
    const cplx w2 = omega * omega;
    return std::exp(-iu * omega * pulse.delay) * w2 * std::exp(-w2 / (4.0 * b)) /
           (2.0 * std::sqrt(2.0) * pi * pi * pi * fc * fc * fc);
}

// h(omega) = i*mu0*mu*omega*f~(omega): the boundary forcing produced by the
// line source once it is folded into the surface Robin condition.
inline cplx source_spectrum(const SourcePulse& pulse, ComplexFrequency omega,
                            double mu = 1.0) {
    const cplx w = omega.value();
    return iu * phys.mu0 * mu * w * ricker_spectrum(pulse, w);
}

// One constant-coefficient Riccati step. dz > 0 moves toward the surface
// (the backward sweep); dz < 0 moves away from it. Exact for constant k.
// Evaluated through tanh so the deep-slab limit saturates at the outgoing
// fixed point instead of overflowing; near tan poles (real k) the reciprocal
// form keeps the Moebius map finite.
inline cplx propagate_slab_q(cplx q_in, cplx k, double dz) {
    if (k == cplx{0.0, 0.0})
        throw domain_error("propagate_slab_q: zero wavenumber");
    const cplx ik = iu * k;
    const cplx th = std::tanh(-ik * dz);
    cplx num, den;
    if (std::isfinite(th.real()) && std::isfinite(th.imag()) && std::abs(th) <= 1.0) {
        num = q_in + ik * th;
        den = ik + q_in * th;
    } else {
        cplx s = cplx{0.0, 0.0};
        if (std::isfinite(th.real()) && std::isfinite(th.imag()))
            s = 1.0 / th;
        num = q_in * s + ik;
        den = ik * s + q_in;
    }
    if (den == cplx{0.0, 0.0})
        throw numeric_error("propagate_slab_q: pole crossing in the Riccati flow");
    return ik * num / den;
}

// Exact constant-coefficient propagator for (E, E_z) over a step dz (signed;
// positive moves deeper). cos(k*dz) and sin(k*dz)/k are even in k, so the
// branch of k is irrelevant and k == 0 is regular (series below |k*dz| = 1e-4).
inline std::pair<cplx, cplx> propagate_slab_field(cplx E, cplx E_z, cplx k,
                                                  double dz) {
    const cplx x = k * dz;
    cplx cosx, sinc_dz;  // cos(k dz), sin(k dz)/k
    if (std::abs(x) < 1e-4) {
        const cplx x2 = x * x;
        cosx = 1.0 - x2 / 2.0 + x2 * x2 / 24.0;
        sinc_dz = dz * (1.0 - x2 / 6.0 + x2 * x2 / 120.0);
    } else {
        cosx = std::cos(x);
        sinc_dz = std::sin(x) / k;
    }
    return {E * cosx + E_z * sinc_dz, -E * k * k * sinc_dz + E_z * cosx};
}

// Piecewise-constant sub-cell discretization of a profile at one frequency.
struct SlabGrid {
    std::vector<double> z;               // cell boundaries, front() = 0, back() = L
    std::vector<cplx> k;                 // midpoint wavenumber per cell
    std::vector<std::size_t> cell_layer; // owning layer per cell
    cplx k_substrate{};
};

inline SlabGrid build_slab_grid(const MediumProfile& p, ComplexFrequency omega,
                                int nz_per_layer) {
    if (nz_per_layer < 1)
        throw precondition_error("build_slab_grid: need at least one cell per layer");
    if (!omega.valid())
        throw precondition_error("build_slab_grid: invalid complex frequency");
    SlabGrid g;
    g.z.push_back(0.0);
    for (std::size_t j = 0; j < p.layers.size(); ++j) {
        const Layer& lay = p.layers[j];
        const double dz = lay.thickness() / nz_per_layer;
        for (int m = 0; m < nz_per_layer; ++m) {
            const double zmid = lay.z_top + (m + 0.5) * dz;
            g.k.push_back(branch_root(
                wavenumber_squared(lay.eps_at(zmid), lay.sigma_at(zmid), p.mu, omega)));
            g.cell_layer.push_back(j);
            g.z.push_back(m + 1 == nz_per_layer ? lay.z_bottom
                                                : lay.z_top + (m + 1) * dz);
        }
    }
    g.k_substrate =
        branch_root(wavenumber_squared(p.eps_substrate, 0.0, p.mu, omega));
    return g;
}

// Backward impedance sweep: q at every cell boundary, q.back() = i*k_sub.
inline std::vector<cplx> riccati_sweep(const SlabGrid& g) {
    const std::size_t m = g.k.size();
    std::vector<cplx> q(m + 1);
    q[m] = iu * g.k_substrate;
    for (std::size_t c = m; c-- > 0;)
        q[c] = propagate_slab_q(q[c + 1], g.k[c], g.z[c + 1] - g.z[c]);
    return q;
}

struct SurfaceResponse {
    cplx E;    // E(0, omega)
    cplx E_z;  // dE/dz(0, omega)
    cplx q;    // E_z / E
};

// Applies the surface Robin condition to a swept impedance q(0).
inline SurfaceResponse apply_robin_condition(cplx q0, const MediumProfile& p,
                                             ComplexFrequency omega,
                                             const SourcePulse& pulse) {
    const cplx k0 = -omega.value() / phys.c;
    const cplx den = q0 + iu * k0;
    const double scale = std::abs(q0) + std::abs(k0);
    if (std::abs(den) <= 1e-14 * scale)
        throw numeric_error("surface Robin condition is resonant (q(0) = -i k0)");
    const cplx h = source_spectrum(pulse, omega, p.mu);
    const cplx E0 = h * std::exp(-iu * k0 * pulse.z0) / den;
    return {E0, q0 * E0, q0};
}

// Phases 1-2 of the solve: sweep q to the surface and apply the Robin
// condition. Enough for trace synthesis, which never needs interior fields.
inline SurfaceResponse surface_response(const MediumProfile& p,
                                        ComplexFrequency omega,
                                        const SourcePulse& pulse,
                                        int nz_per_layer = 64) {
    const SlabGrid g = build_slab_grid(p, omega, nz_per_layer);
    const std::vector<cplx> q = riccati_sweep(g);
    return apply_robin_condition(q.front(), p, omega, pulse);
}

struct FieldSolution {
    std::vector<double> z_grid;
    std::vector<cplx> E;
    std::vector<cplx> E_z;
    ComplexFrequency omega;
};

// Full two-phase solve on the sub-cell grid. The reconstruction accumulates
// log E per cell,
//   log E(b) - log E(a) = i*k*dz + log(1 + rho_b) - log(1 + rho_a),
// where rho = (i*k - q)/(i*k + q) is the local up-going admixture, so the
// product of per-cell ratios never overflows for strongly decaying fields.
inline FieldSolution solve_bvp(const MediumProfile& p, ComplexFrequency omega,
                               const SourcePulse& pulse, int nz_per_layer = 64) {
    const SlabGrid g = build_slab_grid(p, omega, nz_per_layer);
    const std::vector<cplx> q = riccati_sweep(g);
    const SurfaceResponse top = apply_robin_condition(q.front(), p, omega, pulse);

    FieldSolution sol;
    sol.omega = omega;
    sol.z_grid = g.z;
    sol.E.resize(g.z.size());
    sol.E_z.resize(g.z.size());
    sol.E[0] = top.E;
    sol.E_z[0] = top.E_z;

    const cplx logE0 = std::log(top.E);
    cplx accum = 0.0;
    for (std::size_t c = 0; c < g.k.size(); ++c) {
        const cplx ik = iu * g.k[c];
        const double dz = g.z[c + 1] - g.z[c];
        const cplx den_a = ik + q[c];
        const cplx den_b = ik + q[c + 1];
        if (den_a == cplx{0.0, 0.0} || den_b == cplx{0.0, 0.0})
            throw numeric_error("solve_bvp: incoming-wave pole in reconstruction");
        const cplx rho_a = (ik - q[c]) / den_a;
        const cplx rho_b = rho_a * std::exp(-2.0 * ik * dz);
        const cplx one_a = 1.0 + rho_a;
        const cplx one_b = 1.0 + rho_b;
        if (one_a == cplx{0.0, 0.0} || one_b == cplx{0.0, 0.0})
            throw numeric_error("solve_bvp: field node collision in reconstruction");
        accum += ik * dz + std::log(one_b) - std::log(one_a);
        sol.E[c + 1] = std::exp(logE0 + accum);
        sol.E_z[c + 1] = q[c + 1] * sol.E[c + 1];
        if (!std::isfinite(sol.E[c + 1].real()) || !std::isfinite(sol.E[c + 1].imag()))
            throw numeric_error("solve_bvp: non-finite field value");
    }
    return sol;
}

namespace detail {

// Fraction of the pulse's spectral energy above the Nyquist frequency,
// via Simpson quadrature of the closed-form |f~|^2.
inline double energy_fraction_above(const SourcePulse& pulse, double omega_nyq) {
    auto df = [&](double w) {
        const double m = std::abs(ricker_spectrum(pulse, cplx{w, 0.0}));
        return m * m;
    };
    auto simpson = [&](double a, double b, int n) {
        const double h = (b - a) / n;
        double s = df(a) + df(b);
        for (int i = 1; i < n; ++i)
            s += df(a + i * h) * (i % 2 ? 4.0 : 2.0);
        return s * h / 3.0;
    };
    const double body = simpson(0.0, omega_nyq, 4096);
    const double tail = simpson(omega_nyq, 8.0 * omega_nyq, 4096);
    return tail / (body + tail);
}

} // namespace detail

// Solves the direct problem on the real-frequency FFT grid and assembles the
// causal surface record. Bins whose source amplitude falls below 1e-12 of the
// peak carry nothing and are skipped; the omega = 0 bin is zero because
// h(0) = 0. Per-bin solves are independent and run as a parallel map.
inline TimeTrace synthesize_traces(const MediumProfile& p, const SourcePulse& pulse,
                                   std::size_t n_samples, double dt,
                                   int nz_per_layer = 64, unsigned threads = 1) {
    if (!is_power_of_two(n_samples) || n_samples < 4)
        throw precondition_error("synthesize_traces: n_samples must be a power of two");
    if (!(dt > 0.0))
        throw precondition_error("synthesize_traces: dt must be positive");
    if (!(pulse.delay > 0.0) || !(pulse.z0 < 0.0))
        throw precondition_error("synthesize_traces: invalid source pulse");

    const double omega_nyq = pi / dt;
    const double leak = detail::energy_fraction_above(pulse, omega_nyq);
    if (leak > 1e-6)
        throw sampling_error("synthesize_traces: pulse energy above Nyquist exceeds 1e-6");

    const double domega = 2.0 * pi / (static_cast<double>(n_samples) * dt);
    const std::size_t n_bins = n_samples / 2 + 1;

    double h_peak = 0.0;
    std::vector<double> h_mag(n_bins, 0.0);
    for (std::size_t j = 1; j < n_bins; ++j) {
        h_mag[j] = std::abs(source_spectrum(pulse, {domega * static_cast<double>(j), 0.0},
                                            p.mu));
        h_peak = std::max(h_peak, h_mag[j]);
    }

    Spectrum se, sz;
    se.domega = sz.domega = domega;
    se.kind = SpectrumKind::field;
    sz.kind = SpectrumKind::derivative;
    se.values.assign(n_bins, cplx{});
    sz.values.assign(n_bins, cplx{});

    std::vector<std::size_t> active;
    for (std::size_t j = 1; j < n_bins; ++j)
        if (h_mag[j] >= 1e-12 * h_peak)
            active.push_back(j);

    parallel_for(active.size(), threads, [&](std::size_t i) {
        const std::size_t j = active[i];
        const ComplexFrequency w{domega * static_cast<double>(j), 0.0};
        const SurfaceResponse r = surface_response(p, w, pulse, nz_per_layer);
        se.values[j] = r.E;
        sz.values[j] = r.E_z;
    });

    TimeTrace tr = inverse_transform(se, sz, n_samples, dt);
    tr.t0 = 0.0;
    tr.depth = 0.0;
    return tr;
}

} // namespace gprls
