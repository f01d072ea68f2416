#pragma once

// Layer stripping. One strip runs the per-layer pipeline:
//   I    FFT the records at the current layer top
//   II   pick the working real frequency (spectral peak above the cutoff)
//   III  set omega2 = ratio * omega1 (default ratio -0.9)
//   IV   continue E and E_z to the complex frequency (damped transform)
//   V    k_top = -i E_z/E  -- valid up to the relative error kappa
//   VI   invert k_top^2 for (eps, sigma), wave speed c/sqrt(mu*eps)
//   VII  pick the first two envelope arrivals; thickness = speed * dt/2
//   VIII propagate every energetic real-frequency bin across the layer with
//        the constant recovered (eps, sigma)
//   IX   inverse FFT at the layer bottom
//   X    shift the clock by the one-way travel time
// and hands the bottom-of-layer records to the next strip.
//
// Everything is a ratio of spectra at heart, so the pipeline is invariant
// under rescaling of the input records.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gprls/constants.hpp"
#include "gprls/errors.hpp"
#include "gprls/fft.hpp"
#include "gprls/forward.hpp"
#include "gprls/medium.hpp"
#include "gprls/parallel.hpp"
#include "gprls/spectral.hpp"
#include "gprls/trace.hpp"

namespace gprls {

// k at the layer top from the continued field values. The caller treats the
// result as the local wavenumber up to the relative error kappa bounded by
// 2*delta/(1-delta).
inline cplx estimate_k_top(cplx E_hat, cplx Ez_hat) {
    if (std::abs(E_hat) < 1e-280)
        throw numeric_error("estimate_k_top: |E| below division floor");
    return -iu * Ez_hat / E_hat;
}

// Exact algebraic inverse of wavenumber_squared. The sigma expression is the
// corrected companion of the permittivity formula: expanding k^2 termwise
// fixes the sign of the (omega1/omega2 - omega2/omega1) factor, and writing
// it without the 1/omega2 singularity makes the omega2 -> 0 limit
// (sigma = -Im k^2/(mu0*mu*omega1)) fall out of the same expression.
inline std::pair<double, double> recover_eps_sigma(cplx k_squared,
                                                   ComplexFrequency omega,
                                                   double mu) {
    if (!(omega.omega1 > 0.0))
        throw precondition_error("recover_eps_sigma: omega1 must be positive");
    const double R = k_squared.real();
    const double I = k_squared.imag();
    const double w1 = omega.omega1;
    const double w2 = omega.omega2;
    const double aw2 = omega.abs2();
    const double eps = phys.c * phys.c * (R + (w2 / w1) * I) / (mu * aw2);
    const double sigma =
        (2.0 * R * w2 + I * (w2 * w2 - w1 * w1) / w1) / (phys.mu0 * mu * aw2);
    return {eps, sigma};
}

namespace detail {

// Analytic-signal magnitude via the Hermitian spectral method.
inline std::vector<double> envelope(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> buf(n);
    for (std::size_t i = 0; i < n; ++i)
        buf[i] = x[i];
    fft_complex(buf, -1);
    for (std::size_t j = 1; j < n / 2; ++j)
        buf[j] *= 2.0;
    for (std::size_t j = n / 2 + 1; j < n; ++j)
        buf[j] = 0.0;
    fft_complex(buf, +1);
    std::vector<double> env(n);
    for (std::size_t i = 0; i < n; ++i)
        env[i] = std::abs(buf[i]) / static_cast<double>(n);
    return env;
}

struct ImpulseCluster {
    double time = 0.0;   // representative (strongest) peak
    int raw_peaks = 0;   // local maxima merged into this cluster
};

inline std::vector<ImpulseCluster> detect_impulse_clusters(
    const TimeTrace& tr, double threshold_ratio, double min_separation) {
    if (!(threshold_ratio > 0.0 && threshold_ratio < 1.0))
        throw precondition_error("detect_impulses: threshold must lie in (0, 1)");
    require_transformable(tr);
    const std::vector<double> env = envelope(tr.E);
    const double gmax = *std::max_element(env.begin(), env.end());
    if (!(gmax > 0.0))
        throw no_signal_error("detect_impulses: empty record");
    const double floor = threshold_ratio * gmax;

    std::vector<ImpulseCluster> clusters;
    double last_t = -std::numeric_limits<double>::infinity();
    double best_mag = 0.0;
    for (std::size_t i = 1; i + 1 < env.size(); ++i) {
        if (env[i] < floor || env[i] < env[i - 1] || env[i] <= env[i + 1])
            continue;
        const double t = tr.t0 + static_cast<double>(i) * tr.dt;
        if (!clusters.empty() && t - last_t < min_separation) {
            clusters.back().raw_peaks += 1;
            if (env[i] > best_mag) {
                best_mag = env[i];
                clusters.back().time = t;
            }
        } else {
            clusters.push_back({t, 1});
            best_mag = env[i];
        }
        last_t = t;
    }
    if (clusters.empty())
        throw no_signal_error("detect_impulses: no arrival above threshold");
    return clusters;
}

} // namespace detail

// Arrival times by envelope peak picking: local maxima above
// threshold_ratio * max, merged when closer than min_separation (one pulse
// width, 3/f_c, supplied by the caller who knows the working frequency).
inline std::vector<double> detect_impulses(const TimeTrace& tr,
                                           double threshold_ratio,
                                           double min_separation) {
    std::vector<double> times;
    for (const auto& c :
         detail::detect_impulse_clusters(tr, threshold_ratio, min_separation))
        times.push_back(c.time);
    return times;
}

// Two-way travel time between the direct impulse and the bottom reflection.
// A single arrival means the layer has no detectable bottom: terminal.
inline std::optional<double> thickness_from_arrivals(
    const std::vector<double>& arrivals, double speed) {
    if (!(speed > 0.0))
        throw precondition_error("thickness_from_arrivals: speed must be positive");
    if (arrivals.empty())
        throw no_signal_error("thickness_from_arrivals: no arrivals");
    if (arrivals.size() < 2)
        return std::nullopt;
    return speed * (arrivals[1] - arrivals[0]) / 2.0;
}

struct LayerEstimate {
    double eps_hat = 0.0;
    double sigma_hat = 0.0;    // S/m
    double speed_hat = 0.0;    // m/s
    double thickness_hat = std::numeric_limits<double>::quiet_NaN();  // m
    ComplexFrequency omega_used;
    cplx q_top{};
    double kappa_bound_used = std::numeric_limits<double>::quiet_NaN();
    bool terminal = false;
    std::vector<std::string> flags;

    bool has_flag(const std::string& f) const {
        return std::find(flags.begin(), flags.end(), f) != flags.end();
    }
};

struct StripOptions {
    double threshold_ratio = 0.05;   // impulse picking threshold
    double cutoff_fraction = 0.05;   // low-frequency exclusion, fraction of Nyquist
    std::size_t guard_samples = 64;  // desired pre-arrival lead-in
    std::optional<double> delta;     // fills kappa_bound_used when known
    unsigned threads = 1;
};

struct StripResult {
    LayerEstimate estimate;
    std::optional<TimeTrace> next;  // records at the next layer top
};

inline StripResult strip_layer(const TimeTrace& trace, double mu,
                               double omega2_ratio,
                               const StripOptions& opts = {}) {
    require_transformable(trace);
    const std::size_t n = trace.size();

    // I-III
    auto [spec_e, spec_z] = forward_transform(trace);
    const ComplexFrequency w1 =
        select_omega1(spec_e, opts.cutoff_fraction * spec_e.nyquist());
    const ComplexFrequency omega = choose_omega2(w1.omega1, omega2_ratio);

    // IV-VI
    const auto [E_hat, Ez_hat] = continue_to_complex(trace, omega);
    const cplx k_top = estimate_k_top(E_hat, Ez_hat);
    auto [eps, sigma] = recover_eps_sigma(k_top * k_top, omega, mu);

    LayerEstimate est;
    est.omega_used = omega;
    est.q_top = Ez_hat / E_hat;
    if (opts.delta)
        est.kappa_bound_used = kappa_bound(*opts.delta);
    if (sigma < 0.0) {
        if (sigma >= -1e-6) {
            sigma = 0.0;
            est.flags.push_back("sigma_clipped");
        } else {
            est.flags.push_back("unreliable");
        }
    }
    est.eps_hat = eps;
    est.sigma_hat = sigma;
    if (!(eps > 0.0)) {
        est.flags.push_back("unreliable");
        est.terminal = true;
        return {est, std::nullopt};
    }
    est.speed_hat = phys.c / std::sqrt(mu * eps);

    // VII
    const double fc_est = omega.omega1 / (2.0 * pi);
    const double pulse_width = 3.0 / fc_est;
    const auto clusters =
        detail::detect_impulse_clusters(trace, opts.threshold_ratio, pulse_width);
    std::vector<double> arrivals;
    for (const auto& c : clusters)
        arrivals.push_back(c.time);
    const std::optional<double> thickness =
        thickness_from_arrivals(arrivals, est.speed_hat);
    if (!thickness) {
        est.terminal = true;
        if (clusters.front().raw_peaks > 1)
            est.flags.push_back("no_separation");
        return {est, std::nullopt};
    }
    est.thickness_hat = *thickness;

    // VIII: constant-coefficient transfer of every energetic bin
    double peak = 0.0;
    for (std::size_t j = 1; j < spec_e.n_bins(); ++j)
        peak = std::max(peak, std::abs(spec_e.values[j]));
    std::vector<std::size_t> active;
    for (std::size_t j = 1; j < spec_e.n_bins(); ++j)
        if (std::abs(spec_e.values[j]) >= 1e-12 * peak)
            active.push_back(j);

    Spectrum out_e = spec_e, out_z = spec_z;
    std::fill(out_e.values.begin(), out_e.values.end(), cplx{});
    std::fill(out_z.values.begin(), out_z.values.end(), cplx{});
    const double d = *thickness;
    parallel_for(active.size(), opts.threads, [&](std::size_t i) {
        const std::size_t j = active[i];
        const ComplexFrequency wj{spec_e.domega * static_cast<double>(j), 0.0};
        const cplx k = branch_root(wavenumber_squared(eps, sigma, mu, wj));
        const auto [Eb, Ezb] =
            propagate_slab_field(spec_e.values[j], spec_z.values[j], k, d);
        out_e.values[j] = Eb;
        out_z.values[j] = Ezb;
    });

    // IX-X
    TimeTrace next = inverse_transform(out_e, out_z, n, trace.dt);
    next.t0 = trace.t0;
    next.depth = trace.depth + d;
    const double shift = d / est.speed_hat;  // one-way travel to the next top
    next = rescale_time(next, shift);

    // The shift preserves the pre-arrival lead-in inherited from the surface
    // record; warn when little of it remains for the next continuation.
    const double front = arrivals.front() - next.t0 - 0.5 * pulse_width;
    if (front < static_cast<double>(opts.guard_samples) * trace.dt)
        est.flags.push_back("thin_lead_in");

    return {est, std::move(next)};
}

struct ReconstructionReport {
    std::vector<LayerEstimate> estimates;
    std::vector<double> top_depths;  // cumulative, top_depths[j] = depth of layer j
    bool energy_exhausted = false;

    std::size_t layer_count() const { return estimates.size(); }
};

struct InvertOptions : StripOptions {
    double omega2_ratio = -0.9;
};

// Strips layers until a terminal signal, layer budget, energy exhaustion, or
// an implausible estimate (eps outside [1, 100] stops the descent).
inline ReconstructionReport invert_profile(const TimeTrace& trace, double mu,
                                           int max_layers,
                                           const InvertOptions& opts = {}) {
    ReconstructionReport rep;
    if (max_layers <= 0)
        return rep;
    require_transformable(trace);

    double energy0 = 0.0;
    for (double v : trace.E)
        energy0 += v * v;

    TimeTrace current = trace;
    double depth = 0.0;
    for (int iter = 0; iter < max_layers; ++iter) {
        double energy = 0.0;
        for (double v : current.E)
            energy += v * v;
        if (energy < 1e-6 * energy0) {
            rep.energy_exhausted = true;
            break;
        }
        StripResult res = strip_layer(current, mu, opts.omega2_ratio, opts);
        LayerEstimate est = std::move(res.estimate);
        rep.top_depths.push_back(depth);
        if (est.eps_hat < 1.0 - 1e-9 || est.eps_hat > 100.0) {
            if (!est.has_flag("unreliable"))
                est.flags.push_back("unreliable");
            rep.estimates.push_back(std::move(est));
            break;
        }
        const bool terminal = est.terminal;
        if (!terminal)
            depth += est.thickness_hat;
        rep.estimates.push_back(std::move(est));
        if (terminal || !res.next)
            break;
        current = std::move(*res.next);
    }
    return rep;
}

struct LayerErrorRow {
    std::size_t layer = 0;
    double eps_rel = 0.0;
    double sigma_err = 0.0;     // relative when true sigma > 1e-12, else absolute
    bool sigma_err_relative = true;
    double thickness_rel = std::numeric_limits<double>::quiet_NaN();
    bool excluded = false;
    std::string note;
};

struct CompareResult {
    std::vector<LayerErrorRow> rows;
    double first_layer_eps_error = std::numeric_limits<double>::quiet_NaN();
};

// Scores a reconstruction against the true profile. Estimates are aligned by
// depth: each recovered layer is matched to the true layer containing its
// top; estimates starting beyond the true depth L are flagged as extras.
inline CompareResult compare_reconstruction(const ReconstructionReport& rep,
                                            const MediumProfile& truth) {
    CompareResult out;
    for (std::size_t j = 0; j < rep.estimates.size(); ++j) {
        const LayerEstimate& est = rep.estimates[j];
        LayerErrorRow row;
        row.layer = j + 1;
        const double top = rep.top_depths[j];
        if (est.has_flag("unreliable")) {
            row.excluded = true;
            row.note = "unreliable";
            out.rows.push_back(row);
            continue;
        }
        if (top >= truth.L) {
            row.excluded = true;
            row.note = "beyond true depth";
            out.rows.push_back(row);
            continue;
        }
        const ProfileSample s = sample_profile(truth, top);
        row.eps_rel = std::abs(est.eps_hat - s.eps) / s.eps;
        if (s.sigma > 1e-12) {
            row.sigma_err = std::abs(est.sigma_hat - s.sigma) / s.sigma;
            row.sigma_err_relative = true;
        } else {
            row.sigma_err = std::abs(est.sigma_hat - s.sigma);
            row.sigma_err_relative = false;
        }
        if (!est.terminal && s.layer_index < truth.layers.size()) {
            const double true_thick = truth.layers[s.layer_index].thickness();
            row.thickness_rel = std::abs(est.thickness_hat - true_thick) / true_thick;
        }
        out.rows.push_back(row);
    }
    if (!out.rows.empty() && !out.rows.front().excluded)
        out.first_layer_eps_error = out.rows.front().eps_rel;
    return out;
}

} // namespace gprls
