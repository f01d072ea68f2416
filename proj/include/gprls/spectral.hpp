#pragma once

// Transform layer between time traces and (complex-) frequency data.
//
// Conventions, used consistently everywhere:
//   forward:   X_j = dt/(2*pi) * sum_n E_n exp(-i*omega_j*n*dt),  omega_j = j*domega
//   inverse:   E_n = domega    * sum_j X_j exp(+i*omega_j*n*dt)   (Hermitian sum)
// which is the discrete form of the transform pair with kernel exp(-i*omega*t)
// and 1/(2*pi) normalization. Only nonnegative bins are stored; the signal is
// real. Transforms act on the trace's local clock t_n = n*dt; the t0 field is
// alignment metadata and never enters a kernel.
//
// The continuation to omega = omega1 + i*omega2 (omega2 < 0) evaluates the
// same forward sum with the extra weight exp(omega2*t), which DECAYS for
// t > 0. (Writing the weight with the opposite sign would grow exponentially
// and leave the half-plane where the causal field is analytic.)

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "gprls/constants.hpp"
#include "gprls/errors.hpp"
#include "gprls/fft.hpp"
#include "gprls/medium.hpp"
#include "gprls/trace.hpp"

namespace gprls {

enum class SpectrumKind { field, derivative };

struct Spectrum {
    double domega = 0.0;       // rad/s
    std::vector<cplx> values;  // bins 0 .. n/2 of the underlying real record
    SpectrumKind kind = SpectrumKind::field;

    std::size_t n_bins() const { return values.size(); }
    std::size_t sample_count() const { return 2 * (values.size() - 1); }
    double nyquist() const { return domega * static_cast<double>(values.size() - 1); }
};

inline std::pair<Spectrum, Spectrum> forward_transform(const TimeTrace& tr) {
    require_transformable(tr);
    const std::size_t n = tr.size();
    const double scale = tr.dt / (2.0 * pi);
    Spectrum se, sz;
    se.domega = sz.domega = 2.0 * pi / (static_cast<double>(n) * tr.dt);
    se.kind = SpectrumKind::field;
    sz.kind = SpectrumKind::derivative;
    se.values = fft_r2c(tr.E);
    sz.values = fft_r2c(tr.E_z);
    for (auto& v : se.values) v *= scale;
    for (auto& v : sz.values) v *= scale;
    return {std::move(se), std::move(sz)};
}

// Working real frequency: the bin maximizing |X| strictly above the cutoff.
// Ties go to the lower frequency. The DC bin never qualifies.
inline ComplexFrequency select_omega1(const Spectrum& s, double exclusion_cutoff) {
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t j = 0; j < s.n_bins(); ++j) {
        const double w = s.domega * static_cast<double>(j);
        if (!(w > exclusion_cutoff))
            continue;
        const double mag = std::abs(s.values[j]);
        if (mag > best_mag) {
            best_mag = mag;
            best = j;
        }
    }
    if (best_mag <= 0.0)
        throw no_signal_error("select_omega1: spectrum empty above the cutoff");
    return {s.domega * static_cast<double>(best), 0.0};
}

inline ComplexFrequency choose_omega2(double omega1, double ratio) {
    if (!(omega1 > 0.0))
        throw precondition_error("choose_omega2: omega1 must be positive");
    if (!(ratio >= -1.0 && ratio <= 1.0 - std::sqrt(2.0)))
        throw precondition_error(
            "choose_omega2: ratio must lie in [-1, 1 - sqrt(2)]");
    return {omega1, ratio * omega1};
}

namespace detail {

// Deterministic pairwise (cascade) reduction; consumes the term buffer.
inline cplx pairwise_sum(std::vector<cplx>& terms) {
    if (terms.empty())
        return {};
    for (std::size_t width = 1; width < terms.size(); width *= 2)
        for (std::size_t i = 0; i + width < terms.size(); i += 2 * width)
            terms[i] += terms[i + width];
    return terms[0];
}

} // namespace detail

// Damped single-frequency transform of both channels:
//   X(omega) = dt/(2*pi) * sum_n exp(-i*omega1*t_n) * exp(omega2*t_n) * x_n.
// Samples whose damping weight drops below 1e-300 are dropped. If the
// damping kills every sample that carries signal the continuation is
// meaningless and a continuation_error is raised.
inline std::pair<cplx, cplx> continue_to_complex(const TimeTrace& tr,
                                                 ComplexFrequency omega) {
    if (tr.E.size() != tr.E_z.size() || tr.E.empty())
        throw format_error("continue_to_complex: malformed trace");
    if (!(tr.dt > 0.0))
        throw format_error("continue_to_complex: dt must be positive");
    if (!(omega.omega1 > 0.0) || omega.omega2 > 0.0)
        throw precondition_error("continue_to_complex: need omega1 > 0, omega2 <= 0");

    const std::size_t n = tr.size();
    std::vector<cplx> terms_e, terms_z;
    terms_e.reserve(n);
    terms_z.reserve(n);
    double signal_all = 0.0, signal_kept = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * tr.dt;
        const double mag = std::max(std::abs(tr.E[i]), std::abs(tr.E_z[i]));
        signal_all = std::max(signal_all, mag);
        const double weight = std::exp(omega.omega2 * t);
        if (weight < 1e-300)
            break;  // weight decays monotonically; nothing more to keep
        signal_kept = std::max(signal_kept, mag * weight);
        const cplx kernel = std::polar(weight, -omega.omega1 * t);
        terms_e.push_back(kernel * tr.E[i]);
        terms_z.push_back(kernel * tr.E_z[i]);
    }
    if (signal_all > 0.0 && signal_kept == 0.0)
        throw continuation_error(
            "continue_to_complex: damping weight annihilates all signal samples");

    const double scale = tr.dt / (2.0 * pi);
    return {scale * detail::pairwise_sum(terms_e),
            scale * detail::pairwise_sum(terms_z)};
}

inline TimeTrace inverse_transform(const Spectrum& spec_e, const Spectrum& spec_z,
                                   std::size_t n_samples, double dt) {
    if (spec_e.n_bins() != spec_z.n_bins())
        throw format_error("inverse_transform: spectra sizes differ");
    if (spec_e.kind != SpectrumKind::field || spec_z.kind != SpectrumKind::derivative)
        throw format_error("inverse_transform: spectrum kinds swapped or wrong");
    if (!is_power_of_two(n_samples) || spec_e.n_bins() != n_samples / 2 + 1)
        throw format_error("inverse_transform: bin count does not match n_samples");
    const double domega = 2.0 * pi / (static_cast<double>(n_samples) * dt);
    if (std::abs(spec_e.domega - domega) > 1e-9 * domega)
        throw format_error("inverse_transform: domega inconsistent with (n, dt)");

    TimeTrace tr;
    tr.dt = dt;
    tr.t0 = 0.0;
    tr.E = fft_c2r(spec_e.values, n_samples);
    tr.E_z = fft_c2r(spec_z.values, n_samples);
    for (auto& v : tr.E) v *= domega;
    for (auto& v : tr.E_z) v *= domega;
    return tr;
}

// Shifts the time origin forward by dt_shift: drops the leading
// round(dt_shift/dt) samples, zero-pads the tail, and stores the fractional
// remainder in t0 so no timing information is lost.
inline TimeTrace rescale_time(const TimeTrace& tr, double dt_shift) {
    if (dt_shift < 0.0)
        throw precondition_error("rescale_time: dt_shift must be >= 0");
    const std::size_t n = tr.size();
    const auto s = static_cast<std::size_t>(std::llround(dt_shift / tr.dt));
    if (s >= n)
        throw domain_error("rescale_time: shift exceeds the record length");
    TimeTrace out;
    out.dt = tr.dt;
    out.t0 = tr.t0 + static_cast<double>(s) * tr.dt - dt_shift;
    out.depth = tr.depth;
    out.E.assign(n, 0.0);
    out.E_z.assign(n, 0.0);
    std::copy(tr.E.begin() + static_cast<std::ptrdiff_t>(s), tr.E.end(), out.E.begin());
    std::copy(tr.E_z.begin() + static_cast<std::ptrdiff_t>(s), tr.E_z.end(),
              out.E_z.begin());
    return out;
}

} // namespace gprls
