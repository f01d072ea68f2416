#pragma once

// Thin wrapper over FFTW3 (double precision, FFTW_ESTIMATE plans so results
// are deterministic run to run). All transforms are unnormalized:
//   r2c:  X_k = sum_n x_n exp(-2*pi*i*k*n/N),  k = 0..N/2
//   c2r:  x_n = sum_k X_k exp(+2*pi*i*k*n/N)   over the Hermitian extension
// Not thread-safe (FFTW plan creation); call from one thread at a time.

#include <complex>
#include <cstddef>
#include <vector>

#include <fftw3.h>

#include "gprls/constants.hpp"
#include "gprls/errors.hpp"

namespace gprls {

inline std::vector<cplx> fft_r2c(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n == 0)
        throw format_error("fft_r2c: empty input");
    std::vector<double> in(x);
    std::vector<cplx> out(n / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(
        static_cast<int>(n), in.data(),
        reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return out;
}

// bins.size() must be n/2 + 1. Imaginary parts of the DC and Nyquist bins
// are ignored (a real signal has none).
inline std::vector<double> fft_c2r(const std::vector<cplx>& bins, std::size_t n) {
    if (bins.size() != n / 2 + 1)
        throw format_error("fft_c2r: bin count does not match n/2 + 1");
    std::vector<cplx> in(bins);
    in.front() = cplx{in.front().real(), 0.0};
    in.back() = cplx{in.back().real(), 0.0};
    std::vector<double> out(n);
    fftw_plan plan = fftw_plan_dft_c2r_1d(
        static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
        out.data(), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return out;
}

// In-place complex DFT; sign = -1 forward, +1 backward (unnormalized).
inline void fft_complex(std::vector<cplx>& x, int sign) {
    fftw_plan plan = fftw_plan_dft_1d(
        static_cast<int>(x.size()),
        reinterpret_cast<fftw_complex*>(x.data()),
        reinterpret_cast<fftw_complex*>(x.data()),
        sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

} // namespace gprls
