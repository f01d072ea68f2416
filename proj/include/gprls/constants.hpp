#pragma once

#include <cmath>
#include <complex>

namespace gprls {

using cplx = std::complex<double>;

inline constexpr cplx iu{0.0, 1.0};

// Vacuum constants. The light speed is derived from eps0 and mu0 so that
// c^2 * mu0 * eps0 == 1 holds to machine precision; do not replace it with
// the CODATA value, the wavenumber algebra relies on the identity.
struct PhysicalConstants {
    double eps0 = 8.854e-12;  // F/m
    double mu0  = 1.257e-6;   // H/m
    double c    = 1.0 / std::sqrt(8.854e-12 * 1.257e-6);  // m/s
};

inline const PhysicalConstants phys{};

inline constexpr double pi = 3.14159265358979323846;

} // namespace gprls
