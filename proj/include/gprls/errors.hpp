#pragma once

#include <stdexcept>
#include <string>

namespace gprls {

// Base class for all library failures.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition (bad delta, bad ratio, ...).
struct precondition_error : error {
    using error::error;
};

// Input outside the domain of an operation (z out of range, zero wavenumber).
struct domain_error : error {
    using error::error;
};

// A numerical degeneracy: pole crossing, resonant denominator, overflow.
struct numeric_error : error {
    using error::error;
};

// Spectrum empty above the cutoff, or no impulse above threshold.
struct no_signal_error : error {
    using error::error;
};

// Damped transform would retain no significant samples.
struct continuation_error : error {
    using error::error;
};

// Trace sampling cannot represent the pulse (energy above Nyquist).
struct sampling_error : error {
    using error::error;
};

// Malformed or inconsistent file content.
struct format_error : error {
    using error::error;
};

} // namespace gprls
