#pragma once

#include <cstddef>
#include <vector>

#include "gprls/errors.hpp"

namespace gprls {

// Uniformly sampled field record at a fixed depth. Carries both the field
// E(t) and its depth derivative E_z(t) on the same clock. Sample n sits at
// local time n*dt; t0 records how the local clock relates to the original
// acquisition clock (rescaling bookkeeping), it does not enter transforms.
struct TimeTrace {
    double dt = 0.0;        // s
    double t0 = 0.0;        // s
    std::vector<double> E;  // V/m
    std::vector<double> E_z;// V/m^2
    double depth = 0.0;     // m, where the record was taken

    std::size_t size() const { return E.size(); }
};

inline bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

inline void require_transformable(const TimeTrace& t) {
    if (t.E.size() != t.E_z.size())
        throw format_error("trace: E and E_z sample counts differ");
    if (!is_power_of_two(t.size()))
        throw format_error("trace: length must be a power of two");
    if (!(t.dt > 0.0))
        throw format_error("trace: dt must be positive");
}

} // namespace gprls
