#pragma once

#include <cstdint>

namespace qlip {

struct SolverConfig {
    double tol = 1e-6;                  // splitting solver residual tolerance
    std::int64_t max_iters = 20000;     // splitting solver iteration cap
    std::int64_t max_pivots = 100000;   // simplex pivot cap
    double penalty = 1.0;               // initial augmented coupling penalty

    /// Throws InvalidArgument naming the first non-positive field.
    void validate() const;
};

} // namespace qlip
