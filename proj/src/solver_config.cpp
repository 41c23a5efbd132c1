#include "qlip/solver_config.hpp"

#include "qlip/error.hpp"

namespace qlip {

void SolverConfig::validate() const {
    if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
    if (max_iters <= 0) throw InvalidArgument("max_iters must be positive");
    if (max_pivots <= 0) throw InvalidArgument("max_pivots must be positive");
    if (!(penalty > 0.0)) throw InvalidArgument("penalty must be positive");
}

} // namespace qlip
