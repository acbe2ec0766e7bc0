#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jmb/cone_solver.hpp"

namespace jmb {

// Reference solve of a ConvexQcqp, independent of the interior-point path:
// bisection on the objective level with a projected-gradient feasibility
// probe (accelerated, ball projection), refined by extrapolating the
// square-root of the residual violation to zero.
double reference_objective(const ConvexQcqp& qcqp);

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

// Cross-checks of the main numerical identities and oracle pairs:
// water-filling vs LP bisection, cone solver vs projected-gradient
// reference, two-path average-WMSE agreement, and the WMSE/rate duality.
std::vector<CheckResult> run_verification(std::uint64_t seed);

}  // namespace jmb
