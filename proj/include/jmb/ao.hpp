#pragma once

#include <vector>

#include "jmb/awmse.hpp"
#include "jmb/cone_solver.hpp"
#include "jmb/model.hpp"
#include "jmb/partition.hpp"

namespace jmb {

enum class InitKind { ZfE, ZfSvd, Custom };
enum class TxMode { Jmb, ConventionalBc };

struct AoConfig {
    double eps_r = 1e-4;  // convergence threshold on the objective, bits
    int n_max = 200;
    InitKind init = InitKind::ZfSvd;
    TxMode mode = TxMode::Jmb;
    Precoder custom_init;  // used when init == Custom
    // Engineering defaults for the inner solver; tighter than the solver's
    // own default so the outer objective is monotone well inside eps_r.
    double solver_tol = 1e-9;
    int solver_max_iterations = 100;
};

// Objective values observed inside one iteration, in execution order:
// after the equalizer/weight update (previous coefficients), after the
// partition update, and from the precoder solve; plus the objective
// re-evaluated from fresh average rates at the new precoder.
struct IterationDiag {
    double obj_after_update;
    double obj_after_partition;
    double obj_solver;
    double obj_reevaluated;
};

struct AoResult {
    Precoder precoder;
    RVec coeffs;
    std::vector<double> objective_trace;  // solver objective per iteration, bits
    bool converged = false;
    AverageRates final_rates;
    std::vector<IterationDiag> diagnostics;
    int solver_fallbacks = 0;  // iterations where the solve hit its cap
};

struct InitPrecoder {
    Precoder precoder;
    bool regularized = false;  // rank-deficient estimate was regularized
};

// Zero-forcing private directions scaled to P_t^alpha / K each; common
// precoder carries the remaining power on the first canonical basis vector.
InitPrecoder init_zf_e(const Channel& estimate, double power, double alpha);

// Same split, common direction taken as the estimate's dominant left
// singular vector (phase fixed so the first nonzero entry is real-positive).
InitPrecoder init_zf_svd(const Channel& estimate, double power, double alpha);

// Alternating optimization: equalizers/weights -> partition -> precoders,
// repeated until the objective moves less than eps_r or n_max is reached.
// In ConventionalBc mode the common stream and partition are dropped and
// the objective is the minimum private average rate.
AoResult ao_solve(const Scenario& sc, const SampleSet& ss, const AoConfig& cfg);

}  // namespace jmb
