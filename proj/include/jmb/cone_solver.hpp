#pragma once

#include <string>
#include <vector>

#include "jmb/awmse.hpp"
#include "jmb/mmse.hpp"

namespace jmb {

// One convex quadratic constraint over the stacked real decision vector x,
// optionally coupled to the epigraph scalars:
//   x^T Q x + b^T x + d + coef_xi * xi + coef_xi_c * xi_c <= 0
// Q must be symmetric PSD (within numerical noise).
struct QuadConstraint {
    RMat Q;
    RVec b;
    double d = 0.0;
    double coef_xi = 0.0;
    double coef_xi_c = 0.0;
};

// Epigraph QCQP: minimize xi subject to the quadratic constraints above and
// the ball constraint ||x||^2 <= power_cap. Every constraint must be
// relaxable through an epigraph variable (coef_xi < 0, or coef_xi == 0 with
// coef_xi_c < 0), which makes x = 0 with large epigraph values feasible.
struct ConvexQcqp {
    int dim = 0;  // real dimension of x
    std::vector<QuadConstraint> constraints;
    double power_cap = 0.0;
    bool has_common_epigraph = false;

    // Optional precoder layout: when n_tx > 0, x stacks [Re p; Im p] blocks
    // of 2*n_tx reals per column, common column first when common_column.
    int n_tx = 0;
    bool common_column = false;
};

enum class SolveStatus { Optimal, MaxIterations, NumericalTrouble };

struct SolverReport {
    Precoder precoder;  // populated only when the problem carries a layout
    RVec x;
    double xi = 0.0;
    double xi_common = 0.0;  // 0 when the problem has no common epigraph
    int iterations = 0;
    double kkt_residual = 0.0;
    SolveStatus status = SolveStatus::NumericalTrouble;
};

struct SolverOptions {
    double tol = 1e-8;
    int max_iterations = 100;
    bool trace = false;  // per-iteration residuals on stderr
};

// Standard real embedding of Hermitian forms: p^H A p == re(p)_stack^T
// embed(A) re(p)_stack with re(p)_stack = [Re p; Im p].
RMat real_embed(const CMat& a);
RVec real_embed(const CVec& v);

// Precoder-update problem from the averaged components and a partition:
// K private constraints (coupled c_k * (xi_c - 1) <= xi), K common
// constraints (<= xi_c), and the transmit power ball.
ConvexQcqp assemble(const AwmseComponents& comp, const RVec& coeffs, double noise_var,
                    double power_cap);

// Variant without the common stream: K private constraints only, private
// precoder columns only. Used by conventional BC transmission.
ConvexQcqp assemble_private_only(const AwmseComponents& comp, double noise_var,
                                 double power_cap);

// Primal-dual interior-point solve over second-order cones (each quadratic
// constraint contributes one cone through its Cholesky factor, the power
// ball one more), Nesterov-Todd scaled, Mehrotra predictor-corrector.
SolverReport solve(const ConvexQcqp& qcqp, const SolverOptions& opts = {});

// Self-describing text dump for cross-validation against external solvers.
std::string dump(const ConvexQcqp& qcqp);
ConvexQcqp parse_dump(const std::string& text);

}  // namespace jmb
