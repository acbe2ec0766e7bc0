#include "jmb/ao.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace jmb {

namespace {

// Power split of the initializations: private streams share min(P_t^alpha,
// P_t); whatever remains goes to the common stream. The clamp only matters
// for P_t < 1 where P_t^alpha would exceed the budget.
struct PowerSplit {
    double private_each;
    double common;
};

PowerSplit init_power_split(double power, double alpha, int K) {
    const double p_priv = std::min(std::pow(power, alpha), power);
    return {p_priv / K, power - p_priv};
}

// Unit-norm zero-forcing directions from the estimate: columns of
// Hhat (Hhat^H Hhat)^-1, regularized when the Gram matrix is near singular.
std::pair<CMat, bool> zf_directions(const CMat& hhat) {
    const Eigen::Index K = hhat.cols();
    CMat gram = hhat.adjoint() * hhat;
    const double thresh = 1e-8 * hhat.norm();
    Eigen::JacobiSVD<CMat> svd(hhat);
    bool regularized = false;
    if (svd.singularValues().minCoeff() <= thresh) {
        regularized = true;
        gram += thresh * thresh * CMat::Identity(K, K);
    }
    CMat dirs = gram.ldlt().solve(hhat.adjoint()).adjoint();  // = Hhat gram^-1
    for (Eigen::Index j = 0; j < K; ++j) {
        const double nrm = dirs.col(j).norm();
        if (nrm > 0.0) dirs.col(j) /= nrm;
    }
    return {dirs, regularized};
}

void check_init_args(const Channel& estimate, double power, double alpha) {
    if (estimate.users() < 1 || estimate.users() > estimate.antennas())
        throw std::invalid_argument("init: need 1 <= K <= N_t");
    if (!(power > 0.0)) throw std::invalid_argument("init: power must be > 0");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("init: alpha must be in [0, 1]");
}

}  // namespace

InitPrecoder init_zf_e(const Channel& estimate, double power, double alpha) {
    check_init_args(estimate, power, alpha);
    const int nt = estimate.antennas();
    const int K = estimate.users();
    const auto [dirs, regularized] = zf_directions(estimate.matrix);
    const PowerSplit split = init_power_split(power, alpha, K);

    InitPrecoder out;
    out.regularized = regularized;
    out.precoder.common = CVec::Zero(nt);
    out.precoder.common(0) = std::sqrt(split.common);
    for (int k = 0; k < K; ++k)
        out.precoder.private_cols.push_back(std::sqrt(split.private_each) * dirs.col(k));
    return out;
}

InitPrecoder init_zf_svd(const Channel& estimate, double power, double alpha) {
    check_init_args(estimate, power, alpha);
    const int K = estimate.users();
    const auto [dirs, regularized] = zf_directions(estimate.matrix);
    const PowerSplit split = init_power_split(power, alpha, K);

    Eigen::JacobiSVD<CMat> svd(estimate.matrix, Eigen::ComputeThinU);
    CVec u = svd.matrixU().col(0);
    // Deterministic phase: first non-negligible entry made real-positive.
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (std::abs(u(i)) > 1e-12 * u.norm()) {
            u *= std::conj(u(i)) / std::abs(u(i));
            break;
        }
    }

    InitPrecoder out;
    out.regularized = regularized;
    out.precoder.common = std::sqrt(split.common) * u;
    for (int k = 0; k < K; ++k)
        out.precoder.private_cols.push_back(std::sqrt(split.private_each) * dirs.col(k));
    return out;
}

AoResult ao_solve(const Scenario& sc, const SampleSet& ss, const AoConfig& cfg) {
    sc.validate();
    if (ss.size() != sc.sample_size || ss.estimate.antennas() != sc.n_tx ||
        ss.estimate.users() != sc.n_users)
        throw std::invalid_argument("ao_solve: sample set inconsistent with scenario");
    if (!(cfg.eps_r > 0.0) || cfg.n_max < 1)
        throw std::invalid_argument("ao_solve: bad stopping parameters");

    const int K = sc.n_users;
    const bool jmb = cfg.mode == TxMode::Jmb;

    Precoder pre;
    switch (cfg.init) {
        case InitKind::ZfE:
            pre = init_zf_e(ss.estimate, sc.power, equivalent_alpha(sc)).precoder;
            break;
        case InitKind::ZfSvd:
            pre = init_zf_svd(ss.estimate, sc.power, equivalent_alpha(sc)).precoder;
            break;
        case InitKind::Custom:
            pre = cfg.custom_init;
            if (pre.n_tx() != sc.n_tx || pre.n_users() != sc.n_users)
                throw std::invalid_argument("ao_solve: custom init has wrong shape");
            break;
    }
    if (!jmb) pre.common.setZero();

    SolverOptions sopts;
    sopts.tol = cfg.solver_tol;
    sopts.max_iterations = cfg.solver_max_iterations;

    AoResult res;
    res.coeffs = RVec::Constant(K, 1.0 / K);
    double obj_prev = 0.0;

    for (int n = 1; n <= cfg.n_max; ++n) {
        const EqualizerWeightSet gw = update_equalizers_weights(ss, pre, sc.noise_var);
        const AverageRates ar = sample_average_rates(ss, pre, sc.noise_var);

        IterationDiag diag{};
        double obj_update;  // objective at old coefficients
        if (jmb) {
            obj_update = (ar.private_rate + res.coeffs * ar.common_min).minCoeff();
            const PartitionResult part = waterfill(ar.common_min, ar.private_rate);
            res.coeffs = part.coeffs;
            diag.obj_after_partition = part.level;
        } else {
            obj_update = ar.private_rate.minCoeff();
            diag.obj_after_partition = obj_update;
        }
        diag.obj_after_update = obj_update;

        const AwmseComponents comp = build_components(ss, gw, sc.noise_var);
        const ConvexQcqp qcqp =
            jmb ? assemble(comp, res.coeffs, sc.noise_var, sc.power)
                : assemble_private_only(comp, sc.noise_var, sc.power);
        const SolverReport rep = ::jmb::solve(qcqp, sopts);
        if (rep.status == SolveStatus::NumericalTrouble)
            throw std::runtime_error("ao_solve: precoder solve failed at iteration " +
                                     std::to_string(n));
        if (rep.status == SolveStatus::MaxIterations) ++res.solver_fallbacks;

        pre = rep.precoder;
        if (!jmb) pre.common = CVec::Zero(sc.n_tx);
        const double obj = 1.0 - rep.xi;
        diag.obj_solver = obj;

        {
            const AverageRates ar2 = sample_average_rates(ss, pre, sc.noise_var);
            diag.obj_reevaluated =
                jmb ? (ar2.private_rate + res.coeffs * ar2.common_min).minCoeff()
                    : ar2.private_rate.minCoeff();
        }
        res.objective_trace.push_back(obj);
        res.diagnostics.push_back(diag);

        if (std::abs(obj - obj_prev) < cfg.eps_r) {
            res.converged = true;
            break;
        }
        obj_prev = obj;
    }

    res.precoder = pre;
    res.final_rates = sample_average_rates(ss, pre, sc.noise_var);
    return res;
}

}  // namespace jmb
