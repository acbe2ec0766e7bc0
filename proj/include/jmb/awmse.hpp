#pragma once

#include <utility>
#include <vector>

#include "jmb/mmse.hpp"
#include "jmb/model.hpp"

namespace jmb {

// Per-user, per-realization scalar equalizers and weights. Row k holds user
// k's values over the M realizations.
struct EqualizerWeightSet {
    CMat g_common;   // K x M
    CMat g_private;  // K x M
    RMat u_common;   // K x M, entries > 0
    RMat u_private;  // K x M, entries > 0

    int n_users() const { return static_cast<int>(g_common.rows()); }
    int samples() const { return static_cast<int>(g_common.cols()); }
};

// Sample-averaged rates per user plus the common-rate bottleneck.
struct AverageRates {
    RVec common;        // K entries
    RVec private_rate;  // K entries
    double common_min;  // min_j common(j)
};

// Sample-averaged quadratic-form data for one user: the precoder-update
// problem is written entirely in terms of these.
struct UserComponents {
    CMat psi_common;   // N_t x N_t, Hermitian PSD
    CMat psi_private;  // N_t x N_t, Hermitian PSD
    CVec f_common;     // N_t
    CVec f_private;    // N_t
    double t_common = 0.0;
    double t_private = 0.0;
    double u_common = 0.0;
    double u_private = 0.0;
    double v_common = 0.0;
    double v_private = 0.0;
};

struct AwmseComponents {
    std::vector<UserComponents> users;

    int n_users() const { return static_cast<int>(users.size()); }
    int n_tx() const {
        return users.empty() ? 0 : static_cast<int>(users[0].psi_private.rows());
    }
};

// Arithmetic means of the per-realization rates, precoder held fixed.
AverageRates sample_average_rates(const SampleSet& ss, const Precoder& pre,
                                  double noise_var);

// MMSE equalizers and weights at every (user, realization) point.
EqualizerWeightSet update_equalizers_weights(const SampleSet& ss, const Precoder& pre,
                                             double noise_var);

// Ensemble averages of the per-realization component terms.
AwmseComponents build_components(const SampleSet& ss, const EqualizerWeightSet& gw,
                                 double noise_var);

// Average augmented WMSEs as quadratic forms in the precoder; exact (up to
// accumulation error) match of the per-realization averaging path.
// Returns (xi_common, xi_private), each K entries.
std::pair<RVec, RVec> awmse_eval(const AwmseComponents& comp, const Precoder& pre,
                                 double noise_var);

}  // namespace jmb
