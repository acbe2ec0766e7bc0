#pragma once

#include <utility>
#include <vector>

#include "jmb/types.hpp"

namespace jmb {

// Linear precoder P = [p_c, p_1, ..., p_K]: one common column plus K private
// columns, all of length N_t. `common` may be the zero vector (no multicast
// part, e.g. conventional BC transmission).
struct Precoder {
    CVec common;
    std::vector<CVec> private_cols;

    int n_tx() const { return static_cast<int>(common.size()); }
    int n_users() const { return static_cast<int>(private_cols.size()); }
    double total_power() const;

    static Precoder zero(int n_tx, int n_users);
};

// Receive powers at one user for one channel realization:
//   t_private = sum_i |p_i^H h|^2 + noise_var      (private-decoding power)
//   t_common  = |p_c^H h|^2 + t_private            (common-decoding power)
//   e_common  = t_private                          (residual after common)
//   e_private = t_private - |p_k^H h|^2            (residual after private)
struct LinkStats {
    double t_common;
    double t_private;
    double e_common;
    double e_private;
};

// Scalar equalizers and MSE weights for one (user, realization) point.
struct UserPoint {
    cplx eq_common;
    cplx eq_private;
    double w_common;
    double w_private;
};

struct RatePair {
    double common;        // bits
    double private_rate;  // bits
    double sinr_common;
    double sinr_private;
};

LinkStats link_stats(const CVec& h, const Precoder& pre, double noise_var, int user);

// MMSE equalizers (g_c, g_p) for the given user.
std::pair<cplx, cplx> mmse_equalizers(const CVec& h, const Precoder& pre,
                                      double noise_var, int user);

// MSEs (eps_c, eps_p) at arbitrary scalar equalizers.
std::pair<double, double> mse(const CVec& h, const Precoder& pre, double noise_var,
                              cplx g_c, cplx g_p, int user);

// Minimum MSEs (eps_c, eps_p), both in (0, 1] for positive noise power.
std::pair<double, double> mmse_values(const LinkStats& ls);

// Rates R = -log2(eps_mmse) and the matching SINRs gamma = (1 - eps) / eps.
RatePair rates(const LinkStats& ls);

// Optimum MSE weights: reciprocals of the minimum MSEs.
std::pair<double, double> mmse_weights(double eps_c_min, double eps_p_min);

// Augmented weighted MSEs xi = u * eps - log2(u) for both streams, with the
// MSEs evaluated at the point's equalizers.
std::pair<double, double> augmented_wmse(const CVec& h, const Precoder& pre,
                                         double noise_var, const UserPoint& up,
                                         int user);

}  // namespace jmb
