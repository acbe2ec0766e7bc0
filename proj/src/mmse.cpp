#include "jmb/mmse.hpp"

#include <cassert>
#include <cmath>

namespace jmb {

namespace {
constexpr double kLog2e = 1.4426950408889634074;  // 1 / ln 2
constexpr double kEpsFloor = 1e-300;              // overflow guard before log

inline double log2_checked(double x) {
    assert(x > 0.0 && "MSE must be positive under a positive noise variance");
    return std::log(std::max(x, kEpsFloor)) * kLog2e;
}
}  // namespace

double Precoder::total_power() const {
    double p = common.squaredNorm();
    for (const auto& pk : private_cols) p += pk.squaredNorm();
    return p;
}

Precoder Precoder::zero(int n_tx, int n_users) {
    Precoder pre;
    pre.common = CVec::Zero(n_tx);
    pre.private_cols.assign(static_cast<std::size_t>(n_users), CVec::Zero(n_tx));
    return pre;
}

LinkStats link_stats(const CVec& h, const Precoder& pre, double noise_var, int user) {
    double t_priv = noise_var;
    for (const auto& pi : pre.private_cols) t_priv += std::norm(pi.dot(h));
    const double own = std::norm(pre.private_cols[static_cast<std::size_t>(user)].dot(h));
    const double t_com = std::norm(pre.common.dot(h)) + t_priv;
    return LinkStats{t_com, t_priv, t_priv, t_priv - own};
}

std::pair<cplx, cplx> mmse_equalizers(const CVec& h, const Precoder& pre,
                                      double noise_var, int user) {
    const LinkStats ls = link_stats(h, pre, noise_var, user);
    const cplx a_c = pre.common.dot(h);  // p_c^H h
    const cplx a_p = pre.private_cols[static_cast<std::size_t>(user)].dot(h);
    return {a_c / ls.t_common, a_p / ls.t_private};
}

std::pair<double, double> mse(const CVec& h, const Precoder& pre, double noise_var,
                              cplx g_c, cplx g_p, int user) {
    const LinkStats ls = link_stats(h, pre, noise_var, user);
    const cplx a_c = pre.common.dot(h);
    const cplx a_p = pre.private_cols[static_cast<std::size_t>(user)].dot(h);
    // h^H p = conj(p^H h)
    const double eps_c =
        std::norm(g_c) * ls.t_common - 2.0 * std::real(g_c * std::conj(a_c)) + 1.0;
    const double eps_p =
        std::norm(g_p) * ls.t_private - 2.0 * std::real(g_p * std::conj(a_p)) + 1.0;
    return {eps_c, eps_p};
}

std::pair<double, double> mmse_values(const LinkStats& ls) {
    return {ls.e_common / ls.t_common, ls.e_private / ls.t_private};
}

RatePair rates(const LinkStats& ls) {
    const auto [ec, ep] = mmse_values(ls);
    RatePair r;
    r.common = -log2_checked(ec);
    r.private_rate = -log2_checked(ep);
    r.sinr_common = (1.0 - ec) / ec;
    r.sinr_private = (1.0 - ep) / ep;
    return r;
}

std::pair<double, double> mmse_weights(double eps_c_min, double eps_p_min) {
    assert(eps_c_min > 0.0 && eps_p_min > 0.0);
    return {1.0 / eps_c_min, 1.0 / eps_p_min};
}

std::pair<double, double> augmented_wmse(const CVec& h, const Precoder& pre,
                                         double noise_var, const UserPoint& up,
                                         int user) {
    const auto [eps_c, eps_p] = mse(h, pre, noise_var, up.eq_common, up.eq_private, user);
    const double xi_c = up.w_common * eps_c - log2_checked(up.w_common);
    const double xi_p = up.w_private * eps_p - log2_checked(up.w_private);
    return {xi_c, xi_p};
}

}  // namespace jmb
