#include "jmb/awmse.hpp"

#include <cmath>
#include <stdexcept>

#include "jmb/kahan.hpp"

namespace jmb {

namespace {
constexpr double kLog2e = 1.4426950408889634074;

void check_dims(const SampleSet& ss, const Precoder& pre) {
    if (ss.size() < 1) throw std::invalid_argument("sample set is empty");
    if (ss.estimate.antennas() != pre.n_tx() || ss.estimate.users() != pre.n_users())
        throw std::invalid_argument("sample set and precoder dimensions disagree");
}
}  // namespace

AverageRates sample_average_rates(const SampleSet& ss, const Precoder& pre,
                                  double noise_var) {
    check_dims(ss, pre);
    const int K = pre.n_users();
    const int M = ss.size();
    AverageRates out;
    out.common = RVec::Zero(K);
    out.private_rate = RVec::Zero(K);
    for (int k = 0; k < K; ++k) {
        KahanSum rc, rp;
        for (int m = 0; m < M; ++m) {
            const RatePair r = rates(link_stats(ss.realizations[m].col(k), pre, noise_var, k));
            rc.add(r.common);
            rp.add(r.private_rate);
        }
        out.common(k) = rc.value() / M;
        out.private_rate(k) = rp.value() / M;
    }
    out.common_min = out.common.minCoeff();
    return out;
}

EqualizerWeightSet update_equalizers_weights(const SampleSet& ss, const Precoder& pre,
                                             double noise_var) {
    check_dims(ss, pre);
    const int K = pre.n_users();
    const int M = ss.size();
    EqualizerWeightSet gw;
    gw.g_common.resize(K, M);
    gw.g_private.resize(K, M);
    gw.u_common.resize(K, M);
    gw.u_private.resize(K, M);
    for (int k = 0; k < K; ++k) {
        for (int m = 0; m < M; ++m) {
            const CVec h = ss.realizations[m].col(k);
            const LinkStats ls = link_stats(h, pre, noise_var, k);
            const auto [gc, gp] = mmse_equalizers(h, pre, noise_var, k);
            const auto [ec, ep] = mmse_values(ls);
            gw.g_common(k, m) = gc;
            gw.g_private(k, m) = gp;
            gw.u_common(k, m) = 1.0 / ec;
            gw.u_private(k, m) = 1.0 / ep;
        }
    }
    return gw;
}

AwmseComponents build_components(const SampleSet& ss, const EqualizerWeightSet& gw,
                                 double noise_var) {
    (void)noise_var;  // enters only at evaluation time
    const int K = gw.n_users();
    const int M = gw.samples();
    if (ss.size() != M || ss.estimate.users() != K)
        throw std::invalid_argument("sample set and equalizer set dimensions disagree");
    const int nt = ss.estimate.antennas();

    AwmseComponents comp;
    comp.users.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        KahanCMat psi_c(nt, nt), psi_p(nt, nt), f_c(nt, 1), f_p(nt, 1);
        KahanSum t_c, t_p, u_c, u_p, v_c, v_p;
        for (int m = 0; m < M; ++m) {
            const CVec h = ss.realizations[m].col(k);
            const cplx gc = gw.g_common(k, m);
            const cplx gp = gw.g_private(k, m);
            const double uc = gw.u_common(k, m);
            const double up = gw.u_private(k, m);
            const double tc = uc * std::norm(gc);
            const double tp = up * std::norm(gp);
            const CMat hh = h * h.adjoint();
            psi_c.add(tc * hh);
            psi_p.add(tp * hh);
            f_c.add(uc * std::conj(gc) * h);
            f_p.add(up * std::conj(gp) * h);
            t_c.add(tc);
            t_p.add(tp);
            u_c.add(uc);
            u_p.add(up);
            v_c.add(std::log(uc) * kLog2e);
            v_p.add(std::log(up) * kLog2e);
        }
        UserComponents& u = comp.users[static_cast<std::size_t>(k)];
        const double inv_m = 1.0 / M;
        u.psi_common = psi_c.value() * inv_m;
        u.psi_private = psi_p.value() * inv_m;
        u.f_common = f_c.value() * inv_m;
        u.f_private = f_p.value() * inv_m;
        u.t_common = t_c.value() * inv_m;
        u.t_private = t_p.value() * inv_m;
        u.u_common = u_c.value() * inv_m;
        u.u_private = u_p.value() * inv_m;
        u.v_common = v_c.value() * inv_m;
        u.v_private = v_p.value() * inv_m;
    }
    return comp;
}

std::pair<RVec, RVec> awmse_eval(const AwmseComponents& comp, const Precoder& pre,
                                 double noise_var) {
    const int K = comp.n_users();
    if (pre.n_users() != K || pre.n_tx() != comp.n_tx())
        throw std::invalid_argument("components and precoder dimensions disagree");
    RVec xi_c(K), xi_p(K);
    for (int k = 0; k < K; ++k) {
        const UserComponents& u = comp.users[static_cast<std::size_t>(k)];
        double qc = std::real(pre.common.dot(u.psi_common * pre.common));
        double qp = 0.0;
        for (const auto& pi : pre.private_cols) {
            qc += std::real(pi.dot(u.psi_common * pi));
            qp += std::real(pi.dot(u.psi_private * pi));
        }
        const CVec& pk = pre.private_cols[static_cast<std::size_t>(k)];
        xi_c(k) = qc + noise_var * u.t_common - 2.0 * std::real(u.f_common.dot(pre.common)) +
                  u.u_common - u.v_common;
        xi_p(k) = qp + noise_var * u.t_private - 2.0 * std::real(u.f_private.dot(pk)) +
                  u.u_private - u.v_private;
    }
    return {xi_c, xi_p};
}

}  // namespace jmb
