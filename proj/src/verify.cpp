#include "jmb/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jmb/kahan.hpp"
#include "jmb/model.hpp"
#include "jmb/partition.hpp"

namespace jmb {

// ---------------------------------------------------------------------------
// Reference oracle. For a candidate objective level tau the constraints
// become a convex feasibility system in (x, xi_c); its squared hinge
// violation is minimized by projected accelerated gradient descent with the
// power ball handled by projection. Bisection brackets the smallest feasible
// tau; the finish extrapolates sqrt(violation), which decays linearly in tau
// below the optimum, to its root.

namespace {

struct RefProblem {
    const ConvexQcqp* q;
    bool has_xic;
    double radius;
    double tau;

    Eigen::Index dim() const { return q->dim + (has_xic ? 1 : 0); }

    double phi(const RVec& v) const {
        const auto x = v.head(q->dim);
        double acc = 0.0;
        for (const auto& c : q->constraints) {
            double val = x.dot(c.Q * x) + c.b.dot(x) + c.d + c.coef_xi * tau;
            if (has_xic) val += c.coef_xi_c * v(q->dim);
            if (val > 0.0) acc += val * val;
        }
        return acc;
    }

    RVec grad(const RVec& v) const {
        const auto x = v.head(q->dim);
        RVec g = RVec::Zero(dim());
        for (const auto& c : q->constraints) {
            double val = x.dot(c.Q * x) + c.b.dot(x) + c.d + c.coef_xi * tau;
            if (has_xic) val += c.coef_xi_c * v(q->dim);
            if (val > 0.0) {
                g.head(q->dim) += 2.0 * val * (2.0 * (c.Q * x) + c.b);
                if (has_xic) g(q->dim) += 2.0 * val * c.coef_xi_c;
            }
        }
        return g;
    }

    void project(RVec& v) const {
        const double nrm = v.head(q->dim).norm();
        if (nrm > radius) v.head(q->dim) *= radius / nrm;
    }
};

double fista_min(const RefProblem& prob, RVec& v, double feas_eps, int max_iter) {
    prob.project(v);
    RVec x = v;
    RVec y = v;
    double phi_x = prob.phi(x);
    double best = phi_x;
    RVec best_v = x;
    double t = 1.0;
    double lip = 1.0;
    int stall = 0;

    for (int it = 0; it < max_iter && best > feas_eps; ++it) {
        const RVec g = prob.grad(y);
        const double phi_y = prob.phi(y);
        RVec cand;
        double phi_c = 0.0;
        for (;;) {
            cand = y - g / lip;
            prob.project(cand);
            const RVec diff = cand - y;
            phi_c = prob.phi(cand);
            if (phi_c <= phi_y + g.dot(diff) + 0.5 * lip * diff.squaredNorm() + 1e-300)
                break;
            lip *= 2.0;
            if (lip > 1e18) break;
        }
        if (lip > 1e18) break;

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        if (phi_c > phi_x) {  // restart momentum when the value backslides
            y = cand;
            t = 1.0;
        } else {
            y = cand + ((t - 1.0) / t_next) * (cand - x);
            t = t_next;
        }
        x = cand;
        phi_x = phi_c;
        if (phi_c < best * (1.0 - 1e-12)) {
            best = phi_c;
            best_v = cand;
            stall = 0;
        } else if (++stall > 600) {
            break;
        }
        lip *= 0.9;
    }
    v = best_v;
    return best;
}

}  // namespace

double reference_objective(const ConvexQcqp& q) {
    RefProblem prob;
    prob.q = &q;
    prob.has_xic = q.has_common_epigraph;
    prob.radius = std::sqrt(q.power_cap);

    // Certified feasible level: x = 0 with the epigraphs at their binding
    // values (the same construction the cone solver starts from).
    double xic0 = 0.0;
    bool any_common = false;
    for (const auto& c : q.constraints)
        if (c.coef_xi == 0.0) {
            xic0 = any_common ? std::max(xic0, c.d / (-c.coef_xi_c))
                              : c.d / (-c.coef_xi_c);
            any_common = true;
        }
    double tau_hi = 0.0;
    bool seen = false;
    for (const auto& c : q.constraints)
        if (c.coef_xi < 0.0) {
            const double need = (c.d + c.coef_xi_c * xic0) / (-c.coef_xi);
            tau_hi = seen ? std::max(tau_hi, need) : need;
            seen = true;
        }
    if (!seen) throw std::invalid_argument("reference: objective epigraph unreferenced");

    const double scale = std::max(1.0, std::abs(tau_hi));
    const double feas_eps = 1e-20 * scale * scale;
    const int probe_iters = 20000;

    RVec warm = RVec::Zero(prob.dim());
    if (prob.has_xic) warm(q.dim) = xic0;

    const auto min_phi = [&](double tau, int iters) {
        prob.tau = tau;
        RVec v = warm;
        const double val = fista_min(prob, v, feas_eps, iters);
        warm = v;
        return val;
    };

    // Expand downward to an infeasible bracket end.
    double step = 0.25 * scale;
    double tau_lo = tau_hi - step;
    for (int tries = 0; tries < 80 && min_phi(tau_lo, probe_iters) <= feas_eps; ++tries) {
        tau_hi = tau_lo;
        step *= 2.0;
        tau_lo = tau_hi - step;
    }

    const double target = 1e-4 * std::max(1.0, std::abs(tau_hi));
    while (tau_hi - tau_lo > target) {
        const double mid = 0.5 * (tau_lo + tau_hi);
        if (min_phi(mid, probe_iters) <= feas_eps)
            tau_hi = mid;
        else
            tau_lo = mid;
    }

    // Linear fit of sqrt(violation) over infeasible probes below the bracket.
    const double w = std::max(tau_hi - tau_lo, 0.25 * target);
    double sum_t = 0.0, sum_s = 0.0, sum_tt = 0.0, sum_ts = 0.0;
    int npts = 0;
    for (int i = 1; i <= 4; ++i) {
        const double tau = tau_lo - i * w;
        const double p = min_phi(tau, 3 * probe_iters);
        if (p <= feas_eps) continue;
        const double s = std::sqrt(p);
        sum_t += tau;
        sum_s += s;
        sum_tt += tau * tau;
        sum_ts += tau * s;
        ++npts;
    }
    if (npts >= 2) {
        const double det = npts * sum_tt - sum_t * sum_t;
        if (std::abs(det) > 1e-300) {
            const double slope = (npts * sum_ts - sum_t * sum_s) / det;
            const double icept = (sum_s - slope * sum_t) / npts;
            if (slope < 0.0) {
                const double root = -icept / slope;
                if (root >= tau_lo - 5 * w && root <= tau_hi + w) return root;
            }
        }
    }
    return 0.5 * (tau_lo + tau_hi);
}

// ---------------------------------------------------------------------------
// Verification suites.

namespace {

std::string fmt_sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

CheckResult check_waterfill(RngStream rng) {
    double max_dc = 0.0, max_dl = 0.0;
    bool slack_ok = true;
    for (int trial = 0; trial < 300; ++trial) {
        const int K = 1 + static_cast<int>(rng.uniform() * 6.0);
        RVec rates(K);
        for (int k = 0; k < K; ++k) rates(k) = 3.0 * rng.uniform();
        const double rc = 0.05 + 3.0 * rng.uniform();
        const PartitionResult wf = waterfill(rc, rates);
        const PartitionResult lp = lp_oracle(rc, rates);
        max_dc = std::max(max_dc, (wf.coeffs - lp.coeffs).cwiseAbs().maxCoeff());
        max_dl = std::max(max_dl, std::abs(wf.level - lp.level));
        for (int k = 0; k < K; ++k) {
            if (wf.coeffs(k) > 0.0 &&
                std::abs(rates(k) + wf.coeffs(k) * rc - wf.level) > 1e-12 * (1.0 + wf.level))
                slack_ok = false;
            if (wf.coeffs(k) == 0.0 && rates(k) < wf.level - 1e-12) slack_ok = false;
        }
    }
    const bool pass = max_dc <= 1e-7 && max_dl <= 1e-9 && slack_ok;
    return {"waterfill vs LP bisection", pass,
            "max |dc| = " + fmt_sci(max_dc) + ", max |dlevel| = " + fmt_sci(max_dl) +
                (slack_ok ? "" : ", slackness violated")};
}

ConvexQcqp random_qcqp(RngStream& rng, int dim, bool with_common) {
    ConvexQcqp q;
    q.dim = dim;
    q.power_cap = 0.5 + 3.5 * rng.uniform();
    q.has_common_epigraph = with_common;
    const int n_quad = 2 + static_cast<int>(rng.uniform() * 2.0);
    for (int j = 0; j < n_quad; ++j) {
        QuadConstraint c;
        RMat a(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int s = 0; s < dim; ++s) a(r, s) = 2.0 * rng.uniform() - 1.0;
        c.Q = (a.transpose() * a) / dim;
        c.b.resize(dim);
        for (int r = 0; r < dim; ++r) c.b(r) = 2.0 * rng.uniform() - 1.0;
        c.d = rng.uniform() - 0.5;
        c.coef_xi = -1.0;
        c.coef_xi_c = with_common ? rng.uniform() : 0.0;
        q.constraints.push_back(std::move(c));
    }
    if (with_common) {
        QuadConstraint c;
        RMat a(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int s = 0; s < dim; ++s) a(r, s) = 2.0 * rng.uniform() - 1.0;
        c.Q = (a.transpose() * a) / dim;
        c.b = RVec::Zero(dim);
        c.d = rng.uniform();
        c.coef_xi = 0.0;
        c.coef_xi_c = -1.0;
        q.constraints.push_back(std::move(c));
    }
    return q;
}

CheckResult check_cone_solver(RngStream rng) {
    double worst = 0.0;
    bool status_ok = true;

    // Ball-constrained quadratic with interior optimum, then active cap.
    for (double cap : {4.0, 0.25}) {
        ConvexQcqp q;
        q.dim = 2;
        q.power_cap = cap;
        QuadConstraint c;
        c.Q = RMat::Identity(2, 2);
        c.b = RVec::Zero(2);
        c.b(0) = -2.0;
        c.d = 0.0;
        c.coef_xi = -1.0;
        q.constraints.push_back(c);
        SolverOptions tight;
        tight.tol = 1e-10;
        const SolverReport rep = solve(q, tight);
        const double expect = cap >= 1.0 ? -1.0 : cap - 2.0 * std::sqrt(cap);
        worst = std::max(worst, std::abs(rep.xi - expect));
        status_ok = status_ok && rep.status == SolveStatus::Optimal;
    }
    const bool closed_ok = worst <= 1e-9;

    double worst_rel = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
        const int dim = 2 + 2 * (trial % 4);
        auto sub = rng.substream(static_cast<std::uint64_t>(trial));
        const ConvexQcqp q = random_qcqp(sub, dim, trial % 2 == 1);
        const SolverReport rep = solve(q);
        status_ok = status_ok && rep.status == SolveStatus::Optimal &&
                    rep.kkt_residual <= 1e-8;
        const double ref = reference_objective(q);
        worst_rel = std::max(worst_rel,
                             std::abs(rep.xi - ref) / std::max(1.0, std::abs(ref)));
    }
    const bool pass = closed_ok && status_ok && worst_rel <= 1e-6;
    return {"cone solver vs reference", pass,
            "closed-form err = " + fmt_sci(worst) + ", max rel dev = " + fmt_sci(worst_rel) +
                (status_ok ? "" : ", non-optimal status seen")};
}

Precoder random_precoder(RngStream& rng, int nt, int K, double power) {
    Precoder pre;
    pre.common = CVec(nt);
    for (int i = 0; i < nt; ++i) pre.common(i) = rng.cgauss(1.0);
    for (int k = 0; k < K; ++k) {
        CVec p(nt);
        for (int i = 0; i < nt; ++i) p(i) = rng.cgauss(1.0);
        pre.private_cols.push_back(p);
    }
    const double scale = std::sqrt(power / pre.total_power()) * rng.uniform_pos();
    pre.common *= scale;
    for (auto& p : pre.private_cols) p *= scale;
    return pre;
}

CheckResult check_two_path(RngStream rng) {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        Scenario sc;
        sc.n_tx = 2;
        sc.n_users = 2;
        sc.power = 10.0;
        sc.noise_var = 1.0;
        sc.error_model = FixedError{0.1};
        sc.sample_size = 64;
        auto sub = rng.substream(static_cast<std::uint64_t>(trial));
        auto s_ch = sub.substream(0);
        auto s_mc = sub.substream(1);
        auto s_pr = sub.substream(2);
        const Channel est = draw_true_channel(s_ch, sc);
        const SampleSet ss = draw_sample_set(s_mc, est, 0.1, sc.sample_size);
        const Precoder pre = random_precoder(s_pr, 2, 2, sc.power);

        const EqualizerWeightSet gw = update_equalizers_weights(ss, pre, sc.noise_var);
        const AwmseComponents comp = build_components(ss, gw, sc.noise_var);
        const auto [xi_c, xi_p] = awmse_eval(comp, pre, sc.noise_var);

        for (int k = 0; k < 2; ++k) {
            KahanSum dc, dp;
            for (int m = 0; m < ss.size(); ++m) {
                UserPoint up{gw.g_common(k, m), gw.g_private(k, m), gw.u_common(k, m),
                             gw.u_private(k, m)};
                const auto [xc, xp] =
                    augmented_wmse(ss.realizations[m].col(k), pre, sc.noise_var, up, k);
                dc.add(xc);
                dp.add(xp);
            }
            worst = std::max(worst, std::abs(xi_c(k) - dc.value() / ss.size()));
            worst = std::max(worst, std::abs(xi_p(k) - dp.value() / ss.size()));
        }
    }
    return {"two-path average WMSE", worst <= 1e-10, "max |dxi| = " + fmt_sci(worst)};
}

CheckResult check_duality(RngStream rng) {
    double worst_point = 0.0, worst_avg = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        Scenario sc;
        sc.n_tx = 3;
        sc.n_users = 2;
        sc.power = 20.0;
        sc.noise_var = 0.7;
        sc.error_model = FixedError{0.2};
        sc.sample_size = 16;
        auto sub = rng.substream(static_cast<std::uint64_t>(trial));
        auto s_ch = sub.substream(0);
        auto s_mc = sub.substream(1);
        auto s_pr = sub.substream(2);
        const Channel est = draw_true_channel(s_ch, sc);
        const SampleSet ss = draw_sample_set(s_mc, est, 0.2, sc.sample_size);
        const Precoder pre = random_precoder(s_pr, 3, 2, sc.power);

        // Pointwise identity at the MMSE equalizer/weight.
        for (int k = 0; k < sc.n_users; ++k) {
            const CVec h = ss.realizations[0].col(k);
            const LinkStats ls = link_stats(h, pre, sc.noise_var, k);
            const auto [gc, gp] = mmse_equalizers(h, pre, sc.noise_var, k);
            const auto [ec, ep] = mmse_values(ls);
            const auto [uc, up] = mmse_weights(ec, ep);
            const auto [xc, xp] =
                augmented_wmse(h, pre, sc.noise_var, UserPoint{gc, gp, uc, up}, k);
            const RatePair r = rates(ls);
            worst_point = std::max(worst_point, std::abs(xc - (1.0 - r.common)));
            worst_point = std::max(worst_point, std::abs(xp - (1.0 - r.private_rate)));
        }

        // Sample-averaged identity.
        const EqualizerWeightSet gw = update_equalizers_weights(ss, pre, sc.noise_var);
        const AwmseComponents comp = build_components(ss, gw, sc.noise_var);
        const auto [xi_c, xi_p] = awmse_eval(comp, pre, sc.noise_var);
        const AverageRates ar = sample_average_rates(ss, pre, sc.noise_var);
        for (int k = 0; k < sc.n_users; ++k) {
            worst_avg = std::max(worst_avg, std::abs(xi_c(k) - (1.0 - ar.common(k))));
            worst_avg = std::max(worst_avg, std::abs(xi_p(k) - (1.0 - ar.private_rate(k))));
        }
    }
    const bool pass = worst_point <= 1e-10 && worst_avg <= 1e-10;
    return {"WMSE-rate duality", pass,
            "pointwise = " + fmt_sci(worst_point) + ", averaged = " + fmt_sci(worst_avg)};
}

}  // namespace

std::vector<CheckResult> run_verification(std::uint64_t seed) {
    std::vector<CheckResult> out;
    out.push_back(check_waterfill(RngStream(seed, 101)));
    out.push_back(check_cone_solver(RngStream(seed, 102)));
    out.push_back(check_two_path(RngStream(seed, 103)));
    out.push_back(check_duality(RngStream(seed, 104)));
    return out;
}

}  // namespace jmb
