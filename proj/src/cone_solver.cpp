#include "jmb/cone_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace jmb {

RMat real_embed(const CMat& a) {
    const Eigen::Index n = a.rows();
    RMat e(2 * n, 2 * n);
    e.topLeftCorner(n, n) = a.real();
    e.topRightCorner(n, n) = -a.imag();
    e.bottomLeftCorner(n, n) = a.imag();
    e.bottomRightCorner(n, n) = a.real();
    return e;
}

RVec real_embed(const CVec& v) {
    RVec e(2 * v.size());
    e.head(v.size()) = v.real();
    e.tail(v.size()) = v.imag();
    return e;
}

namespace {

void check_psd_witness(const CMat& a, const char* what) {
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
    const double tr = std::max(std::abs(a.trace().real()), 1e-30);
    if (es.eigenvalues().minCoeff() < -1e-10 * tr)
        throw std::invalid_argument(std::string(what) + ": matrix is not PSD");
}

}  // namespace

ConvexQcqp assemble(const AwmseComponents& comp, const RVec& coeffs, double noise_var,
                    double power_cap) {
    const int K = comp.n_users();
    const int nt = comp.n_tx();
    if (K < 1 || nt < 1) throw std::invalid_argument("assemble: empty components");
    if (coeffs.size() != K)
        throw std::invalid_argument("assemble: coefficient count mismatch");
    if (coeffs.minCoeff() < 0.0)
        throw std::invalid_argument("assemble: negative partition coefficient");
    if (!(power_cap > 0.0)) throw std::invalid_argument("assemble: power cap must be > 0");

    const int blk = 2 * nt;
    const int n = blk * (K + 1);

    ConvexQcqp q;
    q.dim = n;
    q.power_cap = power_cap;
    q.has_common_epigraph = true;
    q.n_tx = nt;
    q.common_column = true;
    q.constraints.reserve(static_cast<std::size_t>(2 * K));

    for (int k = 0; k < K; ++k) {
        const UserComponents& u = comp.users[static_cast<std::size_t>(k)];
        if (u.psi_private.rows() != nt || u.psi_common.rows() != nt)
            throw std::invalid_argument("assemble: component dimension mismatch");
        check_psd_witness(u.psi_private, "assemble psi_private");

        QuadConstraint c;
        c.Q = RMat::Zero(n, n);
        const RMat ep = real_embed(u.psi_private);
        for (int i = 1; i <= K; ++i) c.Q.block(blk * i, blk * i, blk, blk) = ep;
        c.b = RVec::Zero(n);
        c.b.segment(blk * (k + 1), blk) = -2.0 * real_embed(u.f_private);
        c.d = noise_var * u.t_private + u.u_private - u.v_private - coeffs(k);
        c.coef_xi = -1.0;
        c.coef_xi_c = coeffs(k);
        q.constraints.push_back(std::move(c));
    }
    for (int k = 0; k < K; ++k) {
        const UserComponents& u = comp.users[static_cast<std::size_t>(k)];
        check_psd_witness(u.psi_common, "assemble psi_common");

        QuadConstraint c;
        c.Q = RMat::Zero(n, n);
        const RMat ec = real_embed(u.psi_common);
        for (int i = 0; i <= K; ++i) c.Q.block(blk * i, blk * i, blk, blk) = ec;
        c.b = RVec::Zero(n);
        c.b.segment(0, blk) = -2.0 * real_embed(u.f_common);
        c.d = noise_var * u.t_common + u.u_common - u.v_common;
        c.coef_xi = 0.0;
        c.coef_xi_c = -1.0;
        q.constraints.push_back(std::move(c));
    }
    return q;
}

ConvexQcqp assemble_private_only(const AwmseComponents& comp, double noise_var,
                                 double power_cap) {
    const int K = comp.n_users();
    const int nt = comp.n_tx();
    if (K < 1 || nt < 1) throw std::invalid_argument("assemble: empty components");
    if (!(power_cap > 0.0)) throw std::invalid_argument("assemble: power cap must be > 0");

    const int blk = 2 * nt;
    const int n = blk * K;

    ConvexQcqp q;
    q.dim = n;
    q.power_cap = power_cap;
    q.has_common_epigraph = false;
    q.n_tx = nt;
    q.common_column = false;
    q.constraints.reserve(static_cast<std::size_t>(K));

    for (int k = 0; k < K; ++k) {
        const UserComponents& u = comp.users[static_cast<std::size_t>(k)];
        check_psd_witness(u.psi_private, "assemble psi_private");
        QuadConstraint c;
        c.Q = RMat::Zero(n, n);
        const RMat ep = real_embed(u.psi_private);
        for (int i = 0; i < K; ++i) c.Q.block(blk * i, blk * i, blk, blk) = ep;
        c.b = RVec::Zero(n);
        c.b.segment(blk * k, blk) = -2.0 * real_embed(u.f_private);
        c.d = noise_var * u.t_private + u.u_private - u.v_private;
        c.coef_xi = -1.0;
        c.coef_xi_c = 0.0;
        q.constraints.push_back(std::move(c));
    }
    return q;
}

// ---------------------------------------------------------------------------
// Second-order-cone primitives. A cone point u = (u0, u1) is interior when
// u0 > ||u1||; det(u) = u0^2 - ||u1||^2.

namespace {

using Seg = Eigen::Ref<const RVec>;

double soc_det(const Seg& u) { return u(0) * u(0) - u.tail(u.size() - 1).squaredNorm(); }

bool soc_interior(const Seg& u) { return u(0) > 0.0 && soc_det(u) > 0.0; }

// Jordan product u o v.
RVec soc_prod(const Seg& u, const Seg& v) {
    RVec w(u.size());
    w(0) = u.dot(v);
    w.tail(w.size() - 1) = u(0) * v.tail(v.size() - 1) + v(0) * u.tail(u.size() - 1);
    return w;
}

// Solve lam o x = d for x.
RVec soc_lsolve(const Seg& lam, const Seg& d) {
    const Eigen::Index m = lam.size();
    const double det = soc_det(lam);
    RVec x(m);
    x(0) = (lam(0) * d(0) - lam.tail(m - 1).dot(d.tail(m - 1))) / det;
    x.tail(m - 1) = (d.tail(m - 1) - x(0) * lam.tail(m - 1)) / lam(0);
    return x;
}

// Largest alpha >= 0 with u + alpha p still in the (closed) cone. The
// determinant of a near-boundary iterate can round slightly negative, so it
// is clamped before the root computation.
double soc_maxstep(const Seg& u, const Seg& p) {
    const Eigen::Index m = u.size();
    const double a = p(0) * p(0) - p.tail(m - 1).squaredNorm();
    const double b = u(0) * p(0) - u.tail(m - 1).dot(p.tail(m - 1));
    const double c = std::max(soc_det(u), 0.0);
    const double inf = std::numeric_limits<double>::infinity();
    const double scale = p(0) * p(0) + p.tail(m - 1).squaredNorm();
    if (std::abs(a) <= 1e-14 * std::max(scale, 1e-300)) {
        return (b < 0.0) ? std::max(-c / (2.0 * b), 0.0) : inf;
    }
    const double disc = b * b - a * c;
    if (a > 0.0) {
        if (disc < 0.0 || b >= 0.0) return inf;  // stays inside for all alpha
        return std::max((-b - std::sqrt(disc)) / a, 0.0);
    }
    return std::max((-b - std::sqrt(disc)) / a, 0.0);  // a < 0: one positive root
}

// Nesterov-Todd scaling of one cone: symmetric W with W z = W^{-1} s = lambda.
struct NtScaling {
    RMat w;
    RMat w_inv;
    RVec lambda;
};

bool nt_scaling(const Seg& s, const Seg& z, NtScaling& out) {
    const Eigen::Index m = s.size();
    if (!soc_interior(s) || !soc_interior(z)) return false;
    const double ds = std::sqrt(soc_det(s));
    const double dz = std::sqrt(soc_det(z));
    const RVec sb = s / ds;
    const RVec zb = z / dz;
    const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
    RVec wb(m);
    wb(0) = (sb(0) + zb(0)) / (2.0 * gamma);
    wb.tail(m - 1) = (sb.tail(m - 1) - zb.tail(m - 1)) / (2.0 * gamma);

    const double denom = std::sqrt(2.0 * (wb(0) + 1.0));
    RVec v = wb;
    v(0) += 1.0;
    v /= denom;
    RVec jv = v;
    jv.tail(m - 1) = -jv.tail(m - 1);

    const double eta = std::sqrt(ds / dz);
    out.w = 2.0 * (v * v.transpose());
    out.w(0, 0) -= 1.0;
    for (Eigen::Index i = 1; i < m; ++i) out.w(i, i) += 1.0;
    out.w_inv = 2.0 * (jv * jv.transpose());
    out.w_inv(0, 0) -= 1.0;
    for (Eigen::Index i = 1; i < m; ++i) out.w_inv(i, i) += 1.0;
    out.w *= eta;
    out.w_inv /= eta;
    out.lambda = out.w * z;
    return out.lambda.allFinite();
}

// Cholesky rows of a PSD matrix, regularized before factorization. Returns
// zero rows for a (numerically) zero matrix: the constraint is affine.
bool chol_rows(const RMat& q, RMat& f) {
    const Eigen::Index n = q.rows();
    const double tr = q.trace();
    if (!(tr > 1e-290)) {
        f.resize(0, n);
        return true;
    }
    for (double reg : {1e-12, 1e-9}) {
        RMat qr = q + reg * tr * RMat::Identity(n, n);
        Eigen::LLT<RMat> llt(qr);
        if (llt.info() == Eigen::Success) {
            f = llt.matrixU();
            return true;
        }
    }
    return false;
}

struct ConeSlice {
    int off;
    int dim;
};

}  // namespace

SolverReport solve(const ConvexQcqp& qcqp, const SolverOptions& opts) {
    const int n = qcqp.dim;
    if (n < 1) throw std::invalid_argument("solve: empty decision vector");
    if (!(qcqp.power_cap > 0.0))
        throw std::invalid_argument("solve: power cap must be > 0");
    const bool hc = qcqp.has_common_epigraph;
    bool any_xic = false;
    for (const auto& c : qcqp.constraints) {
        if (c.Q.rows() != n || c.Q.cols() != n || c.b.size() != n)
            throw std::invalid_argument("solve: constraint dimension mismatch");
        if (c.coef_xi > 0.0 || (c.coef_xi == 0.0 && c.coef_xi_c >= 0.0))
            throw std::invalid_argument("solve: constraint has no relaxing epigraph coupling");
        if (!hc && c.coef_xi_c != 0.0)
            throw std::invalid_argument("solve: xi_c coupling without a common epigraph");
        if (c.coef_xi_c != 0.0) any_xic = true;
    }
    if (hc && !any_xic)
        throw std::invalid_argument("solve: common epigraph is unreferenced");

    const int nvar = n + 1 + (hc ? 1 : 0);
    const int idx_xic = n;  // valid when hc
    const int idx_xi = nvar - 1;

    SolverReport rep;
    rep.status = SolveStatus::NumericalTrouble;

    // --- conic embedding -----------------------------------------------
    std::vector<ConeSlice> cones;
    std::vector<RMat> factors(qcqp.constraints.size());
    int total = 0;
    for (std::size_t j = 0; j < qcqp.constraints.size(); ++j) {
        if (!chol_rows(qcqp.constraints[j].Q, factors[j])) return rep;
        const int m = static_cast<int>(factors[j].rows()) + 2;
        cones.push_back({total, m});
        total += m;
    }
    cones.push_back({total, n + 1});  // power ball
    total += n + 1;
    const int ncones = static_cast<int>(cones.size());

    RMat g = RMat::Zero(total, nvar);
    RVec h = RVec::Zero(total);
    for (std::size_t j = 0; j < qcqp.constraints.size(); ++j) {
        const QuadConstraint& c = qcqp.constraints[j];
        const ConeSlice& cs = cones[j];
        RVec beta = RVec::Zero(nvar);
        beta.head(n) = c.b;
        if (hc) beta(idx_xic) = c.coef_xi_c;
        beta(idx_xi) = c.coef_xi;
        g.row(cs.off) = 0.5 * beta;
        h(cs.off) = 0.5 * (1.0 - c.d);
        const Eigen::Index r = factors[j].rows();
        if (r > 0) g.block(cs.off + 1, 0, r, n) = -factors[j];
        g.row(cs.off + cs.dim - 1) = 0.5 * beta;
        h(cs.off + cs.dim - 1) = -0.5 * (1.0 + c.d);
    }
    {
        const ConeSlice& cs = cones.back();
        h(cs.off) = std::sqrt(qcqp.power_cap);
        g.block(cs.off + 1, 0, n, n) = -RMat::Identity(n, n);
    }

    RVec cvec = RVec::Zero(nvar);
    cvec(idx_xi) = 1.0;

    // --- strictly feasible primal start: x = 0, epigraphs pushed up ----
    RVec y = RVec::Zero(nvar);
    if (hc) {
        double xic = 0.0;
        for (const auto& c : qcqp.constraints)
            if (c.coef_xi == 0.0) xic = std::max(xic, c.d / (-c.coef_xi_c));
        y(idx_xic) = xic + 1.0;
    }
    {
        double xi = 0.0;
        bool seen = false;
        for (const auto& c : qcqp.constraints)
            if (c.coef_xi < 0.0) {
                const double need =
                    (c.d + (hc ? c.coef_xi_c * y(idx_xic) : 0.0)) / (-c.coef_xi);
                xi = seen ? std::max(xi, need) : need;
                seen = true;
            }
        if (!seen) throw std::invalid_argument("solve: objective epigraph is unreferenced");
        y(idx_xi) = xi + 1.0;
    }

    RVec s = h - g * y;
    RVec z = RVec::Zero(total);
    for (const auto& cs : cones) {
        if (!soc_interior(s.segment(cs.off, cs.dim))) return rep;  // cannot happen
        z(cs.off) = 1.0;
    }

    // --- predictor-corrector loop --------------------------------------
    const double hinf = std::max(1.0, h.cwiseAbs().maxCoeff());
    std::vector<NtScaling> sc(static_cast<std::size_t>(ncones));
    double kkt = std::numeric_limits<double>::infinity();
    double kkt_best = std::numeric_limits<double>::infinity();
    RVec y_best = y;
    int no_progress = 0;
    int iter = 0;

    const auto apply_winv2 = [&](const RVec& in) {
        RVec out(total);
        for (int j = 0; j < ncones; ++j) {
            const ConeSlice& cs = cones[static_cast<std::size_t>(j)];
            const auto& wi = sc[static_cast<std::size_t>(j)].w_inv;
            out.segment(cs.off, cs.dim) = wi * (wi * in.segment(cs.off, cs.dim));
        }
        return out;
    };
    const auto apply_w2 = [&](const RVec& in) {
        RVec out(total);
        for (int j = 0; j < ncones; ++j) {
            const ConeSlice& cs = cones[static_cast<std::size_t>(j)];
            const auto& w = sc[static_cast<std::size_t>(j)].w;
            out.segment(cs.off, cs.dim) = w * (w * in.segment(cs.off, cs.dim));
        }
        return out;
    };

    for (; iter < opts.max_iterations; ++iter) {
        const RVec rx = g.transpose() * z + cvec;
        const RVec rz = g * y + s - h;
        const double gap = s.dot(z);
        const double pres = rz.cwiseAbs().maxCoeff() / hinf;
        const double dres = rx.cwiseAbs().maxCoeff();
        kkt = std::max({pres, dres, gap});
        if (opts.trace)
            std::fprintf(stderr, "ipm %2d pres %.2e dres %.2e gap %.2e obj %.6f\n", iter,
                         pres, dres, gap, y(idx_xi));
        if (kkt < kkt_best) {
            kkt_best = kkt;
            y_best = y;
            no_progress = 0;
        } else if (kkt_best < 1e-3 && ++no_progress >= 6) {
            break;  // converged to the numerical floor; keep the best iterate
        }
        if (pres <= opts.tol && dres <= opts.tol && gap <= opts.tol) break;

        bool ok = true;
        for (int j = 0; j < ncones && ok; ++j) {
            const ConeSlice& cs = cones[static_cast<std::size_t>(j)];
            ok = nt_scaling(s.segment(cs.off, cs.dim), z.segment(cs.off, cs.dim),
                            sc[static_cast<std::size_t>(j)]);
        }
        if (!ok) break;

        RMat kmat = RMat::Zero(nvar, nvar);
        for (int j = 0; j < ncones; ++j) {
            const ConeSlice& cs = cones[static_cast<std::size_t>(j)];
            const auto& wi = sc[static_cast<std::size_t>(j)].w_inv;
            const RMat wg = wi * g.middleRows(cs.off, cs.dim);
            kmat.noalias() += wg.transpose() * wg;
        }
        Eigen::LLT<RMat> llt(kmat);
        if (llt.info() != Eigen::Success) {
            kmat += 1e-12 * std::max(kmat.trace(), 1.0) * RMat::Identity(nvar, nvar);
            llt.compute(kmat);
            if (llt.info() != Eigen::Success) break;
        }

        const double mu = gap / ncones;

        // Solve [0 G^T; G -W^2] [dy; dz] = [bx; bz] by Schur complement with
        // two rounds of iterative refinement (the reduced system sheds
        // accuracy as the cones sharpen near the optimum).
        const auto kkt_solve = [&](const RVec& bx, const RVec& bz, RVec& dy, RVec& dz) {
            dy = llt.solve(bx + g.transpose() * apply_winv2(bz));
            dz = apply_winv2(g * dy - bz);
            for (int round = 0; round < 2; ++round) {
                const RVec r1 = bx - g.transpose() * dz;
                const RVec r2 = bz - g * dy + apply_w2(dz);
                const RVec ey = llt.solve(r1 + g.transpose() * apply_winv2(r2));
                dy += ey;
                dz += apply_winv2(g * ey - r2);
            }
        };

        const auto direction = [&](const RVec& dtarget, RVec& dy, RVec& dz, RVec& ds) {
            RVec wpsi(total);
            for (int j = 0; j < ncones; ++j) {
                const ConeSlice& cs = cones[static_cast<std::size_t>(j)];
                const auto& scj = sc[static_cast<std::size_t>(j)];
                wpsi.segment(cs.off, cs.dim) =
                    scj.w * soc_lsolve(scj.lambda, dtarget.segment(cs.off, cs.dim));
            }
            kkt_solve(-rx, -(rz + wpsi), dy, dz);
            ds = -rz - g * dy;
        };

        const auto max_step = [&](const RVec& ds, const RVec& dz) {
            double a = std::numeric_limits<double>::infinity();
            for (const auto& cs : cones) {
                a = std::min(a, soc_maxstep(s.segment(cs.off, cs.dim),
                                            ds.segment(cs.off, cs.dim)));
                a = std::min(a, soc_maxstep(z.segment(cs.off, cs.dim),
                                            dz.segment(cs.off, cs.dim)));
            }
            return a;
        };

        // Affine (predictor) direction.
        RVec dtarget(total);
        for (int j = 0; j < ncones; ++j) {
            const ConeSlice& cs = cones[static_cast<std::size_t>(j)];
            const auto& lam = sc[static_cast<std::size_t>(j)].lambda;
            dtarget.segment(cs.off, cs.dim) = -soc_prod(lam, lam);
        }
        RVec dy_a, dz_a, ds_a;
        direction(dtarget, dy_a, dz_a, ds_a);
        const double alpha_a = std::min(1.0, max_step(ds_a, dz_a));
        const double gap_a = (s + alpha_a * ds_a).dot(z + alpha_a * dz_a);
        double sigma = std::pow(std::max(gap_a, 0.0) / gap, 3);
        sigma = std::clamp(sigma, 0.0, 1.0);

        // Combined (corrector) direction.
        for (int j = 0; j < ncones; ++j) {
            const ConeSlice& cs = cones[static_cast<std::size_t>(j)];
            const auto& scj = sc[static_cast<std::size_t>(j)];
            const RVec ws = scj.w_inv * ds_a.segment(cs.off, cs.dim);
            const RVec wz = scj.w * dz_a.segment(cs.off, cs.dim);
            RVec t = -soc_prod(scj.lambda, scj.lambda) - soc_prod(ws, wz);
            t(0) += sigma * mu;
            dtarget.segment(cs.off, cs.dim) = t;
        }
        RVec dy, dz, ds;
        direction(dtarget, dy, dz, ds);
        double alpha = std::min(1.0, 0.99 * max_step(ds, dz));
        if (alpha <= 1e-10 && alpha_a > 1e-8) {
            // The second-order correction can collapse the step on LP-like
            // degenerate cones; the plain predictor still makes progress.
            dy = dy_a;
            dz = dz_a;
            ds = ds_a;
            alpha = std::min(1.0, 0.99 * max_step(ds, dz));
        }
        if (!(alpha > 1e-13)) break;  // stalled at the numerical floor

        y += alpha * dy;
        s += alpha * ds;
        z += alpha * dz;
    }

    y = y_best;
    if (kkt_best <= opts.tol)
        rep.status = SolveStatus::Optimal;
    else if (kkt_best < 1e-4)
        rep.status = SolveStatus::MaxIterations;
    else
        rep.status = SolveStatus::NumericalTrouble;

    rep.x = y.head(n);
    rep.xi = y(idx_xi);
    rep.xi_common = hc ? y(idx_xic) : 0.0;
    rep.iterations = iter;
    rep.kkt_residual = kkt_best;

    if (qcqp.n_tx > 0) {
        const int blk = 2 * qcqp.n_tx;
        const int ncols = n / blk;
        Precoder pre;
        pre.common = CVec::Zero(qcqp.n_tx);
        int col = 0;
        if (qcqp.common_column) {
            pre.common = rep.x.segment(0, qcqp.n_tx) +
                         cplx(0, 1) * rep.x.segment(qcqp.n_tx, qcqp.n_tx);
            col = 1;
        }
        for (; col < ncols; ++col) {
            const int off = col * blk;
            pre.private_cols.push_back(rep.x.segment(off, qcqp.n_tx) +
                                       cplx(0, 1) * rep.x.segment(off + qcqp.n_tx, qcqp.n_tx));
        }
        rep.precoder = std::move(pre);
    }
    return rep;
}

// ---------------------------------------------------------------------------

namespace {
void put(std::ostringstream& os, double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
    os.write(buf, r.ptr - buf);
}
}  // namespace

std::string dump(const ConvexQcqp& q) {
    std::ostringstream os;
    os << "qcqp\n";
    os << "dim " << q.dim << "\n";
    os << "power_cap ";
    put(os, q.power_cap);
    os << "\nhas_common_epigraph " << (q.has_common_epigraph ? 1 : 0) << "\n";
    os << "n_tx " << q.n_tx << "\n";
    os << "common_column " << (q.common_column ? 1 : 0) << "\n";
    os << "constraints " << q.constraints.size() << "\n";
    for (const auto& c : q.constraints) {
        os << "constraint\nQ\n";
        for (int i = 0; i < q.dim; ++i) {
            for (int j = 0; j < q.dim; ++j) {
                if (j) os << ' ';
                put(os, c.Q(i, j));
            }
            os << "\n";
        }
        os << "b\n";
        for (int i = 0; i < q.dim; ++i) {
            if (i) os << ' ';
            put(os, c.b(i));
        }
        os << "\nd ";
        put(os, c.d);
        os << "\ncoef_xi ";
        put(os, c.coef_xi);
        os << "\ncoef_xi_c ";
        put(os, c.coef_xi_c);
        os << "\n";
    }
    os << "end\n";
    return os.str();
}

ConvexQcqp parse_dump(const std::string& text) {
    std::istringstream is(text);
    std::string tok;
    const auto expect = [&](const char* want) {
        is >> tok;
        if (tok != want) throw std::invalid_argument("parse_dump: expected " + std::string(want));
    };
    expect("qcqp");
    ConvexQcqp q;
    std::size_t count = 0;
    expect("dim");
    is >> q.dim;
    expect("power_cap");
    is >> q.power_cap;
    expect("has_common_epigraph");
    is >> q.has_common_epigraph;
    expect("n_tx");
    is >> q.n_tx;
    expect("common_column");
    is >> q.common_column;
    expect("constraints");
    is >> count;
    for (std::size_t j = 0; j < count; ++j) {
        expect("constraint");
        QuadConstraint c;
        c.Q.resize(q.dim, q.dim);
        c.b.resize(q.dim);
        expect("Q");
        for (int i = 0; i < q.dim; ++i)
            for (int jj = 0; jj < q.dim; ++jj) is >> c.Q(i, jj);
        expect("b");
        for (int i = 0; i < q.dim; ++i) is >> c.b(i);
        expect("d");
        is >> c.d;
        expect("coef_xi");
        is >> c.coef_xi;
        expect("coef_xi_c");
        is >> c.coef_xi_c;
        q.constraints.push_back(std::move(c));
    }
    expect("end");
    if (!is) throw std::invalid_argument("parse_dump: truncated input");
    return q;
}

}  // namespace jmb
