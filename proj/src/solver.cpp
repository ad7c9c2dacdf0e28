#include "mpclo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpclo/errors.hpp"

namespace mpclo {

std::string status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::MaxIter: return "max-iter";
        case SolveStatus::NumericalTrouble: return "numerical-trouble";
    }
    return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Mat symmetrize(const Mat& m) {
    Mat r = m;
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) r(i, j) = 0.5 * (m(i, j) + m(j, i));
    return r;
}

// A^expo through an eigendecomposition, eigenvalues floored away from zero.
Mat eig_power(const Mat& a, double expo, double floor_eps = 1e-14) {
    Vec ev;
    Mat q;
    sym_eig(symmetrize(a), ev, q);
    const int n = a.rows;
    double emax = std::max(std::fabs(ev[0]), std::fabs(ev[n - 1]));
    Mat r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) {
                double lam = std::max(ev[k], floor_eps * std::max(emax, 1e-300));
                s += q(i, k) * std::pow(lam, expo) * q(j, k);
            }
            r(i, j) = s;
            r(j, i) = s;
        }
    return r;
}

struct BlockScaling {
    // orthant: H diagonal s/x, its square root, and lambda = sqrt(x s)
    Vec hdiag;
    Vec hsqrt;
    Vec lam;
    // psd: NT scaling matrices and the eigensystem of the scaled point
    Mat th, thi, t, tinv;
    Mat qlam;
    Vec lam_psd;
};

struct Scaling {
    std::vector<BlockScaling> blocks;
    double cond = 1.0;
};

void congruence(const Mat& c, const double* in, double* out, int order) {
    Vec v(in, in + order * (order + 1) / 2);
    Mat x = smat(v, order);
    Mat y = symmetrize(matmul(matmul(c, x), c));
    Vec r = svec(y, 1e-2);
    std::copy(r.begin(), r.end(), out);
}

class ConeOps {
  public:
    explicit ConeOps(const ConeSpec& spec) : spec_(spec) {
        int off = 0;
        for (const Block& b : spec.blocks) {
            offsets_.push_back(off);
            off += b.vec_dim();
        }
        dim_ = off;
    }

    int dim() const { return dim_; }
    int degree() const { return spec_.barrier_degree(); }

    Scaling compute_scaling(const Vec& x, const Vec& s) const {
        Scaling sc;
        sc.blocks.resize(spec_.blocks.size());
        for (size_t bi = 0; bi < spec_.blocks.size(); ++bi) {
            const Block& b = spec_.blocks[bi];
            BlockScaling& bs = sc.blocks[bi];
            int off = offsets_[bi];
            if (b.kind == BlockKind::Orthant) {
                bs.hdiag.resize(b.size);
                bs.hsqrt.resize(b.size);
                bs.lam.resize(b.size);
                for (int i = 0; i < b.size; ++i) {
                    double xi = std::max(x[off + i], 1e-300);
                    double si = std::max(s[off + i], 1e-300);
                    bs.hdiag[i] = si / xi;
                    bs.hsqrt[i] = std::sqrt(bs.hdiag[i]);
                    bs.lam[i] = std::sqrt(xi * si);
                    sc.cond = std::max(sc.cond, std::max(bs.hdiag[i], 1.0 / bs.hdiag[i]));
                }
            } else {
                Vec xb(x.begin() + off, x.begin() + off + b.vec_dim());
                Vec sb(s.begin() + off, s.begin() + off + b.vec_dim());
                Mat X = smat(xb, b.size);
                Mat S = smat(sb, b.size);
                Mat xh = eig_power(X, 0.5);
                Mat xmh = eig_power(X, -0.5);
                Mat z = symmetrize(matmul(matmul(xh, S), xh));
                Mat zh = eig_power(z, 0.5);
                Mat zmh = eig_power(z, -0.5);
                bs.t = symmetrize(matmul(matmul(xh, zmh), xh));
                bs.tinv = symmetrize(matmul(matmul(xmh, zh), xmh));
                bs.th = eig_power(bs.t, 0.5);
                bs.thi = eig_power(bs.t, -0.5);
                // the two scaled-point expressions agree; average for symmetry
                Mat l1 = matmul(matmul(bs.thi, X), bs.thi);
                Mat l2 = matmul(matmul(bs.th, S), bs.th);
                Mat lm(b.size, b.size);
                for (int i = 0; i < b.size; ++i)
                    for (int j = 0; j < b.size; ++j)
                        lm(i, j) = 0.25 * (l1(i, j) + l1(j, i) + l2(i, j) + l2(j, i));
                sym_eig(lm, bs.lam_psd, bs.qlam);
                double lmin = std::max(bs.lam_psd[0], 1e-300);
                sc.cond = std::max(sc.cond, bs.lam_psd[b.size - 1] / lmin);
            }
        }
        return sc;
    }

    Vec apply_h(const Scaling& sc, const Vec& z) const { return apply_block(sc, z, Which::H); }
    Vec apply_hinv(const Scaling& sc, const Vec& z) const { return apply_block(sc, z, Which::Hinv); }
    Vec apply_w(const Scaling& sc, const Vec& z) const { return apply_block(sc, z, Which::W); }
    Vec apply_winv(const Scaling& sc, const Vec& z) const { return apply_block(sc, z, Which::Winv); }

    // svec of the scaled point lambda (orthant coords are plain entries).
    Vec lambda_vec(const Scaling& sc) const {
        Vec out(dim_, 0.0);
        for (size_t bi = 0; bi < spec_.blocks.size(); ++bi) {
            const Block& b = spec_.blocks[bi];
            const BlockScaling& bs = sc.blocks[bi];
            int off = offsets_[bi];
            if (b.kind == BlockKind::Orthant) {
                for (int i = 0; i < b.size; ++i) out[off + i] = bs.lam[i];
            } else {
                Mat lm(b.size, b.size);
                for (int i = 0; i < b.size; ++i)
                    for (int j = 0; j < b.size; ++j) {
                        double sum = 0.0;
                        for (int k = 0; k < b.size; ++k) sum += bs.qlam(i, k) * bs.lam_psd[k] * bs.qlam(j, k);
                        lm(i, j) = sum;
                    }
                Vec v = svec(symmetrize(lm), 1e-2);
                std::copy(v.begin(), v.end(), out.begin() + off);
            }
        }
        return out;
    }

    // Jordan product u o v: elementwise on orthants, symmetrized matrix
    // product on PSD blocks.
    Vec jordan(const Vec& u, const Vec& v) const {
        Vec out(dim_, 0.0);
        for (size_t bi = 0; bi < spec_.blocks.size(); ++bi) {
            const Block& b = spec_.blocks[bi];
            int off = offsets_[bi];
            if (b.kind == BlockKind::Orthant) {
                for (int i = 0; i < b.size; ++i) out[off + i] = u[off + i] * v[off + i];
            } else {
                Vec ub(u.begin() + off, u.begin() + off + b.vec_dim());
                Vec vb(v.begin() + off, v.begin() + off + b.vec_dim());
                Mat p = matmul(smat(ub, b.size), smat(vb, b.size));
                Vec r = svec(symmetrize(p), 1e-2);
                std::copy(r.begin(), r.end(), out.begin() + off);
            }
        }
        return out;
    }

    // Solves lambda o z = rhs using the scaled-point eigensystem.
    Vec jordan_solve_lambda(const Scaling& sc, const Vec& rhs) const {
        Vec out(dim_, 0.0);
        for (size_t bi = 0; bi < spec_.blocks.size(); ++bi) {
            const Block& b = spec_.blocks[bi];
            const BlockScaling& bs = sc.blocks[bi];
            int off = offsets_[bi];
            if (b.kind == BlockKind::Orthant) {
                for (int i = 0; i < b.size; ++i) out[off + i] = rhs[off + i] / std::max(bs.lam[i], 1e-300);
            } else {
                Vec rb(rhs.begin() + off, rhs.begin() + off + b.vec_dim());
                Mat rt = matmul(matmul(transpose(bs.qlam), smat(rb, b.size)), bs.qlam);
                for (int i = 0; i < b.size; ++i)
                    for (int j = 0; j < b.size; ++j)
                        rt(i, j) = 2.0 * rt(i, j) / std::max(bs.lam_psd[i] + bs.lam_psd[j], 1e-300);
                Mat zm = matmul(matmul(bs.qlam, rt), transpose(bs.qlam));
                Vec zv = svec(symmetrize(zm), 1e-2);
                std::copy(zv.begin(), zv.end(), out.begin() + off);
            }
        }
        return out;
    }

    // Largest alpha with z + alpha dz in the cone (z strictly interior).
    double max_step(const Vec& z, const Vec& dz) const {
        double amax = kInf;
        for (size_t bi = 0; bi < spec_.blocks.size(); ++bi) {
            const Block& b = spec_.blocks[bi];
            int off = offsets_[bi];
            if (b.kind == BlockKind::Orthant) {
                for (int i = 0; i < b.size; ++i)
                    if (dz[off + i] < 0.0) amax = std::min(amax, -z[off + i] / dz[off + i]);
            } else {
                Vec zb(z.begin() + off, z.begin() + off + b.vec_dim());
                Vec db(dz.begin() + off, dz.begin() + off + b.vec_dim());
                Mat zmh = eig_power(smat(zb, b.size), -0.5);
                Mat w = symmetrize(matmul(matmul(zmh, smat(db, b.size)), zmh));
                Vec ev;
                Mat q;
                sym_eig(w, ev, q);
                if (ev[0] < 0.0) amax = std::min(amax, -1.0 / ev[0]);
            }
        }
        return amax;
    }

  private:
    enum class Which { H, Hinv, W, Winv };

    Vec apply_block(const Scaling& sc, const Vec& z, Which which) const {
        Vec out(dim_, 0.0);
        for (size_t bi = 0; bi < spec_.blocks.size(); ++bi) {
            const Block& b = spec_.blocks[bi];
            const BlockScaling& bs = sc.blocks[bi];
            int off = offsets_[bi];
            if (b.kind == BlockKind::Orthant) {
                for (int i = 0; i < b.size; ++i) {
                    double f = 1.0;
                    switch (which) {
                        case Which::H: f = bs.hdiag[i]; break;
                        case Which::Hinv: f = 1.0 / bs.hdiag[i]; break;
                        case Which::W: f = bs.hsqrt[i]; break;
                        case Which::Winv: f = 1.0 / bs.hsqrt[i]; break;
                    }
                    out[off + i] = f * z[off + i];
                }
            } else {
                const Mat* c = nullptr;
                switch (which) {
                    case Which::H: c = &bs.tinv; break;
                    case Which::Hinv: c = &bs.t; break;
                    case Which::W: c = &bs.thi; break;
                    case Which::Winv: c = &bs.th; break;
                }
                congruence(*c, z.data() + off, out.data() + off, b.size);
            }
        }
        return out;
    }

    ConeSpec spec_;
    std::vector<int> offsets_;
    int dim_ = 0;
};

struct Presolve {
    Mat eq;
    Vec rhs;
    std::vector<int> kept_rows;
    bool inconsistent = false;
    Vec farkas;  // certificate on the original rows when inconsistent
};

Presolve dedup_rows(const Mat& eq, const Vec& rhs) {
    Presolve out;
    const int m = eq.rows;
    out.kept_rows.resize(m);
    for (int i = 0; i < m; ++i) out.kept_rows[i] = i;
    out.eq = eq;
    out.rhs = rhs;
    if (m == 0) return out;

    QrFactor f = qr_factor(transpose(eq));
    double tol = 1e-10 * std::max(f.max_rdiag(), 1.0);
    int rank = f.rank(tol);
    if (rank == m) return out;

    out.kept_rows.assign(f.jpvt.begin(), f.jpvt.begin() + rank);
    std::sort(out.kept_rows.begin(), out.kept_rows.end());
    out.eq = Mat(rank, eq.cols);
    out.rhs.resize(rank);
    for (int i = 0; i < rank; ++i) {
        int src = out.kept_rows[i];
        std::copy(eq.row(src).begin(), eq.row(src).end(), out.eq.row(i).begin());
        out.rhs[i] = rhs[src];
    }
    // dropped rows must be consistent combinations of the kept ones
    QrFactor kf = qr_factor(transpose(out.eq));
    for (int i = 0; i < m; ++i) {
        if (std::binary_search(out.kept_rows.begin(), out.kept_rows.end(), i)) continue;
        Vec row(eq.row(i).begin(), eq.row(i).end());
        Vec coef = kf.solve(row, tol);
        double pred = dot(coef, out.rhs);
        if (std::fabs(pred - rhs[i]) > 1e-8 * (1.0 + norm_inf(rhs))) {
            out.inconsistent = true;
            out.farkas.assign(m, 0.0);
            for (int k = 0; k < rank; ++k) out.farkas[out.kept_rows[k]] = coef[k];
            out.farkas[i] = -1.0;
            if (dot(out.farkas, rhs) < 0)
                for (double& v : out.farkas) v = -v;
            return out;
        }
    }
    return out;
}

}  // namespace

SolveResult solve(const StandardProblem& problem, const SolverOptions& opts) {
    const ConeSpec& spec = problem.space;
    ConeOps ops(spec);
    const int n = ops.dim();
    if (static_cast<int>(problem.objective.size()) != n || problem.eq_matrix.cols != n ||
        problem.eq_matrix.rows != static_cast<int>(problem.eq_rhs.size()))
        throw DimensionMismatch("solve: problem shapes");

    SolveResult res;

    Presolve pre = dedup_rows(problem.eq_matrix, problem.eq_rhs);
    if (pre.inconsistent) {
        res.status = SolveStatus::Infeasible;
        res.mult = pre.farkas;
        res.x.assign(n, 0.0);
        res.s.assign(n, 0.0);
        return res;
    }
    Mat E = pre.eq;
    Vec b = pre.rhs;
    Vec c = problem.objective;
    const int m = E.rows;

    // equilibration: unit-inf-norm rows, O(1) objective and rhs; the
    // interior-point core then works on well-scaled data throughout
    Vec row_scale(m, 1.0);
    for (int i = 0; i < m; ++i) {
        double nrm = 0.0;
        for (int j = 0; j < n; ++j) nrm = std::max(nrm, std::fabs(E(i, j)));
        row_scale[i] = std::max(nrm, 1e-12);
        for (int j = 0; j < n; ++j) E(i, j) /= row_scale[i];
        b[i] /= row_scale[i];
    }
    const double obj_scale = std::max(1.0, norm_inf(c));
    for (double& v : c) v /= obj_scale;
    const double rhs_scale = std::max(1.0, norm_inf(b));
    for (double& v : b) v /= rhs_scale;

    const double bscale = 1.0 + norm_inf(b);
    const double cscale = 1.0 + norm_inf(c);
    const double emax = std::max(1.0, max_abs(E));

    const Vec e = spec.central_element();
    Vec x = e, s = e, y(m, 0.0);
    double tau = 1.0, kappa = 1.0;
    const int nu = ops.degree() + 1;

    double best_score = kInf;
    Vec bx = x, by_ = y, bs = s;
    double btau = 1.0;

    auto finish_with = [&](SolveStatus st, const Vec& fx, const Vec& fy, const Vec& fs, double ftau) {
        res.status = st;
        double t = std::max(ftau, 1e-300);
        res.x.assign(n, 0.0);
        res.s.assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            res.x[i] = rhs_scale * fx[i] / t;
            res.s[i] = obj_scale * fs[i] / t;
        }
        res.mult.assign(problem.eq_matrix.rows, 0.0);
        for (int i = 0; i < m; ++i) res.mult[pre.kept_rows[i]] = obj_scale * fy[i] / (t * row_scale[i]);
        res.objective = dot(problem.objective, res.x);
        res.gap = std::fabs(dot(res.x, res.s));
        res.primal_res = norm_inf(matvec(problem.eq_matrix, res.x) - problem.eq_rhs);
        Vec dr = matvec_t(problem.eq_matrix, res.mult);
        for (int i = 0; i < n; ++i) dr[i] += res.s[i] - problem.objective[i];
        res.dual_res = norm_inf(dr);
        return res;
    };

    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        Vec vp = matvec(E, x);
        axpy(-tau, b, vp);  // E x - b tau
        Vec vd = matvec_t(E, y);
        for (int i = 0; i < n; ++i) vd[i] += s[i] - c[i] * tau;  // E^T y + s - c tau
        double vg = dot(c, x) - dot(b, y) + kappa;
        double mu = (dot(x, s) + tau * kappa) / nu;

        double pres = norm_inf(vp) / (tau * bscale);
        double dres = norm_inf(vd) / (tau * cscale);
        double cx = dot(c, x) / tau;
        double bty_h = dot(b, y) / tau;
        double relgap = std::fabs(dot(x, s)) / (tau * tau) / (1.0 + std::fabs(cx));
        // |c^T x - b^T y| carries the kappa/tau term and stays visible on
        // ill-posed instances (positive gap, unattained infimum) where the
        // iterates escape to infinity while the scaled residuals vanish
        double objgap = std::fabs(cx - bty_h) / (1.0 + std::fabs(cx) + std::fabs(bty_h));
        double score = std::max({pres, dres, relgap, objgap});
        if (score < best_score) {
            best_score = score;
            bx = x;
            by_ = y;
            bs = s;
            btau = tau;
        }

#ifdef MPCLO_SOLVER_TRACE
        std::fprintf(stderr, "it=%2d mu=%9.2e pres=%9.2e dres=%9.2e relgap=%9.2e objgap=%9.2e tau=%9.2e kappa=%9.2e\n",
                     iter, mu, pres, dres, relgap, objgap, tau, kappa);
#endif
        bool sane_scale = (norm_inf(x) + norm_inf(s)) / tau <= 1e7 * (bscale + cscale);
        if (pres <= opts.feas_tol && dres <= opts.feas_tol && relgap <= opts.gap_tol &&
            objgap <= opts.gap_tol && sane_scale) {
            res.iterations = iter;
            return finish_with(SolveStatus::Optimal, x, y, s, tau);
        }

        // infeasibility / unboundedness, only with a verified certificate
        if (tau <= 1e-8 * std::max(1.0, kappa) || (mu <= 1e-12 && kappa > 1e4 * tau)) {
            double bty = dot(b, y);
            if (bty > 1e-12) {
                Vec yh = (1.0 / bty) * y;
                Vec sh = (1.0 / bty) * s;
                Vec dcert = matvec_t(E, yh);
                for (int i = 0; i < n; ++i) dcert[i] += sh[i];
                if (norm_inf(dcert) <= 1e-7 * (1.0 + emax * norm_inf(yh))) {
                    res.iterations = iter;
                    res.status = SolveStatus::Infeasible;
                    res.mult.assign(problem.eq_matrix.rows, 0.0);
                    for (int i = 0; i < m; ++i)
                        res.mult[pre.kept_rows[i]] = yh[i] / (row_scale[i] * rhs_scale);
                    res.x.assign(n, 0.0);
                    res.s = sh;
                    return res;
                }
            }
            double ctx = dot(c, x);
            if (ctx < -1e-12) {
                Vec ray = (1.0 / -ctx) * x;
                if (norm_inf(matvec(E, ray)) <= 1e-7 * (1.0 + emax * norm_inf(ray))) {
                    res.iterations = iter;
                    res.status = SolveStatus::Unbounded;
                    res.x = (1.0 / obj_scale) * ray;
                    res.s.assign(n, 0.0);
                    res.mult.assign(problem.eq_matrix.rows, 0.0);
                    res.objective = -kInf;
                    return res;
                }
            }
        }

        Scaling sc = ops.compute_scaling(x, s);
        if (sc.cond > opts.cond_max) break;

        // Schur complement E H^{-1} E^T, factored once per iteration
        Mat hinv_et(n, m);
        for (int j = 0; j < m; ++j) {
            Vec col(n, 0.0);
            for (int i = 0; i < n; ++i) col[i] = E(j, i);
            Vec hc = ops.apply_hinv(sc, col);
            for (int i = 0; i < n; ++i) hinv_et(i, j) = hc[i];
        }
        Mat schur(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j <= i; ++j) {
                double sum = 0.0;
                for (int k = 0; k < n; ++k) sum += E(i, k) * hinv_et(k, j);
                schur(i, j) = sum;
                schur(j, i) = sum;
            }
        Mat chol = schur;
        bool ok = m == 0 || cholesky(chol, 0.0);
        if (!ok) {
            double reg = 1e-12 * (1.0 + max_abs(schur));
            for (int t = 0; t < 6 && !ok; ++t, reg *= 100.0) {
                chol = schur;
                for (int i = 0; i < m; ++i) chol(i, i) += reg;
                ok = cholesky(chol, 0.0);
            }
        }
        if (!ok) break;

        auto solve_kkt_once = [&](const Vec& f, const Vec& rp, Vec& dx, Vec& dy) {
            // H dx - E^T dy = f,  E dx = rp
            Vec hinv_f = ops.apply_hinv(sc, f);
            Vec rhs = matvec(E, hinv_f);
            for (int i = 0; i < m; ++i) rhs[i] = rp[i] - rhs[i];
            dy = rhs;
            if (m) chol_solve(chol, dy);
            Vec sum = f + matvec_t(E, dy);
            dx = ops.apply_hinv(sc, sum);
        };
        auto solve_kkt = [&](const Vec& f, const Vec& rp, Vec& dx, Vec& dy) {
            solve_kkt_once(f, rp, dx, dy);
            // iterative refinement; the Schur factorization turns
            // ill-conditioned as mu -> 0 and a raw solve loses digits
            for (int ref = 0; ref < 3; ++ref) {
                Vec r1 = ops.apply_h(sc, dx);
                Vec ety = matvec_t(E, dy);
                for (int i = 0; i < n; ++i) r1[i] = f[i] - (r1[i] - ety[i]);
                Vec r2 = matvec(E, dx);
                for (int i = 0; i < m; ++i) r2[i] = rp[i] - r2[i];
                double scale = 1.0 + norm_inf(f) + norm_inf(rp);
                if (norm_inf(r1) + norm_inf(r2) <= 1e-14 * scale) break;
                Vec ddx, ddy;
                solve_kkt_once(r1, r2, ddx, ddy);
                axpy(1.0, ddx, dx);
                axpy(1.0, ddy, dy);
            }
        };

        // tau-linear basis direction: H dx1 - E^T dy1 = -c, E dx1 = b
        Vec dx1, dy1;
        {
            Vec mc(n, 0.0);
            for (int i = 0; i < n; ++i) mc[i] = -c[i];
            solve_kkt(mc, b, dx1, dy1);
        }

        Vec lambda = ops.lambda_vec(sc);
        Vec lam2 = ops.jordan(lambda, lambda);

        auto newton = [&](const Vec& ds_comb, double dtk_comb, double eta, Vec& dx, Vec& dy, Vec& ds,
                          double& dtau, double& dkappa) -> bool {
            Vec zc = ops.jordan_solve_lambda(sc, ds_comb);
            Vec g = ops.apply_w(sc, zc);
            Vec f(n, 0.0);
            for (int i = 0; i < n; ++i) f[i] = eta * vd[i] + g[i];
            Vec rp0(m, 0.0);
            for (int i = 0; i < m; ++i) rp0[i] = -eta * vp[i];
            Vec dx0, dy0;
            solve_kkt(f, rp0, dx0, dy0);
            double denom = dot(c, dx1) - dot(b, dy1) - kappa / tau;
            if (std::fabs(denom) < 1e-300) return false;
            double numer = -eta * vg - dot(c, dx0) + dot(b, dy0) - dtk_comb / tau;
            dtau = numer / denom;
            dx = dx0;
            axpy(dtau, dx1, dx);
            dy = dy0;
            axpy(dtau, dy1, dy);
            // recover ds from the dual equation; applying H to dx would
            // amplify roundoff once the scaling is ill-conditioned
            ds = matvec_t(E, dy);
            for (int i = 0; i < n; ++i) ds[i] = -eta * vd[i] - ds[i] + c[i] * dtau;
            dkappa = (dtk_comb - kappa * dtau) / tau;
            return true;
        };

        // predictor
        Vec ds_aff(n, 0.0);
        for (int i = 0; i < n; ++i) ds_aff[i] = -lam2[i];
        Vec dxa, dya, dsa;
        double dtaua = 0.0, dkappaa = 0.0;
        if (!newton(ds_aff, -tau * kappa, 1.0, dxa, dya, dsa, dtaua, dkappaa)) break;

        double amax = std::min(ops.max_step(x, dxa), ops.max_step(s, dsa));
        if (dtaua < 0) amax = std::min(amax, -tau / dtaua);
        if (dkappaa < 0) amax = std::min(amax, -kappa / dkappaa);
        double alpha_aff = std::min(1.0, amax);

        double mu_aff;
        {
            Vec xa = x, sa = s;
            axpy(alpha_aff, dxa, xa);
            axpy(alpha_aff, dsa, sa);
            mu_aff = (dot(xa, sa) + (tau + alpha_aff * dtaua) * (kappa + alpha_aff * dkappaa)) / nu;
        }
        double sigma = std::pow(std::clamp(mu_aff / std::max(mu, 1e-300), 0.0, 1.0), 3.0);

        // corrector with Mehrotra cross term; residuals scaled by (1 - sigma)
        Vec cross = ops.jordan(ops.apply_w(sc, dxa), ops.apply_winv(sc, dsa));
        Vec ds_cor(n, 0.0);
        for (int i = 0; i < n; ++i) ds_cor[i] = -lam2[i] - cross[i];
        axpy(sigma * mu, e, ds_cor);
        double dtk_cor = -tau * kappa - dtaua * dkappaa + sigma * mu;

        Vec dx, dy, ds;
        double dtau = 0.0, dkappa = 0.0;
        if (!newton(ds_cor, dtk_cor, 1.0 - sigma, dx, dy, ds, dtau, dkappa)) break;

        amax = std::min(ops.max_step(x, dx), ops.max_step(s, ds));
        if (dtau < 0) amax = std::min(amax, -tau / dtau);
        if (dkappa < 0) amax = std::min(amax, -kappa / dkappa);
        double alpha = std::min(1.0, opts.step_frac * amax);
        if (!std::isfinite(alpha) || alpha <= 1e-14) break;

        axpy(alpha, dx, x);
        axpy(alpha, ds, s);
        axpy(alpha, dy, y);
        tau += alpha * dtau;
        kappa += alpha * dkappa;
        if (tau <= 1e-300 || kappa < 0 || !std::isfinite(tau) || !std::isfinite(kappa)) break;
    }

    res.iterations = iter;
    SolveStatus st = (iter >= opts.max_iter) ? SolveStatus::MaxIter : SolveStatus::NumericalTrouble;
    return finish_with(st, bx, by_, bs, btau);
}

Vec FreeElimination::recover_free(const Vec& z) const {
    Vec resid = rhs_full - matvec(cone_cols, z);
    fqr.apply_qt(resid);
    Vec zf(frank, 0.0);
    for (int i = frank - 1; i >= 0; --i) {
        double sum = resid[i];
        for (int j = i + 1; j < frank; ++j) sum -= fqr.qr(i, j) * zf[j];
        zf[i] = sum / fqr.qr(i, i);
    }
    Vec out(n_free, 0.0);
    for (int j = 0; j < frank; ++j) out[fqr.jpvt[j]] = zf[j];
    return out;
}

// lifts multipliers on the reduced (rotated) rows back to the originals
Vec FreeElimination::lift_multipliers(const Vec& reduced_mult) const {
    Vec full(cone_cols.rows, 0.0);
    for (size_t i = 0; i < reduced_mult.size(); ++i) full[frank + i] = reduced_mult[i];
    fqr.apply_q(full);
    return full;
}

// eq = [C | F] with the trailing n_free columns free; rewrites the problem
// on the cone part only. F must have full column rank.
FreeElimination eliminate_free(const Mat& eq, const Vec& rhs, const Vec& obj, int n_cone, int n_free) {
    FreeElimination fe;
    fe.n_free = n_free;
    const int m = eq.rows;
    Mat f(m, n_free), cmat(m, n_cone);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n_cone; ++j) cmat(i, j) = eq(i, j);
        for (int j = 0; j < n_free; ++j) f(i, j) = eq(i, n_cone + j);
    }
    fe.cone_cols = cmat;
    fe.rhs_full = rhs;
    fe.fqr = qr_factor(f);
    double tol = 1e-10 * std::max(fe.fqr.max_rdiag(), 1.0);
    fe.frank = fe.fqr.rank(tol);
    if (fe.frank < n_free) throw Error("free-variable elimination: dependent free columns");
    const int k = fe.frank;

    Mat qtc(m, n_cone);
    for (int j = 0; j < n_cone; ++j) {
        Vec col(m, 0.0);
        for (int i = 0; i < m; ++i) col[i] = cmat(i, j);
        fe.fqr.apply_qt(col);
        for (int i = 0; i < m; ++i) qtc(i, j) = col[i];
    }
    Vec qtb = rhs;
    fe.fqr.apply_qt(qtb);

    fe.reduced_eq = Mat(m - k, n_cone);
    fe.reduced_rhs.assign(m - k, 0.0);
    for (int i = k; i < m; ++i) {
        for (int j = 0; j < n_cone; ++j) fe.reduced_eq(i - k, j) = qtc(i, j);
        fe.reduced_rhs[i - k] = qtb[i];
    }

    Vec pf(k, 0.0);
    for (int i = 0; i < k; ++i) pf[i] = obj[n_cone + fe.fqr.jpvt[i]];
    Vec u(k, 0.0);
    for (int i = 0; i < k; ++i) {
        double sum = pf[i];
        for (int j = 0; j < i; ++j) sum -= fe.fqr.qr(j, i) * u[j];
        u[i] = sum / fe.fqr.qr(i, i);
    }
    fe.reduced_obj.assign(n_cone, 0.0);
    for (int j = 0; j < n_cone; ++j) {
        double sum = obj[j];
        for (int i = 0; i < k; ++i) sum -= qtc(i, j) * u[i];
        fe.reduced_obj[j] = sum;
    }
    for (int i = 0; i < k; ++i) fe.obj_const += u[i] * qtb[i];
    return fe;
}


FeasibilityOutcome check_feasibility(const Mat& eq_matrix, const Vec& eq_rhs, const ConeSpec& space,
                                     const SolverOptions& opts, int n_free, int margin_dim) {
    const int n_cone = space.total_dim();
    if (eq_matrix.cols != n_cone + n_free || eq_matrix.rows != static_cast<int>(eq_rhs.size()))
        throw DimensionMismatch("check_feasibility shapes");
    const int m = eq_matrix.rows;

    const double cap = 10.0 * (1.0 + norm_inf(eq_rhs));
    Vec e = space.central_element();
    if (margin_dim >= 0)
        for (int i = margin_dim; i < n_cone; ++i) e[i] = 0.0;

    // variables (z' in K, sigma in R+, w free, t free); original rows with
    // z = z' + t e substituted, plus a cap row t + sigma = cap so the margin
    // problem stays bounded even when the margin is unbounded above
    Mat eq(m + 1, n_cone + 1 + n_free + 1);
    Vec rhs(m + 1, 0.0);
    for (int i = 0; i < m; ++i) {
        double te = 0.0;
        for (int j = 0; j < n_cone; ++j) {
            eq(i, j) = eq_matrix(i, j);
            te += eq_matrix(i, j) * e[j];
        }
        for (int j = 0; j < n_free; ++j) eq(i, n_cone + 1 + j) = eq_matrix(i, n_cone + j);
        eq(i, n_cone + 1 + n_free) = te;
        rhs[i] = eq_rhs[i];
    }
    eq(m, n_cone) = 1.0;
    eq(m, n_cone + 1 + n_free) = 1.0;
    rhs[m] = cap;

    Vec obj(n_cone + 1 + n_free + 1, 0.0);
    obj[n_cone + 1 + n_free] = -1.0;  // max t

    ConeSpec ext = space;
    ext.blocks.push_back(Block{BlockKind::Orthant, 1});

    FreeElimination fe = eliminate_free(eq, rhs, obj, n_cone + 1, n_free + 1);

    StandardProblem margin_problem;
    margin_problem.objective = fe.reduced_obj;
    margin_problem.eq_matrix = fe.reduced_eq;
    margin_problem.eq_rhs = fe.reduced_rhs;
    margin_problem.space = ext;
    margin_problem.variant = Variant::Primal;
    margin_problem.param = {};

    SolveResult sr = solve(margin_problem, opts);

    FeasibilityOutcome out;
    out.solver_status = sr.status;
    if (sr.status == SolveStatus::Infeasible) {
        out.kind = FeasibilityOutcome::Kind::Infeasible;
        Vec lifted = fe.lift_multipliers(sr.mult);
        out.certificate.assign(lifted.begin(), lifted.begin() + m);
        out.margin = -kInf;
        return out;
    }
    if (sr.status == SolveStatus::Unbounded) {
        out.kind = FeasibilityOutcome::Kind::Feasible;
        out.margin = kInf;
        out.margin_unbounded = true;
        return out;
    }

    Vec zfull(sr.x.begin(), sr.x.begin() + n_cone + 1);
    Vec frees = fe.recover_free(zfull);
    double t = frees[n_free];
    out.free_part.assign(frees.begin(), frees.begin() + n_free);
    out.free_norm = norm_inf(out.free_part);
    out.margin = t;
    if (t >= cap * (1.0 - 1e-6)) {
        out.margin = kInf;
        out.margin_unbounded = true;
    }

    out.point.assign(sr.x.begin(), sr.x.begin() + n_cone);
    if (!out.margin_unbounded) axpy(t, e, out.point);

    if (sr.status != SolveStatus::Optimal) {
        out.kind = FeasibilityOutcome::Kind::Marginal;
        return out;
    }
    if (out.margin_unbounded || out.margin > 10.0 * opts.feas_tol)
        out.kind = FeasibilityOutcome::Kind::Feasible;
    else if (out.margin < -10.0 * opts.feas_tol) {
        out.kind = FeasibilityOutcome::Kind::Infeasible;
        Vec lifted = fe.lift_multipliers(sr.mult);
        out.certificate.assign(lifted.begin(), lifted.begin() + m);
    } else
        out.kind = FeasibilityOutcome::Kind::Marginal;
    return out;
}

FaceSupport optimal_face_support(const StandardProblem& problem, const SolveResult& base, const Vec& g,
                                 const SolverOptions& opts) {
    FaceSupport fs;
    if (base.status != SolveStatus::Optimal)
        throw NotSolvable(status_name(base.status), "face support needs an optimal base point");
    const int n = problem.space.total_dim();
    const int m = problem.eq_matrix.rows;

    StandardProblem face;
    face.space = problem.space;
    face.space.blocks.push_back(Block{BlockKind::Orthant, 1});
    face.variant = problem.variant;
    face.param = problem.param;
    face.eq_matrix = Mat(m + 1, n + 1);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) face.eq_matrix(i, j) = problem.eq_matrix(i, j);
    for (int j = 0; j < n; ++j) face.eq_matrix(m, j) = problem.objective[j];
    face.eq_matrix(m, n) = 1.0;
    face.eq_rhs = problem.eq_rhs;
    face.eq_rhs.push_back(base.objective + opts.face_eps);
    face.objective.assign(n + 1, 0.0);
    for (int i = 0; i < n; ++i) face.objective[i] = -g[i];

    // the face multiplier grows like 1/sqrt(face_eps); 1e-8 relative
    // complementarity is not reachable there and not needed either
    SolverOptions sub = opts;
    sub.gap_tol = std::max(opts.gap_tol, 1e-7);
    sub.cond_max = std::max(opts.cond_max, 1e16);
    SolveResult sr = solve(face, sub);
    fs.status = sr.status;
    if (sr.status == SolveStatus::Unbounded) {
        fs.unbounded = true;
        return fs;
    }
    if (sr.status != SolveStatus::Optimal) return fs;
    fs.value = -sr.objective;
    fs.argmax.assign(sr.x.begin(), sr.x.begin() + n);
    return fs;
}

}  // namespace mpclo
