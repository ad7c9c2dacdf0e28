#include "mpclo/duality.hpp"

#include <algorithm>
#include <cmath>

#include "mpclo/errors.hpp"

namespace mpclo {

ValueQuery value(const MpcloInstance& inst, ValueVariant variant, const Vec& param,
                 const SolverOptions& opts) {
    ValueQuery q;
    q.variant = variant;
    q.param = param;
    switch (variant) {
        case ValueVariant::PStar: {
            q.witness = solve(assemble(inst, Variant::Primal, param), opts);
            q.value = q.witness.objective;
            break;
        }
        case ValueVariant::DStar: {
            q.witness = solve(assemble(inst, Variant::Dual, param), opts);
            q.value = q.witness.objective;
            break;
        }
        case ValueVariant::DBarStar: {
            q.witness = solve(assemble(inst, Variant::NsDualOfPrimal, param), opts);
            q.value = dot(inst.d, inst.obj_primal(param)) - q.witness.objective;
            break;
        }
        case ValueVariant::PBarStar: {
            q.witness = solve(assemble(inst, Variant::NsDualOfDual, param), opts);
            q.value = dot(inst.c, inst.obj_dual(param)) - q.witness.objective;
            break;
        }
    }
    if (q.witness.status != SolveStatus::Optimal)
        throw NotSolvable(status_name(q.witness.status), "value query");
    return q;
}

IdentityReport duality_identity_residual(const MpcloInstance& inst, const Vec& u, const Vec& v,
                                         const SolverOptions& opts) {
    IdentityReport rep;
    ValueQuery p = value(inst, ValueVariant::PStar, u, opts);
    ValueQuery d = value(inst, ValueVariant::DStar, v, opts);
    rep.p_star = p.value;
    rep.d_star = d.value;
    rep.bilinear = dot(inst.obj_primal(u), inst.obj_dual(v));
    rep.identity_residual = p.value + d.value - rep.bilinear;

    ValueQuery dbar = value(inst, ValueVariant::DBarStar, u, opts);
    ValueQuery pbar = value(inst, ValueVariant::PBarStar, v, opts);
    rep.primal_nogap = std::fabs(p.value - dbar.value);
    rep.dual_nogap = std::fabs(d.value - pbar.value);
    return rep;
}

namespace {

void require_feasible(const char* label, const Mat& eq, const Vec& rhs, const Vec& z, const ConeSpec& spec,
                      double tol) {
    Vec res = matvec(eq, z) - rhs;
    if (norm_inf(res) > tol)
        throw InfeasibleWitness(std::string(label) + ": equality residual " + std::to_string(norm_inf(res)));
    double margin = cone_margin(z, spec);
    if (margin < -tol)
        throw InfeasibleWitness(std::string(label) + ": cone margin " + std::to_string(margin));
}

}  // namespace

WeakDualityGaps weak_duality_gaps(const MpcloInstance& inst, const Vec& u, const Vec& v, const Vec& x,
                                  const Vec& y, double feas_tol) {
    StandardProblem xprob = assemble(inst, Variant::NsDualOfDual, v);
    StandardProblem yprob = assemble(inst, Variant::NsDualOfPrimal, u);
    double scale = 1.0 + std::max(norm_inf(x), norm_inf(y));
    require_feasible("x (rhs-perturbed primal family)", xprob.eq_matrix, xprob.eq_rhs, x, inst.space,
                     feas_tol * scale);
    require_feasible("y (rhs-perturbed dual family)", yprob.eq_matrix, yprob.eq_rhs, y, inst.space,
                     feas_tol * scale);

    Vec cu = inst.obj_primal(u);
    Vec dv = inst.obj_dual(v);
    double bilinear = dot(cu, dv);

    WeakDualityGaps g;
    g.gap_bar = bilinear - dot(inst.c, dv - x) - dot(inst.d, cu - y);
    g.gap = dot(cu, x) + dot(dv, y) - bilinear;
    return g;
}

ResidualReport mpkkt_residuals(const MpcloInstance& inst, const Vec& x, const Vec& y, const Vec& u,
                               const Vec& v, double tol_scale) {
    if (static_cast<int>(x.size()) != inst.q() || static_cast<int>(y.size()) != inst.q())
        throw DimensionMismatch("mpkkt witnesses");
    if (static_cast<int>(u.size()) != inst.r() || static_cast<int>(v.size()) != inst.r())
        throw ParamDimensionMismatch("mpkkt parameters");

    ResidualReport rep;
    rep.primal_eq = norm_inf(matvec(inst.A, x) - inst.b);
    Vec cut_p = matvec(inst.M, inst.d);
    axpy(1.0, inst.apply_gram(v), cut_p);
    rep.primal_cut = norm_inf(matvec(inst.M, x) - cut_p);
    rep.primal_margin = cone_margin(x, inst.space);

    rep.dual_eq = inst.l() ? norm_inf(matvec(inst.B, y) - inst.a) : 0.0;
    Vec cut_d = matvec(inst.M, inst.c);
    axpy(1.0, inst.apply_gram(u), cut_d);
    rep.dual_cut = norm_inf(matvec(inst.M, y) - cut_d);
    rep.dual_margin = cone_margin(y, inst.space);

    rep.complementarity = std::fabs(dot(x, y));

    double mag = 1.0 + std::max({norm_inf(x), norm_inf(y), norm_inf(inst.b), norm_inf(u), norm_inf(v)});
    rep.tol = tol_scale * mag;
    rep.pass = rep.primal_eq <= rep.tol && rep.primal_cut <= rep.tol && rep.primal_margin >= -rep.tol &&
               rep.dual_eq <= rep.tol && rep.dual_cut <= rep.tol && rep.dual_margin >= -rep.tol &&
               rep.complementarity <= rep.tol;
    return rep;
}

}  // namespace mpclo
