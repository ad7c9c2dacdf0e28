#include "mpclo/mappings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpclo/errors.hpp"

namespace mpclo {

ThetaSide theta_side_of(MapSide side) {
    // Phi is defined on Theta_D, Psi on Theta_P
    return side == MapSide::Phi ? ThetaSide::DualSet : ThetaSide::PrimalSet;
}

namespace {

// Margin of the slack system z = z0 + F^T w in K: solves
//   max  t - eps |w|_1   s.t.  z - t e in K,
// split as w = w+ - w- with a tiny l1 penalty. The penalty keeps the
// problem attained and nondegenerate: a genuine boundary point reports a
// margin within solver noise of zero, while a point whose slack supremum
// is approached only along a diverging multiplier (the set is not closed
// there) reports a margin of order -sqrt(eps) and classifies as Outside.
ThetaMembership slack_margin(const MpcloInstance& inst, ThetaSide side, const Vec& z0, const Mat& fmat,
                             const MappingOptions& opts, const Vec& point) {
    const int q = inst.q();
    const int nw = fmat.rows;
    const double scale = 1.0 + norm_inf(z0);
    const double pen = opts.slack_penalty * scale;
    const Vec e = inst.space.central_element();

    // variables [z in K, w+ in R+, w- in R+, t free]
    Mat eq(q, q + 2 * nw + 1);
    Vec obj(q + 2 * nw + 1, 0.0);
    for (int i = 0; i < q; ++i) {
        eq(i, i) = 1.0;
        for (int j = 0; j < nw; ++j) {
            eq(i, q + j) = -fmat(j, i);
            eq(i, q + nw + j) = fmat(j, i);
        }
        eq(i, q + 2 * nw) = e[i];
    }
    for (int j = 0; j < 2 * nw; ++j) obj[q + j] = pen;
    obj[q + 2 * nw] = -1.0;

    ConeSpec ext = inst.space;
    if (nw) ext.blocks.push_back(Block{BlockKind::Orthant, 2 * nw});

    ThetaMembership tm;
    tm.side = side;
    tm.point = point;

    StandardProblem margin_problem;
    margin_problem.space = ext;
    margin_problem.variant = Variant::Primal;
    FreeElimination fe = eliminate_free(eq, z0, obj, q + 2 * nw, 1);
    margin_problem.objective = fe.reduced_obj;
    margin_problem.eq_matrix = fe.reduced_eq;
    margin_problem.eq_rhs = fe.reduced_rhs;

    SolveResult sr = solve(margin_problem, opts.solver);
    tm.solver_status = sr.status;

    if (sr.status == SolveStatus::Unbounded) {
        // margin grows without bound: strictly interior with room to spare
        tm.margin = std::numeric_limits<double>::infinity();
        tm.margin_unbounded = true;
        tm.status = MembershipStatus::Interior;
        return tm;
    }
    if (sr.status == SolveStatus::Infeasible) {
        tm.margin = -std::numeric_limits<double>::infinity();
        tm.status = MembershipStatus::Outside;
        return tm;
    }

    Vec frees = fe.recover_free(Vec(sr.x.begin(), sr.x.begin() + q + 2 * nw));
    tm.margin = frees[0];
    tm.certificate.assign(nw, 0.0);
    for (int j = 0; j < nw; ++j) tm.certificate[j] = sr.x[q + j] - sr.x[q + nw + j];

    if (sr.status != SolveStatus::Optimal) {
        // classify from the best iterate but keep the status visible
        tm.status = tm.margin > 0 ? MembershipStatus::Interior : MembershipStatus::Outside;
        return tm;
    }

    const double band = opts.boundary_band * scale;
    if (tm.margin > band)
        tm.status = MembershipStatus::Interior;
    else if (tm.margin < -band)
        tm.status = MembershipStatus::Outside;
    else
        tm.status = MembershipStatus::Boundary;
    return tm;
}

}  // namespace

ThetaMembership theta_membership(const MpcloInstance& inst, ThetaSide side, const Vec& point,
                                 const MappingOptions& opts) {
    if (static_cast<int>(point.size()) != inst.r())
        throw ParamDimensionMismatch("theta point length vs r");
    if (side == ThetaSide::PrimalSet) {
        Vec z0 = inst.obj_dual(point);  // d + M^T v
        return slack_margin(inst, side, z0, inst.B, opts, point);
    }
    Vec z0 = inst.obj_primal(point);  // c + M^T u
    return slack_margin(inst, side, z0, inst.A, opts, point);
}

namespace {

std::vector<Vec> support_directions(int r, int n_dirs) {
    std::vector<Vec> dirs;
    if (r == 1) {
        dirs.push_back({1.0});
        dirs.push_back({-1.0});
    } else if (r == 2) {
        int n = std::max(4, n_dirs);
        if (n % 2) ++n;  // keep antipodal pairs
        for (int k = 0; k < n; ++k) {
            double ang = 2.0 * M_PI * k / n;
            dirs.push_back({std::cos(ang), std::sin(ang)});
        }
    } else {
        for (int i = 0; i < r; ++i) {
            Vec plus(r, 0.0), minus(r, 0.0);
            plus[i] = 1.0;
            minus[i] = -1.0;
            dirs.push_back(plus);
            dirs.push_back(minus);
        }
    }
    return dirs;
}

}  // namespace

MapSample map_eval(const MpcloInstance& inst, MapSide side, const Vec& at, const MappingOptions& opts) {
    ThetaMembership tm = theta_membership(inst, theta_side_of(side), at, opts);
    if (tm.status == MembershipStatus::Outside)
        throw OutsideTheta("map_eval at a point outside its representable set");

    MapSample ms;
    ms.side = side;
    ms.at = at;

    const bool phi = side == MapSide::Phi;
    StandardProblem family = assemble(inst, phi ? Variant::Primal : Variant::Dual, at);
    ms.base = solve(family, opts.solver);
    if (ms.base.status != SolveStatus::Optimal) {
        if (tm.status == MembershipStatus::Boundary) {
            ms.status = MapStatus::Undefined;  // attainment cannot be certified
            return ms;
        }
        throw NotSolvable(status_name(ms.base.status), "map_eval family solve");
    }

    const Vec& anchor = phi ? inst.d : inst.c;
    ms.point = inst.apply_gram_inv(matvec(inst.M, ms.base.x - anchor));

    // Support probing of the optimal face, translated into parameter
    // space. The eps-relaxed face of a curved boundary is ~sqrt(eps) wide,
    // so each direction is probed at two relaxations and the sqrt(eps)
    // term extrapolated away; a genuine singleton then measures as one.
    Vec offset = inst.apply_gram_inv(matvec(inst.M, anchor));
    double width = 0.0;
    SolverOptions wide = opts.solver;
    wide.face_eps = 100.0 * opts.solver.face_eps;
    const double kappa = 10.0;  // sqrt(face_eps ratio)
    std::vector<Vec> dirs = support_directions(inst.r(), opts.n_dirs);
    for (const Vec& g : dirs) {
        SupportSample samp;
        samp.direction = g;
        Vec gx = matvec_t(inst.M, inst.apply_gram_inv(g));
        FaceSupport tight = optimal_face_support(family, ms.base, gx, opts.solver);
        if (tight.status == SolveStatus::Unbounded) {
            samp.unbounded = true;
        } else if (tight.status == SolveStatus::Optimal) {
            FaceSupport loose = optimal_face_support(family, ms.base, gx, wide);
            double val = tight.value;
            if (loose.status == SolveStatus::Optimal)
                val = (kappa * tight.value - loose.value) / (kappa - 1.0);
            samp.value = val - dot(g, offset);
            samp.witness = inst.apply_gram_inv(matvec(inst.M, tight.argmax - anchor));
        } else {
            // probe failed; treat as unbounded-unknown rather than guess
            samp.unbounded = true;
        }
        ms.any_unbounded = ms.any_unbounded || samp.unbounded;
        ms.support.push_back(samp);
    }
    // width over antipodal pairs (directions come in +/- pairs)
    for (size_t k = 0; k < ms.support.size(); ++k) {
        Vec negg = (-1.0) * ms.support[k].direction;
        for (size_t j = k + 1; j < ms.support.size(); ++j) {
            if (norm_inf(ms.support[j].direction - negg) > 1e-12) continue;
            if (ms.support[k].unbounded || ms.support[j].unbounded)
                width = std::numeric_limits<double>::infinity();
            else
                width = std::max(width, std::max(0.0, ms.support[k].value + ms.support[j].value));
        }
    }
    ms.width = width;
    ms.status = (width <= opts.set_tol) ? MapStatus::Point : MapStatus::Set;

    // For singletons the extrapolated support is far more accurate than the
    // family argmin (whose accuracy is only sqrt(gap) on curved faces):
    // snap the point to the support midpoint along each axis.
    if (ms.status == MapStatus::Point) {
        for (int i = 0; i < inst.r(); ++i) {
            const SupportSample* plus = nullptr;
            const SupportSample* minus = nullptr;
            for (const SupportSample& s : ms.support) {
                bool axis = true;
                for (int j = 0; j < inst.r(); ++j)
                    if (j != i && std::fabs(s.direction[j]) > 1e-12) axis = false;
                if (!axis) continue;
                if (s.direction[i] > 0.5) plus = &s;
                if (s.direction[i] < -0.5) minus = &s;
            }
            if (plus && minus && !plus->unbounded && !minus->unbounded)
                ms.point[i] = 0.5 * (plus->value - minus->value);
        }
    }
    return ms;
}

MembershipTest map_membership(const MpcloInstance& inst, MapSide side, const Vec& at, const Vec& candidate,
                              const MappingOptions& opts) {
    const bool phi = side == MapSide::Phi;
    MembershipTest out;

    ValueQuery base = value(inst, phi ? ValueVariant::PStar : ValueVariant::DStar, at, opts.solver);
    StandardProblem cut = assemble(inst, phi ? Variant::NsDualOfDual : Variant::NsDualOfPrimal, candidate);
    SolveResult cut_res = solve(cut, opts.solver);
    if (cut_res.status == SolveStatus::Infeasible) {
        out.member = false;
        out.residual = std::numeric_limits<double>::infinity();
        return out;
    }
    if (cut_res.status != SolveStatus::Optimal)
        throw NotSolvable(status_name(cut_res.status), "map_membership cut solve");

    Vec obj = phi ? inst.obj_primal(at) : inst.obj_dual(at);
    double across = dot(obj, cut_res.x);
    out.residual = across - base.value;
    out.member = across <= base.value + opts.mem_tol * (1.0 + std::fabs(base.value));
    return out;
}

RecessionResult recession_direction(const MpcloInstance& inst, ThetaSide side, const Vec& h,
                                    const MappingOptions& opts) {
    if (norm_inf(h) == 0.0) throw Error("recession_direction: zero direction");
    Vec z0 = matvec_t(inst.M, h);
    const Mat& fmat = side == ThetaSide::PrimalSet ? inst.B : inst.A;
    ThetaMembership tm = slack_margin(inst, side, z0, fmat, opts, h);
    RecessionResult rr;
    rr.margin = tm.margin;
    rr.certificate = tm.certificate;
    rr.is_recession = tm.status != MembershipStatus::Outside;
    return rr;
}

DerivativeResult directional_derivative(const MpcloInstance& inst, MapSide side, const Vec& at,
                                        const Vec& h, const MappingOptions& opts) {
    DerivativeResult dr;
    dr.side = side;
    dr.at = at;
    dr.direction = h;

    const bool phi = side == MapSide::Phi;
    ThetaMembership tm = theta_membership(inst, theta_side_of(side), at, opts);
    if (tm.status == MembershipStatus::Outside) throw OutsideTheta("directional_derivative");

    StandardProblem family = assemble(inst, phi ? Variant::Primal : Variant::Dual, at);
    SolveResult base = solve(family, opts.solver);
    if (base.status != SolveStatus::Optimal)
        throw UndefinedMap("family not solvable at the base point (" + status_name(base.status) + ")");

    // min over the optimal face of <h, M x> = <h, M anchor + G map-value>,
    // probed at two face relaxations to cancel the sqrt(eps) face width
    Vec gx = matvec_t(inst.M, h);
    Vec neg_gx = (-1.0) * gx;
    FaceSupport fs = optimal_face_support(family, base, neg_gx, opts.solver);
    if (fs.status == SolveStatus::Unbounded) {
        dr.unbounded_below = true;
        return dr;
    }
    if (fs.status != SolveStatus::Optimal)
        throw NotSolvable(status_name(fs.status), "directional_derivative face probe");
    dr.value = -fs.value;
    SolverOptions wide = opts.solver;
    wide.face_eps = 100.0 * opts.solver.face_eps;
    FaceSupport loose = optimal_face_support(family, base, neg_gx, wide);
    if (loose.status == SolveStatus::Optimal) {
        const double kappa = 10.0;
        dr.value = -(kappa * fs.value - loose.value) / (kappa - 1.0);
    }

    // one-sided finite difference when the stepped point stays in the set
    Vec stepped = at;
    axpy(opts.fd_delta, h, stepped);
    ThetaMembership tm2 = theta_membership(inst, theta_side_of(side), stepped, opts);
    if (tm2.status != MembershipStatus::Outside) {
        StandardProblem fam2 = assemble(inst, phi ? Variant::Primal : Variant::Dual, stepped);
        SolveResult r2 = solve(fam2, opts.solver);
        if (r2.status == SolveStatus::Optimal) {
            dr.fd_check = (r2.objective - base.objective) / opts.fd_delta;
            dr.fd_valid = true;
        }
    }
    return dr;
}

}  // namespace mpclo
