#pragma once

#include "mpclo/cones.hpp"
#include "mpclo/model.hpp"

namespace mpclo {

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter, NumericalTrouble };

std::string status_name(SolveStatus s);

struct SolverOptions {
    double feas_tol = 1e-8;
    double gap_tol = 1e-8;
    int max_iter = 200;
    double face_eps = 1e-7;   // optimal-face relaxation
    double cond_max = 1e14;
    double step_frac = 0.99;
};

struct SolveResult {
    SolveStatus status = SolveStatus::NumericalTrouble;
    Vec x;          // primal point; improving ray when Unbounded
    Vec mult;       // equality multipliers; Farkas certificate when Infeasible
    Vec s;          // dual slack, in K
    double objective = 0.0;
    double gap = 0.0;
    double primal_res = 0.0;
    double dual_res = 0.0;
    int iterations = 0;
};

// Primal-dual path-following interior-point method on the homogeneous
// self-dual embedding, NT scaling on PSD blocks, Mehrotra
// predictor-corrector. Dependent equality rows are deduplicated by QR;
// inconsistent dependent rows yield an Infeasible certificate directly.
SolveResult solve(const StandardProblem& problem, const SolverOptions& opts = {});

struct FeasibilityOutcome {
    enum class Kind { Feasible, Infeasible, Marginal };
    Kind kind = Kind::Infeasible;
    Vec point;           // cone-part witness z with eq z = rhs
    Vec certificate;     // separating multiplier when infeasible
    double margin = 0.0; // max t with z - t e in K subject to the equalities
    bool margin_unbounded = false;
    Vec free_part;       // recovered free variables at the margin optimum
    double free_norm = 0.0;
    SolveStatus solver_status = SolveStatus::NumericalTrouble;
};

// Decides feasibility of { (z, w) : eq [z; w] = rhs, z in K, w free } by
// maximizing the cone margin t with z - t e in K. The trailing `n_free`
// columns of `eq_matrix` are free coordinates. Margin maximization is
// solved in primal standard form after eliminating the free variables, so
// only pure-cone problems ever reach the interior-point core.
// `margin_dim` restricts the margin shift to the leading coordinates
// (block-aligned); -1 applies it to the whole cone.
FeasibilityOutcome check_feasibility(const Mat& eq_matrix, const Vec& eq_rhs, const ConeSpec& space,
                                     const SolverOptions& opts = {}, int n_free = 0, int margin_dim = -1);

// Exact elimination of trailing free variables from a standard-form
// problem via QR: eq = [C | F] with the last n_free columns free. The
// reduced problem is pure-cone; the free part is recovered from the cone
// solution afterwards. F must have full column rank.
struct FreeElimination {
    Mat reduced_eq;
    Vec reduced_rhs;
    Vec reduced_obj;
    double obj_const = 0.0;
    QrFactor fqr;
    Mat cone_cols;
    Vec rhs_full;
    int n_free = 0;
    int frank = 0;

    Vec recover_free(const Vec& cone_part) const;
    Vec lift_multipliers(const Vec& reduced_mult) const;
};

FreeElimination eliminate_free(const Mat& eq, const Vec& rhs, const Vec& obj, int n_cone, int n_free);

struct FaceSupport {
    SolveStatus status = SolveStatus::NumericalTrouble;
    bool unbounded = false;
    double value = 0.0;
    Vec argmax;
};

// max <g, x> over the optimal face { x feasible, <objective, x> <= base + face_eps }.
FaceSupport optimal_face_support(const StandardProblem& problem, const SolveResult& base, const Vec& g,
                                 const SolverOptions& opts = {});

}  // namespace mpclo
