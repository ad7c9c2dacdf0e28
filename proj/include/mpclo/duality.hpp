#pragma once

#include "mpclo/model.hpp"
#include "mpclo/solver.hpp"

namespace mpclo {

// Value functions of the four families. PStar/DStar are the minimization
// values of the objective-perturbed pair; DBarStar/PBarStar are the
// max-form values of the right-hand-side-perturbed pair, recovered from
// min-form solves plus the bilinear constant.
enum class ValueVariant { PStar, DStar, DBarStar, PBarStar };

struct ValueQuery {
    ValueVariant variant;
    Vec param;
    double value = 0.0;
    SolveResult witness;
};

ValueQuery value(const MpcloInstance& inst, ValueVariant variant, const Vec& param,
                 const SolverOptions& opts = {});

struct IdentityReport {
    // p*(u) + d*(v) - <c + M^T u, d + M^T v>
    double identity_residual = 0.0;
    double primal_nogap = 0.0;  // |p*(u) - dbar*(u)|
    double dual_nogap = 0.0;    // |d*(v) - pbar*(v)|
    double p_star = 0.0, d_star = 0.0, bilinear = 0.0;
};

IdentityReport duality_identity_residual(const MpcloInstance& inst, const Vec& u, const Vec& v,
                                         const SolverOptions& opts = {});

struct WeakDualityGaps {
    double gap_bar = 0.0;  // right-hand-side pair direction
    double gap = 0.0;      // objective pair direction
};

// Both gaps are nonnegative whenever the coupling hypothesis (v in Phi(u)
// or u in Psi(v)) holds; witnesses are feasibility-checked first.
WeakDualityGaps weak_duality_gaps(const MpcloInstance& inst, const Vec& u, const Vec& v, const Vec& x,
                                  const Vec& y, double feas_tol = 1e-6);

struct ResidualReport {
    double primal_eq = 0.0;      // ||A x - b||
    double primal_cut = 0.0;     // ||M x - (M d + G v)||
    double primal_margin = 0.0;  // cone margin of x
    double dual_eq = 0.0;        // ||B y - a||
    double dual_cut = 0.0;       // ||M y - (M c + G u)||
    double dual_margin = 0.0;    // cone margin of y
    double complementarity = 0.0;
    double tol = 0.0;
    bool pass = false;
};

// Residuals of the coupled parametric KKT system at (x, y, u, v).
ResidualReport mpkkt_residuals(const MpcloInstance& inst, const Vec& x, const Vec& y, const Vec& u,
                               const Vec& v, double tol_scale = 1e-6);

}  // namespace mpclo
