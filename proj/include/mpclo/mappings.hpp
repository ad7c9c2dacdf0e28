#pragma once

#include <vector>

#include "mpclo/duality.hpp"
#include "mpclo/model.hpp"
#include "mpclo/solver.hpp"

namespace mpclo {

// Theta_P lives in v-space (slack d + M^T v + B^T w), Theta_D in u-space
// (slack c + M^T u + A^T w). Phi maps Theta_D into Theta_P through primal
// optimal solutions; Psi is its counterpart on the dual side.
enum class ThetaSide { PrimalSet, DualSet };
enum class MapSide { Phi, Psi };

ThetaSide theta_side_of(MapSide side);

struct MappingOptions {
    SolverOptions solver;
    double set_tol = 1e-5;   // width threshold separating Point from Set
    double mem_tol = 1e-6;   // optimality-test slack in map_membership
    double fd_delta = 1e-4;  // one-sided finite-difference step
    int n_dirs = 16;         // support directions for r = 2
    double slack_penalty = 1e-9;    // l1 penalty on slack multipliers
    double boundary_band = 1e-6;    // |margin| band classified Boundary
};

struct ThetaMembership {
    ThetaSide side;
    Vec point;
    MembershipStatus status = MembershipStatus::Outside;
    double margin = 0.0;
    bool margin_unbounded = false;
    Vec certificate;  // the multiplier w achieving the margin
    SolveStatus solver_status = SolveStatus::NumericalTrouble;
};

ThetaMembership theta_membership(const MpcloInstance& inst, ThetaSide side, const Vec& point,
                                 const MappingOptions& opts = {});

enum class MapStatus { Undefined, Point, Set };

struct SupportSample {
    Vec direction;  // unit direction in parameter space
    double value = 0.0;
    bool unbounded = false;
    Vec witness;  // extreme map value attaining the support (when bounded)
};

struct MapSample {
    MapSide side;
    Vec at;
    MapStatus status = MapStatus::Undefined;
    Vec point;  // canonical value G^{-1} M (x* - d) resp. G^{-1} M (y* - c)
    std::vector<SupportSample> support;
    double width = 0.0;
    bool any_unbounded = false;
    SolveResult base;
};

// Evaluates Phi(at) / Psi(at). Returns Undefined instead of failing when
// the parameter sits on the boundary of its representable set and the
// family solve cannot certify attainment.
MapSample map_eval(const MpcloInstance& inst, MapSide side, const Vec& at,
                   const MappingOptions& opts = {});

struct MembershipTest {
    bool member = false;
    double residual = 0.0;  // slack in the optimality inequality
};

// Decides candidate in Phi(at) (resp. Psi(at)) by the optimality test:
// the cut problem's solution must already be optimal for the
// objective-perturbed family at `at`.
MembershipTest map_membership(const MpcloInstance& inst, MapSide side, const Vec& at,
                              const Vec& candidate, const MappingOptions& opts = {});

struct RecessionResult {
    bool is_recession = false;
    double margin = 0.0;
    Vec certificate;
};

// Feasibility of the homogeneous slack system M^T h + B^T w in K (primal
// side) / M^T h + A^T w in K (dual side). Sufficient for h being a
// recession direction of the representable set; necessity is assumed.
RecessionResult recession_direction(const MpcloInstance& inst, ThetaSide side, const Vec& h,
                                    const MappingOptions& opts = {});

struct DerivativeResult {
    MapSide side;
    Vec at;
    Vec direction;
    bool unbounded_below = false;  // derivative is -inf along this direction
    double value = 0.0;
    bool fd_valid = false;
    double fd_check = 0.0;
};

// One-sided directional derivative of p* (Phi side) or d* (Psi side):
// min over the map sample of <h, M d + G v> via optimal-face support.
DerivativeResult directional_derivative(const MpcloInstance& inst, MapSide side, const Vec& at,
                                        const Vec& h, const MappingOptions& opts = {});

}  // namespace mpclo
