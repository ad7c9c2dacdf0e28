#pragma once

#include <optional>
#include <string>

#include "mpclo/cones.hpp"
#include "mpclo/linalg.hpp"

namespace mpclo {

// Which of the two fixes to apply when the Gram matrix M M^T is not the
// identity. `Correct` keeps the parameter space fixed and scales the
// mapping-side right-hand sides and map values by G / G^{-1}; `Substitute`
// treats the parameters as already lifted (G replaced by the identity in
// every formula). The two coincide whenever G = I.
enum class GramMode { Correct, Substitute };

struct ValidationReport {
    bool pass = false;
    bool assumption2_exact = false;
    double res_a_mt = 0.0;   // max |A M^T|
    double res_a_bt = 0.0;   // max |A B^T|
    double res_b_mt = 0.0;   // max |B M^T|
    int rank_a = 0, rank_b = 0, rank_m = 0;
    int rank_deficit = 0;    // q - (rank A + rank B + rank M)
    double gram_identity_gap = 0.0;  // max |G - I|
    std::string failed_check;        // empty when pass
};

// Instance data for the four parametric families. Immutable once validated.
struct MpcloInstance {
    ConeSpec space;
    Mat A;  // m x q
    Mat B;  // l x q
    Mat M;  // r x q
    Vec c;
    Vec d;

    // derived
    Vec b;      // A d
    Vec a;      // B c
    Mat gram;   // M M^T
    Mat gram_inv;
    bool assumption2_exact = false;
    GramMode gram_mode = GramMode::Correct;

    int q() const { return A.cols; }
    int m() const { return A.rows; }
    int l() const { return B.rows; }
    int r() const { return M.rows; }

    // G u under the active gram mode (identity when Substitute).
    Vec apply_gram(const Vec& u) const;
    Vec apply_gram_inv(const Vec& u) const;

    Vec obj_primal(const Vec& u) const;  // c + M^T u
    Vec obj_dual(const Vec& v) const;    // d + M^T v
};

enum class Variant { Primal, Dual, NsDualOfPrimal, NsDualOfDual };

std::string variant_name(Variant v);

// One member of a parametric family in standard conic form
// min <objective, x> s.t. eq_matrix x = eq_rhs, x in K.
struct StandardProblem {
    Vec objective;
    Mat eq_matrix;
    Vec eq_rhs;
    ConeSpec space;
    Variant variant;
    Vec param;
};

ValidationReport validate_instance(const MpcloInstance& inst, double orth_tol_scale = 1e-8);

// Builds an instance from raw data, filling b, a, G and validating.
// Throws SingularGram when G is not positive definite. When `B` is absent
// it is completed as an orthonormal basis of the complement of
// R(A^T) + R(M^T).
MpcloInstance make_instance(const ConeSpec& space, Mat A, std::optional<Mat> B, Mat M, Vec c, Vec d,
                            GramMode mode = GramMode::Correct);

// Orthonormal rows spanning the orthogonal complement of R(A^T) + R(M^T).
Mat complete_basis(const Mat& A, const Mat* M, double orth_tol_scale = 1e-8);

StandardProblem assemble(const MpcloInstance& inst, Variant variant, const Vec& param);

}  // namespace mpclo
