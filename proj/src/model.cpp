#include "mpclo/model.hpp"

#include <algorithm>
#include <cmath>

#include "mpclo/errors.hpp"

namespace mpclo {

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::Primal: return "primal";
        case Variant::Dual: return "dual";
        case Variant::NsDualOfPrimal: return "nsdual-p";
        case Variant::NsDualOfDual: return "nsdual-d";
    }
    return "?";
}

Vec MpcloInstance::apply_gram(const Vec& u) const {
    if (gram_mode == GramMode::Substitute) return u;
    return matvec(gram, u);
}

Vec MpcloInstance::apply_gram_inv(const Vec& u) const {
    if (gram_mode == GramMode::Substitute) return u;
    return matvec(gram_inv, u);
}

Vec MpcloInstance::obj_primal(const Vec& u) const {
    Vec o = c;
    axpy(1.0, matvec_t(M, u), o);
    return o;
}

Vec MpcloInstance::obj_dual(const Vec& v) const {
    Vec o = d;
    axpy(1.0, matvec_t(M, v), o);
    return o;
}

ValidationReport validate_instance(const MpcloInstance& inst, double orth_tol_scale) {
    ValidationReport rep;
    const int q = inst.q();
    if (inst.space.total_dim() != q) throw DimensionMismatch("space dimension vs matrix columns");
    if (inst.B.cols != q || inst.M.cols != q) throw DimensionMismatch("B or M column count");
    if (static_cast<int>(inst.c.size()) != q || static_cast<int>(inst.d.size()) != q)
        throw DimensionMismatch("c or d length");

    const double scale = std::max({max_abs(inst.A), max_abs(inst.B), max_abs(inst.M), 1.0});
    const double orth_tol = orth_tol_scale * (1.0 + scale);

    rep.res_a_mt = inst.M.rows ? max_abs(matmul_nt(inst.A, inst.M)) : 0.0;
    rep.res_a_bt = inst.B.rows ? max_abs(matmul_nt(inst.A, inst.B)) : 0.0;
    rep.res_b_mt = (inst.B.rows && inst.M.rows) ? max_abs(matmul_nt(inst.B, inst.M)) : 0.0;

    auto rank_of = [&](const Mat& m) {
        if (m.rows == 0) return 0;
        QrFactor f = qr_factor(transpose(m));
        return f.rank(1e-8 * std::max(f.max_rdiag(), 1.0));
    };
    rep.rank_a = rank_of(inst.A);
    rep.rank_b = rank_of(inst.B);
    rep.rank_m = rank_of(inst.M);
    rep.rank_deficit = q - (rep.rank_a + rep.rank_b + rep.rank_m);

    Mat gmi = inst.gram;
    double gap = 0.0;
    for (int i = 0; i < gmi.rows; ++i)
        for (int j = 0; j < gmi.cols; ++j) gap = std::max(gap, std::fabs(gmi(i, j) - (i == j ? 1.0 : 0.0)));
    rep.gram_identity_gap = gap;
    rep.assumption2_exact = gap <= orth_tol;

    Mat chol = inst.gram;
    const bool gram_pd = inst.M.rows == 0 || cholesky(chol, 1e-12);

    if (rep.res_a_mt > orth_tol) rep.failed_check = "orthogonality A*M^T";
    else if (rep.res_a_bt > orth_tol) rep.failed_check = "orthogonality A*B^T";
    else if (rep.res_b_mt > orth_tol) rep.failed_check = "orthogonality B*M^T";
    else if (rep.rank_deficit != 0) rep.failed_check = "rank sum";
    else if (!gram_pd) rep.failed_check = "gram positive definite";
    rep.pass = rep.failed_check.empty();
    return rep;
}

Mat complete_basis(const Mat& A, const Mat* M, double orth_tol_scale) {
    const int q = A.cols;
    if (M && M->rows > 0) {
        double res = max_abs(matmul_nt(A, *M));
        double scale = std::max(max_abs(A), max_abs(*M));
        if (res > orth_tol_scale * (1.0 + scale))
            throw OrthogonalityViolation("A*M^T residual " + std::to_string(res));
    }
    Mat stacked = M ? vstack(A, *M) : A;
    if (stacked.rows == 0) return Mat::identity(q);

    // QR of the transposed stack: trailing Q columns span the complement.
    QrFactor f = qr_factor(transpose(stacked));
    int rank = f.rank(1e-8 * std::max(f.max_rdiag(), 1.0));
    int l = q - rank;
    Mat B(l, q);
    for (int k = 0; k < l; ++k) {
        Vec col = f.q_column(rank + k);
        for (int j = 0; j < q; ++j) B(k, j) = col[j];
    }
    return B;
}

MpcloInstance make_instance(const ConeSpec& space, Mat A, std::optional<Mat> B, Mat M, Vec c, Vec d,
                            GramMode mode) {
    MpcloInstance inst;
    inst.space = space;
    inst.A = std::move(A);
    inst.M = std::move(M);
    inst.c = std::move(c);
    inst.d = std::move(d);
    inst.gram_mode = mode;
    const int q = inst.A.cols;
    if (space.total_dim() != q) throw DimensionMismatch("space dimension vs A columns");
    if (inst.M.cols != q && inst.M.rows > 0) throw DimensionMismatch("M columns");

    if (B.has_value()) inst.B = std::move(*B);
    else inst.B = complete_basis(inst.A, inst.M.rows ? &inst.M : nullptr);
    if (inst.B.rows == 0) inst.B = Mat(0, q);

    inst.b = matvec(inst.A, inst.d);
    inst.a = inst.B.rows ? matvec(inst.B, inst.c) : Vec{};
    inst.gram = matmul_nt(inst.M, inst.M);

    // invert G via Cholesky; Assumption 2 requires it positive definite
    const int r = inst.gram.rows;
    Mat chol = inst.gram;
    if (r > 0) {
        if (!cholesky(chol, 1e-12)) throw SingularGram("M M^T not positive definite");
        inst.gram_inv = Mat(r, r);
        for (int j = 0; j < r; ++j) {
            Vec e(r, 0.0);
            e[j] = 1.0;
            chol_solve(chol, e);
            for (int i = 0; i < r; ++i) inst.gram_inv(i, j) = e[i];
        }
    }
    ValidationReport rep = validate_instance(inst);
    inst.assumption2_exact = rep.assumption2_exact;
    return inst;
}

StandardProblem assemble(const MpcloInstance& inst, Variant variant, const Vec& param) {
    const int r = inst.r();
    if (static_cast<int>(param.size()) != r)
        throw ParamDimensionMismatch("expected length " + std::to_string(r));

    StandardProblem p;
    p.space = inst.space;
    p.variant = variant;
    p.param = param;
    switch (variant) {
        case Variant::Primal:
            p.objective = inst.obj_primal(param);
            p.eq_matrix = inst.A;
            p.eq_rhs = inst.b;
            break;
        case Variant::Dual:
            p.objective = inst.obj_dual(param);
            p.eq_matrix = inst.B;
            p.eq_rhs = inst.a;
            break;
        case Variant::NsDualOfPrimal: {
            p.objective = inst.d;
            p.eq_matrix = vstack(inst.B, inst.M);
            Vec rhs = matvec(inst.M, inst.c);
            axpy(1.0, inst.apply_gram(param), rhs);
            p.eq_rhs = inst.a;
            p.eq_rhs.insert(p.eq_rhs.end(), rhs.begin(), rhs.end());
            break;
        }
        case Variant::NsDualOfDual: {
            p.objective = inst.c;
            p.eq_matrix = vstack(inst.A, inst.M);
            Vec rhs = matvec(inst.M, inst.d);
            axpy(1.0, inst.apply_gram(param), rhs);
            p.eq_rhs = inst.b;
            p.eq_rhs.insert(p.eq_rhs.end(), rhs.begin(), rhs.end());
            break;
        }
    }
    return p;
}

}  // namespace mpclo
