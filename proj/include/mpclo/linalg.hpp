#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mpclo {

using Vec = std::vector<double>;

// Dense row-major matrix. Everything here is desk scale (q <= ~200),
// so no attempt is made at blocking or sparsity.
struct Mat {
    int rows = 0;
    int cols = 0;
    Vec a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    std::span<double> row(int i) { return {a.data() + static_cast<size_t>(i) * cols, static_cast<size_t>(cols)}; }
    std::span<const double> row(int i) const {
        return {a.data() + static_cast<size_t>(i) * cols, static_cast<size_t>(cols)};
    }

    static Mat identity(int n);
    bool empty() const { return rows == 0 || cols == 0; }
};

double dot(const Vec& x, const Vec& y);
double norm2(const Vec& x);
double norm_inf(const Vec& x);
double max_abs(const Mat& m);
Vec operator+(const Vec& x, const Vec& y);
Vec operator-(const Vec& x, const Vec& y);
Vec operator*(double t, const Vec& x);
void axpy(double t, const Vec& x, Vec& y);  // y += t x

Vec matvec(const Mat& m, const Vec& x);
Vec matvec_t(const Mat& m, const Vec& x);  // m^T x
Mat matmul(const Mat& lhs, const Mat& rhs);
Mat matmul_nt(const Mat& lhs, const Mat& rhs);  // lhs rhs^T
Mat transpose(const Mat& m);
Mat vstack(const Mat& top, const Mat& bottom);

// Symmetric eigendecomposition via Householder tridiagonalization followed
// by implicit-shift QL. Eigenvalues ascending, eigenvectors in columns.
// Deterministic; intended for orders <= 64.
void sym_eig(const Mat& a, Vec& evals, Mat& evecs);

// In-place lower Cholesky. Returns false if a pivot drops below eps.
bool cholesky(Mat& a, double eps = 0.0);
void chol_solve(const Mat& l, Vec& b);

// Householder QR with column pivoting, A = Q R P^T. Used for rank decisions,
// orthonormal complements and free-variable elimination.
struct QrFactor {
    Mat qr;              // reflectors below the diagonal, R on and above
    Vec beta;            // reflector scalars
    std::vector<int> jpvt;
    int m = 0, n = 0;

    int rank(double tol) const;          // count of |R_kk| > tol
    double max_rdiag() const;
    void apply_qt(Vec& x) const;         // x <- Q^T x  (length m)
    void apply_q(Vec& x) const;          // x <- Q x    (length m)
    Vec q_column(int k) const;           // k-th column of Q
    // Minimum-norm-ish solve of A y = b using the first `rank` pivots;
    // entries of y follow the original column order. Residual not checked.
    Vec solve(const Vec& b, double tol) const;
};

QrFactor qr_factor(const Mat& a);

}  // namespace mpclo
