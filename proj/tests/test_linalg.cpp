#include <doctest.h>

#include <cmath>
#include <random>

#include "mpclo/linalg.hpp"

using namespace mpclo;

TEST_SUITE_BEGIN("linalg");

namespace {
Mat random_sym(int n, std::mt19937& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = g(rng);
            a(i, j) = v;
            a(j, i) = v;
        }
    return a;
}
}  // namespace

TEST_CASE("sym_eig reconstructs the matrix") {
    std::mt19937 rng(7);
    for (int n : {1, 2, 3, 5, 8, 13}) {
        Mat a = random_sym(n, rng);
        Vec ev;
        Mat q;
        sym_eig(a, ev, q);
        for (int i = 0; i + 1 < n; ++i) CHECK(ev[i] <= ev[i + 1]);
        // || Q D Q^T - A ||
        double err = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += q(i, k) * ev[k] * q(j, k);
                err = std::max(err, std::fabs(s - a(i, j)));
            }
        CHECK(err < 1e-10);
        // orthonormal columns
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += q(k, i) * q(k, j);
                CHECK(std::fabs(s - (i == j ? 1.0 : 0.0)) < 1e-12);
            }
    }
}

TEST_CASE("cholesky solves SPD systems") {
    std::mt19937 rng(11);
    Mat a = random_sym(6, rng);
    Mat spd(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            double s = 0.0;
            for (int k = 0; k < 6; ++k) s += a(i, k) * a(j, k);
            spd(i, j) = s + (i == j ? 6.0 : 0.0);
        }
    Vec x0 = {1, -2, 3, 0.5, -0.25, 4};
    Vec b = matvec(spd, x0);
    Mat l = spd;
    REQUIRE(cholesky(l));
    chol_solve(l, b);
    for (int i = 0; i < 6; ++i) CHECK(b[i] == doctest::Approx(x0[i]).epsilon(1e-10));
}

TEST_CASE("qr rank and complement") {
    Mat a(2, 4);
    a(0, 0) = 1;
    a(0, 1) = 2;
    a(0, 2) = 3;
    a(0, 3) = 4;
    a(1, 0) = 2;
    a(1, 1) = 4;
    a(1, 2) = 6;
    a(1, 3) = 8;  // dependent row
    QrFactor f = qr_factor(transpose(a));
    CHECK(f.rank(1e-10 * f.max_rdiag()) == 1);

    // Q columns beyond the rank are orthogonal to the row space
    Vec q1 = f.q_column(1);
    Vec r0(a.row(0).begin(), a.row(0).end());
    CHECK(std::fabs(dot(q1, r0)) < 1e-10);
}

TEST_CASE("qr solve reproduces consistent systems") {
    std::mt19937 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    Mat a(5, 3);
    for (double& v : a.a) v = g(rng);
    Vec y = {0.3, -1.2, 0.7};
    Vec b = matvec(a, y);
    QrFactor f = qr_factor(a);
    Vec sol = f.solve(b, 1e-12);
    for (int i = 0; i < 3; ++i) CHECK(sol[i] == doctest::Approx(y[i]).epsilon(1e-9));
}

TEST_SUITE_END();
