#include <doctest.h>

#include <cmath>
#include <random>

#include "mpclo/cones.hpp"
#include "mpclo/solver.hpp"
#include "oracle_lp.hpp"

using namespace mpclo;

TEST_SUITE_BEGIN("solver");

namespace {

StandardProblem make_lp(const Mat& a, const Vec& b, const Vec& c) {
    StandardProblem p;
    p.space = orthant_cone(a.cols);
    p.eq_matrix = a;
    p.eq_rhs = b;
    p.objective = c;
    p.variant = Variant::Primal;
    return p;
}

// pentagon LP of the worked example: q=5, three equality rows
Mat pentagon_a() {
    Mat a(3, 5);
    double v[3][5] = {{1, 1, 1, 0, 0}, {0, 1, 0, 1, 0}, {1, 0, 0, 0, 1}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 5; ++j) a(i, j) = v[i][j];
    return a;
}

void check_kkt(const StandardProblem& p, const SolveResult& r, double tol) {
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(norm_inf(matvec(p.eq_matrix, r.x) - p.eq_rhs) <= tol);
    Vec dres = matvec_t(p.eq_matrix, r.mult);
    for (size_t i = 0; i < dres.size(); ++i) dres[i] += r.s[i] - p.objective[i];
    CHECK(norm_inf(dres) <= tol);
    CHECK(std::fabs(dot(r.x, r.s)) <= tol * (1.0 + std::fabs(r.objective)));
    CHECK(cone_margin(r.x, p.space) >= -1e-9);
    CHECK(cone_margin(r.s, p.space) >= -1e-9);
}

}  // namespace

TEST_CASE("tiny lp") {
    Mat a(1, 2);
    a(0, 0) = 1;
    a(0, 1) = 1;
    StandardProblem p = make_lp(a, {2.0}, {1.0, 0.0});
    SolveResult r = solve(p);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(r.x[1] == doctest::Approx(2.0));
    check_kkt(p, r, 1e-6);
}

TEST_CASE("infeasible lp returns a certificate") {
    Mat a(1, 1);
    a(0, 0) = 1;
    StandardProblem p = make_lp(a, {-1.0}, {1.0});
    SolveResult r = solve(p);
    REQUIRE(r.status == SolveStatus::Infeasible);
    // certificate: <rhs, mult> > 0 and -A^T mult in K
    CHECK(dot(p.eq_rhs, r.mult) > 0.0);
    Vec at = matvec_t(p.eq_matrix, r.mult);
    CHECK(-at[0] >= -1e-8);
}

TEST_CASE("unbounded lp returns a ray") {
    Mat a(1, 2);
    a(0, 0) = 1;
    a(0, 1) = -1;
    StandardProblem p = make_lp(a, {0.0}, {-1.0, 0.0});
    SolveResult r = solve(p);
    REQUIRE(r.status == SolveStatus::Unbounded);
    CHECK(norm_inf(matvec(p.eq_matrix, r.x)) <= 1e-6);
    CHECK(dot(p.objective, r.x) < 0.0);
    CHECK(cone_margin(r.x, p.space) >= -1e-9);
}

TEST_CASE("pentagon optimum at u = 0.5") {
    Mat a = pentagon_a();
    Vec m = {-0.5, 0.5, 0, -0.5, 0.5};
    Vec c = {-1, -1, 0, 0, 0};
    Vec obj = c;
    axpy(0.5, m, obj);
    StandardProblem p = make_lp(a, {3, 2, 2.5}, obj);
    SolveResult r = solve(p);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective == doctest::Approx(-3.875).epsilon(1e-7));
    Vec expect = {2.5, 0.5, 0, 1.5, 0};
    for (int i = 0; i < 5; ++i) CHECK(r.x[i] == doctest::Approx(expect[i]).epsilon(1e-6));
    check_kkt(p, r, 1e-6);
}

TEST_CASE("2x2 sdp closed form") {
    // min x11 + u x22 s.t. 2 x12 = 2, x psd; optimum 2 sqrt(u)
    for (double u : {0.25, 1.0, 4.0}) {
        StandardProblem p;
        p.space = psd_cone(2);
        Mat a1(2, 2);
        a1(0, 1) = 1;
        a1(1, 0) = 1;
        p.eq_matrix = Mat(1, 3);
        Vec a1v = svec(a1);
        for (int j = 0; j < 3; ++j) p.eq_matrix(0, j) = a1v[j];
        p.eq_rhs = {2.0};
        Mat objm(2, 2);
        objm(0, 0) = 1;
        objm(1, 1) = u;
        p.objective = svec(objm);
        p.variant = Variant::Primal;
        SolveResult r = solve(p);
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK(r.objective == doctest::Approx(2.0 * std::sqrt(u)).epsilon(1e-5));
        check_kkt(p, r, 1e-6);
        if (u == 1.0) {
            Mat x = smat(r.x, 2);
            CHECK(x(0, 0) == doctest::Approx(1.0).epsilon(1e-5));
            CHECK(x(0, 1) == doctest::Approx(1.0).epsilon(1e-5));
            CHECK(x(1, 1) == doctest::Approx(1.0).epsilon(1e-5));
        }
    }
}

TEST_CASE("random lp oracle equivalence") {
    std::mt19937 rng(1234);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> qdist(3, 8);
    int solved = 0;
    for (int rep = 0; rep < 60; ++rep) {
        int q = qdist(rng);
        int m = 1 + (rep % std::max(1, q - 2));
        Mat a(m, q);
        for (double& v : a.a) v = g(rng);
        for (int j = 0; j < q; ++j) a(0, j) = 1.0;  // bounding row
        Vec x0(q);
        std::uniform_real_distribution<double> pos(0.1, 2.0);
        for (double& v : x0) v = pos(rng);
        Vec b = matvec(a, x0);
        Vec c(q);
        for (double& v : c) v = g(rng);

        auto oracle = mpclo::testing::lp_vertex_enumerate(a, b, c);
        REQUIRE(oracle.feasible);
        SolveResult r = solve(make_lp(a, b, c));
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK(r.objective == doctest::Approx(oracle.value).epsilon(1e-6));
        ++solved;
    }
    CHECK(solved == 60);
}

TEST_CASE("check_feasibility margin on simple systems") {
    // z = rhs with rhs = (-1, 0): margin -1
    Mat eq = Mat::identity(2);
    auto out = check_feasibility(eq, {-1.0, 0.0}, orthant_cone(2));
    CHECK(out.kind == FeasibilityOutcome::Kind::Infeasible);
    CHECK(out.margin == doctest::Approx(-1.0).epsilon(1e-6));

    // z1 - z2 = 0: margin unbounded
    Mat eq2(1, 2);
    eq2(0, 0) = 1;
    eq2(0, 1) = -1;
    auto out2 = check_feasibility(eq2, {0.0}, orthant_cone(2));
    CHECK(out2.kind == FeasibilityOutcome::Kind::Feasible);
    CHECK(out2.margin_unbounded);
}

TEST_CASE("check_feasibility with free columns: 2x2 slack system") {
    // z = c0 + u m1 + w a1 psd; at u=2 the margin tops out at 0 (attained)
    // variables (z svec, w free): z - w a1 = c0 + u m1
    Mat a1(2, 2);
    a1(0, 1) = 1;
    a1(1, 0) = 1;
    Mat c0(2, 2);
    c0(0, 0) = 1;
    Mat m1(2, 2);
    m1(1, 1) = 1;

    Mat eq(3, 4);
    Vec a1v = svec(a1);
    for (int i = 0; i < 3; ++i) {
        eq(i, i) = 1.0;
        eq(i, 3) = -a1v[i];
    }
    double u = 2.0;
    Mat z0(2, 2);
    z0(0, 0) = c0(0, 0);
    z0(1, 1) = u;
    Vec rhs = svec(z0);
    auto out = check_feasibility(eq, rhs, psd_cone(2), {}, 1);
    CHECK((out.kind == FeasibilityOutcome::Kind::Feasible || out.kind == FeasibilityOutcome::Kind::Marginal));
    CHECK(out.margin >= -1e-6);
    CHECK(out.free_norm < 100.0);
}

TEST_CASE("optimal_face_support spans the pentagon optimal edge") {
    Mat a = pentagon_a();
    Vec c = {-1, -1, 0, 0, 0};
    StandardProblem p = make_lp(a, {3, 2, 2.5}, c);  // u = 0
    SolveResult base = solve(p);
    REQUIRE(base.status == SolveStatus::Optimal);
    CHECK(base.objective == doctest::Approx(-3.0).epsilon(1e-7));

    Vec m = {-0.5, 0.5, 0, -0.5, 0.5};
    FaceSupport up = optimal_face_support(p, base, m);
    REQUIRE(up.status == SolveStatus::Optimal);
    CHECK(up.value == doctest::Approx(1.25).epsilon(1e-5));

    Vec mneg = (-1.0) * m;
    FaceSupport dn = optimal_face_support(p, base, mneg);
    REQUIRE(dn.status == SolveStatus::Optimal);
    CHECK(-dn.value == doctest::Approx(-1.75).epsilon(1e-5));

    // monotone in face_eps
    SolverOptions wide;
    wide.face_eps = 1e-4;
    FaceSupport up2 = optimal_face_support(p, base, m, wide);
    CHECK(up2.value >= up.value - 1e-9);

    // zero direction
    Vec zero(5, 0.0);
    FaceSupport z = optimal_face_support(p, base, zero);
    CHECK(z.value == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("duplicate rows are deduplicated, inconsistent ones rejected") {
    Mat a(2, 2);
    a(0, 0) = 1;
    a(0, 1) = 1;
    a(1, 0) = 2;
    a(1, 1) = 2;
    StandardProblem ok = make_lp(a, {2.0, 4.0}, {1.0, 0.0});
    SolveResult r = solve(ok);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective == doctest::Approx(0.0).epsilon(1e-7));

    StandardProblem bad = make_lp(a, {2.0, 5.0}, {1.0, 0.0});
    SolveResult rb = solve(bad);
    CHECK(rb.status == SolveStatus::Infeasible);
}

TEST_SUITE_END();
