#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mpclo/errors.hpp"
#include "mpclo/mappings.hpp"

using namespace mpclo;
using namespace mpclo::testing;

TEST_SUITE_BEGIN("mappings");

TEST_CASE("theta membership on the fixtures") {
    MpcloInstance ex1 = example1();
    ThetaMembership t1 = theta_membership(ex1, ThetaSide::DualSet, {2.0});
    CHECK(t1.status != MembershipStatus::Outside);  // Theta_D = [0, inf)

    MpcloInstance ex2 = example2();
    ThetaMembership t2 = theta_membership(ex2, ThetaSide::PrimalSet, {0.0});
    CHECK(t2.status == MembershipStatus::Interior);
    CHECK(t2.margin > 0.1);

    // v = -2: the slack matrix needs an off-diagonal entry over a zero
    // diagonal; only approachable with a diverging multiplier
    ThetaMembership t3 = theta_membership(ex2, ThetaSide::PrimalSet, {-2.0});
    CHECK(t3.status == MembershipStatus::Outside);

    ThetaMembership t4 = theta_membership(ex2, ThetaSide::PrimalSet, {-3.0});
    CHECK(t4.status == MembershipStatus::Outside);

    ThetaMembership t5 = theta_membership(ex2, ThetaSide::DualSet, {0.0});
    CHECK(t5.status == MembershipStatus::Boundary);

    ThetaMembership t6 = theta_membership(ex2, ThetaSide::DualSet, {1.0});
    CHECK(t6.status == MembershipStatus::Interior);
}

TEST_CASE("map closed forms on the 2x2 fixture") {
    MpcloInstance inst = example2();
    for (double u : {0.25, 1.0, 4.0}) {
        MapSample ms = map_eval(inst, MapSide::Phi, {u});
        REQUIRE(ms.status == MapStatus::Point);
        CHECK(ms.point[0] == doctest::Approx(1.0 / std::sqrt(u) - 2.0).epsilon(1e-5));
    }
    for (double v : {-1.0, 0.0, 2.0}) {
        MapSample ms = map_eval(inst, MapSide::Psi, {v});
        REQUIRE(ms.status == MapStatus::Point);
        CHECK(ms.point[0] == doctest::Approx(1.0 / ((v + 2.0) * (v + 2.0))).epsilon(1e-5));
    }
    // boundary: map undefined
    MapSample undef = map_eval(inst, MapSide::Phi, {0.0});
    CHECK(undef.status == MapStatus::Undefined);

    CHECK_THROWS_AS(map_eval(inst, MapSide::Phi, {-1.0}), OutsideTheta);
}

TEST_CASE("pentagon transition point maps to an interval") {
    MpcloInstance inst = example3();
    MapSample ms = map_eval(inst, MapSide::Phi, {0.0});
    REQUIRE(ms.status == MapStatus::Set);
    // support in +/- 1 gives the interval [-2, 1]
    double hi = 0, lo = 0;
    for (const SupportSample& s : ms.support) {
        REQUIRE_FALSE(s.unbounded);
        if (s.direction[0] > 0) hi = s.value;
        else lo = -s.value;
    }
    CHECK(hi == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(lo == doctest::Approx(-2.0).epsilon(1e-5));
    CHECK(ms.width == doctest::Approx(3.0).epsilon(1e-5));

    // interior of an invariancy interval: a point
    MapSample pt = map_eval(inst, MapSide::Phi, {0.5});
    REQUIRE(pt.status == MapStatus::Point);
    CHECK(pt.point[0] == doctest::Approx(-2.0).epsilon(1e-6));

    MapSample psi = map_eval(inst, MapSide::Psi, {-2.0});
    REQUIRE(psi.status == MapStatus::Set);  // Psi(-2) = [0, 1]
    CHECK(psi.width == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("unbounded image set on the elliptope corner") {
    MpcloInstance inst = example4();
    MappingOptions opts;
    opts.n_dirs = 8;
    MapSample ms = map_eval(inst, MapSide::Psi, {1.0, 1.0}, opts);
    if (ms.status == MapStatus::Undefined) {
        // boundary attainment is allowed to be reported undefined; the
        // remaining checks only make sense when the face was probed
        WARN("corner image reported undefined");
        return;
    }
    REQUIRE(ms.status == MapStatus::Set);
    CHECK(ms.any_unbounded);
    for (const SupportSample& s : ms.support) {
        bool nonneg = s.direction[0] >= -1e-12 && s.direction[1] >= -1e-12;
        if (!nonneg) CHECK(s.unbounded);
        if (!s.unbounded) {
            // witnesses live in Theta_D^1
            CHECK(s.witness[0] <= -1.0 + 1e-4);
            CHECK(s.witness[1] <= -1.0 + 1e-4);
            CHECK(s.witness[0] + s.witness[1] + s.witness[0] * s.witness[1] >= -1e-4);
        }
    }
}

TEST_CASE("map membership via the optimality test") {
    MpcloInstance ex3 = example3();
    MembershipTest yes = map_membership(ex3, MapSide::Phi, {0.5}, {-2.0});
    CHECK(yes.member);
    MembershipTest no = map_membership(ex3, MapSide::Phi, {0.5}, {1.0});
    CHECK_FALSE(no.member);
    CHECK(no.residual == doctest::Approx(1.5).epsilon(1e-5));

    MpcloInstance ex4 = example4();
    MembershipTest corner = map_membership(ex4, MapSide::Psi, {1.0, 1.0}, {-2.0, -2.0});
    CHECK(corner.member);

    // infeasible cut: candidate outside the box
    MembershipTest inf = map_membership(ex4, MapSide::Phi, {2.0, 2.0}, {3.0, 0.0});
    CHECK_FALSE(inf.member);
}

TEST_CASE("inverse round-trip on interior samples") {
    MpcloInstance ex2 = example2();
    for (double u : {0.3, 0.8, 2.0, 5.0}) {
        MapSample ms = map_eval(ex2, MapSide::Phi, {u});
        REQUIRE(ms.status == MapStatus::Point);
        MembershipTest back = map_membership(ex2, MapSide::Psi, ms.point, {u});
        CHECK(back.member);
    }
    MpcloInstance ex3 = example3();
    for (double u : {-2.0, -0.5, 0.5, 2.0}) {
        MapSample ms = map_eval(ex3, MapSide::Phi, {u});
        REQUIRE(ms.status == MapStatus::Point);
        MembershipTest back = map_membership(ex3, MapSide::Psi, ms.point, {u});
        CHECK(back.member);
    }
}

TEST_CASE("midpoints of extreme witnesses stay in the image set") {
    MpcloInstance inst = example3();
    MapSample ms = map_eval(inst, MapSide::Phi, {0.0});
    REQUIRE(ms.status == MapStatus::Set);
    // midpoint of the interval [-2, 1]
    MembershipTest mid = map_membership(inst, MapSide::Phi, {0.0}, {-0.5});
    CHECK(mid.member);
}

TEST_CASE("recession directions") {
    MpcloInstance ex3 = example3();
    CHECK(recession_direction(ex3, ThetaSide::DualSet, {1.0}).is_recession);
    CHECK(recession_direction(ex3, ThetaSide::DualSet, {-1.0}).is_recession);
    CHECK_FALSE(recession_direction(ex3, ThetaSide::PrimalSet, {1.0}).is_recession);
    CHECK_FALSE(recession_direction(ex3, ThetaSide::PrimalSet, {-1.0}).is_recession);

    MpcloInstance ex2 = example2();
    CHECK(recession_direction(ex2, ThetaSide::DualSet, {1.0}).is_recession);
    CHECK_FALSE(recession_direction(ex2, ThetaSide::DualSet, {-1.0}).is_recession);
    CHECK(recession_direction(ex2, ThetaSide::PrimalSet, {1.0}).is_recession);
}

TEST_CASE("directional derivatives against closed forms") {
    MpcloInstance ex2 = example2();
    // p*(u) = 2 sqrt(u): derivative 1/sqrt(u)
    DerivativeResult d1 = directional_derivative(ex2, MapSide::Phi, {1.0}, {1.0});
    CHECK_FALSE(d1.unbounded_below);
    CHECK(d1.value == doctest::Approx(1.0).epsilon(1e-5));
    REQUIRE(d1.fd_valid);
    CHECK(std::fabs(d1.value - d1.fd_check) <= 1e-3 * (1.0 + std::fabs(d1.value)));

    // d*(v) = 2 - 1/(v+2): derivative 1/(v+2)^2 = 1 at v = -1
    DerivativeResult d2 = directional_derivative(ex2, MapSide::Psi, {-1.0}, {1.0});
    CHECK(d2.value == doctest::Approx(1.0).epsilon(1e-4));

    MpcloInstance ex3 = example3();
    // p* is linear with slope M x* = -1.75 on the (0,1) interval
    DerivativeResult d3 = directional_derivative(ex3, MapSide::Phi, {0.5}, {1.0});
    CHECK(d3.value == doctest::Approx(-1.75).epsilon(1e-5));
    REQUIRE(d3.fd_valid);
    CHECK(std::fabs(d3.value - d3.fd_check) <= 1e-3 * (1.0 + std::fabs(d3.value)));

    // at the kink u = 0 the two one-sided derivatives differ
    DerivativeResult dplus = directional_derivative(ex3, MapSide::Phi, {0.0}, {1.0});
    DerivativeResult dminus = directional_derivative(ex3, MapSide::Phi, {0.0}, {-1.0});
    CHECK(dplus.value == doctest::Approx(-1.75).epsilon(1e-5));   // Md + v at v = -2
    CHECK(dminus.value == doctest::Approx(-1.25).epsilon(1e-5));  // -(Md + v) at v = 1
}

TEST_CASE("derivative formula equals the face minimum on the elliptope") {
    MpcloInstance inst = example4();
    // at the origin the optimal face maps to the segment (a, -a), a in [-1,1]
    DerivativeResult d = directional_derivative(inst, MapSide::Phi, {0.0, 0.0}, {1.0, -1.0});
    CHECK_FALSE(d.unbounded_below);
    CHECK(d.value == doctest::Approx(-4.0).epsilon(1e-4));
    REQUIRE(d.fd_valid);
    CHECK(std::fabs(d.value - d.fd_check) <= 1e-3 * (1.0 + std::fabs(d.value)));

    DerivativeResult dd = directional_derivative(inst, MapSide::Phi, {0.0, 0.0}, {1.0, 1.0});
    CHECK(std::fabs(dd.value) < 1e-4);
}

TEST_SUITE_END();
