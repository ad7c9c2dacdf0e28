#pragma once

#include "mpclo/model.hpp"

namespace mpclo::testing {

// The four instance fixtures used across the test suites. Matrices are
// entered as full symmetric matrices and svec'd here, mirroring the JSON
// fixtures shipped with the CLI.

inline Mat sym2(double a, double b, double c) {
    Mat m(2, 2);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 0) = b;
    m(1, 1) = c;
    return m;
}

inline Mat sym3(std::initializer_list<double> upper) {
    // order: 11, 12, 13, 22, 23, 33
    auto it = upper.begin();
    Mat m(3, 3);
    double a11 = *it++, a12 = *it++, a13 = *it++, a22 = *it++, a23 = *it++, a33 = *it++;
    m(0, 0) = a11;
    m(0, 1) = m(1, 0) = a12;
    m(0, 2) = m(2, 0) = a13;
    m(1, 1) = a22;
    m(1, 2) = m(2, 1) = a23;
    m(2, 2) = a33;
    return m;
}

inline Mat rows_from_svecs(const std::vector<Vec>& rows) {
    Mat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return m;
}

// 3x3 SDP with gram = 1.5; only the orthogonality assumption holds exactly.
inline MpcloInstance example1() {
    Mat a1 = sym3({0, 0, 0, 1, 0, 0});
    Mat a2 = sym3({1, 0, 0, 0, 1, 0});
    Mat m1 = sym3({1, 0, 0, 0, -0.5, 0});
    Mat b1 = sym3({0, 1, 0, 0, 0, 0});
    Mat b2 = sym3({0, 0, 1, 0, 0, 0});
    Mat b3 = sym3({0, 0, 0, 0, 0, 1});
    Mat c(3, 3);
    Mat d = sym3({1, 0, 0, 0, 0, 0});
    return make_instance(psd_cone(3), rows_from_svecs({svec(a1), svec(a2)}),
                         rows_from_svecs({svec(b1), svec(b2), svec(b3)}), rows_from_svecs({svec(m1)}),
                         svec(c), svec(d));
}

// 2x2 SDP with closed-form maps on both sides.
inline MpcloInstance example2() {
    Mat c = sym2(1, 0, 0);
    Mat m1 = sym2(0, 0, 1);
    Mat a1 = sym2(0, 1, 0);
    Mat b1 = sym2(1, 0, 0);
    Mat d = sym2(2, 1, 2);
    return make_instance(psd_cone(2), rows_from_svecs({svec(a1)}), rows_from_svecs({svec(b1)}),
                         rows_from_svecs({svec(m1)}), svec(c), svec(d));
}

// pentagon LP (q = 5) with its seven-row mapping table.
inline MpcloInstance example3() {
    Mat a(3, 5);
    double av[3][5] = {{1, 1, 1, 0, 0}, {0, 1, 0, 1, 0}, {1, 0, 0, 0, 1}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 5; ++j) a(i, j) = av[i][j];
    Mat b(1, 5);
    double bv[5] = {1, 1, -2, -1, -1};
    for (int j = 0; j < 5; ++j) b(0, j) = bv[j];
    Mat m(1, 5);
    double mv[5] = {-0.5, 0.5, 0, -0.5, 0.5};
    for (int j = 0; j < 5; ++j) m(0, j) = mv[j];
    Vec c = {-1, -1, 0, 0, 0};
    Vec d = {1, 1, 1, 1, 1.5};
    return make_instance(orthant_cone(5), a, b, m, c, d);
}

// 3x3 elliptope SDP pair with r = 2 and gram = 2 I.
inline MpcloInstance example4() {
    Mat c = sym3({0, 0, 0, 0, -1, 0});
    Mat m1 = sym3({0, 1, 0, 0, 0, 0});
    Mat m2 = sym3({0, 0, -1, 0, 0, 0});
    Mat a1 = sym3({1, 0, 0, 0, 0, 0});
    Mat a2 = sym3({0, 0, 0, 1, 0, 0});
    Mat a3 = sym3({0, 0, 0, 0, 0, 1});
    Mat b1 = sym3({0, 0, 0, 0, 1, 0});
    Mat d = sym3({1, 0, 0, 1, 0, 1});
    return make_instance(psd_cone(3), rows_from_svecs({svec(a1), svec(a2), svec(a3)}),
                         rows_from_svecs({svec(b1)}), rows_from_svecs({svec(m1), svec(m2)}), svec(c),
                         svec(d));
}

}  // namespace mpclo::testing
