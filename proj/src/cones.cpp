#include "mpclo/cones.hpp"

#include <algorithm>
#include <cmath>

namespace mpclo {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

int ConeSpec::total_dim() const {
    int n = 0;
    for (const Block& b : blocks) n += b.vec_dim();
    return n;
}

int ConeSpec::barrier_degree() const {
    int n = 0;
    for (const Block& b : blocks) n += b.barrier_degree();
    return n;
}

Vec ConeSpec::central_element() const {
    Vec e(total_dim(), 0.0);
    int off = 0;
    for (const Block& b : blocks) {
        if (b.kind == BlockKind::Orthant) {
            std::fill(e.begin() + off, e.begin() + off + b.size, 1.0);
        } else {
            int k = off;
            for (int i = 0; i < b.size; ++i)
                for (int j = i; j < b.size; ++j, ++k)
                    if (i == j) e[k] = 1.0;
        }
        off += b.vec_dim();
    }
    return e;
}

Vec svec(const Mat& x, double sym_tol_scale) {
    if (x.rows != x.cols) throw DimensionMismatch("svec expects a square matrix");
    const int n = x.rows;
    const double sym_tol = sym_tol_scale * (1.0 + max_abs(x));
    Vec v(n * (n + 1) / 2, 0.0);
    int k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j, ++k) {
            if (std::fabs(x(i, j) - x(j, i)) > sym_tol)
                throw AsymmetricInput("entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
            double avg = 0.5 * (x(i, j) + x(j, i));
            v[k] = (i == j) ? avg : kSqrt2 * avg;
        }
    return v;
}

Mat smat(const Vec& v, int order) {
    if (static_cast<int>(v.size()) != order * (order + 1) / 2)
        throw DimensionMismatch("smat: vector length does not match order");
    Mat x(order, order);
    int k = 0;
    for (int i = 0; i < order; ++i)
        for (int j = i; j < order; ++j, ++k) {
            double val = (i == j) ? v[k] : v[k] / kSqrt2;
            x(i, j) = val;
            x(j, i) = val;
        }
    return x;
}

double cone_margin(const Vec& z, const ConeSpec& spec) {
    if (static_cast<int>(z.size()) != spec.total_dim())
        throw DimensionMismatch("cone_margin: vector length vs cone dimension");
    double margin = std::numeric_limits<double>::infinity();
    int off = 0;
    for (const Block& b : spec.blocks) {
        if (b.kind == BlockKind::Orthant) {
            for (int i = 0; i < b.size; ++i) margin = std::min(margin, z[off + i]);
        } else {
            Vec blk(z.begin() + off, z.begin() + off + b.vec_dim());
            Mat x = smat(blk, b.size);
            Vec ev;
            Mat q;
            sym_eig(x, ev, q);
            margin = std::min(margin, ev[0]);
        }
        off += b.vec_dim();
    }
    return margin;
}

Membership cone_membership(const Vec& z, const ConeSpec& spec, double tol) {
    double margin = cone_margin(z, spec);
    if (margin > tol) return {MembershipStatus::Interior, margin};
    if (margin < -tol) return {MembershipStatus::Outside, margin};
    return {MembershipStatus::Boundary, margin};
}

Vec project_cone(const Vec& z, const ConeSpec& spec) {
    if (static_cast<int>(z.size()) != spec.total_dim())
        throw DimensionMismatch("project_cone: vector length vs cone dimension");
    Vec out = z;
    int off = 0;
    for (const Block& b : spec.blocks) {
        if (b.kind == BlockKind::Orthant) {
            for (int i = 0; i < b.size; ++i) out[off + i] = std::max(z[off + i], 0.0);
        } else {
            Vec blk(z.begin() + off, z.begin() + off + b.vec_dim());
            Mat x = smat(blk, b.size);
            Vec ev;
            Mat q;
            sym_eig(x, ev, q);
            Mat clipped(b.size, b.size);
            for (int r = 0; r < b.size; ++r)
                for (int c = 0; c < b.size; ++c) {
                    double s = 0.0;
                    for (int k = 0; k < b.size; ++k) {
                        double lam = std::max(ev[k], 0.0);
                        s += q(r, k) * lam * q(c, k);
                    }
                    clipped(r, c) = s;
                }
            Vec pv = svec(clipped, 1e-6);
            std::copy(pv.begin(), pv.end(), out.begin() + off);
        }
        off += b.vec_dim();
    }
    return out;
}

}  // namespace mpclo
